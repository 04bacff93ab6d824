import setuptools

long_description = 'Python tools for Levy-driven CARMA processes, their affine term structure and CDS premia under constant and stochastic recovery'

setuptools.setup(
    name="CARMApytools",
    version="2026.10.17",
    description="Levy-driven CARMA processes, affine bond pricing and CDS premia with stochastic recovery.",
    long_description=long_description,
    long_description_content_type="text/markdown",
    classifiers=[
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
    ],
    packages=setuptools.find_packages(include=['CARMApytools', 'CARMApytools.*']),
    python_requires=">=3.8",
    install_requires=[
	"numpy",
	"sympy",
	"scipy",
	"pandas",
	"PyYAML",
    ],
    extras_require={
        "test": ["pytest", "hypothesis"],
    },
    entry_points={
        "console_scripts": ["carmapy = CARMApytools.cli:main"],
    },
)
