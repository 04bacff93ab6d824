from CARMApytools import base
from CARMApytools import units
from CARMApytools import levy
from CARMApytools import carma
from CARMApytools import ats
from CARMApytools import credit
from CARMApytools import inference
from CARMApytools import dataio
from CARMApytools import config

import sys

if sys.version_info >= (3, 8):
    from importlib import metadata
else:
    import importlib_metadata as metadata

__author__ = "CARMApytools Development Team"
try:
    __version__ = metadata.version('CARMApytools')
except metadata.PackageNotFoundError:
    __version__ = '0+unknown'
