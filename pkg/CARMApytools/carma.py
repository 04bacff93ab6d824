#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Levy-driven CARMA(p,q) processes

.. math::

    a(D)Y_{t} = b(D)DL_{t}, \\quad
    a(z) = z^{p} + a_{1}z^{p-1} + \\dots + a_{p}, \\quad
    b(z) = b_{0} + b_{1}z + \\dots + b_{p-1}z^{p-1}

in the state-space form :math:`Y_{t} = b^{\\prime}X_{t}`,
:math:`dX_{t} = AX_{t}dt + e\\,dL_{t}`.
"""
from CARMApytools.base.errors import (SpecificationError, StationarityError,
                                      DegeneracyError)

#: Minimum distance between roots treated as distinct.
ROOT_TOL = 1e-8


class CarmaSpec:
    """
    Orders and coefficients of a CARMA(p,q) model. Real coefficients only.

    Args:
        a (array[float] | list[float]): :math:`a_{1},\\dots,a_{p}`.
        b (array[float] | list[float] | None): Either the p-vector
            :math:`b_{0},\\dots,b_{p-1}` or its leading q+1 entries
            :math:`b_{0},\\dots,b_{q}` with :math:`b_{q}=1`. ``None`` for a
            CAR(p) model (b = (1, 0, ..., 0)).

    Returns:
        self.p (int)
        self.q (int)
        self.a (array[float])
        self.b (array[float]): Always of length p.

    :raise SpecificationError: If :math:`b_{q}\\neq 1`, q >= p, or a(z) and
        b(z) have a common root.
    """

    def __init__(self, a, b=None):
        import numpy as np

        a = np.array(a, dtype=float).reshape([-1])
        p = len(a)
        if p < 1:
            raise SpecificationError('The autoregressive order p must be at least 1.')
        if b is None:
            b = [1.]
        b = np.array(b, dtype=float).reshape([-1])
        if len(b) > p:
            raise SpecificationError(
                'At most p = {} moving-average coefficients are allowed, got {}.'.format(p, len(b)))
        if not np.all(np.isfinite(a)) or not np.all(np.isfinite(b)):
            raise SpecificationError('CARMA coefficients must be finite.')

        nonzero = np.nonzero(b)[0]
        if len(nonzero) == 0:
            raise SpecificationError('The moving-average polynomial is identically zero.')
        q = int(nonzero[-1])
        if b[q] != 1.:
            raise SpecificationError(
                'The leading moving-average coefficient b_q must be 1, got b_{} = {}.'.format(q, b[q]))

        bfull = np.zeros(p)
        bfull[:len(b)] = b

        self.p = p
        self.q = q
        self.a = a
        self.b = bfull

        ar = self.ar_roots()
        ma = self.ma_roots()
        if len(ma) > 0:
            dist = np.min(np.abs(ar[:, None] - ma[None, :]))
            if dist <= ROOT_TOL:
                raise SpecificationError(
                    'a(z) and b(z) share a root (distance {:.3e}). Remove the common factor.'.format(dist))

    def __repr__(self):
        return 'CarmaSpec(p={}, q={}, a={}, b={})'.format(
            self.p, self.q, self.a.tolist(), self.b[:self.q + 1].tolist())

    def ar_roots(self):
        """
        Roots of :math:`a(z)`.
        """
        import numpy as np

        return np.roots(np.concatenate([[1.], self.a]))

    def ma_roots(self):
        """
        Roots of :math:`b(z)`, empty for q = 0.
        """
        import numpy as np

        return np.roots(self.b[self.q::-1])

    def to_dict(self):
        return {'a': self.a.tolist(), 'b': self.b[:self.q + 1].tolist()}

    @classmethod
    def from_dict(cls, data):
        return cls(data['a'], data.get('b', None))


class CompanionSystem:
    """
    Companion form of a CARMA specification. Build it with
    :py:func:`build_system`.

    Returns:
        self.A (array[float]): p\\*p companion matrix. Superdiagonal ones,
            last row :math:`(-a_{p},\\dots,-a_{1})`.
        self.e (array[float]): :math:`(0,\\dots,0,1)^{\\prime}`.
        self.eigenvalues (array[complex]): Roots of :math:`a(z)`.
        self.spec (CarmaSpec)
    """

    def __init__(self, A, e, eigenvalues, spec):
        self.A = A
        self.e = e
        self.eigenvalues = eigenvalues
        self.spec = spec
        for arr in (self.A, self.e, self.eigenvalues):
            arr.setflags(write=False)

    @property
    def p(self):
        return self.A.shape[0]


class StatePath:
    """
    Sampled state and output on the grid :math:`t_{k} = kh`, k = 0..N.

    Args:
        h (float): Step length.
        states (array[float]): (N+1)\\*p
        b (array[float]): Output loading.

    Returns:
        self.times (array[float])
        self.states (array[float])
        self.outputs (array[float]): :math:`Y_{k} = b^{\\prime}X_{k}`
    """

    def __init__(self, h, states, b):
        import numpy as np

        self.h = float(h)
        self.states = np.atleast_2d(np.array(states, dtype=float))
        self.b = np.array(b, dtype=float)
        self.times = np.arange(self.states.shape[0]) * self.h
        self.outputs = self.states @ self.b

    @property
    def n_steps(self):
        return self.states.shape[0] - 1

    def to_dataframe(self):
        """
        Columns ``time, Y, X1..Xp``.
        """
        import pandas as pd

        data = {'time': self.times, 'Y': self.outputs}
        for i in range(self.states.shape[1]):
            data['X{}'.format(i + 1)] = self.states[:, i]

        return pd.DataFrame(data)


def build_system(spec):
    """
    Companion matrix, e-vector and eigenvalues of a CARMA specification.

    Args:
        spec (CarmaSpec)

    Returns:
        CompanionSystem
    """
    import numpy as np

    p = spec.p
    A = np.zeros([p, p])
    A[np.arange(p - 1), np.arange(1, p)] = 1.
    A[-1, :] = -spec.a[::-1]
    e = np.zeros(p)
    e[-1] = 1.

    return CompanionSystem(A, e, spec.ar_roots(), spec)


def is_stationary(sys):
    """
    True iff every eigenvalue has a strictly negative real part.
    """
    import numpy as np

    return bool(np.max(sys.eigenvalues.real) < 0)


def _check_distinct(eigenvalues):
    import numpy as np

    lam = np.array(eigenvalues)
    if len(lam) < 2:
        return
    dist = np.abs(lam[:, None] - lam[None, :])
    dist[np.diag_indices(len(lam))] = np.inf
    if np.min(dist) <= ROOT_TOL:
        raise DegeneracyError(
            'Repeated eigenvalues (distance {:.3e}). Use kernel_expm instead.'.format(np.min(dist)))


def kernel(sys, spec, u):
    """
    Moving-average kernel by partial fractions over distinct eigenvalues.

    .. math::

        g(u) = \\sum_{i=1}^{p}\\frac{b(\\lambda_{i})}{a^{\\prime}(\\lambda_{i})}e^{\\lambda_{i}u}
             = b^{\\prime}e^{Au}e

    Args:
        sys (CompanionSystem)
        spec (CarmaSpec)
        u (float | array[float]): Lags, >= 0.

    Returns:
        float | array[float]

    :raise DegeneracyError: If two eigenvalues coincide.
    """
    import numpy as np

    _check_distinct(sys.eigenvalues)
    lam = np.array(sys.eigenvalues, dtype=complex)
    apoly = np.concatenate([[1.], spec.a])
    bval = np.polyval(spec.b[::-1], lam)
    aprime = np.polyval(np.polyder(apoly), lam)
    weight = bval / aprime

    uu = np.array(u, dtype=float)
    g = np.exp(np.multiply.outer(uu, lam)) @ weight
    g = np.real(g)

    return float(g) if np.ndim(u) == 0 else g


def kernel_expm(sys, spec, u):
    """
    Moving-average kernel :math:`b^{\\prime}e^{Au}e` by matrix exponential.
    Valid for repeated eigenvalues.
    """
    import numpy as np
    from scipy.linalg import expm

    uu = np.atleast_1d(np.array(u, dtype=float))
    g = np.array([spec.b @ expm(sys.A * ui) @ sys.e for ui in uu])

    return float(g[0]) if np.ndim(u) == 0 else g


def stationary_covariance(sys, spec, driver):
    """
    Stationary state covariance and output autocovariance function.

    .. math::

        A\\Sigma + \\Sigma A^{\\prime} = -\\sigma^{2}ee^{\\prime}, \\quad
        \\gamma_{Y}(h) = b^{\\prime}e^{Ah}\\Sigma b

    Args:
        sys (CompanionSystem)
        spec (CarmaSpec)
        driver (LevyDriver | tuple): A driver, or (mean_rate, variance_rate).

    Returns:
        Sigma (array[float]): p\\*p
        acvf (callable): Lag(s) -> autocovariance. Negative lags are
            reflected.

    :raise StationarityError: If the system is not stationary.
    """
    import numpy as np
    from scipy.linalg import expm
    from CARMApytools.base.statespace import stationary_state_covariance

    if not is_stationary(sys):
        raise StationarityError(
            'Stationary covariance needs all eigenvalues in the left half plane. Max real part: {:.6g}.'.format(
                np.max(sys.eigenvalues.real)))
    _, variance_rate = _moments(driver)
    Sigma = stationary_state_covariance(sys.A, sys.e, variance_rate)
    Sb = Sigma @ spec.b

    def acvf(lag):
        lags = np.abs(np.atleast_1d(np.array(lag, dtype=float)))
        val = np.array([spec.b @ expm(sys.A * l) @ Sb for l in lags])
        return float(val[0]) if np.ndim(lag) == 0 else val

    return Sigma, acvf


def _moments(driver):
    if hasattr(driver, 'moment_rates'):
        return driver.moment_rates()
    mean_rate, variance_rate = driver
    return float(mean_rate), float(variance_rate)


def simulate(spec, driver, h, n_steps, x0='stationary', rng=None, scheme=None):
    """
    Simulate the state on an equally spaced grid by the exact discretisation
    :math:`X_{k+1} = e^{Ah}X_{k} + Z_{k}`.

    For compound Poisson drivers, :math:`Z_{k}=\\sum_{j}e^{A(h-t_{j})}e\\Delta L_{j}`
    over the sampled jumps of the step. For the other drivers, :math:`Z_{k}`
    is Gaussian with mean :math:`\\mu m` and covariance :math:`\\sigma^{2}Q`
    (see :py:func:`CARMApytools.base.statespace.discretize`).

    Args:
        spec (CarmaSpec)
        driver (LevyDriver)
        h (float): Step length, > 0.
        n_steps (int): Number of steps N, > 0.
        x0 (str | array[float]): 'stationary' draws :math:`X_{0}` from a
            Gaussian with the stationary mean :math:`-A^{-1}e\\mu` and
            covariance, otherwise the initial state (a scalar is broadcast).
            The mean is 0 for drivers with zero mean rate.
        rng (Generator | int | None)
        scheme (str | None): 'exact' or 'gaussian'. Default: 'exact' for
            compound Poisson drivers, 'gaussian' otherwise.

    Returns:
        StatePath

    :raise StationarityError: If x0 is 'stationary' and the system is not.
    """
    import numpy as np
    from scipy.linalg import expm
    from CARMApytools.levy import make_rng
    from CARMApytools.base.statespace import (discretize, psd_sqrt,
                                              stationary_state_mean)

    if not h > 0:
        raise ValueError('The step length h must be positive, got {}.'.format(h))
    if int(n_steps) != n_steps or n_steps <= 0:
        raise ValueError('The number of steps must be a positive integer, got {}.'.format(n_steps))
    n_steps = int(n_steps)
    rng = make_rng(rng)

    sys = build_system(spec)
    p = spec.p
    mean_rate, variance_rate = driver.moment_rates()
    if scheme is None:
        scheme = 'exact' if driver.kind == 'cpn' else 'gaussian'
    if scheme not in ['exact', 'gaussian']:
        raise ValueError("Unknown scheme '{}'. Use 'exact' or 'gaussian'.".format(scheme))
    if scheme == 'exact' and driver.kind != 'cpn':
        raise ValueError("The exact scheme is available for compound Poisson drivers only.")

    Phi, m, Q = discretize(sys.A, sys.e, h)

    states = np.zeros([n_steps + 1, p])
    if isinstance(x0, str):
        if x0 != 'stationary':
            raise ValueError("x0 must be 'stationary' or a state vector.")
        Sigma, _ = stationary_covariance(sys, spec, driver)
        states[0] = stationary_state_mean(sys.A, sys.e, mean_rate) \
            + psd_sqrt(Sigma) @ rng.standard_normal(p)
    else:
        states[0] = np.broadcast_to(np.array(x0, dtype=float), (p,))

    if scheme == 'gaussian':
        L = psd_sqrt(variance_rate * Q)
        drift = mean_rate * m
        noise = rng.standard_normal([n_steps, p]) @ L.T + drift
        for k in range(n_steps):
            states[k + 1] = Phi @ states[k] + noise[k]
    else:
        for k in range(n_steps):
            jumps = driver.sample_jumps(h, rng)
            z = np.zeros(p)
            for t, dl in zip(jumps.times, jumps.sizes):
                z += expm(sys.A * (h - t)) @ sys.e * dl
            states[k + 1] = Phi @ states[k] + z

    return StatePath(h, states, spec.b)


def integrated_output(path, from_index, to_index):
    """
    Trapezoidal approximation of :math:`\\int Y_{u}du` between two grid
    indices.

    Args:
        path (StatePath)
        from_index (int)
        to_index (int): ``from_index < to_index <= N``

    Returns:
        float
    """
    from scipy.integrate import trapezoid

    if not (0 <= from_index < to_index <= path.n_steps):
        raise ValueError('Index range [{}, {}] is outside [0, {}] or empty.'.format(
            from_index, to_index, path.n_steps))

    return float(trapezoid(path.outputs[from_index:to_index + 1], dx=path.h))
