#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Levy drivers of the CARMA state equation: Brownian motion with drift,
compound Poisson with normal jumps and normal inverse Gaussian (NIG).
Drivers are immutable; randomness only comes from the ``numpy.random.Generator``
passed to the sampling methods.
"""
from CARMApytools.base.errors import InvalidParameterError, UnsupportedDriverError


def make_rng(seed=None):
    """
    Get a ``numpy.random.Generator``.

    Args:
        seed (int | Generator | SeedSequence | None): A generator is returned
            as it is, anything else seeds a new PCG64 generator.

    Returns:
        rng (Generator)
    """
    import numpy as np

    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


class JumpRecord:
    """
    Jumps of a compound Poisson driver in one interval.

    Args:
        times (array[float]): Jump epochs measured from the start of the
            interval, ascending.
        sizes (array[float]): Jump sizes, same length.
    """

    def __init__(self, times, sizes):
        import numpy as np

        self.times = np.array(times, dtype=float).reshape([-1])
        self.sizes = np.array(sizes, dtype=float).reshape([-1])
        if self.times.shape != self.sizes.shape:
            raise ValueError('Jump times and sizes must have the same length.')
        if np.any(np.diff(self.times) < 0):
            raise ValueError('Jump times must be sorted ascending.')

    def __len__(self):
        return len(self.times)


class LevyDriver:
    """
    Base class of Levy drivers. Use the subclasses, or build one from a JSON
    object with :py:meth:`from_dict`.

    Subclasses define ``kind``, ``_keys`` and implement ``_check``,
    ``_increment`` and ``moment_rates``.
    """
    kind = None
    _keys = ()

    def __init__(self, **kwargs):
        import numpy as np

        missing = [k for k in self._keys if k not in kwargs]
        unknown = [k for k in kwargs if k not in self._keys]
        if len(missing) > 0 or len(unknown) > 0:
            raise InvalidParameterError(
                "Driver '{}' needs parameters {}. Missing: {}, unknown: {}.".format(
                    self.kind, list(self._keys), missing, unknown))
        param = {}
        for k in self._keys:
            v = float(kwargs[k])
            if not np.isfinite(v):
                raise InvalidParameterError("Parameter '{}' must be finite.".format(k))
            param[k] = v
        object.__setattr__(self, '_param', param)
        self._check()

    def __setattr__(self, name, value):
        raise AttributeError('Levy drivers are immutable.')

    def __getattr__(self, name):
        param = self.__dict__.get('_param', {})
        if name in param:
            return param[name]
        raise AttributeError(name)

    def __eq__(self, other):
        return type(self) is type(other) and self._param == other._param

    def __hash__(self):
        return hash((self.kind, tuple(sorted(self._param.items()))))

    def __repr__(self):
        args = ', '.join('{}={}'.format(k, self._param[k]) for k in self._keys)
        return '{}({})'.format(type(self).__name__, args)

    def _check(self):
        pass

    def _increment(self, dt, rng, size):
        raise NotImplementedError

    def moment_rates(self):
        """
        Mean and variance of :math:`L_{1}`.

        Returns:
            mean_rate (float)
            variance_rate (float)
        """
        raise NotImplementedError

    def sample_increment(self, dt, rng, size=None):
        """
        Draw :math:`L_{t+dt}-L_{t}`.

        Args:
            dt (float): Interval length, > 0.
            rng (Generator): Random stream.
            size (int | None): Number of independent draws. ``None`` for a
                single float.

        Returns:
            float | array[float]
        """
        if not dt > 0:
            raise ValueError('The interval length dt must be positive, got {}.'.format(dt))
        return self._increment(float(dt), rng, size)

    def sample_jumps(self, dt, rng):
        """
        Jump epochs and sizes in an interval of length ``dt``. Only for
        compound Poisson drivers.

        :raise UnsupportedDriverError: For drivers without finite activity.
        """
        raise UnsupportedDriverError(
            "Driver '{}' has no finite jump record. Only 'cpn' drivers can be sampled jump by jump.".format(self.kind))

    def to_dict(self):
        """
        JSON-serializable form, ``{"kind": ..., <parameters>}``.
        """
        d = {'kind': self.kind}
        d.update(self._param)
        return d

    @classmethod
    def from_dict(cls, data):
        """
        Build a driver from ``{"kind": "brownian" | "cpn" | "nig", ...}``.

        :raise InvalidParameterError: Unknown kind or bad parameters.
        """
        data = dict(data)
        kind = str(data.pop('kind', '')).lower()
        classes = {
            'brownian' : Brownian,
            'cpn'      : CompoundPoissonNormal,
            'nig'      : NIG,
        }
        if kind not in classes:
            raise InvalidParameterError(
                "Unknown driver kind '{}'. Use one of {}.".format(kind, list(classes.keys())))
        return classes[kind](**data)


class Brownian(LevyDriver):
    """
    Brownian motion with drift, :math:`L_{t} = \\mu t + \\sigma W_{t}`.

    Args:
        drift (float): :math:`\\mu`, per unit time.
        volatility (float): :math:`\\sigma`, per square root of time, >= 0.
    """
    kind = 'brownian'
    _keys = ('drift', 'volatility')

    def __init__(self, drift=0., volatility=1.):
        super().__init__(drift=drift, volatility=volatility)

    def _check(self):
        if self.volatility < 0:
            raise InvalidParameterError('Brownian volatility must be non-negative.')

    def _increment(self, dt, rng, size):
        import numpy as np

        z = rng.standard_normal(size)
        x = self.drift * dt + self.volatility * np.sqrt(dt) * z
        return float(x) if size is None else x

    def moment_rates(self):
        return self.drift, self.volatility**2


class CompoundPoissonNormal(LevyDriver):
    """
    Compound Poisson process with normally distributed jumps.

    Args:
        rate (float): Jump intensity :math:`\\lambda` per unit time, >= 0.
        jump_mean (float): Mean jump size.
        jump_sd (float): Standard deviation of jump sizes, >= 0.
    """
    kind = 'cpn'
    _keys = ('rate', 'jump_mean', 'jump_sd')

    def __init__(self, rate=1., jump_mean=0., jump_sd=1.):
        super().__init__(rate=rate, jump_mean=jump_mean, jump_sd=jump_sd)

    def _check(self):
        if self.rate < 0:
            raise InvalidParameterError('Jump rate must be non-negative.')
        if self.jump_sd < 0:
            raise InvalidParameterError('Jump size standard deviation must be non-negative.')

    def _increment(self, dt, rng, size):
        import numpy as np

        n = rng.poisson(self.rate * dt, size)
        if size is None:
            if n == 0:
                return 0.
            return float(rng.normal(n * self.jump_mean, self.jump_sd * np.sqrt(n)))
        z = rng.standard_normal(size)
        return n * self.jump_mean + self.jump_sd * np.sqrt(n) * z

    def sample_jumps(self, dt, rng):
        """
        Jump epochs and sizes in ``[0, dt]``.

        The number of jumps is Poisson(rate\\*dt), epochs are i.i.d. uniform and
        returned sorted, sizes are i.i.d. normal.

        Args:
            dt (float): Interval length, > 0.
            rng (Generator)

        Returns:
            JumpRecord
        """
        import numpy as np

        if not dt > 0:
            raise ValueError('The interval length dt must be positive, got {}.'.format(dt))
        n = rng.poisson(self.rate * dt)
        if n == 0:
            return JumpRecord([], [])
        times = np.sort(rng.uniform(0., dt, n))
        sizes = rng.normal(self.jump_mean, self.jump_sd, n)

        return JumpRecord(times, sizes)

    def moment_rates(self):
        return self.rate * self.jump_mean, self.rate * (self.jump_sd**2 + self.jump_mean**2)


class NIG(LevyDriver):
    """
    Normal inverse Gaussian process, parameterized by
    :math:`(\\alpha, \\beta, \\delta, \\mu)` per unit time. Increments over
    :math:`dt` are NIG with :math:`\\delta dt` and :math:`\\mu dt`.

    Args:
        alpha (float): Tail heaviness, > 0.
        beta (float): Asymmetry, :math:`|\\beta| < \\alpha`.
        delta (float): Scale, > 0.
        mu (float): Location.
    """
    kind = 'nig'
    _keys = ('alpha', 'beta', 'delta', 'mu')

    def __init__(self, alpha=1., beta=0., delta=1., mu=0.):
        super().__init__(alpha=alpha, beta=beta, delta=delta, mu=mu)

    def _check(self):
        if not self.alpha > 0:
            raise InvalidParameterError('NIG alpha must be positive.')
        if not abs(self.beta) < self.alpha:
            raise InvalidParameterError('NIG parameters must satisfy |beta| < alpha.')
        if not self.delta > 0:
            raise InvalidParameterError('NIG delta must be positive.')

    @property
    def gamma(self):
        import numpy as np

        return np.sqrt(self.alpha**2 - self.beta**2)

    @staticmethod
    def _inverse_gaussian(mean, shape, rng, size):
        """
        Inverse Gaussian draws by transformation with rejection
        (Michael, Schucany and Haas).
        """
        import numpy as np

        nu = rng.standard_normal(size)
        u = rng.uniform(0., 1., size)
        y = nu**2
        x = mean + mean**2 * y / (2 * shape) \
            - mean / (2 * shape) * np.sqrt(4 * mean * shape * y + mean**2 * y**2)
        return np.where(u <= mean / (mean + x), x, mean**2 / x)

    def _increment(self, dt, rng, size):
        import numpy as np

        # Subordinated normal: T ~ IG(delta dt / gamma, (delta dt)^2)
        ddt = self.delta * dt
        t = self._inverse_gaussian(ddt / self.gamma, ddt**2, rng, size)
        z = rng.standard_normal(size)
        x = self.mu * dt + self.beta * t + np.sqrt(t) * z
        return float(x) if size is None else x

    def moment_rates(self):
        """
        .. math::

            E[L_{1}] = \\mu + \\frac{\\delta\\beta}{\\gamma}, \\quad
            Var[L_{1}] = \\frac{\\delta\\alpha^{2}}{\\gamma^{3}}, \\quad
            \\gamma = \\sqrt{\\alpha^{2}-\\beta^{2}}
        """
        g = self.gamma
        return self.mu + self.delta * self.beta / g, self.delta * self.alpha**2 / g**3


def fit_driver(increments, dt, kind='nig'):
    """
    Fit a driver to recovered increments on a grid of step ``dt``.
    Brownian drivers are fitted by moments, NIG drivers by maximum likelihood
    (``scipy.stats.norminvgauss``) and rescaled to unit time.

    Args:
        increments (array[float]): Increments over intervals of length dt.
        dt (float): Interval length.
        kind (str): 'brownian' or 'nig'.

    Returns:
        LevyDriver

    :raise UnsupportedDriverError: For 'cpn'.
    """
    import numpy as np
    from scipy.stats import norminvgauss

    x = np.array(increments, dtype=float)
    x = x[np.isfinite(x)]
    if len(x) < 10:
        raise ValueError('At least 10 finite increments are needed to fit a driver.')
    if not dt > 0:
        raise ValueError('The interval length dt must be positive, got {}.'.format(dt))

    if kind == 'brownian':
        return Brownian(drift=np.mean(x) / dt, volatility=np.std(x, ddof=1) / np.sqrt(dt))
    elif kind == 'nig':
        a, b, loc, scale = norminvgauss.fit(x)
        return NIG(alpha=a / scale, beta=b / scale, delta=scale / dt, mu=loc / dt)
    else:
        raise UnsupportedDriverError("Driver fitting is available for 'brownian' and 'nig' only.")
