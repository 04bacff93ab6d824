#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
CDS premia under constant (CRR) and stochastic (SRR) recovery rates:
recovery map, credit triangle and its inverse, spread paths driven by an
integrated CARMA process, default times and the intensity-based fair spread.
"""
import logging

from CARMApytools.base.errors import InvalidParameterError, NonInvertibleError

logger = logging.getLogger(__name__)


class RecoveryParams:
    """
    Recovery-rate model. Build with :py:meth:`constant` or
    :py:meth:`stochastic`.

    .. math::

        R_{t} = \\beta_{2} + \\beta_{0}e^{\\beta_{1}\\gamma_{t}}

    Returns:
        self.mode (str): 'constant' or 'stochastic'.
        self.R (float): Constant mode only.
        self.beta0, self.beta1, self.beta2 (float): Stochastic mode only.
        self.range_warning (bool): :math:`\\beta_{0}+\\beta_{2}\\geq 1`, so
            R can exceed 1 at small intensities.
    """

    def __init__(self, mode, R=None, beta0=None, beta1=None, beta2=None):
        import numpy as np
        import warnings

        self.mode = mode
        self.range_warning = False
        if mode == 'constant':
            if R is None or not np.isfinite(R) or not 0 < R < 1:
                raise InvalidParameterError('Constant recovery must be in (0, 1), got {}.'.format(R))
            self.R = float(R)
        elif mode == 'stochastic':
            values = [beta0, beta1, beta2]
            if any([v is None or not np.isfinite(v) for v in values]):
                raise InvalidParameterError('beta0, beta1 and beta2 must all be finite numbers.')
            if not 0 <= beta0 < 1:
                raise InvalidParameterError('beta0 must be in [0, 1), got {}.'.format(beta0))
            if not 0 < beta2 < 1:
                raise InvalidParameterError('beta2 must be in (0, 1), got {}.'.format(beta2))
            if not beta1 <= 0:
                raise InvalidParameterError('beta1 must be non-positive, got {}.'.format(beta1))
            self.beta0 = float(beta0)
            self.beta1 = float(beta1)
            self.beta2 = float(beta2)
            if self.beta0 + self.beta2 >= 1:
                self.range_warning = True
                warnings.warn('beta0 + beta2 = {:.6g} >= 1: the recovery rate exceeds 1 at small intensities.'.format(
                    self.beta0 + self.beta2), stacklevel=3)
        else:
            raise InvalidParameterError("Unknown recovery mode '{}'. Use 'constant' or 'stochastic'.".format(mode))

    @classmethod
    def constant(cls, R):
        return cls('constant', R=R)

    @classmethod
    def stochastic(cls, beta0, beta1, beta2):
        return cls('stochastic', beta0=beta0, beta1=beta1, beta2=beta2)

    def __repr__(self):
        if self.mode == 'constant':
            return 'RecoveryParams.constant(R={})'.format(self.R)
        return 'RecoveryParams.stochastic(beta0={}, beta1={}, beta2={})'.format(self.beta0, self.beta1, self.beta2)

    def as_stochastic(self):
        """
        Stochastic form of the model. Constant R maps to
        :math:`(\\beta_{0},\\beta_{1},\\beta_{2}) = (0, 0, R)`.
        """
        if self.mode == 'stochastic':
            return self
        return RecoveryParams.stochastic(0., 0., self.R)

    @property
    def gamma_star(self):
        """
        Intensity where the recovery rate crosses 1. Only defined when
        ``range_warning`` is set and :math:`\\beta_{1} < 0`.
        """
        import numpy as np

        if not self.range_warning or self.beta1 == 0:
            return None
        return float(np.log((1 - self.beta2) / self.beta0) / self.beta1)

    def to_dict(self):
        if self.mode == 'constant':
            return {'mode': 'constant', 'R': self.R}
        return {'mode': 'stochastic', 'beta0': self.beta0, 'beta1': self.beta1, 'beta2': self.beta2}

    @classmethod
    def from_dict(cls, data):
        data = dict(data)
        mode = data.pop('mode', 'stochastic' if 'beta0' in data else 'constant')
        return cls(mode, **data)


class IntensityPath:
    """
    Default intensity on a uniform grid.

    Args:
        times (array[float]): Uniform, ascending.
        gamma (array[float]): >= 0.
    """

    def __init__(self, times, gamma):
        import numpy as np

        self.times = np.array(times, dtype=float).reshape([-1])
        self.gamma = np.array(gamma, dtype=float).reshape([-1])
        if self.times.shape != self.gamma.shape:
            raise ValueError('Intensity times and values must have the same length.')
        if not np.all(np.isfinite(self.gamma)) or np.any(self.gamma < 0):
            raise InvalidParameterError('Intensities must be finite and non-negative.')
        if np.any(np.diff(self.times) <= 0):
            raise ValueError('Intensity times must be strictly increasing.')

    @classmethod
    def constant(cls, gamma, horizon, h):
        """
        Constant intensity on :math:`[0, horizon]` with step h.
        """
        import numpy as np

        n = int(round(horizon / h))
        times = np.arange(n + 1) * h
        return cls(times, np.full(n + 1, float(gamma)))


class SpreadPath:
    """
    CDS premia on a uniform grid.

    Args:
        times (array[float])
        premium (array[float]): > 0.
        tenor (float): Contract maturity T, > 0.
    """

    def __init__(self, times, premium, tenor=5.):
        import numpy as np

        self.times = np.array(times, dtype=float).reshape([-1])
        self.premium = np.array(premium, dtype=float).reshape([-1])
        self.tenor = float(tenor)
        if self.times.shape != self.premium.shape:
            raise ValueError('Spread times and values must have the same length.')
        if not np.all(np.isfinite(self.premium)) or np.any(self.premium <= 0):
            raise InvalidParameterError('CDS premia must be finite and positive.')
        if not self.tenor > 0:
            raise ValueError('Tenor must be positive.')

    def log_returns(self):
        import numpy as np

        return np.diff(np.log(self.premium))


class DiscountCurve:
    """
    Deterministic discounting at a constant short rate,
    :math:`D_{s}^{t} = e^{-r(t-s)}`.

    Args:
        short_rate (float): r >= 0.
    """

    def __init__(self, short_rate=0.):
        if not short_rate >= 0:
            raise InvalidParameterError('The short rate must be non-negative, got {}.'.format(short_rate))
        self.short_rate = float(short_rate)

    def discount(self, s, t):
        import numpy as np

        return np.exp(-self.short_rate * (np.array(t, dtype=float) - s))


def recovery_rate(params, gamma):
    """
    Recovery rate at intensity ``gamma``. Values outside (0,1) are not
    clamped.

    Args:
        params (RecoveryParams)
        gamma (float | array[float])

    Returns:
        float | array[float]
    """
    import numpy as np

    if params.mode == 'constant':
        R = np.full(np.shape(gamma), params.R)
    else:
        R = params.beta2 + params.beta0 * np.exp(params.beta1 * np.array(gamma, dtype=float))

    return float(R) if np.ndim(gamma) == 0 else R


def credit_triangle_spread(params, gamma):
    """
    Credit triangle, :math:`C = (1-R(\\gamma))\\gamma`.

    Args:
        params (RecoveryParams)
        gamma (float | array[float]): > 0

    Returns:
        float | array[float]

    :raise InvalidParameterError: If a spread is not positive (R >= 1).
    """
    import numpy as np

    g = np.array(gamma, dtype=float)
    if np.any(~(g > 0)):
        raise ValueError('Intensities must be positive.')
    C = (1 - np.array(recovery_rate(params, g))) * g
    if np.any(C <= 0):
        raise InvalidParameterError(
            'Recovery rate >= 1 at intensity {:.6g}: the spread is not positive.'.format(g.reshape([-1])[np.argmin(C.reshape([-1]))]))

    return float(C) if np.ndim(gamma) == 0 else C


def log_spread_elasticity(params, gamma):
    """
    :math:`d\\log C/d\\log\\gamma = 1 + \\beta_{0}|\\beta_{1}|\\gamma e^{\\beta_{1}\\gamma}/(1-R(\\gamma))`.
    Equal to 1 for constant recovery.
    """
    import numpy as np

    g = np.array(gamma, dtype=float)
    if params.mode == 'constant':
        return np.ones_like(g)
    ex = params.beta0 * np.exp(params.beta1 * g)
    return 1. + (-params.beta1) * g * ex / (1. - params.beta2 - ex)


def _bisect(f, target, lo, hi, rtol, max_iter=300):
    import numpy as np

    for _ in range(max_iter):
        if np.all(hi - lo <= rtol * hi):
            break
        mid = 0.5 * (lo + hi)
        below = f(mid) < target
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)

    return 0.5 * (lo + hi)


def invert_spread(params, spread, upper_branch=False, rtol=1e-12):
    """
    Intensity implied by a spread through the credit triangle, by bisection on
    the bracket
    :math:`[C/(1-\\beta_{2}),\\ C/(1-\\beta_{2}-\\beta_{0})]`.

    Args:
        params (RecoveryParams)
        spread (float | array[float]): > 0
        upper_branch (bool): For :math:`\\beta_{0}+\\beta_{2}\\geq 1`, solve on
            the increasing branch :math:`\\gamma > \\gamma^{*}` where the
            recovery rate is below 1.
        rtol (float): Relative tolerance on the intensity.

    Returns:
        float | array[float]

    :raise NonInvertibleError: If :math:`\\beta_{0}+\\beta_{2}\\geq 1` and
        ``upper_branch`` is off, or no branch with R < 1 exists.
    """
    import numpy as np
    import warnings

    s = np.array(spread, dtype=float)
    if np.any(~(s > 0)) or np.any(~np.isfinite(s)):
        raise ValueError('Spreads must be finite and positive.')

    if params.mode == 'constant':
        g = s / (1 - params.R)
        return float(g) if np.ndim(spread) == 0 else g

    b0, b1, b2 = params.beta0, params.beta1, params.beta2

    def triangle(g):
        return (1 - b2 - b0 * np.exp(b1 * g)) * g

    if not params.range_warning:
        lo = s / (1 - b2)
        hi = s / (1 - b2 - b0)
        g = _bisect(triangle, s, lo, hi, rtol)
    else:
        if not upper_branch:
            raise NonInvertibleError(
                'beta0 + beta2 = {:.6g} >= 1: the credit triangle is not invertible. '
                'Use upper_branch=True to solve on the branch with R < 1.'.format(b0 + b2))
        gstar = params.gamma_star
        if gstar is None:
            raise NonInvertibleError('beta1 = 0 and beta0 + beta2 >= 1: the recovery rate is never below 1.')
        warnings.warn('Spread inversion on the upper branch gamma > {:.6g}.'.format(gstar), stacklevel=2)
        lo = np.full(s.shape, gstar)
        width = s / (1 - b2)
        for _ in range(200):
            if np.all(triangle(gstar + width) >= s):
                break
            width = np.where(triangle(gstar + width) >= s, width, 2 * width)
        g = _bisect(triangle, s, lo, gstar + width, rtol)

    return float(g) if np.ndim(spread) == 0 else g


def generate_spread_path(spec, driver, params, c0, h, n_steps, rng=None,
                         x0='stationary', tenor=5., anchor='spread',
                         allow_range_warning=False, scheme=None):
    """
    Spread and intensity paths whose log-returns are the integrated CARMA
    output.

    .. math::

        \\log C_{t_{k}} - \\log C_{t_{k-1}} = \\int_{t_{k-1}}^{t_{k}}Y_{u}du

    With ``anchor='spread'`` the premium is the exponential of the integrated
    CARMA and the intensity is implied by the credit triangle. With
    ``anchor='intensity'`` the intensity is, and the premium follows from the
    credit triangle. Both coincide for constant recovery.

    Args:
        spec (CarmaSpec): Stationary specification.
        driver (LevyDriver)
        params (RecoveryParams)
        c0 (float): Initial premium, > 0.
        h (float): Step.
        n_steps (int)
        rng (Generator | int | None)
        x0 (str | array[float]): See :py:func:`CARMApytools.carma.simulate`.
        tenor (float): CDS maturity carried by the spread path.
        anchor (str): 'spread' or 'intensity'.
        allow_range_warning (bool): Invert on the upper branch when
            :math:`\\beta_{0}+\\beta_{2}\\geq 1`.
        scheme (str | None): Simulation scheme.

    Returns:
        spread (SpreadPath)
        intensity (IntensityPath)
        states (StatePath)
    """
    import numpy as np
    from CARMApytools.carma import simulate

    if not c0 > 0:
        raise ValueError('Initial premium c0 must be positive, got {}.'.format(c0))
    if anchor not in ['spread', 'intensity']:
        raise ValueError("anchor must be 'spread' or 'intensity', got '{}'.".format(anchor))

    path = simulate(spec, driver, h, n_steps, x0=x0, rng=rng, scheme=scheme)
    Y = path.outputs
    increments = 0.5 * path.h * (Y[:-1] + Y[1:])
    cumulative = np.concatenate([[0.], np.cumsum(increments)])
    upper = allow_range_warning and params.range_warning

    if anchor == 'spread':
        premium = c0 * np.exp(cumulative)
        gamma = invert_spread(params, premium, upper_branch=upper)
    else:
        g0 = invert_spread(params, c0, upper_branch=upper)
        gamma = g0 * np.exp(cumulative)
        premium = credit_triangle_spread(params, gamma)

    logger.debug('Spread path: %d steps, premium range [%.6g, %.6g]', n_steps, premium.min(), premium.max())

    return SpreadPath(path.times, premium, tenor), IntensityPath(path.times, gamma), path


def path_table(spread, intensity, params):
    """
    Table of a spread/intensity pair, columns ``time, premium, gamma, recovery``.
    """
    import pandas as pd

    return pd.DataFrame({
        'time'     : spread.times,
        'premium'  : spread.premium,
        'gamma'    : intensity.gamma,
        'recovery' : recovery_rate(params, intensity.gamma),
    })


def simulate_default_time(gamma_path, rng, size=None):
    """
    Default time by inverse transform,
    :math:`\\tau = \\inf\\{t: \\int_{0}^{t}\\gamma_{u}du \\geq E\\}`,
    :math:`E\\sim\\mathrm{Exp}(1)`. The cumulative intensity is the trapezoid
    rule on the grid, interpolated linearly inside a step.

    Args:
        gamma_path (IntensityPath)
        rng (Generator)
        size (int | None): Number of draws.

    Returns:
        float | None: Default time, ``None`` if no default before the end of
            the grid (``size=None``).
        array[float]: Default times with ``np.inf`` for no default (``size``
            given).
    """
    import numpy as np
    from scipy.integrate import cumulative_trapezoid

    t = gamma_path.times
    cumulative = cumulative_trapezoid(gamma_path.gamma, t, initial=0.)
    E = np.atleast_1d(rng.standard_exponential(size))

    idx = np.searchsorted(cumulative, E, side='left')
    tau = np.full(E.shape, np.inf)
    hit = idx < len(t)
    i = idx[hit]
    j = np.maximum(i - 1, 0)
    dL = cumulative[i] - cumulative[j]
    frac = np.where(dL > 0, (E[hit] - cumulative[j]) / np.where(dL > 0, dL, 1.), 0.)
    tau[hit] = t[j] + frac * (t[i] - t[j])

    if size is None:
        return None if np.isinf(tau[0]) else float(tau[0])
    return tau


def premium_legs(gamma_paths, params, curve, s, tenor):
    """
    Per-path default-leg and premium-leg integrals on :math:`[s, s+T]`.

    .. math::

        N = \\int_{s}^{s+T}(1-R_{t})D_{s}^{t}\\gamma_{t}e^{-\\int_{s}^{t}\\gamma_{u}du}dt, \\quad
        D = \\int_{s}^{s+T}D_{s}^{t}e^{-\\int_{s}^{t}\\gamma_{u}du}dt

    The window endpoints are interpolated linearly on each path grid.

    Returns:
        numerator (array[float])
        denominator (array[float])
    """
    import numpy as np
    from scipy.integrate import trapezoid, cumulative_trapezoid

    gamma_paths = list(gamma_paths)
    if len(gamma_paths) == 0:
        raise ValueError('The intensity ensemble is empty.')
    if not tenor > 0:
        raise ValueError('Tenor must be positive, got {}.'.format(tenor))
    end = s + tenor

    num = np.zeros(len(gamma_paths))
    den = np.zeros(len(gamma_paths))
    for k, path in enumerate(gamma_paths):
        t = path.times
        tol = 1e-9 * max(1., abs(end))
        if t[0] > s + tol or t[-1] < end - tol:
            raise ValueError('Intensity path {} covers [{:.6g}, {:.6g}], not the CDS window [{:.6g}, {:.6g}].'.format(
                k, t[0], t[-1], s, end))
        inside = (t > s) & (t < end)
        tw = np.concatenate([[s], t[inside], [end]])
        gw = np.interp(tw, t, path.gamma)
        survival = np.exp(-cumulative_trapezoid(gw, tw, initial=0.))
        D = curve.discount(s, tw)
        loss = 1. - np.array(recovery_rate(params, gw))
        num[k] = trapezoid(loss * D * gw * survival, tw)
        den[k] = trapezoid(D * survival, tw)

    return num, den


def fair_spread(gamma_paths, params, curve, s, tenor):
    """
    Fair CDS spread as a ratio of ensemble means of the default and premium
    legs (see :py:func:`premium_legs`).

    Args:
        gamma_paths (list[IntensityPath]): Monte Carlo ensemble, at least one path.
        params (RecoveryParams)
        curve (DiscountCurve)
        s (float): Valuation time.
        tenor (float): T

    Returns:
        float
    """
    import numpy as np

    num, den = premium_legs(gamma_paths, params, curve, s, tenor)

    return float(np.sum(num) / np.sum(den))


def fair_spread_stderr(gamma_paths, params, curve, s, tenor):
    """
    Delta-method standard error of the ratio estimator,
    :math:`\\sqrt{\\mathrm{Var}(N_{i}-\\hat{C}D_{i})/n}/\\bar{D}`. ``nan`` for
    a single path.

    Returns:
        spread (float)
        stderr (float)
    """
    import numpy as np

    num, den = premium_legs(gamma_paths, params, curve, s, tenor)
    c = np.sum(num) / np.sum(den)
    n = len(num)
    if n < 2:
        return float(c), float('nan')
    resid = num - c * den
    se = np.sqrt(np.var(resid, ddof=1) / n) / np.mean(den)

    return float(c), float(se)
