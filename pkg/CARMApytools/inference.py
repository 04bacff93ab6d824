#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Gaussian quasi-maximum likelihood of CARMA models through the Kalman filter
of the exactly discretised state space, Metropolis sampling of the recovery
parameters and BIC comparison of the constant (CRR) and stochastic (SRR)
recovery models.
"""
import logging

from CARMApytools.base.errors import (NumericalError, ConditioningError, OptimizationError,
                                      SpecificationError, NonInvertibleError,
                                      UnsupportedModeError, DataQualityError)

logger = logging.getLogger(__name__)

#: Added to every predicted observation variance.
JITTER = 1e-10
#: Objective value of infeasible optimizer iterates.
PENALTY = 1e300
#: Shortest series accepted by the fitting routines.
MIN_OBS = 50


class CarmaTheta:
    """
    CARMA coefficients and driver moment rates.

    Args:
        spec (CarmaSpec)
        mean_rate (float)
        variance_rate (float)
    """

    def __init__(self, spec, mean_rate=0., variance_rate=1.):
        self.spec = spec
        self.mean_rate = float(mean_rate)
        self.variance_rate = float(variance_rate)
        self.converged = True
        self.warnings = []

    @property
    def driver_moments(self):
        return self.mean_rate, self.variance_rate

    def to_dict(self):
        d = self.spec.to_dict()
        d.update({'p': self.spec.p, 'q': self.spec.q,
                  'mean_rate': self.mean_rate, 'variance_rate': self.variance_rate})
        return d

    @classmethod
    def from_dict(cls, data):
        from CARMApytools.carma import CarmaSpec

        return cls(CarmaSpec(data['a'], data.get('b', None)),
                   data.get('mean_rate', 0.), data.get('variance_rate', 1.))


class KalmanResult:
    """
    Output of :py:func:`kalman_filter`.

    Returns:
        self.predictions (array[float]): One-step predictions of y.
        self.variances (array[float]): Prediction variances, without jitter.
        self.innovations (array[float]): y minus predictions.
        self.filtered_states (array[float] | None): n\\*p, if requested.
        self.loglik (float)
        self.steady_index (int | None): First observation filtered with the
            steady-state gain.
    """

    def __init__(self, predictions, variances, innovations, filtered_states, loglik, steady_index):
        self.predictions = predictions
        self.variances = variances
        self.innovations = innovations
        self.filtered_states = filtered_states
        self.loglik = loglik
        self.steady_index = steady_index


class StateSpaceModel:
    """
    Exactly discretised state space of a CARMA model observed without noise,

    .. math::

        X_{k+1} = e^{Ah}X_{k} + \\mu m + Z_{k}, \\quad
        \\mathrm{Var}(Z_{k}) = \\sigma^{2}Q, \\quad y_{k} = b^{\\prime}X_{k}

    The Riccati recursion does not depend on the data, so gains are computed
    once and reused for every series of the same model.

    Args:
        spec (CarmaSpec): Stationary specification.
        mean_rate (float): :math:`\\mu`
        variance_rate (float): :math:`\\sigma^{2}`
        h (float): Sampling step.
        tol (float): Relative change of the predicted covariance below which
            the recursion is steady.

    :raise StationarityError: Non-stationary specification.
    """

    def __init__(self, spec, mean_rate, variance_rate, h, tol=1e-12):
        import numpy as np
        from CARMApytools.carma import build_system, stationary_covariance
        from CARMApytools.base.statespace import discretize, stationary_state_mean

        if not h > 0:
            raise ValueError('The step length h must be positive, got {}.'.format(h))
        if not variance_rate > 0:
            raise ValueError('The variance rate must be positive, got {}.'.format(variance_rate))
        sys = build_system(spec)
        Sigma, _ = stationary_covariance(sys, spec, (mean_rate, variance_rate))
        Phi, m, Q = discretize(sys.A, sys.e, h)

        self.spec = spec
        self.h = float(h)
        self.mean_rate = float(mean_rate)
        self.variance_rate = float(variance_rate)
        self.Phi = Phi
        self.m = m
        self.c = mean_rate * m
        self.RQR = variance_rate * Q
        self.b = spec.b
        self.x1 = stationary_state_mean(sys.A, sys.e, mean_rate)
        self.P1 = Sigma
        self.tol = tol
        self._M = []
        self._F = []
        self._K = []
        self._P = Sigma.copy()
        self._steady = None
        self._lti = None

    def _extend_gains(self, n):
        import numpy as np

        while self._steady is None and len(self._F) < n:
            P = self._P
            M = P @ self.b
            F = float(self.b @ M)
            t = len(self._F)
            if not np.isfinite(F) or F + JITTER <= 0:
                raise ConditioningError(
                    'Prediction variance {:.3e} is not positive at observation {}.'.format(F, t), index=t)
            K = self.Phi @ M / (F + JITTER)
            Pn = self.Phi @ P @ self.Phi.T - np.outer(K, K) * (F + JITTER) + self.RQR
            Pn = 0.5 * (Pn + Pn.T)
            self._M.append(M)
            self._F.append(F)
            self._K.append(K)
            self._P = Pn
            if np.max(np.abs(Pn - P)) <= self.tol * np.max(np.abs(P)):
                self._steady = t + 1
                logger.debug('Kalman gain steady after %d observations', t + 1)

    def _gain(self, t):
        if self._steady is not None and t >= self._steady:
            return self._M[-1], self._F[-1], self._K[-1]
        return self._M[t], self._F[t], self._K[t]

    def _transfer(self):
        import numpy as np
        from scipy.signal import ss2tf

        if self._lti is None:
            K = self._K[-1]
            b = self.b
            p = len(b)
            Mt = self.Phi - np.outer(K, b)
            xstar = np.linalg.solve(np.eye(p) - Mt, self.c)
            num, den = ss2tf(Mt, K.reshape([p, 1]), -b.reshape([1, p]), np.ones([1, 1]))
            self._lti = (Mt, xstar, num[0], den)
        return self._lti

    def filter(self, y, steady_state=True, return_states=False):
        """
        Run the filter on observations ``y``. See :py:func:`kalman_filter`.
        """
        import numpy as np
        from scipy.signal import ss2tf, lfilter

        y = np.array(y, dtype=float).reshape([-1])
        n = len(y)
        p = len(self.b)
        self._extend_gains(n)

        v = np.zeros(n)
        F = np.zeros(n)
        states = np.zeros([n, p]) if return_states else None
        x = self.x1.copy()

        nloop = n
        if steady_state and not return_states and self._steady is not None:
            nloop = min(n, self._steady)
        for t in range(nloop):
            M, Ft, K = self._gain(t)
            v[t] = y[t] - self.b @ x
            F[t] = Ft
            if return_states:
                states[t] = x + M * v[t] / (Ft + JITTER)
            x = self.c + self.Phi @ x + K * v[t]

        if nloop < n:
            Mt, xstar, num, den = self._transfer()
            rest = y[nloop:]
            s0 = x - xstar
            forced = lfilter(num, den, rest)
            num0, den0 = ss2tf(Mt, s0.reshape([p, 1]), -self.b.reshape([1, p]), np.zeros([1, 1]))
            impulse = np.zeros(len(rest) + 1)
            impulse[0] = 1.
            free = lfilter(num0[0], den0, impulse)[1:]
            v[nloop:] = forced + free - self.b @ xstar
            F[nloop:] = self._F[-1]

        Fj = F + JITTER
        loglik = -0.5 * float(np.sum(np.log(2 * np.pi * Fj) + v**2 / Fj))
        if not np.isfinite(loglik):
            raise ConditioningError('The quasi-likelihood is not finite.', index=int(np.argmin(np.isfinite(v))))

        return KalmanResult(y - v, F, v, states, loglik, self._steady)

    def loglik(self, y):
        return self.filter(y).loglik


def _check_series(y, p):
    import numpy as np

    y = np.array(y, dtype=float).reshape([-1])
    if not np.all(np.isfinite(y)):
        raise ValueError('Observations must be finite.')
    if len(y) < p + 2:
        raise ValueError('At least p + 2 = {} observations are needed, got {}.'.format(p + 2, len(y)))
    return y


def kalman_filter(spec, driver_moments, y, h, steady_state=True, return_states=False):
    """
    Kalman filter of a CARMA output series, initialized at the stationary mean
    and covariance. The observation noise is 0 and :py:data:`JITTER` is added
    to every prediction variance. Once the gain is steady the innovations are
    produced by the equivalent linear time-invariant filter.

    Args:
        spec (CarmaSpec)
        driver_moments (tuple[float]): (mean_rate, variance_rate)
        y (array[float]): Observations on a grid of step h.
        h (float)
        steady_state (bool): Switch to the steady-state filter when possible.
        return_states (bool): Also return filtered states (full recursion).

    Returns:
        KalmanResult

    :raise StationarityError: Non-stationary specification.
    :raise ConditioningError: Prediction variance not positive.
    """
    y = _check_series(y, spec.p)
    mean_rate, variance_rate = driver_moments
    model = StateSpaceModel(spec, mean_rate, variance_rate, h)

    return model.filter(y, steady_state=steady_state, return_states=return_states)


def kalman_loglik(spec, driver_moments, y, h):
    """
    Gaussian quasi-log-likelihood

    .. math::

        \\ell = -\\frac{1}{2}\\sum_{k}\\left[\\log(2\\pi F_{k}) + \\frac{v_{k}^{2}}{F_{k}}\\right]

    of the innovations :math:`v_{k}` and their variances :math:`F_{k}`.

    Returns:
        float
    """
    return kalman_filter(spec, driver_moments, y, h).loglik


# ----------------------------------------------------------------------------
# Optimization
# ----------------------------------------------------------------------------

def poly_from_unconstrained(u):
    """
    Monic polynomial with all roots in the open left half plane, from
    unconstrained parameters. Factors are :math:`z + e^{u}` (odd degree
    only) and :math:`z^{2} + e^{u_{1}}z + e^{u_{2}}`.

    Args:
        u (array[float]): Degree-many parameters.

    Returns:
        array[float]: Coefficients below the leading 1, descending powers.
    """
    import numpy as np

    c = np.exp(np.array(u, dtype=float))
    coeffs = np.array([1.])
    i = 0
    if len(c) % 2 == 1:
        coeffs = np.polymul(coeffs, [1., c[0]])
        i = 1
    while i < len(c):
        coeffs = np.polymul(coeffs, [1., c[i], c[i + 1]])
        i += 2

    return coeffs[1:]


def unconstrained_from_poly(coeffs):
    """
    Inverse of :py:func:`poly_from_unconstrained`.

    :raise ValueError: If a root has a non-negative real part.
    """
    import numpy as np

    coeffs = np.array(coeffs, dtype=float)
    if len(coeffs) == 0:
        return np.zeros(0)
    roots = np.roots(np.concatenate([[1.], coeffs]))
    if np.max(roots.real) >= 0:
        raise ValueError('Polynomial has a root with non-negative real part.')
    cplx = [r for r in roots if r.imag > 1e-12]
    real = sorted([r.real for r in roots if abs(r.imag) <= 1e-12])

    u = []
    if len(roots) % 2 == 1:
        u.append(np.log(-real.pop(0)))
    for r in cplx:
        u.extend([np.log(-2 * r.real), np.log(abs(r)**2)])
    while len(real) > 0:
        r1, r2 = real.pop(0), real.pop(0)
        u.extend([np.log(-(r1 + r2)), np.log(r1 * r2)])

    return np.array(u)


def _theta_from_vector(x, p, q, fix_mean):
    import numpy as np
    from CARMApytools.carma import CarmaSpec

    a = poly_from_unconstrained(x[:p])
    # b_q z^q + ... + b_0 with b_q = 1, descending
    bdesc = poly_from_unconstrained(x[p:p + q])
    b = np.concatenate([bdesc[::-1], [1.]])
    spec = CarmaSpec(a, b)
    variance_rate = np.exp(x[p + q])
    mean_rate = 0. if fix_mean else x[p + q + 1]

    return CarmaTheta(spec, mean_rate, variance_rate)


def _vector_from_theta(theta, fix_mean):
    import numpy as np

    spec = theta.spec
    u_a = unconstrained_from_poly(spec.a)
    u_b = unconstrained_from_poly(spec.b[:spec.q][::-1])
    x = np.concatenate([u_a, u_b, [np.log(theta.variance_rate)]])
    if not fix_mean:
        x = np.concatenate([x, [theta.mean_rate]])
    return x


def _start_vector(y, p, q, fix_mean, rng):
    import numpy as np
    from CARMApytools.carma import build_system, stationary_covariance

    u_a = rng.uniform(-3., 2., p)
    u_b = rng.uniform(-2., 2., q)
    x = np.concatenate([u_a, u_b, [0.]])
    if not fix_mean:
        x = np.concatenate([x, [0.]])
    vy = np.var(y)
    try:
        theta = _theta_from_vector(x, p, q, True)
        Sigma, _ = stationary_covariance(build_system(theta.spec), theta.spec, (0., 1.))
        unit = float(theta.spec.b @ Sigma @ theta.spec.b)
        x[p + q] = np.log(vy / unit)
        if not fix_mean:
            x[p + q + 1] = np.mean(y) * theta.spec.a[-1] / theta.spec.b[0]
    except (SpecificationError, NumericalError):
        x[p + q] = np.log(vy)

    return x


def fit_carma(y, h, config, start=None):
    """
    Maximize :py:func:`kalman_loglik` over the AR coefficients, the free
    MA coefficients :math:`b_{0},\\dots,b_{q-1}` and the variance rate (and
    the mean rate if ``config.fix_mean`` is off) by Nelder-Mead simplex
    searches from ``config.optimizer.n_starts`` random points.

    Both polynomials are parameterized through :py:func:`poly_from_unconstrained`,
    so every iterate is stationary and its MA polynomial minimum phase.

    Args:
        y (array[float]): Output series, at least 50 observations.
        h (float): Sampling step.
        config (FitConfig)
        start (CarmaTheta | None): Extra starting point, tried first.

    Returns:
        theta_hat (CarmaTheta): ``converged`` and ``warnings`` attributes set.
        loglik (float)

    :raise DataQualityError: Fewer than 50 observations.
    :raise OptimizationError: Constant series, or no start converged.
    """
    import numpy as np
    import warnings
    from scipy.optimize import minimize
    from CARMApytools.levy import make_rng

    y = np.array(y, dtype=float).reshape([-1])
    if len(y) < MIN_OBS:
        raise DataQualityError('At least {} observations are needed to fit, got {}.'.format(MIN_OBS, len(y)))
    if not np.all(np.isfinite(y)):
        raise ValueError('Observations must be finite.')
    if np.var(y) == 0:
        raise OptimizationError('The series is constant: the variance rate is not identified.', best=None)

    p, q, fix_mean = config.p, config.q, config.fix_mean
    opt = config.optimizer
    lo, hi = opt.bounds
    nbound = p + q + 1
    rng = make_rng(config.seed)

    def objective(x):
        if np.any(x[:nbound] < lo) or np.any(x[:nbound] > hi):
            return PENALTY
        try:
            theta = _theta_from_vector(x, p, q, fix_mean)
            ll = StateSpaceModel(theta.spec, theta.mean_rate, theta.variance_rate, h).loglik(y)
        except (SpecificationError, NumericalError, np.linalg.LinAlgError, ValueError):
            return PENALTY
        return -ll

    starts = [_start_vector(y, p, q, fix_mean, rng) for _ in range(opt.n_starts)]
    if start is not None:
        try:
            starts.insert(0, np.clip(_vector_from_theta(start, fix_mean), lo, hi))
        except ValueError:
            logger.debug('Warm start ignored: not representable')

    best, best_conv = None, None
    nfail = 0
    for i, x0 in enumerate(starts):
        res = minimize(objective, x0, method='Nelder-Mead',
                       options={'maxiter': opt.max_iters, 'maxfev': 2 * opt.max_iters,
                                'xatol': opt.gradient_tolerance, 'fatol': opt.gradient_tolerance,
                                'adaptive': len(x0) > 2})
        ok = bool(res.success) and res.fun < PENALTY
        logger.debug('Start %d: -loglik %.10g, success %s, %d iterations', i, res.fun, ok, res.nit)
        if not ok:
            nfail += 1
        if best is None or res.fun < best.fun:
            best = res
        if ok and (best_conv is None or res.fun < best_conv.fun):
            best_conv = res

    if best_conv is None:
        besttheta = None
        if best is not None and best.fun < PENALTY:
            besttheta = _theta_from_vector(best.x, p, q, fix_mean).to_dict()
            besttheta['loglik'] = -best.fun
        raise OptimizationError('None of the {} optimizer starts converged.'.format(len(starts)), best=besttheta)

    theta = _theta_from_vector(best_conv.x, p, q, fix_mean)
    loglik = -float(best_conv.fun)
    if nfail > 0:
        msg = '{} of {} optimizer starts did not converge.'.format(nfail, len(starts))
        theta.warnings.append(msg)
        warnings.warn(msg, stacklevel=2)
    if theta.variance_rate < 1e-12 * max(np.var(y), 1e-300) or theta.variance_rate < 1e-300:
        msg = 'Fitted variance rate {:.3e} is close to zero.'.format(theta.variance_rate)
        theta.warnings.append(msg)
        warnings.warn(msg, stacklevel=2)
    logger.info('CARMA(%d,%d) fit: loglik %.10g, a = %s', p, q, loglik, theta.spec.a.tolist())

    return theta, loglik


def recover_increments(theta, y, h):
    """
    Driver increments implied by the filtered states, by least squares on
    the state transition,

    .. math::

        \\Delta L_{k} = \\frac{h\\,m^{\\prime}(X_{k+1} - e^{Ah}X_{k})}{m^{\\prime}m}, \\quad
        m = \\int_{0}^{h}e^{Au}e\\,du

    Args:
        theta (CarmaTheta)
        y (array[float])
        h (float)

    Returns:
        array[float]: n-1 increments.
    """
    res = kalman_filter(theta.spec, theta.driver_moments, y, h, return_states=True)
    model = StateSpaceModel(theta.spec, theta.mean_rate, theta.variance_rate, h)
    X = res.filtered_states
    d = X[1:] - X[:-1] @ model.Phi.T

    return model.h * (d @ model.m) / (model.m @ model.m)


# ----------------------------------------------------------------------------
# Recovery parameters
# ----------------------------------------------------------------------------

def srr_profile_loglik(theta, premium, params, h, model=None):
    """
    Quasi-log-likelihood of observed premia under stochastic recovery with
    the CARMA parameters fixed: the Kalman likelihood of the implied intensity
    log-returns plus the log-Jacobian of :math:`\\log C\\mapsto\\log\\gamma`.
    Equals the CRR likelihood at :math:`\\beta_{0}=0`.

    Args:
        theta (CarmaTheta)
        premium (array[float]): Positive premia.
        params (RecoveryParams)
        h (float)
        model (StateSpaceModel | None): Prebuilt model of theta.

    Returns:
        float: ``-inf`` if the premia cannot be inverted.
    """
    import numpy as np
    from CARMApytools.credit import invert_spread, log_spread_elasticity

    try:
        gamma = invert_spread(params, premium)
    except NonInvertibleError:
        return -np.inf
    x = np.diff(np.log(gamma))
    if model is None:
        model = StateSpaceModel(theta.spec, theta.mean_rate, theta.variance_rate, h)
    ll = model.loglik(x)

    return ll - float(np.sum(np.log(log_spread_elasticity(params, gamma[1:]))))


def _premium(spreads):
    import numpy as np

    if hasattr(spreads, 'premium'):
        return spreads.premium
    return np.array(spreads, dtype=float)


def _run_mcmc(premium, theta, config):
    import numpy as np
    import warnings
    from CARMApytools.levy import make_rng
    from CARMApytools.credit import RecoveryParams

    mc = config.mcmc
    if mc.n_samples <= 0:
        raise ValueError('The chain needs at least one draw after burn-in, got n_samples = {}.'.format(mc.n_samples))
    model = StateSpaceModel(theta.spec, theta.mean_rate, theta.variance_rate, config.h)
    rng = make_rng([config.seed, 1])

    def in_prior(beta):
        b0, b1, b2 = beta
        return 0 < b0 < 1 and 0 < b2 < 1 and -mc.beta1_bound < b1 <= 0 and b0 + b2 < 1

    def logpost(beta):
        if not in_prior(beta):
            return -np.inf
        params = RecoveryParams.stochastic(*beta)
        try:
            return srr_profile_loglik(theta, premium, params, config.h, model=model)
        except NumericalError:
            return -np.inf

    current = np.array(mc.initial)
    if not in_prior(current):
        raise ValueError('The chain start {} is outside the prior support.'.format(mc.initial))
    lp = logpost(current)
    scales = np.array(mc.proposal_scales)

    total = mc.burn_in + mc.n_samples
    chain = np.zeros([mc.n_samples, 3])
    accepted = 0
    window = 0
    for it in range(total):
        proposal = current + scales * rng.standard_normal(3)
        lp_new = logpost(proposal)
        if np.log(rng.uniform()) < lp_new - lp:
            current, lp = proposal, lp_new
            window += 1
            if it >= mc.burn_in:
                accepted += 1
        if it < mc.burn_in and (it + 1) % mc.adapt_every == 0:
            rate = window / mc.adapt_every
            if rate < 0.2:
                scales = scales * 0.6
            elif rate > 0.4:
                scales = scales * 1.5
            logger.debug('MCMC adaptation at %d: acceptance %.2f, scales %s', it + 1, rate, scales.tolist())
            window = 0
        if it >= mc.burn_in:
            chain[it - mc.burn_in] = current

    acceptance = accepted / mc.n_samples
    if not 0.2 <= acceptance <= 0.4:
        warnings.warn('MCMC acceptance rate {:.3f} is outside [0.2, 0.4].'.format(acceptance), stacklevel=3)
    logger.info('MCMC: %d draws, acceptance %.3f', mc.n_samples, acceptance)

    return chain, acceptance


def fit_beta_mcmc(spreads, config, carma_fitter=None, theta=None):
    """
    Random-walk Metropolis sampler of :math:`(\\beta_{0},\\beta_{1},\\beta_{2})`
    with the CARMA parameters fixed. Priors are uniform:
    :math:`\\beta_{0},\\beta_{2}\\sim U(0,1)`, :math:`\\beta_{1}\\sim U(-B,0]`
    and :math:`\\beta_{0}+\\beta_{2}<1`. The target is
    :py:func:`srr_profile_loglik`. Proposal scales adapt during burn-in only.

    Args:
        spreads (SpreadPath | array[float]): Positive premia.
        config (FitConfig): ``model`` must be 'srr'.
        carma_fitter (callable | None): ``(y, h, config) -> (theta, loglik)``
            used when ``theta`` is None. Default :py:func:`fit_carma` on the
            premium log-returns.
        theta (CarmaTheta | None): Fixed CARMA parameters.

    Returns:
        beta_hat (RecoveryParams): Posterior mean.
        beta_ci (dict): Equal-tailed credible intervals, ``{'beta0': (lo, hi), ...}``.
        chain (array[float]): n_samples\\*3

    :raise UnsupportedModeError: For constant-recovery configurations.
    """
    import numpy as np
    import warnings

    if config.model != 'srr':
        raise UnsupportedModeError('Recovery parameters are sampled for the stochastic recovery model only.')
    premium = _premium(spreads)
    if config.mcmc.n_samples <= 0:
        raise ValueError('The chain needs at least one draw after burn-in, got n_samples = {}.'.format(
            config.mcmc.n_samples))
    if theta is None:
        if carma_fitter is None:
            carma_fitter = fit_carma
        theta, _ = carma_fitter(np.diff(np.log(premium)), config.h, config)

    chain, _ = _run_mcmc(premium, theta, config)
    beta_hat, beta_ci, chain = _summarize_chain(chain, config.mcmc.credible_level)
    for msg in credible_interval_violations(beta_hat, beta_ci):
        warnings.warn(msg, stacklevel=2)

    return beta_hat, beta_ci, chain


def credible_interval_violations(beta_hat, beta_ci):
    """
    Messages for components of ``beta_hat`` outside their credible
    interval. A posterior mean can leave an equal-tailed interval on a
    strongly skewed chain.

    Returns:
        list[str]: Empty when every interval contains its estimate.
    """
    if beta_hat is None or beta_ci is None or beta_hat.mode != 'stochastic':
        return []
    msgs = []
    for name in ['beta0', 'beta1', 'beta2']:
        lo, hi = beta_ci[name]
        val = getattr(beta_hat, name)
        if not lo <= val <= hi:
            msgs.append('Posterior mean {} = {:.6g} is outside its credible interval [{:.6g}, {:.6g}].'.format(
                name, val, lo, hi))
    return msgs


def _summarize_chain(chain, level):
    import numpy as np
    from CARMApytools.credit import RecoveryParams

    mean = np.mean(chain, axis=0)
    alpha = 1. - level
    bounds = np.quantile(chain, [alpha / 2, 1 - alpha / 2], axis=0)
    beta_ci = {name: (float(bounds[0, i]), float(bounds[1, i]))
               for i, name in enumerate(['beta0', 'beta1', 'beta2'])}

    return RecoveryParams.stochastic(*mean), beta_ci, chain


# ----------------------------------------------------------------------------
# Model comparison
# ----------------------------------------------------------------------------

def bic(loglik, k, n):
    """
    :math:`-2\\ell + k\\log n`.

    :raise ValueError: k < 1 or n < 2.
    """
    import numpy as np

    if int(k) != k or k < 1:
        raise ValueError('The number of parameters must be a positive integer, got {}.'.format(k))
    if int(n) != n or n < 2:
        raise ValueError('The number of observations must be at least 2, got {}.'.format(n))

    return -2. * loglik + k * np.log(n)


class FitReport:
    """
    Result of a CRR or SRR fit.

    Args:
        model (str): 'crr' or 'srr'.
        theta_hat (CarmaTheta | None)
        beta_hat (RecoveryParams | None)
        beta_ci (dict | None)
        loglik (float): ``nan`` for a failed fit.
        k (int): Free parameters.
        n_obs (int): Observations in the likelihood.
        converged (bool)
        warnings (list[str])
        diagnostics (dict)
        entity (str | None)

    Returns:
        self.bic (float): :py:func:`bic`, ``nan`` for a failed fit.
    """

    def __init__(self, model, theta_hat, beta_hat, beta_ci, loglik, k, n_obs,
                 converged=True, warnings=None, diagnostics=None, entity=None):
        import numpy as np
        import warnings as _warnings

        self.model = model
        self.theta_hat = theta_hat
        self.beta_hat = beta_hat
        self.beta_ci = beta_ci
        self.loglik = float(loglik)
        self.k = int(k)
        self.n_obs = int(n_obs)
        self.converged = bool(converged)
        self.warnings = list(warnings) if warnings is not None else []
        self.diagnostics = dict(diagnostics) if diagnostics is not None else {}
        self.entity = entity
        for msg in credible_interval_violations(beta_hat, beta_ci):
            self.warnings.append(msg)
            _warnings.warn(msg, stacklevel=2)
        if np.isfinite(self.loglik):
            self.bic = float(bic(self.loglik, self.k, self.n_obs))
        else:
            self.bic = float('nan')

    @classmethod
    def failed(cls, model, k, n_obs, message, entity=None):
        return cls(model, None, None, None, float('nan'), k, n_obs, converged=False,
                   warnings=[message], entity=entity)

    def to_dict(self):
        import numpy as np

        def num(x):
            return float(x) if np.isfinite(x) else None

        return {
            'model'       : self.model,
            'entity'      : self.entity,
            'theta_hat'   : None if self.theta_hat is None else self.theta_hat.to_dict(),
            'beta_hat'    : None if self.beta_hat is None else self.beta_hat.to_dict(),
            'beta_ci'     : None if self.beta_ci is None else {k: list(v) for k, v in self.beta_ci.items()},
            'loglik'      : num(self.loglik),
            'bic'         : num(self.bic),
            'k'           : self.k,
            'n_obs'       : self.n_obs,
            'converged'   : self.converged,
            'warnings'    : self.warnings,
            'diagnostics' : self.diagnostics,
        }

    def to_json(self):
        import json

        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    @staticmethod
    def csv_header():
        return 'entity,model,loglik,bic,k,n_obs,converged'

    def csv_row(self, entity=None):
        if entity is None:
            entity = self.entity if self.entity is not None else ''
        return '{},{},{:.17g},{:.17g},{:d},{:d},{}'.format(
            entity, self.model, self.loglik, self.bic, self.k, self.n_obs, str(self.converged).lower())


def _fit_crr(premium, config, entity=None):
    import numpy as np
    from CARMApytools.credit import RecoveryParams

    x = np.diff(np.log(premium))
    k = config.n_carma_params() + 1
    try:
        theta, ll = fit_carma(x, config.h, config)
    except (NumericalError, ValueError) as err:
        logger.warning('CRR fit failed: %s', err)
        return FitReport.failed('crr', k, len(x), str(err), entity), None

    report = FitReport('crr', theta, RecoveryParams.constant(config.recovery_constant), None, ll, k, len(x),
                       converged=theta.converged, warnings=theta.warnings, entity=entity)
    return report, theta


def _fit_srr(premium, config, theta0=None, entity=None):
    import numpy as np
    from CARMApytools.credit import invert_spread

    x = np.diff(np.log(premium))
    k = config.n_carma_params() + 3
    config = config.replace(model='srr')
    try:
        if theta0 is None:
            theta0, _ = fit_carma(x, config.h, config)
        chain, acceptance = _run_mcmc(premium, theta0, config)
        beta_hat, beta_ci, _ = _summarize_chain(chain, config.mcmc.credible_level)
        gamma = invert_spread(beta_hat, premium)
        theta, _ = fit_carma(np.diff(np.log(gamma)), config.h, config, start=theta0)
        ll = srr_profile_loglik(theta, premium, beta_hat, config.h)
    except (NumericalError, ValueError) as err:
        logger.warning('SRR fit failed: %s', err)
        return FitReport.failed('srr', k, len(x), str(err), entity)

    return FitReport('srr', theta, beta_hat, beta_ci, ll, k, len(x), converged=theta.converged,
                     warnings=theta.warnings, diagnostics={'acceptance_rate': acceptance}, entity=entity)


def fit_model(spreads, config, entity=None):
    """
    Fit the model named by ``config.model`` to a premium series.

    Args:
        spreads (SpreadPath | array[float])
        config (FitConfig)
        entity (str | None)

    Returns:
        FitReport: ``converged=False`` if the fit failed.
    """
    premium = _premium(spreads)
    if config.model == 'crr':
        return _fit_crr(premium, config, entity)[0]

    return _fit_srr(premium, config, entity=entity)


def preferred_model(report_srr, report_crr):
    """
    'srr' or 'crr' by smaller BIC. A failed fit loses, and ``None`` is
    returned when both failed.
    """
    import numpy as np

    ok_srr = report_srr.converged and np.isfinite(report_srr.bic)
    ok_crr = report_crr.converged and np.isfinite(report_crr.bic)
    if ok_srr and ok_crr:
        return 'srr' if report_srr.bic < report_crr.bic else 'crr'
    if ok_srr:
        return 'srr'
    if ok_crr:
        return 'crr'
    return None


def compare_models(spreads, config, entity=None):
    """
    Fit both recovery models and compare them by BIC. CRR fits the premium
    log-returns, with the recovery rate reported at
    ``config.recovery_constant``. SRR samples the recovery parameters with the
    CRR CARMA estimate fixed, then refits the CARMA parameters on the
    intensity log-returns implied by the posterior mean.

    Args:
        spreads (SpreadPath | array[float])
        config (FitConfig)
        entity (str | None)

    Returns:
        report_srr (FitReport)
        report_crr (FitReport)
        preferred (str | None)
    """
    premium = _premium(spreads)
    report_crr, theta_crr = _fit_crr(premium, config, entity)
    report_srr = _fit_srr(premium, config, theta0=theta_crr, entity=entity)
    preferred = preferred_model(report_srr, report_crr)
    logger.info('Compare %s: BIC srr %.10g, crr %.10g, preferred %s',
                entity, report_srr.bic, report_crr.bic, preferred)

    return report_srr, report_crr, preferred
