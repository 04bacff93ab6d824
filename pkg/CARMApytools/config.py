#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Configuration objects of fitting and command-line runs. ``RunConfig`` reads
YAML or JSON files, and CLI flags override file values, which override the
defaults below.
"""
import copy

from CARMApytools.base.errors import UsageError


class OptimizerConfig:
    """
    Simplex (Nelder-Mead) search of the quasi-likelihood.

    Args:
        max_iters (int): Maximum iterations per start.
        gradient_tolerance (float): Absolute tolerance on the objective and
            the parameters at convergence.
        n_starts (int): Number of random starting points.
        bounds (tuple[float]): Box on the transformed parameters.
    """

    def __init__(self, max_iters=2000, gradient_tolerance=1e-6, n_starts=10, bounds=(-12., 12.)):
        if int(max_iters) < 1 or int(n_starts) < 1:
            raise UsageError('optimizer.max_iters and optimizer.n_starts must be positive.')
        if not gradient_tolerance > 0:
            raise UsageError('optimizer.gradient_tolerance must be positive.')
        if len(bounds) != 2 or not bounds[0] < bounds[1]:
            raise UsageError('optimizer.bounds must be an increasing pair.')
        self.max_iters = int(max_iters)
        self.gradient_tolerance = float(gradient_tolerance)
        self.n_starts = int(n_starts)
        self.bounds = (float(bounds[0]), float(bounds[1]))

    def to_dict(self):
        return {'max_iters': self.max_iters, 'gradient_tolerance': self.gradient_tolerance,
                'n_starts': self.n_starts, 'bounds': list(self.bounds)}


class McmcConfig:
    """
    Random-walk Metropolis sampler of the recovery parameters.

    Args:
        n_samples (int): Retained draws after burn-in, > 0.
        burn_in (int): Adaptation draws, discarded.
        proposal_scales (tuple[float]): Initial proposal standard deviations
            of :math:`(\\beta_{0},\\beta_{1},\\beta_{2})`.
        credible_level (float): Equal-tailed interval level.
        beta1_bound (float): Prior :math:`\\beta_{1}\\sim U(-B, 0]`.
        adapt_every (int): Burn-in window length between scale updates.
        initial (tuple[float]): Chain start, must satisfy the prior.
    """

    def __init__(self, n_samples=4000, burn_in=2000, proposal_scales=(0.02, 0.5, 0.02),
                 credible_level=0.95, beta1_bound=10., adapt_every=50, initial=(0.05, -0.5, 0.5)):
        if int(burn_in) < 0 or int(adapt_every) < 1:
            raise UsageError('mcmc.burn_in must be >= 0 and mcmc.adapt_every >= 1.')
        if not 0 < credible_level < 1:
            raise UsageError('mcmc.credible_level must be in (0, 1).')
        if len(proposal_scales) != 3 or min(proposal_scales) <= 0:
            raise UsageError('mcmc.proposal_scales must be three positive numbers.')
        if len(initial) != 3:
            raise UsageError('mcmc.initial must be (beta0, beta1, beta2).')
        self.n_samples = int(n_samples)
        self.burn_in = int(burn_in)
        self.proposal_scales = tuple(float(i) for i in proposal_scales)
        self.credible_level = float(credible_level)
        self.beta1_bound = float(beta1_bound)
        self.adapt_every = int(adapt_every)
        self.initial = tuple(float(i) for i in initial)

    def to_dict(self):
        return {'n_samples': self.n_samples, 'burn_in': self.burn_in,
                'proposal_scales': list(self.proposal_scales), 'credible_level': self.credible_level,
                'beta1_bound': self.beta1_bound, 'adapt_every': self.adapt_every,
                'initial': list(self.initial)}


class FitConfig:
    """
    Model orders and estimation settings.

    Args:
        p (int): Autoregressive order, >= 1.
        q (int): Moving-average order, 0 <= q < p.
        driver_kind (str): 'brownian', 'cpn' or 'nig'. Only the first two
            moments enter the quasi-likelihood.
        h (float): Sampling step.
        model (str): 'crr' or 'srr'.
        recovery_constant (float): Recovery rate reported by CRR fits.
        fix_mean (bool): Fix the driver mean rate to 0.
        seed (int): Seed of starting points and MCMC.
        optimizer (OptimizerConfig | dict | None)
        mcmc (McmcConfig | dict | None)
    """

    def __init__(self, p=2, q=1, driver_kind='brownian', h=1., model='srr', recovery_constant=0.4,
                 fix_mean=True, seed=0, optimizer=None, mcmc=None):
        if int(p) < 1 or not 0 <= int(q) < int(p):
            raise UsageError('Orders must satisfy p >= 1 and 0 <= q < p, got p={}, q={}.'.format(p, q))
        if driver_kind not in ['brownian', 'cpn', 'nig']:
            raise UsageError("fit.driver_kind must be 'brownian', 'cpn' or 'nig', got '{}'.".format(driver_kind))
        if model not in ['crr', 'srr']:
            raise UsageError("fit.model must be 'crr' or 'srr', got '{}'.".format(model))
        if not h > 0:
            raise UsageError('fit.h must be positive.')
        if not 0 < recovery_constant < 1:
            raise UsageError('fit.recovery_constant must be in (0, 1).')
        self.p = int(p)
        self.q = int(q)
        self.driver_kind = driver_kind
        self.h = float(h)
        self.model = model
        self.recovery_constant = float(recovery_constant)
        self.fix_mean = bool(fix_mean)
        self.seed = int(seed)
        if optimizer is None:
            optimizer = OptimizerConfig()
        elif isinstance(optimizer, dict):
            optimizer = OptimizerConfig(**optimizer)
        if mcmc is None:
            mcmc = McmcConfig()
        elif isinstance(mcmc, dict):
            mcmc = McmcConfig(**mcmc)
        self.optimizer = optimizer
        self.mcmc = mcmc

    def n_carma_params(self):
        """
        Free CARMA parameters: p AR, q MA, the variance rate and the mean
        rate when it is not fixed.
        """
        return self.p + self.q + 1 + (0 if self.fix_mean else 1)

    def replace(self, **kwargs):
        """
        Copy with some attributes changed.
        """
        d = self.to_dict()
        d.update(kwargs)
        return FitConfig(**d)

    def to_dict(self):
        return {'p': self.p, 'q': self.q, 'driver_kind': self.driver_kind, 'h': self.h,
                'model': self.model, 'recovery_constant': self.recovery_constant,
                'fix_mean': self.fix_mean, 'seed': self.seed,
                'optimizer': self.optimizer.to_dict(), 'mcmc': self.mcmc.to_dict()}

    @classmethod
    def from_dict(cls, data):
        try:
            return cls(**data)
        except TypeError as err:
            raise UsageError('Invalid fit configuration: {}'.format(err))


#: Defaults of every command. Values are JSON types.
DEFAULTS = {
    'carma'    : {'a': [6.], 'b': [1.]},
    'driver'   : {'kind': 'brownian', 'drift': 0., 'volatility': 1.},
    'recovery' : {'R': 0.4, 'beta0': 0.0378, 'beta1': -0.0095, 'beta2': 0.637},
    'grid'     : {'h': 1., 'n_steps': 3000},
    'spread'   : {'c0': 0.01, 'tenor': 5., 'anchor': 'spread', 'modes': ['crr', 'srr'], 'units': 'decimal'},
    'price'    : {'mode': 'bond', 'short_rate': 0.03, 'taus': [0., 0.25, 0.5, 1., 2., 5., 10., 30.],
                  'valuation_time': 0., 'ensemble': 200, 'gamma': None, 'recovery_mode': 'crr'},
    'fit'      : FitConfig().to_dict(),
    'compare'  : {'workers': 1},
    'output'   : {'dir': '.', 'prefix': 'carma'},
    'seed'     : 0,
}


def _deep_update(base, new):
    for key, value in new.items():
        if value is None:
            continue
        if isinstance(value, dict) and isinstance(base.get(key), dict):
            _deep_update(base[key], value)
        else:
            base[key] = copy.deepcopy(value)
    return base


class RunConfig:
    """
    Resolved configuration of a command. Sections: ``carma``, ``driver``,
    ``recovery``, ``grid``, ``spread``, ``price``, ``fit``, ``compare``,
    ``output`` and ``seed``.

    Args:
        data (dict | None): Partial configuration merged onto the defaults.
    """

    def __init__(self, data=None):
        self.data = copy.deepcopy(DEFAULTS)
        if data is not None:
            unknown = [k for k in data.keys() if k not in DEFAULTS]
            if len(unknown) > 0:
                raise UsageError('Unknown configuration sections: {}.'.format(unknown))
            _deep_update(self.data, data)

    @classmethod
    def from_file(cls, filename):
        """
        Read a YAML or JSON configuration file.
        """
        import yaml

        with open(filename, 'r') as f:
            try:
                data = yaml.safe_load(f)
            except yaml.YAMLError as err:
                raise UsageError('Cannot parse configuration file {}: {}'.format(filename, err))
        if data is None:
            data = {}
        if not isinstance(data, dict):
            raise UsageError('Configuration file {} must contain a mapping.'.format(filename))

        return cls(data)

    def merge(self, overrides):
        """
        Apply overrides (CLI flags). ``None`` values are ignored.

        Returns:
            self (RunConfig)
        """
        _deep_update(self.data, overrides)
        return self

    def __getitem__(self, key):
        return self.data[key]

    @property
    def seed(self):
        return int(self.data['seed'])

    def to_dict(self):
        return copy.deepcopy(self.data)

    def to_json(self):
        """
        Compact JSON with sorted keys, embedded in output headers.
        """
        import json

        return json.dumps(self.data, sort_keys=True, separators=(',', ':'))

    def carma_spec(self):
        from CARMApytools.carma import CarmaSpec

        return CarmaSpec(self.data['carma']['a'], self.data['carma'].get('b', None))

    def driver(self):
        from CARMApytools.levy import LevyDriver

        d = dict(self.data['driver'])
        kind = d.get('kind', 'brownian')
        keys = {'brownian': ['drift', 'volatility'], 'cpn': ['rate', 'jump_mean', 'jump_sd'],
                'nig': ['alpha', 'beta', 'delta', 'mu']}.get(kind, [])
        d = {k: v for k, v in d.items() if k in keys}
        d['kind'] = kind
        return LevyDriver.from_dict(d)

    def recovery(self, mode):
        """
        Recovery parameters of mode 'crr' (constant) or 'srr' (stochastic).
        """
        from CARMApytools.credit import RecoveryParams

        rec = self.data['recovery']
        if mode == 'crr':
            return RecoveryParams.constant(rec['R'])
        elif mode == 'srr':
            return RecoveryParams.stochastic(rec['beta0'], rec['beta1'], rec['beta2'])
        raise UsageError("Recovery mode must be 'crr' or 'srr', got '{}'.".format(mode))

    def fit_config(self):
        d = dict(self.data['fit'])
        d['seed'] = self.seed
        return FitConfig.from_dict(d)
