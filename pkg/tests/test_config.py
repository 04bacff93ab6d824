import json

import numpy as np
import pytest

from CARMApytools.base.errors import UsageError
from CARMApytools.config import FitConfig, McmcConfig, OptimizerConfig, RunConfig
from CARMApytools.levy import CompoundPoissonNormal, NIG
from CARMApytools.units import bp_to_decimal, to_decimal


class TestRunConfig:
    def test_defaults(self):
        config = RunConfig()
        assert config.seed == 0
        assert config.carma_spec().a.tolist() == [6.]
        assert config.recovery('srr').beta2 == 0.637
        assert config.recovery('crr').R == 0.4

    def test_file_then_flags(self, tmp_path):
        fname = tmp_path / 'run.yaml'
        fname.write_text('seed: 5\ncarma:\n  a: [1.39631, 0.05029]\n  b: [2, 1]\ngrid:\n  h: 0.5\n')
        config = RunConfig.from_file(str(fname))
        assert config.seed == 5 and config.carma_spec().q == 1
        config.merge({'seed': 9, 'grid': {'h': None, 'n_steps': 10}})
        assert config.seed == 9
        assert config['grid'] == {'h': 0.5, 'n_steps': 10}

    def test_json_file(self, tmp_path):
        fname = tmp_path / 'run.json'
        fname.write_text(json.dumps({'driver': {'kind': 'nig', 'alpha': 3.}}))
        assert RunConfig.from_file(str(fname)).driver() == NIG(alpha=3.)

    def test_unknown_section(self):
        with pytest.raises(UsageError):
            RunConfig({'plot': {}})

    def test_driver_keys_filtered(self):
        config = RunConfig({'driver': {'kind': 'cpn', 'rate': 2.}})
        assert config.driver() == CompoundPoissonNormal(2., 0., 1.)

    def test_json_is_stable(self):
        assert RunConfig().to_json() == RunConfig().to_json()
        assert json.loads(RunConfig().to_json())['seed'] == 0

    def test_fit_config_seed(self):
        fit = RunConfig({'seed': 4, 'fit': {'p': 1, 'q': 0}}).fit_config()
        assert fit.seed == 4 and fit.p == 1

    def test_bad_recovery_mode(self):
        with pytest.raises(UsageError):
            RunConfig().recovery('fixed')


class TestFitConfig:
    @pytest.mark.parametrize('kwargs', [{'p': 0}, {'p': 2, 'q': 2}, {'model': 'x'}, {'h': 0.},
                                        {'recovery_constant': 1.}, {'driver_kind': 'stable'}])
    def test_invalid(self, kwargs):
        with pytest.raises(UsageError):
            FitConfig(**kwargs)

    def test_parameter_count(self):
        assert FitConfig(p=2, q=1).n_carma_params() == 4
        assert FitConfig(p=2, q=1, fix_mean=False).n_carma_params() == 5

    def test_replace(self):
        config = FitConfig(optimizer=OptimizerConfig(n_starts=2))
        other = config.replace(model='crr')
        assert other.model == 'crr' and other.optimizer.n_starts == 2 and config.model == 'srr'

    def test_nested_dicts(self):
        config = FitConfig.from_dict({'mcmc': {'n_samples': 10}, 'optimizer': {'max_iters': 5}})
        assert isinstance(config.mcmc, McmcConfig) and config.mcmc.n_samples == 10
        assert config.optimizer.max_iters == 5

    def test_bad_mcmc(self):
        with pytest.raises(UsageError):
            McmcConfig(credible_level=1.)


class TestUnits:
    def test_conversions(self):
        assert bp_to_decimal(100.) == pytest.approx(0.01)
        assert np.allclose(to_decimal([1., 2.], 'percent'), [0.01, 0.02])
        with pytest.raises(ValueError):
            to_decimal(1., 'ticks')
