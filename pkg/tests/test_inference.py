import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import norm

from CARMApytools.base.errors import DataQualityError, OptimizationError, UnsupportedModeError
from CARMApytools.carma import CarmaSpec, simulate
from CARMApytools.config import FitConfig
from CARMApytools.credit import RecoveryParams, generate_spread_path
from CARMApytools.inference import (CarmaTheta, FitReport, StateSpaceModel, bic, credible_interval_violations,
                                    fit_beta_mcmc, fit_carma, kalman_filter, kalman_loglik, poly_from_unconstrained,
                                    preferred_model, recover_increments, srr_profile_loglik,
                                    unconstrained_from_poly)
from CARMApytools.levy import Brownian

from conftest import BETA


class TestKalman:
    def test_car1_exact_likelihood(self):
        spec = CarmaSpec([1.])
        y = simulate(spec, Brownian(0., np.sqrt(2.)), 0.5, 300, rng=2).outputs
        phi = np.exp(-0.5)
        expected = norm.logpdf(y[0], 0., 1.) \
            + np.sum(norm.logpdf(y[1:], phi * y[:-1], np.sqrt(1 - phi**2)))
        assert kalman_loglik(spec, (0., 2.), y, 0.5) == pytest.approx(expected, abs=1e-6)

    def test_steady_state_matches_recursion(self, carma21, bm):
        y = simulate(carma21, bm, 1., 500, rng=4).outputs
        fast = kalman_filter(carma21, (0., 1.), y, 1.)
        full = kalman_filter(carma21, (0., 1.), y, 1., steady_state=False)
        assert fast.steady_index is not None
        assert fast.loglik == pytest.approx(full.loglik, rel=1e-7)
        assert np.allclose(fast.innovations, full.innovations, atol=1e-7)

    def test_result_fields(self, carma21, bm):
        y = simulate(carma21, bm, 1., 100, rng=4).outputs
        res = kalman_filter(carma21, (0., 1.), y, 1., return_states=True)
        assert np.allclose(res.predictions + res.innovations, y)
        assert res.filtered_states.shape == (100 + 1, 2)
        assert np.all(res.variances > 0)

    def test_model_reuse(self, carma21, bm):
        model = StateSpaceModel(carma21, 0., 1., 1.)
        y1 = simulate(carma21, bm, 1., 200, rng=1).outputs
        y2 = simulate(carma21, bm, 1., 200, rng=2).outputs
        assert model.loglik(y1) == pytest.approx(kalman_loglik(carma21, (0., 1.), y1, 1.))
        assert model.loglik(y2) == pytest.approx(kalman_loglik(carma21, (0., 1.), y2, 1.))

    def test_too_short(self, carma21):
        with pytest.raises(ValueError):
            kalman_filter(carma21, (0., 1.), [0.1, 0.2], 1.)


class TestParameterization:
    @given(st.lists(st.floats(-3., 3.), min_size=1, max_size=4))
    def test_roots_in_left_half_plane(self, u):
        coeffs = poly_from_unconstrained(u)
        assert len(coeffs) == len(u)
        assert np.max(np.roots(np.concatenate([[1.], coeffs])).real) < 0

    @given(st.lists(st.floats(-3., 3.), min_size=1, max_size=4))
    @settings(max_examples=50)
    def test_inverse(self, u):
        coeffs = poly_from_unconstrained(u)
        back = poly_from_unconstrained(unconstrained_from_poly(coeffs))
        assert np.allclose(back, coeffs, rtol=1e-6, atol=1e-9)

    def test_unstable_polynomial(self):
        with pytest.raises(ValueError):
            unconstrained_from_poly([-1.])


class TestFitCarma:
    def test_car1_recovery(self):
        y = simulate(CarmaSpec([1.]), Brownian(), 0.1, 3000, rng=8).outputs
        config = FitConfig(p=1, q=0, h=0.1, model='crr', optimizer={'n_starts': 3})
        theta, loglik = fit_carma(y, 0.1, config)
        assert theta.spec.a[0] == pytest.approx(1., abs=0.35)
        assert theta.variance_rate == pytest.approx(1., rel=0.15)
        assert loglik == pytest.approx(kalman_loglik(theta.spec, theta.driver_moments, y, 0.1))
        assert loglik >= kalman_loglik(CarmaSpec([1.]), (0., 1.), y, 0.1) - 1e-6

    def test_score_vanishes_at_optimum(self):
        y = simulate(CarmaSpec([1.]), Brownian(), 0.1, 1000, rng=21).outputs
        config = FitConfig(p=1, q=0, h=0.1, model='crr', optimizer={'n_starts': 2})
        theta, _ = fit_carma(y, 0.1, config)
        a1, d = theta.spec.a[0], 1e-5
        up = kalman_loglik(CarmaSpec([a1 + d]), theta.driver_moments, y, 0.1)
        down = kalman_loglik(CarmaSpec([a1 - d]), theta.driver_moments, y, 0.1)
        assert abs((up - down) / (2 * d)) < 1e-3

    def test_short_series(self):
        with pytest.raises(DataQualityError):
            fit_carma(np.ones(20), 1., FitConfig(p=1, q=0))

    def test_constant_series(self):
        with pytest.raises(OptimizationError):
            fit_carma(np.ones(100), 1., FitConfig(p=1, q=0))

    def test_recover_increments(self):
        spec = CarmaSpec([1.])
        y = simulate(spec, Brownian(0.5, 1.), 0.1, 5000, rng=9).outputs
        dl = recover_increments(CarmaTheta(spec, 0.5, 1.), y, 0.1)
        assert len(dl) == len(y) - 1
        assert np.mean(dl) == pytest.approx(0.05, abs=0.015)
        assert np.var(dl) == pytest.approx(0.1, rel=0.1)


class TestRecoveryLikelihood:
    def test_nests_constant_recovery(self, crr_params):
        theta = CarmaTheta(CarmaSpec([1.]), 0., 1.)
        spread, _, _ = generate_spread_path(theta.spec, Brownian(), crr_params, 0.01, 0.1, 400, rng=6)
        nested = RecoveryParams.stochastic(0., 0., 0.4)
        crr = kalman_loglik(theta.spec, theta.driver_moments, spread.log_returns(), 0.1)
        assert srr_profile_loglik(theta, spread.premium, nested, 0.1) == pytest.approx(crr, rel=1e-10)

    def test_profile_peaks_at_true_recovery(self):
        true = (0.3, -5., 0.3)
        params = RecoveryParams.stochastic(*true)
        config = FitConfig(p=1, q=0, h=0.1, model='crr', optimizer={'n_starts': 1})
        deltas = [(0.05, 0., 0.), (-0.05, 0., 0.), (0., -1.5, 0.), (0., 1.5, 0.), (0., 0., 0.05), (0., 0., -0.05)]
        diffs = []
        for seed in range(8):
            spread, ity, _ = generate_spread_path(CarmaSpec([1.]), Brownian(0., 0.5), params, 0.01, 0.1, 400,
                                                  rng=seed, anchor='intensity')
            premium = spread.premium
            theta, _ = fit_carma(np.diff(np.log(ity.gamma)), 0.1, config)
            ll_true = srr_profile_loglik(theta, premium, params, 0.1)
            for delta in deltas:
                moved = RecoveryParams.stochastic(*(np.array(true) + delta))
                diffs.append(ll_true - srr_profile_loglik(theta, premium, moved, 0.1))
        assert np.median(diffs) >= 0.

    def test_non_invertible(self):
        theta = CarmaTheta(CarmaSpec([1.]), 0., 1.)
        with pytest.warns(UserWarning):
            params = RecoveryParams.stochastic(0.5, -0.1, 0.6)
        assert srr_profile_loglik(theta, np.full(60, 0.01), params, 0.1) == -np.inf


def _srr_premium(n=300, seed=12):
    params = RecoveryParams.stochastic(*BETA)
    spread, _, _ = generate_spread_path(CarmaSpec([1.]), Brownian(), params, 0.01, 0.1, n, rng=seed)
    return spread.premium


class TestMcmc:
    def _config(self, model='srr'):
        return FitConfig(p=1, q=0, h=0.1, model=model, seed=3,
                         mcmc={'n_samples': 200, 'burn_in': 100, 'adapt_every': 25})

    def test_chain(self):
        theta = CarmaTheta(CarmaSpec([1.]), 0., 1.)
        beta_hat, beta_ci, chain = fit_beta_mcmc(_srr_premium(), self._config(), theta=theta)
        assert chain.shape == (200, 3)
        assert np.all((chain[:, 0] > 0) & (chain[:, 2] > 0) & (chain[:, 0] + chain[:, 2] < 1))
        assert np.all(chain[:, 1] <= 0)
        assert beta_hat.mode == 'stochastic'
        for name in ['beta0', 'beta1', 'beta2']:
            assert beta_ci[name][0] <= beta_ci[name][1]

    def test_reproducible(self):
        theta = CarmaTheta(CarmaSpec([1.]), 0., 1.)
        premium = _srr_premium()
        _, _, a = fit_beta_mcmc(premium, self._config(), theta=theta)
        _, _, b = fit_beta_mcmc(premium, self._config(), theta=theta)
        assert np.array_equal(a, b)

    def test_carma_fitter_hook(self):
        calls = []

        def fitter(y, h, config):
            calls.append(len(y))
            return CarmaTheta(CarmaSpec([1.]), 0., 1.), 0.

        fit_beta_mcmc(_srr_premium(), self._config(), carma_fitter=fitter)
        assert calls == [300]

    def test_thinned_chain_moments(self):
        theta = CarmaTheta(CarmaSpec([1.]), 0., 1.)
        config = FitConfig(p=1, q=0, h=0.1, model='srr', seed=5,
                           mcmc={'n_samples': 1200, 'burn_in': 300, 'adapt_every': 25})
        _, _, chain = fit_beta_mcmc(_srr_premium(), config, theta=theta)
        thin = chain[::4]
        sd = chain.std(axis=0)
        assert np.all(np.abs(thin.mean(axis=0) - chain.mean(axis=0)) < 0.75 * sd)
        assert np.all((thin.std(axis=0) > 0.6 * sd) & (thin.std(axis=0) < 1.5 * sd))

    def test_constant_mode(self):
        with pytest.raises(UnsupportedModeError):
            fit_beta_mcmc(_srr_premium(), self._config('crr'))

    def test_empty_chain(self):
        config = FitConfig(p=1, q=0, h=0.1, mcmc={'n_samples': 0})
        with pytest.raises(ValueError):
            fit_beta_mcmc(_srr_premium(), config, theta=CarmaTheta(CarmaSpec([1.])))


class TestComparison:
    def test_bic(self):
        assert bic(-100., 3, 1000) == pytest.approx(200. + 3 * np.log(1000))
        with pytest.raises(ValueError):
            bic(-100., 0, 1000)
        with pytest.raises(ValueError):
            bic(-100., 3, 1)

    def test_report(self):
        theta = CarmaTheta(CarmaSpec([1.]), 0., 1.)
        report = FitReport('crr', theta, RecoveryParams.constant(0.4), None, -50., 3, 100, entity='X')
        assert report.bic == pytest.approx(100. + 3 * np.log(100))
        assert report.csv_row().startswith('X,crr,-50,')
        assert report.to_dict()['theta_hat']['a'] == [1.]

    def test_failed_report(self):
        report = FitReport.failed('srr', 5, 100, 'no start converged')
        d = report.to_dict()
        assert d['loglik'] is None and d['bic'] is None and not d['converged']

    def test_estimate_outside_interval_warns(self):
        beta_hat = RecoveryParams.stochastic(0.05, -0.5, 0.5)
        beta_ci = {'beta0': (0.06, 0.2), 'beta1': (-1., 0.), 'beta2': (0.4, 0.6)}
        with pytest.warns(UserWarning, match='beta0'):
            report = FitReport('srr', None, beta_hat, beta_ci, -40., 4, 100)
        assert len(report.warnings) == 1

    def test_estimate_inside_interval(self):
        beta_hat = RecoveryParams.stochastic(0.05, -0.5, 0.5)
        beta_ci = {'beta0': (0.01, 0.2), 'beta1': (-1., 0.), 'beta2': (0.4, 0.6)}
        assert credible_interval_violations(beta_hat, beta_ci) == []

    def test_preferred(self):
        theta = CarmaTheta(CarmaSpec([1.]), 0., 1.)
        crr = FitReport('crr', theta, None, None, -50., 2, 100)
        srr = FitReport('srr', theta, None, None, -40., 4, 100)
        assert preferred_model(srr, crr) == 'srr'
        assert preferred_model(FitReport.failed('srr', 4, 100, 'x'), crr) == 'crr'
        assert preferred_model(FitReport.failed('srr', 4, 100, 'x'), FitReport.failed('crr', 2, 100, 'x')) is None
