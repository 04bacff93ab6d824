import numpy as np
import pytest
from hypothesis import given, strategies as st

from CARMApytools.base.errors import InvalidParameterError, NonInvertibleError
from CARMApytools.carma import CarmaSpec
from CARMApytools.credit import (DiscountCurve, IntensityPath, RecoveryParams, SpreadPath,
                                 credit_triangle_spread, fair_spread, fair_spread_stderr,
                                 generate_spread_path, invert_spread, log_spread_elasticity,
                                 premium_legs, recovery_rate, simulate_default_time)
from CARMApytools.levy import Brownian

from conftest import BETA

RANGE_BETA = (0.378, -0.0095, 0.637)


class TestRecoveryParams:
    def test_constant(self):
        assert RecoveryParams.constant(0.4).R == 0.4
        with pytest.raises(InvalidParameterError):
            RecoveryParams.constant(1.)

    @pytest.mark.parametrize('beta', [(-0.1, -1., 0.5), (0.1, 0.5, 0.5), (0.1, -1., 1.), (0.1, -1., 0.)])
    def test_stochastic_domain(self, beta):
        with pytest.raises(InvalidParameterError):
            RecoveryParams.stochastic(*beta)

    def test_range_warning(self):
        with pytest.warns(UserWarning):
            params = RecoveryParams.stochastic(*RANGE_BETA)
        assert params.range_warning
        assert params.gamma_star == pytest.approx(np.log(0.363 / 0.378) / -0.0095)

    def test_dict(self, srr_params):
        back = RecoveryParams.from_dict(srr_params.to_dict())
        assert (back.beta0, back.beta1, back.beta2) == BETA

    def test_as_stochastic(self, crr_params):
        s = crr_params.as_stochastic()
        assert (s.beta0, s.beta1, s.beta2) == (0., 0., 0.4)


class TestCreditTriangle:
    def test_recovery_rate(self, srr_params):
        g = np.array([0.01, 1., 10.])
        assert np.allclose(recovery_rate(srr_params, g), 0.637 + 0.0378 * np.exp(-0.0095 * g))

    @given(st.floats(0.001, 0.3), st.floats(-5., -1e-4), st.floats(0.05, 0.6))
    def test_recovery_non_increasing(self, b0, b1, b2):
        params = RecoveryParams.stochastic(b0, b1, b2)
        R = recovery_rate(params, np.linspace(0., 10., 201))
        assert np.all(np.diff(R) <= 0.)

    def test_constant(self, crr_params):
        assert credit_triangle_spread(crr_params, 0.05) == pytest.approx(0.03)
        assert invert_spread(crr_params, 0.03) == pytest.approx(0.05)

    @given(st.floats(1e-6, 50.))
    def test_inversion(self, gamma):
        params = RecoveryParams.stochastic(*BETA)
        s = credit_triangle_spread(params, gamma)
        g = invert_spread(params, s)
        assert g == pytest.approx(gamma, rel=1e-10)
        assert abs(credit_triangle_spread(params, g) - s) < 1e-10 * s

    def test_vectorized(self, srr_params):
        gamma = np.array([0.001, 0.02, 0.5, 3.])
        assert np.allclose(invert_spread(srr_params, credit_triangle_spread(srr_params, gamma)), gamma,
                           rtol=1e-10)

    def test_non_positive_spread(self, srr_params):
        with pytest.raises(ValueError):
            invert_spread(srr_params, 0.)

    def test_range_warning_branch(self):
        with pytest.warns(UserWarning):
            params = RecoveryParams.stochastic(*RANGE_BETA)
        with pytest.raises(NonInvertibleError):
            invert_spread(params, 0.01)
        with pytest.warns(UserWarning):
            g = invert_spread(params, 0.01, upper_branch=True)
        assert g > params.gamma_star
        assert recovery_rate(params, g) < 1.
        assert credit_triangle_spread(params, g) == pytest.approx(0.01, rel=1e-10)

    def test_elasticity(self, crr_params, srr_params):
        assert np.all(log_spread_elasticity(crr_params, np.array([0.1, 1.])) == 1.)
        g = 2.
        eps = 1e-6
        num = (np.log(credit_triangle_spread(srr_params, g * np.exp(eps)))
               - np.log(credit_triangle_spread(srr_params, g * np.exp(-eps)))) / (2 * eps)
        assert log_spread_elasticity(srr_params, np.array([g]))[0] == pytest.approx(num, rel=1e-6)


class TestPaths:
    def test_containers(self):
        with pytest.raises(InvalidParameterError):
            IntensityPath([0., 1.], [0.1, -0.1])
        with pytest.raises(InvalidParameterError):
            SpreadPath([0., 1.], [0.01, 0.])
        with pytest.raises(InvalidParameterError):
            DiscountCurve(-0.01)
        path = IntensityPath.constant(0.05, 5., 0.5)
        assert path.times[-1] == pytest.approx(5.) and np.all(path.gamma == 0.05)

    def test_log_returns_are_integrated_output(self, crr_params):
        spec = CarmaSpec([1.])
        spread, intensity, states = generate_spread_path(spec, Brownian(), crr_params, 0.01, 0.1, 200, rng=5)
        y = states.outputs
        assert np.allclose(spread.log_returns(), 0.05 * (y[1:] + y[:-1]))
        assert np.allclose(intensity.gamma, spread.premium / 0.6)
        assert spread.premium[0] == pytest.approx(0.01)

    def test_intensity_anchor(self, srr_params):
        spec = CarmaSpec([1.])
        spread, intensity, states = generate_spread_path(spec, Brownian(), srr_params, 0.01, 0.1, 200,
                                                         rng=5, anchor='intensity')
        y = states.outputs
        assert np.allclose(np.diff(np.log(intensity.gamma)), 0.05 * (y[1:] + y[:-1]))
        assert np.allclose(spread.premium, credit_triangle_spread(srr_params, intensity.gamma))

    def test_range_warned_path(self):
        with pytest.warns(UserWarning):
            params = RecoveryParams.stochastic(*RANGE_BETA)
            spread, intensity, _ = generate_spread_path(CarmaSpec([6.]), Brownian(), params, 0.01, 1., 300,
                                                        rng=1, allow_range_warning=True)
        assert np.all(recovery_rate(params, intensity.gamma) < 1.)

    def test_bad_anchor(self, crr_params):
        with pytest.raises(ValueError):
            generate_spread_path(CarmaSpec([1.]), Brownian(), crr_params, 0.01, 0.1, 10, anchor='rate')


class TestDefaultTime:
    def test_exponential(self, rng):
        path = IntensityPath.constant(0.1, 200., 0.5)
        tau = simulate_default_time(path, rng, size=100000)
        t = np.array([1., 5., 10., 20.])
        survival = np.array([np.mean(tau > s) for s in t])
        assert np.max(np.abs(survival - np.exp(-0.1 * t))) < 0.01

    def test_no_default(self, rng):
        path = IntensityPath.constant(0., 10., 1.)
        assert simulate_default_time(path, rng) is None
        assert np.all(np.isinf(simulate_default_time(path, rng, size=5)))


class TestFairSpread:
    @pytest.mark.parametrize('r', [0., 0.03, 0.1])
    def test_constant_intensity(self, r, crr_params, srr_params):
        path = IntensityPath.constant(0.05, 5., 0.01)
        curve = DiscountCurve(r)
        assert abs(fair_spread([path], crr_params, curve, 0., 5.) - 0.03) < 1e-10
        expected = (1 - recovery_rate(srr_params, 0.05)) * 0.05
        assert abs(fair_spread([path], srr_params, curve, 0., 5.) - expected) < 1e-10

    def test_window_interpolation(self, crr_params):
        path = IntensityPath.constant(0.05, 10., 1.)
        assert fair_spread([path], crr_params, DiscountCurve(0.03), 1.5, 5.) == pytest.approx(0.03, abs=1e-12)

    def test_window_outside_path(self, crr_params):
        with pytest.raises(ValueError):
            premium_legs([IntensityPath.constant(0.05, 3., 1.)], crr_params, DiscountCurve(), 0., 5.)

    def test_stderr(self, crr_params, rng):
        spec = CarmaSpec([1.])
        paths = [generate_spread_path(spec, Brownian(0., 0.3), crr_params, 0.01, 0.1, 50, rng=rng,
                                      anchor='intensity')[1] for _ in range(40)]
        c, se = fair_spread_stderr(paths, crr_params, DiscountCurve(0.03), 0., 5.)
        assert c == pytest.approx(fair_spread(paths, crr_params, DiscountCurve(0.03), 0., 5.))
        assert 0 < se < c
        assert np.isnan(fair_spread_stderr(paths[:1], crr_params, DiscountCurve(0.03), 0., 5.)[1])

    def test_second_order_in_step(self, srr_params):
        curve = DiscountCurve(0.03)
        spreads = []
        for h in [0.1, 0.05, 0.025]:
            times = np.arange(int(round(6. / h)) + 1) * h
            path = IntensityPath(times, 0.05 + 0.03 * np.sin(times))
            spreads.append(fair_spread([path], srr_params, curve, 0., 5.))
        d1 = abs(spreads[0] - spreads[1])
        d2 = abs(spreads[1] - spreads[2])
        assert d1 < 1e-4
        assert d2 < d1 / 3.
