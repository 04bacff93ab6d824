import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from CARMApytools.ats import (affine_coeffs_closed, affine_coeffs_ode, bond_curve, bond_price,
                              default_ode_step, ode_residual, scalar_affine_expressions)
from CARMApytools.base.errors import SingularityError, UnsupportedConfigurationError
from CARMApytools.carma import CarmaSpec, build_system


def _car1(a):
    return build_system(CarmaSpec([a]))


class TestClosedForm:
    def test_scalar_formula(self):
        a, tau = 0.5, 4.
        c = affine_coeffs_closed(_car1(a), tau)
        B = (1 - np.exp(-a * tau)) / a
        assert c.B_val == pytest.approx(B, rel=1e-14)
        assert c.A_val == pytest.approx((2 * tau - 2 * B - a * B**2) / (4 * a**2), rel=1e-12)

    def test_symbolic_expressions(self):
        a1, tau, A_expr, B_expr = scalar_affine_expressions()
        assert float(B_expr.subs({a1: 2., tau: 0.})) == 0.
        assert float(A_expr.subs({a1: 2., tau: 0.})) == 0.

    def test_zero_maturity(self, carma21):
        c = affine_coeffs_closed(_car1(6.), 0.)
        assert c.A_val == 0. and c.B_val == 0.
        c = affine_coeffs_closed(build_system(carma21), 0.)
        assert c.A_val == 0. and np.all(c.B_val == 0.)

    def test_singular(self):
        with pytest.raises(SingularityError):
            affine_coeffs_closed(build_system(CarmaSpec([1., 0.])), 1.)

    def test_singular_zero_maturity(self):
        c = affine_coeffs_closed(build_system(CarmaSpec([1., 0.])), 0.)
        assert c.A_val == 0. and np.all(c.B_val == 0.)

    def test_negative_maturity(self):
        with pytest.raises(ValueError):
            affine_coeffs_closed(_car1(1.), -1.)

    @given(st.floats(0.05, 10.), st.floats(0.01, 30.))
    @settings(max_examples=50, deadline=None)
    def test_matches_ode(self, a, tau):
        closed = affine_coeffs_closed(_car1(a), tau)
        ode = affine_coeffs_ode(_car1(a), tau)
        assert abs(closed.B_val - ode.B_val) < 1e-8
        assert abs(closed.A_val - ode.A_val) < 1e-8

    @given(st.floats(0.05, 10.), st.floats(0., 30.))
    def test_b_bounds(self, a, tau):
        B = affine_coeffs_closed(_car1(a), tau).B_val
        assert 0. <= B <= tau + 1e-12

    def test_matrix_b(self, carma21):
        sys = build_system(carma21)
        closed = affine_coeffs_closed(sys, 3.)
        ode = affine_coeffs_ode(sys, 3.)
        assert closed.B_val.shape == (2, 2)
        assert np.allclose(closed.B_val, ode.B_val, atol=1e-8)
        assert closed.A_val == ode.A_val


class TestOde:
    def test_fourth_order(self):
        sys = _car1(1.)
        exact = affine_coeffs_closed(sys, 2.)
        coarse = affine_coeffs_ode(sys, 2., step=0.1)
        fine = affine_coeffs_ode(sys, 2., step=0.05)
        ratio_B = abs(coarse.B_val - exact.B_val) / abs(fine.B_val - exact.B_val)
        ratio_A = abs(coarse.A_val - exact.A_val) / abs(fine.A_val - exact.A_val)
        assert 10. < ratio_B < 22.
        assert 8. < ratio_A < 32.

    def test_step_limit(self):
        with pytest.raises(ValueError):
            affine_coeffs_ode(_car1(1.), 1., step=0.5)

    def test_default_step(self):
        assert default_ode_step(_car1(6.), 1.) == pytest.approx(0.001)
        assert default_ode_step(_car1(100.), 1.) == pytest.approx(0.0002)

    @pytest.mark.parametrize('method, tol', [('symbolic', 1e-12), ('fd', 1e-6)])
    def test_residual(self, method, tol):
        for a, tau in [(0.5, 1.), (6., 0.3), (2., 10.)]:
            assert abs(ode_residual(a, tau, method=method)) < tol


class TestBondPrice:
    def test_price_and_yield(self):
        c = affine_coeffs_closed(_car1(0.5), 2.)
        q = bond_price(c, 0.03)
        assert q.price == pytest.approx(np.exp(c.A_val - c.B_val * 0.03))
        assert q.yield_ == pytest.approx(-np.log(q.price) / 2.)

    def test_zero_maturity_yield(self):
        q = bond_price(affine_coeffs_closed(_car1(0.5), 0.), 0.03)
        assert q.price == 1. and q.yield_ == 0.03

    def test_matrix_unsupported(self, carma21):
        with pytest.raises(UnsupportedConfigurationError):
            bond_price(affine_coeffs_closed(build_system(carma21), 1.), 0.03)

    def test_curve(self):
        curve = bond_curve(_car1(6.), [0., 0.5, 1., 5.], 0.03)
        assert curve.columns.tolist() == ['tau', 'A', 'B', 'price', 'yield']
        assert curve['yield'].iloc[0] == 0.03
        tail = curve.iloc[1:]
        assert np.allclose(tail['yield'], -np.log(tail['price']) / tail['tau'])
        assert np.allclose(tail['price'], np.exp(tail['A'] - tail['B'] * 0.03))

    @pytest.mark.parametrize('a, tau', [(0.5, 1.), (6., 5.), (2., 0.25)])
    def test_price_decreasing_in_rate(self, a, tau):
        c = affine_coeffs_closed(_car1(a), tau)
        prices = [bond_price(c, r).price for r in np.linspace(-0.05, 0.2, 50)]
        assert np.all(np.diff(prices) < 0)

    @pytest.mark.parametrize('a', [0.5, 6.])
    def test_short_yield_is_rate(self, a):
        q = bond_price(affine_coeffs_closed(_car1(a), 1e-6), 0.03)
        assert q.yield_ == pytest.approx(0.03, abs=1e-4)
