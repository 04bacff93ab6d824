#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Affine term structure of the CARMA short-rate model. Zero-coupon bond prices
have the form

.. math::

    P(t,T) = e^{A(t,T)-B(t,T)r(t)}

with deterministic coefficients of :math:`\\tau = T-t`. The closed form is
used for p = 1. For p > 1 :math:`B` solves the matrix ODE
:math:`dB/d\\tau = AB + I` and :math:`A` the scalar ODE
:math:`dA/d\\tau = \\frac{1}{2}(e^{\\prime}Be)^{2}`.
"""
from functools import lru_cache

from CARMApytools.base.errors import SingularityError, UnsupportedConfigurationError


class AffineCoeffs:
    """
    Coefficients of the bond exponent at time to maturity ``tau``.

    Args:
        A_val (float): :math:`A(t,T)`
        B_val (float | array[float]): :math:`B(t,T)`. A float for p = 1,
            p\\*p matrix otherwise.
        tau (float): :math:`T-t`, >= 0.
    """

    def __init__(self, A_val, B_val, tau):
        self.A_val = A_val
        self.B_val = B_val
        self.tau = tau

    def __repr__(self):
        return 'AffineCoeffs(A_val={!r}, B_val={!r}, tau={!r})'.format(self.A_val, self.B_val, self.tau)


class BondQuote:
    """
    Zero-coupon bond price and continuously compounded yield.

    Returns:
        self.price (float)
        self.yield_ (float): :math:`-\\log P/\\tau`, the short rate at
            :math:`\\tau = 0`.
        self.tau (float)
    """

    def __init__(self, price, yield_, tau):
        self.price = price
        self.yield_ = yield_
        self.tau = tau


def _zero(p):
    import numpy as np

    if p == 1:
        return 0.
    return np.zeros([p, p])


def _check_tau(tau):
    if not tau >= 0:
        raise ValueError('Time to maturity must be non-negative, got {}.'.format(tau))
    return float(tau)


def scalar_affine_expressions():
    """
    Symbolic coefficients of the one-factor model, :math:`A = -a_{1}`.

    .. math::

        B(\\tau) = \\frac{1-e^{-a_{1}\\tau}}{a_{1}}, \\quad
        A(\\tau) = \\frac{1}{4a_{1}^{2}}\\left[2\\tau - 2B(\\tau) - a_{1}B(\\tau)^{2}\\right]

    Returns:
        a1 (Symbol)
        tau (Symbol)
        A_expr (Expr)
        B_expr (Expr)
    """
    from sympy import symbols, exp

    a1, tau = symbols('a1 tau', positive=True)
    B_expr = (1 - exp(-a1 * tau)) / a1
    A_expr = (2 * tau - 2 * B_expr - a1 * B_expr**2) / (4 * a1**2)

    return a1, tau, A_expr, B_expr


@lru_cache(maxsize=None)
def _scalar_functions():
    from sympy import lambdify, diff

    a1, tau, A_expr, B_expr = scalar_affine_expressions()
    lam_A = lambdify((a1, tau), A_expr, 'numpy')
    lam_B = lambdify((a1, tau), B_expr, 'numpy')
    # d/dt = -d/dtau
    lam_Bt = lambdify((a1, tau), -diff(B_expr, tau), 'numpy')

    return lam_A, lam_B, lam_Bt


def affine_coeffs_closed(sys, tau):
    """
    Closed-form coefficients. For p > 1, :math:`B = A^{-1}(e^{A\\tau}-I)`
    and :math:`A(t,T)` comes from :py:func:`affine_coeffs_ode`.

    Args:
        sys (CompanionSystem)
        tau (float): >= 0

    Returns:
        AffineCoeffs

    :raise SingularityError: If the companion matrix is singular.
    """
    import numpy as np
    from scipy.linalg import expm

    tau = _check_tau(tau)
    p = sys.p
    if tau == 0.:
        return AffineCoeffs(0., _zero(p), 0.)
    if np.min(np.abs(sys.eigenvalues)) < 1e-12:
        raise SingularityError('The companion matrix has a zero eigenvalue, A^-1 does not exist.')

    if p == 1:
        lam_A, lam_B, _ = _scalar_functions()
        a1 = -float(sys.A[0, 0])
        return AffineCoeffs(float(lam_A(a1, tau)), float(lam_B(a1, tau)), tau)

    B = np.linalg.solve(sys.A, expm(sys.A * tau) - np.eye(p))
    A_val = affine_coeffs_ode(sys, tau).A_val

    return AffineCoeffs(A_val, B, tau)


def default_ode_step(sys, tau):
    """
    :math:`\\min(\\tau/1000, 0.02/\\max|\\lambda|)`.
    """
    import numpy as np

    return min(tau / 1000., 0.02 / max(np.max(np.abs(sys.eigenvalues)), 1e-12))


def affine_coeffs_ode(sys, tau, step=None):
    """
    Integrate the coefficient ODEs from :math:`\\tau = 0` with the classical
    4th-order Runge-Kutta scheme.

    .. math::

        \\frac{dB}{d\\tau} = AB + I, \\quad
        \\frac{dA}{d\\tau} = \\frac{1}{2}(e^{\\prime}Be)^{2}, \\quad
        A(0) = B(0) = 0

    Args:
        sys (CompanionSystem)
        tau (float): >= 0
        step (float | None): Integration step, at most tau/10. Rounded down
            so that an integer number of steps covers tau. Default:
            :py:func:`default_ode_step`.

    Returns:
        AffineCoeffs
    """
    import numpy as np

    tau = _check_tau(tau)
    p = sys.p
    if tau == 0.:
        return AffineCoeffs(0., _zero(p), 0.)
    if step is None:
        step = default_ode_step(sys, tau)
    if not 0 < step <= tau / 10:
        raise ValueError('The ODE step must be in (0, tau/10] = (0, {:.6g}], got {}.'.format(tau / 10, step))

    nstep = int(np.ceil(tau / step - 1e-9))
    dt = tau / nstep

    if p == 1:
        a = float(sys.A[0, 0])
        B, A_val = 0., 0.
        for _ in range(nstep):
            k1 = a * B + 1.
            B2 = B + 0.5 * dt * k1
            k2 = a * B2 + 1.
            B3 = B + 0.5 * dt * k2
            k3 = a * B3 + 1.
            B4 = B + dt * k3
            k4 = a * B4 + 1.
            A_val += dt / 6. * 0.5 * (B**2 + 2 * B2**2 + 2 * B3**2 + B4**2)
            B += dt / 6. * (k1 + 2 * k2 + 2 * k3 + k4)
        return AffineCoeffs(A_val, B, tau)

    A = sys.A
    I = np.eye(p)
    B = np.zeros([p, p])
    A_val = 0.
    for _ in range(nstep):
        k1 = A @ B + I
        B2 = B + 0.5 * dt * k1
        k2 = A @ B2 + I
        B3 = B + 0.5 * dt * k2
        k3 = A @ B3 + I
        B4 = B + dt * k3
        k4 = A @ B4 + I
        A_val += dt / 12. * (B[-1, -1]**2 + 2 * B2[-1, -1]**2 + 2 * B3[-1, -1]**2 + B4[-1, -1]**2)
        B = B + dt / 6. * (k1 + 2 * k2 + 2 * k3 + k4)

    return AffineCoeffs(float(A_val), B, tau)


def ode_residual(a1, tau, method='symbolic', dt=1e-5):
    """
    Residual :math:`B_{t} + AB + 1` of the closed-form scalar :math:`B`,
    with :math:`A = -a_{1}`. Should vanish.

    Args:
        a1 (float): > 0
        tau (float): > 0
        method (str): 'symbolic' differentiates the sympy expression,
            'fd' uses a central finite difference in t with step ``dt``.
        dt (float)

    Returns:
        float
    """
    _, lam_B, lam_Bt = _scalar_functions()
    if method == 'symbolic':
        Bt = float(lam_Bt(a1, tau))
    elif method == 'fd':
        # t + dt means tau - dt
        Bt = (float(lam_B(a1, tau - dt)) - float(lam_B(a1, tau + dt))) / (2 * dt)
    else:
        raise ValueError("Unknown method '{}'. Use 'symbolic' or 'fd'.".format(method))

    return Bt - a1 * float(lam_B(a1, tau)) + 1.


def bond_price(coeffs, r):
    """
    :math:`P = e^{A-Br}` and its yield.

    Args:
        coeffs (AffineCoeffs): Scalar coefficients (p = 1).
        r (float): Short rate.

    Returns:
        BondQuote

    :raise UnsupportedConfigurationError: For matrix-valued B (p > 1).
    """
    import numpy as np

    B = coeffs.B_val
    if np.ndim(B) > 0:
        if np.size(B) != 1:
            raise UnsupportedConfigurationError(
                'Bond prices are defined for the one-factor model (p = 1) only. For p > 1 use the affine coefficients.')
        B = float(np.reshape(B, [-1])[0])

    exponent = coeffs.A_val - B * r
    price = float(np.exp(exponent))
    if coeffs.tau > 0:
        yld = -exponent / coeffs.tau
    else:
        yld = float(r)

    return BondQuote(price, yld, coeffs.tau)


def bond_curve(sys, taus, r):
    """
    Bond prices over a maturity grid.

    Args:
        sys (CompanionSystem): p = 1.
        taus (array[float]): Times to maturity, >= 0.
        r (float): Short rate.

    Returns:
        pandas.DataFrame: Columns ``tau, A, B, price, yield``.
    """
    import pandas as pd

    rows = []
    for tau in taus:
        c = affine_coeffs_closed(sys, tau)
        q = bond_price(c, r)
        rows.append([c.tau, c.A_val, c.B_val, q.price, q.yield_])

    return pd.DataFrame(rows, columns=['tau', 'A', 'B', 'price', 'yield'])
