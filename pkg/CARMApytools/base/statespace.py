#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Exact discretisation of the linear state equation
:math:`dX_t = AX_t dt + e\\,dL_t` on a grid of step :math:`h`, shared by the
simulator and the Kalman filter.
"""


def discretize(A, e, h):
    """
    Transition matrix and first/second moment integrals of one step, from
    augmented block matrix exponentials (Van Loan).

    .. math::

        \\Phi = e^{Ah}, \\quad
        m = \\int_{0}^{h} e^{Au}e\\,du, \\quad
        Q = \\int_{0}^{h} e^{Au}ee^{\\prime}e^{A^{\\prime}u}du

    Args:
        A (array[float]): p\\*p drift matrix.
        e (array[float]): p\\*1 loading vector.
        h (float): Step length.

    Returns:
        Phi (array[float]): p\\*p
        m (array[float]): p\\*1
        Q (array[float]): p\\*p, symmetric
    """
    import numpy as np
    from scipy.linalg import expm

    A = np.atleast_2d(np.array(A, dtype=float))
    e = np.array(e, dtype=float).reshape([-1])
    p = A.shape[0]

    # [[A, e], [0, 0]] -> [[e^{Ah}, int e^{Au} du e], [0, 1]]
    blk = np.zeros([p + 1, p + 1])
    blk[:p, :p] = A
    blk[:p, p] = e
    eblk = expm(blk * h)
    Phi = eblk[:p, :p]
    m = eblk[:p, p].copy()

    # [[-A, ee'], [0, A']] -> [[., F12], [0, e^{A'h}]], Q = e^{Ah} F12
    blk = np.zeros([2 * p, 2 * p])
    blk[:p, :p] = -A
    blk[:p, p:] = np.outer(e, e)
    blk[p:, p:] = A.T
    eblk = expm(blk * h)
    Q = eblk[p:, p:].T @ eblk[:p, p:]
    Q = 0.5 * (Q + Q.T)

    return Phi, m, Q


def psd_sqrt(cov):
    """
    Square root :math:`L` with :math:`LL^{\\prime} = \\Sigma` of a symmetric
    positive semi-definite matrix. Tiny negative eigenvalues from round-off
    are set to zero, so a zero matrix gives a zero root.

    Args:
        cov (array[float]): p\\*p

    Returns:
        L (array[float]): p\\*p
    """
    import numpy as np

    cov = np.atleast_2d(np.array(cov, dtype=float))
    cov = 0.5 * (cov + cov.T)
    w, v = np.linalg.eigh(cov)
    w = np.where(w > 0., w, 0.)

    return v * np.sqrt(w)


def stationary_state_covariance(A, e, variance_rate):
    """
    Solve :math:`A\\Sigma + \\Sigma A^{\\prime} = -\\sigma^{2}ee^{\\prime}`.

    Args:
        A (array[float]): p\\*p, all eigenvalues with negative real part.
        e (array[float]): p\\*1
        variance_rate (float): :math:`\\sigma^{2}`

    Returns:
        Sigma (array[float]): p\\*p, symmetric
    """
    import numpy as np
    from scipy.linalg import solve_continuous_lyapunov

    A = np.atleast_2d(np.array(A, dtype=float))
    e = np.array(e, dtype=float).reshape([-1])
    Sigma = solve_continuous_lyapunov(A, -variance_rate * np.outer(e, e))

    return 0.5 * (Sigma + Sigma.T)


def stationary_state_mean(A, e, mean_rate):
    """
    Stationary mean :math:`-A^{-1}e\\mu` of the state.

    Args:
        A (array[float]): p\\*p, nonsingular.
        e (array[float]): p\\*1
        mean_rate (float): :math:`\\mu`

    Returns:
        array[float]: p\\*1
    """
    import numpy as np

    A = np.atleast_2d(np.array(A, dtype=float))
    e = np.array(e, dtype=float).reshape([-1])
    if mean_rate == 0:
        return np.zeros(A.shape[0])

    return -np.linalg.solve(A, e) * mean_rate
