"""Shared linear time-invariant system utilities.

Both the structural simulator and the ground-motion filter advance
continuous-time models with the same exact zero-order-hold scheme, so the
discretization and the state recursions live here.
"""
from __future__ import annotations

import numpy as np
from scipy.linalg import expm


def zoh_discretize(a: np.ndarray, b: np.ndarray, dt: float) -> tuple[np.ndarray, np.ndarray]:
    """Exact discretization of dx/dt = A x + B u for piecewise-constant u.

    Returns (A_d, B_d) with A_d = exp(A dt) and B_d = A^-1 (A_d - I) B.
    A must be invertible, which holds for any damped structural model and
    for the ground-motion shaping filter.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    a_d = expm(a * dt)
    b_d = np.linalg.solve(a, (a_d - np.eye(a.shape[0])) @ b)
    return a_d, b_d


def propagate(a_d: np.ndarray, b_d: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Run x[i+1] = A_d x[i] + B_d u[i] from x[0] = 0.

    Returns the state history with shape (len(u), n); sample i holds x(i*dt).
    The final input sample only shapes the record length, it is never applied.
    """
    u = np.asarray(u, dtype=float)
    n = b_d.shape[0]
    states = np.zeros((u.shape[0], n))
    x = np.zeros(n)
    with np.errstate(over="ignore", invalid="ignore"):  # divergence checked by callers
        for i in range(u.shape[0] - 1):
            x = a_d @ x + b_d * u[i]
            states[i + 1] = x
    return states


def propagate_many(a_d: np.ndarray, b_d: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Batched variant of :func:`propagate` over stacked models.

    a_d has shape (q, n, n), b_d (q, n); all q recursions share the input u.
    Returns (len(u), q, n).
    """
    u = np.asarray(u, dtype=float)
    q, n = b_d.shape
    states = np.zeros((u.shape[0], q, n))
    x = np.zeros((q, n, 1))
    b_col = b_d[:, :, None]
    with np.errstate(over="ignore", invalid="ignore"):  # divergence checked by callers
        for i in range(u.shape[0] - 1):
            x = np.matmul(a_d, x) + b_col * u[i]
            states[i + 1] = x[:, :, 0]
    return states
