"""Truncated Taylor-series (jet) arithmetic over sample batches.

A jet is an ndarray of shape (order+1, n) whose row j holds the j-th Taylor
coefficient f^(j)/j! at each of n samples.  Linear operations are plain numpy
broadcasting; products use the truncated Cauchy convolution.  Feeding a
vector field's right-hand side with jets and reading off one row at a time
turns the ODE into an exact recurrence for higher time derivatives — no
finite differencing anywhere.
"""

from __future__ import annotations

from math import factorial

import numpy as np


def jet_const(value, order: int, n: int) -> np.ndarray:
    out = np.zeros((order + 1, n))
    out[0] = value
    return out


def jet_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Truncated Cauchy product of two jets of equal order."""
    k_max = a.shape[0]
    out = np.zeros(np.broadcast_shapes(a.shape, b.shape))
    for k in range(k_max):
        for i in range(k + 1):
            out[k] += a[i] * b[k - i]
    return out


def jet_polyval(coef, w: np.ndarray) -> np.ndarray:
    """Evaluate a polynomial (ascending coef) at a jet argument, by Horner."""
    out = np.zeros_like(w)
    out[0] = coef[-1]
    for c in coef[-2::-1]:
        out = jet_mul(out, w)
        out[0] += c
    return out


def state_jets(jet_rhs, states: np.ndarray, order: int) -> np.ndarray:
    """Taylor coefficients of the flow through each sample.

    Parameters
    ----------
    jet_rhs : callable(S) -> F
        Right-hand side evaluated in jet arithmetic; S and F have shape
        (order+1, n_vars, n_samples).
    states : (n_samples, n_vars) array of sample states.
    order : highest derivative order wanted.

    Returns
    -------
    S : (order+1, n_vars, n_samples) with S[j] = (d^j s / dt^j) / j!.

    The recurrence S[m+1] = F[m] / (m+1) is exact because the Cauchy-product
    coefficient of degree m only involves state coefficients of degree <= m.
    """
    n, nv = states.shape
    S = np.zeros((order + 1, nv, n))
    S[0] = states.T
    for m in range(order):
        F = jet_rhs(S)
        S[m + 1] = F[m] / (m + 1)
    return S


def jets_to_derivatives(S: np.ndarray) -> np.ndarray:
    """Convert Taylor coefficients to derivatives: D[j] = j! * S[j]."""
    fac = np.array([factorial(j) for j in range(S.shape[0])], dtype=float)
    return S * fac[:, None, None]
