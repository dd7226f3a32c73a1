"""Compiled inner loop of the thermal march (all columns, one Crank-Nicolson step)."""

import numpy as np
from numba import njit


def factor(diag, off, periodic):
    """Pivots of the tridiagonal ``diag/off`` matrix for :func:`cn_step`.

    For periodic grids the corners are removed by Sherman-Morrison; the
    returned tuple then also carries the correction vector and its scalars.
    """
    diag = np.array(diag, dtype=float)
    n = diag.shape[0]
    gamma = -diag[0]
    if periodic:
        diag[0] -= gamma
        diag[-1] -= off * off / gamma
    piv = np.empty(n)
    piv[0] = diag[0]
    for i in range(1, n):
        piv[i] = diag[i] - off * off / piv[i - 1]
    if not periodic:
        return piv, np.zeros(n), 0.0, 1.0
    u = np.zeros(n)
    u[0] = gamma
    u[-1] = off
    z = _thomas_vector(piv, off, u)
    ratio = off / gamma
    return piv, z, ratio, 1.0 + z[0] + ratio * z[-1]


def _thomas_vector(piv, off, b):
    n = b.shape[0]
    x = b.copy()
    for i in range(1, n):
        x[i] -= off / piv[i - 1] * x[i - 1]
    x[-1] /= piv[-1]
    for i in range(n - 2, -1, -1):
        x[i] = (x[i] - off * x[i + 1]) / piv[i]
    return x


@njit(cache=True)
def cn_step(q, rhs_diag, rhs_off, piv, off, periodic, z, ratio, denom, out):
    """``out = A^{-1} B q`` for every column; returns ``max |out|``."""
    n, m = q.shape
    for i in range(n):
        for j in range(m):
            v = rhs_diag[i] * q[i, j]
            if i > 0:
                v += rhs_off * q[i - 1, j]
            elif periodic:
                v += rhs_off * q[n - 1, j]
            if i < n - 1:
                v += rhs_off * q[i + 1, j]
            elif periodic:
                v += rhs_off * q[0, j]
            out[i, j] = v
    for i in range(1, n):
        f = off / piv[i - 1]
        for j in range(m):
            out[i, j] -= f * out[i - 1, j]
    inv = 1.0 / piv[n - 1]
    for j in range(m):
        out[n - 1, j] *= inv
    for i in range(n - 2, -1, -1):
        inv = 1.0 / piv[i]
        for j in range(m):
            out[i, j] = (out[i, j] - off * out[i + 1, j]) * inv
    if periodic:
        for j in range(m):
            s = (out[0, j] + ratio * out[n - 1, j]) / denom
            for i in range(n):
                out[i, j] -= s * z[i]
    biggest = 0.0
    for i in range(n):
        for j in range(m):
            a = abs(out[i, j])
            if a != a:
                return np.inf
            if a > biggest:
                biggest = a
    return biggest
