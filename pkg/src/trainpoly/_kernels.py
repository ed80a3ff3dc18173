"""Hot numeric loops, compiled with numba when available.

Set ``TRAINPOLY_DISABLE_NUMBA=1`` to force the pure numpy versions.
"""
from __future__ import annotations

import os

import numpy as np

_DISABLED = os.environ.get("TRAINPOLY_DISABLE_NUMBA", "").strip() not in ("", "0")

try:
    if _DISABLED:
        raise ImportError
    from numba import njit
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - depends on environment
    HAVE_NUMBA = False


def _weighted_matrix(src, tgt, logw, m):
    # sum of exp(logw - max) per (target, source); returns matrix and the shift
    shift = logw.max() if logw.size else 0.0
    M = np.zeros((m, m))
    for k in range(src.size):
        M[tgt[k], src[k]] += np.exp(logw[k] - shift)
    return M, shift


def _power_iteration(M, tol, max_iter):
    # left Perron vector of M; a positive shift breaks periodicity
    m = M.shape[0]
    sigma = 0.5 * M.sum() / m + 1e-300
    u = np.full(m, 1.0 / m)
    E = 0.0
    it = 0
    for it in range(1, max_iter + 1):
        v = u @ M
        E_new = v.sum()
        w = v + sigma * u
        w /= w.sum()
        delta = np.abs(w - u).max()
        u = w
        if abs(E_new - E) <= tol * E_new and delta <= tol:
            E = E_new
            break
        E = E_new
    v = u @ M
    E = v.sum()
    resid = np.abs(v - E * u).max() / E if E > 0 else np.inf
    return E, u, resid, it


def _power_iteration_loops(M, tol, max_iter):
    m = M.shape[0]
    total = 0.0
    for i in range(m):
        for j in range(m):
            total += M[i, j]
    sigma = 0.5 * total / m + 1e-300
    u = np.full(m, 1.0 / m)
    v = np.zeros(m)
    w = np.zeros(m)
    E = 0.0
    it = 0
    for it in range(1, max_iter + 1):
        for j in range(m):
            acc = 0.0
            for i in range(m):
                acc += u[i] * M[i, j]
            v[j] = acc
        E_new = v.sum()
        s = 0.0
        for j in range(m):
            w[j] = v[j] + sigma * u[j]
            s += w[j]
        delta = 0.0
        for j in range(m):
            w[j] /= s
            d = abs(w[j] - u[j])
            if d > delta:
                delta = d
            u[j] = w[j]
        if abs(E_new - E) <= tol * E_new and delta <= tol:
            E = E_new
            break
        E = E_new
    for j in range(m):
        acc = 0.0
        for i in range(m):
            acc += u[i] * M[i, j]
        v[j] = acc
    E = v.sum()
    resid = 0.0
    for j in range(m):
        r = abs(v[j] - E * u[j])
        if r > resid:
            resid = r
    resid = resid / E if E > 0 else np.inf
    return E, u, resid, it


if HAVE_NUMBA:
    weighted_matrix = njit(cache=True)(_weighted_matrix)
    power_iteration = njit(cache=True)(_power_iteration_loops)
    BACKEND = "numba"
else:
    weighted_matrix = _weighted_matrix
    power_iteration = _power_iteration
    BACKEND = "numpy"

numpy_weighted_matrix = _weighted_matrix
numpy_power_iteration = _power_iteration
