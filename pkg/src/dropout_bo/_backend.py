"""Numerical backends for the hot GP-prediction kernels.

The per-query posterior math (cross-kernel vector, triangular solve,
variance reduction) dominates runtime because the DIRECT maximizer calls
it thousands of times per optimization step.  Two interchangeable
implementations are provided:

* a numba ``@njit`` version compiled on first use (default), and
* a pure-numpy/BLAS version.

Set ``DROPOUT_BO_BACKEND=numpy`` in the environment to force the numpy
path; the numpy path is also used automatically when numba is not
importable.  Both produce the same values to floating-point accuracy
(see tests) and ``benchmarks/backend_bench.py`` compares their speed.
"""

from __future__ import annotations

import os

import numpy as np
from scipy.linalg import solve_triangular


def _env_backend() -> str:
    return os.environ.get("DROPOUT_BO_BACKEND", "numba").strip().lower()


def cross_sqdist_numpy(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Pairwise squared Euclidean distances, shape (len(A), len(B))."""
    aa = np.einsum("ij,ij->i", A, A)
    bb = np.einsum("ij,ij->i", B, B)
    d2 = aa[:, None] + bb[None, :] - 2.0 * (A @ B.T)
    np.maximum(d2, 0.0, out=d2)
    return d2


def mean_var_numpy(
    train_x: np.ndarray,
    chol: np.ndarray,
    alpha: np.ndarray,
    query: np.ndarray,
    lengthscale: float,
    signal_variance: float,
) -> tuple[np.ndarray, np.ndarray]:
    """Batched posterior mean/variance given the lower Cholesky factor.

    ``alpha`` must be the solve of (K + nugget I) against the targets.
    Returns the raw variance (not clamped; callers decide how to treat
    tiny negative values).
    """
    d2 = cross_sqdist_numpy(train_x, query)
    ks = signal_variance * np.exp(-d2 / (2.0 * lengthscale * lengthscale))
    mean = ks.T @ alpha
    v = solve_triangular(chol, ks, lower=True, check_finite=False)
    var = signal_variance - np.einsum("ij,ij->j", v, v)
    return mean, var


try:
    from numba import njit

    HAVE_NUMBA = True

    @njit(cache=True)
    def _mean_var_jit(train_x, chol, alpha, query, lengthscale, signal_variance):
        n, dim = train_x.shape
        m = query.shape[0]
        mean = np.empty(m)
        var = np.empty(m)
        kvec = np.empty(n)
        v = np.empty(n)
        inv2 = 1.0 / (2.0 * lengthscale * lengthscale)
        for q in range(m):
            mu = 0.0
            for i in range(n):
                s = 0.0
                for j in range(dim):
                    diff = train_x[i, j] - query[q, j]
                    s += diff * diff
                k = signal_variance * np.exp(-s * inv2)
                kvec[i] = k
                mu += k * alpha[i]
            # forward substitution: chol @ v = kvec
            ssq = 0.0
            for i in range(n):
                acc = kvec[i]
                for j in range(i):
                    acc -= chol[i, j] * v[j]
                vi = acc / chol[i, i]
                v[i] = vi
                ssq += vi * vi
            mean[q] = mu
            var[q] = signal_variance - ssq
        return mean, var

    def mean_var_numba(train_x, chol, alpha, query, lengthscale, signal_variance):
        return _mean_var_jit(
            train_x, chol, alpha, query, float(lengthscale), float(signal_variance)
        )

except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False
    mean_var_numba = None


USING_NUMBA = HAVE_NUMBA and _env_backend() != "numpy"

mean_var = mean_var_numba if USING_NUMBA else mean_var_numpy


def backend_name() -> str:
    """Name of the active hot-kernel backend ("numba" or "numpy")."""
    return "numba" if USING_NUMBA else "numpy"
