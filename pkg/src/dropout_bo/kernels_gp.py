"""Squared-exponential kernel and exact GP posterior inference.

The posterior is the standard noisy-kriging form: for training inputs X,
targets y and kernel matrix K,

    mean(q) = k(q, X) @ (K + nugget I)^-1 y
    var(q)  = k(q, q) - k(q, X) @ (K + nugget I)^-1 k(X, q)

computed through a lower Cholesky factor.  Inputs may live in any axis
subset of the full search space; the GP only sees the coordinates it is
given.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from . import _backend

# Jitter ladder used when the kernel matrix is numerically semidefinite
# (duplicate inputs, zero noise).
_JITTER_START = 1e-10
_JITTER_MAX = 1e-4


@dataclass(frozen=True)
class KernelParams:
    """Squared-exponential kernel hyperparameters."""

    lengthscale: float = 0.1
    signal_variance: float = 1.0

    def __post_init__(self):
        if not (self.lengthscale > 0.0):
            raise ValueError(f"lengthscale must be > 0, got {self.lengthscale}")
        if not (self.signal_variance > 0.0):
            raise ValueError(
                f"signal_variance must be > 0, got {self.signal_variance}"
            )


@dataclass(frozen=True)
class BoxDomain:
    """Axis-aligned box, lower[i] < upper[i] in every dimension."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = np.ascontiguousarray(np.atleast_1d(self.lower), dtype=np.float64)
        hi = np.ascontiguousarray(np.atleast_1d(self.upper), dtype=np.float64)
        if lo.shape != hi.shape or lo.ndim != 1 or lo.size == 0:
            raise ValueError("lower and upper must be 1-d arrays of equal length")
        if not (np.isfinite(lo).all() and np.isfinite(hi).all()):
            raise ValueError("domain bounds must be finite")
        if not np.all(lo < hi):
            raise ValueError("every lower bound must be strictly below its upper bound")
        lo.setflags(write=False)
        hi.setflags(write=False)
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def dim(self) -> int:
        return self.lower.size

    @property
    def width(self) -> np.ndarray:
        return self.upper - self.lower

    def contains(self, x: np.ndarray, atol: float = 0.0) -> bool:
        x = np.asarray(x, dtype=np.float64)
        return bool(
            np.all(x >= self.lower - atol) and np.all(x <= self.upper + atol)
        )

    def subset(self, indices: np.ndarray) -> "BoxDomain":
        """The box restricted to the given dimension indices."""
        return BoxDomain(self.lower[indices], self.upper[indices])

    @staticmethod
    def unit(dim: int) -> "BoxDomain":
        return BoxDomain(np.zeros(dim), np.ones(dim))


def _as_point(x, name: str = "point") -> np.ndarray:
    x = np.ascontiguousarray(np.atleast_1d(x), dtype=np.float64)
    if x.ndim != 1:
        raise ValueError(f"{name} must be 1-d, got shape {x.shape}")
    return x


def se_kernel(x, x2, params: KernelParams) -> float:
    """Squared-exponential covariance between two points."""
    a = _as_point(x)
    b = _as_point(x2)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    sq = float(np.sum((a - b) ** 2))
    return params.signal_variance * np.exp(-sq / (2.0 * params.lengthscale**2))


def gram_matrix(points, params: KernelParams) -> np.ndarray:
    """Kernel matrix over a set of points, diagonal exactly signal_variance."""
    X = np.ascontiguousarray(np.atleast_2d(points), dtype=np.float64)
    if X.size == 0:
        raise ValueError("gram_matrix requires at least one point")
    d2 = _backend.cross_sqdist_numpy(X, X)
    np.fill_diagonal(d2, 0.0)
    return params.signal_variance * np.exp(-d2 / (2.0 * params.lengthscale**2))


def _factor_with_jitter(K: np.ndarray, nugget: float) -> tuple[np.ndarray, float]:
    """Lower Cholesky factor of K + (nugget + jitter) I, escalating jitter.

    Returns (factor, jitter_used).  Raises if even the maximum jitter does
    not produce a positive-definite matrix.
    """
    n = K.shape[0]
    eye = np.eye(n)
    jitter = _JITTER_START
    while jitter <= _JITTER_MAX * (1.0 + 1e-12):
        try:
            L = np.linalg.cholesky(K + (nugget + jitter) * eye)
            return L, jitter
        except np.linalg.LinAlgError:
            jitter *= 10.0
    raise np.linalg.LinAlgError("ill-conditioned kernel matrix")


class GpPosterior:
    """Immutable fitted GP; build with :func:`fit`.

    Exposes predictive mean and variance for single points and batches.
    The cached factor satisfies L @ L.T == K + (noise + jitter) I.
    """

    __slots__ = ("train_x", "train_y", "params", "noise", "jitter", "chol", "alpha")

    def __init__(self, train_x, train_y, params, noise, jitter, chol, alpha):
        for arr in (train_x, train_y, chol, alpha):
            arr.setflags(write=False)
        self.train_x = train_x
        self.train_y = train_y
        self.params = params
        self.noise = noise
        self.jitter = jitter
        self.chol = chol
        self.alpha = alpha

    @property
    def n_train(self) -> int:
        return self.train_x.shape[0]

    @property
    def dim(self) -> int:
        return self.train_x.shape[1]

    @property
    def nugget(self) -> float:
        """Total diagonal offset actually factorized: noise + jitter."""
        return self.noise + self.jitter

    def mean_var_batch(self, query) -> tuple[np.ndarray, np.ndarray]:
        """Posterior mean and variance at each row of ``query``."""
        Q = np.ascontiguousarray(np.atleast_2d(query), dtype=np.float64)
        if Q.shape[1] != self.dim:
            raise ValueError(
                f"query dimension {Q.shape[1]} != training dimension {self.dim}"
            )
        mean, var = _backend.mean_var(
            self.train_x,
            self.chol,
            self.alpha,
            Q,
            self.params.lengthscale,
            self.params.signal_variance,
        )
        bad = var < -1e-8
        if np.any(bad):
            raise np.linalg.LinAlgError(
                f"predictive variance {var[bad].min():.3e} below -1e-8; "
                "kernel matrix too ill-conditioned"
            )
        return mean, np.maximum(var, 0.0)

    def mean_var(self, x) -> tuple[float, float]:
        """Posterior mean and variance at a single point."""
        x = _as_point(x, "query")
        mean, var = self.mean_var_batch(x[None, :])
        return float(mean[0]), float(var[0])


def fit(inputs, targets, params: KernelParams, noise: float) -> GpPosterior:
    """Fit an exact GP posterior to observations.

    ``noise`` is the observation-noise variance (>= 0).  A small jitter is
    added to the kernel diagonal, escalating tenfold from 1e-10 to 1e-4
    until the Cholesky factorization succeeds.
    """
    X = np.ascontiguousarray(np.atleast_2d(inputs), dtype=np.float64)
    y = np.ascontiguousarray(np.atleast_1d(targets), dtype=np.float64)
    if X.shape[0] == 0:
        raise ValueError("fit requires at least one observation")
    if X.shape[0] != y.shape[0]:
        raise ValueError(f"{X.shape[0]} inputs but {y.shape[0]} targets")
    if not (noise >= 0.0):
        raise ValueError(f"noise variance must be >= 0, got {noise}")
    if not (np.isfinite(X).all() and np.isfinite(y).all()):
        raise ValueError("training data must be finite")
    K = gram_matrix(X, params)
    L, jitter = _factor_with_jitter(K, noise)
    alpha = solve_triangular(
        L.T, solve_triangular(L, y, lower=True, check_finite=False),
        lower=False, check_finite=False,
    )
    return GpPosterior(X, y, params, float(noise), jitter, L, alpha)


def posterior_mean_var(gp: GpPosterior, x) -> tuple[float, float]:
    """Predictive (mean, variance) of the fitted GP at ``x``."""
    return gp.mean_var(x)
