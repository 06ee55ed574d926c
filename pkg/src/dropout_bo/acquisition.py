"""UCB / EI acquisition values and the exploration schedule beta_t.

The schedule is

    beta_t = multiplier * [ 2 log(4 pi_t / delta)
                            + 2 d log(d t^2 b r sqrt(log(4 d a / delta))) ]

with pi_t = pi^2 t^2 / 6 (so that sum 1/pi_t = 1).  The theoretical
schedule over-explores in practice; multiplier 0.1-0.2 with delta = 0.1
works well on the bundled benchmarks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

from .kernels_gp import GpPosterior


@dataclass(frozen=True)
class BetaSchedule:
    """Parameters of the exploration schedule.

    ``d`` is the dimension of the space the surrogate lives in (the
    subspace size for dropout runs, the full dimension otherwise).
    """

    d: int
    delta: float = 0.1
    a: float = 1.0
    b: float = 1.0
    r: float = 1.0
    multiplier: float = 1.0

    def __post_init__(self):
        if self.d < 1:
            raise ValueError(f"d must be >= 1, got {self.d}")
        if not (0.0 < self.delta < 1.0):
            raise ValueError(f"delta must be in (0, 1), got {self.delta}")
        for name in ("a", "b", "r", "multiplier"):
            val = getattr(self, name)
            if not (val > 0.0):
                raise ValueError(f"{name} must be > 0, got {val}")
        if 4.0 * self.d * self.a / self.delta <= 1.0:
            raise ValueError(
                "invalid schedule: 4*d*a/delta must exceed 1 for the inner "
                f"logarithm, got {4.0 * self.d * self.a / self.delta}"
            )


def beta_d(t: int, sched: BetaSchedule) -> float:
    """Exploration coefficient at iteration t (>= 1); increasing in t."""
    if t < 1:
        raise ValueError(f"t must be >= 1, got {t}")
    pi_t = math.pi**2 * t * t / 6.0
    inner = math.sqrt(math.log(4.0 * sched.d * sched.a / sched.delta))
    raw = 2.0 * math.log(4.0 * pi_t / sched.delta) + 2.0 * sched.d * math.log(
        sched.d * t * t * sched.b * sched.r * inner
    )
    return sched.multiplier * raw


def ucb_from_moments(mean, variance, beta: float):
    """mean + sqrt(beta) * std; works on scalars or arrays."""
    if beta < 0.0:
        raise ValueError(f"beta must be >= 0, got {beta}")
    return mean + math.sqrt(beta) * np.sqrt(np.maximum(variance, 0.0))


def ucb_value(gp: GpPosterior, x, beta: float) -> float:
    """GP-UCB acquisition at a point."""
    mean, var = gp.mean_var(x)
    return float(ucb_from_moments(mean, var, beta))


def ei_from_moments(mean: float, sigma: float, best: float) -> float:
    """Closed-form expected improvement over ``best`` (maximization)."""
    if not math.isfinite(best):
        raise ValueError(f"best must be finite, got {best}")
    if sigma <= 0.0:
        return max(0.0, mean - best)
    z = (mean - best) / sigma
    return float((mean - best) * norm.cdf(z) + sigma * norm.pdf(z))


def ei_value(gp: GpPosterior, x, best: float) -> float:
    """Expected improvement of the GP at a point, relative to ``best``."""
    mean, var = gp.mean_var(x)
    return ei_from_moments(mean, math.sqrt(var), best)
