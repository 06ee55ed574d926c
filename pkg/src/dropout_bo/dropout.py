"""Dimension-dropout Bayesian optimization loop.

Each iteration: pick d of the D axes at random, fit a GP to the full
history projected onto those axes, maximize the subspace UCB with
DIRECT, and fill the left-out axes by one of three strategies:

* random - fresh uniform draws over their intervals,
* copy   - values copied from the best point found so far,
* mix    - one Bernoulli(p) per iteration choosing random (success)
           or copy for the whole left-out block.

The RNG stream order per iteration is fixed: (1) dimension selection,
(2) the mix Bernoulli, (3) the uniform fill-in draws.  The Bernoulli and
the uniforms are drawn for every strategy (and discarded when unused) so
that mix with p=0 reproduces copy, and p=1 reproduces random, bit for
bit under a shared seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import direct
from .acquisition import BetaSchedule, beta_d, ucb_from_moments
from .direct import DirectConfig
from .kernels_gp import BoxDomain, KernelParams, fit


class ObjectiveError(RuntimeError):
    """Objective returned a non-finite value; carries the query point."""

    def __init__(self, message: str, x: np.ndarray):
        super().__init__(message)
        self.x = np.array(x)


@dataclass(frozen=True)
class SubspaceSelection:
    """Sorted chosen axes and their complement; together all of 0..D-1."""

    chosen: np.ndarray
    complement: np.ndarray

    @property
    def n_chosen(self) -> int:
        return self.chosen.size


@dataclass(frozen=True)
class FillInStrategy:
    """Fill-in rule for the left-out axes.

    ``kind`` is one of "random", "copy", "mix"; ``p`` is the mix
    probability of taking the random branch (random behaves as p=1 and
    copy as p=0 so all three share one code path).
    """

    kind: str
    p: float = 0.0

    def __post_init__(self):
        if self.kind not in ("random", "copy", "mix"):
            raise ValueError(f"unknown fill-in strategy {self.kind!r}")
        if not (0.0 <= self.p <= 1.0):
            raise ValueError(f"mix probability must be in [0, 1], got {self.p}")

    @property
    def effective_p(self) -> float:
        if self.kind == "random":
            return 1.0
        if self.kind == "copy":
            return 0.0
        return self.p


RANDOM_FILL = FillInStrategy("random")
COPY_FILL = FillInStrategy("copy")


def mix_fill(p: float) -> FillInStrategy:
    return FillInStrategy("mix", p)


@dataclass(frozen=True)
class DropoutConfig:
    """Settings for one optimization run."""

    d: int
    strategy: FillInStrategy = COPY_FILL
    beta: BetaSchedule | None = None
    kernel: KernelParams = field(default_factory=KernelParams)
    noise: float = 1e-6
    n_init: int | None = None
    direct: DirectConfig | None = None
    seed: int = 0

    def __post_init__(self):
        if self.d < 1:
            raise ValueError(f"d must be >= 1, got {self.d}")
        if self.beta is None:
            object.__setattr__(self, "beta", BetaSchedule(d=self.d))
        if self.n_init is None:
            object.__setattr__(self, "n_init", self.d + 1)
        if self.n_init < 1:
            raise ValueError(f"n_init must be >= 1, got {self.n_init}")
        if self.direct is None:
            object.__setattr__(self, "direct", DirectConfig(max_evals=2000 * self.d))
        if not (self.noise >= 0.0):
            raise ValueError(f"noise must be >= 0, got {self.noise}")


class OptState:
    """Append-only run history with best-so-far tracking (maximization).

    Ties for the best value keep the earliest observation.
    """

    def __init__(self, domain: BoxDomain):
        self.domain = domain
        self._x: list[np.ndarray] = []
        self._y: list[float] = []
        self.best_index = -1
        self.t = 0  # completed loop iterations (init points excluded)

    @property
    def n_obs(self) -> int:
        return len(self._y)

    @property
    def X(self) -> np.ndarray:
        return np.array(self._x, dtype=np.float64).reshape(len(self._x), -1)

    @property
    def y(self) -> np.ndarray:
        return np.array(self._y, dtype=np.float64)

    @property
    def best_x(self) -> np.ndarray:
        return self._x[self.best_index]

    @property
    def best_y(self) -> float:
        return self._y[self.best_index]

    def append(self, x, y: float) -> None:
        x = np.ascontiguousarray(x, dtype=np.float64)
        if not self.domain.contains(x, atol=1e-12):
            raise ValueError(f"point {x} lies outside the domain")
        self._x.append(x)
        self._y.append(float(y))
        if self.best_index < 0 or y > self._y[self.best_index]:
            self.best_index = len(self._y) - 1


@dataclass(frozen=True)
class RunRecord:
    """Per-observation log of one run, in evaluation order.

    ``iterations`` is -n_init..-1 for the initial design, then 1..T for
    the loop; ``best_so_far`` is the running best in the record's sense
    ("max" internally; the harness flips minimization results back).
    """

    seed: int
    n_init: int
    iterations: np.ndarray
    X: np.ndarray
    y: np.ndarray
    best_so_far: np.ndarray
    sense: str = "max"
    algorithm: str = ""
    objective_name: str = ""

    def __post_init__(self):
        for arr in (self.iterations, self.X, self.y, self.best_so_far):
            arr.setflags(write=False)

    @property
    def final_best(self) -> float:
        return float(self.best_so_far[-1])


def select_dimensions(D: int, d: int, rng: np.random.Generator) -> SubspaceSelection:
    """Uniformly choose d of D axes without replacement, sorted."""
    if not 1 <= d <= D:
        raise ValueError(f"need 1 <= d <= D, got d={d}, D={D}")
    chosen = np.sort(rng.choice(D, size=d, replace=False))
    mask = np.ones(D, dtype=bool)
    mask[chosen] = False
    return SubspaceSelection(chosen, np.flatnonzero(mask))


def project_history(state: OptState, sel: SubspaceSelection):
    """History restricted to the chosen axes: (inputs, targets)."""
    if state.n_obs == 0:
        raise ValueError("cannot project an empty history")
    return state.X[:, sel.chosen], state.y


def propose_subspace_point(
    state: OptState,
    sel: SubspaceSelection,
    domain: BoxDomain,
    config: DropoutConfig,
    t: int,
) -> np.ndarray:
    """Maximize the subspace UCB over the chosen axes' box via DIRECT."""
    inputs, targets = project_history(state, sel)
    gp = fit(inputs, targets, config.kernel, config.noise)
    beta = beta_d(t, config.beta)

    def acq(batch):
        mean, var = gp.mean_var_batch(batch)
        return ucb_from_moments(mean, var, beta)

    res = direct.maximize(acq, domain.subset(sel.chosen), config.direct, vectorized=True)
    return res.argmax


def fill_in(
    sel: SubspaceSelection,
    state: OptState,
    domain: BoxDomain,
    strategy: FillInStrategy,
    rng: np.random.Generator,
) -> np.ndarray:
    """Values for the left-out axes.

    Always consumes one Bernoulli and one uniform draw per left-out axis,
    regardless of the branch taken (see module docstring).
    """
    comp = sel.complement
    use_random = rng.random() < strategy.effective_p
    draws = rng.uniform(domain.lower[comp], domain.upper[comp])
    if use_random:
        return np.atleast_1d(draws)
    if state.n_obs == 0:
        raise ValueError("copy fill-in requires at least one observation")
    return state.best_x[comp].copy()


def step(
    state: OptState,
    domain: BoxDomain,
    config: DropoutConfig,
    rng: np.random.Generator,
) -> tuple[np.ndarray, SubspaceSelection]:
    """One iteration of the loop: the next point to query (not yet appended)."""
    if state.n_obs == 0:
        raise ValueError("step requires an initialized history")
    t = state.t + 1
    sel = select_dimensions(domain.dim, config.d, rng)
    proposal = propose_subspace_point(state, sel, domain, config, t)
    filled = fill_in(sel, state, domain, config.strategy, rng)
    x = np.empty(domain.dim)
    x[sel.chosen] = proposal
    x[sel.complement] = filled
    return x, sel


def _query(objective, x: np.ndarray) -> float:
    y = float(objective(x))
    if not math.isfinite(y):
        raise ObjectiveError(f"objective returned {y} at {x}", x)
    return y


def initial_design(
    domain: BoxDomain, n_init: int, rng: np.random.Generator
) -> np.ndarray:
    """Uniform full-dimensional starting points, one row each."""
    return rng.uniform(domain.lower, domain.upper, size=(n_init, domain.dim))


def _make_record(state: OptState, seed: int, n_init: int, budget: int) -> RunRecord:
    iters = np.concatenate(
        [np.arange(-n_init, 0, dtype=np.int64), np.arange(1, budget + 1, dtype=np.int64)]
    )
    y = state.y
    return RunRecord(
        seed=seed,
        n_init=n_init,
        iterations=iters,
        X=state.X,
        y=y,
        best_so_far=np.maximum.accumulate(y),
    )


def run(objective, domain: BoxDomain, config: DropoutConfig, budget: int) -> RunRecord:
    """Full optimization run: initial design plus ``budget`` iterations.

    Deterministic given (config.seed, config, objective).  The objective
    is always maximized; negate at the boundary to minimize.
    """
    if budget < 0:
        raise ValueError(f"budget must be >= 0, got {budget}")
    if config.d > domain.dim:
        raise ValueError(f"d={config.d} exceeds domain dimension {domain.dim}")
    rng = np.random.default_rng(config.seed)
    state = OptState(domain)
    for x in initial_design(domain, config.n_init, rng):
        state.append(x, _query(objective, x))
    for t in range(1, budget + 1):
        x, _ = step(state, domain, config, rng)
        state.append(x, _query(objective, x))
        state.t = t
    return _make_record(state, config.seed, config.n_init, budget)


# --- regret diagnostics -------------------------------------------------

@dataclass(frozen=True)
class RegretDiagnostics:
    """Lipschitz bound and the variance inflation it induces."""

    L: float
    sigma_gap: float


def lipschitz_bound(delta: float, a: float, b: float, D: int, d: int) -> float:
    """High-probability derivative bound b * sqrt(log(2 (D-d) a / delta))."""
    arg = 2.0 * (D - d) * a / delta
    if arg <= 1.0:
        raise ValueError(
            f"log argument 2(D-d)a/delta must exceed 1, got {arg} "
            f"(D={D}, d={d}, a={a}, delta={delta})"
        )
    return b * math.sqrt(math.log(arg))


def augmented_sigma(sigma: float, L: float, D: int, d: int, beta: float) -> float:
    """sigma inflated by the left-out-axes gap L (D-d) / sqrt(beta)."""
    if beta <= 0.0:
        raise ValueError(f"beta must be > 0, got {beta}")
    return sigma + L * (D - d) / math.sqrt(beta)


def regret_diagnostics(t: int, sched: BetaSchedule, D: int) -> RegretDiagnostics:
    """Diagnostics at iteration t; the gap vanishes when nothing is dropped."""
    if D == sched.d:
        return RegretDiagnostics(L=0.0, sigma_gap=0.0)
    L = lipschitz_bound(sched.delta, sched.a, sched.b, D, sched.d)
    gap = L * (D - sched.d) / math.sqrt(beta_d(t, sched))
    return RegretDiagnostics(L=L, sigma_gap=gap)


def regret_curve(record: RunRecord, f_star: float):
    """Instantaneous and cumulative regret against a known optimum.

    Maximization orientation: requires f_star >= every observed value.
    """
    y = record.y
    if np.any(y > f_star):
        raise ValueError(
            f"observed value {y.max()} exceeds the claimed optimum {f_star}"
        )
    inst = f_star - y
    return inst, np.cumsum(inst)
