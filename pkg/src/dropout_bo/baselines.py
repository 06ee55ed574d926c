"""Comparison methods: random search, full-dimensional BO, REMBO, Add-GP.

All baselines share the kernel, noise, exploration schedule, initial
design, and DIRECT budget with the dropout loop, and consume exactly one
objective evaluation per iteration, so curve comparisons isolate the
search strategy.
"""

from __future__ import annotations

from dataclasses import replace

import numpy as np

from . import direct
from .acquisition import BetaSchedule, beta_d, ucb_from_moments
from .dropout import (
    DropoutConfig,
    OptState,
    RunRecord,
    _make_record,
    _query,
    initial_design,
    run as dropout_run,
    step as dropout_step,
)
from .kernels_gp import BoxDomain, fit


def random_search_step(domain: BoxDomain, rng: np.random.Generator) -> np.ndarray:
    """One uniform sample over the box."""
    return rng.uniform(domain.lower, domain.upper)


def run_random_search(objective, domain, config: DropoutConfig, budget: int) -> RunRecord:
    rng = np.random.default_rng(config.seed)
    state = OptState(domain)
    for x in initial_design(domain, config.n_init, rng):
        state.append(x, _query(objective, x))
    for t in range(1, budget + 1):
        x = random_search_step(domain, rng)
        state.append(x, _query(objective, x))
        state.t = t
    return _make_record(state, config.seed, config.n_init, budget)


def full_bo_config(config: DropoutConfig, D: int) -> DropoutConfig:
    """The dropout config with nothing dropped: d = D, matching schedule."""
    return replace(config, d=D, beta=replace(config.beta, d=D))


def full_bo_step(state, domain, config: DropoutConfig, rng) -> np.ndarray:
    """Identical to the dropout step with d = D (shared code path)."""
    x, _ = dropout_step(state, domain, full_bo_config(config, domain.dim), rng)
    return x


def run_full_bo(objective, domain, config: DropoutConfig, budget: int) -> RunRecord:
    return dropout_run(objective, domain, full_bo_config(config, domain.dim), budget)


# --- REMBO ---------------------------------------------------------------

def make_embedding(D: int, d: int, rng: np.random.Generator) -> np.ndarray:
    """Frozen D x d embedding with i.i.d. standard-normal entries."""
    return rng.standard_normal((D, d))


def rembo_low_box(d: int) -> BoxDomain:
    r = np.sqrt(d)
    return BoxDomain(np.full(d, -r), np.full(d, r))


def rembo_map(embedding: np.ndarray, y_low: np.ndarray, domain: BoxDomain) -> np.ndarray:
    """Embed a low-dimensional point into the domain.

    The domain is treated as a centered [-1, 1]^D cube: A @ y is clipped
    coordinatewise there and mapped back affinely, so the result always
    lies inside the domain.
    """
    centered = np.clip(embedding @ y_low, -1.0, 1.0)
    mid = 0.5 * (domain.lower + domain.upper)
    return mid + 0.5 * domain.width * centered


def rembo_step(
    low_inputs: np.ndarray,
    values: np.ndarray,
    embedding: np.ndarray,
    domain: BoxDomain,
    config: DropoutConfig,
    t: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Next low-dimensional query and its embedded point."""
    gp = fit(low_inputs, values, config.kernel, config.noise)
    beta = beta_d(t, config.beta)

    def acq(batch):
        mean, var = gp.mean_var_batch(batch)
        return ucb_from_moments(mean, var, beta)

    res = direct.maximize(acq, rembo_low_box(embedding.shape[1]), config.direct,
                          vectorized=True)
    return res.argmax, rembo_map(embedding, res.argmax, domain)


def run_rembo(objective, domain, config: DropoutConfig, budget: int) -> RunRecord:
    """BO in a random d-dimensional linear embedding of the domain."""
    rng = np.random.default_rng(config.seed)
    embedding = make_embedding(domain.dim, config.d, rng)
    low_box = rembo_low_box(config.d)
    state = OptState(domain)
    low_points: list[np.ndarray] = []
    for y_low in initial_design(low_box, config.n_init, rng):
        x = rembo_map(embedding, y_low, domain)
        state.append(x, _query(objective, x))
        low_points.append(y_low)
    for t in range(1, budget + 1):
        y_low, x = rembo_step(
            np.array(low_points), state.y, embedding, domain, config, t
        )
        state.append(x, _query(objective, x))
        low_points.append(y_low)
        state.t = t
    return _make_record(state, config.seed, config.n_init, budget)


# --- additive decomposition ---------------------------------------------

def make_partition(D: int, d: int, rng: np.random.Generator) -> list[np.ndarray]:
    """Random disjoint axis groups of size <= d covering 0..D-1."""
    if not 1 <= d <= D:
        raise ValueError(f"need 1 <= d <= D, got d={d}, D={D}")
    perm = rng.permutation(D)
    return [np.sort(perm[i : i + d]) for i in range(0, D, d)]


def addgp_step(
    state: OptState,
    partition: list[np.ndarray],
    domain: BoxDomain,
    config: DropoutConfig,
    t: int,
) -> np.ndarray:
    """Concatenation of each group's independent UCB maximizer.

    Each group gets its own GP on the group's coordinates against the
    full observed values, with the schedule's d set to the group size;
    with a single all-axes group this reduces to the full-BO step.
    """
    x = np.empty(domain.dim)
    for group in partition:
        gp = fit(state.X[:, group], state.y, config.kernel, config.noise)
        beta = beta_d(t, replace(config.beta, d=group.size))

        def acq(batch, gp=gp, beta=beta):
            mean, var = gp.mean_var_batch(batch)
            return ucb_from_moments(mean, var, beta)

        res = direct.maximize(acq, domain.subset(group), config.direct,
                              vectorized=True)
        x[group] = res.argmax
    return x


def run_addgp(objective, domain, config: DropoutConfig, budget: int) -> RunRecord:
    """BO with independently optimized random axis groups."""
    rng = np.random.default_rng(config.seed)
    partition = make_partition(domain.dim, config.d, rng)
    state = OptState(domain)
    for x in initial_design(domain, config.n_init, rng):
        state.append(x, _query(objective, x))
    for t in range(1, budget + 1):
        x = addgp_step(state, partition, domain, config, t)
        state.append(x, _query(objective, x))
        state.t = t
    return _make_record(state, config.seed, config.n_init, budget)
