"""Experiment configuration, replication driver, and CSV emission.

Config files are flat ``key = value`` text with ``#`` comments; keys are
the :class:`ExperimentConfig` field names.  Replication i runs with seed
``base_seed + i``; replications are fully independent, so results do not
depend on execution order.  Minimization objectives are negated before
entering the core (which always maximizes) and negated back here.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from . import baselines, dropout
from .acquisition import BetaSchedule
from .direct import DirectConfig
from .dropout import COPY_FILL, RANDOM_FILL, DropoutConfig, RunRecord, mix_fill
from .kernels_gp import KernelParams
from .objectives import ObjectiveSpec, make_objective


class ConfigError(ValueError):
    """Invalid experiment configuration (exit code 1 from the CLI)."""


@dataclass
class ExperimentConfig:
    """Flat description of one experiment (one algorithm, one objective)."""

    objective: str = ""
    algorithm: str = ""
    name: str = ""
    dimension: int | None = None
    subspace: int = 1
    mix_p: float = 0.1
    iterations: int = 100
    replications: int = 20
    base_seed: int = 0
    lengthscale: float = 0.1
    signal_variance: float = 1.0
    noise: float = 1e-6
    beta_delta: float = 0.1
    beta_a: float = 1.0
    beta_b: float = 1.0
    beta_r: float = 1.0
    beta_multiplier: float = 1.0
    n_init: int | None = None
    direct_evals: int | None = None
    direct_eps: float = 1e-4
    output: str = "runs.csv"
    # objective parameters
    mixture_mu1: float = 2.0
    mixture_mu2: float = 3.0
    mixture_lower: float = 1.0
    mixture_upper: float = 4.0
    dataset: str | None = None
    label_column: int = 0
    positive_label: float = 1.0
    cascade_rows: int = 200
    cascade_features: int = 20
    dataset_seed: int = 0

    def __post_init__(self):
        if self.replications < 1:
            raise ConfigError(f"replications must be >= 1, got {self.replications}")
        if self.iterations < 0:
            raise ConfigError(f"iterations must be >= 0, got {self.iterations}")
        if not self.name:
            self.name = f"{self.objective}/{self.algorithm}"

    @property
    def effective_n_init(self) -> int:
        return self.n_init if self.n_init is not None else self.subspace + 1


_OPTIONAL_INT = {"dimension", "n_init", "direct_evals"}


def parse_config(path: str, overrides: dict | None = None) -> ExperimentConfig:
    """Read a flat key=value config file into an ExperimentConfig."""
    field_types = {f.name: f.type for f in dataclasses.fields(ExperimentConfig)}
    values: dict = {}
    with open(path) as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{line_no}: expected 'key = value'")
            key, _, val = line.partition("=")
            key = key.strip()
            val = val.strip()
            if key not in field_types:
                raise ConfigError(f"{path}:{line_no}: unknown key {key!r}")
            values[key] = _coerce(key, val, path, line_no)
    if overrides:
        values.update(overrides)
    try:
        return ExperimentConfig(**values)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def _coerce(key: str, val: str, path: str, line_no: int):
    kind = {
        "objective": str, "algorithm": str, "name": str, "output": str,
        "dataset": str,
        "subspace": int, "iterations": int, "replications": int,
        "base_seed": int, "label_column": int, "cascade_rows": int,
        "cascade_features": int, "dataset_seed": int,
    }.get(key, float)
    if key in _OPTIONAL_INT:
        kind = int
    try:
        return kind(val)
    except ValueError:
        raise ConfigError(
            f"{path}:{line_no}: cannot parse {val!r} for key {key!r}"
        ) from None


def build_objective(cfg: ExperimentConfig) -> ObjectiveSpec:
    name = cfg.objective
    if name == "gaussian-mixture":
        if cfg.dimension is None:
            raise ConfigError("gaussian-mixture requires a 'dimension' setting")
        return make_objective(
            name,
            dimension=cfg.dimension,
            mu1=cfg.mixture_mu1,
            mu2=cfg.mixture_mu2,
            lower=cfg.mixture_lower,
            upper=cfg.mixture_upper,
        )
    if name == "schwefel12":
        if cfg.dimension is None:
            raise ConfigError("schwefel12 requires a 'dimension' setting")
        return make_objective(name, dimension=cfg.dimension)
    if name == "cascade":
        if cfg.dataset is None:
            raise ConfigError("cascade requires a 'dataset' setting")
        return make_objective(
            name,
            dataset=cfg.dataset,
            label_column=cfg.label_column,
            positive_label=cfg.positive_label,
        )
    if name == "cascade-synthetic":
        return make_objective(
            name,
            rows=cfg.cascade_rows,
            features=cfg.cascade_features,
            dataset_seed=cfg.dataset_seed,
        )
    try:
        return make_objective(name)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def _core_config(cfg: ExperimentConfig, d: int, strategy, seed: int) -> DropoutConfig:
    """DropoutConfig for an acquisition space of dimension d."""
    evals = cfg.direct_evals if cfg.direct_evals is not None else 2000 * d
    return DropoutConfig(
        d=d,
        strategy=strategy,
        beta=BetaSchedule(
            d=d,
            delta=cfg.beta_delta,
            a=cfg.beta_a,
            b=cfg.beta_b,
            r=cfg.beta_r,
            multiplier=cfg.beta_multiplier,
        ),
        kernel=KernelParams(cfg.lengthscale, cfg.signal_variance),
        noise=cfg.noise,
        n_init=cfg.effective_n_init,
        direct=DirectConfig(max_evals=evals, epsilon=cfg.direct_eps),
        seed=seed,
    )


def _run_dropout(strategy):
    def runner(objective, domain, cfg, seed):
        config = _core_config(cfg, cfg.subspace, strategy, seed)
        return dropout.run(objective, domain, config, cfg.iterations)

    return runner


def _run_random_search(objective, domain, cfg, seed):
    config = _core_config(cfg, cfg.subspace, COPY_FILL, seed)
    return baselines.run_random_search(objective, domain, config, cfg.iterations)


def _run_full_bo(objective, domain, cfg, seed):
    config = _core_config(cfg, domain.dim, COPY_FILL, seed)
    return baselines.run_full_bo(objective, domain, config, cfg.iterations)


def _run_rembo(objective, domain, cfg, seed):
    config = _core_config(cfg, cfg.subspace, COPY_FILL, seed)
    return baselines.run_rembo(objective, domain, config, cfg.iterations)


def _run_addgp(objective, domain, cfg, seed):
    config = _core_config(cfg, cfg.subspace, COPY_FILL, seed)
    return baselines.run_addgp(objective, domain, config, cfg.iterations)


ALGORITHMS = {
    "dropout-random": _run_dropout(RANDOM_FILL),
    "dropout-copy": _run_dropout(COPY_FILL),
    "dropout-mix": None,  # needs mix_p; bound in run_replication
    "random-search": _run_random_search,
    "full-bo": _run_full_bo,
    "rembo": _run_rembo,
    "addgp": _run_addgp,
}


def _resolve_runner(cfg: ExperimentConfig):
    if cfg.algorithm == "dropout-mix":
        return _run_dropout(mix_fill(cfg.mix_p))
    runner = ALGORITHMS.get(cfg.algorithm)
    if runner is None:
        known = ", ".join(sorted(ALGORITHMS))
        raise ConfigError(f"unknown algorithm {cfg.algorithm!r}; available: {known}")
    return runner


def run_replication(cfg: ExperimentConfig, spec: ObjectiveSpec, seed: int) -> RunRecord:
    """One seeded run, reported in the objective's native sense."""
    minimize = spec.sense == "minimize"
    fn = spec.fn
    core_objective = (lambda x: -fn(x)) if minimize else fn
    runner = _resolve_runner(cfg)
    rec = runner(core_objective, spec.domain, cfg, seed)
    y = -rec.y if minimize else rec.y
    best = -rec.best_so_far if minimize else rec.best_so_far
    return RunRecord(
        seed=rec.seed,
        n_init=rec.n_init,
        iterations=rec.iterations,
        X=rec.X,
        y=y,
        best_so_far=best,
        sense="min" if minimize else "max",
        algorithm=cfg.algorithm,
        objective_name=cfg.name,
    )


def run_experiment(cfg: ExperimentConfig) -> list[RunRecord]:
    """All replications of one experiment, seeds base_seed + i."""
    spec = build_objective(cfg)
    if cfg.algorithm != "random-search" and not 1 <= cfg.subspace <= spec.dimension:
        raise ConfigError(
            f"subspace {cfg.subspace} invalid for dimension {spec.dimension}"
        )
    return [
        run_replication(cfg, spec, cfg.base_seed + i)
        for i in range(cfg.replications)
    ]


# --- summaries and CSV emission ------------------------------------------

@dataclass(frozen=True)
class SummaryCurve:
    """Pointwise mean and standard error of best-so-far across runs."""

    iterations: np.ndarray
    mean: np.ndarray
    stderr: np.ndarray
    n_runs: int

    def __post_init__(self):
        for arr in (self.iterations, self.mean, self.stderr):
            arr.setflags(write=False)


def summarize(records: list[RunRecord]) -> SummaryCurve:
    """Cross-replication mean and stderr (sample std / sqrt(n))."""
    if not records:
        raise ValueError("summarize requires at least one record")
    length = records[0].best_so_far.size
    for rec in records[1:]:
        if rec.best_so_far.size != length:
            raise ValueError("records have mismatched lengths")
    best = np.stack([rec.best_so_far for rec in records])
    mean = best.mean(axis=0)
    if len(records) == 1:
        stderr = np.zeros(length)
    else:
        stderr = best.std(axis=0, ddof=1) / np.sqrt(len(records))
    return SummaryCurve(records[0].iterations.copy(), mean, stderr, len(records))


def _fmt(v: float) -> str:
    return repr(float(v))


def points_path(path: str) -> str:
    """Sibling file holding full point coordinates."""
    return (path[: -len(".csv")] if path.endswith(".csv") else path) + ".points.csv"


def emit_runs_csv(records: list[RunRecord], path: str) -> None:
    """Write per-iteration rows plus the sibling ...points.csv file."""
    with open(path, "w", newline="") as fh:
        fh.write("experiment,algorithm,seed,iteration,y,best_so_far\n")
        for rec in records:
            for k in range(rec.y.size):
                fh.write(
                    f"{rec.objective_name},{rec.algorithm},{rec.seed},"
                    f"{rec.iterations[k]},{_fmt(rec.y[k])},{_fmt(rec.best_so_far[k])}\n"
                )
    with open(points_path(path), "w", newline="") as fh:
        dim = records[0].X.shape[1] if records else 0
        cols = ",".join(f"x{i}" for i in range(dim))
        fh.write(f"seed,iteration{',' if cols else ''}{cols}\n")
        for rec in records:
            for k in range(rec.y.size):
                coords = ",".join(_fmt(v) for v in rec.X[k])
                fh.write(f"{rec.seed},{rec.iterations[k]},{coords}\n")


def emit_summary_csv(curve: SummaryCurve, path: str) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("iteration,mean,stderr\n")
        for k in range(curve.mean.size):
            fh.write(
                f"{curve.iterations[k]},{_fmt(curve.mean[k])},{_fmt(curve.stderr[k])}\n"
            )


def emit_csv(data, path: str) -> None:
    """Write either a record list or a summary curve to CSV."""
    if isinstance(data, SummaryCurve):
        emit_summary_csv(data, path)
    else:
        emit_runs_csv(list(data), path)


def emit_plot_data(curves: dict[str, SummaryCurve], path: str) -> None:
    """Joint column data: iteration, then (mean, stderr) per named curve."""
    if not curves:
        raise ValueError("emit_plot_data requires at least one curve")
    items = list(curves.items())
    length = items[0][1].mean.size
    for name, curve in items:
        if curve.mean.size != length:
            raise ValueError(f"curve {name!r} has mismatched length")
    header = ["iteration"]
    for name, _ in items:
        header += [f"mean_{name}", f"stderr_{name}"]
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        iters = items[0][1].iterations
        for k in range(length):
            row = [str(iters[k])]
            for _, curve in items:
                row += [_fmt(curve.mean[k]), _fmt(curve.stderr[k])]
            fh.write(",".join(row) + "\n")
