"""Benchmark objectives: Gaussian mixture, Schwefel 1.2, stump cascade.

The registry maps names to fully-configured objective specs so the
harness can resolve them from config files.  All objectives are pure
functions of the query point.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .kernels_gp import BoxDomain

_EPS_CLAMP = 1e-10

# Stump vote assignments (above-threshold vote, below-threshold vote)
# searched at each boosting stage, in tie-break order.  The two constant
# stumps let a stage vote unanimously when that minimizes weighted error.
_STUMP_CANDIDATES = ((1, -1), (-1, 1), (1, 1), (-1, -1))


@dataclass(frozen=True)
class ObjectiveSpec:
    """A named objective with its domain and optimization sense."""

    name: str
    dimension: int
    domain: BoxDomain
    sense: str  # "maximize" | "minimize"
    fn: callable
    known_optimum: tuple[np.ndarray, float] | None = None

    def __post_init__(self):
        if self.sense not in ("maximize", "minimize"):
            raise ValueError(f"sense must be maximize|minimize, got {self.sense}")
        if self.known_optimum is not None:
            x_star, _ = self.known_optimum
            if not self.domain.contains(x_star):
                raise ValueError("known optimum lies outside the domain")


@dataclass(frozen=True)
class DatasetTable:
    """Feature rows scaled to [0,1] with labels in {-1, +1}."""

    features: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        f = np.ascontiguousarray(self.features, dtype=np.float64)
        lab = np.ascontiguousarray(self.labels, dtype=np.int64)
        if f.ndim != 2 or f.shape[0] == 0:
            raise ValueError("features must be a nonempty 2-d array")
        if lab.shape != (f.shape[0],):
            raise ValueError("labels must match the number of rows")
        if f.min() < 0.0 or f.max() > 1.0:
            raise ValueError("features must be scaled into [0, 1]")
        if not np.all(np.isin(lab, (-1, 1))):
            raise ValueError("labels must be -1 or +1")
        f.setflags(write=False)
        lab.setflags(write=False)
        object.__setattr__(self, "features", f)
        object.__setattr__(self, "labels", lab)

    @property
    def n_rows(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]


def gaussian_mixture(x, mu1, mu2) -> float:
    """Two-mode isotropic Gaussian mixture density, second mode at half weight."""
    x = np.asarray(x, dtype=np.float64)
    m1 = np.asarray(mu1, dtype=np.float64)
    m2 = np.asarray(mu2, dtype=np.float64)
    if x.shape != m1.shape or x.shape != m2.shape:
        raise ValueError(
            f"dimension mismatch: x{x.shape}, mu1{m1.shape}, mu2{m2.shape}"
        )
    norm = (2.0 * np.pi) ** (-x.size / 2.0)
    q1 = float(np.sum((x - m1) ** 2))
    q2 = float(np.sum((x - m2) ** 2))
    return norm * (np.exp(-0.5 * q1) + 0.5 * np.exp(-0.5 * q2))


def schwefel12(x) -> float:
    """Schwefel 1.2: sum over j of the squared prefix sum x_1 + .. + x_j."""
    x = np.asarray(x, dtype=np.float64)
    prefix = np.cumsum(x)
    return float(np.sum(prefix * prefix))


def cascade_accuracy(thresholds, data: DatasetTable) -> float:
    """Training accuracy of a boosted decision-stump cascade.

    Stage j is a stump on feature j at thresholds[j]; its vote pair over
    {above, below} (strictly above the threshold counts as above) is the
    first of ``_STUMP_CANDIDATES`` minimizing the current weighted error.
    Stage weight is 0.5*log((1-eps)/eps) with eps clamped away from 0 and
    1; instance weights update multiplicatively and renormalize.  A row is
    counted correct when the sign of the weighted vote sum (zero counts
    as +1) matches its label.
    """
    if data.n_rows == 0:
        raise ValueError("empty dataset")
    thr = np.asarray(thresholds, dtype=np.float64)
    if thr.shape != (data.n_features,):
        raise ValueError(
            f"need one threshold per feature ({data.n_features}), got {thr.shape}"
        )
    F, y = data.features, data.labels
    n = data.n_rows
    w = np.full(n, 1.0 / n)
    score = np.zeros(n)
    for j in range(data.n_features):
        above = F[:, j] > thr[j]
        best_err = np.inf
        best_pred = None
        for up, down in _STUMP_CANDIDATES:
            pred = np.where(above, up, down)
            err = float(w[pred != y].sum())
            if err < best_err:
                best_err = err
                best_pred = pred
        eps = min(max(best_err, _EPS_CLAMP), 1.0 - _EPS_CLAMP)
        alpha = 0.5 * np.log((1.0 - eps) / eps)
        score += alpha * best_pred
        w = w * np.exp(-alpha * y * best_pred)
        w /= w.sum()
    voted = np.where(score >= 0.0, 1, -1)
    return float(np.mean(voted == y))


def make_separable_dataset(rows: int = 200, features: int = 20, seed: int = 0) -> DatasetTable:
    """Synthetic stump-separable classification data.

    Labels are a deterministic weighted vote of three planted stumps
    (weights 2, 2, 1 on features 0-2; the odd total weight rules out
    ties), so the classes are separable by a stump ensemble on the first
    three features.  The remaining features are pure noise.
    """
    if rows < 1 or features < 3:
        raise ValueError("need rows >= 1 and features >= 3")
    rng = np.random.default_rng(seed)
    F = rng.random((rows, features))
    cuts = (0.55, 0.45, 0.65)
    votes = [np.where(F[:, j] > c, 1, -1) for j, c in enumerate(cuts)]
    total = 2 * votes[0] + 2 * votes[1] + votes[2]
    labels = np.where(total > 0, 1, -1)
    return DatasetTable(F, labels)


def _parse_float(token: str, path: str, line_no: int) -> float:
    try:
        return float(token)
    except ValueError:
        raise ValueError(
            f"{path}:{line_no}: cannot parse {token!r} as a number"
        ) from None


def load_dataset(path: str, label_column: int, positive_label: float) -> DatasetTable:
    """Read comma-separated numeric rows into a scaled DatasetTable.

    A non-numeric first line is treated as a header and skipped.  Each
    feature column is mapped affinely onto [0,1] by its min/max over the
    file; constant columns map to 0.5.  The label column maps to +1 when
    equal to ``positive_label``; at most one other raw label value is
    allowed and maps to -1.
    """
    with open(path, newline="") as fh:
        raw_rows = [(i + 1, row) for i, row in enumerate(csv.reader(fh)) if row]
    if not raw_rows:
        raise ValueError(f"{path}: no data rows")
    first_no, first = raw_rows[0]
    try:
        [float(tok) for tok in first]
    except ValueError:
        raw_rows = raw_rows[1:]
        if not raw_rows:
            raise ValueError(f"{path}: header but no data rows") from None

    width = len(raw_rows[0][1])
    values = np.empty((len(raw_rows), width))
    for r, (line_no, row) in enumerate(raw_rows):
        if len(row) != width:
            raise ValueError(
                f"{path}:{line_no}: expected {width} columns, found {len(row)}"
            )
        for c, tok in enumerate(row):
            values[r, c] = _parse_float(tok.strip(), path, line_no)

    if not -width <= label_column < width:
        raise ValueError(f"label column {label_column} out of range for {width} columns")
    label_column %= width
    raw_labels = values[:, label_column]
    feats = np.delete(values, label_column, axis=1)
    if feats.shape[1] == 0:
        raise ValueError(f"{path}: no feature columns besides the label")

    distinct = np.unique(raw_labels)
    others = distinct[distinct != positive_label]
    if others.size > 1:
        raise ValueError(
            f"{path}: expected at most two label values, found {distinct.tolist()}"
        )
    labels = np.where(raw_labels == positive_label, 1, -1)

    lo = feats.min(axis=0)
    hi = feats.max(axis=0)
    span = hi - lo
    constant = span == 0.0
    span[constant] = 1.0
    scaled = (feats - lo) / span
    scaled[:, constant] = 0.5
    return DatasetTable(scaled, labels)


def _mixture_spec(dimension, mu1=2.0, mu2=3.0, lower=1.0, upper=4.0) -> ObjectiveSpec:
    dimension = int(dimension)
    m1 = np.full(dimension, float(mu1))
    m2 = np.full(dimension, float(mu2))
    domain = BoxDomain(np.full(dimension, float(lower)), np.full(dimension, float(upper)))

    def fn(x):
        return gaussian_mixture(x, m1, m2)

    return ObjectiveSpec("gaussian-mixture", dimension, domain, "maximize", fn)


def _schwefel_spec(dimension) -> ObjectiveSpec:
    dimension = int(dimension)
    domain = BoxDomain(np.full(dimension, -1.0), np.full(dimension, 1.0))
    return ObjectiveSpec(
        "schwefel12",
        dimension,
        domain,
        "minimize",
        schwefel12,
        known_optimum=(np.zeros(dimension), 0.0),
    )


def _cascade_spec_from_table(name: str, table: DatasetTable) -> ObjectiveSpec:
    m = table.n_features
    domain = BoxDomain(np.zeros(m), np.ones(m))

    def fn(thresholds):
        return cascade_accuracy(thresholds, table)

    return ObjectiveSpec(name, m, domain, "maximize", fn)


def _cascade_spec(dataset, label_column=0, positive_label=1.0) -> ObjectiveSpec:
    table = load_dataset(dataset, int(label_column), float(positive_label))
    return _cascade_spec_from_table("cascade", table)


def _cascade_synthetic_spec(rows=200, features=20, dataset_seed=0) -> ObjectiveSpec:
    table = make_separable_dataset(int(rows), int(features), int(dataset_seed))
    return _cascade_spec_from_table("cascade-synthetic", table)


OBJECTIVES = {
    "gaussian-mixture": _mixture_spec,
    "schwefel12": _schwefel_spec,
    "cascade": _cascade_spec,
    "cascade-synthetic": _cascade_synthetic_spec,
}


def make_objective(name: str, **params) -> ObjectiveSpec:
    """Build a registered objective; unknown names list the registry."""
    try:
        builder = OBJECTIVES[name]
    except KeyError:
        known = ", ".join(sorted(OBJECTIVES))
        raise ValueError(f"unknown objective {name!r}; available: {known}") from None
    return builder(**params)
