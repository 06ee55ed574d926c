"""DIRECT (DIviding RECTangles) derivative-free global maximization.

Classic Jones-Perttunen-Stuckman scheme over a box: normalize to the unit
cube, keep a partition of hyperrectangles identified by their center and
integer side levels (side length along axis i is 3**-levels[i]), select
the potentially-optimal rectangles on the upper-right hull of the
(size, value) cloud, and trisect each along all of its longest sides.

Maximization is implemented by negating the standard minimization
formulation.  Everything is deterministic: ties between rectangles of
equal size and value go to the lowest creation index, and tied split
dimensions are processed in ascending axis order.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .kernels_gp import BoxDomain


@dataclass(frozen=True, eq=False)
class DirectRect:
    """A partition cell: center in the unit cube, per-axis side levels."""

    center: np.ndarray
    side_levels: np.ndarray
    value: float

    @property
    def size(self) -> float:
        """Half the cell diagonal."""
        return rect_size(self.side_levels)


@dataclass(frozen=True)
class DirectConfig:
    max_evals: int
    max_iters: int = 10**9
    epsilon: float = 1e-4

    def __post_init__(self):
        if self.max_evals < 1:
            raise ValueError(f"max_evals must be >= 1, got {self.max_evals}")
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")
        if self.epsilon < 0.0:
            raise ValueError(f"epsilon must be >= 0, got {self.epsilon}")


class DirectResult(NamedTuple):
    argmax: np.ndarray
    max_value: float
    evals_used: int


def rect_size(side_levels) -> float:
    lengths = 3.0 ** (-np.asarray(side_levels, dtype=np.float64))
    return 0.5 * float(np.sqrt(np.sum(lengths * lengths)))


def potentially_optimal(sizes, values, best_value: float, epsilon: float) -> list[int]:
    """Indices of the potentially-optimal size classes (maximization).

    ``sizes``/``values`` hold one entry per size class, the value being
    the best (maximum) over that class.  Selected are the classes on the
    upper-right convex hull of (size, value) that promise an improvement
    of at least ``epsilon * |best_value|`` for some positive slope; the
    largest class is always selected.
    """
    sizes = np.asarray(sizes, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    order = np.argsort(sizes, kind="stable")
    picked = _potentially_optimal_min(
        sizes[order], -values[order], -best_value, epsilon
    )
    return sorted(int(order[i]) for i in picked)


def _potentially_optimal_min(sizes, gvals, gbest, epsilon):
    """Hull selection in minimization orientation; sizes ascending."""
    sizes = [float(s) for s in sizes]
    gvals = [float(g) for g in gvals]
    n = len(sizes)
    inf = float("inf")
    out = []
    for j in range(n):
        k_low = -inf
        for i in range(j):
            k_low = max(k_low, (gvals[j] - gvals[i]) / (sizes[j] - sizes[i]))
        k_hi = inf
        for i in range(j + 1, n):
            k_hi = min(k_hi, (gvals[i] - gvals[j]) / (sizes[i] - sizes[j]))
        if k_hi < k_low or k_hi < 0.0:
            continue
        if k_hi == inf:
            out.append(j)
        elif gvals[j] - k_hi * sizes[j] <= gbest - epsilon * abs(gbest):
            out.append(j)
    return out


def _order_split_dims(dims, w):
    """Split dimensions ordered best child first; ties by axis index."""
    return dims[np.argsort(w, kind="stable")]


def _assemble_children(center, levels, parent_g, dims, g_minus, g_plus, delta):
    """Child cells of one trisection, in creation order (minimization).

    The dimension whose best child value is lowest is split first so its
    children keep the largest cells; the parent's center survives as the
    final cell with all split dimensions incremented.
    """
    w = np.minimum(g_minus, g_plus)
    ordered = _order_split_dims(dims, w)
    pos = {int(d): k for k, d in enumerate(dims)}
    cur = levels.copy()
    children = []
    for dim in ordered:
        cur[dim] += 1
        snap = cur.copy()
        k = pos[int(dim)]
        lo = center.copy()
        lo[dim] -= delta
        hi = center.copy()
        hi[dim] += delta
        children.append((lo, snap, g_minus[k]))
        children.append((hi, snap.copy(), g_plus[k]))
    children.append((center.copy(), cur, parent_g))
    return children


def trisect(rect: DirectRect, objective: Callable[[np.ndarray], float]) -> list[DirectRect]:
    """Split a cell along all longest sides, evaluating each new center once.

    ``objective`` maps a unit-cube point to the value being maximized.
    Returns the 2k+1 replacement cells for k longest sides, in creation
    order (the parent-center cell last).
    """
    levels = np.asarray(rect.side_levels, dtype=np.int64)
    lmin = int(levels.min())
    dims = np.flatnonzero(levels == lmin)
    delta = 3.0 ** (-(lmin + 1))
    g_minus = np.empty(dims.size)
    g_plus = np.empty(dims.size)
    for k, dim in enumerate(dims):
        lo = rect.center.copy()
        lo[dim] -= delta
        hi = rect.center.copy()
        hi[dim] += delta
        g_minus[k] = -float(objective(lo))
        g_plus[k] = -float(objective(hi))
    parts = _assemble_children(
        np.asarray(rect.center, dtype=np.float64),
        levels,
        -rect.value,
        dims,
        g_minus,
        g_plus,
        delta,
    )
    return [DirectRect(c, lev, -g) for c, lev, g in parts]


def maximize(
    objective,
    box: BoxDomain,
    config: DirectConfig,
    vectorized: bool = False,
) -> DirectResult:
    """Maximize ``objective`` over ``box`` with at most max_evals calls.

    With ``vectorized=True`` the objective receives a (k, dim) array of
    points and must return k values; otherwise it is called point by
    point.  The best evaluated center is returned, mapped back from the
    unit cube to the box.
    """
    dim = box.dim
    lower, width = box.lower, box.width

    if vectorized:
        raw = objective
    else:
        def raw(X):
            return np.array([objective(x) for x in X], dtype=np.float64)

    def eval_batch(U: np.ndarray) -> np.ndarray:
        X = lower + U * width
        vals = np.asarray(raw(X), dtype=np.float64).reshape(-1)
        if vals.shape[0] != U.shape[0]:
            raise ValueError(
                f"objective returned {vals.shape[0]} values for {U.shape[0]} points"
            )
        finite = np.isfinite(vals)
        if not finite.all():
            bad = int(np.flatnonzero(~finite)[0])
            raise ValueError(
                f"objective returned non-finite value {vals[bad]} at {X[bad]}"
            )
        return -vals  # minimize g = -f internally

    centers: list[np.ndarray] = []
    levels: list[np.ndarray] = []
    gvals: list[float] = []
    alive: list[bool] = []
    # size class -> [class size, heap of (g, index)]
    classes: dict[tuple[int, int], list] = {}
    best = {"g": np.inf, "idx": -1}

    def push(center, lev, g):
        idx = len(centers)
        centers.append(center)
        levels.append(lev)
        gvals.append(g)
        alive.append(True)
        # the (min level, level sum) pair pins the level multiset, hence the size
        key = (int(lev.min()), int(lev.sum()))
        entry = classes.get(key)
        if entry is None:
            entry = [rect_size(lev), []]
            classes[key] = entry
        heapq.heappush(entry[1], (g, idx))
        if g < best["g"]:
            best["g"] = g
            best["idx"] = idx

    root_center = np.full(dim, 0.5)
    g0 = eval_batch(root_center[None, :])[0]
    push(root_center, np.zeros(dim, dtype=np.int64), g0)
    evals = 1

    exhausted = evals >= config.max_evals
    for _ in range(config.max_iters):
        if exhausted:
            break
        # Representative (best alive) rectangle of each size class.
        reps = []
        for key in list(classes):
            size, heap = classes[key]
            while heap and not alive[heap[0][1]]:
                heapq.heappop(heap)
            if not heap:
                del classes[key]
                continue
            reps.append((size, heap[0][0], heap[0][1]))
        if not reps:
            break
        reps.sort()
        sizes = np.array([r[0] for r in reps])
        vals = np.array([r[1] for r in reps])
        chosen = _potentially_optimal_min(sizes, vals, best["g"], config.epsilon)

        progressed = False
        for pos in chosen:
            idx = reps[pos][2]
            lev = levels[idx]
            lmin = int(lev.min())
            dims = np.flatnonzero(lev == lmin)
            need = 2 * dims.size
            if evals + need > config.max_evals:
                exhausted = True
                break
            delta = 3.0 ** (-(lmin + 1))
            cen = centers[idx]
            batch = np.repeat(cen[None, :], need, axis=0)
            for k, d in enumerate(dims):
                batch[2 * k, d] -= delta
                batch[2 * k + 1, d] += delta
            g = eval_batch(batch)
            evals += need
            parts = _assemble_children(
                cen, lev, gvals[idx], dims, g[0::2], g[1::2], delta
            )
            alive[idx] = False
            for c, lv, gv in parts:
                push(c, lv, gv)
            progressed = True
        if not progressed and not exhausted:
            break

    x = lower + centers[best["idx"]] * width
    return DirectResult(x, -best["g"], evals)
