"""Hot numeric kernels with two interchangeable backends.

The inner loops that dominate runtime (Monte Carlo hypervolume counting,
non-dominated sorting, nearest-point distance scans) are jitted with numba.
A pure-numpy implementation of every kernel is kept alongside it and is
selected instead when the environment variable ``LMOMCTS_DISABLE_NUMBA`` is
set to anything other than ``0``/empty, or when numba is not importable.

Both backends are importable at all times (``*_numpy`` / ``*_numba``) so the
test suite can cross-check them and ``benchmarks/bench_kernels.py`` can time
them against each other. The dispatched names (``dominated_count`` etc.) are
bound once at import time.
"""

from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAS_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        return wrap


def numba_disabled_by_env() -> bool:
    return os.environ.get("LMOMCTS_DISABLE_NUMBA", "0") not in ("", "0")


USE_NUMBA = HAS_NUMBA and not numba_disabled_by_env()

# Target element count per temporary block in the numpy fallbacks; keeps the
# broadcast intermediates comfortably inside cache/RAM.
_CHUNK_ELEMS = 4_000_000


# ---------------------------------------------------------------------------
# dominated sample counting (Monte Carlo hypervolume)
# ---------------------------------------------------------------------------

def dominated_count_numpy(points: np.ndarray, samples: np.ndarray) -> int:
    """Number of rows in `samples` weakly dominated by at least one point."""
    if len(points) == 0 or len(samples) == 0:
        return 0
    chunk = max(1, _CHUNK_ELEMS // (points.shape[0] * points.shape[1]))
    count = 0
    for start in range(0, len(samples), chunk):
        block = samples[start:start + chunk]
        hit = (points[None, :, :] <= block[:, None, :]).all(axis=2).any(axis=1)
        count += int(hit.sum())
    return count


@njit(cache=True)
def dominated_count_numba(points: np.ndarray, samples: np.ndarray) -> int:  # pragma: no cover - jitted
    n_pts, m = points.shape
    count = 0
    for i in range(samples.shape[0]):
        for j in range(n_pts):
            inside = True
            for k in range(m):
                if points[j, k] > samples[i, k]:
                    inside = False
                    break
            if inside:
                count += 1
                break
    return count


# ---------------------------------------------------------------------------
# non-dominated sorting
# ---------------------------------------------------------------------------

def front_ranks_numpy(objectives: np.ndarray) -> np.ndarray:
    """Front index (0 = non-dominated set) for each row of `objectives`."""
    n = objectives.shape[0]
    le = (objectives[:, None, :] <= objectives[None, :, :]).all(axis=2)
    lt = (objectives[:, None, :] < objectives[None, :, :]).any(axis=2)
    dom = le & lt  # dom[i, j]: i dominates j
    remaining = dom.sum(axis=0).astype(np.int64)
    ranks = np.full(n, -1, dtype=np.int64)
    assigned = np.zeros(n, dtype=bool)
    rank = 0
    while not assigned.all():
        frontier = (remaining == 0) & ~assigned
        ranks[frontier] = rank
        assigned |= frontier
        remaining = remaining - dom[frontier].sum(axis=0)
        rank += 1
    return ranks


@njit(cache=True)
def front_ranks_numba(objectives: np.ndarray) -> np.ndarray:  # pragma: no cover - jitted
    n, m = objectives.shape
    dom = np.zeros((n, n), dtype=np.bool_)
    n_dominators = np.zeros(n, dtype=np.int64)
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            better = False
            worse = False
            for k in range(m):
                a = objectives[i, k]
                b = objectives[j, k]
                if a > b:
                    worse = True
                    break
                if a < b:
                    better = True
            if better and not worse:
                dom[i, j] = True
                n_dominators[j] += 1
    ranks = np.full(n, -1, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    tail = 0
    for i in range(n):
        if n_dominators[i] == 0:
            ranks[i] = 0
            queue[tail] = i
            tail += 1
    head = 0
    while head < tail:
        p = queue[head]
        head += 1
        for j in range(n):
            if dom[p, j]:
                n_dominators[j] -= 1
                if n_dominators[j] == 0:
                    ranks[j] = ranks[p] + 1
                    queue[tail] = j
                    tail += 1
    return ranks


# ---------------------------------------------------------------------------
# non-dominated membership mask
# ---------------------------------------------------------------------------

def nondominated_mask_numpy(objectives: np.ndarray) -> np.ndarray:
    n = objectives.shape[0]
    if n == 0:
        return np.zeros(0, dtype=bool)
    le = (objectives[:, None, :] <= objectives[None, :, :]).all(axis=2)
    lt = (objectives[:, None, :] < objectives[None, :, :]).any(axis=2)
    dominated = (le & lt).any(axis=0)
    return ~dominated


@njit(cache=True)
def nondominated_mask_numba(objectives: np.ndarray) -> np.ndarray:  # pragma: no cover - jitted
    n, m = objectives.shape
    mask = np.ones(n, dtype=np.bool_)
    for i in range(n):
        for j in range(n):
            if j == i:
                continue
            better = False
            worse = False
            for k in range(m):
                a = objectives[j, k]
                b = objectives[i, k]
                if a > b:
                    worse = True
                    break
                if a < b:
                    better = True
            if better and not worse:
                mask[i] = False
                break
    return mask


# ---------------------------------------------------------------------------
# mean nearest-neighbour distance (IGD inner loop)
# ---------------------------------------------------------------------------

def mean_min_distance_numpy(reference: np.ndarray, points: np.ndarray) -> float:
    chunk = max(1, _CHUNK_ELEMS // max(points.shape[0] * points.shape[1], 1))
    total = 0.0
    for start in range(0, len(reference), chunk):
        diff = reference[start:start + chunk, None, :] - points[None, :, :]
        sq = np.einsum("ijk,ijk->ij", diff, diff)
        total += float(np.sqrt(sq.min(axis=1)).sum())
    return total / len(reference)


@njit(cache=True)
def mean_min_distance_numba(reference: np.ndarray, points: np.ndarray) -> float:  # pragma: no cover - jitted
    n_ref, m = reference.shape
    n_pts = points.shape[0]
    total = 0.0
    for i in range(n_ref):
        best = np.inf
        for j in range(n_pts):
            d = 0.0
            for k in range(m):
                t = reference[i, k] - points[j, k]
                d += t * t
            if d < best:
                best = d
        total += np.sqrt(best)
    return total / n_ref


if USE_NUMBA:
    dominated_count = dominated_count_numba
    front_ranks = front_ranks_numba
    nondominated_mask = nondominated_mask_numba
    mean_min_distance = mean_min_distance_numba
else:
    dominated_count = dominated_count_numpy
    front_ranks = front_ranks_numpy
    nondominated_mask = nondominated_mask_numpy
    mean_min_distance = mean_min_distance_numpy
