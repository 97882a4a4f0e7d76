"""Benchmark problems: the LSMOP1-9 family plus small analytic problems.

The LSMOP family follows the published benchmark definition (Cheng et al.,
"Test problems for large-scale multiobjective and many-objective
optimization", IEEE Trans. Cybernetics 2017) with its canonical defaults:

* first m-1 variables are position variables in [0, 1], the remaining
  d-m+1 are distance variables in [0, 10];
* distance variables are split into m groups whose sizes are proportional
  to a logistic-map weight sequence, each group holding nk=5 subcomponents;
* a variable-linkage transform couples every distance variable to the first
  position variable before the per-group base functions are applied.

LSMOP1-4 have a linear Pareto front (unit simplex), LSMOP5-8 a spherical
one (unit sphere octant), LSMOP9 a disconnected one. Reference fronts are
sampled deterministically with structured lattices so IGD values are
reproducible.
"""

from __future__ import annotations

import math

import numpy as np

from .core import Problem
from ._kernels import nondominated_mask

NK = 5  # subcomponents per variable group

LSMOP_NAMES = tuple(f"LSMOP{i}" for i in range(1, 10))
TOY_NAMES = ("BI_SPHERE", "SCHAFFER_LIKE")


# ---------------------------------------------------------------------------
# base fitness functions (applied per subcomponent block, vectorized over rows)
# ---------------------------------------------------------------------------

def _sphere(x):
    return np.sum(x * x, axis=1)


def _schwefel(x):
    # Schwefel's problem 2.21: max |x_i|
    return np.max(np.abs(x), axis=1)


def _rosenbrock(x):
    if x.shape[1] < 2:
        return np.zeros(x.shape[0])
    a = x[:, :-1]
    b = x[:, 1:]
    return np.sum(100.0 * (a * a - b) ** 2 + (a - 1.0) ** 2, axis=1)


def _rastrigin(x):
    return np.sum(x * x - 10.0 * np.cos(2.0 * np.pi * x) + 10.0, axis=1)


def _griewank(x):
    idx = np.sqrt(np.arange(1, x.shape[1] + 1, dtype=float))
    return np.sum(x * x, axis=1) / 4000.0 - np.prod(np.cos(x / idx), axis=1) + 1.0


def _ackley(x):
    mean_sq = np.mean(x * x, axis=1)
    mean_cos = np.mean(np.cos(2.0 * np.pi * x), axis=1)
    return 20.0 - 20.0 * np.exp(-0.2 * np.sqrt(mean_sq)) - np.exp(mean_cos) + np.e


# odd-group / even-group base functions per suite member (1-based group index)
_LSMOP_BASES = {
    "LSMOP1": (_sphere, _sphere),
    "LSMOP2": (_griewank, _schwefel),
    "LSMOP3": (_rastrigin, _rosenbrock),
    "LSMOP4": (_ackley, _griewank),
    "LSMOP5": (_sphere, _sphere),
    "LSMOP6": (_rosenbrock, _schwefel),
    "LSMOP7": (_ackley, _rosenbrock),
    "LSMOP8": (_griewank, _sphere),
    "LSMOP9": (_sphere, _ackley),
}


def group_layout(m: int, d: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-group subcomponent length and cumulative group offsets.

    Group sizes follow the benchmark's logistic-map weights
    c_1 = 3.8*0.1*0.9, c_i = 3.8*c_{i-1}*(1-c_{i-1}); group i receives
    floor(c_i / sum(c) * (d-m+1) / nk) variables per subcomponent. Trailing
    distance variables left over by the floor are linked but carry no
    fitness weight, matching the canonical definition.
    """
    c = [3.8 * 0.1 * (1.0 - 0.1)]
    for _ in range(m - 1):
        c.append(3.8 * c[-1] * (1.0 - c[-1]))
    c = np.asarray(c)
    sublen = np.floor(c / c.sum() * (d - m + 1) / NK).astype(int)
    if np.any(sublen < 1):
        raise ValueError(
            f"d={d} is too small for the m={m} variable-group scheme "
            f"(every group needs at least {NK} variables)"
        )
    offsets = np.concatenate(([0], np.cumsum(sublen * NK)))
    return sublen, offsets


def _linkage_linear(x_dist, x1, m, d):
    j = np.arange(m, d + 1, dtype=float) / d
    return (1.0 + j) * x_dist - 10.0 * x1[:, None]


def _linkage_nonlinear(x_dist, x1, m, d):
    j = np.arange(m, d + 1, dtype=float) / d
    return (1.0 + np.cos(j * np.pi / 2.0)) * x_dist - 10.0 * x1[:, None]


def _group_values(x_linked, m, sublen, offsets, odd_fn, even_fn):
    """Matrix G with one normalized fitness column per variable group."""
    n = x_linked.shape[0]
    g = np.zeros((n, m))
    for i in range(m):
        fn = odd_fn if i % 2 == 0 else even_fn
        for j in range(NK):
            lo = offsets[i] + j * sublen[i]
            g[:, i] += fn(x_linked[:, lo:lo + sublen[i]])
    return g / (sublen * NK)


def _shape_linear(x_pos):
    n, m_minus_1 = x_pos.shape
    ones = np.ones((n, 1))
    left = np.cumprod(np.hstack([ones, x_pos]), axis=1)[:, ::-1]
    right = np.hstack([ones, 1.0 - x_pos[:, ::-1]])
    return left * right


def _shape_spherical(x_pos):
    n, m_minus_1 = x_pos.shape
    ones = np.ones((n, 1))
    left = np.cumprod(np.hstack([ones, np.cos(x_pos * np.pi / 2.0)]), axis=1)[:, ::-1]
    right = np.hstack([ones, np.sin(x_pos[:, ::-1] * np.pi / 2.0)])
    return left * right


def _make_lsmop(name: str, m: int, d: int) -> Problem:
    index = int(name[5:])
    sublen, offsets = group_layout(m, d)
    odd_fn, even_fn = _LSMOP_BASES[name]
    linkage = _linkage_linear if index <= 4 else _linkage_nonlinear

    lower = np.zeros(d)
    upper = np.concatenate([np.ones(m - 1), 10.0 * np.ones(d - m + 1)])

    def evaluate_batch(x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        x_pos = x[:, :m - 1]
        linked = linkage(x[:, m - 1:], x[:, 0], m, d)
        g = _group_values(linked, m, sublen, offsets, odd_fn, even_fn)
        if index <= 4:
            return (1.0 + g) * _shape_linear(x_pos)
        if index <= 8:
            g_shift = np.hstack([g[:, 1:], np.zeros((g.shape[0], 1))])
            return (1.0 + g + g_shift) * _shape_spherical(x_pos)
        # LSMOP9: disconnected front, single aggregated distance value
        g9 = 1.0 + np.sum(g, axis=1)
        f = np.empty((x.shape[0], m))
        f[:, :m - 1] = x_pos
        inner = x_pos / (1.0 + g9[:, None]) * (1.0 + np.sin(3.0 * np.pi * x_pos))
        f[:, m - 1] = (1.0 + g9) * (m - np.sum(inner, axis=1))
        return f

    return Problem(name=name, d=d, m=m, lower=lower, upper=upper, evaluate_batch=evaluate_batch)


# ---------------------------------------------------------------------------
# analytic toy problems with closed-form fronts (test oracles)
# ---------------------------------------------------------------------------

def _make_bi_sphere(d: int = 2) -> Problem:
    """f1 = |x|^2, f2 = |x - e1|^2; front traced by x = (t, 0, ..., 0), t in [0, 1]."""
    if d < 1:
        raise ValueError("BI_SPHERE needs d >= 1")
    e1 = np.zeros(d)
    e1[0] = 1.0

    def evaluate_batch(x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        f1 = np.sum(x * x, axis=1)
        diff = x - e1
        f2 = np.sum(diff * diff, axis=1)
        return np.stack([f1, f2], axis=1)

    return Problem(
        name="BI_SPHERE", d=d, m=2,
        lower=-np.ones(d), upper=2.0 * np.ones(d),
        evaluate_batch=evaluate_batch,
    )


def _make_schaffer_like() -> Problem:
    """Single-variable f1 = x^2, f2 = (x - 2)^2; front at x in [0, 2]."""

    def evaluate_batch(x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.stack([x[:, 0] ** 2, (x[:, 0] - 2.0) ** 2], axis=1)

    return Problem(
        name="SCHAFFER_LIKE", d=1, m=2,
        lower=np.array([-10.0]), upper=np.array([10.0]),
        evaluate_batch=evaluate_batch,
    )


def make_toy_problem(name: str, d: int | None = None) -> Problem:
    name = name.upper()
    if name == "BI_SPHERE":
        return _make_bi_sphere(2 if d is None else d)
    if name == "SCHAFFER_LIKE":
        return _make_schaffer_like()
    raise ValueError(f"unknown toy problem {name!r}; choose from {TOY_NAMES}")


def make_problem(name: str, m: int, d: int) -> Problem:
    """Instantiate a benchmark problem by name.

    LSMOP members support m=3 (the configuration used throughout); the toy
    problems are two-objective and ignore m beyond validation.
    """
    key = name.upper()
    if key in LSMOP_NAMES:
        if m != 3:
            raise ValueError(f"{key} is provided for m=3, got m={m}")
        if d < m:
            raise ValueError(f"d={d} must be at least m={m}")
        return _make_lsmop(key, m, d)
    if key in TOY_NAMES:
        if m != 2:
            raise ValueError(f"toy problems are two-objective, got m={m}")
        return make_toy_problem(key, d)
    raise ValueError(f"unknown problem {name!r}; choose from {LSMOP_NAMES + TOY_NAMES}")


# ---------------------------------------------------------------------------
# reference fronts
# ---------------------------------------------------------------------------

class ReferenceFront:
    """Deterministic sample of a problem's true Pareto front."""

    def __init__(self, points: np.ndarray):
        self.points = np.asarray(points, dtype=float)

    @property
    def count(self) -> int:
        return self.points.shape[0]

    @property
    def m(self) -> int:
        return self.points.shape[1]


def _simplex_lattice(m: int, count: int) -> np.ndarray:
    """Smallest Das-Dennis lattice on the unit simplex with >= count points."""
    h = 1
    while math.comb(h + m - 1, m - 1) < count:
        h += 1

    points = []

    def rec(prefix, remaining, slots):
        if slots == 1:
            points.append(prefix + [remaining])
            return
        for v in range(remaining + 1):
            rec(prefix + [v], remaining - v, slots - 1)

    rec([], h, m)
    return np.asarray(points, dtype=float) / h


def _decimate(points: np.ndarray, count: int) -> np.ndarray:
    """Evenly spaced selection of exactly `count` rows (requires len >= count)."""
    if len(points) == count:
        return points
    idx = np.round(np.linspace(0, len(points) - 1, count)).astype(int)
    return points[idx]


def _grid_unit_square(m_minus_1: int, count: int) -> np.ndarray:
    per_axis = max(2, math.ceil(count ** (1.0 / m_minus_1)))
    axes = [np.linspace(0.0, 1.0, per_axis) for _ in range(m_minus_1)]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.ravel() for g in mesh], axis=1)


# Disconnected-front segment boundaries of the DTLZ7-style last objective;
# each position value lives in [a1, a2] or [a3, a4].
_DISCONNECTED_INTERVALS = (0.0, 0.251412, 0.631627, 0.859401)


def _lsmop9_front(m: int, count: int) -> np.ndarray:
    a1, a2, a3, a4 = _DISCONNECTED_INTERVALS
    split = (a2 - a1) / (a4 - a3 + a2 - a1)
    x = _grid_unit_square(m - 1, count)
    low = x <= split
    x = np.where(low, x * (a2 - a1) / split + a1, (x - split) * (a4 - a3) / (1.0 - split) + a3)
    last = 2.0 * (m - np.sum(x / 2.0 * (1.0 + np.sin(3.0 * np.pi * x)), axis=1))
    return np.hstack([x, last[:, None]])


def _toy_front(name: str, count: int) -> np.ndarray:
    t = np.linspace(0.0, 1.0, count)
    if name == "BI_SPHERE":
        return np.stack([t * t, (t - 1.0) ** 2], axis=1)
    # SCHAFFER_LIKE: x in [0, 2]
    x = 2.0 * t
    return np.stack([x * x, (x - 2.0) ** 2], axis=1)


def sample_reference_front(name: str, m: int, count: int = 10_000) -> ReferenceFront:
    """Structured lattice sample of the known front geometry, exactly `count` points."""
    if count < 100:
        raise ValueError("reference front needs at least 100 points")
    key = name.upper()
    if key in TOY_NAMES:
        if m != 2:
            raise ValueError("toy fronts are two-objective")
        return ReferenceFront(_toy_front(key, count))
    if key not in LSMOP_NAMES:
        raise ValueError(f"unknown problem {name!r}")
    index = int(key[5:])
    if index <= 4:
        pts = _decimate(_simplex_lattice(m, count), count)
    elif index <= 8:
        lattice = _simplex_lattice(m, count)
        pts = _decimate(lattice / np.linalg.norm(lattice, axis=1, keepdims=True), count)
    else:
        pts = _lsmop9_front(m, count)
        pts = np.unique(pts, axis=0)
        pts = pts[nondominated_mask(np.ascontiguousarray(pts))]
        if len(pts) < count:
            raise ValueError(f"could not build {count} non-dominated front points for {key}")
        pts = _decimate(pts, count)
    return ReferenceFront(pts)
