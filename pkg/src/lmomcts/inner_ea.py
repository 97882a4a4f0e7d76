"""NSGA-II, used as the inner optimizer behind a generic interface.

The optimizer works on full-length decision vectors but can restrict
variation to a subset of variable indices: crossover and mutation touch only
those columns while the remaining columns are inherited from the first
tournament-winning parent. Fitness is always computed on the full vector.
This is exactly the restore-for-evaluation contract the variable-sampling
stage needs, and with `var_indices=None` it degenerates to plain NSGA-II on
the whole problem.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._kernels import front_ranks
from .core import Population, RandomStream


@dataclass
class FrontPartition:
    """Population indices partitioned into non-domination fronts."""

    fronts: list[np.ndarray]

    @property
    def ranks(self) -> np.ndarray:
        n = sum(len(f) for f in self.fronts)
        ranks = np.empty(n, dtype=np.int64)
        for r, front in enumerate(self.fronts):
            ranks[front] = r
        return ranks


@dataclass
class OptimizerBudget:
    """Evaluation budget for one inner-optimizer call."""

    evaluations: int


@dataclass
class OperatorParams:
    """Variation-operator settings (canonical NSGA-II defaults)."""

    eta_crossover: float = 20.0
    eta_mutation: float = 20.0
    crossover_rate: float = 1.0
    mutation_prob: float | None = None  # default 1 / (number of varied variables)


def fast_nondominated_sort(population: Population | np.ndarray) -> FrontPartition:
    """Partition by Pareto rank (front 0 is the non-dominated set)."""
    objectives = population.objectives if isinstance(population, Population) else np.asarray(population, dtype=float)
    ranks = front_ranks(np.ascontiguousarray(objectives))
    n_fronts = int(ranks.max()) + 1 if len(ranks) else 0
    fronts = [np.flatnonzero(ranks == r) for r in range(n_fronts)]
    return FrontPartition(fronts=fronts)


def crowding_distance(front: np.ndarray) -> np.ndarray:
    """Crowding distances for one front's objective vectors.

    Boundary solutions per objective get +inf; interior solutions sum the
    neighbour gaps normalized by the front's per-objective range. Objectives
    with zero range contribute nothing.
    """
    front = np.asarray(front, dtype=float)
    k, m = front.shape
    dist = np.zeros(k)
    if k <= 2:
        return np.full(k, np.inf)
    for j in range(m):
        order = np.argsort(front[:, j], kind="stable")
        vals = front[order, j]
        span = vals[-1] - vals[0]
        dist[order[0]] = np.inf
        dist[order[-1]] = np.inf
        if span > 0:
            dist[order[1:-1]] += (vals[2:] - vals[:-2]) / span
    return dist


def _rank_and_crowding(objectives: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    partition = fast_nondominated_sort(objectives)
    ranks = partition.ranks
    crowd = np.empty(len(objectives))
    for front in partition.fronts:
        crowd[front] = crowding_distance(objectives[front])
    return ranks, crowd


def _sbx_batch(p1, p2, eta, rate, lower, upper, rng: np.random.Generator):
    """Simulated binary crossover on matching parent matrices.

    Canonical real-coded SBX: the operator is applied to a pair with
    probability `rate`; within an applied pair each variable participates
    with probability 1/2 (others are copied from the parents) and the spread
    factor's sign is randomized, which swaps the children's roles per
    variable. Children are clipped to the bounds. The children's sum always
    equals the parents' sum before clipping.
    """
    u = rng.uniform(size=p1.shape)
    exponent = 1.0 / (eta + 1.0)
    beta = np.where(u <= 0.5, (2.0 * u) ** exponent, (2.0 - 2.0 * u) ** (-exponent))
    beta *= np.where(rng.uniform(size=p1.shape) < 0.5, 1.0, -1.0)
    beta = np.where(rng.uniform(size=p1.shape) < 0.5, 1.0, beta)
    beta = np.where(rng.uniform(size=(p1.shape[0], 1)) < rate, beta, 1.0)
    mid = 0.5 * (p1 + p2)
    half = 0.5 * (p1 - p2)
    return (
        np.clip(mid + beta * half, lower, upper),
        np.clip(mid - beta * half, lower, upper),
    )


def _polynomial_mutation_batch(x, eta, prob, lower, upper, rng: np.random.Generator):
    """Bounded polynomial mutation applied in place-free batch form."""
    span = upper - lower
    mutate = rng.uniform(size=x.shape) < prob
    u = rng.uniform(size=x.shape)
    delta1 = (x - lower) / span
    delta2 = (upper - x) / span
    exponent = 1.0 / (eta + 1.0)
    low_side = u < 0.5
    val_low = 2.0 * u + (1.0 - 2.0 * u) * (1.0 - delta1) ** (eta + 1.0)
    val_high = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * (1.0 - delta2) ** (eta + 1.0)
    deltaq = np.where(low_side, val_low ** exponent - 1.0, 1.0 - val_high ** exponent)
    out = np.where(mutate, x + deltaq * span, x)
    return np.clip(out, lower, upper)


def sbx_crossover(p1, p2, eta_c: float, rate: float, rng: RandomStream,
                  lower=None, upper=None):
    """Single-pair SBX; returns two children clipped to the bounds.

    `rate` is the pair-level application probability (canonical pc); an
    applied pair crosses each variable with probability 1/2.
    """
    p1 = np.asarray(p1, dtype=float)
    p2 = np.asarray(p2, dtype=float)
    if p1.shape != p2.shape:
        raise ValueError("parents must have equal length")
    if eta_c <= 0:
        raise ValueError("eta_c must be positive")
    lower = -np.inf if lower is None else np.asarray(lower, dtype=float)
    upper = np.inf if upper is None else np.asarray(upper, dtype=float)
    c1, c2 = _sbx_batch(p1[None, :], p2[None, :], eta_c, rate, lower, upper, rng.generator)
    return c1[0], c2[0]


def polynomial_mutation(x, eta_m: float, pm: float, rng: RandomStream, lower, upper):
    """Per-variable bounded polynomial mutation of one decision vector."""
    if eta_m <= 0:
        raise ValueError("eta_m must be positive")
    if not 0.0 <= pm <= 1.0:
        raise ValueError("mutation probability must lie in [0, 1]")
    x = np.asarray(x, dtype=float)
    out = _polynomial_mutation_batch(
        x[None, :], eta_m, pm, np.asarray(lower, dtype=float),
        np.asarray(upper, dtype=float), rng.generator,
    )
    return out[0]


def _tournament_winners(ranks, crowd, candidates):
    """Binary tournament: lower rank, then larger crowding, then lower index."""
    a, b = candidates[:, 0], candidates[:, 1]
    a_wins = (ranks[a] < ranks[b]) | (
        (ranks[a] == ranks[b]) & (crowd[a] > crowd[b])
    ) | ((ranks[a] == ranks[b]) & (crowd[a] == crowd[b]) & (a <= b))
    return np.where(a_wins, a, b)


def environmental_selection(x: np.ndarray, objectives: np.ndarray, n: int):
    """Elitist truncation to n by rank, then crowding (ties by lower index)."""
    partition = fast_nondominated_sort(objectives)
    keep: list[np.ndarray] = []
    taken = 0
    for front in partition.fronts:
        if taken + len(front) <= n:
            keep.append(front)
            taken += len(front)
            if taken == n:
                break
        else:
            crowd = crowding_distance(objectives[front])
            order = np.lexsort((front, -crowd))
            keep.append(front[order[: n - taken]])
            break
    idx = np.concatenate(keep)
    return x[idx], objectives[idx]


def run_nsga2(initial: Population, problem, budget: OptimizerBudget | int,
              rng: RandomStream, var_indices: np.ndarray | None = None,
              params: OperatorParams | None = None) -> Population:
    """Evolve `initial` for the given evaluation budget and return n survivors.

    Each generation: binary-tournament mating selection on rank+crowding,
    SBX, polynomial mutation, evaluation of the offspring, elitist
    environmental selection on the parent+offspring union. The final
    generation is truncated so the consumed evaluations equal the budget
    exactly; the budget must cover at least one full generation (>= n).
    """
    evaluations = budget.evaluations if isinstance(budget, OptimizerBudget) else int(budget)
    n = len(initial)
    if evaluations < n:
        raise ValueError(f"budget {evaluations} is below the population size {n}")
    params = params or OperatorParams()
    gen = rng.generator

    x = initial.x.copy()
    f = initial.objectives.copy()
    d = x.shape[1]
    idx = np.arange(d) if var_indices is None else np.asarray(var_indices, dtype=int)
    lower = problem.lower[idx]
    upper = problem.upper[idx]
    pm = params.mutation_prob if params.mutation_prob is not None else 1.0 / len(idx)

    used = 0
    while used < evaluations:
        batch = min(n, evaluations - used)
        pairs = math.ceil(batch / 2)
        ranks, crowd = _rank_and_crowding(f)
        candidates = gen.integers(0, n, size=(2 * pairs, 2))
        winners = _tournament_winners(ranks, crowd, candidates)
        first, second = winners[0::2], winners[1::2]

        c1, c2 = _sbx_batch(
            x[first][:, idx], x[second][:, idx],
            params.eta_crossover, params.crossover_rate, lower, upper, gen,
        )
        reduced = np.empty((2 * pairs, len(idx)))
        reduced[0::2] = c1
        reduced[1::2] = c2
        reduced = _polynomial_mutation_batch(reduced, params.eta_mutation, pm, lower, upper, gen)

        # non-varied variables are inherited from the first parent of the pair
        offspring = np.repeat(x[first], 2, axis=0)[:batch]
        offspring[:, idx] = reduced[:batch]
        f_off = problem.evaluate_batch(offspring)
        used += batch

        x, f = environmental_selection(
            np.vstack([x, offspring]), np.vstack([f, f_off]), n
        )
    return Population(x, f)
