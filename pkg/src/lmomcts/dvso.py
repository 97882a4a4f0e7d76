"""Variable-sampled optimization: the node-expansion step of the search.

A child population is produced from a parent by (1) drawing a uniform
without-replacement sample of decision-variable indices, (2) running the
inner optimizer with variation restricted to those indices for a fixed
evaluation budget, and (3) keeping the optimizer's final population as the
child. Non-sampled variables are never varied: every offspring inherits them
from the first parent of its crossover pair, so each returned solution's
non-sampled coordinates equal those of its lineage base in the parent
population. Fitness is always the full-length evaluation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Population, RandomStream
from .inner_ea import OperatorParams, run_nsga2


class DiscardedPopulationError(RuntimeError):
    """Raised when expansion is attempted from a node whose population was released."""


@dataclass(frozen=True)
class VariableSample:
    """Sorted, duplicate-free subset of decision-variable indices."""

    indices: np.ndarray
    d: int

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=int)
        object.__setattr__(self, "indices", idx)
        if len(np.unique(idx)) != len(idx):
            raise ValueError("sampled indices must be distinct")
        if len(idx) == 0 or idx.min() < 0 or idx.max() >= self.d:
            raise ValueError("sampled indices out of range")

    @property
    def d_n(self) -> int:
        return len(self.indices)


@dataclass(frozen=True)
class ReducedView:
    """Pairing of a variable sample with a base solution it restores into."""

    sample: VariableSample
    base: np.ndarray

    def reduce(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(x, dtype=float)[self.sample.indices]

    def restore(self, reduced: np.ndarray) -> np.ndarray:
        full = np.asarray(self.base, dtype=float).copy()
        full[self.sample.indices] = reduced
        return full


def reduction_size(f: float, d: int) -> int:
    """Number of sampled variables for sampling ratio f: max(1, round(f*d))."""
    if not 0.0 < f <= 1.0:
        raise ValueError("sampling ratio must lie in (0, 1]")
    return min(d, max(1, round(f * d)))


def sample_variables(d: int, d_n: int, rng: RandomStream) -> VariableSample:
    """Uniform without-replacement sample of d_n of the d variable indices."""
    if not 1 <= d_n <= d:
        raise ValueError(f"need 1 <= d_n <= d, got d_n={d_n}, d={d}")
    indices = np.sort(rng.generator.choice(d, size=d_n, replace=False))
    return VariableSample(indices=indices, d=d)


def dvso_with_sample(parent, problem, d_n: int, evaluations: int, rng: RandomStream,
                     params: OperatorParams | None = None) -> tuple[Population, VariableSample]:
    """As :func:`dvso`, but also returns the variable sample that was drawn."""
    population = getattr(parent, "population", parent)
    if population is None:
        raise DiscardedPopulationError("parent population has been discarded")
    sample = sample_variables(population.x.shape[1], d_n, rng)
    child = run_nsga2(population, problem, evaluations, rng,
                      var_indices=sample.indices, params=params)
    return child, sample


def dvso(parent, problem, d_n: int, evaluations: int, rng: RandomStream,
         params: OperatorParams | None = None) -> Population:
    """Expand a parent into a child population via sampled-variable search.

    `parent` may be a tree node (anything with a ``population`` attribute)
    or a Population. The variable sample is drawn once per call; the inner
    optimizer then consumes exactly `evaluations` full-length evaluations.
    """
    return dvso_with_sample(parent, problem, d_n, evaluations, rng, params)[0]
