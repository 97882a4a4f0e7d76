"""Foundational types: solutions, populations, problems, random streams.

Everything downstream (the inner evolutionary algorithm, the tree search, the
indicators) is built on the array-backed :class:`Population` and the pure
batch evaluator exposed by :class:`Problem`. All budgets in the project are
measured in objective-function evaluations, counted by
:class:`CountingProblem`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np


@dataclass
class Solution:
    """A decision vector with its (optionally cached) objective vector."""

    x: np.ndarray
    objectives: np.ndarray | None = None

    @property
    def evaluated(self) -> bool:
        return self.objectives is not None


class Population:
    """Ordered collection of evaluated solutions sharing one problem.

    Stored column-major-free as two matrices: decision variables ``x`` with
    shape (n, d) and ``objectives`` with shape (n, m). Populations are
    treated as immutable once built; operators copy rather than mutate.
    """

    def __init__(self, x: np.ndarray, objectives: np.ndarray):
        x = np.asarray(x, dtype=float)
        objectives = np.asarray(objectives, dtype=float)
        if x.ndim != 2 or objectives.ndim != 2:
            raise ValueError("population arrays must be 2-D")
        if x.shape[0] != objectives.shape[0]:
            raise ValueError(
                f"decision rows ({x.shape[0]}) != objective rows ({objectives.shape[0]})"
            )
        self.x = x
        self.objectives = objectives

    def __len__(self) -> int:
        return self.x.shape[0]

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def d(self) -> int:
        return self.x.shape[1]

    @property
    def m(self) -> int:
        return self.objectives.shape[1]

    @property
    def members(self) -> list[Solution]:
        return [Solution(self.x[i].copy(), self.objectives[i].copy()) for i in range(self.n)]

    def copy(self) -> "Population":
        return Population(self.x.copy(), self.objectives.copy())


@dataclass(frozen=True)
class Problem:
    """A box-constrained minimization problem.

    `evaluate_batch` is the pure vectorized evaluator mapping an (N, d)
    matrix of in-bounds decision vectors to an (N, m) objective matrix;
    `evaluate` is the single-vector convenience wrapper. Determinism is part
    of the contract: the same x always yields the same objectives.
    """

    name: str
    d: int
    m: int
    lower: np.ndarray
    upper: np.ndarray
    evaluate_batch: Callable[[np.ndarray], np.ndarray]

    def __post_init__(self):
        lower = np.asarray(self.lower, dtype=float)
        upper = np.asarray(self.upper, dtype=float)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        if lower.shape != (self.d,) or upper.shape != (self.d,):
            raise ValueError("bounds must be vectors of length d")
        if not np.all(lower < upper):
            raise ValueError(f"{self.name}: every lower bound must be < upper bound")

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.d,):
            raise ValueError(f"expected decision vector of length {self.d}, got {x.shape}")
        return self.evaluate_batch(x[None, :])[0]


class CountingProblem:
    """Evaluation-counting view of a problem.

    Every budget in the search (E, e) is measured in the number of rows this
    wrapper has evaluated.
    """

    def __init__(self, problem: Problem):
        self.problem = problem
        self.count = 0

    @property
    def name(self) -> str:
        return self.problem.name

    @property
    def d(self) -> int:
        return self.problem.d

    @property
    def m(self) -> int:
        return self.problem.m

    @property
    def lower(self) -> np.ndarray:
        return self.problem.lower

    @property
    def upper(self) -> np.ndarray:
        return self.problem.upper

    def evaluate_batch(self, x: np.ndarray) -> np.ndarray:
        self.count += x.shape[0]
        return self.problem.evaluate_batch(x)

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        self.count += 1
        return self.problem.evaluate(x)


class RandomStream:
    """Seeded random stream with documented, reproducible splitting.

    Wraps ``numpy.random.Generator(PCG64)`` seeded from a ``SeedSequence``.
    ``split(n)`` derives n child streams via ``SeedSequence.spawn``; children
    are statistically independent of each other and of any draws made from
    this stream before or after the split (spawning does not consume
    generator state). The same seed always reproduces the same draw sequence
    on a given build.
    """

    def __init__(self, seed: int | np.random.SeedSequence):
        if isinstance(seed, np.random.SeedSequence):
            self.seed_sequence = seed
        else:
            self.seed_sequence = np.random.SeedSequence(int(seed))
        self.generator = np.random.Generator(np.random.PCG64(self.seed_sequence))

    def split(self, n: int) -> list["RandomStream"]:
        return [RandomStream(ss) for ss in self.seed_sequence.spawn(n)]

    def spawn_one(self) -> "RandomStream":
        return self.split(1)[0]


def dominates(a: np.ndarray, b: np.ndarray) -> bool:
    """Pareto dominance for minimization: a <= b everywhere, < somewhere."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError(f"objective vectors must share one length, got {a.shape} vs {b.shape}")
    return bool(np.all(a <= b) and np.any(a < b))


def clamp(x: np.ndarray, problem: Problem) -> np.ndarray:
    """Project a decision vector onto the problem's box bounds."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != problem.d:
        raise ValueError(f"expected {problem.d} variables, got {x.shape[-1]}")
    return np.clip(x, problem.lower, problem.upper)


def random_population(problem: Problem | CountingProblem, n: int, rng: RandomStream) -> Population:
    """Uniform in-bounds population of n evaluated solutions."""
    if n < 2:
        raise ValueError("population size must be at least 2")
    x = rng.generator.uniform(problem.lower, problem.upper, size=(n, problem.d))
    return Population(x, problem.evaluate_batch(x))
