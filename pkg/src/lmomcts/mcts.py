"""UCT search over populations.

The tree's nodes are whole populations. One iteration selects a node by
upper confidence bound, expands it through variable-sampled optimization,
scores the child by an estimated hypervolume, updates the best-so-far
archive, releases populations of fully expanded non-archive nodes, and
backpropagates the child's score to its ancestors. The archived node's
population is the search result.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._kernels import dominated_count, nondominated_mask
from .core import CountingProblem, Population, Problem, RandomStream, random_population
from .dvso import DiscardedPopulationError, VariableSample, dvso_with_sample, reduction_size
from .indicators import RunRecord, igd, normalized_front_hv
from .inner_ea import OperatorParams
from .problems import ReferenceFront, sample_reference_front

# Reference value per normalized objective for node scoring.
NODE_EVAL_REF = 1.1


@dataclass
class SearchConfig:
    """Search settings; defaults follow the standard experimental setup."""

    sampling_ratio: float = 0.2                 # f
    total_evaluations: int = 100_000            # E
    expansion_evaluations: int | None = None    # e, defaults to 0.01 * E
    population_size: int = 300                  # n
    coverage_prob: float = 0.9                  # p_cov in the branching rule
    backprop_mode: str = "sum"                  # "sum" (literal) or "mean"
    hv_samples: int = 10_000                    # Monte Carlo samples per node score
    init_visits: int = 1                        # visit count given to a fresh child
    snapshot_every: int = 1_000                 # trace granularity in evaluations
    igd_on_nondominated_only: bool = False
    operators: OperatorParams = field(default_factory=OperatorParams)

    @property
    def e(self) -> int:
        return (
            self.expansion_evaluations
            if self.expansion_evaluations is not None
            else max(1, round(0.01 * self.total_evaluations))
        )

    def validate(self) -> None:
        if not 0.0 < self.sampling_ratio <= 1.0:
            raise ValueError("sampling ratio must lie in (0, 1]")
        if not 0.0 < self.coverage_prob < 1.0:
            raise ValueError("coverage probability must lie in (0, 1)")
        if not self.population_size <= self.e <= self.total_evaluations:
            raise ValueError(
                f"budgets must satisfy n <= e <= E, got n={self.population_size}, "
                f"e={self.e}, E={self.total_evaluations}"
            )
        if self.backprop_mode not in ("sum", "mean"):
            raise ValueError("backprop mode must be 'sum' or 'mean'")
        if self.init_visits not in (0, 1):
            raise ValueError("init_visits must be 0 or 1")


class TreeNode:
    """Search-tree node: a population plus its score and visit statistics."""

    __slots__ = ("population", "delta", "visits", "children", "parent",
                 "variable_sample", "bp_sum", "bp_count")

    def __init__(self, population: Population | None, delta: float = 0.0,
                 visits: int = 0, parent: "TreeNode | None" = None,
                 variable_sample: VariableSample | None = None):
        self.population = population
        self.delta = delta
        self.visits = visits
        self.children: list[TreeNode] = []
        self.parent = parent
        self.variable_sample = variable_sample
        # running mean of backpropagated descendant scores (mean mode only)
        self.bp_sum = 0.0
        self.bp_count = 0

    def exploit_value(self, mode: str) -> float:
        if mode == "mean" and self.bp_count > 0:
            return self.bp_sum / self.bp_count
        return self.delta


@dataclass
class Archive:
    """Best-scored node so far; the stored value is frozen at archive time."""

    node: TreeNode
    value: float


def branching_factor(d: int, d_n: int, p_cov: float = 0.9) -> int:
    """Children per node so each variable is sampled with probability >= p_cov.

    k = ceil(log10(1 - p_cov) / (d_n * log10(1 - 1/d))), at least 1.
    """
    if d < 2:
        raise ValueError("branching factor needs d >= 2")
    if not 1 <= d_n <= d:
        raise ValueError("need 1 <= d_n <= d")
    if not 0.0 < p_cov < 1.0:
        raise ValueError("coverage probability must lie in (0, 1)")
    k = math.ceil(math.log10(1.0 - p_cov) / (d_n * math.log10(1.0 - 1.0 / d)))
    return max(1, k)


def ucb(delta: float, t_child: int, t_total: int) -> float:
    """Upper confidence bound: delta + sqrt(2 ln(t_total) / t_child).

    An unvisited child (t_child = 0) scores +inf so it is selected first.
    """
    if t_child < 0 or t_total < t_child:
        raise ValueError("need t_total >= t_child >= 0")
    if t_child == 0:
        return math.inf
    return delta + math.sqrt(2.0 * math.log(t_total) / t_child)


def select(root: TreeNode, k: int, mode: str = "sum") -> TreeNode:
    """Descend by UCB argmax through fully expanded nodes.

    Returns the first node with fewer than k children; every node the
    descent departs from has its visit count incremented. Ties at the
    argmax go to the lowest child index.
    """
    node = root
    while len(node.children) == k:
        t_total = sum(child.visits for child in node.children)
        scores = [ucb(child.exploit_value(mode), child.visits, t_total)
                  for child in node.children]
        best = int(np.argmax(scores))
        node.visits += 1
        node = node.children[best]
    return node


class RunningBounds:
    """Running ideal/nadir over every objective vector evaluated so far."""

    def __init__(self, m: int):
        self.ideal = np.full(m, np.inf)
        self.nadir = np.full(m, -np.inf)

    def update(self, objectives: np.ndarray) -> None:
        self.ideal = np.minimum(self.ideal, objectives.min(axis=0))
        self.nadir = np.maximum(self.nadir, objectives.max(axis=0))

    def normalize(self, objectives: np.ndarray) -> np.ndarray:
        span = self.nadir - self.ideal
        span = np.where(span > 1e-12, span, 1.0)
        return (objectives - self.ideal) / span


def node_evaluation(population: Population, bounds: RunningBounds,
                    hv_samples: int, rng: RandomStream) -> float:
    """Score a population: Monte Carlo hypervolume of its non-dominated
    front after running-bounds normalization, expressed as the dominated
    fraction of the [0, 1.1]^m sampling box (a value in [0, 1]).

    Only the ranking between nodes matters, so the common normalized box
    makes scores comparable across nodes while staying cheap to estimate.
    """
    front = population.objectives[nondominated_mask(np.ascontiguousarray(population.objectives))]
    norm = bounds.normalize(front)
    draws = rng.generator.uniform(0.0, NODE_EVAL_REF, size=(hv_samples, norm.shape[1]))
    return dominated_count(np.ascontiguousarray(norm), draws) / hv_samples


def expand_and_evaluate(node: TreeNode, k: int, problem, config: SearchConfig,
                        bounds: RunningBounds, rng: RandomStream) -> TreeNode:
    """Expand a node via variable-sampled optimization and score the child."""
    if len(node.children) >= k:
        raise ValueError("node already has the full complement of children")
    if node.population is None:
        raise DiscardedPopulationError("cannot expand a node whose population was discarded")
    d = node.population.x.shape[1]
    d_n = reduction_size(config.sampling_ratio, d)
    child_pop, sample = dvso_with_sample(
        node, problem, d_n, config.e, rng, params=config.operators
    )
    bounds.update(child_pop.objectives)
    delta = node_evaluation(child_pop, bounds, config.hv_samples, rng)
    child = TreeNode(child_pop, delta=delta, visits=config.init_visits,
                     parent=node, variable_sample=sample)
    node.children.append(child)
    return child


def update_archive(archive: Archive, child: TreeNode) -> Archive:
    """Replace the archive iff the child's score strictly exceeds it."""
    if child.delta > archive.value:
        return Archive(node=child, value=child.delta)
    return archive


def backpropagate(child: TreeNode, mode: str = "sum") -> None:
    """Propagate the child's score to its ancestors, excluding the root."""
    value = child.delta
    node = child.parent
    while node is not None and node.parent is not None:
        if mode == "sum":
            node.delta += value
        else:
            node.bp_sum += value
            node.bp_count += 1
        node = node.parent


def discard_populations(nodes: list[TreeNode], k: int, archive: Archive) -> int:
    """Release populations of fully expanded nodes other than the archive node.

    Returns the number of populations released. Tree statistics are kept.
    """
    released = 0
    for node in nodes:
        if node.population is not None and len(node.children) == k and node is not archive.node:
            node.population = None
            released += 1
    return released


def live_population_count(nodes: list[TreeNode]) -> int:
    return sum(1 for node in nodes if node.population is not None)


def run_lmomcts(problem: Problem, config: SearchConfig, seed: int,
                reference_front: ReferenceFront | None = None,
                initial_x: np.ndarray | None = None,
                algorithm_id: str = "lmomcts", run_index: int = 0,
                iteration_callback=None) -> tuple[Population, RunRecord]:
    """Full search loop; returns the archived population and its run record.

    The loop runs while a whole expansion still fits the evaluation budget,
    so the counted evaluations at termination land in (E - e, E]. The trace
    snapshots (evaluations, IGD of the archived population, archived score)
    roughly every `snapshot_every` evaluations and always at termination.
    """
    config.validate()
    counting = CountingProblem(problem)
    if reference_front is None:
        reference_front = sample_reference_front(problem.name, problem.m)

    stream = RandomStream(seed)
    init_stream, search_stream = stream.split(2)

    n = config.population_size
    if initial_x is not None:
        x0 = np.asarray(initial_x, dtype=float)
        root_pop = Population(x0, counting.evaluate_batch(x0))
    else:
        root_pop = random_population(counting, n, init_stream)

    bounds = RunningBounds(problem.m)
    bounds.update(root_pop.objectives)

    d_n = reduction_size(config.sampling_ratio, problem.d)
    k = branching_factor(problem.d, d_n, config.coverage_prob)

    root = TreeNode(root_pop, delta=0.0)
    archive = Archive(node=root, value=0.0)
    nodes = [root]
    warnings: list[str] = []

    def archive_population() -> Population:
        assert archive.node.population is not None
        return archive.node.population

    def snapshot_igd() -> float:
        objs = archive_population().objectives
        if config.igd_on_nondominated_only:
            objs = objs[nondominated_mask(np.ascontiguousarray(objs))]
        return igd(objs, reference_front)

    trace: list[tuple[int, float, float]] = [(counting.count, snapshot_igd(), archive.value)]
    next_mark = counting.count + config.snapshot_every

    e = config.e
    if counting.count + e > config.total_evaluations:
        warnings.append(
            "budget exhausted before the first expansion; returning the initial population"
        )

    iteration = 0
    while counting.count + e <= config.total_evaluations:
        target = select(root, k, config.backprop_mode)
        expansion_stream = search_stream.spawn_one()
        child = expand_and_evaluate(target, k, counting, config, bounds, expansion_stream)
        nodes.append(child)
        archive = update_archive(archive, child)
        discard_populations(nodes, k, archive)
        backpropagate(child, config.backprop_mode)
        iteration += 1

        if iteration_callback is not None:
            iteration_callback(nodes=nodes, archive=archive, k=k,
                               iteration=iteration, evaluations=counting.count)
        if counting.count >= next_mark:
            trace.append((counting.count, snapshot_igd(), archive.value))
            next_mark = (counting.count // config.snapshot_every + 1) * config.snapshot_every

    if trace[-1][0] != counting.count:
        trace.append((counting.count, snapshot_igd(), archive.value))

    final_pop = archive_population()
    record = RunRecord(
        algorithm=algorithm_id,
        problem=problem.name,
        seed=int(seed),
        run_index=run_index,
        final_igd=trace[-1][1],
        final_hv=normalized_front_hv(final_pop.objectives, reference_front),
        evaluations=counting.count,
        trace=trace,
        params={
            "f": config.sampling_ratio, "E": config.total_evaluations,
            "e": e, "n": n, "p_cov": config.coverage_prob, "k": k, "d_n": d_n,
            "backprop_mode": config.backprop_mode, "hv_samples": config.hv_samples,
            "init_visits": config.init_visits,
            "eta_c": config.operators.eta_crossover,
            "eta_m": config.operators.eta_mutation,
            "crossover_rate": config.operators.crossover_rate,
            "mutation_prob": config.operators.mutation_prob,
            "d": problem.d, "m": problem.m,
        },
        warnings=warnings,
    )
    record.validate()
    return final_pop, record
