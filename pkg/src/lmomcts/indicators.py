"""Quality indicators: IGD, exact and Monte Carlo hypervolume, and the
squared-deviation-from-best insensitivity metrics computed over run batches.

All indicators assume minimization. Exact hypervolume is available for two
and three objectives and serves as the oracle for the Monte Carlo estimator,
which in turn is what the tree search uses to score nodes (only the ranking
matters there, so the cheap estimate suffices).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._kernels import dominated_count, mean_min_distance, nondominated_mask
from .core import RandomStream
from .problems import ReferenceFront


def igd(approx: np.ndarray, reference: ReferenceFront | np.ndarray) -> float:
    """Mean Euclidean distance from each reference point to its nearest
    approximation point. Lower is better; zero iff every reference point is
    matched exactly."""
    ref = reference.points if isinstance(reference, ReferenceFront) else np.asarray(reference, dtype=float)
    approx = np.asarray(approx, dtype=float)
    if len(approx) == 0 or len(ref) == 0:
        raise ValueError("IGD needs non-empty point sets")
    if approx.shape[1] != ref.shape[1]:
        raise ValueError("approximation and reference dimensionality differ")
    return float(mean_min_distance(np.ascontiguousarray(ref), np.ascontiguousarray(approx)))


def _hv2d(points: np.ndarray, ref: np.ndarray) -> float:
    """Sweep over f1-sorted points, accumulating skyline rectangles."""
    keep = np.all(points <= ref, axis=1)
    pts = points[keep]
    if len(pts) == 0:
        return 0.0
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    pts = pts[order]
    volume = 0.0
    best_f2 = ref[1]
    for f1, f2 in pts:
        if f2 < best_f2:
            volume += (ref[0] - f1) * (best_f2 - f2)
            best_f2 = f2
    return volume


def _hv3d(points: np.ndarray, ref: np.ndarray) -> float:
    """Slice along the third objective, integrating 2-D hypervolume areas."""
    keep = np.all(points <= ref, axis=1)
    pts = points[keep]
    if len(pts) == 0:
        return 0.0
    levels = np.unique(pts[:, 2])
    volume = 0.0
    for t, z in enumerate(levels):
        depth = (levels[t + 1] if t + 1 < len(levels) else ref[2]) - z
        if depth <= 0:
            continue
        active = pts[pts[:, 2] <= z][:, :2]
        volume += _hv2d(active, ref[:2]) * depth
    return volume


def hv_exact(points: np.ndarray, ref: np.ndarray) -> float:
    """Exact hypervolume (Lebesgue measure of the union of [p, ref] boxes).

    Supports m in {2, 3}; points not weakly below the reference point are
    filtered out and contribute nothing. Intended as an oracle for modest
    set sizes (hundreds of points).
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    ref = np.asarray(ref, dtype=float)
    m = ref.shape[0]
    if points.shape[1] != m:
        raise ValueError("points and reference point dimensionality differ")
    if m == 2:
        return float(_hv2d(points, ref))
    if m == 3:
        return float(_hv3d(points, ref))
    raise ValueError(f"exact hypervolume supports m in {{2, 3}}, got m={m} (use hv_monte_carlo)")


def hv_monte_carlo(points: np.ndarray, ref: np.ndarray, samples: int,
                   rng: RandomStream) -> float:
    """Unbiased hypervolume estimate from uniform sampling.

    The sampling box spans from the point-wise ideal of the (filtered)
    points to the reference point; the estimate is the dominated fraction
    of the samples times the box volume. A degenerate box yields 0.
    """
    if samples < 1:
        raise ValueError("need at least one sample")
    points = np.atleast_2d(np.asarray(points, dtype=float))
    ref = np.asarray(ref, dtype=float)
    keep = np.all(points <= ref, axis=1)
    pts = points[keep]
    if len(pts) == 0:
        return 0.0
    ideal = pts.min(axis=0)
    volume = float(np.prod(ref - ideal))
    if volume <= 0.0:
        return 0.0
    draws = rng.generator.uniform(ideal, ref, size=(samples, ref.shape[0]))
    hits = dominated_count(np.ascontiguousarray(pts), draws)
    return hits / samples * volume


def normalized_front_hv(objectives: np.ndarray, reference: ReferenceFront,
                        ref_value: float = 1.1) -> float:
    """Exact hypervolume of the non-dominated front after normalizing
    objectives by the reference front's ideal/nadir, with the reference
    point at `ref_value` per normalized objective.

    This is the reported final-HV convention; normalizing against the true
    front's bounds makes values comparable across algorithms and runs.
    """
    objectives = np.asarray(objectives, dtype=float)
    pts = reference.points
    ideal = pts.min(axis=0)
    span = pts.max(axis=0) - ideal
    span = np.where(span > 1e-12, span, 1.0)
    front = objectives[nondominated_mask(np.ascontiguousarray(objectives))]
    norm = (front - ideal) / span
    return hv_exact(norm, np.full(objectives.shape[1], ref_value))


@dataclass
class RunRecord:
    """Per-run result: final indicator values plus the convergence trace.

    The trace holds (evaluation count, IGD, quality value) triples at
    strictly increasing evaluation counts; the quality value column is the
    archived best hypervolume estimate. The final IGD equals the last trace
    entry's IGD.
    """

    algorithm: str
    problem: str
    seed: int
    run_index: int
    final_igd: float
    final_hv: float
    evaluations: int
    trace: list[tuple[int, float, float]] = field(default_factory=list)
    params: dict = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)

    def validate(self) -> None:
        counts = [t[0] for t in self.trace]
        if any(b <= a for a, b in zip(counts, counts[1:])):
            raise ValueError("trace evaluation counts must be strictly increasing")
        if self.trace and self.trace[-1][1] != self.final_igd:
            raise ValueError("final IGD must match the last trace entry")


@dataclass
class BatchManifest:
    """All runs of one problem instance, grouped by algorithm id."""

    records: dict[str, list[RunRecord]]
    n_r: int

    def validate(self) -> None:
        for algorithm, runs in self.records.items():
            if len(runs) != self.n_r:
                raise ValueError(
                    f"algorithm {algorithm!r} has {len(runs)} runs, expected n_r={self.n_r}"
                )

    def algorithms(self) -> list[str]:
        return list(self.records)


def _insensitivity(manifest: BatchManifest, algorithm: str, metric, anchor) -> float:
    manifest.validate()
    if algorithm not in manifest.records:
        raise ValueError(f"unknown algorithm {algorithm!r}")
    all_values = [metric(r) for runs in manifest.records.values() for r in runs]
    best = anchor(all_values)
    own = np.asarray([metric(r) for r in manifest.records[algorithm]], dtype=float)
    return float(np.sum((own - best) ** 2) / manifest.n_r)


def insensitive_igd(manifest: BatchManifest, algorithm: str) -> float:
    """Mean squared deviation of the algorithm's per-run IGD from the best
    (minimum) single-run IGD across all compared algorithms."""
    return _insensitivity(manifest, algorithm, lambda r: r.final_igd, min)


def insensitive_hv(manifest: BatchManifest, algorithm: str) -> float:
    """Mirror of the IGD variant, anchored at the maximum single-run HV."""
    return _insensitivity(manifest, algorithm, lambda r: r.final_hv, max)
