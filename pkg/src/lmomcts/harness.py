"""Experiment driver: config parsing, seeded multi-run campaigns, CSV output.

Config files are flat INI-style key/value text with section headers (see
README for the grammar): one ``[experiment]`` section, one
``[problem:<key>]`` section per problem instance and one
``[algorithm:<id>]`` section per algorithm. Unset keys take the standard
defaults (f=0.2, E=100000, e=0.01*E, n=300, p_cov=0.9).

Seeding is fully documented so every number in the output files can be
re-derived: run i of algorithm a uses the 64-bit seed drawn from
``SeedSequence(master_seed, spawn_key=(crc32(a), i))``; in
shared-initial-population mode the initial population of problem p is drawn
from ``SeedSequence(master_seed, spawn_key=(crc32("initial-population"),
crc32(p)))`` and handed to every run.
"""

from __future__ import annotations

import configparser
import io
import json
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from ._kernels import nondominated_mask
from .core import CountingProblem, Population, Problem, RandomStream, random_population
from .indicators import (
    BatchManifest,
    RunRecord,
    igd,
    insensitive_hv,
    insensitive_igd,
    normalized_front_hv,
)
from .inner_ea import OperatorParams, run_nsga2
from .mcts import RunningBounds, SearchConfig, node_evaluation, run_lmomcts
from .problems import ReferenceFront, make_problem, sample_reference_front

SEED_POLICIES = ("independent", "shared-initial-population")
ALGORITHM_KINDS = ("lmomcts", "nsga2")

_FLOAT_FMT = "{:.9e}"  # >= 9 significant digits, lossless enough for rederivation


@dataclass(frozen=True)
class ProblemSpec:
    key: str
    name: str
    m: int = 3
    d: int = 300


@dataclass(frozen=True)
class AlgorithmSpec:
    id: str
    kind: str
    f: float = 0.2
    E: int = 100_000
    e: int | None = None
    n: int = 300
    p_cov: float = 0.9
    backprop_mode: str = "sum"
    hv_samples: int = 10_000
    init_visits: int = 1

    def search_config(self, snapshot_every: int) -> SearchConfig:
        return SearchConfig(
            sampling_ratio=self.f,
            total_evaluations=self.E,
            expansion_evaluations=self.e,
            population_size=self.n,
            coverage_prob=self.p_cov,
            backprop_mode=self.backprop_mode,
            hv_samples=self.hv_samples,
            init_visits=self.init_visits,
            snapshot_every=snapshot_every,
        )


@dataclass(frozen=True)
class ExperimentConfig:
    problems: tuple[ProblemSpec, ...]
    algorithms: tuple[AlgorithmSpec, ...]
    n_r: int = 20
    master_seed: int = 0
    seed_policy: str = "independent"
    output_dir: str = "results"
    snapshot_every: int = 1_000
    workers: int = 1
    reference_front_size: int = 10_000


class ConfigError(ValueError):
    pass


def _validate(config: ExperimentConfig) -> ExperimentConfig:
    if not config.problems:
        raise ConfigError("at least one [problem:<key>] section is required")
    if config.n_r < 1:
        raise ConfigError(f"n_r ({config.n_r}) must be >= 1")
    if config.seed_policy not in SEED_POLICIES:
        raise ConfigError(f"seed_policy must be one of {SEED_POLICIES}, got {config.seed_policy!r}")
    if config.snapshot_every < 1:
        raise ConfigError("snapshot_every must be >= 1")
    if config.workers < 1:
        raise ConfigError("workers must be >= 1")
    if config.reference_front_size < 100:
        raise ConfigError("reference_front_size must be >= 100")
    seen = set()
    for spec in config.algorithms:
        if spec.id in seen:
            raise ConfigError(f"duplicate algorithm id {spec.id!r}")
        seen.add(spec.id)
        if spec.kind not in ALGORITHM_KINDS:
            raise ConfigError(f"algorithm:{spec.id}: kind must be one of {ALGORITHM_KINDS}")
        e = spec.e if spec.e is not None else max(1, round(0.01 * spec.E))
        if not spec.n <= e <= spec.E:
            raise ConfigError(
                f"algorithm:{spec.id}: budgets must satisfy n <= e <= E "
                f"(n={spec.n}, e={e}, E={spec.E})"
            )
        if not 0.0 < spec.f <= 1.0:
            raise ConfigError(f"algorithm:{spec.id}: f must lie in (0, 1]")
        if not 0.0 < spec.p_cov < 1.0:
            raise ConfigError(f"algorithm:{spec.id}: p_cov must lie in (0, 1)")
        if spec.backprop_mode not in ("sum", "mean"):
            raise ConfigError(f"algorithm:{spec.id}: backprop_mode must be 'sum' or 'mean'")
    keys = set()
    for spec in config.problems:
        if spec.key in keys:
            raise ConfigError(f"duplicate problem key {spec.key!r}")
        keys.add(spec.key)
        make_problem(spec.name, spec.m, spec.d)  # resolvable + parameter check
    return config


def parse_config_text(text: str) -> ExperimentConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    parser.optionxform = str  # keys are case-sensitive (E and e are distinct)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from exc

    exp = parser["experiment"] if parser.has_section("experiment") else {}
    problems = []
    algorithms = []
    for section in parser.sections():
        if section.startswith("problem:"):
            sec = parser[section]
            problems.append(ProblemSpec(
                key=section.split(":", 1)[1],
                name=sec.get("name", section.split(":", 1)[1]).upper(),
                m=int(sec.get("m", 3)),
                d=int(sec.get("d", 300)),
            ))
        elif section.startswith("algorithm:"):
            sec = parser[section]
            algo_id = section.split(":", 1)[1]
            e_raw = sec.get("e", "").strip()
            algorithms.append(AlgorithmSpec(
                id=algo_id,
                kind=sec.get("kind", algo_id).lower(),
                f=float(sec.get("f", 0.2)),
                E=int(sec.get("E", 100_000)),
                e=int(e_raw) if e_raw else None,
                n=int(sec.get("n", 300)),
                p_cov=float(sec.get("p_cov", 0.9)),
                backprop_mode=sec.get("backprop_mode", "sum"),
                hv_samples=int(sec.get("hv_samples", 10_000)),
                init_visits=int(sec.get("init_visits", 1)),
            ))
        elif section != "experiment":
            raise ConfigError(f"unknown section [{section}]")
    if not algorithms:
        algorithms.append(AlgorithmSpec(id="lmomcts", kind="lmomcts"))

    config = ExperimentConfig(
        problems=tuple(problems),
        algorithms=tuple(algorithms),
        n_r=int(exp.get("n_r", 20)),
        master_seed=int(exp.get("master_seed", 0)),
        seed_policy=exp.get("seed_policy", "independent"),
        output_dir=exp.get("output_dir", "results"),
        snapshot_every=int(exp.get("snapshot_every", 1_000)),
        workers=int(exp.get("workers", 1)),
        reference_front_size=int(exp.get("reference_front_size", 10_000)),
    )
    return _validate(config)


def parse_config(path: str | Path) -> ExperimentConfig:
    """Parse and validate an experiment config file."""
    return parse_config_text(Path(path).read_text())


def serialize_config(config: ExperimentConfig) -> str:
    """Canonical text form; parse(serialize(c)) == c."""
    parser = configparser.ConfigParser()
    parser.optionxform = str
    parser["experiment"] = {
        "n_r": str(config.n_r),
        "master_seed": str(config.master_seed),
        "seed_policy": config.seed_policy,
        "output_dir": config.output_dir,
        "snapshot_every": str(config.snapshot_every),
        "workers": str(config.workers),
        "reference_front_size": str(config.reference_front_size),
    }
    for p in config.problems:
        parser[f"problem:{p.key}"] = {"name": p.name, "m": str(p.m), "d": str(p.d)}
    for a in config.algorithms:
        sec = {
            "kind": a.kind,
            "f": repr(a.f),
            "E": str(a.E),
            "n": str(a.n),
            "p_cov": repr(a.p_cov),
            "backprop_mode": a.backprop_mode,
            "hv_samples": str(a.hv_samples),
            "init_visits": str(a.init_visits),
        }
        if a.e is not None:
            sec["e"] = str(a.e)
        parser[f"algorithm:{a.id}"] = sec
    out = io.StringIO()
    parser.write(out)
    return out.getvalue()


# ---------------------------------------------------------------------------
# seeding
# ---------------------------------------------------------------------------

def _crc(text: str) -> int:
    return zlib.crc32(text.encode("utf-8"))


def run_seed(master_seed: int, algorithm_id: str, run_index: int) -> int:
    """64-bit seed for one run, derived from (master, algorithm, index)."""
    ss = np.random.SeedSequence(master_seed, spawn_key=(_crc(algorithm_id), run_index))
    return int(ss.generate_state(1, np.uint64)[0])


def shared_initial_x(master_seed: int, problem_key: str, problem: Problem, n: int) -> np.ndarray:
    """Initial decision matrix shared by all algorithms/runs of one problem."""
    ss = np.random.SeedSequence(
        master_seed, spawn_key=(_crc("initial-population"), _crc(problem_key))
    )
    stream = RandomStream(ss)
    return stream.generator.uniform(problem.lower, problem.upper, size=(n, problem.d))


# ---------------------------------------------------------------------------
# baseline runner: plain full-dimension NSGA-II
# ---------------------------------------------------------------------------

def run_nsga2_baseline(problem: Problem, config: SearchConfig, seed: int,
                       reference_front: ReferenceFront | None = None,
                       initial_x: np.ndarray | None = None,
                       algorithm_id: str = "nsga2",
                       run_index: int = 0) -> tuple[Population, RunRecord]:
    """Full-dimension NSGA-II under the same budget/trace conventions.

    The quality column of the trace is the running maximum of the same
    Monte Carlo node score used by the tree search, so its monotonicity
    convention matches the archived-score trace.
    """
    counting = CountingProblem(problem)
    if reference_front is None:
        reference_front = sample_reference_front(problem.name, problem.m)
    stream = RandomStream(seed)
    init_stream, evo_stream, hv_stream = stream.split(3)

    n = config.population_size
    if initial_x is not None:
        x0 = np.asarray(initial_x, dtype=float)
        pop = Population(x0, counting.evaluate_batch(x0))
    else:
        pop = random_population(counting, n, init_stream)

    bounds = RunningBounds(problem.m)
    bounds.update(pop.objectives)
    best_quality = node_evaluation(pop, bounds, config.hv_samples, hv_stream)

    def snapshot_igd() -> float:
        objs = pop.objectives
        if config.igd_on_nondominated_only:
            objs = objs[nondominated_mask(np.ascontiguousarray(objs))]
        return igd(objs, reference_front)

    trace = [(counting.count, snapshot_igd(), best_quality)]
    next_mark = counting.count + config.snapshot_every

    while counting.count + n <= config.total_evaluations:
        pop = run_nsga2(pop, counting, n, evo_stream, params=config.operators)
        bounds.update(pop.objectives)
        if counting.count >= next_mark:
            quality = node_evaluation(pop, bounds, config.hv_samples, hv_stream)
            best_quality = max(best_quality, quality)
            trace.append((counting.count, snapshot_igd(), best_quality))
            next_mark = (counting.count // config.snapshot_every + 1) * config.snapshot_every

    quality = node_evaluation(pop, bounds, config.hv_samples, hv_stream)
    best_quality = max(best_quality, quality)
    if trace[-1][0] != counting.count:
        trace.append((counting.count, snapshot_igd(), best_quality))

    record = RunRecord(
        algorithm=algorithm_id,
        problem=problem.name,
        seed=int(seed),
        run_index=run_index,
        final_igd=trace[-1][1],
        final_hv=normalized_front_hv(pop.objectives, reference_front),
        evaluations=counting.count,
        trace=trace,
        params={"E": config.total_evaluations, "n": n,
                "eta_c": config.operators.eta_crossover,
                "eta_m": config.operators.eta_mutation,
                "crossover_rate": config.operators.crossover_rate,
                "mutation_prob": config.operators.mutation_prob,
                "d": problem.d, "m": problem.m},
    )
    record.validate()
    return pop, record


# ---------------------------------------------------------------------------
# batch execution and file output
# ---------------------------------------------------------------------------

def _run_one(problem: Problem, spec: AlgorithmSpec, snapshot_every: int, seed: int,
             reference_front: ReferenceFront, initial_x: np.ndarray | None,
             run_index: int) -> RunRecord:
    config = spec.search_config(snapshot_every)
    if spec.kind == "lmomcts":
        _, record = run_lmomcts(problem, config, seed, reference_front=reference_front,
                                initial_x=initial_x, algorithm_id=spec.id,
                                run_index=run_index)
    else:
        _, record = run_nsga2_baseline(problem, config, seed,
                                       reference_front=reference_front,
                                       initial_x=initial_x, algorithm_id=spec.id,
                                       run_index=run_index)
    return record


def _fmt(value: float) -> str:
    return _FLOAT_FMT.format(value)


def _write_run_csv(path: Path, record: RunRecord) -> None:
    lines = ["evaluations,igd,archive_delta"]
    for evaluations, igd_value, delta in record.trace:
        lines.append(f"{evaluations},{_fmt(igd_value)},{_fmt(delta)}")
    path.write_text("\n".join(lines) + "\n")


def _quartiles(values: list[float]) -> list[float]:
    return [float(v) for v in np.percentile(values, [0, 25, 50, 75, 100])]


def emit_boxplot_data(manifests: dict[str, BatchManifest], path: str | Path) -> None:
    """Per-algorithm five-number summaries (linear-interpolation quartiles)
    of the final IGD values, one CSV row per (problem, algorithm)."""
    lines = ["problem,algorithm,igd_min,igd_q1,igd_median,igd_q3,igd_max"]
    for problem_key in sorted(manifests):
        manifest = manifests[problem_key]
        for algorithm in sorted(manifest.records):
            values = [r.final_igd for r in manifest.records[algorithm]]
            stats = ",".join(_fmt(v) for v in _quartiles(values))
            lines.append(f"{problem_key},{algorithm},{stats}")
    Path(path).write_text("\n".join(lines) + "\n")


def _summary_rows(manifests: dict[str, BatchManifest]) -> list[str]:
    rows = []
    for problem_key in sorted(manifests):
        manifest = manifests[problem_key]
        for algorithm in sorted(manifest.records):
            runs = manifest.records[algorithm]
            igds = np.array([r.final_igd for r in runs])
            hvs = np.array([r.final_hv for r in runs])
            rows.append(",".join([
                problem_key, algorithm, str(len(runs)),
                _fmt(igds.mean()), _fmt(igds.min()), _fmt(igds.max()),
                _fmt(hvs.mean()), _fmt(hvs.min()), _fmt(hvs.max()),
                _fmt(insensitive_igd(manifest, algorithm)),
                _fmt(insensitive_hv(manifest, algorithm)),
            ]))
    return rows


SUMMARY_HEADER = ("problem,algorithm,n_r,igd_mean,igd_min,igd_max,"
                  "hv_mean,hv_min,hv_max,insensitive_igd,insensitive_hv")
RUNS_HEADER = "problem,algorithm,run_index,seed,evaluations,final_igd,final_hv"


def run_batch(config: ExperimentConfig) -> dict[str, BatchManifest]:
    """Execute the full campaign and persist every output file.

    Writes one convergence CSV per run, plus runs.csv, summary.csv,
    boxplot.csv and manifest.json in the output directory. Reruns with the
    same config produce byte-identical files. Individual run failures are
    recorded in manifest.json and the batch continues; problems with failed
    runs are excluded from summary metrics.
    """
    _validate(config)
    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    jobs = []
    per_problem: dict[str, tuple[Problem, ReferenceFront, np.ndarray | None]] = {}
    for pspec in config.problems:
        problem = make_problem(pspec.name, pspec.m, pspec.d)
        front = sample_reference_front(pspec.name, pspec.m, config.reference_front_size)
        initial_x = None
        if config.seed_policy == "shared-initial-population":
            sizes = {a.n for a in config.algorithms}
            if len(sizes) != 1:
                raise ConfigError("shared-initial-population requires one common population size")
            initial_x = shared_initial_x(config.master_seed, pspec.key, problem, sizes.pop())
        per_problem[pspec.key] = (problem, front, initial_x)
        for aspec in config.algorithms:
            for run_index in range(config.n_r):
                jobs.append((pspec.key, aspec, run_index))

    def execute(job):
        problem_key, aspec, run_index = job
        problem, front, initial_x = per_problem[problem_key]
        seed = run_seed(config.master_seed, aspec.id, run_index)
        try:
            record = _run_one(problem, aspec, config.snapshot_every, seed,
                              front, initial_x, run_index)
            return job, record, None
        except Exception as exc:  # noqa: BLE001 - failures are data here
            return job, None, f"{type(exc).__name__}: {exc}"

    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(execute, jobs))
    else:
        results = [execute(job) for job in jobs]

    manifests: dict[str, BatchManifest] = {}
    failures: list[dict] = []
    run_entries: list[dict] = []
    runs_rows: list[str] = []
    for (problem_key, aspec, run_index), record, error in results:
        if error is not None:
            failures.append({"problem": problem_key, "algorithm": aspec.id,
                             "run_index": run_index, "error": error})
            continue
        manifests.setdefault(problem_key, BatchManifest(records={}, n_r=config.n_r))
        manifests[problem_key].records.setdefault(aspec.id, []).append(record)
        csv_name = f"{problem_key}__{aspec.id}__run{run_index:03d}.csv"
        _write_run_csv(out_dir / csv_name, record)
        runs_rows.append(",".join([
            problem_key, aspec.id, str(run_index), str(record.seed),
            str(record.evaluations), _fmt(record.final_igd), _fmt(record.final_hv),
        ]))
        run_entries.append({
            "problem": problem_key, "algorithm": aspec.id, "run_index": run_index,
            "seed": record.seed, "evaluations": record.evaluations,
            "file": csv_name, "params": record.params, "warnings": record.warnings,
        })

    complete = {key: m for key, m in manifests.items()
                if all(len(runs) == config.n_r for runs in m.records.values())
                and len(m.records) == len(config.algorithms)}

    (out_dir / "runs.csv").write_text("\n".join([RUNS_HEADER] + sorted(runs_rows)) + "\n")
    (out_dir / "summary.csv").write_text(
        "\n".join([SUMMARY_HEADER] + _summary_rows(complete)) + "\n")
    emit_boxplot_data(complete, out_dir / "boxplot.csv")
    manifest_doc = {
        "config": serialize_config(config),
        "runs": sorted(run_entries, key=lambda r: (r["problem"], r["algorithm"], r["run_index"])),
        "failures": sorted(failures, key=lambda r: (r["problem"], r["algorithm"], r["run_index"])),
    }
    (out_dir / "manifest.json").write_text(json.dumps(manifest_doc, indent=2, sort_keys=True) + "\n")
    return manifests


def recompute_metrics(directory: str | Path) -> list[str]:
    """Rebuild the summary rows from the stored per-run results.

    Reads runs.csv in the given directory and recomputes the batch metrics,
    including the squared-deviation-from-best insensitivity values, purely
    from the persisted per-run finals.
    """
    directory = Path(directory)
    runs_path = directory / "runs.csv"
    if not runs_path.exists():
        raise FileNotFoundError(f"no runs.csv under {directory}")
    grouped: dict[str, dict[str, list[RunRecord]]] = {}
    lines = runs_path.read_text().strip().splitlines()
    if lines[0] != RUNS_HEADER:
        raise ValueError(f"unexpected runs.csv header: {lines[0]!r}")
    for line in lines[1:]:
        problem_key, algorithm, run_index, seed, evaluations, final_igd, final_hv = line.split(",")
        record = RunRecord(
            algorithm=algorithm, problem=problem_key, seed=int(seed),
            run_index=int(run_index), final_igd=float(final_igd),
            final_hv=float(final_hv), evaluations=int(evaluations),
        )
        grouped.setdefault(problem_key, {}).setdefault(algorithm, []).append(record)
    manifests = {}
    for problem_key, records in grouped.items():
        n_r = len(next(iter(records.values())))
        manifests[problem_key] = BatchManifest(records=records, n_r=n_r)
    return [SUMMARY_HEADER] + _summary_rows(manifests)
