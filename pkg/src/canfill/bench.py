"""Time-to-solution benchmarking of the heuristic solvers against known optima."""

from __future__ import annotations

import csv
import math
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from typing import Iterable, Sequence

from .core import Assignment, InvariantError, ProblemInstance, validate_assignment
from .encoder import PenaltyWeights, QuboModel, build_qubo, decode_bits, energy
from .solvers import SolverConfig, solve, warm_up

TARGET = 0.99
UNREACHABLE = math.inf


def r99(theta: float) -> float:
    """Repetitions needed for 99% cumulative success; ``inf`` when theta is zero."""
    if not 0.0 <= theta <= 1.0:
        raise ValueError(f"success probability must lie in [0, 1], got {theta}")
    if theta == 0.0:
        return UNREACHABLE
    if theta == 1.0:
        return 1.0
    return math.log(1.0 - TARGET) / math.log(1.0 - theta)


def tts(t_a: float, theta: float) -> float:
    """Time to solution in the units of ``t_a``."""
    if not t_a > 0:
        raise ValueError(f"annealing time must be positive, got {t_a}")
    return t_a * r99(theta)


@dataclass(frozen=True)
class BenchRecord:
    instance: str
    solver: str
    seed: int
    attempts: int
    successes: int
    theta: float
    t_a_us: float
    r99: float
    tts_us: float
    best_m: int | None
    feasible: bool
    wall_total_s: float
    theta_smoothed: float
    n: int = 0


RESULT_COLUMNS = [
    "instance", "solver", "seed", "attempts", "successes", "theta", "t_a_us",
    "r99", "tts_us", "best_m", "feasible", "wall_total_s", "theta_smoothed",
]


@dataclass(frozen=True)
class BenchSummary:
    n: int
    solver: str
    instances: int
    solved: int
    tts_mean_us: float
    tts_std_us: float

    @property
    def success_rate(self) -> float:
        return self.solved / self.instances

    @property
    def unsolved(self) -> int:
        return self.instances - self.solved


SUMMARY_COLUMNS = [f.name for f in fields(BenchSummary)]


def is_success(inst: ProblemInstance, model: QuboModel, bits, known_m: int) -> bool:
    asg = decode_bits(inst, model.layout, bits)
    if not isinstance(asg, Assignment):
        return False
    rep = validate_assignment(inst, asg)
    return rep.feasible and rep.objective_m == known_m


def _describe_best(inst, model, bits):
    asg = decode_bits(inst, model.layout, bits)
    if not isinstance(asg, Assignment):
        return None, False
    rep = validate_assignment(inst, asg)
    return rep.objective_m, rep.feasible


def bench_one(inst: ProblemInstance, known_m: int, solver: str, cfg: SolverConfig,
              weights: PenaltyWeights | None = None, fixed_ta: float | None = None) -> BenchRecord:
    model = build_qubo(inst, weights)
    warm_up(solver)
    res = solve(solver, model, cfg)
    successes = sum(is_success(inst, model, b, known_m) for b in res.attempt_bits)
    attempts = len(res.attempt_bits)
    theta = successes / attempts
    if fixed_ta is not None:
        t_a = fixed_ta
    else:
        t_a = statistics.median(w for _, w in res.per_attempt) * 1e6
    rep = r99(theta)
    best_m, feasible = _describe_best(inst, model, res.best_bits)
    if energy(model, res.best_bits) != res.best_energy:
        raise InvariantError(f"{solver} on {inst.name}: reported energy does not match its bitstring")
    return BenchRecord(
        instance=inst.name,
        solver=solver,
        seed=cfg.seed,
        attempts=attempts,
        successes=successes,
        theta=theta,
        t_a_us=t_a,
        r99=rep,
        tts_us=t_a * rep,
        best_m=best_m,
        feasible=feasible,
        wall_total_s=res.wall_time_total,
        theta_smoothed=(successes + 1) / (attempts + 2),
        n=inst.n,
    )


def summarize(records: Iterable[BenchRecord]) -> list[BenchSummary]:
    """Per (n, solver) mean and sample std of TTS over instances solved at least once."""
    groups: dict[tuple[int, str], list[BenchRecord]] = {}
    for r in records:
        groups.setdefault((r.n, r.solver), []).append(r)
    out = []
    for (n, solver), recs in sorted(groups.items()):
        finite = [r.tts_us for r in recs if math.isfinite(r.tts_us)]
        mean = statistics.fmean(finite) if finite else math.nan
        std = statistics.stdev(finite) if len(finite) > 1 else math.nan
        out.append(BenchSummary(n, solver, len(recs), len(finite), mean, std))
    return out


def _job(args):
    return bench_one(*args)


def run_benchmark(dataset: Sequence[tuple[ProblemInstance, int]], solvers: Sequence[str],
                  cfg: SolverConfig | dict[str, SolverConfig] | None = None,
                  weights: PenaltyWeights | None = None, fixed_ta: float | None = None,
                  jobs: int = 1) -> tuple[list[BenchRecord], list[BenchSummary]]:
    """Run every solver on every instance; ``cfg`` may be shared or given per solver."""
    if not dataset:
        raise ValueError("empty dataset")
    if not solvers:
        raise ValueError("no solvers selected")
    cfgs = cfg if isinstance(cfg, dict) else {s: cfg or SolverConfig() for s in solvers}
    tasks = [
        (inst, known, s, cfgs[s], weights, fixed_ta)
        for inst, known in dataset
        for s in solvers
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_job, tasks))
    else:
        records = [_job(t) for t in tasks]
    return records, summarize(records)


@dataclass(frozen=True)
class SweepRow:
    budget: int
    theta: float
    t_a_us: float
    tts_us: float


def sweep(budgets: Sequence[int], inst: ProblemInstance, known_m: int, solver: str,
          cfg: SolverConfig | None = None, weights: PenaltyWeights | None = None,
          fixed_ta_per_step: float | None = None) -> list[SweepRow]:
    """Success probability and TTS as the per-attempt iteration budget grows.

    With ``fixed_ta_per_step`` the annealing time is the nominal ``budget *
    fixed_ta_per_step`` rather than the measured wall time.
    """
    if len(budgets) < 2:
        raise ValueError("a sweep needs at least two budgets")
    cfg = cfg or SolverConfig()
    rows = []
    for b in budgets:
        fixed = None if fixed_ta_per_step is None else b * fixed_ta_per_step
        rec = bench_one(inst, known_m, solver, cfg.replace(iterations=int(b)), weights, fixed)
        rows.append(SweepRow(int(b), rec.theta, rec.t_a_us, rec.tts_us))
    return rows


def _fmt(v):
    if isinstance(v, bool):
        return str(v).lower()
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_records(records: Iterable[BenchRecord], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RESULT_COLUMNS)
        for r in records:
            d = asdict(r)
            w.writerow([_fmt(d[c]) for c in RESULT_COLUMNS])


def write_summary(summaries: Iterable[BenchSummary], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SUMMARY_COLUMNS)
        for s in summaries:
            d = asdict(s)
            w.writerow([_fmt(d[c]) for c in SUMMARY_COLUMNS])


def write_sweep(rows: Iterable[SweepRow], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["budget", "theta", "t_a_us", "tts_us"])
        for r in rows:
            w.writerow([r.budget, _fmt(r.theta), _fmt(r.t_a_us), _fmt(r.tts_us)])
