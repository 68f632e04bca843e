"""Command-line entry point: ``canfill <subcommand> ...``.

Exit codes: 0 ok, 2 usage, 3 I/O, 4 infeasible or unreachable result, 5 internal error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from . import bench
from .core import (
    Assignment,
    InstanceError,
    InvariantError,
    ProblemInstance,
    load_instance,
    validate_assignment,
)
from .dataset import DatasetError, DatasetSpec, generate_dataset, load_dataset
from .encoder import (
    PenaltyWeights,
    build_qubo,
    decode_bits,
    energy,
    export_qubo,
)
from .solvers import DEFAULT_ITERATIONS, SOLVERS, Infeasible, SolverConfig, TooLarge, oracle_exact, solve

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_RESULT, EXIT_INTERNAL = 0, 2, 3, 4, 5


class UsageError(Exception):
    pass


# --- configuration -----------------------------------------------------------

_CFG_FIELDS = {f.name: f for f in dataclasses.fields(SolverConfig)}


def _coerce(name: str, raw: str):
    default = _CFG_FIELDS[name].default
    if raw in ("none", "None", ""):
        return None
    if isinstance(default, bool):
        return raw.lower() in ("1", "true", "yes")
    if isinstance(default, int) and name not in ("sa_beta_start", "sa_beta_end"):
        return int(raw)
    if isinstance(default, str):
        return raw
    if name == "iterations":
        return int(raw)
    return float(raw)


def read_config_file(path) -> dict:
    """Flat ``key = value`` text; ``#`` starts a comment."""
    out = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in _CFG_FIELDS:
            raise UsageError(f"{path}:{lineno}: unknown solver setting {key!r}")
        out[key] = _coerce(key, val)
    return out


def _add_solver_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("solver settings")
    g.add_argument("--config", help="flat key = value solver settings file")
    for name in _CFG_FIELDS:
        if name == "seed":
            continue
        g.add_argument("--" + name.replace("_", "-"), dest="cfg_" + name, default=None)


def _solver_config(args) -> SolverConfig:
    values = read_config_file(args.config) if getattr(args, "config", None) else {}
    for name in _CFG_FIELDS:
        raw = getattr(args, "cfg_" + name, None)
        if raw is not None:
            values[name] = _coerce(name, raw)
    if getattr(args, "seed", None) is not None:
        values["seed"] = args.seed
    try:
        return SolverConfig(**values)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from exc


def _weights(args) -> PenaltyWeights:
    try:
        return PenaltyWeights(args.a_weight, args.b_weight)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _announce(command: str, **settings) -> None:
    print(f"# {command} " + json.dumps(settings, sort_keys=True, default=str), file=sys.stderr)


def _instance(arg: str) -> ProblemInstance:
    if arg.lstrip().startswith("{"):
        try:
            return ProblemInstance.from_dict(json.loads(arg))
        except json.JSONDecodeError as exc:
            raise UsageError(f"inline instance is not valid JSON: {exc}") from exc
    return load_instance(arg)


def _emit(payload: dict, fmt: str, out: str | None, csv_rows=None) -> None:
    if fmt == "json":
        text = json.dumps(payload, indent=1, sort_keys=True) + "\n"
    elif fmt == "csv":
        rows = csv_rows if csv_rows is not None else [payload]
        keys = list(rows[0])
        lines = [",".join(keys)]
        for r in rows:
            lines.append(",".join(_csv_cell(r[k]) for k in keys))
        text = "\n".join(lines) + "\n"
    else:
        text = "".join(f"{k}: {_text_cell(v)}\n" for k, v in payload.items())
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _csv_cell(v) -> str:
    if isinstance(v, (list, tuple)):
        return " ".join(str(x) for x in v)
    if isinstance(v, bool):
        return str(v).lower()
    return "" if v is None else str(v)


def _text_cell(v) -> str:
    if isinstance(v, (list, tuple)):
        return " ".join(str(x) for x in v)
    return str(v)


# --- commands ----------------------------------------------------------------

def cmd_generate(args) -> int:
    spec = DatasetSpec(seed=args.seed if args.seed is not None else DatasetSpec.seed)
    _announce("generate", out=args.out, **{k: v for k, v in dataclasses.asdict(spec).items() if k != "rows"})
    recs = generate_dataset(spec, args.out)
    print(f"wrote {len(recs)} instances to {args.out}")
    return EXIT_OK


def cmd_encode(args) -> int:
    inst = _instance(args.instance)
    w = _weights(args).resolve(inst.m)
    model = build_qubo(inst, w)
    _announce("encode", instance=inst.name, a_weight=w.a_weight, b_weight=w.b_weight, D=model.dim)
    text = export_qubo(model)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _feasibility_payload(inst, asg) -> dict:
    rep = validate_assignment(inst, asg)
    out = {"assignment": list(asg.canister_of), "used": sorted(asg.used)}
    out.update(rep.to_dict())
    return out


def cmd_solve(args) -> int:
    inst = _instance(args.instance)
    cfg = _solver_config(args)
    w = _weights(args).resolve(inst.m)
    model = build_qubo(inst, w)
    _announce("solve", **{**cfg.as_dict(), "instance": inst.name, "solver": args.solver,
                          "a_weight": w.a_weight, "b_weight": w.b_weight,
                          "iterations": cfg.steps(args.solver)})
    res = solve(args.solver, model, cfg)
    if energy(model, res.best_bits) != res.best_energy:
        raise InvariantError("best energy does not match the returned bitstring")
    payload = {
        "instance": inst.name,
        "solver": args.solver,
        "seed": cfg.seed,
        "attempts": cfg.attempts,
        "bits": "".join(str(int(b)) for b in res.best_bits),
        "energy": res.best_energy,
    }
    asg = decode_bits(inst, model.layout, res.best_bits)
    if isinstance(asg, Assignment):
        payload.update(_feasibility_payload(inst, asg))
    else:
        payload.update({"assignment": None, "feasible": False,
                        "decode_failure": f"element {asg.element} {asg.reason}"})
    _emit(payload, args.format, args.out)
    return EXIT_OK if payload["feasible"] else EXIT_RESULT


def cmd_oracle(args) -> int:
    inst = _instance(args.instance)
    _announce("oracle", instance=inst.name)
    try:
        best, witness = oracle_exact(inst)
    except Infeasible as exc:
        _emit({"instance": inst.name, "feasible": False, "reason": str(exc)}, args.format, args.out)
        return EXIT_RESULT
    _emit({"instance": inst.name, "optimal_m": best, "witness": list(witness.canister_of)},
          args.format, args.out)
    return EXIT_OK


def cmd_validate(args) -> int:
    inst = _instance(args.instance)
    try:
        asg = Assignment(tuple(int(v) for v in args.assignment.replace(",", " ").split()))
    except ValueError as exc:
        raise UsageError(f"bad assignment {args.assignment!r}: {exc}") from exc
    _announce("validate", instance=inst.name, assignment=list(asg.canister_of))
    payload = {"instance": inst.name}
    payload.update(_feasibility_payload(inst, asg))
    _emit(payload, args.format, args.out)
    return EXIT_OK if payload["feasible"] else EXIT_RESULT


def cmd_bench(args) -> int:
    data = load_dataset(args.dataset)
    solvers = args.solvers.split(",")
    cfg = _solver_config(args)
    _announce("bench", **{**cfg.as_dict(), "dataset": args.dataset, "solvers": solvers,
                          "fixed_ta": args.fixed_ta, "jobs": args.jobs,
                          "a_weight": args.a_weight, "b_weight": args.b_weight,
                          "iterations": {s: cfg.steps(s) for s in solvers}})
    records, summaries = bench.run_benchmark(
        data, solvers, cfg, _weights(args), fixed_ta=args.fixed_ta, jobs=args.jobs)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    bench.write_records(records, out / "results.csv")
    bench.write_summary(summaries, out / "summary.csv")
    unsolved = sum(s.unsolved for s in summaries)
    if unsolved:
        print(f"# note: {unsolved} (instance, solver) pairs never reached the optimum; "
              "their TTS is unreachable and excluded from mean/std", file=sys.stderr)
    print(f"wrote {out / 'results.csv'} and {out / 'summary.csv'}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    inst = _instance(args.instance)
    known = args.known_m
    if known is None:
        known, _ = oracle_exact(inst)
    budgets = [int(b) for b in args.budgets.split(",")]
    cfg = _solver_config(args)
    _announce("sweep", **{**cfg.as_dict(), "instance": inst.name, "solver": args.solver,
                          "budgets": budgets, "known_m": known,
                          "fixed_ta_per_step": args.fixed_ta_per_step})
    try:
        rows = bench.sweep(budgets, inst, known, args.solver, cfg, _weights(args),
                           fixed_ta_per_step=args.fixed_ta_per_step)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if args.out:
        bench.write_sweep(rows, args.out)
    else:
        print("budget,theta,t_a_us,tts_us")
        for r in rows:
            print(f"{r.budget},{r.theta!r},{r.t_a_us!r},{r.tts_us!r}")
    return EXIT_OK


def cmd_describe(args) -> int:
    cfg = SolverConfig()
    payload = {"solvers": sorted(SOLVERS)}
    payload.update(cfg.as_dict())
    payload.update({f"iterations_{k}": v for k, v in DEFAULT_ITERATIONS.items()})
    payload["a_weight"] = PenaltyWeights().a_weight
    payload["b_weight"] = "2 * a_weight * m"
    _emit(payload, args.format, args.out)
    return EXIT_OK


# --- parser ------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: usage: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="canfill", description="Canister-filling QUBO toolkit")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, fmt=False, weights=False):
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--out", default=None)
        if fmt:
            sp.add_argument("--format", choices=["json", "csv", "text"], default="json")
        if weights:
            sp.add_argument("--a-weight", type=float, default=1.0)
            sp.add_argument("--b-weight", type=float, default=None)

    sp = sub.add_parser("generate", help="write the synthetic benchmark dataset")
    common(sp)
    sp.set_defaults(func=cmd_generate)

    sp = sub.add_parser("encode", help="export the QUBO of an instance")
    sp.add_argument("instance")
    common(sp, weights=True)
    sp.set_defaults(func=cmd_encode)

    sp = sub.add_parser("solve", help="run one heuristic solver on an instance")
    sp.add_argument("instance")
    sp.add_argument("--solver", choices=sorted(SOLVERS), default="sa")
    common(sp, fmt=True, weights=True)
    _add_solver_flags(sp)
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("oracle", help="exact optimum by enumeration")
    sp.add_argument("instance")
    common(sp, fmt=True)
    sp.set_defaults(func=cmd_oracle)

    sp = sub.add_parser("validate", help="check an assignment against the constraints")
    sp.add_argument("instance")
    sp.add_argument("assignment", help="canister per element, e.g. 0,0,1")
    common(sp, fmt=True)
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("bench", help="time-to-solution benchmark over a dataset")
    sp.add_argument("dataset")
    sp.add_argument("--solvers", default="sa,simcim,sb")
    sp.add_argument("--fixed-ta", type=float, default=None,
                    help="nominal per-attempt time in microseconds instead of measured wall time")
    sp.add_argument("--jobs", type=int, default=1)
    common(sp, weights=True)
    _add_solver_flags(sp)
    sp.set_defaults(func=cmd_bench, out="bench-out")

    sp = sub.add_parser("sweep", help="success probability and TTS versus iteration budget")
    sp.add_argument("instance")
    sp.add_argument("--solver", choices=sorted(SOLVERS), default="sa")
    sp.add_argument("--budgets", required=True, help="comma-separated iteration budgets")
    sp.add_argument("--known-m", type=int, default=None)
    sp.add_argument("--fixed-ta-per-step", type=float, default=None)
    common(sp, weights=True)
    _add_solver_flags(sp)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("describe", help="print every solver default")
    common(sp, fmt=True)
    sp.set_defaults(func=cmd_describe)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # --help or a usage error
        return exc.code
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: usage: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, DatasetError) as exc:
        print(f"error: io: {exc}", file=sys.stderr)
        return EXIT_IO
    except InstanceError as exc:
        # malformed instance files surface as I/O problems
        print(f"error: io: {exc}", file=sys.stderr)
        return EXIT_IO
    except (Infeasible, TooLarge) as exc:
        print(f"error: result: {exc}", file=sys.stderr)
        return EXIT_RESULT
    except InvariantError as exc:
        print(f"error: internal: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except ValueError as exc:
        print(f"error: usage: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # anything else is a bug; keep the one-line contract
        print(f"error: internal: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
