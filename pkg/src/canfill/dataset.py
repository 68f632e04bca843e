"""Synthetic benchmark family: small instances whose optimal canister count is known.

Heat outputs are drawn uniformly from ``1..p_max`` and a draw is kept only
once the exact oracle confirms the target optimum. Rows follow the variable
budget of the reference table: ``p_max = 2**s - 1`` with ``s`` chosen per
element count so that ``D = m * (1 + n + s)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import InstanceError, ProblemInstance, load_instance, save_instance
from .encoder import build_layout
from .solvers.oracle import Infeasible, oracle_exact

MANIFEST = "manifest.json"
DISTRIBUTION = "uniform integer heat outputs on [1, p_max], oracle-validated rejection sampling"


class DatasetError(RuntimeError):
    pass


@dataclass(frozen=True)
class Row:
    n: int
    count: int
    s: int
    m: int = 3
    target_m: int = 2

    @property
    def p_max(self) -> int:
        return 2 ** self.s - 1


def _reference_rows() -> tuple[Row, ...]:
    rows = [Row(n=2, count=1, s=2, m=2, target_m=1)]
    for n in range(3, 11):
        rows.append(Row(n=n, count=10, s=3 if n <= 5 else 4))
    return tuple(rows)


@dataclass(frozen=True)
class DatasetSpec:
    rows: tuple[Row, ...] = field(default_factory=_reference_rows)
    n_min: int = 1
    seed: int = 2023
    max_draws: int = 2_000_000
    batch: int = 4096


def _sample(row: Row, spec: DatasetSpec, rng: np.random.Generator, name: str):
    p_max = row.p_max
    lo = (row.target_m - 1) * p_max
    hi = row.target_m * p_max
    drawn = 0
    while drawn < spec.max_draws:
        block = rng.integers(1, p_max + 1, size=(spec.batch, row.n))
        drawn += spec.batch
        totals = block.sum(axis=1)
        for p in block[(totals > lo) & (totals <= hi)]:
            inst = ProblemInstance(name, row.n, row.m, tuple(int(v) for v in p), p_max, spec.n_min)
            try:
                best, witness = oracle_exact(inst)
            except Infeasible:
                continue
            if best == row.target_m:
                return inst, witness, drawn
    raise DatasetError(
        f"row n={row.n} (s={row.s}, m={row.m}): no instance with optimum {row.target_m} "
        f"after {spec.max_draws} draws"
    )


def generate_dataset(spec: DatasetSpec, out_dir) -> list[dict]:
    """Write one JSON file per instance plus ``manifest.json``; return the manifest records."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(spec.seed)
    records = []
    for row in spec.rows:
        for c in range(row.count):
            name = f"n{row.n:02d}_{c:02d}"
            inst, witness, drawn = _sample(row, spec, rng, name)
            fname = f"{name}.json"
            save_instance(inst, out / fname)
            records.append({
                "file": fname,
                "n": inst.n,
                "m": inst.m,
                "s": row.s,
                "p_max": inst.p_max,
                "D": build_layout(inst).D,
                "optimal_m": row.target_m,
                "witness": list(witness.canister_of),
                "draws": drawn,
            })
    manifest = {
        "seed": spec.seed,
        "n_min": spec.n_min,
        "distribution": DISTRIBUTION,
        "instances": records,
    }
    (out / MANIFEST).write_text(json.dumps(manifest, indent=1, sort_keys=True) + "\n")
    return records


def load_dataset(path) -> list[tuple[ProblemInstance, int]]:
    root = Path(path)
    mpath = root / MANIFEST if root.is_dir() else root
    root = mpath.parent
    try:
        manifest = json.loads(mpath.read_text())
    except FileNotFoundError as exc:
        raise DatasetError(f"{mpath}: manifest not found") from exc
    except json.JSONDecodeError as exc:
        raise DatasetError(f"{mpath}: invalid JSON ({exc})") from exc

    out = []
    for rec in manifest.get("instances", []):
        fpath = root / rec["file"]
        if not fpath.exists():
            raise DatasetError(f"{rec['file']}: listed in manifest but missing")
        try:
            inst = load_instance(fpath)
        except InstanceError as exc:
            raise DatasetError(str(exc)) from exc
        for key in ("n", "m", "p_max"):
            if key in rec and rec[key] != getattr(inst, key):
                raise DatasetError(
                    f"{rec['file']}: manifest {key}={rec[key]} disagrees with file ({getattr(inst, key)})"
                )
        out.append((inst, int(rec["optimal_m"])))
    if not out:
        raise DatasetError(f"{mpath}: manifest lists no instances")
    return out
