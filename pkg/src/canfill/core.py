"""Canister-filling problem model: instances, assignments and feasibility checks."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence


class InstanceError(ValueError):
    """Raised when an instance or assignment violates its structural invariants."""


class InvariantError(RuntimeError):
    """An internal consistency check failed; indicates a bug, not bad input."""


@dataclass(frozen=True)
class ProblemInstance:
    """One canister-filling task.

    ``p`` holds integer heat outputs, ``p_max`` the per-canister heat limit and
    ``n_min`` the minimum number of elements in any canister that is used.
    """

    name: str
    n: int
    m: int
    p: tuple[int, ...]
    p_max: int
    n_min: int = 1

    def __post_init__(self):
        object.__setattr__(self, "p", tuple(int(v) for v in self.p))
        if self.n < 1:
            raise InstanceError(f"{self.name}: n must be >= 1, got {self.n}")
        if self.m < 1:
            raise InstanceError(f"{self.name}: m must be >= 1, got {self.m}")
        if len(self.p) != self.n:
            raise InstanceError(f"{self.name}: expected {self.n} heat outputs, got {len(self.p)}")
        if min(self.p) < 1:
            raise InstanceError(f"{self.name}: heat outputs must be positive integers")
        if self.p_max < max(self.p):
            raise InstanceError(
                f"{self.name}: p_max={self.p_max} is below the largest heat output {max(self.p)}"
            )
        if not 1 <= self.n_min <= self.n:
            raise InstanceError(f"{self.name}: n_min must lie in [1, n], got {self.n_min}")

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "n": self.n,
            "m": self.m,
            "p": list(self.p),
            "p_max": self.p_max,
            "n_min": self.n_min,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ProblemInstance":
        try:
            return cls(
                name=str(data["name"]),
                n=int(data["n"]),
                m=int(data["m"]),
                p=tuple(data["p"]),
                p_max=int(data["p_max"]),
                n_min=int(data.get("n_min", 1)),
            )
        except (KeyError, TypeError) as exc:
            raise InstanceError(f"malformed instance record: {exc}") from exc


def save_instance(inst: ProblemInstance, path) -> None:
    Path(path).write_text(json.dumps(inst.to_dict(), sort_keys=True) + "\n")


def load_instance(path) -> ProblemInstance:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise InstanceError(f"{path}: not valid JSON ({exc})") from exc
    try:
        return ProblemInstance.from_dict(data)
    except InstanceError as exc:
        raise InstanceError(f"{path}: {exc}") from exc


@dataclass(frozen=True)
class Assignment:
    """Element-to-canister placement; ``used`` is derived from ``canister_of``."""

    canister_of: tuple[int, ...]
    used: frozenset[int] = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "canister_of", tuple(int(j) for j in self.canister_of))
        if not self.canister_of:
            raise InstanceError("an assignment needs at least one element")
        if min(self.canister_of) < 0:
            raise InstanceError("canister indices must be non-negative")
        object.__setattr__(self, "used", frozenset(self.canister_of))

    def __len__(self):
        return len(self.canister_of)

    def loads(self, p: Sequence[int], m: int) -> list[int]:
        out = [0] * m
        for i, j in enumerate(self.canister_of):
            out[j] += p[i]
        return out

    def counts(self, m: int) -> list[int]:
        out = [0] * m
        for j in self.canister_of:
            out[j] += 1
        return out


@dataclass(frozen=True)
class FeasibilityReport:
    feasible: bool
    capacity_violations: tuple[tuple[int, int, int], ...]
    underfill_violations: tuple[tuple[int, int, int], ...]
    objective_m: int

    def to_dict(self) -> dict:
        return {
            "feasible": self.feasible,
            "capacity_violations": [list(v) for v in self.capacity_violations],
            "underfill_violations": [list(v) for v in self.underfill_violations],
            "objective_m": self.objective_m,
        }


def objective(asg: Assignment) -> int:
    """Number of canisters in use."""
    return len(asg.used)


def check_shape(inst: ProblemInstance, asg: Assignment) -> None:
    if len(asg) != inst.n:
        raise InstanceError(f"assignment has {len(asg)} entries, instance has n={inst.n}")
    if max(asg.canister_of) >= inst.m:
        raise InstanceError(f"canister index {max(asg.canister_of)} out of range for m={inst.m}")


def validate_assignment(inst: ProblemInstance, asg: Assignment) -> FeasibilityReport:
    """Check capacity and minimum-fill constraints for ``asg``.

    Each element sits in exactly one canister by construction of
    :class:`Assignment`, and canister usage is read off the placement, so only
    the heat limit and the minimum fill of used canisters can fail.
    """
    check_shape(inst, asg)
    loads = asg.loads(inst.p, inst.m)
    counts = asg.counts(inst.m)
    over = tuple((j, loads[j], inst.p_max) for j in range(inst.m) if loads[j] > inst.p_max)
    under = tuple(
        (j, counts[j], inst.n_min) for j in sorted(asg.used) if counts[j] < inst.n_min
    )
    return FeasibilityReport(
        feasible=not over and not under,
        capacity_violations=over,
        underfill_violations=under,
        objective_m=objective(asg),
    )
