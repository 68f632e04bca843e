from __future__ import annotations

import dataclasses
import time
from dataclasses import dataclass, field

import numpy as np

from ..encoder import QuboModel, energy

DEFAULT_ITERATIONS = {"sa": 2000, "simcim": 2000, "sb": 2000}


@dataclass(frozen=True)
class SolverConfig:
    """Flat solver settings; ``None`` means "derive from the model" at solve time.

    Keys prefixed ``sa_``, ``cim_`` and ``sb_`` only affect their own solver.
    """

    seed: int = 0
    iterations: int | None = None
    attempts: int = 100
    # simulated annealing: geometric inverse-temperature schedule
    sa_beta_start: float | None = None
    sa_beta_end: float | None = None
    # SimCIM amplitude dynamics
    cim_dt: float = 0.1
    cim_pump_start: float = -2.0
    cim_pump_end: float = 0.3
    cim_gain: float = 40.0
    cim_noise: float = 0.4
    cim_init: float = 0.3
    # simulated bifurcation (ballistic)
    sb_variant: str = "ballistic"
    sb_dt: float = 0.25
    sb_detuning: float = 0.5
    sb_gain: float = 60.0
    sb_init: float = 1.0

    def __post_init__(self):
        if self.seed < 0:
            raise ValueError("seed must be a non-negative integer")
        if self.iterations is not None and self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if self.attempts < 1:
            raise ValueError("attempts must be >= 1")
        if self.cim_dt <= 0 or self.sb_dt <= 0:
            raise ValueError("time steps must be positive")
        if self.sb_variant not in ("ballistic", "discrete"):
            raise ValueError(f"unsupported SB variant {self.sb_variant!r}")

    def steps(self, solver: str) -> int:
        return self.iterations if self.iterations is not None else DEFAULT_ITERATIONS[solver]

    def replace(self, **changes) -> "SolverConfig":
        return dataclasses.replace(self, **changes)

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


@dataclass(frozen=True, eq=False)
class SolveResult:
    best_bits: np.ndarray
    best_energy: float
    per_attempt: tuple[tuple[float, float], ...]
    wall_time_total: float
    attempt_bits: np.ndarray = field(repr=False)

    @property
    def attempt_energies(self) -> np.ndarray:
        return np.array([e for e, _ in self.per_attempt])


def attempt_rng(seed: int, attempt: int) -> np.random.Generator:
    """Independent stream per attempt so any subset of attempts can be replayed."""
    return np.random.default_rng([seed, attempt])


def sign_spins(x: np.ndarray) -> np.ndarray:
    return np.where(x < 0, -1, 1).astype(np.int8)


def finish(model: QuboModel, bits: np.ndarray, t0: float) -> SolveResult:
    """Package a batch of final bitstrings (one row per attempt)."""
    bits = np.ascontiguousarray(bits, dtype=np.int8)
    energies = np.atleast_1d(energy(model, bits))
    total = time.perf_counter() - t0
    # attempts run as one vectorised batch, so wall time is shared evenly
    per = total / len(bits)
    best = int(np.argmin(energies))
    return SolveResult(
        best_bits=bits[best].copy(),
        best_energy=float(energies[best]),
        per_attempt=tuple((float(e), per) for e in energies),
        wall_time_total=total,
        attempt_bits=bits,
    )
