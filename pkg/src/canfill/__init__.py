"""Canister filling as QUBO: encoding, exact oracles, heuristic solvers and TTS benchmarks."""

from .core import (
    Assignment,
    FeasibilityReport,
    InstanceError,
    InvariantError,
    ProblemInstance,
    load_instance,
    save_instance,
    validate_assignment,
)
from .encoder import PenaltyWeights, build_layout, build_qubo, decode_bits, encode_assignment, energy

__version__ = "0.1.0"

__all__ = [
    "Assignment",
    "FeasibilityReport",
    "InstanceError",
    "InvariantError",
    "PenaltyWeights",
    "ProblemInstance",
    "build_layout",
    "build_qubo",
    "decode_bits",
    "encode_assignment",
    "energy",
    "load_instance",
    "save_instance",
    "validate_assignment",
]
