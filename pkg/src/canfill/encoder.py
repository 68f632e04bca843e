"""QUBO construction for canister filling, bit (de)coding and the Ising mapping.

Variable order over the flat vector ``z`` of length ``D``::

    x[i, j]  element i in canister j          i*m + j
    y[j]     canister j in use                n*m + j
    a[l, j]  capacity slack bit l of j        n*m + m + j*s + l
    b[l, j]  fill slack bit l of j            n*m + m + m*s + j*k + l

Slack values are little-endian: bit ``l`` carries weight ``2**l``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import Assignment, InstanceError, ProblemInstance, validate_assignment


@dataclass(frozen=True)
class VariableLayout:
    n: int
    m: int
    s: int
    k: int

    @property
    def D(self) -> int:
        return self.m * (1 + self.n + self.s + self.k)

    def idx_x(self, i: int, j: int) -> int:
        return i * self.m + j

    def idx_y(self, j: int) -> int:
        return self.n * self.m + j

    def idx_a(self, l: int, j: int) -> int:
        return self.n * self.m + self.m + j * self.s + l

    def idx_b(self, l: int, j: int) -> int:
        return self.n * self.m + self.m + self.m * self.s + j * self.k + l


def slack_bits(limit: int) -> int:
    """Bits needed to represent every integer in ``0..limit``."""
    return math.ceil(math.log2(limit + 1)) if limit > 0 else 0


def build_layout(inst: ProblemInstance) -> VariableLayout:
    s = slack_bits(inst.p_max)
    # minimum fill of one is implied by usage, so the fill block is dropped
    k = 0 if inst.n_min == 1 else slack_bits(inst.n - inst.n_min)
    return VariableLayout(n=inst.n, m=inst.m, s=s, k=k)


@dataclass(frozen=True)
class PenaltyWeights:
    a_weight: float = 1.0
    b_weight: float | None = None

    def __post_init__(self):
        if not self.a_weight > 0:
            raise ValueError(f"objective weight must be positive, got {self.a_weight}")
        if self.b_weight is not None and not self.b_weight > 0:
            raise ValueError(f"penalty weight must be positive, got {self.b_weight}")

    def resolve(self, m: int) -> "PenaltyWeights":
        """Fill in the default penalty ``B = 2*A*m`` if it was left unset."""
        if self.b_weight is not None:
            return self
        return PenaltyWeights(self.a_weight, 2 * self.a_weight * m)


@dataclass(frozen=True, eq=False)
class QuboModel:
    q: np.ndarray
    offset: float
    layout: VariableLayout
    weights: PenaltyWeights

    @property
    def dim(self) -> int:
        return self.q.shape[0]


@dataclass(frozen=True, eq=False)
class IsingModel:
    h: np.ndarray
    j: np.ndarray
    ising_offset: float

    @property
    def dim(self) -> int:
        return self.h.shape[0]


class _Builder:
    def __init__(self, dim: int):
        self.q = np.zeros((dim, dim), dtype=np.float64)
        self.offset = 0.0

    def linear(self, idx: int, coef: float) -> None:
        self.q[idx, idx] += coef

    def pair(self, u: int, v: int, coef: float) -> None:
        # coef multiplies z_u * z_v in the energy; split over both triangles
        if u == v:
            self.q[u, u] += coef
        else:
            self.q[u, v] += coef / 2
            self.q[v, u] += coef / 2

    def square(self, terms: list[tuple[int, float]], const: float, scale: float) -> None:
        """Add ``scale * (sum(c * z) + const)**2`` using ``z**2 == z``."""
        for a, (u, cu) in enumerate(terms):
            self.linear(u, scale * (cu * cu + 2 * cu * const))
            for v, cv in terms[a + 1:]:
                self.pair(u, v, scale * 2 * cu * cv)
        self.offset += scale * const * const


def build_qubo(inst: ProblemInstance, weights: PenaltyWeights | None = None) -> QuboModel:
    """Composite energy ``A * sum(y) + B * (capacity + one-hot + fill + usage)``."""
    w = (weights or PenaltyWeights()).resolve(inst.m)
    A, B = w.a_weight, w.b_weight
    lay = build_layout(inst)
    bld = _Builder(lay.D)
    n, m = inst.n, inst.m

    for j in range(m):
        bld.linear(lay.idx_y(j), A)

    for j in range(m):
        terms = [(lay.idx_x(i, j), inst.p[i]) for i in range(n)]
        terms += [(lay.idx_a(l, j), 2 ** l) for l in range(lay.s)]
        bld.square(terms, -inst.p_max, B)

    for i in range(n):
        bld.square([(lay.idx_x(i, j), 1) for j in range(m)], -1, B)

    if lay.k:
        for j in range(m):
            terms = [(lay.idx_x(i, j), 1) for i in range(n)]
            terms += [(lay.idx_b(l, j), -(2 ** l)) for l in range(lay.k)]
            terms.append((lay.idx_y(j), -inst.n_min))
            bld.square(terms, 0, B)

    for i in range(n):
        for j in range(m):
            bld.linear(lay.idx_x(i, j), B)
            bld.pair(lay.idx_x(i, j), lay.idx_y(j), -B)

    q = bld.q
    q.setflags(write=False)
    return QuboModel(q=q, offset=float(bld.offset), layout=lay, weights=w)


def _as_bits(z, dim: int) -> np.ndarray:
    z = np.asarray(z)
    if z.shape[-1] != dim:
        raise InstanceError(f"bit vector has length {z.shape[-1]}, model has D={dim}")
    return z


def energy(model: QuboModel, z) -> float:
    """``z^T Q z + offset``; ``z`` may be a single vector or a batch of rows."""
    z = _as_bits(z, model.dim).astype(np.float64)
    if z.ndim == 1:
        return float(z @ model.q @ z + model.offset)
    return np.einsum("bi,ij,bj->b", z, model.q, z) + model.offset


def usage_count(model: QuboModel, z) -> np.ndarray | int:
    lay = model.layout
    z = _as_bits(z, model.dim)
    ys = z[..., lay.n * lay.m: lay.n * lay.m + lay.m]
    return ys.sum(axis=-1)


def penalty(model: QuboModel, z):
    """Energy left after removing the weighted canister count."""
    return energy(model, z) - model.weights.a_weight * usage_count(model, z)


def _write_bits(z: np.ndarray, value: int, indices: list[int]) -> None:
    for l, idx in enumerate(indices):
        z[idx] = (value >> l) & 1


def encode_assignment(inst: ProblemInstance, layout: VariableLayout, asg: Assignment) -> np.ndarray:
    """Bitstring of a feasible assignment with all slack bits set to zero the penalty."""
    rep = validate_assignment(inst, asg)
    if not rep.feasible:
        raise InstanceError(
            "cannot encode an infeasible assignment: "
            f"capacity {list(rep.capacity_violations)}, underfill {list(rep.underfill_violations)}"
        )
    z = np.zeros(layout.D, dtype=np.int8)
    for i, j in enumerate(asg.canister_of):
        z[layout.idx_x(i, j)] = 1
    loads = asg.loads(inst.p, inst.m)
    counts = asg.counts(inst.m)
    for j in range(inst.m):
        y = int(j in asg.used)
        z[layout.idx_y(j)] = y
        _write_bits(z, inst.p_max - loads[j], [layout.idx_a(l, j) for l in range(layout.s)])
        if layout.k:
            extra = counts[j] - inst.n_min * y
            _write_bits(z, extra, [layout.idx_b(l, j) for l in range(layout.k)])
    return z


@dataclass(frozen=True)
class DecodeFailure:
    """Bitstring whose placement bits do not put every element in exactly one canister."""

    element: int
    reason: str

    def __bool__(self):
        return False


def decode_bits(inst: ProblemInstance, layout: VariableLayout, z) -> Assignment | DecodeFailure:
    z = _as_bits(z, layout.D)
    x = np.asarray(z[: layout.n * layout.m]).reshape(layout.n, layout.m)
    canister_of = []
    for i in range(layout.n):
        hits = np.flatnonzero(x[i])
        if len(hits) == 0:
            return DecodeFailure(i, "unassigned")
        if len(hits) > 1:
            return DecodeFailure(i, "multiply assigned")
        canister_of.append(int(hits[0]))
    return Assignment(tuple(canister_of))


def qubo_to_ising(model: QuboModel) -> IsingModel:
    """Substitute ``z = (sigma + 1) / 2``; energy becomes ``s^T J s + h^T s + c``."""
    q = model.q
    j = q / 4.0
    np.fill_diagonal(j, 0.0)
    h = q.sum(axis=1) / 2.0
    const = model.offset + (q.sum() + np.trace(q)) / 4.0
    j.setflags(write=False)
    return IsingModel(h=h, j=j, ising_offset=float(const))


def ising_energy(ising: IsingModel, sigma) -> float:
    sigma = np.asarray(sigma, dtype=np.float64)
    if sigma.ndim == 1:
        return float(sigma @ ising.j @ sigma + ising.h @ sigma + ising.ising_offset)
    return np.einsum("bi,ij,bj->b", sigma, ising.j, sigma) + sigma @ ising.h + ising.ising_offset


def spins_to_bits(sigma) -> np.ndarray:
    return ((np.asarray(sigma) + 1) // 2).astype(np.int8)


def _fmt(v: float) -> str:
    return str(int(v)) if float(v).is_integer() else repr(float(v))


def export_qubo(model: QuboModel) -> str:
    """Text export: ``D offset`` header, then ``i j value`` for nonzero upper-triangle entries.

    Off-diagonal values are the stored symmetric entries; the lower triangle mirrors them.
    """
    lines = [f"{model.dim} {_fmt(model.offset)}"]
    rows, cols = np.nonzero(np.triu(model.q))
    for i, j in zip(rows, cols):
        lines.append(f"{i} {j} {_fmt(model.q[i, j])}")
    return "\n".join(lines) + "\n"


def read_qubo_export(path) -> tuple[np.ndarray, float]:
    text = Path(path).read_text().split("\n")
    dim_s, off_s = text[0].split()
    q = np.zeros((int(dim_s), int(dim_s)))
    for line in text[1:]:
        if not line.strip():
            continue
        i, j, v = line.split()
        q[int(i), int(j)] = q[int(j), int(i)] = float(v)
    return q, float(off_s)
