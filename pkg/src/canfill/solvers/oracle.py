"""Exact reference solvers: combinatorial search over placements and QUBO enumeration."""

from __future__ import annotations

import itertools

import numpy as np

from ..core import Assignment, ProblemInstance, validate_assignment
from ..encoder import QuboModel

MAX_ORACLE_N = 16
MAX_BRUTE_D = 24


class Infeasible(Exception):
    """No placement satisfies the capacity and minimum-fill limits."""


class TooLarge(ValueError):
    pass


def oracle_exact(inst: ProblemInstance) -> tuple[int, Assignment]:
    """Minimum canister count and one optimal placement.

    Canister labels are assigned in first-use order (element 0 goes to canister
    0, a new canister always gets the next free label), which visits every
    packing once instead of once per relabelling. Partial placements that
    overflow a canister are cut immediately.
    """
    if inst.n > MAX_ORACLE_N:
        raise TooLarge(f"oracle limited to n <= {MAX_ORACLE_N}, got n={inst.n}")
    n, m, p = inst.n, inst.m, inst.p
    loads = [0] * m
    counts = [0] * m
    place = [0] * n
    best: list = [m + 1, None]

    def fill_ok(opened):
        return all(counts[j] >= inst.n_min for j in range(opened))

    def visit(i, opened):
        if opened >= best[0]:
            return
        if i == n:
            if fill_ok(opened):
                best[0], best[1] = opened, tuple(place)
            return
        # elements left must be able to top up underfilled canisters
        short = sum(max(0, inst.n_min - counts[j]) for j in range(opened))
        if short > n - i:
            return
        for j in range(min(opened + 1, m)):
            if loads[j] + p[i] > inst.p_max:
                continue
            loads[j] += p[i]
            counts[j] += 1
            place[i] = j
            visit(i + 1, max(opened, j + 1))
            loads[j] -= p[i]
            counts[j] -= 1

    visit(0, 0)
    if best[1] is None:
        raise Infeasible(f"{inst.name}: no feasible placement into {m} canisters")
    return best[0], Assignment(best[1])


def oracle_naive(inst: ProblemInstance) -> tuple[int, Assignment]:
    """Plain m**n enumeration without symmetry reduction or pruning."""
    best = None
    for combo in itertools.product(range(inst.m), repeat=inst.n):
        asg = Assignment(combo)
        rep = validate_assignment(inst, asg)
        if rep.feasible and (best is None or rep.objective_m < best[0]):
            best = (rep.objective_m, asg)
    if best is None:
        raise Infeasible(f"{inst.name}: no feasible placement into {inst.m} canisters")
    return best


def _all_bits(width: int) -> np.ndarray:
    """Rows are every bitstring of ``width`` bits in increasing integer order (MSB first)."""
    codes = np.arange(2 ** width, dtype=np.int64)
    shifts = np.arange(width - 1, -1, -1, dtype=np.int64)
    return ((codes[:, None] >> shifts) & 1).astype(np.float64)


def enumerate_energies(q: np.ndarray, offset: float, block: int = 256):
    """Yield ``(first_code, energies)`` chunks covering every bitstring in code order.

    Bit 0 of ``z`` is the most significant bit of the code, so code order is
    lexicographic order on ``z``. The vector splits into a high and a low half
    and each chunk is one rank-``D/2`` product.
    """
    D = q.shape[0]
    hi_w = D // 2
    lo_w = D - hi_w
    lo = _all_bits(lo_w)
    q_ll = q[hi_w:, hi_w:]
    q_hl = q[:hi_w, hi_w:]
    e_lo = np.einsum("bi,ij,bj->b", lo, q_ll, lo)
    cross = 2.0 * (q_hl @ lo.T)
    hi = _all_bits(hi_w)
    q_hh = q[:hi_w, :hi_w]
    for start in range(0, len(hi), block):
        h = hi[start:start + block]
        e_hi = np.einsum("bi,ij,bj->b", h, q_hh, h)
        chunk = e_hi[:, None] + e_lo[None, :] + h @ cross + offset
        yield start * len(lo), chunk.ravel()


def code_to_bits(code: int, D: int) -> np.ndarray:
    return np.array([(code >> (D - 1 - i)) & 1 for i in range(D)], dtype=np.int8)


def brute_force_bits(model: QuboModel) -> tuple[np.ndarray, float]:
    """Global QUBO minimum; ties go to the lexicographically smallest bitstring."""
    D = model.dim
    if D > MAX_BRUTE_D:
        raise TooLarge(f"enumeration limited to D <= {MAX_BRUTE_D}, got D={D}")
    best_e, best_code = np.inf, 0
    for first, chunk in enumerate_energies(model.q, model.offset):
        k = int(np.argmin(chunk))
        if chunk[k] < best_e:
            best_e, best_code = float(chunk[k]), first + k
    return code_to_bits(best_code, D), best_e
