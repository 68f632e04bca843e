"""SimCIM: mean-field amplitude dynamics of a coherent Ising machine.

Amplitudes ``c`` start near zero and follow

    c <- clip(c + dt * (pump(t) * c - gain * grad) + noise * N(0, 1), -1, 1)

where ``grad = 2 J c + h`` is the gradient of the Ising energy and the pump
ramps linearly from ``cim_pump_start`` to ``cim_pump_end``. The spin state is
read as ``sign(c)`` after every step and the lowest-energy reading is kept.
"""

from __future__ import annotations

import time

import numpy as np
from numba import njit

from ..encoder import QuboModel, qubo_to_ising
from .base import SolveResult, SolverConfig, attempt_rng, finish


def coupling_scale(j: np.ndarray, h: np.ndarray) -> float:
    """Row-sum bound on the gradient magnitude for spins in [-1, 1]."""
    scale = float(np.max(2.0 * np.abs(j).sum(axis=1) + np.abs(h)))
    return scale if scale > 0 else 1.0


@njit(cache=True)
def bits_energy(q, b):
    D = b.shape[0]
    e = 0.0
    for i in range(D):
        if b[i] != 0.0:
            for k in range(D):
                e += q[i, k] * b[k]
    return e


@njit(cache=True)
def _amplitudes(q, two_j, h, c, pump, noise, dt, gain):
    D = c.shape[0]
    grad = np.empty(D)
    b = np.empty(D)
    best = np.zeros(D)
    best_e = np.inf
    for t in range(pump.shape[0]):
        for i in range(D):
            g = h[i]
            for k in range(D):
                g += two_j[i, k] * c[k]
            grad[i] = g
        for i in range(D):
            v = c[i] + dt * (pump[t] * c[i] - gain * grad[i]) + noise[t, i]
            c[i] = min(1.0, max(-1.0, v))
            b[i] = 0.0 if c[i] < 0.0 else 1.0
        e = bits_energy(q, b)
        if e < best_e:
            best_e = e
            best[:] = b
    return best


def solve_simcim(model: QuboModel, cfg: SolverConfig) -> SolveResult:
    t0 = time.perf_counter()
    ising = qubo_to_ising(model)
    D = model.dim
    steps = cfg.steps("simcim")
    two_j = np.ascontiguousarray(2.0 * ising.j)
    h = np.ascontiguousarray(ising.h)
    q = np.ascontiguousarray(model.q, dtype=np.float64)
    gain = cfg.cim_gain / coupling_scale(ising.j, h)
    pump = np.linspace(cfg.cim_pump_start, cfg.cim_pump_end, steps)

    out = np.empty((cfg.attempts, D))
    for a in range(cfg.attempts):
        rng = attempt_rng(cfg.seed, a)
        c = cfg.cim_init * rng.standard_normal(D)
        noise = cfg.cim_noise * rng.standard_normal((steps, D))
        out[a] = _amplitudes(q, two_j, h, c, pump, noise, cfg.cim_dt, gain)
    return finish(model, out, t0)
