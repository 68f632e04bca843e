"""Single-flip Metropolis simulated annealing on the QUBO."""

from __future__ import annotations

import math
import time

import numpy as np
from numba import njit

from ..encoder import QuboModel
from .base import SolveResult, SolverConfig, attempt_rng, finish


def default_betas(q: np.ndarray) -> tuple[float, float]:
    """Start hot relative to the mean coupling, end cold relative to the smallest one."""
    mags = np.abs(q[q != 0])
    if mags.size == 0:
        return 1.0, 1.0
    return 0.1 / mags.mean(), 10.0 / mags.min()


def beta_schedule(cfg: SolverConfig, q: np.ndarray) -> np.ndarray:
    b0, b1 = default_betas(q)
    b0 = cfg.sa_beta_start if cfg.sa_beta_start is not None else b0
    b1 = cfg.sa_beta_end if cfg.sa_beta_end is not None else b1
    sweeps = cfg.steps("sa")
    if sweeps == 1:
        return np.array([b1])
    return np.geomspace(b0, b1, sweeps)


@njit(cache=True)
def _anneal(q, z, betas, u):
    """Run one attempt in place on ``z``; returns the lowest-energy state visited."""
    D = z.shape[0]
    field = q @ z
    e = z @ field
    best_e = e
    best = z.copy()
    for t in range(betas.shape[0]):
        beta = betas[t]
        for i in range(D):
            step = 1.0 - 2.0 * z[i]
            delta = step * (q[i, i] + 2.0 * (field[i] - q[i, i] * z[i]))
            if delta <= 0.0 or u[t, i] < math.exp(-beta * delta):
                z[i] += step
                e += delta
                for j in range(D):
                    field[j] += step * q[i, j]
                if e < best_e:
                    best_e = e
                    best[:] = z
    return best


def solve_sa(model: QuboModel, cfg: SolverConfig) -> SolveResult:
    t0 = time.perf_counter()
    q = np.ascontiguousarray(model.q, dtype=np.float64)
    betas = beta_schedule(cfg, q)
    out = np.empty((cfg.attempts, model.dim))
    for a in range(cfg.attempts):
        rng = attempt_rng(cfg.seed, a)
        z = rng.integers(0, 2, size=model.dim).astype(np.float64)
        u = rng.random((len(betas), model.dim))
        out[a] = _anneal(q, z, betas, u)
    return finish(model, out, t0)
