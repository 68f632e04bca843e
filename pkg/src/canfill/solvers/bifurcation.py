"""Simulated bifurcation on the Ising form of a QUBO."""

from __future__ import annotations

import time

import numpy as np
from numba import njit

from ..encoder import QuboModel, qubo_to_ising
from .base import SolveResult, SolverConfig, attempt_rng, finish
from .simcim import bits_energy, coupling_scale


@njit(cache=True)
def _oscillate(q, two_j, h, x, y, ramp, dt, delta, c0, discrete):
    D = x.shape[0]
    force = np.empty(D)
    b = np.empty(D)
    best = np.zeros(D)
    best_e = np.inf
    for t in range(ramp.shape[0]):
        for i in range(D):
            f = h[i]
            for k in range(D):
                xk = x[k]
                if discrete:
                    xk = -1.0 if xk < 0.0 else 1.0
                f += two_j[i, k] * xk
            force[i] = f
        for i in range(D):
            y[i] += dt * (-(delta - ramp[t]) * x[i] - c0 * force[i])
            x[i] += dt * delta * y[i]
            if x[i] > 1.0:
                x[i] = 1.0
                y[i] = 0.0
            elif x[i] < -1.0:
                x[i] = -1.0
                y[i] = 0.0
            b[i] = 0.0 if x[i] < 0.0 else 1.0
        e = bits_energy(q, b)
        if e < best_e:
            best_e = e
            best[:] = b
    return best


def solve_sb(model: QuboModel, cfg: SolverConfig) -> SolveResult:
    """Symplectic-Euler oscillator dynamics with inelastic walls at |x| = 1.

    The bifurcation parameter ramps linearly from 0 to the detuning. The Ising
    field enters the momentum update as a constant drive next to the couplings.
    The ``discrete`` variant feeds ``sign(x)`` rather than ``x`` into the
    coupling term. All-zero positions and momenta are a fixed point of the
    dynamics, so both start uniformly in ``[-sb_init, sb_init]``.
    """
    t0 = time.perf_counter()
    ising = qubo_to_ising(model)
    D = model.dim
    steps = cfg.steps("sb")
    delta = cfg.sb_detuning
    two_j = np.ascontiguousarray(2.0 * ising.j)
    h = np.ascontiguousarray(ising.h)
    q = np.ascontiguousarray(model.q, dtype=np.float64)
    c0 = cfg.sb_gain * delta / coupling_scale(ising.j, h)
    ramp = np.linspace(0.0, delta, steps)
    discrete = cfg.sb_variant == "discrete"

    out = np.empty((cfg.attempts, D))
    for a in range(cfg.attempts):
        rng = attempt_rng(cfg.seed, a)
        x = rng.uniform(-cfg.sb_init, cfg.sb_init, D)
        y = rng.uniform(-cfg.sb_init, cfg.sb_init, D)
        out[a] = _oscillate(q, two_j, h, x, y, ramp, cfg.sb_dt, delta, c0, discrete)
    return finish(model, out, t0)
