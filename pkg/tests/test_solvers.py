import numpy as np
import pytest

from canfill.encoder import build_qubo, energy
from canfill.solvers import SOLVERS, SolverConfig, brute_force_bits, solve
from canfill.solvers.annealing import beta_schedule, default_betas

ALL = sorted(SOLVERS)


def test_config_validation():
    for bad in (dict(iterations=0), dict(attempts=0), dict(seed=-1), dict(cim_dt=0.0),
                dict(sb_variant="adiabatic")):
        with pytest.raises(ValueError):
            SolverConfig(**bad)
    assert SolverConfig().steps("sa") == 2000
    assert SolverConfig(iterations=7).steps("sb") == 7


def test_unknown_solver(trivial):
    with pytest.raises(ValueError, match="unknown solver"):
        solve("qaoa", build_qubo(trivial))


def test_sa_reaches_ground_state(trivial):
    model = build_qubo(trivial)
    res = solve("sa", model, SolverConfig(iterations=200, attempts=100))
    assert res.best_energy == brute_force_bits(model)[1]


@pytest.mark.parametrize("name", ["simcim", "sb"])
def test_dynamics_reach_ground_state(name, trivial):
    model = build_qubo(trivial)
    res = solve(name, model, SolverConfig(attempts=100))
    assert res.best_energy == brute_force_bits(model)[1]


@pytest.mark.parametrize("name", ALL)
def test_single_iteration_is_valid(name, small3):
    model = build_qubo(small3)
    res = solve(name, model, SolverConfig(iterations=1, attempts=3))
    assert res.best_bits.shape == (model.dim,)
    assert set(np.unique(res.attempt_bits)) <= {0, 1}
    assert res.best_energy == energy(model, res.best_bits)


@pytest.mark.parametrize("name", ALL)
def test_same_seed_same_result(name, small3):
    model = build_qubo(small3)
    cfg = SolverConfig(seed=11, iterations=300, attempts=20)
    a, b = solve(name, model, cfg), solve(name, model, cfg)
    assert np.array_equal(a.attempt_bits, b.attempt_bits)
    assert a.attempt_energies.tolist() == b.attempt_energies.tolist()
    assert a.best_energy == b.best_energy


@pytest.mark.parametrize("name", ALL)
def test_attempts_replay_independently(name, small3):
    # attempt a draws from its own stream, so a shorter run is a prefix of a longer one
    model = build_qubo(small3)
    short = solve(name, model, SolverConfig(seed=3, iterations=200, attempts=4))
    long = solve(name, model, SolverConfig(seed=3, iterations=200, attempts=9))
    assert np.array_equal(short.attempt_bits, long.attempt_bits[:4])


@pytest.mark.parametrize("name", ALL)
def test_best_is_first_minimum(name, small3):
    model = build_qubo(small3)
    res = solve(name, model, SolverConfig(iterations=100, attempts=30))
    e = res.attempt_energies
    assert res.best_energy == e.min()
    assert np.array_equal(res.best_bits, res.attempt_bits[int(np.argmin(e))])
    assert len(res.per_attempt) == 30


def test_simcim_without_noise_is_deterministic(small3):
    model = build_qubo(small3)
    res = solve("simcim", model, SolverConfig(cim_noise=0.0, cim_init=0.0, attempts=5, iterations=200))
    assert (res.attempt_bits == res.attempt_bits[0]).all()


def test_sb_discrete_variant_runs(trivial):
    model = build_qubo(trivial)
    res = solve("sb", model, SolverConfig(sb_variant="discrete", attempts=50))
    assert res.best_energy == energy(model, res.best_bits)


def test_beta_schedule(small3):
    q = build_qubo(small3).q
    lo, hi = default_betas(q)
    assert 0 < lo < hi
    betas = beta_schedule(SolverConfig(iterations=50), q)
    assert len(betas) == 50
    assert betas[0] == pytest.approx(lo) and betas[-1] == pytest.approx(hi)
    assert (np.diff(betas) > 0).all()
