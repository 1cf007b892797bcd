import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from netdistancing.dynamics import (
    NotConvergedError,
    Trajectory,
    converged_certificate,
    random_interior,
    replicator_descent,
    replicator_step,
)
from netdistancing.equilibrium import (
    StrategyError,
    construct_equilibrium,
    enumerate_nash,
    uniform_on,
)
from netdistancing.search import check_support_conditions
from netdistancing.stability import fragility_witness

from conftest import cycle, empty, random_network


def test_equilibrium_is_fixed_point(fig4):
    x = np.full(10, 0.1)
    traj = replicator_descent(fig4, x)
    assert traj.converged and traj.steps <= 1
    assert np.abs(traj.final - x).max() < 1e-12


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 8), st.floats(0, 1), st.integers(0, 2**32 - 1))
def test_certified_equilibria_are_fixed_points(n, p, seed):
    net = random_network(np.random.default_rng(seed), n, p)
    for cert in enumerate_nash(net):
        assert np.abs(replicator_step(net, cert.x) - cert.x).max() < 1e-12


@pytest.mark.parametrize("n", [1, 4, 9])
def test_edgeless_converges_to_uniform(n, rng):
    net = empty(n)
    traj = replicator_descent(net, random_interior(n, rng))
    assert traj.converged
    assert np.abs(traj.final - 1 / n).max() < 1e-8
    cert = converged_certificate(traj, net)
    assert cert.is_nash and cert.lambda_star == pytest.approx(1 / n, abs=1e-9)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 10), st.floats(0, 1), st.integers(0, 2**32 - 1), st.sampled_from([1.0, 0.5]))
def test_simplex_and_descent(n, p, seed, dt):
    rng = np.random.default_rng(seed)
    net = random_network(rng, n, p)
    traj = replicator_descent(net, random_interior(n, rng), dt=dt, max_steps=3000)
    assert np.abs(traj.states.sum(axis=1) - 1).max() < 1e-9
    assert traj.states.min() >= 0
    assert np.all(np.isfinite(traj.payoffs))
    assert np.diff(traj.payoffs).max(initial=0.0) <= 1e-6


def test_fragile_equilibrium_breaks_away(fig4):
    sup = check_support_conditions(fig4, range(1, 11), 3)
    x = construct_equilibrium(sup, fig4).x
    d = fragility_witness(fig4, sup)
    traj = replicator_descent(fig4, x + 0.01 * d, max_steps=1000)
    lam = 0.4
    assert traj.payoffs[1] < lam
    assert traj.payoffs[1:].max() < lam  # never returns
    assert traj.payoffs[-1] < lam - 0.1


def test_fig5_random_start_lands_on_oracle_support(fig5):
    # Fig 5 equilibria come in affine families (weakly rigid supports); the
    # oracle lists one representative per support, so endpoints are matched
    # by support and contact value
    oracle = {c.support: c for c in enumerate_nash(fig5, max_n=16)}
    rng = np.random.default_rng(3)
    for _ in range(5):
        traj = replicator_descent(fig5, random_interior(16, rng), max_steps=1_000_000, conv_tol=1e-12)
        cert = converged_certificate(traj, fig5)
        assert cert.is_nash and cert.eq_residual < 1e-6
        match = oracle[cert.support]
        assert abs(match.lambda_star - cert.lambda_star) < 1e-6


def test_boundary_rest_point_reported_not_nash():
    # start on the face of the non-maximal independent set {1, 3} in C6
    net = cycle(6)
    traj = replicator_descent(net, uniform_on([1, 3], 6))
    assert traj.converged
    cert = converged_certificate(traj, net)
    assert not cert.is_nash


def test_not_converged_raises(fig4, rng):
    traj = replicator_descent(fig4, random_interior(10, rng), max_steps=3)
    assert not traj.converged and traj.steps == 3
    with pytest.raises(NotConvergedError):
        converged_certificate(traj, fig4)


def test_trajectory_summary(fig3, rng):
    traj = replicator_descent(fig3, random_interior(10, rng))
    s = traj.summary()
    assert s["converged"] and s["steps"] == traj.steps
    assert len(s["final_x"]) == 10 and s["final_payoff"] <= s["initial_payoff"]
    assert isinstance(traj, Trajectory) and traj.states.shape == (traj.steps + 1, 10)


def test_dt_damps_steps(fig4):
    x0 = np.linspace(1, 2, 10)
    x0 /= x0.sum()
    full = replicator_descent(fig4, x0, max_steps=1)
    half = replicator_descent(fig4, x0, dt=0.5, max_steps=1)
    expect = x0 + 0.5 * (full.states[1] - x0)
    assert np.abs(half.states[1] - expect / expect.sum()).max() < 1e-15


def test_bad_inputs(fig4):
    with pytest.raises(ValueError):
        replicator_descent(fig4, np.full(10, 0.1), dt=0)
    with pytest.raises(StrategyError):
        replicator_descent(fig4, np.full(10, 0.2))


def test_random_interior(rng):
    x = random_interior(7, rng)
    assert x.min() > 0 and abs(x.sum() - 1) < 1e-12
