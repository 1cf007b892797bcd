"""Discrete replicator descent: an independent dynamical check on equilibria.

The game minimizes contacts, so payoffs are turned into fitnesses
``C - p_i(x)`` with ``C = max_i p_i(x) + 1`` recomputed every step:

    x_i <- x_i * (C - p_i(x)) / (C - pi(x, x))

The update preserves the simplex exactly (up to rounding, removed by a
renormalization) and keeps extinct strategies extinct, so faces of the
simplex are invariant.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .equilibrium import EquilibriumCertificate, as_strategy, verify_nash
from .network import Network


class NotConvergedError(ValueError):
    pass


@dataclass(frozen=True)
class Trajectory:
    states: np.ndarray  # (steps + 1, n), row t is x_t
    payoffs: np.ndarray  # pi(x_t, x_t)
    converged: bool
    steps: int

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    def summary(self) -> dict:
        return {
            "converged": self.converged,
            "steps": self.steps,
            "initial_payoff": float(self.payoffs[0]),
            "final_payoff": float(self.payoffs[-1]),
            "final_x": [float(v) for v in self.final],
        }


def replicator_step(net: Network, x) -> np.ndarray:
    """One update of the map; certified equilibria are its fixed points."""
    x = np.asarray(x, dtype=float)
    p = net.contact @ x
    pi = float(x @ p)
    c = p.max() + 1.0
    xn = x * (c - p) / (c - pi)
    return xn / xn.sum()


def replicator_descent(
    net: Network,
    x0,
    dt: float = 1.0,
    max_steps: int = 100_000,
    conv_tol: float = 1e-10,
) -> Trajectory:
    """Iterate the replicator map from ``x0`` until ``max|x_{t+1} - x_t| < conv_tol``.

    ``dt`` in ``(0, 1]`` damps each step toward the full update (``dt=1``).
    """
    if not 0.0 < dt <= 1.0:
        raise ValueError(f"dt must lie in (0, 1], got {dt}")
    x0 = as_strategy(x0, net.n)
    a = np.array(net.contact, dtype=float, order="C")  # kernel wants a writable buffer
    states = np.empty((max_steps + 1, net.n))
    payoffs = np.empty(max_steps + 1)
    steps, converged = kernels.replicator_run(
        a, np.ascontiguousarray(x0), float(dt), int(max_steps), float(conv_tol), states, payoffs
    )
    return Trajectory(
        states=states[: steps + 1].copy(),
        payoffs=payoffs[: steps + 1].copy(),
        converged=bool(converged),
        steps=int(steps),
    )


def converged_certificate(
    traj: Trajectory, net: Network, tol: float = 1e-6, extinct: float | None = None
) -> EquilibriumCertificate:
    """Verify the endpoint of a converged trajectory as a Nash equilibrium.

    Strategies that are dying out still hold a geometric tail when the step
    size drops below ``conv_tol``; entries at or below ``extinct`` (default
    ``tol``) count as off the support.
    """
    if not traj.converged:
        raise NotConvergedError(f"trajectory did not converge in {traj.steps} steps")
    return verify_nash(traj.final, net, tol=tol, support_eps=tol if extinct is None else extinct)


def random_interior(n: int, rng) -> np.ndarray:
    """Uniform sample from the open simplex (flat Dirichlet)."""
    return rng.dirichlet(np.ones(n))
