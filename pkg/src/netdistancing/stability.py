"""Rigidity, flexibility and fragility of equilibria.

Perturbations ``x* + eps*d`` are restricted to tangent directions ``d``:
supported inside the equilibrium's support and summing to zero. For an
equilibrium ``d @ C @ x* = lam * sum(d) = 0``, so

    pi(x* + eps*d, x* + eps*d) - pi(x*, x*) = eps**2 * d @ C @ d

and the classification is the sign pattern of the quadratic form on the
tangent subspace.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .equilibrium import (
    DEFAULT_TOL,
    StrategyError,
    SupportConditionError,
    as_strategy,
    component_weights,
    construct_equilibrium,
    support_of,
    verify_nash,
)
from .network import Network
from .search import RegularSupport

SPECTRAL_TOL = 1e-8
CLASSES = ("strongly_rigid", "weakly_rigid", "fragile")


class NotNashError(ValueError):
    """Stability analysis was asked for a strategy that is not an equilibrium."""


class ClassificationMismatch(RuntimeError):
    """Structural and spectral classifications disagree."""


@dataclass(frozen=True)
class StabilityReport:
    classification: str
    flexible: bool
    witness: np.ndarray | None = field(default=None, repr=False)
    eig_min: float | None = None
    eig_max: float | None = None
    method: str = "spectral"

    def to_dict(self) -> dict:
        return {
            "class": self.classification,
            "flexible": self.flexible,
            "witness": None if self.witness is None else [float(v) for v in self.witness],
            "eig_min": self.eig_min,
            "eig_max": self.eig_max,
            "method": self.method,
        }


def tangent_basis(support: Iterable[int], n: int) -> np.ndarray:
    """Orthonormal basis of ``{d : d = 0 off support, sum(d) = 0}`` as columns.

    Helmert construction: column ``j`` is ``(1, ..., 1, -j, 0, ...)`` on the
    first ``j + 1`` support nodes, normalized. Shape ``(n, k - 1)``.
    """
    nodes = sorted(set(support))
    k = len(nodes)
    if k < 1:
        raise ValueError("support must be nonempty")
    idx = np.asarray(nodes) - 1
    basis = np.zeros((n, k - 1))
    for j in range(1, k):
        col = np.zeros(k)
        col[:j] = 1.0
        col[j] = -float(j)
        basis[idx, j - 1] = col / np.sqrt(j * (j + 1))
    return basis


def _canonical_sign(d: np.ndarray) -> np.ndarray:
    i = int(np.argmax(np.abs(d)))
    return -d if d[i] < 0 else d


def _fit_to_simplex(d: np.ndarray, x: np.ndarray, frac: float = 0.5) -> np.ndarray:
    """Scale ``d`` so ``x + d`` stays strictly inside the support's face."""
    limits = []
    neg, pos = d < 0, d > 0
    if neg.any():
        limits.append(np.min(x[neg] / -d[neg]))
    if pos.any():
        limits.append(np.min((1.0 - x[pos]) / d[pos]))
    if not limits:
        return d
    return d * (frac * min(limits))


def classify_spectral(
    net: Network, x_star, tol: float = SPECTRAL_TOL, nash_tol: float = DEFAULT_TOL
) -> StabilityReport:
    """Classify by the eigenvalues of the contact form projected on the tangent space.

    ``mu_min > tol`` gives strongly rigid. ``mu_min >= -tol`` with a
    near-zero eigenvalue gives weakly rigid (and flexible, witness the null
    direction). ``mu_min < -tol`` gives fragile (witness the ``mu_min``
    eigenvector); such an equilibrium is also flexible unless the form is
    negative definite.
    """
    cert = verify_nash(x_star, net, tol=nash_tol)
    if not cert.is_nash:
        raise NotNashError(
            f"strategy is not Nash (eq_residual={cert.eq_residual:.3g}, "
            f"ineq_slack={cert.ineq_slack:.3g})"
        )
    x = cert.x
    basis = tangent_basis(cert.support, net.n)
    if basis.shape[1] == 0:
        return StabilityReport("strongly_rigid", False, None, None, None, "spectral")
    form = basis.T @ net.contact @ basis
    mu, vecs = np.linalg.eigh((form + form.T) / 2.0)
    mu_min, mu_max = float(mu[0]), float(mu[-1])
    near_zero = np.abs(mu) <= tol

    if mu_min > tol:
        return StabilityReport("strongly_rigid", False, None, mu_min, mu_max, "spectral")
    if mu_min >= -tol:
        j = int(np.argmin(np.abs(mu)))
        d = _fit_to_simplex(_canonical_sign(basis @ vecs[:, j]), x)
        return StabilityReport("weakly_rigid", True, d, mu_min, mu_max, "spectral")
    flexible = bool(near_zero.any() or mu_max > tol)
    d = _fit_to_simplex(_canonical_sign(basis @ vecs[:, 0]), x)
    return StabilityReport("fragile", flexible, d, mu_min, mu_max, "spectral")


def _equilibrium_for(net: Network, support: RegularSupport, x_star=None) -> np.ndarray:
    if x_star is not None:
        return as_strategy(x_star, net.n)
    return construct_equilibrium(support, net).x


def flexibility_witness(
    net: Network, support: RegularSupport, delta: float | None = None, x_star=None
) -> np.ndarray:
    """Move ``delta`` of mass across the lowest-labelled internal edge ``(a, b)``.

    ``d_a = -delta``, ``d_b = +delta``; by default ``delta`` is half of
    ``min(1 - x_b, x_a)``. The contact form vanishes on ``d`` whenever
    ``a`` and ``b`` carry equal weight.
    """
    if support.r < 1:
        raise SupportConditionError("r = 0 support has no internal edge: no flexibility witness")
    members = frozenset(support.nodes)
    edge = next(((a, b) for a, b in net.edges if a in members and b in members), None)
    if edge is None:
        raise SupportConditionError("support has no internal edge")
    a, b = edge
    x = _equilibrium_for(net, support, x_star)
    if delta is None:
        delta = 0.5 * min(1.0 - x[b - 1], x[a - 1])
    d = np.zeros(net.n)
    d[a - 1], d[b - 1] = -delta, delta
    return d


def open_triple(net: Network, support: RegularSupport) -> tuple[int, int, int] | None:
    """First ``(i, j, l)`` with ``i-l``, ``j-l`` internal edges and ``i, j`` non-adjacent."""
    members = frozenset(support.nodes)
    for l in support.nodes:
        nb = sorted(net.neighbors(l) & members)
        for p, i in enumerate(nb):
            for j in nb[p + 1 :]:
                if not net.has_edge(i, j):
                    return i, j, l
    return None


def fragility_witness(
    net: Network, support: RegularSupport, delta: float | None = None, x_star=None
) -> np.ndarray:
    """``d_i = d_j = delta``, ``d_l = -2 delta`` on an open triple ``i - l - j``.

    Default ``delta`` is half of ``min(1 - x_i, 1 - x_j, x_l / 2)``. On an
    unweighted network ``d @ C @ d = -2 delta**2``.
    """
    triple = open_triple(net, support)
    if support.r < 1 or triple is None:
        raise SupportConditionError(
            "every component is complete: no open triple, no fragility witness"
        )
    i, j, l = triple
    x = _equilibrium_for(net, support, x_star)
    if delta is None:
        delta = 0.5 * min(1.0 - x[i - 1], 1.0 - x[j - 1], x[l - 1] / 2.0)
    d = np.zeros(net.n)
    d[i - 1] = d[j - 1] = delta
    d[l - 1] = -2.0 * delta
    return d


def structural_applies(net: Network, support: RegularSupport) -> bool:
    """Structural rules need an r-regular support, ``diag = 1`` and one weight per component."""
    if not support.regular or net.diag != 1.0:
        return False
    return not net.is_weighted or component_weights(net, support) is not None


def classify_structural(net: Network, support: RegularSupport, x_star=None) -> StabilityReport:
    """Classify from the support's shape alone.

    ``r = 0``: strongly rigid. ``r >= 1`` with every component complete on
    ``r + 1`` nodes: weakly rigid and flexible. Otherwise fragile (and
    flexible). Falls back to :func:`classify_spectral` when the structural
    rules do not apply.
    """
    if not structural_applies(net, support):
        x = x_star
        if x is None:
            x = np.zeros(net.n)
            x[np.asarray(support.nodes) - 1] = 1.0 / support.k
        return classify_spectral(net, x)
    if support.r == 0:
        return StabilityReport("strongly_rigid", False, None, method="structural")
    if all(support.minimal):
        d = flexibility_witness(net, support, x_star=x_star)
        return StabilityReport("weakly_rigid", True, d, method="structural")
    d = fragility_witness(net, support, x_star=x_star)
    return StabilityReport("fragile", True, d, method="structural")


def classify(
    net: Network,
    x_star,
    support: RegularSupport | None = None,
    method: str = "both",
    tol: float = SPECTRAL_TOL,
) -> StabilityReport:
    """Classify an equilibrium by ``"structural"``, ``"spectral"`` or ``"both"``.

    ``"both"`` raises :class:`ClassificationMismatch` if the two disagree; the
    returned report carries the structural witness and the spectral evidence.
    Structural classification needs ``support`` (an r-regular support
    matching ``x_star``); without it only spectral evidence is available.
    """
    if method not in ("structural", "spectral", "both"):
        raise ValueError(f"unknown method {method!r}")
    if method == "spectral":
        return classify_spectral(net, x_star, tol=tol)
    if support is None or not structural_applies(net, support):
        if method == "structural":
            raise SupportConditionError("structural rules need an r-regular support")
        return classify_spectral(net, x_star, tol=tol)
    if tuple(support.nodes) != support_of(as_strategy(x_star, net.n)):
        raise SupportConditionError("strategy support does not match the given support")
    structural = classify_structural(net, support, x_star=x_star)
    if method == "structural":
        return structural
    spectral = classify_spectral(net, x_star, tol=tol)
    if (structural.classification, structural.flexible) != (
        spectral.classification,
        spectral.flexible,
    ):
        raise ClassificationMismatch(
            f"structural {structural.classification}/{structural.flexible} vs "
            f"spectral {spectral.classification}/{spectral.flexible}"
        )
    return StabilityReport(
        structural.classification,
        structural.flexible,
        structural.witness,
        spectral.eig_min,
        spectral.eig_max,
        "both",
    )


def quadratic_form(net: Network, d) -> float:
    d = np.asarray(d, dtype=float)
    return float(d @ net.contact @ d)


def perturbation_probe(net: Network, x_star, d, eps: float) -> float:
    """``pi(x* + eps d, x* + eps d) - pi(x*, x*)``, evaluated directly."""
    x = as_strategy(x_star, net.n)
    d = np.asarray(d, dtype=float)
    if d.shape != x.shape:
        raise StrategyError(f"direction has shape {d.shape}, expected {x.shape}")
    outside = np.flatnonzero((np.abs(d) > 0) & ~(x > 0))
    if outside.size:
        raise StrategyError(f"direction leaves the support at nodes {list(outside + 1)}")
    y = x + eps * d
    if y.min() < 0.0 or y.max() > 1.0 or abs(y.sum() - 1.0) > 1e-9:
        raise StrategyError("perturbed strategy leaves the simplex")
    c = net.contact
    return float(y @ c @ y - x @ c @ x)
