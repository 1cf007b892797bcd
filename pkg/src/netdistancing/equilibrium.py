"""Payoffs, constructive equilibria, Nash verification and the exact oracle.

A strategy is a length-``n`` numpy vector on the simplex; entry ``i - 1``
is the frequency at node ``i``. The distancing game minimizes
``pi(x, y) = x @ C @ y`` with ``C`` the network's contact matrix.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np
from scipy.spatial import cKDTree

from .network import Network
from .search import RegularSupport

SUPPORT_EPS = 1e-10
DEFAULT_TOL = 1e-9
DEDUP_TOL = 1e-8


class StrategyError(ValueError):
    """Vector is not a strategy (wrong length, negative entries, bad sum)."""


class SupportConditionError(ValueError):
    """A construction precondition does not hold for the given support."""


def as_strategy(x, n: int | None = None, atol: float = 1e-9) -> np.ndarray:
    """Validate ``x`` as a point on the simplex and return it as a float array."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise StrategyError(f"strategy must be a vector, got shape {x.shape}")
    if n is not None and x.shape[0] != n:
        raise StrategyError(f"strategy has length {x.shape[0]}, network has {n} nodes")
    if not np.all(np.isfinite(x)):
        raise StrategyError("strategy has non-finite entries")
    if x.min() < -atol:
        raise StrategyError(f"strategy has negative entry {x.min()}")
    if abs(x.sum() - 1.0) > atol:
        raise StrategyError(f"strategy sums to {x.sum()}, not 1")
    return x


def uniform_on(nodes: Iterable[int], n: int) -> np.ndarray:
    nodes = list(nodes)
    x = np.zeros(n)
    x[np.asarray(nodes) - 1] = 1.0 / len(nodes)
    return x


def support_of(x, eps: float = SUPPORT_EPS) -> tuple[int, ...]:
    return tuple(int(i) + 1 for i in np.flatnonzero(np.asarray(x) > eps))


def payoff(x, y, net: Network) -> float:
    """Contacts an ``x``-individual makes in a ``y``-population."""
    x = as_strategy(x, net.n)
    y = as_strategy(y, net.n)
    return float(x @ net.contact @ y)


def site_contacts(y, net: Network) -> np.ndarray:
    """Contacts ``p_i(y)`` available at every site, selected or not."""
    y = as_strategy(y, net.n)
    return net.contact @ y


@dataclass(frozen=True)
class EquilibriumCertificate:
    x: np.ndarray = field(repr=False)
    lambda_star: float
    support: tuple[int, ...]
    eq_residual: float
    ineq_slack: float  # +inf when every node is in the support
    is_nash: bool
    tol: float
    game: str = "distancing"

    def to_dict(self) -> dict:
        return {
            "x": [float(v) for v in self.x],
            "lambda": self.lambda_star,
            "support": list(self.support),
            "eq_residual": self.eq_residual,
            "ineq_slack": None if np.isinf(self.ineq_slack) else self.ineq_slack,
            "is_nash": self.is_nash,
        }


def verify_nash(
    x,
    net: Network,
    tol: float = DEFAULT_TOL,
    support_eps: float = SUPPORT_EPS,
    game: str = "distancing",
) -> EquilibriumCertificate:
    """Check the equality/inequality characterization of a Nash equilibrium.

    With ``lam = pi(x, x)``, ``x`` is Nash for the distancing game iff
    ``p_i(x) = lam`` on the support and ``p_i(x) >= lam`` off it. For the
    networking game (``game="networking"``, maximization) the off-support
    inequality is reversed; ``ineq_slack`` is then ``min(lam - p_i)``.
    """
    if game not in ("distancing", "networking"):
        raise ValueError(f"unknown game {game!r}")
    x = as_strategy(x, net.n)
    p = net.contact @ x
    lam = float(x @ p)
    on = x > support_eps
    eq_residual = float(np.abs(p[on] - lam).max())
    off = p[~on] - lam
    if game == "networking":
        off = -off
    ineq_slack = float(off.min()) if off.size else float("inf")
    return EquilibriumCertificate(
        x=x,
        lambda_star=lam,
        support=support_of(x, support_eps),
        eq_residual=eq_residual,
        ineq_slack=ineq_slack,
        is_nash=eq_residual <= tol and ineq_slack >= -tol,
        tol=tol,
        game=game,
    )


class Construction(NamedTuple):
    x: np.ndarray
    lambda_star: float
    sufficient: bool  # the sufficient construction condition held


def _require(support: RegularSupport, flags: Sequence[str]) -> None:
    failed = [f for f in flags if not getattr(support, f)]
    if failed:
        raise SupportConditionError(
            f"support {list(support.nodes)} (r={support.r}) fails: {', '.join(failed)}"
        )


def construct_uniform_equilibrium(support: RegularSupport) -> Construction:
    """Uniform strategy ``1/k`` on a maximal r-regular support.

    ``lambda* = (r + 1) / k``. Requires the support to be regular, maximal
    and to satisfy the outside-degree condition (each outside node has at
    least ``r + 1`` links into the support).
    """
    _require(support, ("regular", "maximal_ok", "outside_ok"))
    x = uniform_on(support.nodes, support.n)
    return Construction(x, (support.r + 1) / support.k, True)


def weighted_condition(net: Network, support: RegularSupport) -> bool:
    """Each outside node ``i`` has ``r + 1`` support neighbors ``j`` with ``w_i >= w_j``."""
    w = net.weight_vector
    members = frozenset(support.nodes)
    for i in net.nodes:
        if i in members:
            continue
        lighter = sum(1 for j in net.neighbors(i) & members if w[i - 1] >= w[j - 1])
        if lighter < support.r + 1:
            return False
    return True


def component_weights(net: Network, support: RegularSupport) -> list[float] | None:
    """The common weight of each component, or None if some component mixes weights."""
    w = net.weight_vector
    out = []
    for comp in support.components:
        vals = {w[v - 1] for v in comp}
        if len(vals) != 1:
            return None
        out.append(vals.pop())
    return out


def construct_weighted_equilibrium(support: RegularSupport, net: Network) -> Construction:
    """Inverse-weight strategy on a maximal r-regular support of a weighted network.

    With component weights ``w'_k`` and sizes ``m_k``:

    * additive: ``x_i = wbar / w'_k``, ``1/wbar = sum m_k / w'_k``,
      ``lambda* = (r + 1) * wbar``;
    * multiplicative: ``x_i = wt2 / w'_k**2``, ``1/wt2 = sum m_k / w'_k**2``,
      ``lambda* = (r + 1) * wt2``.

    For ``r = 0`` components are single nodes, so arbitrary per-node weights
    are allowed. For ``r >= 1`` each component must carry one weight.
    The construction proceeds even if the (sufficient, not necessary)
    outside-weight condition fails; ``sufficient`` is then False and the
    caller must run :func:`verify_nash`.
    """
    if net.scheme not in ("additive", "multiplicative"):
        raise SupportConditionError(f"weighted construction needs a weighted scheme, got {net.scheme}")
    if support.n != net.n:
        raise SupportConditionError("support and network sizes differ")
    _require(support, ("regular", "maximal_ok"))
    cw = component_weights(net, support)
    if cw is None:
        raise SupportConditionError(
            f"support {list(support.nodes)}: weights differ inside a component (r={support.r})"
        )
    power = 1 if net.scheme == "additive" else 2
    sizes = [len(c) for c in support.components]
    scale = 1.0 / sum(m / w**power for m, w in zip(sizes, cw))
    x = np.zeros(net.n)
    for comp, w in zip(support.components, cw):
        x[np.asarray(comp) - 1] = scale / w**power
    return Construction(x, (support.r + 1) * scale, weighted_condition(net, support))


def construct_equilibrium(support: RegularSupport, net: Network) -> Construction:
    """Dispatch to the uniform or weighted construction by the network's scheme."""
    if net.diag != 1.0:
        raise SupportConditionError("constructive results assume diag = 1 (distancing game)")
    if net.is_weighted:
        return construct_weighted_equilibrium(support, net)
    return construct_uniform_equilibrium(support)


# -- exact oracle -----------------------------------------------------------


@dataclass
class NashEnumeration:
    """Result of :func:`enumerate_nash`; iterates over the certificates."""

    certificates: list[EquilibriumCertificate]
    supports_checked: int = 0
    rank_deficient: int = 0  # solved by minimum-norm least squares
    inconsistent: int = 0  # no solution within tol; skipped

    def __iter__(self):
        return iter(self.certificates)

    def __len__(self):
        return len(self.certificates)

    def __getitem__(self, i):
        return self.certificates[i]


def _solve_supports(c: np.ndarray, combos: np.ndarray):
    """Min-norm least-squares solutions of ``[C_S 1; 1' 0][x; lam] = [0; 1]``, batched."""
    m, k = combos.shape
    kkt = np.zeros((m, k + 1, k + 1))
    kkt[:, :k, :k] = c[combos[:, :, None], combos[:, None, :]]
    kkt[:, :k, k] = -1.0
    kkt[:, k, :k] = 1.0
    rhs = np.zeros(k + 1)
    rhs[k] = 1.0
    u, s, vt = np.linalg.svd(kkt)
    cutoff = 1e-12 * s[:, :1]
    inv_s = np.where(s > cutoff, 1.0 / np.where(s > cutoff, s, 1.0), 0.0)
    coef = np.einsum("mij,i->mj", u, rhs) * inv_s
    sol = np.einsum("mji,mj->mi", vt, coef)
    resid = np.abs(np.einsum("mij,mj->mi", kkt, sol) - rhs).max(axis=1)
    deficient = (s <= cutoff).any(axis=1)
    return sol[:, :k], sol[:, k], resid, deficient


def enumerate_nash(
    net: Network, tol: float = DEFAULT_TOL, max_n: int = 14, batch: int = 4096
) -> NashEnumeration:
    """One Nash equilibrium per support that carries one.

    For each support ``S`` the system ``C_S x = lam 1``, ``sum x = 1`` is
    solved by minimum-norm least squares; solutions with ``x_S > 0`` that
    pass :func:`verify_nash` are kept. When the system is singular the
    equilibria on ``S`` form an affine family and only its minimum-norm
    member is listed (``rank_deficient`` counts such supports). Exponential
    in ``n``; refuses when ``n > max_n``. Sorted by support, then strategy.
    """
    if net.n > max_n:
        raise ValueError(f"enumeration refused: n={net.n} > max_n={max_n}")
    c = np.asarray(net.contact)
    out: list[EquilibriumCertificate] = []
    result = NashEnumeration(out)
    for k in range(1, net.n + 1):
        it = itertools.combinations(range(net.n), k)
        while True:
            chunk = list(itertools.islice(it, batch))
            if not chunk:
                break
            combos = np.asarray(chunk, dtype=np.intp)
            xs, _, resid, deficient = _solve_supports(c, combos)
            result.supports_checked += len(chunk)
            result.rank_deficient += int(deficient.sum())
            bad = resid > tol
            result.inconsistent += int(bad.sum())
            keep = ~bad & (xs > SUPPORT_EPS).all(axis=1)
            for row in np.flatnonzero(keep):
                x = np.zeros(net.n)
                x[combos[row]] = xs[row]
                x /= x.sum()
                cert = verify_nash(x, net, tol=tol)
                if cert.is_nash:
                    out.append(cert)
    deduped = _dedup(out, DEDUP_TOL)
    deduped.sort(key=lambda cc: (cc.support, tuple(cc.x)))
    result.certificates = deduped
    return result


def _dedup(certs: list[EquilibriumCertificate], radius: float) -> list[EquilibriumCertificate]:
    """Drop certificates within max-norm ``radius`` of an earlier one."""
    if len(certs) < 2:
        return list(certs)
    tree = cKDTree(np.stack([c.x for c in certs]))
    drop = set()
    for i, j in sorted(tree.query_pairs(radius, p=np.inf)):
        if i not in drop:
            drop.add(j)
    return [c for k, c in enumerate(certs) if k not in drop]
