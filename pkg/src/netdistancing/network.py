"""Networks of social sites and their contact matrices.

Nodes are labelled ``1..n`` on every public surface. Numpy vectors indexed by
node use position ``i - 1`` for node ``i``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, NamedTuple, Sequence

import numpy as np

SCHEMES = ("unweighted", "additive", "multiplicative")


class NetworkError(ValueError):
    """Invalid network data (bad endpoint, self-loop, weight, or diagonal)."""


class NetworkFormatError(NetworkError):
    """A network file could not be parsed."""


@dataclass(frozen=True)
class Network:
    """Undirected network with a uniform self-contact coefficient.

    Use :func:`build_network` to construct one; it validates and
    canonicalizes the edge list (``i < j``, sorted, no duplicates).
    """

    n: int
    edges: tuple[tuple[int, int], ...]
    diag: float = 1.0
    weights: tuple[float, ...] | None = None
    scheme: str = "unweighted"
    _neighbors: tuple[frozenset[int], ...] = field(
        default=(), init=False, repr=False, compare=False
    )

    def __post_init__(self) -> None:
        nbrs: list[set[int]] = [set() for _ in range(self.n + 1)]
        for i, j in self.edges:
            nbrs[i].add(j)
            nbrs[j].add(i)
        object.__setattr__(self, "_neighbors", tuple(frozenset(s) for s in nbrs))

    @property
    def nodes(self) -> range:
        return range(1, self.n + 1)

    def neighbors(self, i: int) -> frozenset[int]:
        return self._neighbors[i]

    def has_edge(self, i: int, j: int) -> bool:
        return j in self._neighbors[i]

    @property
    def weight_vector(self) -> np.ndarray:
        if self.weights is None:
            return np.ones(self.n)
        return np.asarray(self.weights, dtype=float)

    @property
    def is_weighted(self) -> bool:
        return self.scheme != "unweighted" and any(w != 1 for w in self.weight_vector)

    @cached_property
    def adjacency(self) -> np.ndarray:
        """0/1 adjacency matrix with zero diagonal (read-only)."""
        a = np.zeros((self.n, self.n))
        for i, j in self.edges:
            a[i - 1, j - 1] = a[j - 1, i - 1] = 1.0
        a.setflags(write=False)
        return a

    @cached_property
    def contact(self) -> np.ndarray:
        return contact_matrix(self)

    @cached_property
    def neighbor_masks(self) -> tuple[int, ...]:
        """Bitmask of neighbors per node, bit ``i - 1`` for node ``i``."""
        masks = []
        for i in self.nodes:
            m = 0
            for j in self._neighbors[i]:
                m |= 1 << (j - 1)
            masks.append(m)
        return tuple(masks)

    def to_dict(self) -> dict:
        d = {"n": self.n, "edges": [list(e) for e in self.edges], "diag": self.diag}
        if self.weights is not None:
            d["weights"] = list(self.weights)
        d["scheme"] = self.scheme
        return d


def build_network(
    n: int,
    edges: Iterable[Sequence[int]],
    diag: float = 1.0,
    weights: Sequence[float] | None = None,
    scheme: str = "unweighted",
) -> Network:
    """Validate and canonicalize a network.

    Parameters
    ----------
    n : int
        Node count; nodes are ``1..n``.
    edges : iterable of pairs
        Undirected links. ``(i, j)`` and ``(j, i)`` collapse to one edge.
    diag : float
        Self-contact coefficient in ``[0, 1]``; 1 for the distancing game,
        0 for the networking game.
    weights : sequence of float, optional
        Per-node contact values ``w_i >= 1``.
    scheme : {"unweighted", "additive", "multiplicative"}

    Raises
    ------
    NetworkError
        On out-of-range endpoints, self-loops, weights below 1, a diagonal
        outside ``[0, 1]`` or an unknown scheme.
    """
    n = int(n)
    if n < 1:
        raise NetworkError(f"node count must be positive, got {n}")
    if scheme not in SCHEMES:
        raise NetworkError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")
    diag = float(diag)
    if not 0.0 <= diag <= 1.0:
        raise NetworkError(f"diag must lie in [0, 1], got {diag}")

    canon = set()
    for e in edges:
        if len(e) != 2:
            raise NetworkError(f"edge {tuple(e)} is not a pair")
        i, j = int(e[0]), int(e[1])
        for v in (i, j):
            if not 1 <= v <= n:
                raise NetworkError(f"edge ({i}, {j}) has endpoint {v} outside 1..{n}")
        if i == j:
            raise NetworkError(f"self-loop at node {i}")
        canon.add((min(i, j), max(i, j)))

    w = None
    if weights is not None:
        w = tuple(float(v) for v in weights)
        if len(w) != n:
            raise NetworkError(f"expected {n} weights, got {len(w)}")
        if scheme == "unweighted":
            if any(v != 1.0 for v in w):
                raise NetworkError("non-unit weights need scheme additive or multiplicative")
        elif any(not v >= 1.0 for v in w):
            raise NetworkError(f"weights must be >= 1, got {min(w)}")

    return Network(n=n, edges=tuple(sorted(canon)), diag=diag, weights=w, scheme=scheme)


def complement(net: Network) -> Network:
    """Complement network; the diagonal flips ``diag -> 1 - diag``.

    The distancing game on ``net`` is the networking game on the result.
    """
    present = set(net.edges)
    edges = [
        (i, j)
        for i in range(1, net.n + 1)
        for j in range(i + 1, net.n + 1)
        if (i, j) not in present
    ]
    return Network(
        n=net.n,
        edges=tuple(edges),
        diag=1.0 - net.diag,
        weights=net.weights,
        scheme=net.scheme,
    )


def contact_matrix(net: Network) -> np.ndarray:
    """Symmetric contact matrix for the network's weighting scheme.

    ``A`` is the adjacency matrix with ``diag`` on the diagonal. Additive
    weighting gives ``(WA + AW) / 2`` and multiplicative ``WAW`` with
    ``W = diag(w)``; with ``diag = 1`` the diagonals are ``w_i`` and ``w_i**2``.
    """
    a = np.array(net.adjacency)
    np.fill_diagonal(a, net.diag)
    if net.scheme == "additive":
        w = net.weight_vector
        a = (w[:, None] * a + a * w[None, :]) / 2.0
    elif net.scheme == "multiplicative":
        w = net.weight_vector
        a = w[:, None] * a * w[None, :]
    a.setflags(write=False)
    return a


def _check_subset(net: Network, s: Iterable[int]) -> tuple[int, ...]:
    nodes = tuple(sorted({int(v) for v in s}))
    if not nodes:
        raise NetworkError("node subset is empty")
    for v in nodes:
        if not 1 <= v <= net.n:
            raise NetworkError(f"node {v} outside 1..{net.n}")
    return nodes


class Subnetwork(NamedTuple):
    net: Network
    labels: tuple[int, ...]  # labels[k] is the original label of node k + 1


def induced_subnetwork(net: Network, s: Iterable[int]) -> Subnetwork:
    """Network on ``s`` keeping exactly the edges with both ends in ``s``."""
    nodes = _check_subset(net, s)
    index = {v: k + 1 for k, v in enumerate(nodes)}
    edges = [(index[i], index[j]) for i, j in net.edges if i in index and j in index]
    weights = None
    if net.weights is not None:
        weights = tuple(net.weights[v - 1] for v in nodes)
    sub = Network(
        n=len(nodes), edges=tuple(edges), diag=net.diag, weights=weights, scheme=net.scheme
    )
    return Subnetwork(sub, nodes)


class DegreeProfile(NamedTuple):
    internal: dict[int, int]  # member -> neighbors inside the subset
    inlinks: dict[int, int]  # outsider -> neighbors inside the subset


def degree_profile(net: Network, s: Iterable[int]) -> DegreeProfile:
    nodes = _check_subset(net, s)
    members = frozenset(nodes)
    internal = {i: len(net.neighbors(i) & members) for i in nodes}
    inlinks = {i: len(net.neighbors(i) & members) for i in net.nodes if i not in members}
    return DegreeProfile(internal, inlinks)


def components(net: Network, s: Iterable[int]) -> list[tuple[int, ...]]:
    """Connected components of the subnetwork induced by ``s``, sorted."""
    members = set(_check_subset(net, s))
    seen: set[int] = set()
    out = []
    for start in sorted(members):
        if start in seen:
            continue
        comp = {start}
        stack = [start]
        while stack:
            u = stack.pop()
            for v in net.neighbors(u) & members:
                if v not in comp:
                    comp.add(v)
                    stack.append(v)
        seen |= comp
        out.append(tuple(sorted(comp)))
    return out


# -- file formats -----------------------------------------------------------


def network_from_dict(d: dict) -> Network:
    if not isinstance(d, dict):
        raise NetworkFormatError("network JSON must be an object")
    for key in ("n", "edges"):
        if key not in d:
            raise NetworkFormatError(f"missing field {key!r}")
    if not isinstance(d["edges"], list):
        raise NetworkFormatError("field 'edges' must be a list of pairs")
    for k, e in enumerate(d["edges"]):
        if not (isinstance(e, (list, tuple)) and len(e) == 2):
            raise NetworkFormatError(f"edges[{k}]: expected a pair, got {e!r}")
    try:
        return build_network(
            d["n"],
            d["edges"],
            diag=d.get("diag", 1.0),
            weights=d.get("weights"),
            scheme=d.get("scheme", "unweighted"),
        )
    except (TypeError, ValueError) as exc:
        if isinstance(exc, NetworkFormatError):
            raise
        raise NetworkFormatError(str(exc)) from exc


def parse_edge_list(
    text: str,
    diag: float = 1.0,
    weights: Sequence[float] | None = None,
    scheme: str = "unweighted",
) -> Network:
    """Parse the plain format: first line ``n``, then one ``i j`` per line.

    Blank lines and ``#`` comments are skipped.
    """
    n = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if n is None:
            if len(parts) != 1 or not parts[0].isdigit():
                raise NetworkFormatError(f"line {lineno}: expected node count, got {raw!r}")
            n = int(parts[0])
            continue
        if len(parts) != 2:
            raise NetworkFormatError(f"line {lineno}: expected 'i j', got {raw!r}")
        try:
            edges.append((int(parts[0]), int(parts[1])))
        except ValueError:
            raise NetworkFormatError(f"line {lineno}: non-integer node in {raw!r}") from None
    if n is None:
        raise NetworkFormatError("empty edge list: missing node count")
    try:
        return build_network(n, edges, diag=diag, weights=weights, scheme=scheme)
    except NetworkFormatError:
        raise
    except NetworkError as exc:
        raise NetworkFormatError(str(exc)) from exc


def load_network(path: str | Path, **overrides) -> Network:
    """Read a network from JSON (``.json`` or a leading ``{``) or an edge list.

    ``overrides`` (``diag``, ``weights``, ``scheme``) replace the file's values;
    for edge lists they are the only way to set them.
    """
    text = Path(path).read_text(encoding="utf-8")
    overrides = {k: v for k, v in overrides.items() if v is not None}
    if str(path).endswith(".json") or text.lstrip().startswith("{"):
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise NetworkFormatError(f"line {exc.lineno}: {exc.msg}") from exc
        if isinstance(d, dict):
            d.update(overrides)
        return network_from_dict(d)
    return parse_edge_list(text, **overrides)


def save_network(net: Network, path: str | Path) -> None:
    Path(path).write_text(json.dumps(net.to_dict(), indent=2) + "\n", encoding="utf-8")
