import itertools

import numpy as np
import pytest

from netdistancing import build_network, load_fixture


def cycle(n, **kw):
    return build_network(n, [(i, i % n + 1) for i in range(1, n + 1)], **kw)


def complete(n, **kw):
    return build_network(n, itertools.combinations(range(1, n + 1), 2), **kw)


def path(n, **kw):
    return build_network(n, [(i, i + 1) for i in range(1, n)], **kw)


def empty(n, **kw):
    return build_network(n, [], **kw)


def star(leaves, **kw):
    return build_network(leaves + 1, [(1, j) for j in range(2, leaves + 2)], **kw)


def random_network(rng, n, p, **kw):
    edges = [(i, j) for i, j in itertools.combinations(range(1, n + 1), 2) if rng.random() < p]
    return build_network(n, edges, **kw)


def random_regular_network(rng, r, comps):
    """Disjoint union of random r-regular pieces (sizes from ``comps``) plus extra
    outside nodes each linked to r + 1 random support nodes."""
    edges = []
    offset = 0
    for size in comps:
        # circulant r-regular graph on `size` nodes (r even, or size even)
        half = list(range(1, r // 2 + 1))
        for i in range(size):
            for s in half:
                edges.append((offset + i + 1, offset + (i + s) % size + 1))
            if r % 2:
                edges.append((offset + i + 1, offset + (i + size // 2) % size + 1))
        offset += size
    k = offset
    extra = int(rng.integers(0, 4))
    for v in range(k + 1, k + extra + 1):
        for u in rng.choice(k, size=min(k, r + 1 + int(rng.integers(0, 2))), replace=False):
            edges.append((v, int(u) + 1))
    # random links among outside nodes
    for a, b in itertools.combinations(range(k + 1, k + extra + 1), 2):
        if rng.random() < 0.5:
            edges.append((a, b))
    # relabel with a random permutation
    n = k + extra
    perm = rng.permutation(n) + 1
    edges = [(int(perm[a - 1]), int(perm[b - 1])) for a, b in edges]
    support = sorted(int(perm[v]) for v in range(k))
    return build_network(n, edges), support


@pytest.fixture(scope="session")
def fig3():
    return load_fixture("fig3")


@pytest.fixture(scope="session")
def fig4():
    return load_fixture("fig4")


@pytest.fixture(scope="session")
def fig5():
    return load_fixture("fig5")


@pytest.fixture(scope="session")
def fig4w():
    return load_fixture("fig4_weighted")


@pytest.fixture(scope="session")
def fig5w():
    return load_fixture("fig5_weighted")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# -- acceptance reporting ----------------------------------------------------

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion():
    """Record one pass/fail line for an acceptance criterion, then assert it."""

    def record(number: int, ok: bool, detail: str) -> None:
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
