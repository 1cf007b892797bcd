"""Numpy implementations of the hot kernels.

Same signatures and results as the compiled ``_ckernels`` module; used when
the extension is not built or ``NETDISTANCING_PURE=1`` is set.
"""

import numpy as np


def _popcount(a):
    return np.bitwise_count(a) if hasattr(np, "bitwise_count") else _popcount_slow(a)


def _popcount_slow(a):
    a = a.astype(np.uint64)
    c = np.zeros(a.shape, dtype=np.uint8)
    while np.any(a):
        c += (a & np.uint64(1)).astype(np.uint8)
        a >>= np.uint64(1)
    return c


def regular_mask_table(adj_masks, n, r):
    """uint8 table over all ``2**n`` subsets: 1 where the induced subgraph is r-regular.

    The empty subset is never regular.
    """
    masks = np.arange(1 << n, dtype=np.uint64)
    ok = masks != 0
    for i in range(n):
        member = ((masks >> np.uint64(i)) & np.uint64(1)).astype(bool)
        deg = _popcount(masks & np.uint64(adj_masks[i]))
        ok &= ~member | (deg == r)
    return ok.astype(np.uint8)


def neighbor_union_table(adj_masks, n):
    """uint64 table: union of neighbor masks over the members of each subset."""
    out = np.zeros(1 << n, dtype=np.uint64)
    for i in range(n):
        lo = 1 << i
        out[lo : 2 * lo] = out[:lo] | np.uint64(adj_masks[i])
    return out


def subset_closure(table, n):
    """uint8 table: 1 where some submask (including itself) is flagged in ``table``."""
    out = np.asarray(table, dtype=np.uint8).copy()
    for i in range(n):
        view = out.reshape(-1, 2, 1 << i)
        view[:, 1, :] |= view[:, 0, :]
    return out


def replicator_run(A, x0, dt, max_steps, conv_tol, states, payoffs):
    """Discrete replicator descent; fills ``states``/``payoffs`` in place.

    Returns ``(steps, converged)``.
    """
    x = np.array(x0, dtype=float)
    p = A @ x
    pi = float(x @ p)
    states[0] = x
    payoffs[0] = pi
    step = 0
    while step < max_steps:
        c = p.max() + 1.0
        xn = x * (c - p) / (c - pi)
        xn = x + dt * (xn - x)
        xn /= xn.sum()
        diff = np.abs(xn - x).max()
        x = xn
        step += 1
        p = A @ x
        pi = float(x @ p)
        states[step] = x
        payoffs[step] = pi
        if diff < conv_tol:
            return step, True
    return step, False
