"""Pure-Python (numpy) versions of the batched kernels.

Same signatures and results as the compiled ``_kernels`` extension; used
when the extension is not built or ``SPHERETANGENTS_PURE=1`` is set.
"""
import numpy as np


def quadratic_forms(P, W):
    """Row-wise ``p^T W p`` for an ``(n, 6)`` array of Plücker vectors."""
    P = np.ascontiguousarray(P, dtype=float)
    return np.einsum("ni,ij,nj->n", P, np.asarray(W, dtype=float), P)


def meet_forms(P, q):
    """Row-wise incidence form between each row of ``P`` and line ``q``."""
    P = np.ascontiguousarray(P, dtype=float)
    q = np.asarray(q, dtype=float)
    return (P[:, 0] * q[5] - P[:, 1] * q[4] + P[:, 2] * q[3]
            + P[:, 3] * q[2] - P[:, 4] * q[1] + P[:, 5] * q[0])


def clip_lines(points, dirs, lo, hi):
    """Liang-Barsky clipping of infinite lines ``x = a + s d`` to a box.

    Returns ``(smin, smax, hit)``; ``hit[i]`` is False when line ``i`` misses
    the box or only touches it in a single point.
    """
    A = np.ascontiguousarray(points, dtype=float)
    D = np.ascontiguousarray(dirs, dtype=float)
    n = A.shape[0]
    smin = np.full(n, -np.inf)
    smax = np.full(n, np.inf)
    hit = np.ones(n, dtype=bool)
    for k in range(3):
        d = D[:, k]
        a = A[:, k]
        flat = np.abs(d) < 1e-300
        outside = flat & ((a < lo[k]) | (a > hi[k]))
        hit &= ~outside
        with np.errstate(divide="ignore", invalid="ignore"):
            s1 = (lo[k] - a) / d
            s2 = (hi[k] - a) / d
        lo_s = np.where(flat, -np.inf, np.minimum(s1, s2))
        hi_s = np.where(flat, np.inf, np.maximum(s1, s2))
        smin = np.maximum(smin, lo_s)
        smax = np.minimum(smax, hi_s)
    hit &= smax > smin
    return smin, smax, hit


def match_nearest(prev, cur, threshold):
    """Greedy nearest-neighbour matching of unit Plücker vectors.

    Distances ignore the sign of the representative.  Returns, for each row
    of ``cur``, the index of its partner in ``prev`` or -1.
    """
    prev = np.asarray(prev, dtype=float).reshape(-1, 6)
    cur = np.asarray(cur, dtype=float).reshape(-1, 6)
    out = np.full(cur.shape[0], -1, dtype=np.int64)
    if prev.shape[0] == 0 or cur.shape[0] == 0:
        return out
    dm = np.linalg.norm(cur[:, None, :] - prev[None, :, :], axis=2)
    dp = np.linalg.norm(cur[:, None, :] + prev[None, :, :], axis=2)
    dist = np.minimum(dm, dp)
    used_prev = np.zeros(prev.shape[0], dtype=bool)
    used_cur = np.zeros(cur.shape[0], dtype=bool)
    order = np.argsort(dist, axis=None, kind="stable")
    for flat in order:
        i, j = divmod(int(flat), prev.shape[0])
        if dist[i, j] > threshold:
            break
        if used_cur[i] or used_prev[j]:
            continue
        out[i] = j
        used_cur[i] = True
        used_prev[j] = True
    return out
