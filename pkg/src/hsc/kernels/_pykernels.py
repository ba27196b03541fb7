"""Reference implementations of the hot kernels (numpy / pure Python).

Every function here has a twin with the same signature in ``_ckernels.pyx``.
"""
from __future__ import annotations

import sys

import numpy as np


def fkm_necklaces(L, n_max, table, depth, T, tol=1e-12):
    """Necklaces of length ``1..n_max`` over ``L`` symbols with cyclic roof sum ``<= T``.

    Walks the Fredricksen-Kessler-Maiorana prenecklace tree once; a node of
    length ``t`` with Lyndon period ``p`` is a necklace iff ``p`` divides ``t``.
    Subtrees are pruned when the sum of roof windows lying entirely inside
    the prefix already exceeds ``T``, which is a lower bound for every
    extension.  Returns ``(symbols, offsets, periods)`` with the necklaces
    concatenated in ``symbols``.
    """
    table = np.asarray(table, dtype=float)
    limit = T + tol * max(1.0, abs(T))
    a = [0] * (n_max + 2)
    lin = [0.0] * (n_max + 2)
    syms: list[int] = []
    offsets = [0]
    periods: list[float] = []

    def cyclic(n):
        s = lin[n]
        for i in range(max(1, n - depth + 2), n + 1):
            c = 0
            for q in range(depth):
                c = c * L + a[(i - 1 + q) % n + 1]
            s += table[c]
        return s

    sys.setrecursionlimit(max(sys.getrecursionlimit(), 4 * n_max + 100))

    def gen(t, p):
        n = t - 1
        if n >= 1 and n % p == 0:
            per = cyclic(n)
            if per <= limit:
                syms.extend(a[1:n + 1])
                offsets.append(len(syms))
                periods.append(per)
        if t > n_max:
            return
        start = a[t - p]
        for j in range(start, L):
            a[t] = j
            if t >= depth:
                c = 0
                for q in range(t - depth + 1, t + 1):
                    c = c * L + a[q]
                lin[t] = lin[t - 1] + table[c]
            else:
                lin[t] = lin[t - 1]
            if lin[t] > limit:
                continue
            gen(t + 1, p if j == start else t)

    gen(1, 1)
    return (np.array(syms, dtype=np.int8), np.array(offsets, dtype=np.int64),
            np.array(periods, dtype=float))


def greedy_cover(traj, eps):
    """Greedy cover of trajectories by sup-distance balls of radius ``eps``.

    ``traj`` has shape ``(N, K, D)``; the distance between two points is the
    maximum over the ``K`` time samples of the Euclidean distance.  Points
    are scanned in order and every still-uncovered point becomes a center.
    Returns the center indices.
    """
    traj = np.ascontiguousarray(traj, dtype=float)
    N = traj.shape[0]
    uncovered = np.ones(N, dtype=bool)
    centers = []
    eps2 = eps * eps
    for i in range(N):
        if not uncovered[i]:
            continue
        centers.append(i)
        idx = np.nonzero(uncovered)[0]
        diff = traj[idx] - traj[i]
        d2 = np.einsum("nkd,nkd->nk", diff, diff).max(axis=1)
        uncovered[idx[d2 <= eps2]] = False
    return np.array(centers, dtype=np.int64)


def gauss_linking(P, Q, chunk=256):
    """Gauss linking integral of two closed polygons, evaluated exactly per segment pair.

    ``P`` and ``Q`` list the vertices without repeating the first one.  Each
    pair of segments contributes the solid angle of the quadrilateral it
    spans (two Van Oosterom-Strackee triangles).
    """
    P = np.asarray(P, dtype=float)
    Q = np.asarray(Q, dtype=float)
    P1 = np.roll(P, -1, axis=0)
    l0, l1 = Q[None, :, :], np.roll(Q, -1, axis=0)[None, :, :]

    def dot(u, v):
        return np.einsum("ijk,ijk->ij", u, v)

    total = 0.0
    for i in range(0, len(P), chunk):
        k0, k1 = P[i:i + chunk, None, :], P1[i:i + chunk, None, :]
        a, b, c, d = l0 - k0, l0 - k1, l1 - k1, l1 - k0
        p = dot(a, np.cross(b, c))
        an, bn, cn, dn = (np.sqrt(dot(v, v)) for v in (a, b, c, d))
        d1 = an * bn * cn + dot(a, b) * cn + dot(b, c) * an + dot(c, a) * bn
        d2 = an * dn * cn + dot(a, d) * cn + dot(d, c) * an + dot(c, a) * dn
        total += np.arctan2(p, d1).sum() + np.arctan2(p, d2).sum()
    return float(total / (2 * np.pi))


def bounded_scan(x):
    """Best endpoint pair for the bounded-subsequence problem.

    For endpoints ``i < j`` the subsequence keeps every ``x_k``, ``i < k < j``,
    lying strictly between ``x_i`` and ``x_j``.  Returns ``(i, j, size)`` for
    the first pair (lexicographically) of maximal size.
    """
    x = np.asarray(x, dtype=np.int64)
    n = x.shape[0]
    if n == 1:
        return 0, 0, 1
    lo = np.minimum(x[:, None], x[None, :])
    hi = np.maximum(x[:, None], x[None, :])
    k = np.arange(n)
    inside = (x[None, None, :] > lo[:, :, None]) & (x[None, None, :] < hi[:, :, None])
    window = (k[None, None, :] > k[:, None, None]) & (k[None, None, :] < k[None, :, None])
    size = (inside & window).sum(axis=2) + 2
    size[np.tril_indices(n)] = 0
    flat = int(np.argmax(size))
    i, j = divmod(flat, n)
    return i, j, int(size[i, j])
