"""Bowen spanning-set entropy of the embedded horseshoe flow.

Points of the horseshoe are grouped into *buckets* by their itinerary
over the time window: a bucket is a word ``F_0 .. F_{n-1}`` with ``n``
minimal such that ``r_n >= r(F_0) + T``.  Points in different buckets are
separated by the gaps between strips, so a spanning set is assembled bucket
by bucket.  Inside a bucket a grid of points (past words for ``x``,
continuation words for ``y``, and flow heights) is covered greedily by
``d_T`` balls, where ``d_T`` is the largest distance in space over sampled
times in ``[0, T]``.

The number of buckets grows like ``e^{hT}`` and is counted exactly; the
cover inside a bucket is estimated from a seeded uniform sample of
buckets.  Since the cover of one bucket does not grow with ``T``, the
reported estimate is the least-squares slope of ``log N(T_j)`` over a set
of horizons ``T_j`` in ``[T/2, T]``; the plain ``(1/T) log N(T)`` carries a
``log C(eps) / T`` bias and is reported as ``raw``.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import kernels
from .model import AffineHorseshoeModel, flow_position


class GridTooCoarse(ValueError):
    """Every grid point of some bucket is its own center at the smallest epsilon."""


@dataclass(frozen=True)
class SpanningRow:
    epsilon: float
    estimate: float
    raw: float
    counts: tuple[float, ...]


@dataclass(frozen=True)
class SpanningResult:
    T: float
    horizons: tuple[float, ...]
    buckets: tuple[int, ...]
    sampled: tuple[int, ...]
    rows: tuple[SpanningRow, ...]
    extrapolated: float
    merge_fraction: float

    def pairs(self) -> list[tuple[float, float]]:
        return [(r.epsilon, r.estimate) for r in self.rows]

    def to_json(self) -> dict:
        return {
            "T": self.T, "horizons": list(self.horizons), "buckets": list(self.buckets),
            "sampled": list(self.sampled),
            "rows": [{"epsilon": r.epsilon, "estimate": r.estimate, "raw": r.raw,
                      "counts": list(r.counts)} for r in self.rows],
            "extrapolated": self.extrapolated, "merge_fraction": self.merge_fraction,
        }


class _Itineraries:
    """Counts and uniform sampling of minimal words with roof sum ``>= s``."""

    def __init__(self, roofs: Sequence[Fraction]):
        self.roofs = tuple(roofs)

        @lru_cache(maxsize=None)
        def count(s: Fraction) -> int:
            if s <= 0:
                return 1
            return sum(count(s - r) for r in self.roofs)

        self.count = count

    def buckets(self, T: Fraction) -> int:
        return len(self.roofs) * self.count(T)

    def enumerate(self, T: Fraction) -> list[tuple[int, ...]]:
        out = []

        def walk(prefix, s):
            if s <= 0:
                out.append(prefix)
                return
            for i, r in enumerate(self.roofs):
                walk(prefix + (i,), s - r)

        for f0 in range(len(self.roofs)):
            walk((f0,), T)
        return out

    def sample(self, T: Fraction, rng: np.random.Generator) -> tuple[int, ...]:
        w = [int(rng.integers(len(self.roofs)))]
        s = T
        while s > 0:
            weights = np.array([float(self.count(s - r)) for r in self.roofs])
            i = int(rng.choice(len(self.roofs), p=weights / weights.sum()))
            w.append(i)
            s -= self.roofs[i]
        return tuple(w)


def _tail_words(L: int, depth: int) -> np.ndarray:
    if depth == 0:
        return np.zeros((1, 0), dtype=np.int64)
    grids = np.meshgrid(*[np.arange(L)] * depth, indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def bucket_trajectories(model: AffineHorseshoeModel, bucket: Sequence[int], T: float,
                        past_depth: int, ext_depth: int, heights: int, samples: int) -> np.ndarray:
    """Positions of the bucket's grid points at ``samples`` times in ``[0, T]``.

    Returns an array of shape ``(points, samples, 3)``.
    """
    L = model.L
    lam = float(model.lam)
    a = np.array([float(v) for v in model.offsets])
    c = np.array([float(v) for v in model.strips])
    roofs = np.array([float(v) for v in model.roofs])
    F = np.asarray(bucket, dtype=np.int64)
    n = len(F)
    pasts = _tail_words(L, past_depth)
    exts = _tail_words(L, ext_depth)
    # x_0 from the past read backwards, tail fixed at branch 0; then forward
    x_tail = a[0] / (1 - lam)
    x0 = np.full(len(pasts), x_tail)
    for k in range(past_depth - 1, -1, -1):
        x0 = a[pasts[:, k]] + lam * x0
    X = np.empty((len(pasts), n))
    X[:, 0] = x0
    for j in range(1, n):
        X[:, j] = a[F[j - 1]] + lam * X[:, j - 1]
    # y_j by Horner from the far end of the future (stable backwards)
    y = np.full(len(exts), c[0] / (1 - lam))
    for k in range(ext_depth - 1, -1, -1):
        y = c[exts[:, k]] + lam * y
    Y = np.empty((len(exts), n))
    for j in range(n - 1, -1, -1):
        y = c[F[j]] + lam * y
        Y[:, j] = y
    R = np.concatenate([[0.0], np.cumsum(roofs[F])])
    t0 = np.arange(heights) / heights * roofs[F[0]]
    tau = t0[:, None] + np.linspace(0.0, T, samples)[None, :]
    step = np.clip(np.searchsorted(R, tau, side="right") - 1, 0, n - 1)
    u = np.clip((tau - R[step]) / roofs[F[step]], 0.0, 1.0)
    xs = np.take_along_axis(np.broadcast_to(X[:, None, None, :], (len(pasts), 1, heights, n)),
                            np.broadcast_to(step[None, None], (len(pasts), 1, heights, samples)), axis=3)
    ys = np.take_along_axis(np.broadcast_to(Y[None, :, None, :], (1, len(exts), heights, n)),
                            np.broadcast_to(step[None, None], (1, len(exts), heights, samples)), axis=3)
    shape = (len(pasts), len(exts), heights, samples)
    xs = np.broadcast_to(xs, shape)
    ys = np.broadcast_to(ys, shape)
    br = np.broadcast_to(F[step][None, None], shape)
    uu = np.broadcast_to(u[None, None], shape)
    pos = flow_position(model, br, xs, ys, uu)
    return pos.reshape(-1, samples, 3)


def _d_T(p: np.ndarray, q: np.ndarray) -> float:
    return float(np.sqrt(((p - q) ** 2).sum(axis=-1)).max())


def spanning_entropy(model: AffineHorseshoeModel, T: float, epsilons: Sequence[float], *,
                     seed: int = 0, n_horizons: int = 6, max_buckets: int = 64,
                     past_depth: int = 2, ext_depth: int = 2, heights: int | None = None,
                     samples_per_unit: float = 4.0, threads: int = 1) -> SpanningResult:
    """Spanning-set entropy estimates for each ``eps`` and their ``eps -> 0`` extrapolation.

    Parameters
    ----------
    T
        Largest horizon; the slope is fitted over ``n_horizons`` values
        evenly spaced in ``[T/2, T]``.
    epsilons
        Ball radii in the units of the embedding.
    max_buckets
        Buckets per horizon that are actually covered; when there are no
        more than this many, all of them are used.
    past_depth, ext_depth, heights
        Grid inside a bucket: ``L**past_depth`` values of ``x``,
        ``L**ext_depth`` values of ``y`` and ``heights`` flow heights.  By
        default ``heights`` makes consecutive heights at most ``2/3`` of the
        smallest ``eps`` apart along the core circle.
    threads
        Worker threads over buckets; the result does not depend on it.

    Raises
    ------
    GridTooCoarse
        When some covered bucket needs one center per grid point at the
        smallest ``eps``.
    """
    if T <= 0:
        raise ValueError("T must be positive")
    eps = sorted({float(e) for e in epsilons}, reverse=True)
    if not eps or eps[-1] <= 0:
        raise ValueError("epsilons must be positive")
    if heights is None:
        e = model.embedding
        heights = int(math.ceil(1.5 * 2 * math.pi * (e.R0 + e.width) / eps[-1]))
    rng = np.random.default_rng(seed)
    itin = _Itineraries(model.roofs)
    horizons = np.linspace(T / 2, T, n_horizons) if n_horizons > 1 else np.array([float(T)])
    counts = np.zeros((len(eps), len(horizons)))
    n_buckets, n_sampled = [], []
    kept = []
    for h_idx, Th in enumerate(horizons):
        Tf = Fraction(repr(float(Th)))
        total = itin.buckets(Tf)
        if total <= max_buckets:
            chosen = itin.enumerate(Tf)
        else:
            chosen = [itin.sample(Tf, rng) for _ in range(max_buckets)]
        samples = max(2, int(math.ceil(samples_per_unit * Th)) + 1)

        def work(b, Th=Th, samples=samples):
            traj = bucket_trajectories(model, b, float(Th), past_depth, ext_depth, heights, samples)
            return traj, [len(kernels.greedy_cover(traj, e)) for e in eps]

        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                results = list(pool.map(work, chosen))
        else:
            results = [work(b) for b in chosen]
        sizes = np.array([r[1] for r in results], dtype=float)
        npts = results[0][0].shape[0]
        if (sizes[:, -1] >= npts).any():
            raise GridTooCoarse(f"eps={eps[-1]} saturates a bucket of {npts} grid points; refine the grid")
        counts[:, h_idx] = total * sizes.mean(axis=0)
        n_buckets.append(int(total))
        n_sampled.append(len(chosen))
        if h_idx == len(horizons) - 1:
            kept = [r[0] for r in results]

    merge = _merge_fraction(kept, eps[-1], rng)
    rows = []
    for i, e in enumerate(eps):
        logs = np.log(counts[i])
        slope = float(np.polyfit(horizons, logs, 1)[0]) if len(horizons) > 1 else float(logs[-1] / T)
        rows.append(SpanningRow(e, slope, float(logs[-1] / horizons[-1]), tuple(counts[i])))
    rows.sort(key=lambda r: r.epsilon)
    if len(rows) >= 2:
        x = np.array([r.epsilon for r in rows])
        y = np.array([r.estimate for r in rows])
        extrap = float(np.polyfit(x, y, 1)[1])
    else:
        extrap = rows[0].estimate
    return SpanningResult(float(T), tuple(float(h) for h in horizons), tuple(n_buckets), tuple(n_sampled),
                          tuple(rows), extrap, merge)


def _merge_fraction(trajs: list[np.ndarray], eps: float, rng: np.random.Generator, pairs: int = 2000) -> float:
    """Share of sampled point pairs from different buckets that are ``d_T``-closer than ``eps``."""
    if len(trajs) < 2:
        return 0.0
    close = 0
    for _ in range(pairs):
        i, j = rng.choice(len(trajs), size=2, replace=False)
        p = trajs[i][rng.integers(len(trajs[i]))]
        q = trajs[j][rng.integers(len(trajs[j]))]
        close += _d_T(p, q) < eps
    return close / pairs
