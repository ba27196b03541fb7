"""Census of periodic-orbit classes and chord classes, and their growth rates.

Orbit classes are necklaces keyed by their least rotation; their period is
the cyclic Birkhoff sum of the roof.  A chord with interior ``w`` between a
past tail and a future tail is the sequence

    c_j = a_j (j <= 0),   c_j = w_j (1 <= j <= n - 2),   c_j = b_{j-n+1} (j >= n - 1)

whose length is the Birkhoff sum ``r_n(c)``.  The past block ``P`` is read
so that ``a_0`` is its last symbol, ``a_j = P[(j - 1) mod p]``; the future
block gives ``b_j = F[j mod q]``.
"""
from __future__ import annotations

import csv
import io
import json
import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from . import kernels
from .shift import Necklace, Word, canonical_necklace, rotate
from .suspension import CylinderFunction

TOL = 1e-12


@dataclass(frozen=True)
class OrbitClass:
    necklace: Necklace
    period: float

    @property
    def size(self) -> float:
        return self.period

    def to_json(self) -> dict:
        return {"necklace": list(self.necklace.canonical), "label": str(self.necklace),
                "period": self.period}


@dataclass(frozen=True)
class ChordClass:
    interior: Word
    boundary_past: Necklace
    boundary_future: Necklace
    length: float

    @property
    def size(self) -> float:
        return self.length

    def to_json(self) -> dict:
        return {"interior": list(self.interior), "past": list(self.boundary_past.canonical),
                "future": list(self.boundary_future.canonical), "length": self.length}


@dataclass(frozen=True)
class GrowthEstimate:
    """Least-squares growth rate of ``log N(T)`` over the top half of a grid.

    ``slope`` fits ``log N(T) + a log T`` with ``a = prefactor_exponent``,
    which removes the polynomial prefactor of ``N(T) ~ e^{hT} / T^a``;
    ``raw_slope`` is the plain fit of ``log N(T)``.
    """

    samples: tuple[tuple[float, float], ...]
    slope: float
    window: tuple[float, float]
    residual: float
    raw_slope: float
    prefactor_exponent: float

    def to_json(self) -> dict:
        return {"samples": [list(s) for s in self.samples], "slope": self.slope,
                "window": list(self.window), "residual": self.residual,
                "raw_slope": self.raw_slope, "prefactor_exponent": self.prefactor_exponent}


def _limit(T: float) -> float:
    return T + TOL * max(1.0, abs(T))


def _kernel_table(roof: CylinderFunction) -> np.ndarray:
    # undefined cylinders get an infinite value so that the walk prunes them
    return np.where(np.isnan(roof.table), np.inf, roof.table)


def _check(roof: CylinderFunction, L: int) -> float:
    if roof.alphabet_size != L:
        raise ValueError(f"roof is defined over {roof.alphabet_size} symbols, not {L}")
    rmin = roof.min_value()
    if rmin <= 0:
        raise ValueError("roof must be positive")
    return rmin


def census_orbits(roof: CylinderFunction, L: int, T: float) -> list[OrbitClass]:
    """All necklaces over ``L`` symbols whose orbit period is at most ``T``.

    Ordered by length, then lexicographically.  Lengths are bounded by
    ``T / min(roof)`` and the prenecklace walk prunes on partial sums.
    """
    rmin = _check(roof, L)
    if T < rmin - TOL:
        return []
    n_max = int(math.floor(_limit(T) / rmin))
    syms, offs, pers = kernels.fkm_necklaces(L, n_max, _kernel_table(roof), roof.depth, float(T), TOL)
    out = [OrbitClass(Necklace(tuple(int(s) for s in syms[offs[i]:offs[i + 1]])), float(pers[i]))
           for i in range(len(pers))]
    out.sort(key=lambda c: (len(c.necklace), c.necklace.canonical))
    return out


census_orbits.prefactor_exponent = 1.0


def _tails(past: Necklace | Sequence[int], future: Necklace | Sequence[int]) -> tuple[Word, Word]:
    p = past.canonical if isinstance(past, Necklace) else tuple(past)
    f = future.canonical if isinstance(future, Necklace) else tuple(future)
    if not p or not f:
        raise ValueError("boundary tails must be nonempty")
    return p, f


def chord_sequence(past: Sequence[int], interior: Sequence[int], future: Sequence[int],
                   lo: int, hi: int) -> Word:
    """Symbols ``c_lo .. c_{hi-1}`` of the chord sequence."""
    p, f = tuple(past), tuple(future)
    n = len(interior) + 2
    out = []
    for j in range(lo, hi):
        if j <= 0:
            out.append(p[(j - 1) % len(p)])
        elif j <= n - 2:
            out.append(interior[j - 1])
        else:
            out.append(f[(j - n + 1) % len(f)])
    return tuple(out)


def chord_length(roof: CylinderFunction, past, interior: Sequence[int], future) -> float:
    """``r_n(c)`` for ``n = len(interior) + 2``, evaluated directly on the sequence."""
    p, f = _tails(past, future)
    n = len(interior) + 2
    c = chord_sequence(p, interior, f, 0, n + roof.depth - 1)
    return math.fsum(float(roof(c[j:j + roof.depth])) for j in range(n))


def census_chords(roof: CylinderFunction, L: int, past: Necklace | Sequence[int],
                  future: Necklace | Sequence[int], T: float) -> list[ChordClass]:
    """All chord interiors ``w`` (possibly empty) with ``r_n(c) <= T``.

    Interiors are grown one symbol at a time.  A prefix is dropped once the
    roof windows it already determines, plus ``min(roof)`` for each window
    still open, exceed ``T``.
    """
    rmin = _check(roof, L)
    p, f = _tails(past, future)
    k = roof.depth
    table = _kernel_table(roof)
    limit = _limit(T)
    a0 = p[-1]
    tail = np.array([f[j % len(f)] for j in range(k)], dtype=np.int64)
    powers = L ** np.arange(k - 1, -1, -1)
    P = Necklace(p) if isinstance(past, Necklace) else canonical_necklace(p)
    F = Necklace(f) if isinstance(future, Necklace) else canonical_necklace(f)
    out: list[ChordClass] = []
    words = np.zeros((1, 0), dtype=np.int64)
    level = 0
    while words.shape[0]:
        N = words.shape[0]
        seq = np.hstack([np.full((N, 1), a0), words, np.tile(tail, (N, 1))])
        idx = np.arange(level + 2)[:, None] + np.arange(k)[None, :]
        codes = (seq[:, idx] * powers).sum(axis=2)
        wins = table[codes]
        total = wins.sum(axis=1)
        for row in np.nonzero(total <= limit)[0]:
            out.append(ChordClass(tuple(int(s) for s in words[row]), P, F, float(total[row])))
        # windows fully inside c_0..c_level stay fixed under extension
        fixed = max(0, level - k + 2)
        bound = wins[:, :fixed].sum(axis=1) + (level + 3 - fixed) * rmin
        keep = words[bound <= limit]
        if keep.shape[0] == 0:
            break
        words = np.hstack([np.repeat(keep, L, axis=0),
                           np.tile(np.arange(L), keep.shape[0])[:, None]])
        level += 1
    return out


census_chords.prefactor_exponent = 0.0


def count_orbits(roof: CylinderFunction, L: int, T_values: Iterable[float]) -> list[int]:
    """``N(T)`` for each ``T`` from a single census at the largest ``T``."""
    T_values = list(T_values)
    periods = np.sort([c.period for c in census_orbits(roof, L, max(T_values))])
    return [int(np.searchsorted(periods, _limit(T), side="right")) for T in T_values]


def growth_rate(census_fn: Callable[..., list], roof: CylinderFunction, L: int,
                T_grid: Sequence[float], *args, prefactor_exponent: float | None = None) -> GrowthEstimate:
    """Exponential growth rate of ``N(T) = len(census_fn(roof, L, *args, T))``.

    The census is run once at ``max(T_grid)``; the smaller counts follow
    because censuses are monotone in ``T``.  Grid points with ``N(T) = 0``
    are dropped, and the fit uses the top half of the remaining points.

    Parameters
    ----------
    census_fn
        :func:`census_orbits`, :func:`census_chords` or any callable with
        the same shape whose items carry a ``size``.
    args
        Extra positional arguments passed before ``T`` (the chord tails).
    prefactor_exponent
        Exponent ``a`` of the polynomial prefactor; defaults to the
        ``prefactor_exponent`` attribute of ``census_fn`` (1 for orbits,
        0 for chords).
    """
    grid = [float(T) for T in T_grid]
    if len(grid) < 4 or any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("T_grid must be strictly increasing with at least 4 points")
    if prefactor_exponent is None:
        prefactor_exponent = float(getattr(census_fn, "prefactor_exponent", 0.0))
    items = census_fn(roof, L, *args, grid[-1])
    sizes = np.sort([it.size for it in items])
    counts = [int(np.searchsorted(sizes, _limit(T), side="right")) for T in grid]
    pts = [(T, math.log(N)) for T, N in zip(grid, counts) if N > 0]
    if len(pts) < 2:
        raise ValueError("fewer than two grid points with N(T) > 0")
    top = pts[len(pts) // 2:] if len(pts) >= 4 else pts
    t = np.array([T for T, _ in top])
    y = np.array([v for _, v in top])
    raw = float(np.polyfit(t, y, 1)[0])
    adj = y + prefactor_exponent * np.log(t)
    coef = np.polyfit(t, adj, 1)
    resid = adj - np.polyval(coef, t)
    return GrowthEstimate(tuple(pts), float(coef[0]), (float(t[0]), float(t[-1])),
                          float(np.sqrt(np.mean(resid**2))), raw, float(prefactor_exponent))


def group_by_necklace(words: Iterable[Sequence[int]]) -> dict[Necklace, list[Word]]:
    groups: dict[Necklace, list[Word]] = defaultdict(list)
    for w in words:
        groups[canonical_necklace(w)].append(tuple(w))
    return dict(groups)


def verify_cyclic_injectivity(words: Iterable[Sequence[int]]) -> bool:
    """True iff necklace keys group ``words`` exactly as brute-force rotation does."""
    words = [tuple(w) for w in words]
    by_key = group_by_necklace(words)
    by_rot: dict[frozenset, set[Word]] = defaultdict(set)
    for w in words:
        by_rot[frozenset(rotate(w, k) for k in range(len(w)))].add(w)
    a = sorted(sorted(set(g)) for g in by_key.values())
    b = sorted(sorted(g) for g in by_rot.values())
    return a == b


def counts_csv(T_values: Sequence[float], counts: Sequence[int]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["T", "N", "logN"])
    for T, N in zip(T_values, counts):
        w.writerow([repr(float(T)), N, repr(math.log(N)) if N > 0 else "-inf"])
    return buf.getvalue()


def classes_json(classes: Sequence[OrbitClass | ChordClass]) -> str:
    return json.dumps([c.to_json() for c in classes], indent=1)
