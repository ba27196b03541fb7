"""Loop harvesting, weaving and order-bounded selection.

The harvest replaces a measure-theoretic existence argument by exhaustive
enumeration: every loop of the requested length whose Birkhoff sum stays
in the window around ``m * integral`` is kept, and the harvest is
*certified* when there are at least ``exp(m (h - eps))`` of them.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import kernels
from .shift import NotTransitive, TransitionGraph, Word, enumerate_loops, format_word, is_transitive
from .suspension import CylinderFunction
from .thermo import InvalidInput, MarkovMeasure, integrate, measure_entropy

EXHAUSTIVE_LIMIT = 10**6
SAMPLE_SIZE = 10**5
SELECTION_THRESHOLD = 200


@dataclass(frozen=True)
class LoopHarvest:
    base_vertex: int
    length: int
    loops: tuple[Word, ...]
    epsilon: float
    measure: MarkovMeasure = field(repr=False)
    integral: float
    entropy: float

    @property
    def k(self) -> int:
        return len(self.loops)

    @property
    def threshold(self) -> float:
        """``exp(m (h - eps))``, the count a certified harvest must reach."""
        return math.exp(self.length * (self.entropy - self.epsilon))

    @property
    def certified(self) -> bool:
        return self.k >= self.threshold

    def to_json(self) -> dict:
        return {
            "base_vertex": self.base_vertex,
            "m": self.length,
            "k": self.k,
            "threshold": self.threshold,
            "epsilon": self.epsilon,
            "entropy": self.entropy,
            "integral": self.integral,
            "certified": self.certified,
            "measure": self.measure.to_json(),
            "loops": [list(w) for w in self.loops],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)


def _window_tol(scale: float) -> float:
    return 1e-12 * max(1.0, abs(scale))


def harvest_loops(g: TransitionGraph, m: MarkovMeasure, pot: CylinderFunction,
                  epsilon: float, length: int) -> LoopHarvest:
    """Loops of a fixed length whose Birkhoff sums are typical for ``m``.

    For every vertex, all loops of ``length`` edges are enumerated and a loop
    ``w`` is kept when ``|phi_m(w^inf) - m * int(phi)| <= m * eps``.  The
    vertex with the most surviving loops (smallest index on ties) is
    returned.
    """
    if epsilon <= 0:
        raise InvalidInput("epsilon must be positive")
    if not is_transitive(g):
        raise NotTransitive("harvesting needs a transitive graph")
    mean = integrate(pot, m)
    h = measure_entropy(m)
    target = length * mean
    width = length * epsilon + _window_tol(target)
    best: tuple[int, list[Word]] | None = None
    for v in range(g.alphabet_size):
        loops = enumerate_loops(g, v, length)
        sums = _cyclic_sums(pot, np.array(loops, dtype=np.int64).reshape(len(loops), length))
        kept = [w for w, s in zip(loops, sums) if abs(s - target) <= width]
        if best is None or len(kept) > len(best[1]):
            best = (v, kept)
    assert best is not None
    return LoopHarvest(best[0], length, tuple(best[1]), float(epsilon), m, mean, h)


def _cyclic_sums(pot: CylinderFunction, words: np.ndarray) -> np.ndarray:
    """Birkhoff sums over one period for each row of ``words`` (vectorised)."""
    if words.size == 0:
        return np.zeros(words.shape[0])
    L = pot.alphabet_size
    codes = np.zeros_like(words)
    for q in range(pot.depth):
        codes = codes * L + np.roll(words, -q, axis=1)
    vals = pot.table[codes]
    if np.isnan(vals).any():
        raise InvalidInput("word visits a cylinder where the potential is undefined")
    return vals.sum(axis=1)


@dataclass(frozen=True)
class ConcatenationReport:
    ok: bool
    mode: str
    checked: int
    max_depth: int
    worst: float = 0.0

    def __bool__(self) -> bool:
        return self.ok


def verify_concatenations(h: LoopHarvest, pot: CylinderFunction, max_depth: int,
                          seed: int = 0) -> ConcatenationReport:
    """Check the Birkhoff window for every concatenation of up to ``max_depth`` loops.

    Depths with ``k**l <= 10**6`` tuples are checked exhaustively; deeper
    levels use ``10**5`` uniformly sampled tuples and the report says so.
    ``worst`` is the largest normalised deviation ``|phi_lm - lm int phi| / lm``.
    """
    if not h.loops:
        raise InvalidInput("empty harvest")
    loops = np.array(h.loops, dtype=np.int64)
    k, m = loops.shape
    rng = np.random.default_rng(seed)
    mode = "exhaustive"
    checked = 0
    worst = 0.0
    ok = True
    for l in range(1, max_depth + 1):
        total = k**l
        if total <= EXHAUSTIVE_LIMIT:
            batches = _tuple_batches(k, l)
        else:
            mode = "sampled"
            batches = [rng.integers(0, k, size=(SAMPLE_SIZE, l))]
        target = l * m * h.integral
        width = l * m * h.epsilon + _window_tol(target)
        for idx in batches:
            words = loops[idx].reshape(idx.shape[0], l * m)
            dev = np.abs(_cyclic_sums(pot, words) - target)
            checked += idx.shape[0]
            worst = max(worst, float(dev.max()) / (l * m))
            if (dev > width).any():
                ok = False
    return ConcatenationReport(ok, mode, checked, max_depth, worst)


def _tuple_batches(k: int, l: int, batch: int = 65536):
    """All tuples in ``range(k)**l`` in lexicographic order, in array batches."""
    total = k**l
    for start in range(0, total, batch):
        flat = np.arange(start, min(total, start + batch))
        digits = np.empty((flat.size, l), dtype=np.int64)
        for pos in range(l - 1, -1, -1):
            digits[:, pos] = flat % k
            flat = flat // k
        yield digits


def check_bounded(seq: Sequence[int], indices: Sequence[int]) -> bool:
    """Indices increase and every interior value lies between the two endpoint values."""
    if not indices:
        return False
    if any(b <= a for a, b in zip(indices, indices[1:])):
        return False
    lo, hi = sorted((seq[indices[0]], seq[indices[-1]]))
    return all(lo <= seq[i] <= hi for i in indices)


def bounded_subsequence(seq: Sequence[int]) -> list[int]:
    """Longest subsequence whose interior values lie between its endpoint values.

    Scans every endpoint pair ``i < j`` and keeps the elements in between
    whose values fall between ``seq[i]`` and ``seq[j]``.  The result is
    maximal, and in particular has length at least ``ceil(n / 5)``.
    """
    x = [int(v) for v in seq]
    if not x:
        raise InvalidInput("empty sequence")
    if len(set(x)) != len(x):
        raise InvalidInput("entries must be pairwise distinct")
    i, j, _ = kernels.bounded_scan(np.array(x, dtype=np.int64))
    if i == j:
        return [i]
    lo, hi = sorted((x[i], x[j]))
    return [i] + [k for k in range(i + 1, j) if lo < x[k] < hi] + [j]


IndexRule = Callable[[int, int, int], int]


def weave_loops(alpha: Sequence[int], betas: Sequence[Sequence[int]], gammas: Sequence[Sequence[int]],
                indices: Sequence[int] | IndexRule, s: int, n: int, q: int,
                graph: TransitionGraph | None = None) -> Word:
    """The woven loop ``alpha^s (prod_i prod_j Gamma_ij) alpha^s``.

    ``Gamma_ij`` is ``q`` loops from ``gammas`` followed by ``betas[j]``.
    The gamma used at slot ``t`` of ``Gamma_ij`` is ``indices(i, j, t)`` or,
    for a flat sequence, ``indices[(i d + j) q + t]`` with ``d = len(betas)``.

    Parameters
    ----------
    alpha, betas, gammas
        Loops of a common length ``m``.  ``alpha`` must differ from every beta.
    indices
        Gamma selection, callable or flat sequence of ``n d q`` entries.
    s, n, q
        Repetition counts; the result has length ``(2 s + n d (q + 1)) m``.
    graph
        When given, every loop must be an admissible loop word based at
        ``alpha[0]``.

    Notes
    -----
    The result is a primitive necklace when ``s >= 1``, every loop visits
    ``alpha[0]`` only at its start, and either ``alpha`` is not a gamma or
    ``2 s > q``: the word then splits into loops in one way only, and
    ``alpha^{2s}`` is its unique longest cyclic run of ``alpha``.  Outside
    these conditions periodic outputs exist, e.g. ``alpha = CA``,
    ``betas = [CB]``, gammas ``CB, CA, CA`` with ``s = n = 1, q = 3`` gives
    ``(CACBCA)^2``.
    """
    alpha = tuple(alpha)
    betas = [tuple(b) for b in betas]
    gammas = [tuple(c) for c in gammas]
    d = len(betas)
    m = len(alpha)
    if m == 0 or d == 0 or not gammas:
        raise InvalidInput("alpha, betas and gammas must be nonempty")
    if min(s, n, q) < 0:
        raise InvalidInput("s, n, q must be >= 0")
    for w in betas + gammas:
        if len(w) != m:
            raise InvalidInput(f"loop {format_word(w)} does not have length {m}")
    if alpha in betas:
        raise InvalidInput("alpha must differ from every beta")
    if graph is not None:
        for w in [alpha] + betas + gammas:
            if w[0] != alpha[0] or not graph.is_admissible(w, loop=True):
                raise InvalidInput(f"{format_word(w)} is not a loop based at {alpha[0]}")
    if callable(indices):
        pick = indices
    else:
        flat = list(indices)
        if len(flat) != n * d * q:
            raise InvalidInput(f"expected {n * d * q} gamma indices, got {len(flat)}")

        def pick(i, j, t):
            return flat[(i * d + j) * q + t]

    out: list[int] = list(alpha * s)
    for i in range(n):
        for j in range(d):
            for t in range(q):
                out.extend(gammas[pick(i, j, t)])
            out.extend(betas[j])
    out.extend(alpha * s)
    return tuple(out)


@dataclass(frozen=True)
class OrderedSelection:
    """Items picked from two orders so that the bracket conditions hold.

    ``[a; b; c]`` means ``b`` lies between ``a`` and ``c`` in both orders.
    Fields are item indices; ``theta_m``/``theta_p`` are ``None`` when too
    few items were available.
    """

    theta_mm: int
    theta_pp: int
    theta_m: int | None
    theta_p: int | None
    omegas: tuple[int, ...]
    orientation: int
    certified: bool
    K: int

    def to_json(self) -> dict:
        return {
            "theta_mm": self.theta_mm, "theta_pp": self.theta_pp,
            "theta_m": self.theta_m, "theta_p": self.theta_p,
            "omegas": list(self.omegas), "orientation": self.orientation,
            "certified": self.certified, "K": self.K,
        }


def _between(order, a, b, c) -> bool:
    lo, hi = sorted((order[a], order[c]))
    return lo < order[b] < hi


def check_brackets(sel: OrderedSelection, order_s: Sequence[int], order_u: Sequence[int],
                   orientation: Sequence[int] | None = None) -> bool:
    """Independent check of all bracket conditions and the shared orientation."""
    triples = []
    if sel.theta_m is not None:
        triples.append((sel.theta_mm, sel.theta_m, sel.theta_pp))
    if sel.theta_p is not None:
        triples.append((sel.theta_mm, sel.theta_p, sel.theta_pp))
    if sel.omegas and (sel.theta_m is None or sel.theta_p is None):
        return False
    triples += [(sel.theta_m, w, sel.theta_p) for w in sel.omegas]
    for a, b, c in triples:
        if not (_between(order_s, a, b, c) and _between(order_u, a, b, c)):
            return False
    if orientation is not None:
        items = [sel.theta_mm, sel.theta_pp, sel.theta_m, sel.theta_p, *sel.omegas]
        if any(orientation[i] != sel.orientation for i in items if i is not None):
            return False
    chosen = [i for i in (sel.theta_mm, sel.theta_pp, sel.theta_m, sel.theta_p, *sel.omegas) if i is not None]
    return len(set(chosen)) == len(chosen)


def select_ordered_symbols(order_s: Sequence[int], order_u: Sequence[int],
                           orientation: Sequence[int]) -> OrderedSelection:
    """Pick ``Theta_{--}, Theta_-, Theta_+, Theta_{++}`` and the ``Omega_i``.

    ``order_s[item]`` and ``order_u[item]`` are the ranks of each item in
    the two orders.  The majority orientation class is kept, then the
    bounded-subsequence step is applied twice: once to get the outer pair
    and once more on what lies between them.  The selection is certified
    when ``K >= 200``, which guarantees at least ``K // 100`` omegas.
    """
    K = len(order_s)
    if len(order_u) != K or len(orientation) != K:
        raise InvalidInput("orders and orientation must cover the same items")
    if sorted(order_s) != list(range(K)) or sorted(order_u) != list(range(K)):
        raise InvalidInput("orders must be permutations of 0..K-1")
    if K < 2:
        raise InvalidInput("need at least two items")
    ones = [i for i in range(K) if orientation[i]]
    zeros = [i for i in range(K) if not orientation[i]]
    bit, items = (0, zeros) if len(zeros) >= len(ones) else (1, ones)
    if len(items) < 2:
        raise InvalidInput("need at least two items sharing an orientation")

    def outer(pool):
        pool = sorted(pool, key=lambda i: order_s[i])
        idx = bounded_subsequence([order_u[i] for i in pool])
        picked = [pool[k] for k in idx]
        return picked[0], picked[-1], picked[1:-1]

    tmm, tpp, inner = outer(items)
    tm = tp = None
    omegas: list[int] = []
    if len(inner) >= 2:
        tm, tp, omegas = outer(inner)
    certified = K >= SELECTION_THRESHOLD and len(omegas) >= K // 100
    return OrderedSelection(tmm, tpp, tm, tp, tuple(sorted(omegas, key=lambda i: order_s[i])),
                            bit, certified, K)
