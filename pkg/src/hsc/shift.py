"""Finite topological Markov shifts.

A shift is given by a :class:`TransitionGraph` on the dense alphabet
``0..alphabet_size-1``.  Words are plain tuples of ints; a *loop word* of
length ``n`` lists ``a_0 .. a_{n-1}`` and is admissible when every
consecutive pair, including the wrap ``a_{n-1} -> a_0``, is an edge.
"""
from __future__ import annotations

import json
import math
import string
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

Word = tuple[int, ...]


class NotTransitive(ValueError):
    """Raised when an operation needs a strongly connected graph."""


def word(text: str | Sequence[int]) -> Word:
    """Parse ``"ABB"`` (letters, ``A`` = 0) or a sequence of ints into a word."""
    if isinstance(text, str):
        out = []
        for ch in text:
            if ch not in string.ascii_uppercase:
                raise ValueError(f"cannot parse symbol {ch!r} in {text!r}")
            out.append(ord(ch) - ord("A"))
        return tuple(out)
    return tuple(int(s) for s in text)


def format_word(w: Sequence[int]) -> str:
    if all(0 <= s < 26 for s in w):
        return "".join(chr(ord("A") + s) for s in w)
    return ",".join(str(s) for s in w)


def rotate(w: Sequence[int], k: int) -> Word:
    w = tuple(w)
    if not w:
        return w
    k %= len(w)
    return w[k:] + w[:k]


@dataclass(frozen=True)
class TransitionGraph:
    alphabet_size: int
    edges: frozenset[tuple[int, int]]

    def __post_init__(self):
        if self.alphabet_size < 1:
            raise ValueError("alphabet_size must be positive")
        edges = frozenset((int(a), int(b)) for a, b in self.edges)
        object.__setattr__(self, "edges", edges)
        outs = {a for a, _ in edges}
        ins = {b for _, b in edges}
        for a, b in edges:
            if not (0 <= a < self.alphabet_size and 0 <= b < self.alphabet_size):
                raise ValueError(f"edge {(a, b)} outside alphabet 0..{self.alphabet_size - 1}")
        for v in range(self.alphabet_size):
            if v not in outs or v not in ins:
                raise ValueError(f"symbol {v} needs an incoming and an outgoing edge")
        succ: list[tuple[int, ...]] = [() for _ in range(self.alphabet_size)]
        pred: list[tuple[int, ...]] = [() for _ in range(self.alphabet_size)]
        for a in range(self.alphabet_size):
            succ[a] = tuple(sorted(b for (x, b) in edges if x == a))
            pred[a] = tuple(sorted(x for (x, b) in edges if b == a))
        object.__setattr__(self, "_succ", tuple(succ))
        object.__setattr__(self, "_pred", tuple(pred))

    @classmethod
    def full_shift(cls, alphabet_size: int) -> "TransitionGraph":
        L = alphabet_size
        return cls(L, frozenset((a, b) for a in range(L) for b in range(L)))

    @classmethod
    def from_adjacency(cls, matrix) -> "TransitionGraph":
        n = len(matrix)
        return cls(n, frozenset((a, b) for a in range(n) for b in range(n) if matrix[a][b]))

    def successors(self, a: int) -> tuple[int, ...]:
        return self._succ[a]

    def predecessors(self, a: int) -> tuple[int, ...]:
        return self._pred[a]

    def has_edge(self, a: int, b: int) -> bool:
        return (a, b) in self.edges

    def adjacency(self):
        import numpy as np

        A = np.zeros((self.alphabet_size, self.alphabet_size), dtype=np.int64)
        for a, b in self.edges:
            A[a, b] = 1
        return A

    def is_admissible(self, w: Sequence[int], loop: bool = False) -> bool:
        if any(not 0 <= s < self.alphabet_size for s in w):
            return False
        pairs = list(zip(w, w[1:]))
        if loop and w:
            pairs.append((w[-1], w[0]))
        return all(p in self.edges for p in pairs)

    def to_json(self) -> dict:
        return {"alphabet_size": self.alphabet_size, "edges": sorted([list(e) for e in self.edges])}

    @classmethod
    def from_json(cls, data: dict | str) -> "TransitionGraph":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(int(data["alphabet_size"]), frozenset(tuple(e) for e in data["edges"]))


@dataclass(frozen=True)
class Necklace:
    """Cyclic word represented by its lexicographically least rotation."""

    canonical: Word

    @property
    def period_length(self) -> int:
        return len(self.canonical)

    def __len__(self) -> int:
        return len(self.canonical)

    @property
    def primitive_period(self) -> int:
        """Length of the shortest block whose power is this necklace."""
        w = self.canonical
        n = len(w)
        for d in range(1, n + 1):
            if n % d == 0 and w == w[:d] * (n // d):
                return d
        return n

    @property
    def is_primitive(self) -> bool:
        return self.primitive_period == len(self.canonical)

    def root(self) -> "Necklace":
        return Necklace(self.canonical[: self.primitive_period])

    def __str__(self) -> str:
        return format_word(self.canonical)


@dataclass(frozen=True)
class SpectralDecomposition:
    period: int
    classes: tuple[frozenset[int], ...]

    def class_of(self, symbol: int) -> int:
        for i, c in enumerate(self.classes):
            if symbol in c:
                return i
        raise KeyError(symbol)


def _reach(adj: Sequence[Sequence[int]], start: int) -> set[int]:
    seen = {start}
    stack = [start]
    while stack:
        v = stack.pop()
        for u in adj[v]:
            if u not in seen:
                seen.add(u)
                stack.append(u)
    return seen


def is_transitive(g: TransitionGraph) -> bool:
    """True iff ``g`` is strongly connected."""
    n = g.alphabet_size
    fwd = _reach(g._succ, 0)
    if len(fwd) != n:
        return False
    return len(_reach(g._pred, 0)) == n


def spectral_decomposition(g: TransitionGraph) -> SpectralDecomposition:
    """Cyclic classes of a transitive graph.

    BFS levels from symbol 0 give the period as the gcd of
    ``level[a] + 1 - level[b]`` over all edges ``a -> b``; the class of a
    symbol is its level modulo the period.
    """
    if not is_transitive(g):
        raise NotTransitive("spectral decomposition needs a transitive graph")
    level = {0: 0}
    queue = [0]
    for v in queue:
        for u in g.successors(v):
            if u not in level:
                level[u] = level[v] + 1
                queue.append(u)
    p = 0
    for a, b in g.edges:
        p = math.gcd(p, abs(level[a] + 1 - level[b]))
    p = max(p, 1)
    blocks = [set() for _ in range(p)]
    for v, lv in level.items():
        blocks[lv % p].add(v)
    return SpectralDecomposition(p, tuple(frozenset(b) for b in blocks))


def power_graph(g: TransitionGraph, steps: int, block: Iterable[int]) -> TransitionGraph:
    """Graph on ``block`` (relabelled densely) with an edge for every path of ``steps`` edges."""
    members = sorted(block)
    index = {v: i for i, v in enumerate(members)}
    frontier = {v: {v} for v in members}
    for _ in range(steps):
        frontier = {v: {u for w in ends for u in g.successors(w)} for v, ends in frontier.items()}
    edges = frozenset((index[v], index[u]) for v, ends in frontier.items() for u in ends if u in index)
    return TransitionGraph(len(members), edges)


def enumerate_loops(g: TransitionGraph, base: int, length: int) -> list[Word]:
    """All loops ``base -> ... -> base`` with ``length`` edges, in lexicographic order.

    Each loop is returned as its loop word ``(a_0, ..., a_{n-1})`` with
    ``a_0 = base``; the closing edge ``a_{n-1} -> base`` is implied.
    """
    if length < 1:
        raise ValueError("loop length must be >= 1")
    out: list[Word] = []
    path = [base]

    def dfs():
        if len(path) == length:
            if g.has_edge(path[-1], base):
                out.append(tuple(path))
            return
        for b in g.successors(path[-1]):
            path.append(b)
            dfs()
            path.pop()

    dfs()
    return out


def least_rotation(w: Sequence[int]) -> int:
    """Booth's algorithm: start index of the lexicographically least rotation."""
    s = list(w) * 2
    n = len(s)
    f = [-1] * n
    k = 0
    for j in range(1, n):
        sj = s[j]
        i = f[j - k - 1]
        while i != -1 and sj != s[k + i + 1]:
            if sj < s[k + i + 1]:
                k = j - i - 1
            i = f[i]
        if sj != s[k + i + 1]:
            if sj < s[k]:
                k = j
            f[j - k] = -1
        else:
            f[j - k] = i + 1
    return k


def canonical_necklace(w: Sequence[int]) -> Necklace:
    w = tuple(w)
    if not w:
        raise ValueError("empty word has no necklace")
    return Necklace(rotate(w, least_rotation(w)))


def _totient(n: int) -> int:
    result = n
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


def count_necklaces(alphabet_size: int, length: int) -> int:
    """Number of cyclic words of ``length`` over ``alphabet_size`` symbols (Burnside).

    Python integers are unbounded, so the count is always exact.
    """
    if alphabet_size < 1 or length < 1:
        raise ValueError("alphabet_size and length must be >= 1")
    n = length
    total = sum(_totient(d) * alphabet_size ** (n // d) for d in range(1, n + 1) if n % d == 0)
    return total // n


def gcd_all(values: Iterable[int]) -> int:
    return reduce(math.gcd, values, 0)
