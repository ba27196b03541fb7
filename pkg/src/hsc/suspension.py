"""Suspension flows over a shift with a locally constant roof.

Points of the base are bi-infinite sequences that are eventually periodic
in both directions.  Two concrete representations share the small protocol
``symbol(n)`` / ``shifted(k)``:

* :class:`PeriodicPoint` -- the periodic extension of a necklace, read from
  ``phase``;
* :class:`EventuallyPeriodic` -- a finite core word flanked by a periodic
  past and a periodic future.

Roof values given as ints, strings or :class:`~fractions.Fraction` are kept
exact, so Birkhoff sums and flow heights stay rational.  Float input stays
float and comparisons use :data:`TOL`.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Real
from typing import Mapping, Protocol, Sequence, Union

import numpy as np

from .shift import Necklace, TransitionGraph, Word, canonical_necklace, format_word, least_rotation, word

TOL = 1e-12

Number = Union[Fraction, float]


def _as_number(v) -> Number:
    if isinstance(v, bool):
        raise TypeError("boolean is not a roof value")
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, str):
        return Fraction(v)
    if isinstance(v, Real):
        return float(v)
    raise TypeError(f"unsupported value {v!r}")


class Sequence2(Protocol):
    def symbol(self, n: int) -> int: ...

    def shifted(self, k: int) -> "Sequence2": ...


@dataclass(frozen=True)
class CylinderFunction:
    """Function on the shift that depends on ``x_0 .. x_{depth-1}`` only."""

    depth: int
    alphabet_size: int
    values: Mapping[Word, Number]
    graph: TransitionGraph | None = None
    table: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.depth < 1:
            raise ValueError("depth must be >= 1")
        vals = {}
        for k, v in dict(self.values).items():
            key = word(k) if isinstance(k, str) else tuple(int(s) for s in k)
            if len(key) != self.depth:
                raise ValueError(f"cylinder {k!r} does not have depth {self.depth}")
            vals[key] = _as_number(v)
        object.__setattr__(self, "values", vals)
        g = self.graph
        for w in itertools.product(range(self.alphabet_size), repeat=self.depth):
            if g is not None and not g.is_admissible(w):
                continue
            if w not in vals:
                raise ValueError(f"no value for admissible cylinder {format_word(w)}")
            v = vals[w]
            if not math.isfinite(float(v)):
                raise ValueError(f"non-finite value on cylinder {format_word(w)}")
        table = np.full(self.alphabet_size ** self.depth, np.nan)
        for w, v in vals.items():
            table[self.code(w)] = float(v)
        object.__setattr__(self, "table", table)

    @classmethod
    def constant(cls, alphabet_size: int, c, depth: int = 1):
        c = _as_number(c)
        words = itertools.product(range(alphabet_size), repeat=depth)
        return cls(depth, alphabet_size, {w: c for w in words})

    @classmethod
    def per_symbol(cls, values: Sequence):
        return cls(1, len(values), {(i,): v for i, v in enumerate(values)})

    def code(self, w: Sequence[int]) -> int:
        c = 0
        for s in w:
            c = c * self.alphabet_size + s
        return c

    @property
    def exact(self) -> bool:
        return all(isinstance(v, Fraction) for v in self.values.values())

    def __call__(self, w: Sequence[int]) -> Number:
        return self.values[tuple(w)]

    def at(self, x: Sequence2, n: int = 0) -> Number:
        """Value on ``sigma^n(x)``."""
        return self.values[tuple(x.symbol(n + i) for i in range(self.depth))]

    def cyclic_sum(self, w: Sequence[int]) -> Number:
        """Birkhoff sum over one period of the periodic extension of ``w``."""
        n = len(w)
        k = self.depth
        ww = tuple(w) * (1 + (k - 1) // n + 1)
        vals = self.values
        return sum((vals[ww[j:j + k]] for j in range(n)), Fraction(0))

    def scaled(self, c) -> "CylinderFunction":
        c = _as_number(c)
        return CylinderFunction(self.depth, self.alphabet_size,
                                {w: c * v for w, v in self.values.items()}, self.graph)

    def min_value(self) -> float:
        return float(min(self.values.values()))

    def max_value(self) -> float:
        return float(max(self.values.values()))

    def to_json(self) -> dict:
        return {
            "depth": self.depth,
            "alphabet_size": self.alphabet_size,
            "values": {format_word(w): str(v) for w, v in sorted(self.values.items())},
        }

    @classmethod
    def from_json(cls, data: dict | str, alphabet_size: int | None = None):
        if isinstance(data, str):
            data = json.loads(data)
        values = {word(k): v for k, v in data["values"].items()}
        L = data.get("alphabet_size", alphabet_size)
        if L is None:
            L = 1 + max(s for w in values for s in w)
        return cls(int(data["depth"]), int(L), values)


Potential = CylinderFunction


class RoofFunction(CylinderFunction):
    """Strictly positive cylinder function; the ceiling of the suspension."""

    def __post_init__(self):
        super().__post_init__()
        for w, v in self.values.items():
            if not v > 0:
                raise ValueError(f"roof value on {format_word(w)} must be positive, got {v}")

    def scaled(self, c) -> CylinderFunction:
        out = super().scaled(c)
        if float(c) > 0:
            return RoofFunction(out.depth, out.alphabet_size, out.values, out.graph)
        return out


@dataclass(frozen=True)
class PeriodicPoint:
    """Periodic extension of ``block`` with ``x_0 = block[phase]``.

    The block is stored as its canonical necklace and the phase is adjusted
    so that the represented sequence is unchanged.
    """

    block: Necklace
    phase: int = 0

    def __post_init__(self):
        n = len(self.block)
        p = self.block.primitive_period
        object.__setattr__(self, "phase", self.phase % n % p)

    @classmethod
    def of(cls, w: Sequence[int] | str, phase: int = 0) -> "PeriodicPoint":
        w = word(w) if isinstance(w, str) else tuple(w)
        k = least_rotation(w)
        return cls(canonical_necklace(w), phase - k)

    @property
    def period_length(self) -> int:
        return len(self.block)

    def symbol(self, n: int) -> int:
        w = self.block.canonical
        return w[(n + self.phase) % len(w)]

    def shifted(self, k: int) -> "PeriodicPoint":
        return PeriodicPoint(self.block, self.phase + k)

    def __str__(self) -> str:
        return f"({self.block})^inf@{self.phase}"


@dataclass(frozen=True)
class EventuallyPeriodic:
    """``... past past | core | future future ...`` with ``core[0]`` at index ``origin``.

    For ``n < origin`` the symbol is ``past[(n - origin) mod len(past)]`` and
    for ``n >= origin + len(core)`` it is ``future[(n - origin - len(core)) mod len(future)]``.
    """

    past: Word
    core: Word
    future: Word
    origin: int = 0

    def __post_init__(self):
        for name in ("past", "core", "future"):
            v = getattr(self, name)
            object.__setattr__(self, name, word(v) if isinstance(v, str) else tuple(v))
        if not self.past or not self.future:
            raise ValueError("periodic tails must be nonempty")

    def symbol(self, n: int) -> int:
        i = n - self.origin
        if i < 0:
            return self.past[i % len(self.past)]
        if i < len(self.core):
            return self.core[i]
        return self.future[(i - len(self.core)) % len(self.future)]

    def shifted(self, k: int) -> "EventuallyPeriodic":
        return EventuallyPeriodic(self.past, self.core, self.future, self.origin - k)

    @property
    def extent(self) -> tuple[int, int]:
        return self.origin, self.origin + len(self.core)


@dataclass(frozen=True)
class FlowPoint:
    base: PeriodicPoint | EventuallyPeriodic
    height: Number


def birkhoff_sum(roof: CylinderFunction, x: Sequence2, n: int) -> Number:
    """``r_n(x)``: ``sum_{j<n} r(sigma^j x)`` for ``n >= 1``, ``0`` for ``n = 0``,
    and ``-r_{|n|}(sigma^n x)`` for negative ``n``."""
    if n == 0:
        return Fraction(0)
    if n > 0:
        return sum((roof.at(x, j) for j in range(n)), Fraction(0))
    return -sum((roof.at(x, j) for j in range(n, 0)), Fraction(0))


def flow_step(roof: RoofFunction, x: FlowPoint, tau) -> FlowPoint:
    """The suspension flow ``sigma_r^tau``.

    Moves the height by ``tau`` and passes through the roof (or floor) as
    many times as needed, which is the unique ``n`` with
    ``0 <= t + tau - r_n(x) < r(sigma^n x)``.
    """
    base = x.base
    s = x.height + _as_number(tau)
    if isinstance(base, PeriodicPoint) and abs(float(s)) > 0:
        per = orbit_period(roof, base.block)
        wraps = math.floor(s / per)
        if wraps:
            s = s - wraps * per
    n = 0
    r = roof.at(base, 0)
    while s >= r:
        s -= r
        n += 1
        r = roof.at(base, n)
    while s < 0:
        n -= 1
        s += roof.at(base, n)
    return FlowPoint(base.shifted(n), s)


def orbit_period(roof: CylinderFunction, w: Necklace | Sequence[int]) -> Number:
    """Period ``r_n`` of the periodic orbit labelled by ``w`` (rotation invariant)."""
    block = w.canonical if isinstance(w, Necklace) else tuple(w)
    return roof.cyclic_sum(block)


def _lcm(*ns: int) -> int:
    out = 1
    for n in ns:
        out = out * n // math.gcd(out, n)
    return out


def _scan_bound(x, y) -> int:
    bound = 0
    tails = []
    for seq in (x, y):
        if isinstance(seq, PeriodicPoint):
            tails.append(seq.period_length)
        else:
            lo, hi = seq.extent
            bound = max(bound, abs(lo), abs(hi))
            tails.extend([len(seq.past), len(seq.future)])
    return bound + 2 * _lcm(*tails) + 2


def first_difference(x: Sequence2, y: Sequence2) -> int | None:
    """Smallest ``|n|`` with ``x_n != y_n``; ``None`` if the sequences agree."""
    for m in range(_scan_bound(x, y) + 1):
        if x.symbol(m) != y.symbol(m) or x.symbol(-m) != y.symbol(-m):
            return m
    return None


def symbolic_distance(x: Sequence2, y: Sequence2) -> float:
    """``exp(-m)`` where ``m`` is the first index (in absolute value) at which
    ``x`` and ``y`` differ; 0 for equal sequences, 1 when ``x_0 != y_0``."""
    m = first_difference(x, y)
    return 0.0 if m is None else math.exp(-m)


def bowen_walters_distance(roof: RoofFunction, p: FlowPoint, q: FlowPoint) -> float:
    """Chain-length upper bound for the Bowen-Walters distance.

    Uses roof-normalised heights ``u = t / r(x)``.  A horizontal move at
    height ``u`` between fibres over ``x`` and ``y`` costs
    ``(1 - u) d(x, y) + u d(sigma x, sigma y)``, a vertical move costs the
    change in ``u``.  The minimum is taken over chains of at most three
    moves, including chains that pass through the roof identification
    ``(x, 1) ~ (sigma x, 0)``; the true infimum over all chains is at most
    this value.
    """
    x, y = p.base, q.base
    a = float(p.height) / float(roof.at(x, 0))
    b = float(q.height) / float(roof.at(y, 0))
    d = symbolic_distance
    dxy, dsxsy = d(x, y), d(x.shifted(1), y.shifted(1))

    def horizontal(u):
        return (1 - u) * dxy + u * dsxsy

    candidates = [
        horizontal(a) + abs(a - b),
        horizontal(b) + abs(a - b),
        a + dxy + b,
        (1 - a) + dsxsy + (1 - b),
        (1 - a) + d(x.shifted(1), y) + b,
        (1 - b) + d(y.shifted(1), x) + a,
    ]
    return min(candidates)
