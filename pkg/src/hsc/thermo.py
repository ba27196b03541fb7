"""Entropy, pressure and the Bernoulli weight construction for suspensions.

Measures are Bernoulli or stationary Markov measures on a finite shift;
potentials are :class:`~hsc.suspension.CylinderFunction` objects, so
``roof.scaled(-h)`` is the potential ``-h r``.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .shift import TransitionGraph, Word
from .suspension import CylinderFunction

WEIGHT_TOL = 1e-12


class InvalidInput(ValueError):
    pass


class IncompatibleError(ValueError):
    """Potential and measure live on different alphabets."""


def _xlogx(p: float) -> float:
    return p * math.log(p) if p > 0 else 0.0


@dataclass(frozen=True)
class Bernoulli:
    weights: tuple[float, ...]

    def __post_init__(self):
        w = tuple(float(p) for p in self.weights)
        if not w or any(p < 0 for p in w) or abs(math.fsum(w) - 1.0) > WEIGHT_TOL:
            raise InvalidInput(f"weights must be nonnegative and sum to 1, got {w}")
        object.__setattr__(self, "weights", w)

    kind = "bernoulli"

    @property
    def alphabet_size(self) -> int:
        return len(self.weights)

    def cylinder(self, w: Sequence[int]) -> float:
        out = 1.0
        for s in w:
            out *= self.weights[s]
        return out

    def initial(self) -> np.ndarray:
        return np.array(self.weights)

    def transition(self) -> np.ndarray:
        return np.tile(np.array(self.weights), (len(self.weights), 1))

    def to_json(self) -> dict:
        return {"kind": "bernoulli", "weights": list(self.weights)}


@dataclass(frozen=True)
class Markov:
    """Stationary Markov measure; ``pi`` is computed from ``P`` when omitted."""

    P: np.ndarray
    pi: np.ndarray | None = None
    graph: TransitionGraph | None = field(default=None, compare=False)

    kind = "markov"

    def __post_init__(self):
        P = np.array(self.P, dtype=float)
        if P.ndim != 2 or P.shape[0] != P.shape[1]:
            raise InvalidInput("P must be square")
        if (P < 0).any() or np.abs(P.sum(axis=1) - 1).max() > WEIGHT_TOL:
            raise InvalidInput("P must be a stochastic matrix")
        if self.pi is None:
            vals, vecs = np.linalg.eig(P.T)
            v = np.real(vecs[:, np.argmin(np.abs(vals - 1))])
            pi = v / v.sum()
        else:
            pi = np.array(self.pi, dtype=float)
        if (pi < -WEIGHT_TOL).any() or abs(pi.sum() - 1) > WEIGHT_TOL:
            raise InvalidInput("pi must be a probability vector")
        if np.abs(pi @ P - pi).max() > 1e-10:
            raise InvalidInput("pi is not stationary for P")
        if self.graph is not None:
            for a in range(P.shape[0]):
                for b in range(P.shape[0]):
                    if P[a, b] > 0 and not self.graph.has_edge(a, b):
                        raise InvalidInput(f"P charges the forbidden transition {a}->{b}")
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "pi", np.clip(pi, 0, None))

    @property
    def alphabet_size(self) -> int:
        return self.P.shape[0]

    def cylinder(self, w: Sequence[int]) -> float:
        if not w:
            return 1.0
        out = float(self.pi[w[0]])
        for a, b in zip(w, w[1:]):
            out *= self.P[a, b]
        return out

    def initial(self) -> np.ndarray:
        return self.pi

    def transition(self) -> np.ndarray:
        return self.P

    def to_json(self) -> dict:
        return {"kind": "markov", "P": self.P.tolist(), "pi": self.pi.tolist()}


MarkovMeasure = Bernoulli | Markov


def measure_from_json(data: dict | str) -> MarkovMeasure:
    if isinstance(data, str):
        data = json.loads(data)
    if data["kind"] == "bernoulli":
        return Bernoulli(tuple(data["weights"]))
    if data["kind"] == "markov":
        return Markov(np.array(data["P"]), None if data.get("pi") is None else np.array(data["pi"]))
    raise InvalidInput(f"unknown measure kind {data['kind']!r}")


def measure_entropy(m: MarkovMeasure) -> float:
    """Kolmogorov-Sinai entropy, with ``0 log 0 = 0``."""
    if isinstance(m, Bernoulli):
        return -math.fsum(_xlogx(p) for p in m.weights)
    L = m.alphabet_size
    return -math.fsum(m.pi[i] * _xlogx(m.P[i, j]) for i in range(L) for j in range(L))


def integrate(pot: CylinderFunction, m: MarkovMeasure) -> float:
    """Exact integral ``sum_w m([w]) pot(w)`` over the depth-``k`` cylinders."""
    if pot.alphabet_size != m.alphabet_size:
        raise IncompatibleError(
            f"potential over {pot.alphabet_size} symbols, measure over {m.alphabet_size}")
    terms = []
    for w in itertools.product(range(pot.alphabet_size), repeat=pot.depth):
        mass = m.cylinder(w)
        if mass == 0:
            continue
        if w not in pot.values:
            raise IncompatibleError(f"measure charges cylinder {w} where the potential is undefined")
        terms.append(mass * float(pot.values[w]))
    return math.fsum(terms)


def pressure(m: MarkovMeasure, pot: CylinderFunction) -> float:
    return measure_entropy(m) + integrate(pot, m)


def abramov_entropy(m: MarkovMeasure, roof: CylinderFunction) -> float:
    """Entropy of the suspension flow of ``m`` under ``roof``: ``h_m / int r dm``."""
    return measure_entropy(m) / integrate(roof, m)


def _check_roof_values(roof_values: Sequence[float]) -> list[float]:
    r = [float(v) for v in roof_values]
    if len(r) < 2:
        raise InvalidInput("the weight equation needs at least two roof values")
    if any(not (v > 0 and math.isfinite(v)) for v in r):
        raise InvalidInput("roof values must be positive and finite")
    return r


def solve_weight_equation(roof_values: Sequence[float]) -> float:
    """Unique ``h > 0`` with ``sum_i exp(-h r_i) = 1``.

    Bisection on ``[0, log(L)/min(r) + 1]``, where the left-hand side falls
    strictly from ``L`` to below 1.
    """
    r = _check_roof_values(roof_values)
    lo, hi = 0.0, math.log(len(r)) / min(r) + 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if math.fsum(math.exp(-mid * v) for v in r) > 1.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def weight_measure(roof_values: Sequence[float]) -> Bernoulli:
    """Bernoulli measure with weights ``exp(-h r_i)`` at the root ``h`` of the weight equation."""
    r = _check_roof_values(roof_values)
    h = solve_weight_equation(r)
    p = [math.exp(-h * v) for v in r]
    s = math.fsum(p)
    return Bernoulli(tuple(q / s for q in p))


def entropy_lower_bound(roof_values: Sequence[float], holder_slack: float = 0.0) -> float:
    """``h_nu / (sum_i p_i r_i + p_max C)`` for the weight measure ``nu``.

    At ``C = 0`` this is the root of the weight equation; it decreases
    strictly as the slack ``C`` grows.
    """
    if holder_slack < 0:
        raise InvalidInput("holder_slack must be >= 0")
    r = _check_roof_values(roof_values)
    nu = weight_measure(r)
    mean_roof = math.fsum(p * v for p, v in zip(nu.weights, r))
    return measure_entropy(nu) / (mean_roof + max(nu.weights) * holder_slack)


def loop_pressure_sum(loops: Sequence[Word], pot: CylinderFunction, m_len: int) -> float:
    """``(1/m) log sum_i exp(phi_m(periodic extension of loop i))``."""
    if not loops:
        raise InvalidInput("no loops")
    sums = []
    for w in loops:
        if len(w) != m_len:
            raise InvalidInput(f"loop {w} does not have length {m_len}")
        sums.append(float(pot.cyclic_sum(w)))
    a = np.array(sums)
    top = a.max()
    return float((top + math.log(np.exp(a - top).sum())) / m_len)
