import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from hsc.shift import TransitionGraph, canonical_necklace, word
from hsc.suspension import (CylinderFunction, EventuallyPeriodic, FlowPoint, PeriodicPoint, RoofFunction,
                            birkhoff_sum, bowen_walters_distance, first_difference, flow_step, orbit_period,
                            symbolic_distance)

ROOF2 = RoofFunction(2, 2, {"AA": "1", "AB": "3/2", "BA": "2/3", "BB": "5/4"})

blocks = st.lists(st.integers(0, 1), min_size=1, max_size=5).map(tuple)
cores = st.lists(st.integers(0, 1), min_size=0, max_size=6).map(tuple)
points = st.builds(EventuallyPeriodic, blocks, cores, blocks, st.integers(-4, 4))


def test_cylinder_validation():
    with pytest.raises(ValueError):
        CylinderFunction(2, 2, {"AA": 1, "AB": 1, "BA": 1})
    with pytest.raises(ValueError):
        CylinderFunction(1, 2, {"AA": 1, "B": 1})
    with pytest.raises(ValueError):
        RoofFunction(1, 2, {"A": 1, "B": 0})
    with pytest.raises(ValueError):
        CylinderFunction(1, 2, {"A": float("nan"), "B": 1})
    golden = TransitionGraph.from_adjacency([[1, 1], [1, 0]])
    f = CylinderFunction(2, 2, {"AA": 1, "AB": 2, "BA": 3}, golden)
    assert f(word("BA")) == 3 and math.isnan(f.table[f.code(word("BB"))])


def test_exact_values_and_json():
    assert ROOF2.exact
    assert ROOF2(word("AB")) == Fraction(3, 2)
    back = CylinderFunction.from_json(ROOF2.to_json())
    assert back.values == ROOF2.values
    assert not RoofFunction(1, 2, {"A": 0.5, "B": 1.5}).exact
    assert isinstance(ROOF2.scaled(-1), CylinderFunction) and not isinstance(ROOF2.scaled(-1), RoofFunction)


@given(points, st.integers(-8, 8), st.integers(-8, 8))
def test_cocycle_identity(x, m, n):
    assert birkhoff_sum(ROOF2, x, m + n) == birkhoff_sum(ROOF2, x, m) + birkhoff_sum(ROOF2, x.shifted(m), n)


def test_negative_birkhoff_sum():
    x = EventuallyPeriodic("AB", "BBA", "A")
    for n in range(1, 6):
        assert birkhoff_sum(ROOF2, x, -n) == -birkhoff_sum(ROOF2, x.shifted(-n), n)


@settings(max_examples=60)
@given(points, st.fractions(0, 3), st.fractions(-10, 10), st.fractions(-10, 10))
def test_flow_group_law(x, t0, s, t):
    t0 = t0 * ROOF2.at(x, 0) / 3
    p = FlowPoint(x, t0 if t0 < ROOF2.at(x, 0) else Fraction(0))
    a = flow_step(ROOF2, flow_step(ROOF2, p, s), t)
    b = flow_step(ROOF2, p, s + t)
    assert _same(a, b)
    assert _same(flow_step(ROOF2, flow_step(ROOF2, p, s), -s), p)
    assert 0 <= b.height < ROOF2.at(b.base, 0)


def _same(p, q):
    return p.height == q.height and first_difference(p.base, q.base) is None


@pytest.mark.parametrize("w", ["A", "AB", "ABB", "AABAB", "BBBA"])
def test_orbit_period_properties(w):
    w = word(w)
    per = orbit_period(ROOF2, w)
    for k in range(len(w)):
        assert orbit_period(ROOF2, w[k:] + w[:k]) == per
    assert orbit_period(ROOF2, w + w) == 2 * per
    assert orbit_period(ROOF2, canonical_necklace(w)) == per
    for phase in range(len(w)):
        p = FlowPoint(PeriodicPoint.of(w, phase), Fraction(1, 3))
        assert _same(flow_step(ROOF2, p, per), p)
        assert _same(flow_step(ROOF2, p, -3 * per), p)


def test_periodic_point_phase():
    p = PeriodicPoint.of("BAB", 0)
    assert [p.symbol(n) for n in range(6)] == [1, 0, 1, 1, 0, 1]
    assert 0 <= p.phase < p.period_length
    q = PeriodicPoint.of("ABAB")
    assert q.phase < 2


def test_symbolic_distance_examples():
    x = EventuallyPeriodic("A", "", "A")
    assert symbolic_distance(x, x) == 0.0
    assert symbolic_distance(x, EventuallyPeriodic("A", "B", "A")) == 1.0
    y = EventuallyPeriodic("A", "AAAB", "A")
    assert symbolic_distance(x, y) == pytest.approx(math.exp(-3))
    z = EventuallyPeriodic("A", "BAA", "A", origin=-2)
    assert symbolic_distance(x, z) == pytest.approx(math.exp(-2))
    assert symbolic_distance(PeriodicPoint.of("AB"), PeriodicPoint.of("BA")) == 1.0


@given(points, points, points)
def test_symbolic_distance_ultrametric(x, y, z):
    dxy, dyz, dxz = symbolic_distance(x, y), symbolic_distance(y, z), symbolic_distance(x, z)
    assert dxy == symbolic_distance(y, x)
    assert dxz <= max(dxy, dyz) + 1e-15


unit = st.fractions(0, 1).filter(lambda v: v < 1)


@given(points, points, unit, unit)
def test_bowen_walters_chain_bound(x, y, a, b):
    p = FlowPoint(x, a * ROOF2.at(x, 0))
    q = FlowPoint(y, b * ROOF2.at(y, 0))
    d = bowen_walters_distance(ROOF2, p, q)
    assert d >= 0
    # one horizontal move at either height plus one vertical move
    dx, ds = symbolic_distance(x, y), symbolic_distance(x.shifted(1), y.shifted(1))
    for u in (float(a), float(b)):
        assert d <= (1 - u) * dx + u * ds + abs(float(a - b)) + 1e-12
    assert bowen_walters_distance(ROOF2, p, p) == 0.0
