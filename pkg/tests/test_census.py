import itertools
import json
import math
from fractions import Fraction

import pytest

from hsc.census import (census_chords, census_orbits, chord_length, chord_sequence, classes_json, count_orbits,
                        counts_csv, group_by_necklace, growth_rate, verify_cyclic_injectivity)
from hsc.shift import canonical_necklace, count_necklaces, word
from hsc.suspension import EventuallyPeriodic, RoofFunction, birkhoff_sum

ONES2 = RoofFunction.per_symbol([1, 1])
DEPTH2 = RoofFunction(2, 2, {"AA": "1", "AB": "3/2", "BA": "2/3", "BB": "5/4"})


def test_small_census():
    got = census_orbits(ONES2, 2, 3)
    assert len(got) == 9
    assert [str(c.necklace) for c in got][:5] == ["A", "B", "AA", "AB", "BB"]
    mixed = census_orbits(RoofFunction.per_symbol([1, 2]), 2, 2)
    assert sorted(str(c.necklace) for c in mixed) == ["A", "AA", "B"]
    assert census_orbits(ONES2, 2, 0.5) == []


@pytest.mark.parametrize("c", [1, 2, Fraction(3, 2)])
def test_constant_roof_counts(c):
    roof = RoofFunction.per_symbol([c, c])
    Ts = list(range(1, 21))
    counts = count_orbits(roof, 2, Ts)
    for T, N in zip(Ts, counts):
        assert N == sum(count_necklaces(2, n) for n in range(1, math.floor(T / c + 1e-9) + 1))


def test_three_symbol_counts():
    roof = RoofFunction.per_symbol([1, 1, 1])
    assert count_orbits(roof, 3, [8]) == [sum(count_necklaces(3, n) for n in range(1, 9))]


def _brute_orbits(roof, L, T, n_max):
    out = {}
    for n in range(1, n_max + 1):
        for w in itertools.product(range(L), repeat=n):
            nk = canonical_necklace(w)
            per = roof.cyclic_sum(nk.canonical)
            if per <= T:
                out[nk] = per
    return out


def test_depth_two_roof_against_brute_force():
    T = 7
    got = {c.necklace: c.period for c in census_orbits(DEPTH2, 2, T)}
    brute = _brute_orbits(DEPTH2, 2, T, 11)
    assert got.keys() == brute.keys()
    for k, v in brute.items():
        assert got[k] == pytest.approx(float(v), abs=1e-12)


def test_census_monotone_and_ordered():
    small = census_orbits(DEPTH2, 2, 5)
    big = census_orbits(DEPTH2, 2, 8)
    assert {c.necklace for c in small} <= {c.necklace for c in big}
    keys = [(len(c.necklace), c.necklace.canonical) for c in big]
    assert keys == sorted(keys)


def test_census_errors():
    with pytest.raises(ValueError):
        census_orbits(ONES2, 3, 5)


def test_chord_sequence_layout():
    past, future = word("AB"), word("BBA")
    seq = chord_sequence(past, word("AAB"), future, -3, 8)
    # c_0 is the last symbol of the past block; the future starts at c_{n-1}
    assert seq == word("ABA" "B" "AAB" "BBAB")


def _brute_chord_length(roof, past, interior, future):
    x = EventuallyPeriodic(past, interior, future, origin=1)
    return birkhoff_sum(roof, x, len(interior) + 2)


@pytest.mark.parametrize("past,future", [("A", "B"), ("AB", "B"), ("ABB", "BA")])
def test_chords_against_brute_force(past, future):
    past, future = word(past), word(future)
    T = 8
    got = {c.interior: c.length for c in census_chords(DEPTH2, 2, past, future, T)}
    brute = {}
    for k in range(0, 7):
        for w in itertools.product(range(2), repeat=k):
            length = _brute_chord_length(DEPTH2, past, w, future)
            assert chord_length(DEPTH2, past, w, future) == pytest.approx(float(length), abs=1e-12)
            if length <= T:
                brute[w] = length
    # the horizon suffices: interiors of length 7 and 8 do not fit, and an
    # interior of length >= 9 already has nine windows fixed by its prefix
    for k in (7, 8):
        assert min(_brute_chord_length(DEPTH2, past, w, future)
                   for w in itertools.product(range(2), repeat=k)) > T
    prefix_bound = min(sum(DEPTH2((c[j], c[j + 1])) for j in range(9))
                       for w in itertools.product(range(2), repeat=9) for c in [(past[-1],) + w])
    assert prefix_bound > T
    assert got.keys() == brute.keys()
    for w, v in brute.items():
        assert got[w] == pytest.approx(float(v), abs=1e-12)


def test_chord_count_constant_roof():
    for T in (2, 5, 12, 20):
        n = len(census_chords(ONES2, 2, word("A"), word("B"), T))
        assert n == sum(2 ** (k - 2) for k in range(2, T + 1))


def test_growth_rates():
    est = growth_rate(census_orbits, ONES2, 2, range(4, 21))
    assert abs(est.slope - math.log(2)) < 0.05
    assert est.prefactor_exponent == 1.0 and est.window == (12.0, 20.0)
    assert abs(est.raw_slope - math.log(2)) < 0.1
    chords = growth_rate(census_chords, ONES2, 2, range(4, 21), word("A"), word("B"))
    assert abs(chords.slope - math.log(2)) < 1e-3
    doubled = RoofFunction.per_symbol([2, 2])
    slow = growth_rate(census_orbits, doubled, 2, range(8, 41, 2))
    assert abs(slow.slope - math.log(2) / 2) < 0.05
    with pytest.raises(ValueError):
        growth_rate(census_orbits, ONES2, 2, [4, 5, 6])
    with pytest.raises(ValueError):
        growth_rate(census_orbits, ONES2, 2, [4, 6, 5, 7])


def test_cyclic_injectivity_and_grouping():
    words = list(itertools.product(range(3), repeat=4))
    assert verify_cyclic_injectivity(words)
    groups = group_by_necklace(words)
    assert sum(len(v) for v in groups.values()) == 81
    assert len(groups) == count_necklaces(3, 4)


def test_exports():
    text = counts_csv([1, 2], [2, 5])
    assert text.splitlines() == ["T,N,logN", f"1.0,2,{math.log(2)!r}", f"2.0,5,{math.log(5)!r}"]
    data = json.loads(classes_json(census_orbits(ONES2, 2, 2)))
    assert data[0] == {"necklace": [0], "label": "A", "period": 1.0}
    chords = json.loads(classes_json(census_chords(ONES2, 2, word("A"), word("B"), 3)))
    assert chords[0]["interior"] == [] and chords[0]["length"] == 2.0
