import itertools
import json
from fractions import Fraction

import numpy as np
import pytest

from hsc.model import (AffineHorseshoeModel, Embedding, LabelCollision, ModelError, build_model, fried_link,
                       fried_link_labels, intersection_pattern, isotopy, linking_fingerprint, periodic_orbit,
                       periodic_point, section, symbol_orders, verify_markov_type)
from hsc.selection import OrderedSelection, select_ordered_symbols
from hsc.shift import canonical_necklace, rotate, word

M2 = build_model(2, "1/5", [1, 1])


def _necklaces(L, n_max, primitive=True):
    out = {canonical_necklace(w) for n in range(1, n_max + 1) for w in itertools.product(range(L), repeat=n)}
    return sorted((x for x in out if x.is_primitive or not primitive), key=lambda x: (len(x), x.canonical))


def test_build_errors():
    with pytest.raises(ModelError):
        build_model(2, "0.3", [1, 1])
    with pytest.raises(ModelError):
        build_model(2, "1/4", [1, 1])
    with pytest.raises(ModelError):
        build_model(2, "1/5", [1])
    with pytest.raises(ModelError):
        build_model(2, "1/5", [1, 0])
    with pytest.raises(ModelError):
        build_model(0, "1/5", [])


def test_markov_type():
    assert verify_markov_type(M2)
    assert verify_markov_type(build_model(3, "1/7", [1, 2, 3]))
    assert verify_markov_type(build_model(1, "1/3", [2]))
    # shift the second column almost off the square: it no longer crosses
    bad = AffineHorseshoeModel(2, Fraction(1, 5), (Fraction(1),) * 2, (Fraction(1, 20), Fraction(9, 10)),
                               M2.strips)
    assert not verify_markov_type(bad)
    sec = section(M2)
    assert [r.y0 for r in sec.rects] == [Fraction(3, 20), Fraction(13, 20)]


def test_branch_maps_exact():
    for i in range(2):
        c, a, lam = M2.strips[i], M2.offsets[i], M2.lam
        assert M2.branch(i, Fraction(0), c) == (a, 0)
        assert M2.branch(i, Fraction(1), c + lam) == (a + lam, 1)


def test_periodic_point_is_fixed():
    for w in [word("A"), word("AB"), word("AAB"), word("ABBAB")]:
        p = periodic_point(M2, w)
        q = p
        for s in w:
            assert M2.strips[s] <= q[1] <= M2.strips[s] + M2.lam
            q = M2.branch(s, *q)
        assert q == p
    # AB: y = c_A + lam c_B + lam^2 y  and  x = a_B + lam a_A + lam^2 x
    lam = Fraction(1, 5)
    cA, cB = M2.strips
    assert periodic_point(M2, word("AB")) == ((cB + lam * cA) / (1 - lam**2), (cA + lam * cB) / (1 - lam**2))


def test_isotopy_endpoints():
    rng = np.random.default_rng(0)
    for i in range(2):
        x = rng.random(20)
        y = float(M2.strips[i]) + float(M2.lam) * rng.random(20)
        xs, ys = isotopy(M2, i, x, y, 0.0)
        assert np.allclose(xs, x) and np.allclose(ys, y)
        xs, ys = isotopy(M2, i, x, y, 1.0)
        fx, fy = M2.branch(i, x, y)
        assert np.allclose(xs, fx, atol=1e-12) and np.allclose(ys, fy, atol=1e-12)


def test_periodic_orbit_geometry():
    m = build_model(2, "1/5", [1, 2])
    orb = periodic_orbit(m, "AAB", 16)
    assert orb.period == Fraction(4)
    assert orb.vertices.shape == (48, 3)
    assert orb.closure_error <= 1e-9
    assert (np.diff(orb.times) > 0).all() and orb.times[-1] < float(orb.period)
    first = periodic_orbit(m, "ABA", 16)
    assert first.label == orb.label
    with pytest.raises(ModelError):
        periodic_orbit(m, "AAB", 10)
    with pytest.raises(ModelError):
        periodic_orbit(m, "AC", 16)
    rows = orb.to_csv().splitlines()
    assert rows[0] == "t,x,y,z" and len(rows) == 49


def test_closure_error_small_for_long_words():
    rng = np.random.default_rng(3)
    for _ in range(10):
        w = tuple(int(v) for v in rng.integers(0, 2, size=14))
        assert periodic_orbit(M2, w, 8).closure_error <= 1e-9


@pytest.mark.parametrize("n", range(1, 7))
def test_intersection_pattern_recovers_itinerary(n):
    for nk in _necklaces(2, n, primitive=False):
        if len(nk) != n:
            continue
        pat = intersection_pattern(M2, periodic_orbit(M2, nk))
        assert pat.count == n
        assert any(rotate(pat.sequence, k) == nk.canonical for k in range(n))


def test_three_branch_pattern():
    m = build_model(3, "1/7", [1, 2, 3])
    for nk in _necklaces(3, 3):
        pat = intersection_pattern(m, periodic_orbit(m, nk))
        assert canonical_necklace(pat.sequence) == nk


def test_model_json_roundtrip():
    m = build_model(3, "1/7", ["1", "3/2", "2"], Embedding(R0=3.0, width=0.5, twist=2, branch_twists=(1, -1)))
    back = AffineHorseshoeModel.from_json(m.dumps())
    assert back == m
    data = json.loads(m.dumps())
    assert data["embedding"]["branch_twists"] == [1, -1]
    short = AffineHorseshoeModel.from_json({"L": 2, "lambda": "1/5", "roofs": [1, 1]})
    assert short == M2


def test_symbol_orders():
    words = [word("A"), word("B"), word("AB"), word("BA")]
    s, u, ori = symbol_orders(M2, words)
    assert sorted(s) == sorted(u) == [0, 1, 2, 3]
    assert ori == [0, 0, 0, 0]
    ys = [periodic_point(M2, w)[1] for w in words]
    assert [ys[i] for i in np.argsort(s)] == sorted(ys)
    with pytest.raises(ModelError):
        symbol_orders(M2, [word("A"), word("A")])


def _lyndon(n):
    return sorted({nk.canonical for nk in _necklaces(2, n) if len(nk) == n})


def test_fried_link_components():
    words = _lyndon(6)
    sel = select_ordered_symbols(*symbol_orders(M2, words))
    labels = fried_link_labels(sel, words)
    assert len(labels) == 1 + len(sel.omegas)
    link = fried_link(M2, sel, words, 32, min_separation=1e-9)
    assert len(link.curves()) == 3 * len(labels)
    assert len({c.label for c in link.curves()}) == len(link.curves())


def test_fried_link_rejects_collisions():
    words = [word("A"), word("B"), word("AB"), word("AAB")]
    # omega B followed by theta_m A gives BA, a rotation of theta_mm theta_pp = AB
    sel = OrderedSelection(0, 1, 0, 3, (1,), 0, False, 4)
    with pytest.raises(LabelCollision, match="same orbit"):
        fried_link(M2, sel, words)
    # omega A followed by theta_m A gives AA
    power = OrderedSelection(0, 1, 0, 1, (0,), 0, False, 4)
    with pytest.raises(LabelCollision, match="proper power"):
        fried_link(M2, power, words)
    missing = OrderedSelection(0, 1, None, None, (2,), 0, False, 4)
    with pytest.raises(LabelCollision):
        fried_link_labels(missing, words)


def test_polyline_has_no_jumps():
    # the largest edge, closing edges included, shrinks like 1/K
    res = [periodic_orbit(M2, "AABAB", K).resolution for K in (16, 32, 64, 128)]
    assert all(1.9 < a / b < 2.1 for a, b in zip(res, res[1:]))


@pytest.mark.slow
def test_fingerprints_separate_short_orbits():
    words = _lyndon(6)
    sel = select_ordered_symbols(*symbol_orders(M2, words))
    link = fried_link(M2, sel, words, 32, min_separation=1e-9)
    fps = {nk: linking_fingerprint(M2, periodic_orbit(M2, nk, 32), link) for nk in _necklaces(2, 5)}
    assert len(set(fps.values())) == len(fps)
    for nk, (count, _) in fps.items():
        assert count == len(nk)
