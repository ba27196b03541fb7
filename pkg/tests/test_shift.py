import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hsc.shift import (NotTransitive, TransitionGraph, canonical_necklace, count_necklaces, enumerate_loops,
                       format_word, is_transitive, least_rotation, power_graph, rotate,
                       spectral_decomposition, word)

words3 = st.lists(st.integers(0, 2), min_size=1, max_size=12).map(tuple)


def random_graph(rng, n, p):
    while True:
        A = (rng.random((n, n)) < p).astype(int)
        if A.sum(axis=0).all() and A.sum(axis=1).all():
            return TransitionGraph.from_adjacency(A)


def closure(A):
    """Floyd-Warshall transitive closure, the oracle for strong connectivity."""
    R = A.astype(bool).copy()
    n = len(R)
    for k in range(n):
        R |= R[:, [k]] & R[[k], :]
    return R


def test_word_round_trip():
    assert word("ABBA") == (0, 1, 1, 0)
    assert format_word(word("CAB")) == "CAB"
    assert word([2, 0]) == (2, 0)
    with pytest.raises(ValueError):
        word("Ab")


def test_graph_validation():
    with pytest.raises(ValueError):
        TransitionGraph(2, frozenset({(0, 1)}))
    with pytest.raises(ValueError):
        TransitionGraph(2, frozenset({(0, 2), (1, 1), (2, 0)}))
    g = TransitionGraph.full_shift(3)
    assert TransitionGraph.from_json(g.to_json()) == g
    assert g.is_admissible((0, 2, 1), loop=True)


def test_golden_mean_admissibility():
    g = TransitionGraph.from_adjacency([[1, 1], [1, 0]])
    assert g.is_admissible((0, 1, 0))
    assert not g.is_admissible((1, 1))
    assert g.is_admissible((0, 0, 1), loop=True)
    assert not g.is_admissible((1, 0, 1), loop=True)


def test_canonical_is_least_rotation_exhaustive():
    for n in range(1, 11):
        for w in itertools.product(range(3), repeat=n):
            assert canonical_necklace(w).canonical == min(rotate(w, k) for k in range(n))


@given(words3, st.integers(0, 30))
def test_canonical_rotation_invariant(w, k):
    assert canonical_necklace(rotate(w, k)) == canonical_necklace(w)
    assert rotate(w, least_rotation(w)) == canonical_necklace(w).canonical


@given(words3, words3)
def test_equal_necklaces_iff_cyclic_permutation(u, v):
    cyclic = len(u) == len(v) and any(rotate(u, k) == v for k in range(len(u)))
    assert (canonical_necklace(u) == canonical_necklace(v)) == cyclic


def test_empty_word_has_no_necklace():
    with pytest.raises(ValueError):
        canonical_necklace(())


def test_primitive_root():
    nk = canonical_necklace(word("BABA"))
    assert nk.primitive_period == 2 and not nk.is_primitive
    assert str(nk.root()) == "AB"
    assert canonical_necklace(word("AAB")).is_primitive


@pytest.mark.parametrize("L", [1, 2, 3, 4])
def test_count_necklaces_brute_force(L):
    for n in range(1, 9 if L < 4 else 7):
        brute = len({canonical_necklace(w) for w in itertools.product(range(L), repeat=n)})
        assert count_necklaces(L, n) == brute


def test_count_necklaces_known_values():
    # binary necklaces, n = 1..12
    assert [count_necklaces(2, n) for n in range(1, 13)] == [2, 3, 4, 6, 8, 14, 20, 36, 60, 108, 188, 352]
    # Burnside over all n rotations, independent of the divisor-totient form
    n = 64
    assert count_necklaces(2, n) == sum(2 ** math.gcd(n, k) for k in range(n)) // n
    assert count_necklaces(2, n) > 2**57
    with pytest.raises(ValueError):
        count_necklaces(0, 3)


@pytest.mark.parametrize("L", [2, 3])
def test_orbit_sizes_partition_all_words(L):
    for n in range(1, 11 if L == 2 else 8):
        necks = {canonical_necklace(w) for w in itertools.product(range(L), repeat=n)}
        assert sum(nk.primitive_period for nk in necks) == L**n


@pytest.mark.parametrize("L,n_max", [(1, 12), (2, 12), (3, 12), (4, 10)])
def test_full_shift_loop_count(L, n_max):
    g = TransitionGraph.full_shift(L)
    for n in range(1, n_max + 1):
        assert len(enumerate_loops(g, 0, n)) == L ** (n - 1)


def test_loops_match_transfer_matrix_and_order():
    rng = np.random.default_rng(3)
    for _ in range(20):
        g = random_graph(rng, int(rng.integers(2, 6)), 0.5)
        A = g.adjacency()
        for n in range(1, 8):
            base = int(rng.integers(g.alphabet_size))
            loops = enumerate_loops(g, base, n)
            assert len(loops) == np.linalg.matrix_power(A, n)[base, base]
            assert loops == sorted(loops)
            assert all(w[0] == base and g.is_admissible(w, loop=True) for w in loops)


def test_transitivity_matches_floyd_warshall():
    rng = np.random.default_rng(11)
    for _ in range(200):
        g = random_graph(rng, int(rng.integers(1, 8)), float(rng.uniform(0.15, 0.6)))
        assert is_transitive(g) == bool(closure(g.adjacency()).all())


def _period_oracle(A):
    n = len(A)
    P = np.eye(n, dtype=np.int64)
    g = 0
    for k in range(1, 2 * n * n + 1):
        P = np.minimum(P @ A, 1)
        if P[0, 0]:
            g = math.gcd(g, k)
    return g


def test_spectral_decomposition_properties():
    rng = np.random.default_rng(5)
    seen_periods = set()
    for _ in range(300):
        n = int(rng.integers(1, 9))
        g = random_graph(rng, n, float(rng.uniform(0.1, 0.5)))
        if not is_transitive(g):
            with pytest.raises(NotTransitive):
                spectral_decomposition(g)
            continue
        sd = spectral_decomposition(g)
        p = sd.period
        seen_periods.add(p)
        assert p == _period_oracle(g.adjacency())
        assert sorted(v for c in sd.classes for v in c) == list(range(n))
        for a, b in g.edges:
            assert sd.class_of(b) == (sd.class_of(a) + 1) % p
        for block in sd.classes:
            h = power_graph(g, p, block)
            assert is_transitive(h)
            assert spectral_decomposition(h).period == 1
    assert len(seen_periods) > 1


def test_cyclic_graph_period():
    g = TransitionGraph.from_adjacency([[0, 1, 0], [0, 0, 1], [1, 0, 0]])
    sd = spectral_decomposition(g)
    assert sd.period == 3 and all(len(c) == 1 for c in sd.classes)
