import numpy as np
import pytest

from hsc.linking import (CurvesTooClose, crossing_linking_number, gauss_linking_number, linking_matrix,
                         linking_matrix_csv, linking_number, min_distance)


def circle(center, normal_axis, r=1.0, n=200, phase=0.0):
    t = np.linspace(0, 2 * np.pi, n, endpoint=False) + phase
    c, s = r * np.cos(t), r * np.sin(t)
    axes = [i for i in range(3) if i != normal_axis]
    P = np.zeros((n, 3))
    P[:, axes[0]], P[:, axes[1]] = c, s
    return P + np.asarray(center, dtype=float)


def torus_knot(p, q, R=2.0, r=0.7, n=600, phase=0.0):
    """A (p, q) curve on a torus; ``phase`` shifts the meridional angle."""
    t = np.linspace(0, 2 * np.pi, n, endpoint=False)
    phi, theta = p * t, q * t + phase
    rho = R + r * np.cos(theta)
    return np.stack([rho * np.cos(phi), rho * np.sin(phi), r * np.sin(theta)], axis=1)


def midpoint_gauss(P, Q):
    """Midpoint-rule Gauss double integral, independent of the polygon formula."""
    dP = np.roll(P, -1, axis=0) - P
    dQ = np.roll(Q, -1, axis=0) - Q
    mP = P + dP / 2
    mQ = Q + dQ / 2
    r = mP[:, None] - mQ[None]
    cross = np.cross(dP[:, None], dQ[None])
    return float((np.einsum("ijk,ijk->ij", r, cross) / np.linalg.norm(r, axis=2) ** 3).sum() / (4 * np.pi))


def test_hopf_pair():
    a = circle([0, 0, 0], 2)
    b = circle([1, 0, 0], 1)
    assert linking_number(a, b) == -1
    assert linking_number(a, b[::-1]) == 1
    assert linking_number(b, a) == linking_number(a, b)


def test_unlinked_circles():
    assert linking_number(circle([0, 0, 0], 2), circle([5, 0, 0], 2)) == 0
    assert linking_number(circle([0, 0, 0], 2), circle([0, 0, 1], 2, r=0.5)) == 0


def test_torus_link():
    # two parallel (1, 2) curves on a torus make the (2, 4) torus link
    a = torus_knot(1, 2)
    b = torus_knot(1, 2, phase=np.pi)
    assert linking_number(a, b) == -2


def test_polygon_formula_matches_midpoint_quadrature():
    rng = np.random.default_rng(8)
    for _ in range(10):
        a = torus_knot(1, int(rng.integers(1, 4)), n=400) + rng.normal(scale=0.05, size=3)
        b = circle(rng.normal(scale=0.1, size=3), int(rng.integers(3)), r=2.0, n=400)
        if min_distance(a, b) < 0.1:
            continue
        assert gauss_linking_number(a, b) == pytest.approx(midpoint_gauss(a, b), abs=2e-2)


def test_crossings_invariant_under_rotation():
    a, b = torus_knot(1, 3), torus_knot(1, 3, phase=np.pi)
    rng = np.random.default_rng(0)
    base = crossing_linking_number(a, b)
    for seed in range(5):
        Q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
        if np.linalg.det(Q) < 0:
            Q[:, 0] *= -1
        assert crossing_linking_number(a @ Q.T, b @ Q.T, seed=seed) == base
        assert round(gauss_linking_number(a @ Q.T, b @ Q.T)) == base


def test_mirror_flips_sign():
    a, b = circle([0, 0, 0], 2), circle([1, 0, 0], 1)
    flip = np.diag([1.0, 1.0, -1.0])
    assert linking_number(a @ flip, b @ flip) == -linking_number(a, b)


def test_too_close_and_bad_input():
    a = circle([0, 0, 0], 2)
    with pytest.raises(CurvesTooClose):
        linking_number(a, circle([1.0, 0, 0], 2))
    with pytest.raises(ValueError):
        gauss_linking_number(a[:2], a)


def test_min_distance_segments():
    a = np.array([[0, 0, 0], [1, 0, 0], [1, 1, 0]], dtype=float)
    b = np.array([[0.5, -1, 1], [0.5, 1, 1], [0.5, 1, 3]], dtype=float)
    assert min_distance(a, b) == pytest.approx(1.0)


def test_linking_matrix_and_csv():
    curves = [circle([0, 0, 0], 2), circle([1, 0, 0], 1), circle([10, 0, 0], 2)]
    M = linking_matrix(curves)
    assert (M == M.T).all() and (np.diag(M) == 0).all()
    assert M[0, 1] == -1 and M[0, 2] == 0
    text = linking_matrix_csv(M, ["a", "b", "c"])
    assert text.splitlines()[0] == ",a,b,c"
    assert text.splitlines()[1] == "a,0,-1,0"
