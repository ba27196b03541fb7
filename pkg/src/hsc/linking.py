"""Linking numbers of closed polygons in 3-space, computed two independent ways.

* :func:`gauss_linking_number` evaluates the Gauss double integral exactly
  for polygons (solid angles of segment-pair quadrilaterals).
* :func:`crossing_linking_number` projects onto a random plane and adds up
  signed crossings, ``lk = (1/2) sum sign``.

Sign convention: ``lk = (1/4 pi) oint oint (r1 - r2) . (dr1 x dr2) / |r1 - r2|^3``.
"""
from __future__ import annotations

import csv
import io
from typing import Sequence

import numpy as np

from . import kernels


class CurvesTooClose(ValueError):
    """The polygons come closer than the requested separation."""


class LinkingDisagreement(RuntimeError):
    """The two linking algorithms returned different integers."""


class DegenerateProjection(RuntimeError):
    pass


def _vertices(c) -> np.ndarray:
    v = getattr(c, "vertices", c)
    v = np.asarray(v, dtype=float)
    if v.ndim != 2 or v.shape[1] != 3 or v.shape[0] < 3:
        raise ValueError("a closed polygon needs at least 3 vertices in R^3")
    return v


def gauss_linking_number(c1, c2) -> float:
    """Gauss integral of two closed polygons (vertices listed once, closing edge implied)."""
    return float(kernels.gauss_linking(_vertices(c1), _vertices(c2)))


def _segment_distances(p0, p1, q0, q1) -> np.ndarray:
    """Pairwise distances between segments ``p0 p1`` (rows) and ``q0 q1`` (columns)."""
    d1 = (p1 - p0)[:, None, :]
    d2 = (q1 - q0)[None, :, :]
    r = p0[:, None, :] - q0[None, :, :]
    a = np.einsum("ijk,ijk->ij", d1, d1)
    e = np.einsum("ijk,ijk->ij", d2, d2)
    b = np.einsum("ijk,ijk->ij", d1, d2)
    c = np.einsum("ijk,ijk->ij", d1, r)
    f = np.einsum("ijk,ijk->ij", d2, r)
    denom = a * e - b * b
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.where(denom > 1e-300, np.clip((b * f - c * e) / denom, 0.0, 1.0), 0.0)
        t = (b * s + f) / e
        s = np.where(t < 0, np.clip(-c / a, 0.0, 1.0), np.where(t > 1, np.clip((b - c) / a, 0.0, 1.0), s))
    t = np.clip(t, 0.0, 1.0)
    diff = r + s[..., None] * d1 - t[..., None] * d2
    return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))


def min_distance(c1, c2, chunk: int = 256) -> float:
    """Smallest distance between the two closed polygons."""
    P, Q = _vertices(c1), _vertices(c2)
    P1, Q1 = np.roll(P, -1, axis=0), np.roll(Q, -1, axis=0)
    best = np.inf
    for i in range(0, len(P), chunk):
        d = _segment_distances(P[i:i + chunk], P1[i:i + chunk], Q, Q1)
        best = min(best, float(d.min()))
    return best


def _cross2(u, v):
    return u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]


def _projection_crossings(P, Q, direction, chunk=256, tol=1e-9):
    v = direction / np.linalg.norm(direction)
    helper = np.array([1.0, 0.0, 0.0]) if abs(v[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = np.cross(v, helper)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(v, e1)
    # (e1, e2, v) is right-handed, so the viewer looks down -v
    basis = np.stack([e1, e2], axis=1)
    P2, Q2 = P @ basis, Q @ basis
    Ph, Qh = P @ v, Q @ v
    P2n, Q2n = np.roll(P2, -1, axis=0), np.roll(Q2, -1, axis=0)
    Phn, Qhn = np.roll(Ph, -1), np.roll(Qh, -1)
    dq = Q2n - Q2
    total = 0
    for i in range(0, len(P), chunk):
        p0, dp = P2[i:i + chunk, None, :], (P2n - P2)[i:i + chunk, None, :]
        w = Q2[None, :, :] - p0
        denom = _cross2(dp, dq[None, :, :])
        with np.errstate(divide="ignore", invalid="ignore"):
            s = _cross2(w, dq[None, :, :]) / denom
            t = _cross2(w, dp) / denom
        near = (np.abs(denom) < tol) & (np.abs(_cross2(w, dp)) < tol)
        if near.any():
            raise DegenerateProjection("parallel overlapping segments in projection")
        inside = (s > -tol) & (s < 1 + tol) & (t > -tol) & (t < 1 + tol)
        edge = inside & ((s < tol) | (s > 1 - tol) | (t < tol) | (t > 1 - tol))
        if edge.any():
            raise DegenerateProjection("crossing through a vertex")
        ii, jj = np.nonzero(inside)
        if ii.size == 0:
            continue
        s, t = s[ii, jj], t[ii, jj]
        gi = ii + i
        hp = Ph[gi] + s * (Phn[gi] - Ph[gi])
        hq = Qh[jj] + t * (Qhn[jj] - Qh[jj])
        if (np.abs(hp - hq) < tol).any():
            raise DegenerateProjection("the curves meet")
        dP = (P2n - P2)[gi]
        dQ = dq[jj]
        over_is_p = hp > hq
        d_over = np.where(over_is_p[:, None], dP, dQ)
        d_under = np.where(over_is_p[:, None], dQ, dP)
        total += int(np.sign(_cross2(d_over, d_under)).sum())
    return total


def crossing_linking_number(c1, c2, seed: int = 0, attempts: int = 20) -> int:
    """Half the signed crossing count in a random projection.

    A direction is drawn from a seeded generator; projections in which a
    crossing lands on a vertex, segments overlap or the curves meet are
    discarded and a new direction is drawn.
    """
    P, Q = _vertices(c1), _vertices(c2)
    rng = np.random.default_rng(seed)
    for _ in range(attempts):
        direction = rng.normal(size=3)
        try:
            total = _projection_crossings(P, Q, direction)
        except DegenerateProjection:
            continue
        if total % 2:
            continue
        return total // 2
    raise DegenerateProjection(f"no generic projection found in {attempts} attempts")


def linking_number(c1, c2, min_separation: float = 1e-7, seed: int = 0) -> int:
    """Integer linking number; both algorithms must agree.

    Raises
    ------
    CurvesTooClose
        When the polygons come within ``min_separation`` of each other.
    LinkingDisagreement
        When the rounded Gauss integral and the crossing count differ, or
        the integral is not within 0.01 of an integer.
    """
    d = min_distance(c1, c2)
    if d < min_separation:
        raise CurvesTooClose(f"polygons are {d:.3g} apart (< {min_separation:.3g}); sample more finely")
    g = gauss_linking_number(c1, c2)
    k = int(round(g))
    c = crossing_linking_number(c1, c2, seed=seed)
    if abs(g - k) > 0.01 or k != c:
        raise LinkingDisagreement(f"Gauss integral {g:.6f}, crossing count {c}")
    return k


def linking_matrix(curves: Sequence, seed: int = 0) -> np.ndarray:
    """Symmetric integer matrix of pairwise linking numbers; the diagonal is 0."""
    n = len(curves)
    M = np.zeros((n, n), dtype=np.int64)
    for i in range(n):
        for j in range(i + 1, n):
            M[i, j] = M[j, i] = linking_number(curves[i], curves[j], seed=seed)
    return M


def linking_matrix_csv(M: np.ndarray, labels: Sequence[str]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([""] + list(labels))
    for lab, row in zip(labels, M):
        w.writerow([lab] + [int(v) for v in row])
    return buf.getvalue()
