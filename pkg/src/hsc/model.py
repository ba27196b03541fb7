"""An affine suspended horseshoe embedded in a solid torus.

The section is the unit square ``D``.  Branch ``i`` maps the horizontal
strip ``D_i = [0,1] x [c_i, c_i + lam]`` affinely onto the vertical column
``[a_i, a_i + lam] x [0,1]``::

    f_i(x, y) = (a_i + lam x, (y - c_i) / lam)

so ``x`` is the contracting (unstable-leaf) coordinate and ``y`` the
expanding one.  The suspension flows a point of ``D_i`` for time
``roofs[i]`` and lands on ``f_i`` of it.  In space the flow winds once
around a solid torus of core radius ``R0``: at roof fraction ``u`` the
point sits at angle ``2 pi u`` and its square coordinates follow an
isotopy from the identity to ``f_i``: contract ``x`` for ``u`` in
``[0, 1/4]``, turn the small square of each branch ``branch_twists[i]``
full times about its centre for ``u`` in ``[1/4, 1/2]``, then expand ``y``.
The whole cross-section is also turned ``twist`` full times per turn.
Without the branch twists the fixed points of all branches would link
every other orbit the same number of times.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .linking import linking_number, min_distance
from .selection import OrderedSelection
from .shift import Necklace, Word, canonical_necklace, format_word, word as parse_word


class ModelError(ValueError):
    pass


class TangentialIntersection(RuntimeError):
    pass


class LabelCollision(ValueError):
    pass


def _frac(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, float):
        return Fraction(repr(v))
    return Fraction(v)


@dataclass(frozen=True)
class Embedding:
    """Solid-torus placement; ``branch_twists[i]`` defaults to 0 past the end of the tuple."""

    R0: float = 2.0
    width: float = 1.0
    twist: int = 1
    branch_twists: tuple[int, ...] = (1,)

    def __post_init__(self):
        object.__setattr__(self, "branch_twists", tuple(int(k) for k in self.branch_twists))

    def to_json(self) -> dict:
        return {"R0": self.R0, "width": self.width, "twist": self.twist,
                "branch_twists": list(self.branch_twists)}


@dataclass(frozen=True)
class AffineHorseshoeModel:
    """Branch data of the model; use :func:`build_model` for checked construction."""

    L: int
    lam: Fraction
    roofs: tuple[Fraction, ...]
    offsets: tuple[Fraction, ...]
    strips: tuple[Fraction, ...]
    embedding: Embedding = field(default_factory=Embedding)

    def branch(self, i: int, x, y):
        """``f_i(x, y)``; works for Fractions, floats and arrays."""
        lam = self.lam if isinstance(x, Fraction) else float(self.lam)
        a = self.offsets[i] if isinstance(x, Fraction) else float(self.offsets[i])
        c = self.strips[i] if isinstance(x, Fraction) else float(self.strips[i])
        return a + lam * x, (y - c) / lam

    def to_json(self) -> dict:
        return {
            "L": self.L,
            "lambda": str(self.lam),
            "roofs": [str(r) for r in self.roofs],
            "offsets": [str(a) for a in self.offsets],
            "strips": [str(c) for c in self.strips],
            "embedding": self.embedding.to_json(),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)

    @classmethod
    def from_json(cls, data: dict | str) -> "AffineHorseshoeModel":
        if isinstance(data, str):
            data = json.loads(data)
        emb = Embedding(**data.get("embedding", {}))
        if "offsets" in data or "strips" in data:
            L = int(data["L"])
            return cls(L, _frac(data["lambda"]), tuple(_frac(r) for r in data["roofs"]),
                       tuple(_frac(a) for a in data["offsets"]),
                       tuple(_frac(c) for c in data["strips"]), emb)
        return build_model(int(data["L"]), data["lambda"], data["roofs"], emb)


def build_model(L: int, lam, roofs: Sequence, embedding: Embedding | None = None) -> AffineHorseshoeModel:
    """Canonical ``L``-branch model with strips and columns centred at ``(2i+1)/(2L)``.

    Raises
    ------
    ModelError
        Unless ``0 < lam < 1/(2L)``, all roofs are positive and there is one
        roof per branch.
    """
    if L < 1:
        raise ModelError("L must be >= 1")
    lam = _frac(lam)
    if not (0 < lam < Fraction(1, 2 * L)):
        raise ModelError(f"lambda must lie in (0, 1/(2L)) = (0, {Fraction(1, 2 * L)}), got {lam}")
    roofs = tuple(_frac(r) for r in roofs)
    if len(roofs) != L:
        raise ModelError(f"expected {L} roof values, got {len(roofs)}")
    if any(r <= 0 for r in roofs):
        raise ModelError("roof values must be positive")
    centres = [Fraction(2 * i + 1, 2 * L) - lam / 2 for i in range(L)]
    return AffineHorseshoeModel(L, lam, roofs, tuple(centres), tuple(centres), embedding or Embedding())


# ----------------------------------------------------------------------------
# Rectangles and the crossing condition
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class Rect:
    """Axis-parallel rectangle; ``s_axis`` is the direction of the first chart coordinate.

    With ``s_axis = "y"`` the sides ``v_-``/``v_+`` are the bottom and top
    edges and ``h_-``/``h_+`` the left and right edges; with ``"x"`` it is
    the other way round.
    """

    x0: Fraction
    x1: Fraction
    y0: Fraction
    y1: Fraction
    s_axis: str = "x"

    def sides(self) -> dict[str, tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]]]:
        bottom = ((self.x0, self.y0), (self.x1, self.y0))
        top = ((self.x0, self.y1), (self.x1, self.y1))
        left = ((self.x0, self.y0), (self.x0, self.y1))
        right = ((self.x1, self.y0), (self.x1, self.y1))
        if self.s_axis == "y":
            return {"v-": bottom, "v+": top, "h-": left, "h+": right}
        return {"v-": left, "v+": right, "h-": bottom, "h+": top}

    def contains(self, p) -> bool:
        return self.x0 <= p[0] <= self.x1 and self.y0 <= p[1] <= self.y1

    def clip(self, seg):
        """Intersection of an axis-parallel segment with the rectangle, or ``None``."""
        (px, py), (qx, qy) = seg
        lo_x, hi_x = max(min(px, qx), self.x0), min(max(px, qx), self.x1)
        lo_y, hi_y = max(min(py, qy), self.y0), min(max(py, qy), self.y1)
        if lo_x > hi_x or lo_y > hi_y:
            return None
        return (lo_x, lo_y), (hi_x, hi_y)


def _on_segment(p, seg) -> bool:
    (ax, ay), (bx, by) = seg
    return min(ax, bx) <= p[0] <= max(ax, bx) and min(ay, by) <= p[1] <= max(ay, by)


def crosses(r1: Rect, r2: Rect) -> bool:
    """Whether ``r1`` crosses ``r2``.

    The ``v`` sides of ``r1`` and the ``h`` sides of ``r2`` miss the other
    rectangle, each ``h`` side of ``r1`` meets ``r2`` in a path joining the
    two ``v`` sides of ``r2``, and each ``v`` side of ``r2`` meets ``r1`` in a
    path joining the two ``h`` sides of ``r1``.
    """
    s1, s2 = r1.sides(), r2.sides()
    if any(r2.clip(s1[k]) is not None for k in ("v-", "v+")):
        return False
    if any(r1.clip(s2[k]) is not None for k in ("h-", "h+")):
        return False

    def joins(seg, rect, sides, a, b):
        piece = rect.clip(seg)
        if piece is None or piece[0] == piece[1]:
            return False
        p, q = piece
        return ((_on_segment(p, sides[a]) and _on_segment(q, sides[b]))
                or (_on_segment(p, sides[b]) and _on_segment(q, sides[a])))

    for k in ("h-", "h+"):
        if not joins(s1[k], r2, s2, "v-", "v+"):
            return False
    for k in ("v-", "v+"):
        if not joins(s2[k], r1, s1, "h-", "h+"):
            return False
    return True


@dataclass(frozen=True)
class RectangleSection:
    D: Rect
    rects: tuple[Rect, ...]
    images: tuple[Rect, ...]

    def to_json(self) -> dict:
        def corners(r):
            return [str(r.x0), str(r.x1), str(r.y0), str(r.y1)]
        return {"D": corners(self.D), "rects": [corners(r) for r in self.rects],
                "images": [corners(r) for r in self.images]}


def section(model: AffineHorseshoeModel) -> RectangleSection:
    """The square, the strips ``D_i`` and their images ``f_i(D_i)``.

    Strips are charted along ``y`` (their ``v`` sides are the horizontal
    edges), images along ``y`` as well, so ``f_i(D_i)`` crossing ``D_j``
    means the column runs from bottom to top through the strip.
    """
    one, zero, lam = Fraction(1), Fraction(0), model.lam
    D = Rect(zero, one, zero, one, "x")
    rects = tuple(Rect(zero, one, c, c + lam, "y") for c in model.strips)
    images = tuple(Rect(a, a + lam, zero, one, "y") for a in model.offsets)
    return RectangleSection(D, rects, images)


def verify_markov_type(model: AffineHorseshoeModel) -> bool:
    """Strips pairwise disjoint inside ``D`` and every image crosses every strip."""
    sec = section(model)
    for r in sec.rects + sec.images:
        if not (sec.D.contains((r.x0, r.y0)) and sec.D.contains((r.x1, r.y1))):
            return False
    for i, r in enumerate(sec.rects):
        for s in sec.rects[i + 1:]:
            if not (r.y1 < s.y0 or s.y1 < r.y0):
                return False
    return all(crosses(img, r) for img in sec.images for r in sec.rects)


# ----------------------------------------------------------------------------
# Flow and embedding
# ----------------------------------------------------------------------------

def isotopy(model: AffineHorseshoeModel, branch, x, y, u):
    """Square coordinates at roof fraction ``u`` of a point starting at ``(x, y)`` in ``D_branch``.

    ``branch`` may be an int or an integer array matching ``x``.
    """
    lam = float(model.lam)
    a = np.asarray([float(v) for v in model.offsets])[branch]
    c = np.asarray([float(v) for v in model.strips])[branch]
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    u = np.asarray(u, dtype=float)
    s1 = np.clip(4 * u, 0, 1)
    s2 = np.clip(2 * u - 1, 0, 1)
    xs = x + s1 * (a + lam * x - x)
    ys = y
    turns = np.asarray(model.embedding.branch_twists + (0,) * model.L)[: model.L][branch]
    if np.any(turns):
        # rigid turn on a disk around the branch's contracted square, fading
        # to the identity on an annulus that stays clear of the other squares;
        # the turn is complete before the expansion starts
        cx = a + lam / 2
        cy = c + lam / 2
        r0, r1 = 0.75 * lam, 0.7 / model.L
        dx, dy = xs - cx, ys - cy
        rho = np.hypot(dx, dy)
        fade = np.clip((r1 - rho) / (r1 - r0), 0, 1)
        ang = 2 * np.pi * turns * np.clip(4 * u - 1, 0, 1) * fade
        ca, sa = np.cos(ang), np.sin(ang)
        xs, ys = cx + ca * dx - sa * dy, cy + sa * dx + ca * dy
    ys = ys + s2 * ((ys - c) / lam - ys)
    return xs, ys


def embed(model: AffineHorseshoeModel, xs, ys, u) -> np.ndarray:
    """Point of the solid torus for square coordinates ``(xs, ys)`` at roof fraction ``u``."""
    e = model.embedding
    X = (np.asarray(xs) - 0.5) * e.width
    Y = (np.asarray(ys) - 0.5) * e.width
    psi = 2 * np.pi * e.twist * np.asarray(u)
    Xr = X * np.cos(psi) - Y * np.sin(psi)
    Yr = X * np.sin(psi) + Y * np.cos(psi)
    theta = 2 * np.pi * np.asarray(u)
    return np.stack([(e.R0 + Xr) * np.cos(theta), (e.R0 + Xr) * np.sin(theta), Yr], axis=-1)


def flow_position(model: AffineHorseshoeModel, branch, x, y, u) -> np.ndarray:
    xs, ys = isotopy(model, branch, x, y, u)
    return embed(model, xs, ys, u)


def section_coordinates(model: AffineHorseshoeModel, p) -> tuple[float, float]:
    """Inverse of the embedding on the section plane ``u = 0``."""
    e = model.embedding
    return (p[0] - e.R0) / e.width + 0.5, p[2] / e.width + 0.5


# ----------------------------------------------------------------------------
# Periodic orbits
# ----------------------------------------------------------------------------

def periodic_point(model: AffineHorseshoeModel, w: Sequence[int]) -> tuple[Fraction, Fraction]:
    """Exact fixed point of ``f_{w_{n-1}} o ... o f_{w_0}`` lying in ``D_{w_0}``.

    From ``y_j = c_{w_j} + lam y_{j+1}`` and ``x_{j+1} = a_{w_j} + lam x_j``
    around the cycle.
    """
    n = len(w)
    lam = model.lam
    denom = 1 - lam**n
    y0 = sum((lam**t * model.strips[s] for t, s in enumerate(w)), Fraction(0)) / denom
    x0 = sum((lam ** (n - 1 - t) * model.offsets[s] for t, s in enumerate(w)), Fraction(0)) / denom
    return x0, y0


@dataclass(frozen=True)
class Orbit3D:
    label: Necklace
    word: Word
    vertices: np.ndarray = field(repr=False)
    times: np.ndarray = field(repr=False)
    period: Fraction
    base_point: tuple[Fraction, Fraction]
    samples_per_segment: int
    closure_error: float
    resolution: float
    closed: bool = True

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["t", "x", "y", "z"])
        for t, (x, y, z) in zip(self.times, self.vertices):
            wr.writerow([repr(float(t)), repr(float(x)), repr(float(y)), repr(float(z))])
        return buf.getvalue()


def periodic_orbit(model: AffineHorseshoeModel, w: Sequence[int] | Necklace | str,
                   samples_per_segment: int = 64) -> Orbit3D:
    """Closed polyline of the periodic orbit with itinerary ``w``.

    Each return segment is sampled at ``u = k / K``, ``k = 0 .. K-1`` (``K``
    a multiple of 4, so the isotopy corners ``u = 1/4, 1/2`` are vertices);
    the closing edge back to the first vertex is implied.
    """
    if isinstance(w, Necklace):
        w = w.canonical
    elif isinstance(w, str):
        w = parse_word(w)
    w = tuple(int(s) for s in w)
    if not w or any(not 0 <= s < model.L for s in w):
        raise ModelError(f"word {w} is not over {model.L} symbols")
    K = int(samples_per_segment)
    if K < 4 or K % 4:
        raise ModelError("samples_per_segment must be a positive multiple of 4")
    x0, y0 = periodic_point(model, w)
    pts = [(x0, y0)]
    for s in w:
        pts.append(model.branch(s, *pts[-1]))
    assert pts[-1] == pts[0]
    # each return in binary64 must land on the next exact point; iterating
    # the floats instead would amplify rounding by 1/lam per return
    closure = 0.0
    for j, s in enumerate(w):
        xf, yf = model.branch(s, float(pts[j][0]), float(pts[j][1]))
        closure = max(closure, math.hypot(xf - float(pts[j + 1][0]), yf - float(pts[j + 1][1])))

    u = np.arange(K) / K
    verts, times = [], []
    clock = Fraction(0)
    for j, s in enumerate(w):
        xj, yj = pts[j]
        verts.append(flow_position(model, s, float(xj), float(yj), u))
        times.append(float(clock) + u * float(model.roofs[s]))
        clock += model.roofs[s]
    V = np.concatenate(verts)
    spacing = np.linalg.norm(np.roll(V, -1, axis=0) - V, axis=1)
    return Orbit3D(canonical_necklace(w), w, V, np.concatenate(times), clock, (x0, y0), K,
                   closure, float(spacing.max()))


@dataclass(frozen=True)
class IntersectionPattern:
    count: int
    sequence: Word
    points: tuple[tuple[float, float], ...]


def intersection_pattern(model: AffineHorseshoeModel, orbit: Orbit3D, tol: float = 1e-9) -> IntersectionPattern:
    """Transverse hits of the polyline with the section ``D`` and the strips they land in.

    A hit is a sign change of the second world coordinate from negative to
    non-negative on the half plane where the first coordinate is positive.
    Hits outside every ``D_i`` are counted with symbol ``-1``.
    """
    V = orbit.vertices
    prev = np.roll(V, 1, axis=0)
    idx = np.nonzero((prev[:, 1] < 0) & (V[:, 1] >= 0))[0]
    seq, hits = [], []
    lam = float(model.lam)
    for i in idx:
        a, b = prev[i], V[i]
        dy = b[1] - a[1]
        if dy <= 1e-14 * max(1.0, np.linalg.norm(b - a)):
            raise TangentialIntersection(f"polyline grazes the section at vertex {i}")
        t = -a[1] / dy
        p = a + t * (b - a)
        if p[0] <= 0:
            continue
        x, y = section_coordinates(model, p)
        if not (-tol <= x <= 1 + tol and -tol <= y <= 1 + tol):
            continue
        sym = -1
        for k, c in enumerate(model.strips):
            if float(c) - tol <= y <= float(c) + lam + tol:
                sym = k
                break
        seq.append(sym)
        hits.append((float(x), float(y)))
    return IntersectionPattern(len(seq), tuple(seq), tuple(hits))


# ----------------------------------------------------------------------------
# Orders on the section and the link of pairs of pants
# ----------------------------------------------------------------------------

def symbol_orders(model: AffineHorseshoeModel, words: Sequence[Sequence[int]]):
    """Ranks of ``words`` along the stable and unstable directions, and orientation bits.

    Each word ``w`` is placed at the periodic point of ``w``: the stable
    order compares ``y`` (leaves of the stable lamination are horizontal)
    and the unstable order compares ``x``.  Every affine branch keeps both
    orientations, so all bits are 0.
    """
    pts = [periodic_point(model, tuple(w)) for w in words]
    if len(set(pts)) != len(pts):
        raise ModelError("words must label distinct points")
    by_s = sorted(range(len(pts)), key=lambda i: pts[i][1])
    by_u = sorted(range(len(pts)), key=lambda i: pts[i][0])
    order_s = [0] * len(pts)
    order_u = [0] * len(pts)
    for r, i in enumerate(by_s):
        order_s[i] = r
    for r, i in enumerate(by_u):
        order_u[i] = r
    return order_s, order_u, [0] * len(pts)


@dataclass(frozen=True)
class FriedLink:
    labels: tuple[tuple[Necklace, Necklace, Necklace], ...]
    components: tuple[tuple[Orbit3D, Orbit3D, Orbit3D], ...]

    def curves(self) -> list[Orbit3D]:
        return [c for triple in self.components for c in triple]

    def names(self) -> list[str]:
        return [format_word(o.word) for o in self.curves()]


def fried_link_labels(selection: OrderedSelection, words: Sequence[Sequence[int]]) -> list[tuple[Word, Word, Word]]:
    """Itineraries ``(T--, T++, T-- T++)`` and ``(O_i T-, O_i T+, O_i T- O_i T+)``."""
    w = [tuple(v) for v in words]
    tmm, tpp = w[selection.theta_mm], w[selection.theta_pp]
    out = [(tmm, tpp, tmm + tpp)]
    if selection.omegas and (selection.theta_m is None or selection.theta_p is None):
        raise LabelCollision("selection has omegas but no inner thetas")
    for o in selection.omegas:
        a = w[o] + w[selection.theta_m]
        b = w[o] + w[selection.theta_p]
        out.append((a, b, a + b))
    return out


def fried_link(model: AffineHorseshoeModel, selection: OrderedSelection, words: Sequence[Sequence[int]],
               samples_per_segment: int = 64, min_separation: float = 1e-7) -> FriedLink:
    """Realise the boundary orbits of the pairs of pants attached to a selection.

    Raises
    ------
    LabelCollision
        When a label is not primitive or two labels are rotations of each
        other (the orbits would coincide).
    """
    triples = fried_link_labels(selection, words)
    seen: dict[Necklace, Word] = {}
    for triple in triples:
        for itin in triple:
            nk = canonical_necklace(itin)
            if not nk.is_primitive:
                raise LabelCollision(f"label {format_word(itin)} is a proper power")
            if nk in seen:
                raise LabelCollision(f"labels {format_word(seen[nk])} and {format_word(itin)} give the same orbit")
            seen[nk] = itin
    comps = tuple(tuple(periodic_orbit(model, itin, samples_per_segment) for itin in t) for t in triples)
    curves = [c for t in comps for c in t]
    for i in range(len(curves)):
        for j in range(i + 1, len(curves)):
            if min_distance(curves[i], curves[j]) < min_separation:
                raise LabelCollision(f"components {i} and {j} are not disjoint at resolution")
    labels = tuple(tuple(canonical_necklace(x) for x in t) for t in triples)
    return FriedLink(labels, comps)


def linking_fingerprint(model: AffineHorseshoeModel, orbit: Orbit3D, link: FriedLink) -> tuple:
    """``(hits on D, linking numbers with each link component)``; components equal to the orbit give ``None``."""
    count = intersection_pattern(model, orbit).count
    lks = []
    for c in link.curves():
        lks.append(None if c.label == orbit.label else linking_number(orbit, c))
    return (count, tuple(lks))
