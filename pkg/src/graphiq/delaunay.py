"""Planar Delaunay triangulation by randomized incremental (Bowyer-Watson) insertion.

Predicates are exact: a floating-point evaluation is accepted when it clears
a forward error bound, otherwise the determinant is recomputed over
``Fraction`` (every double is a rational, so this is the exact sign).

Cocircular ties are broken by symbolically lifting each point's paraboloid
height by ``eps**rank`` with ``rank`` its position in lexicographic (x, y)
order, so the triangulation is unique and independent of insertion order.

The hull is handled with ghost triangles ``(u, v, GHOST)``: one per hull
edge, oriented so that the outside of the hull lies to the left of u->v.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

import numpy as np

__all__ = [
    "GHOST",
    "DegenerateInputError",
    "DuplicatePointError",
    "orient2d",
    "incircle",
    "triangulate",
    "triangle_edges",
    "is_delaunay",
]

GHOST = -1

_EPS = 2.0**-53
_CCW_BOUND = (3.0 + 16.0 * _EPS) * _EPS
_ICC_BOUND = (10.0 + 96.0 * _EPS) * _EPS


class DegenerateInputError(ValueError):
    """All points are collinear, or too few points to triangulate."""


class DuplicatePointError(DegenerateInputError):
    def __init__(self, i: int, j: int):
        super().__init__(f"points {i} and {j} coincide")
        self.pair = (i, j)


def _sign(v) -> int:
    return (v > 0) - (v < 0)


def orient2d(a, b, c) -> int:
    """+1 if a, b, c turn counter-clockwise, -1 if clockwise, 0 if collinear."""
    detleft = (a[0] - c[0]) * (b[1] - c[1])
    detright = (a[1] - c[1]) * (b[0] - c[0])
    det = detleft - detright
    bound = _CCW_BOUND * (abs(detleft) + abs(detright))
    if det > bound:
        return 1
    if -det > bound:
        return -1
    ax, ay, bx, by, cx, cy = map(Fraction, (a[0], a[1], b[0], b[1], c[0], c[1]))
    return _sign((ax - cx) * (by - cy) - (ay - cy) * (bx - cx))


def incircle(a, b, c, d) -> int:
    """+1 if d is strictly inside the circle through ccw a, b, c; 0 if on it."""
    adx, ady = a[0] - d[0], a[1] - d[1]
    bdx, bdy = b[0] - d[0], b[1] - d[1]
    cdx, cdy = c[0] - d[0], c[1] - d[1]
    bdxcdy, cdxbdy = bdx * cdy, cdx * bdy
    cdxady, adxcdy = cdx * ady, adx * cdy
    adxbdy, bdxady = adx * bdy, bdx * ady
    alift = adx * adx + ady * ady
    blift = bdx * bdx + bdy * bdy
    clift = cdx * cdx + cdy * cdy
    det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) + clift * (adxbdy - bdxady)
    permanent = (
        (abs(bdxcdy) + abs(cdxbdy)) * alift
        + (abs(cdxady) + abs(adxcdy)) * blift
        + (abs(adxbdy) + abs(bdxady)) * clift
    )
    bound = _ICC_BOUND * permanent
    if det > bound:
        return 1
    if -det > bound:
        return -1
    F = Fraction
    adx, ady = F(a[0]) - F(d[0]), F(a[1]) - F(d[1])
    bdx, bdy = F(b[0]) - F(d[0]), F(b[1]) - F(d[1])
    cdx, cdy = F(c[0]) - F(d[0]), F(c[1]) - F(d[1])
    det = (
        (adx * adx + ady * ady) * (bdx * cdy - cdx * bdy)
        + (bdx * bdx + bdy * bdy) * (cdx * ady - adx * cdy)
        + (cdx * cdx + cdy * cdy) * (adx * bdy - bdx * ady)
    )
    return _sign(det)


class _Triangulator:
    def __init__(self, pts: list[tuple[float, float]]):
        self.pts = pts
        order = sorted(range(len(pts)), key=lambda i: pts[i])
        self.rank = [0] * len(pts)
        for r, i in enumerate(order):
            self.rank[i] = r
        self.tris: set[tuple[int, int, int]] = set()

    def _incircle_sos(self, a, b, c, d) -> int:
        P = self.pts
        s = incircle(P[a], P[b], P[c], P[d])
        if s:
            return s
        # derivative of the determinant w.r.t. each point's lifted height
        coeff = {
            a: lambda: orient2d(P[b], P[c], P[d]),
            b: lambda: orient2d(P[c], P[a], P[d]),
            c: lambda: orient2d(P[a], P[b], P[d]),
            d: lambda: -orient2d(P[a], P[b], P[c]),
        }
        for v in sorted((a, b, c, d), key=self.rank.__getitem__):
            s = coeff[v]()
            if s:
                return s
        raise AssertionError("unreachable: triangle is non-degenerate")

    def _conflict(self, tri, p) -> bool:
        a, b, c = tri
        P = self.pts
        if c != GHOST:
            return self._incircle_sos(a, b, c, p) > 0
        o = orient2d(P[a], P[b], P[p])
        if o:
            return o > 0
        # collinear with the hull edge: conflict only on the open segment
        (ax, ay), (bx, by), (px, py) = P[a], P[b], P[p]
        if ax != bx:
            return min(ax, bx) < px < max(ax, bx)
        return min(ay, by) < py < max(ay, by)

    @staticmethod
    def _canon(tri):
        a, b, c = tri
        if GHOST in tri:
            while tri[2] != GHOST:
                tri = (tri[1], tri[2], tri[0])
            return tri
        m = min(tri)
        while tri[0] != m:
            tri = (tri[1], tri[2], tri[0])
        return tri

    def seed(self, a, b, c):
        if orient2d(self.pts[a], self.pts[b], self.pts[c]) < 0:
            b, c = c, b
        self.tris = {self._canon(t) for t in ((a, b, c), (b, a, GHOST), (c, b, GHOST), (a, c, GHOST))}

    def insert(self, p):
        bad = [t for t in self.tris if self._conflict(t, p)]
        edges = set()
        for a, b, c in bad:
            edges.update(((a, b), (b, c), (c, a)))
        self.tris.difference_update(bad)
        for u, v in edges:
            if (v, u) not in edges:
                self.tris.add(self._canon((u, v, p)))


def triangulate(points: Sequence[Sequence[float]], rng: np.random.Generator | None = None) -> list[tuple[int, int, int]]:
    """Delaunay triangles of ``points`` as ccw index triples, sorted.

    ``rng`` only shuffles the insertion order; the output does not depend on it.
    """
    arr = np.asarray(points, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError(f"points must have shape (n, 2), got {arr.shape}")
    n = arr.shape[0]
    if n < 3:
        raise DegenerateInputError(f"need at least 3 points, got {n}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("non-finite coordinate")
    pts = [(float(x), float(y)) for x, y in arr]
    seen: dict[tuple[float, float], int] = {}
    for i, p in enumerate(pts):
        if p in seen:
            raise DuplicatePointError(seen[p], i)
        seen[p] = i

    if rng is None:
        rng = np.random.default_rng(0)
    order = [int(i) for i in rng.permutation(n)]
    a, b = order[0], order[1]
    for k in range(2, n):
        if orient2d(pts[a], pts[b], pts[order[k]]) != 0:
            break
    else:
        raise DegenerateInputError("all points are collinear")
    c = order.pop(k)

    tr = _Triangulator(pts)
    tr.seed(a, b, c)
    for p in order[2:]:
        tr.insert(p)
    return sorted(t for t in tr.tris if GHOST not in t)


def triangle_edges(triangles) -> set[tuple[int, int]]:
    edges = set()
    for a, b, c in triangles:
        for u, v in ((a, b), (b, c), (c, a)):
            edges.add((min(u, v), max(u, v)))
    return edges


def is_delaunay(points, triangles) -> bool:
    """Brute-force empty-circumcircle check (strict interior, no perturbation)."""
    pts = [(float(x), float(y)) for x, y in np.asarray(points, dtype=np.float64)]
    for a, b, c in triangles:
        if orient2d(pts[a], pts[b], pts[c]) <= 0:
            return False
        for d in range(len(pts)):
            if d not in (a, b, c) and incircle(pts[a], pts[b], pts[c], pts[d]) > 0:
                return False
    return True
