"""Convex rational polygons, possibly unbounded, in dual H/V representation.

Edge ``i`` of a bounded polygon runs from ``vertices[i]`` to
``vertices[i + 1]`` and is supported by ``halfplanes[i]``.  For an unbounded
polygon with ``m`` vertices there are ``m + 1`` half-planes: the first
supports the incoming ray that ends at ``vertices[0]``, the last supports the
outgoing ray leaving ``vertices[-1]``.  ``rays`` holds the two recession
directions as seen from those end vertices.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .affine import (
    INF,
    AffineMap,
    LatticeVector,
    add,
    cross,
    direction_of,
    dot,
    q,
    sub,
)
from .errors import DegeneratePolygon, NotInward, OutOfRange


@dataclass(frozen=True)
class HalfPlane:
    """The constraint <normal, p> >= offset, normal primitive and inward."""

    normal: LatticeVector
    offset: Fraction

    @classmethod
    def make(cls, normal, offset) -> "HalfPlane":
        n0, n1 = Fraction(normal[0]), Fraction(normal[1])
        c = q(offset) if not isinstance(offset, Fraction) else offset
        den = math.lcm(n0.denominator, n1.denominator)
        a, b = int(n0 * den), int(n1 * den)
        g = math.gcd(a, b)
        if g == 0:
            raise DegeneratePolygon("half-plane with zero normal")
        return cls(LatticeVector(a // g, b // g), c * den / g)

    @classmethod
    def through(cls, p, d) -> "HalfPlane":
        """Half-plane whose boundary passes through p along d, interior on the left."""
        v = direction_of(d)
        n = LatticeVector(-v.y, v.x)
        return cls(n, Fraction(dot(n, p)))

    def value(self, p) -> Fraction:
        return dot(self.normal, p) - self.offset

    def contains(self, p) -> bool:
        return self.value(p) >= 0

    @property
    def tangent(self) -> LatticeVector:
        """Direction of boundary traversal with the interior on the left."""
        return LatticeVector(self.normal.y, -self.normal.x)


@dataclass(frozen=True)
class Edge:
    """A boundary edge; ``start``/``end`` are None at infinity."""

    start: Optional[tuple]
    end: Optional[tuple]
    direction: LatticeVector
    halfplane: HalfPlane

    @property
    def is_ray(self) -> bool:
        return self.start is None or self.end is None


def _intersect(h1: HalfPlane, h2: HalfPlane):
    a, b = h1.normal
    c, d = h2.normal
    det = a * d - b * c
    if det == 0:
        return None
    e, f = h1.offset, h2.offset
    return (Fraction(e * d - b * f, det), Fraction(a * f - e * c, det))


def _angle_sort(vectors):
    def compare(u, v):
        hu = 0 if (u[1] > 0 or (u[1] == 0 and u[0] > 0)) else 1
        hv = 0 if (v[1] > 0 or (v[1] == 0 and v[0] > 0)) else 1
        if hu != hv:
            return hu - hv
        c = cross(u, v)
        return -1 if c > 0 else (1 if c < 0 else 0)

    return sorted(vectors, key=functools.cmp_to_key(compare))


@dataclass(frozen=True)
class RationalPolygon:
    halfplanes: tuple
    vertices: tuple
    rays: tuple = ()

    @property
    def bounded(self) -> bool:
        return not self.rays

    def contains(self, p) -> bool:
        return all(h.contains(p) for h in self.halfplanes)

    def interior_contains(self, p) -> bool:
        return all(h.value(p) > 0 for h in self.halfplanes)

    def on_boundary(self, p) -> bool:
        return self.contains(p) and not self.interior_contains(p)

    def active(self, p):
        """Indices of half-planes whose boundary line passes through p."""
        return [i for i, h in enumerate(self.halfplanes) if h.value(p) == 0]

    def edges(self) -> list:
        vs = self.vertices
        hs = self.halfplanes
        out = []
        if self.bounded:
            n = len(vs)
            for i in range(n):
                a, b = vs[i], vs[(i + 1) % n]
                out.append(Edge(a, b, direction_of(sub(b, a)), hs[i]))
            return out
        r_in, r_out = self.rays
        out.append(Edge(None, vs[0], -LatticeVector(*r_in), hs[0]))
        for i in range(1, len(vs)):
            a, b = vs[i - 1], vs[i]
            out.append(Edge(a, b, direction_of(sub(b, a)), hs[i]))
        out.append(Edge(vs[-1], None, LatticeVector(*r_out), hs[-1]))
        return out

    def vertex_directions(self, v):
        """Primitive directions of the two edges leaving vertex ``v``.

        Returns (towards previous vertex, towards next vertex) in CCW order.
        """
        es = self.edges()
        incoming = next(e for e in es if e.end == v)
        outgoing = next(e for e in es if e.start == v)
        return (-incoming.direction, outgoing.direction)

    def x_range(self):
        xs = [v[0] for v in self.vertices]
        lo, hi = min(xs), max(xs)
        for r in self.rays:
            if r[0] < 0:
                lo = -INF
            elif r[0] > 0:
                hi = INF
        return lo, hi

    def area(self) -> Fraction:
        if not self.bounded:
            return INF
        vs = self.vertices
        s = sum(cross(vs[i], vs[(i + 1) % len(vs)]) for i in range(len(vs)))
        return Fraction(s, 2)


def _recession_generators(hps):
    """Extreme rays of the recession cone {d : <n, d> >= 0 for all n}."""
    cands = set()
    for h in hps:
        t = h.tangent
        for d in (t, -t):
            if all(dot(g.normal, d) >= 0 for g in hps):
                cands.add(LatticeVector(*d))
    return cands


def polygon_from_halfplanes(hps) -> RationalPolygon:
    """Canonical polygon from an arbitrary list of half-planes."""
    hps = [h if isinstance(h, HalfPlane) else HalfPlane.make(*h) for h in hps]
    tight = {}
    for h in hps:
        if h.normal not in tight or h.offset > tight[h.normal].offset:
            tight[h.normal] = h
    hps = list(tight.values())

    verts = set()
    for h1, h2 in itertools.combinations(hps, 2):
        p = _intersect(h1, h2)
        if p is not None and all(h.contains(p) for h in hps):
            verts.add(p)
    if not verts:
        raise DegeneratePolygon("half-planes have no vertex (empty, strip or half-plane)")

    cone = _recession_generators(hps)
    facets = []
    for h in hps:
        on = [v for v in verts if h.value(v) == 0]
        t = h.tangent
        along = any(d == t or d == -t for d in cone)
        if len(on) >= 2 or (len(on) == 1 and along):
            facets.append(h)

    order = _angle_sort([f.tangent for f in facets])
    by_tangent = {f.tangent: f for f in facets}
    facets = [by_tangent[t] for t in order]

    if not cone:
        if len(facets) < 3:
            raise DegeneratePolygon("bounded intersection is not 2-dimensional")
        n = len(facets)
        vs = [_intersect(facets[i - 1], facets[i]) for i in range(n)]
        # vs[i] is the start of facets[i]
        start = vs.index(min(vs))
        vs = vs[start:] + vs[:start]
        facets = facets[start:] + facets[:start]
        if len(set(vs)) != len(vs):
            raise DegeneratePolygon("repeated vertex")
        area = sum(cross(vs[i], vs[(i + 1) % n]) for i in range(n))
        if area <= 0:
            raise DegeneratePolygon("zero-area polygon")
        return RationalPolygon(tuple(facets), tuple(vs), ())

    # unbounded: traversal starts on the facet arriving from infinity
    incoming = [i for i, f in enumerate(facets) if -f.tangent in cone]
    if len(incoming) != 1:
        raise DegeneratePolygon("unsupported unbounded region (need exactly two rays)")
    first = incoming[0]
    facets = facets[first:] + facets[:first]
    vs = [_intersect(facets[i - 1], facets[i]) for i in range(1, len(facets))]
    if len(facets) < 2 or any(v is None for v in vs) or set(vs) != verts:
        raise DegeneratePolygon("unsupported unbounded region (need exactly two rays)")
    r_in = -facets[0].tangent
    r_out = facets[-1].tangent
    if cross(r_out, r_in) < 0 or (cross(r_out, r_in) == 0 and r_in != r_out):
        raise DegeneratePolygon("recession cone is not pointed")
    if len(vs) == 1 and r_in == r_out:
        raise DegeneratePolygon("polygon degenerates to a ray")
    return RationalPolygon(tuple(facets), tuple(vs), (LatticeVector(*r_in), LatticeVector(*r_out)))


def polygon_from_vertices(vertices) -> RationalPolygon:
    """Bounded polygon from its vertices listed counterclockwise."""
    vs = [tuple(q(c) for c in v) for v in vertices]
    n = len(vs)
    hps = [HalfPlane.through(vs[i], sub(vs[(i + 1) % n], vs[i])) for i in range(n)]
    return polygon_from_halfplanes(hps)


def transform_polygon(T: AffineMap, poly: RationalPolygon) -> RationalPolygon:
    hps = []
    for h in poly.halfplanes:
        n2 = T.dual_linear(h.normal)
        off = h.offset + dot(n2, T.translation)
        hps.append(HalfPlane(LatticeVector(int(n2[0]), int(n2[1])), Fraction(off)))
    return polygon_from_halfplanes(hps)


def edge_affine_length(poly: RationalPolygon, edge: Edge):
    from .affine import affine_distance

    if edge.is_ray:
        return INF
    return affine_distance(edge.start, edge.end)


def is_delzant_corner(poly: RationalPolygon, vertex) -> bool:
    u, v = poly.vertex_directions(vertex)
    return abs(cross(u, v)) == 1


def line_interval(poly: RationalPolygon, p, d):
    """Parameter range {t : p + t*d in poly} as (lo, hi), or None if empty."""
    lo, hi = -INF, INF
    for h in poly.halfplanes:
        a = dot(h.normal, d)
        b = h.value(p)
        if a == 0:
            if b < 0:
                return None
        elif a > 0:
            lo = max(lo, Fraction(-b, 1) / a)
        else:
            hi = min(hi, Fraction(-b, 1) / a)
    if lo > hi:
        return None
    return lo, hi


def ray_exit(poly: RationalPolygon, w, lam):
    """Where the ray from boundary point ``w`` along ``lam`` leaves the polygon.

    Returns ``(exit_point, distance)``; both are ``(None, INF)`` when the ray
    runs off to infinity.  ``lam`` is taken to be primitive, so the parameter
    value is the affine distance.
    """
    for h in poly.halfplanes:
        v = h.value(w)
        if v < 0:
            raise NotInward(f"start point {w} is outside the polygon")
        if v == 0 and dot(h.normal, lam) <= 0:
            raise NotInward(f"direction {tuple(lam)} does not enter the interior from {w}")
    span = line_interval(poly, w, lam)
    if span is None or span[1] <= 0:
        raise NotInward("ray does not enter the polygon")
    t = span[1]
    if t == INF:
        return None, INF
    return add(w, lam, t), t


def slice_interval(poly: RationalPolygon, x0):
    x0 = q(x0)
    span = line_interval(poly, (x0, Fraction(0)), (0, 1))
    if span is None:
        raise OutOfRange(f"x = {x0} misses the polygon")
    return span


def segment_meets_open_box(seg, x0, x1, y0, y1) -> bool:
    """Does the closed segment meet the open box (x0, x1) x (y0, y1)?"""
    a, b = seg
    d = sub(b, a)
    lo, hi = Fraction(0), Fraction(1)
    lo_strict = hi_strict = False
    # constraints of the form alpha + beta*t > 0
    for alpha, beta in (
        (a[0] - x0, d[0]),
        (x1 - a[0], -d[0]),
        (a[1] - y0, d[1]),
        (y1 - a[1], -d[1]),
    ):
        if beta == 0:
            if not alpha > 0:
                return False
            continue
        if alpha == INF:
            continue
        r = Fraction(-alpha, 1) / beta
        if beta > 0:
            if r > lo or (r == lo and not lo_strict):
                lo, lo_strict = r, True
        else:
            if r < hi or (r == hi and not hi_strict):
                hi, hi_strict = r, True
    if lo < hi:
        return True
    return lo == hi and not lo_strict and not hi_strict


def rectangle_fits(poly, anchor, R, h, obstacles=()) -> bool:
    """Is anchor + [0,R] x [0,h] inside ``poly`` with its open interior obstacle-free?

    ``R`` may be ``INF`` for a half-infinite strip.
    """
    ax, ay = anchor
    corners = [anchor, (ax, ay + h)]
    if R == INF:
        if not all(dot(hp.normal, (1, 0)) >= 0 for hp in poly.halfplanes):
            return False
    else:
        corners += [(ax + R, ay), (ax + R, ay + h)]
    if not all(poly.contains(c) for c in corners):
        return False
    x1 = INF if R == INF else ax + R
    return not any(segment_meets_open_box(s, ax, x1, ay, ay + h) for s in obstacles)


def max_rectangle_width(poly, anchor, h, obstacles=()):
    """Largest R for which ``rectangle_fits(poly, anchor, R, h, obstacles)``.

    Returns None when no positive width fits, else a Fraction or ``INF``.
    The admissible widths form an interval [0, R_max], so this exact value
    replaces a sweep over breakpoints.
    """
    ax, ay = anchor
    best = INF
    for y in (ay, ay + h):
        span = line_interval(poly, (ax, y), (1, 0))
        if span is None or span[0] > 0 or span[1] <= 0:
            return None
        best = min(best, span[1])
    for seg in obstacles:
        bound = _first_obstacle_x(seg, ax, ay, ay + h)
        if bound is not None:
            best = min(best, bound - ax)
    if best <= 0:
        return None
    return best


def _first_obstacle_x(seg, ax, y0, y1):
    """Infimum of x over the part of ``seg`` with x > ax and y0 < y < y1."""
    a, b = seg
    d = sub(b, a)
    lo, hi = Fraction(0), Fraction(1)
    for alpha, beta in ((a[0] - ax, d[0]), (a[1] - y0, d[1]), (y1 - a[1], -d[1])):
        if beta == 0:
            if not alpha > 0:
                return None
            continue
        r = Fraction(-alpha, 1) / beta
        if beta > 0:
            lo = max(lo, r)
        else:
            hi = min(hi, r)
    if lo >= hi and not (lo == hi and d == (0, 0)):
        if not (lo == hi and _strictly_inside(add(a, d, lo), ax, y0, y1)):
            return None
    return min(a[0] + lo * d[0], a[0] + hi * d[0])


def _strictly_inside(p, ax, y0, y1):
    return p[0] > ax and y0 < p[1] < y1
