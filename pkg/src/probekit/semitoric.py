"""Semitoric polygons: nodes with vertical cuts, and the surgeries on them.

A representative is a convex polygon plus focus-focus nodes.  Each node has
a vertical cut running from the node to the boundary, upward when
``epsilon == +1`` and downward when ``epsilon == -1``; the boundary end of a
cut must be a polygon vertex.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Optional

from .affine import INF, AffineMap, cross, dot, q, sub
from .errors import (
    CrossingCuts,
    CutCornerMissing,
    InvalidSlide,
    MutationBreaksConvexity,
    NodeOnBoundary,
    SolveFailed,
    TradeBlocked,
)
from .polygon import (
    HalfPlane,
    RationalPolygon,
    is_delzant_corner,
    polygon_from_halfplanes,
    polygon_from_vertices,
    slice_interval,
    transform_polygon,
)


@dataclass(frozen=True)
class Node:
    """A focus-focus value with its cut sign and multiplicity.

    Attributes:
        position: the node as an exact point.
        epsilon: +1 for an upward cut, -1 for a downward cut.
        k: number of focus-focus points on the singular fiber.
        height: vertical distance to the bottom boundary (filled in by
            ``make_semitoric``).
    """

    position: tuple
    epsilon: int
    k: int = 1
    height: Optional[Fraction] = None

    @property
    def x(self) -> Fraction:
        return self.position[0]

    @property
    def y(self) -> Fraction:
        return self.position[1]


@dataclass(frozen=True)
class SemitoricPolygon:
    polygon: RationalPolygon
    nodes: tuple = ()

    def cut(self, i: int):
        """Cut segment of node i as (node position, boundary corner)."""
        node = self.nodes[i]
        lo, hi = slice_interval(self.polygon, node.x)
        end = hi if node.epsilon > 0 else lo
        return (node.position, (node.x, end))

    def cuts(self) -> list:
        return [self.cut(i) for i in range(len(self.nodes))]

    def node_index(self, p) -> Optional[int]:
        for i, n in enumerate(self.nodes):
            if n.position == p:
                return i
        return None

    def on_cut(self, p) -> list:
        """Indices of nodes whose cut (node excluded) contains p."""
        hits = []
        for i, (a, b) in enumerate(self.cuts()):
            if p[0] == a[0] and p != a and min(a[1], b[1]) <= p[1] <= max(a[1], b[1]):
                hits.append(i)
        return hits

    @property
    def bounded(self) -> bool:
        return self.polygon.bounded


def _as_node(n) -> Node:
    if isinstance(n, Node):
        return Node((q(n.position[0]), q(n.position[1])), int(n.epsilon), int(n.k))
    pos, eps, *rest = n
    return Node((q(pos[0]), q(pos[1])), int(eps), int(rest[0]) if rest else 1)


def make_semitoric(polygon: RationalPolygon, nodes=()) -> SemitoricPolygon:
    """Validate nodes against ``polygon`` and attach heights."""
    checked = []
    seen = set()
    for raw in nodes:
        n = _as_node(raw)
        if n.epsilon not in (1, -1):
            raise ValueError(f"epsilon must be +1 or -1, got {n.epsilon}")
        if n.k < 1:
            raise ValueError("multiplicity must be positive")
        if not polygon.interior_contains(n.position):
            raise NodeOnBoundary(f"node {n.position} is not strictly interior")
        if n.position in seen:
            raise ValueError(f"two nodes at {n.position}; merge them into one multiplicity")
        seen.add(n.position)
        lo, hi = slice_interval(polygon, n.x)
        end = hi if n.epsilon > 0 else lo
        if end in (INF, -INF) or (n.x, end) not in polygon.vertices:
            raise CutCornerMissing(f"cut of node {n.position} ends at non-vertex ({n.x}, {end})")
        checked.append(replace(n, height=n.y - lo))
    checked.sort(key=lambda n: (n.x, n.y))
    for a, b in zip(checked, checked[1:]):
        if a.x == b.x and a.epsilon > 0 and b.epsilon < 0:
            raise CrossingCuts(f"cuts of nodes {a.position} and {b.position} cross")
    return SemitoricPolygon(polygon, tuple(checked))


def _shear_point(p, x0, m):
    if p[0] > x0:
        return (p[0], p[1] + m * (p[0] - x0))
    return p


def shear_right(poly: RationalPolygon, x0, m) -> RationalPolygon:
    """Image of ``poly`` under (x, y) -> (x, y + m (x - x0)) on x >= x0, identity on x <= x0."""
    x0 = q(x0)
    if m == 0:
        return poly
    vs = list(poly.vertices)
    chain = []
    if poly.bounded:
        n = len(vs)
        for i in range(n):
            a, b = vs[i], vs[(i + 1) % n]
            chain.append(a)
            if (a[0] - x0) * (b[0] - x0) < 0:
                t = (x0 - a[0]) / (b[0] - a[0])
                chain.append((x0, a[1] + t * (b[1] - a[1])))
        r_in = r_out = None
    else:
        r_in, r_out = poly.rays
        for i, a in enumerate(vs):
            chain.append(a)
            if i + 1 < len(vs):
                b = vs[i + 1]
                if (a[0] - x0) * (b[0] - x0) < 0:
                    t = (x0 - a[0]) / (b[0] - a[0])
                    chain.append((x0, a[1] + t * (b[1] - a[1])))
        # split rays that cross the line
        first, last = chain[0], chain[-1]
        if r_in[0] != 0 and (x0 - first[0]) / r_in[0] > 0:
            t = (x0 - first[0]) / r_in[0]
            chain.insert(0, (x0, first[1] + t * r_in[1]))
        if r_out[0] != 0 and (x0 - last[0]) / r_out[0] > 0:
            t = (x0 - last[0]) / r_out[0]
            chain.append((x0, last[1] + t * r_out[1]))

    def shear_dir(r):
        return (r[0], r[1] + m * r[0]) if r[0] > 0 else (r[0], r[1])

    image = [_shear_point(p, x0, m) for p in chain]
    dirs = []
    if poly.bounded:
        n = len(image)
        dirs = [sub(image[(i + 1) % n], image[i]) for i in range(n)]
        turns = [(dirs[i], dirs[(i + 1) % n]) for i in range(n)]
    else:
        din = shear_dir(r_in)
        dout = shear_dir(r_out)
        dirs = [(-din[0], -din[1])] + [sub(image[i + 1], image[i]) for i in range(len(image) - 1)] + [dout]
        turns = list(zip(dirs, dirs[1:]))
    for u, v in turns:
        c = cross(u, v)
        if c < 0 or (c == 0 and dot(u, v) < 0):
            raise MutationBreaksConvexity(f"shear at x = {x0} produces a reflex turn")

    hps = []
    if poly.bounded:
        for i, d in enumerate(dirs):
            hps.append(HalfPlane.through(image[i], d))
    else:
        hps.append(HalfPlane.through(image[0], dirs[0]))
        for i in range(len(image) - 1):
            hps.append(HalfPlane.through(image[i], dirs[i + 1]))
        hps.append(HalfPlane.through(image[-1], dirs[-1]))
    out = polygon_from_halfplanes(hps)
    if not set(out.vertices) <= set(image) or not all(out.contains(p) for p in image):
        raise MutationBreaksConvexity(f"shear at x = {x0} does not yield a convex polygon")
    return out


def mutate(sp: SemitoricPolygon, i: int) -> SemitoricPolygon:
    """Flip the cut of node i by shearing the half-plane to the right of it."""
    node = sp.nodes[i]
    m = node.epsilon * node.k
    poly = shear_right(sp.polygon, node.x, m)
    nodes = []
    for j, n in enumerate(sp.nodes):
        pos = _shear_point(n.position, node.x, m)
        eps = -n.epsilon if j == i else n.epsilon
        nodes.append(Node(pos, eps, n.k))
    return make_semitoric(poly, nodes)


def mutation_map(sp: SemitoricPolygon, i: int):
    """Point map carrying sp to mutate(sp, i)."""
    node = sp.nodes[i]
    m = node.epsilon * node.k
    x0 = node.x
    return lambda p: _shear_point(p, x0, m)


def slide(sp: SemitoricPolygon, i: int, y_new):
    """Move node i along its vertical line.

    Returns ``(new_sp, slid_segment)``; the segment is None for a null slide.
    """
    y_new = q(y_new)
    node = sp.nodes[i]
    if y_new == node.y:
        return sp, None
    target = (node.x, y_new)
    if not sp.polygon.interior_contains(target):
        raise InvalidSlide(f"target {target} is not strictly interior")
    lo, hi = sorted((node.y, y_new))
    for j, other in enumerate(sp.nodes):
        if j != i and other.x == node.x and lo <= other.y <= hi:
            raise InvalidSlide(f"slide crosses node at {other.position}")
    nodes = [Node(n.position if j != i else target, n.epsilon, n.k) for j, n in enumerate(sp.nodes)]
    seg = ((node.x, lo), (node.x, hi))
    return make_semitoric(sp.polygon, nodes), seg


def trade(sp: SemitoricPolygon, i: int):
    """Replace node i and its cut by an honest toric corner.

    Returns ``(new_sp, excluded_segment)`` where the new representative keeps
    the remaining nodes and the excluded segment is the former cut.
    """
    node, corner = sp.cut(i)
    if not is_delzant_corner(sp.polygon, corner):
        raise TradeBlocked(f"cut corner {corner} is not Delzant")
    lo, hi = sorted((node[1], corner[1]))
    for j, other in enumerate(sp.nodes):
        if j != i and other.x == node[0] and lo <= other.y <= hi:
            raise TradeBlocked(f"node {other.position} lies on the cut")
    rest = [n for j, n in enumerate(sp.nodes) if j != i]
    return SemitoricPolygon(sp.polygon, tuple(rest)), (node, corner)


def transform_semitoric(T: AffineMap, sp: SemitoricPolygon) -> SemitoricPolygon:
    """Apply a map that keeps vertical lines vertical and upward (translation times T^k)."""
    if not T.preserves_verticals():
        raise ValueError("only translations composed with T^k keep cuts vertical")
    poly = transform_polygon(T, sp.polygon)
    return make_semitoric(poly, [Node(T(n.position), n.epsilon, n.k) for n in sp.nodes])


# ---------------------------------------------------------------- DH check


@dataclass(frozen=True)
class DhEntry:
    x: Fraction
    left_slope: Fraction
    right_slope: Fraction
    jump: Fraction
    predicted: Fraction
    match: bool
    node_multiplicity: int
    top_weight: Fraction
    bottom_weight: Fraction


@dataclass(frozen=True)
class DhReport:
    entries: tuple
    flagged: tuple = ()  # (x, reason) pairs skipped by the check

    @property
    def all_match(self) -> bool:
        return all(e.match for e in self.entries)


def _chain_slopes(poly, x0, xl, xr):
    lo0, hi0 = slice_interval(poly, x0)
    lol, hil = slice_interval(poly, xl)
    lor, hir = slice_interval(poly, xr)
    top = ((hi0 - hil) / (x0 - xl), (hir - hi0) / (xr - x0))
    bot = ((lo0 - lol) / (x0 - xl), (lor - lo0) / (xr - x0))
    return top, bot


def _corner_weight(poly, v, left_slope, right_slope, shift):
    """DH contribution of the boundary point v: 0 for a fake or smooth point."""
    if v not in poly.vertices:
        return Fraction(0)
    if right_slope + shift == left_slope:
        return Fraction(0)
    u, w = poly.vertex_directions(v)
    if u[0] == 0 or w[0] == 0:
        return None
    return Fraction(-1, u[0] * w[0])


def dh_jump_report(sp: SemitoricPolygon) -> DhReport:
    """Compare slice-width slope jumps with the node and vertex prediction."""
    poly = sp.polygon
    lo, hi = poly.x_range()
    xs = sorted({v[0] for v in poly.vertices} | {n.x for n in sp.nodes})
    entries, flagged = [], []
    for x0 in xs:
        if not lo < x0 < hi:
            continue
        if sum(1 for v in poly.vertices if v[0] == x0) > 2:
            flagged.append((x0, "vertical edge"))
            continue
        prev = [x for x in xs if x < x0]
        nxt = [x for x in xs if x > x0]
        xl = x0 - (x0 - prev[-1]) / 2 if prev else x0 - 1
        xr = x0 + (nxt[0] - x0) / 2 if nxt else x0 + 1
        top, bot = _chain_slopes(poly, x0, xl, xr)
        ymin, ymax = slice_interval(poly, x0)
        here = [n for n in sp.nodes if n.x == x0]
        k_all = sum(n.k for n in here)
        k_up = sum(n.k for n in here if n.epsilon > 0)
        k_down = sum(n.k for n in here if n.epsilon < 0)
        e_top = _corner_weight(poly, (x0, ymax), top[0], top[1], k_up)
        e_bot = _corner_weight(poly, (x0, ymin), bot[0], bot[1], -k_down)
        if e_top is None or e_bot is None:
            flagged.append((x0, "vertical edge at vertex"))
            continue
        left = top[0] - bot[0]
        right = top[1] - bot[1]
        jump = right - left
        predicted = -k_all - e_top - e_bot
        entries.append(DhEntry(x0, left, right, jump, predicted, jump == predicted, k_all, e_top, e_bot))
    return DhReport(tuple(entries), tuple(flagged))


# ------------------------------------------------------- slope reconstruction


@dataclass(frozen=True)
class NodeSpec:
    x: Fraction
    k: int
    epsilon: int
    height: Fraction


@dataclass(frozen=True)
class EllipticSpec:
    x: Fraction
    side: str  # "top" or "bottom"
    weights: tuple  # first components of the two primitive edge directions


@dataclass(frozen=True)
class Combinatorics:
    """Input of the slope solver.

    The polygon is described over breakpoints ``x_0 < ... < x_m``; on each
    interval the top and bottom boundary are straight with unknown slopes.

    Attributes:
        breakpoints: all vertex and node x-coordinates.
        left_width / right_width: lengths of the vertical edges at the ends
            (0 when the end is a single vertex).
        left_slope / right_slope: slice-width slope next to each end, read off
            the isotropy data of the extremal fixed set.
        nodes: node lines with multiplicity, cut sign and height.
        elliptic: interior elliptic vertices with their isotropy weights.
        anchor: ("bottom" | "top", y) fixing the boundary point over x_0.
        anchored_slope: ("bottom" | "top", interval index, slope).
    """

    breakpoints: tuple
    left_width: Fraction
    right_width: Fraction
    left_slope: Fraction
    right_slope: Fraction
    nodes: tuple = ()
    elliptic: tuple = ()
    anchor: tuple = ("bottom", Fraction(0))
    anchored_slope: tuple = ("bottom", 0, Fraction(0))


def _rref(rows, ncols):
    """Reduced row echelon form over Fractions; returns (rows, pivot columns)."""
    rows = [list(r) for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = rows[r][c]
        rows[r] = [v / inv for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    return rows, pivots


def solve_slopes(comb: Combinatorics):
    """Solve for the top and bottom slopes on every interval.

    Returns ``(top, bottom)`` tuples of Fractions.
    """
    xs = [q(x) for x in comb.breakpoints]
    m = len(xs) - 1
    if m < 1 or any(a >= b for a, b in zip(xs, xs[1:])):
        raise SolveFailed("breakpoints must be strictly increasing, at least two")
    nvar = 2 * m

    def top(j):
        return j

    def bot(j):
        return m + j

    rows = []

    def eq(coeffs, rhs):
        row = [Fraction(0)] * (nvar + 1)
        for idx, c in coeffs:
            row[idx] += c
        row[-1] = Fraction(rhs)
        rows.append(row)

    side, j, value = comb.anchored_slope
    eq([((top if side == "top" else bot)(j), 1)], value)
    eq([(top(0), 1), (bot(0), -1)], comb.left_slope)
    eq([(top(m - 1), 1), (bot(m - 1), -1)], comb.right_slope)
    for j in range(1, m):
        x = xs[j]
        here = [n for n in comb.nodes if q(n.x) == x]
        k_all = sum(n.k for n in here)
        k_up = sum(n.k for n in here if n.epsilon > 0)
        k_down = sum(n.k for n in here if n.epsilon < 0)
        ell = {e.side: e for e in comb.elliptic if q(e.x) == x}
        e_sum = sum(Fraction(-1, e.weights[0] * e.weights[1]) for e in ell.values())
        eq([(top(j), 1), (bot(j), -1), (top(j - 1), -1), (bot(j - 1), 1)], -k_all - e_sum)
        if "top" not in ell:
            eq([(top(j), 1), (top(j - 1), -1)], -k_up)
        if "bottom" not in ell:
            eq([(bot(j), 1), (bot(j - 1), -1)], k_down)
    eq(
        [(top(j), xs[j + 1] - xs[j]) for j in range(m)] + [(bot(j), -(xs[j + 1] - xs[j])) for j in range(m)],
        q(comb.right_width) - q(comb.left_width),
    )

    reduced, pivots = _rref(rows, nvar + 1)
    rank = len([c for c in pivots if c < nvar])
    aug = len(pivots)
    if aug > rank:
        raise SolveFailed("slope equations are inconsistent", rank, aug, nvar)
    if rank < nvar:
        raise SolveFailed("slope equations are underdetermined", rank, aug, nvar)
    sol = [Fraction(0)] * nvar
    for row, c in zip(reduced, pivots):
        sol[c] = row[-1]
    return tuple(sol[:m]), tuple(sol[m:])


def solve_representative(comb: Combinatorics) -> SemitoricPolygon:
    """Build the closed representative determined by ``comb``."""
    tops, bots = solve_slopes(comb)
    xs = [q(x) for x in comb.breakpoints]
    side, y0 = comb.anchor
    y0 = q(y0)
    if side == "bottom":
        yb, yt = y0, y0 + q(comb.left_width)
    else:
        yt, yb = y0, y0 - q(comb.left_width)
    bottom_pts, top_pts = [(xs[0], yb)], [(xs[0], yt)]
    for j in range(len(xs) - 1):
        dx = xs[j + 1] - xs[j]
        yb += bots[j] * dx
        yt += tops[j] * dx
        bottom_pts.append((xs[j + 1], yb))
        top_pts.append((xs[j + 1], yt))
    if top_pts[-1][1] - bottom_pts[-1][1] != q(comb.right_width):
        raise SolveFailed("solution does not close up")
    ring = bottom_pts + top_pts[::-1]
    ring = [p for i, p in enumerate(ring) if p != ring[i - 1]]
    poly = polygon_from_vertices(ring)
    if not all(poly.on_boundary(p) for p in ring):
        raise SolveFailed("solved boundary is not convex")
    bottom_at = dict(bottom_pts)
    nodes = [Node((q(n.x), bottom_at[q(n.x)] + q(n.height)), n.epsilon, n.k) for n in comb.nodes]
    return make_semitoric(poly, nodes)
