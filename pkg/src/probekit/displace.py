"""Displacement engine: probes, rectangle certificates, facts, and grid scans."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, replace
from enum import Enum
from fractions import Fraction
from typing import Callable, Optional

from .affine import (
    INF,
    AffineMap,
    LatticeVector,
    add,
    corner_normalization,
    cross,
    dot,
    lattice_multiple,
    q,
    sub,
)
from .errors import InvalidProbe, NeedsWindow, NotInward, OutOfRange, ProbekitError
from .polygon import (
    HalfPlane,
    RationalPolygon,
    is_delzant_corner,
    line_interval,
    max_rectangle_width,
    ray_exit,
    rectangle_fits,
    slice_interval,
    transform_polygon,
)
from .semitoric import SemitoricPolygon, mutate, mutation_map, slide, trade

DEFAULT_BOUND = 10
DEFAULT_RESOLUTION = Fraction(1, 4)
AXIS_DIRECTIONS = (LatticeVector(1, 0), LatticeVector(-1, 0), LatticeVector(0, 1), LatticeVector(0, -1))


def default_bound() -> int:
    """Probe search bound, overridable through PROBEKIT_BOUND."""
    raw = os.environ.get("PROBEKIT_BOUND")
    return int(raw) if raw else DEFAULT_BOUND


class Status(str, Enum):
    DISPLACEABLE_BY_PROBE = "DisplaceableByProbe"
    DISPLACEABLE_BY_RECTANGLE = "DisplaceableByRectangle"
    DISPLACEABLE_BY_FACT = "DisplaceableByFact"
    NONDISPLACEABLE_SPHERE = "NondisplaceableSphere"
    NONDISPLACEABLE_STEM = "NondisplaceableStem"
    NONDISPLACEABLE_BY_FACT = "NondisplaceableByFact"
    UNKNOWN = "Unknown"

    @property
    def displaceable(self) -> bool:
        return self.value.startswith("Displaceable")


# ------------------------------------------------------------------- facts

FACT_KINDS = ("Symmetry", "ExistenceNondisplaceable", "SuperheavyPoint", "ExternalNondisplaceable")


@dataclass(frozen=True)
class Constraint:
    """<normal, p> >= offset, or > when strict."""

    normal: tuple
    offset: Fraction
    strict: bool = False

    def holds(self, p) -> bool:
        v = dot(self.normal, p) - self.offset
        return v > 0 if self.strict else v >= 0


@dataclass(frozen=True)
class Fact:
    """An externally supplied statement about a set of fibers.

    Exactly one of ``points``, ``regions`` or ``line`` describes the set; a
    region is an intersection of constraints and the set is their union.
    """

    kind: str
    citation: str
    points: tuple = ()
    regions: tuple = ()
    line: Optional[Fraction] = None

    def __post_init__(self):
        if self.kind not in FACT_KINDS:
            raise ValueError(f"unknown fact kind {self.kind!r}")

    def contains(self, p) -> bool:
        if p in self.points:
            return True
        if self.line is not None and p[0] == self.line:
            return True
        return any(all(c.holds(p) for c in region) for region in self.regions)

    @property
    def asserts_displaceable(self) -> bool:
        return self.kind == "Symmetry"

    @property
    def asserts_nondisplaceable(self) -> bool:
        return self.kind in ("SuperheavyPoint", "ExternalNondisplaceable")


# --------------------------------------------------------------- witnesses


@dataclass(frozen=True)
class Probe:
    """A probe in some representative; ``representative`` lists the surgery
    steps (``("mutate", i)``, ``("trade", i)``, ``("slide", i, y)``) applied to
    the input polygon to reach it."""

    start: tuple
    direction: LatticeVector
    facet: HalfPlane
    exit: Optional[tuple]
    length: object
    representative: tuple = ()


@dataclass(frozen=True)
class RectangleWitness:
    """A rectangle [0, width] x [0, height] behind a Delzant cut corner.

    ``normalization`` maps the representative so that the corner is the
    origin; every fiber whose normalized image lies in
    [0, width/2) x [0, height] is displaceable.
    """

    node: int
    corner: tuple
    normalization: AffineMap
    width: object
    height: Fraction
    node_image: tuple
    representative: tuple = ()
    obstacles: tuple = ()

    def covers(self, p_rep) -> bool:
        a, b = self.normalization(p_rep)
        if a < 0 or b < 0 or b > self.height:
            return False
        if self.width != INF and not a < self.width / 2:
            return False
        return not any(_on_segment(p_rep, s) for s in self.obstacles)


@dataclass(frozen=True)
class Verdict:
    status: Status
    witness: object = None
    fact: Optional[Fact] = None
    note: str = ""


def _on_segment(p, seg) -> bool:
    a, b = seg
    if cross(sub(p, a), sub(b, a)) != 0:
        return False
    return min(a[0], b[0]) <= p[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])


def _open_probe_hits(w, lam, length, seg) -> bool:
    """Does {w + t*lam : 0 < t < length} meet the closed segment ``seg``?"""
    a, b = seg
    d = sub(b, a)
    aw = sub(a, w)
    denom = cross(lam, d)
    if denom == 0:
        if cross(aw, lam) != 0:
            return False
        ta = lattice_multiple(aw, lam)
        tb = lattice_multiple(sub(b, w), lam)
        lo, hi = min(ta, tb), max(ta, tb)
        return hi > 0 and lo < length
    t = Fraction(cross(aw, d)) / denom
    s = Fraction(cross(aw, lam)) / denom
    return 0 < t < length and 0 <= s <= 1


def _parts(sp):
    if isinstance(sp, SemitoricPolygon):
        return sp.polygon, sp.cuts()
    return sp, []


# ------------------------------------------------------------------ probes


def check_probe(poly: RationalPolygon, cuts, w, lam, u, representative=()) -> Verdict:
    """Validate the probe from ``w`` along ``lam`` and judge the target ``u``."""
    lam = LatticeVector(int(lam[0]), int(lam[1]))
    active = poly.active(w)
    if not poly.contains(w) or len(active) != 1:
        raise InvalidProbe(f"start {w} is not in the relative interior of a facet")
    facet = poly.halfplanes[active[0]]
    if not lam.is_primitive or dot(lam, facet.normal) != 1:
        raise InvalidProbe(f"direction {tuple(lam)} is not integrally transverse and inward")
    try:
        exit_point, length = ray_exit(poly, w, lam)
    except NotInward as exc:
        raise InvalidProbe(str(exc)) from exc
    t = lattice_multiple(sub(u, w), lam)
    if t is None or t <= 0 or not poly.interior_contains(u):
        raise InvalidProbe(f"target {u} is not an interior point on the probe")
    probe = Probe(w, lam, facet, exit_point, length, tuple(representative))
    if any(_open_probe_hits(w, lam, length, c) for c in cuts):
        return Verdict(Status.UNKNOWN, note="probe crosses a cut")
    if length == INF or 2 * t < length:
        return Verdict(Status.DISPLACEABLE_BY_PROBE, witness=probe)
    return Verdict(Status.UNKNOWN, note="target is not less than halfway along the probe")


def probe_verdict(sp, w, lam, u) -> Verdict:
    poly, cuts = _parts(sp)
    return check_probe(poly, cuts, tuple(map(q, w)), lam, tuple(map(q, u)))


def _ext_gcd(a, b):
    if b == 0:
        return (a, 1, 0) if a >= 0 else (-a, -1, 0)
    g, x, y = _ext_gcd(b, a % b)
    return g, y, x - (a // b) * y


def _facet_span(poly, h):
    """Range of s = <tau, p> over the facet supported by h, tau along the facet."""
    tau = (-h.normal.y, h.normal.x)
    edge = next(e for e in poly.edges() if e.halfplane == h)
    vals = []
    if edge.start is None:
        vals.append(-INF if dot(tau, edge.direction) > 0 else INF)
    else:
        vals.append(dot(tau, edge.start))
    if edge.end is None:
        vals.append(INF if dot(tau, edge.direction) > 0 else -INF)
    else:
        vals.append(dot(tau, edge.end))
    return min(vals), max(vals)


def probe_candidates(poly: RationalPolygon, u, bound: int):
    """Every (facet, direction, start) whose probe passes through u.

    Bounded facets are enumerated exhaustively (the set is finite and does
    not depend on the coordinate frame); facets extending to infinity are
    capped at max-norm ``bound``.
    """
    out = []
    for fi, h in enumerate(poly.halfplanes):
        delta = h.value(u)
        if delta <= 0:
            continue
        n = h.normal
        g, a, b = _ext_gcd(n.x, n.y)
        lam0 = (a * g, b * g)  # g is +-1 for a primitive normal
        tau = (-n.y, n.x)
        norm2 = dot(n, n)
        s_lo, s_hi = _facet_span(poly, h)
        s0 = dot(tau, u) - delta * dot(tau, lam0)
        step = delta * norm2
        # s(w_j) = s0 - j*step must lie strictly inside (s_lo, s_hi)
        reach = bound + max(abs(lam0[0]), abs(lam0[1]))
        j_lo = math.floor((s0 - s_hi) / step) + 1 if s_hi != INF else -reach
        j_hi = math.ceil((s0 - s_lo) / step) - 1 if s_lo != -INF else reach
        infinite = s_hi == INF or s_lo == -INF
        for j in range(j_lo, j_hi + 1):
            lam = LatticeVector(lam0[0] + j * tau[0], lam0[1] + j * tau[1])
            if infinite and max(abs(lam.x), abs(lam.y)) > bound:
                continue
            s = s0 - j * step
            if not s_lo < s < s_hi:
                continue
            w = (u[0] - delta * lam.x, u[1] - delta * lam.y)
            out.append((max(abs(lam.x), abs(lam.y)), fi, tuple(lam), h, lam, w, delta))
    out.sort(key=lambda c: c[:3])
    return out


def _search(poly, cuts, u, bound, representative=()) -> Optional[Probe]:
    for _, _, _, h, lam, w, delta in probe_candidates(poly, u, bound):
        span = line_interval(poly, w, lam)
        length = span[1]
        if length != INF and not 2 * delta < length:
            continue
        if any(_open_probe_hits(w, lam, length, c) for c in cuts):
            continue
        exit_point = None if length == INF else add(w, lam, length)
        return Probe(w, lam, h, exit_point, length, tuple(representative))
    return None


def probe_search(sp, u, bound: Optional[int] = None) -> Verdict:
    bound = default_bound() if bound is None else bound
    poly, cuts = _parts(sp)
    u = tuple(map(q, u))
    probe = _search(poly, cuts, u, bound)
    if probe is not None:
        return Verdict(Status.DISPLACEABLE_BY_PROBE, witness=probe)
    return Verdict(Status.UNKNOWN, note=f"no probe with max-norm <= {bound}")


def transport_probe(T: AffineMap, probe: Probe) -> Probe:
    lam = T.apply_linear(probe.direction)
    n = T.dual_linear(probe.facet.normal)
    facet = HalfPlane(LatticeVector(int(n[0]), int(n[1])), probe.facet.offset + dot(n, T.translation))
    exit_point = None if probe.exit is None else T(probe.exit)
    return Probe(T(probe.start), LatticeVector(int(lam[0]), int(lam[1])), facet, exit_point, probe.length,
                 probe.representative)


# ----------------------------------------------------------- representatives


@dataclass
class Representative:
    """A representative reached from the input by surgeries.

    ``to_rep`` carries points of the input representative to this one;
    ``excluded`` lists segments where fiber conclusions do not transfer.
    """

    sp: SemitoricPolygon
    ops: tuple
    to_rep: Callable
    excluded: tuple = ()

    def usable_for(self, p_rep) -> bool:
        if self.sp.node_index(p_rep) is not None or self.sp.on_cut(p_rep):
            return False
        return not any(_on_segment(p_rep, s) for s in self.excluded)


def _identity(p):
    return p


def trade_all(rep: Representative) -> Representative:
    """Trade every node whose cut allows it, repeating until none can be traded."""
    sp, ops, excluded = rep.sp, list(rep.ops), list(rep.excluded)
    changed = True
    while changed:
        changed = False
        for i in range(len(sp.nodes)):
            try:
                new_sp, seg = trade(sp, i)
            except ProbekitError:
                continue
            sp = new_sp
            ops.append(("trade", i))
            excluded.append(seg)
            changed = True
            break
    return Representative(sp, tuple(ops), rep.to_rep, tuple(excluded))


def replay(sp: SemitoricPolygon, ops) -> Representative:
    """Rebuild the representative named by a list of surgery steps."""
    rep = Representative(sp, (), _identity)
    for op in ops:
        if op[0] == "mutate":
            f = mutation_map(rep.sp, op[1])
            g = rep.to_rep
            rep = Representative(mutate(rep.sp, op[1]), rep.ops + (op,), lambda p, f=f, g=g: f(g(p)), rep.excluded)
        elif op[0] == "trade":
            new_sp, seg = trade(rep.sp, op[1])
            rep = Representative(new_sp, rep.ops + (op,), rep.to_rep, rep.excluded + (seg,))
        elif op[0] == "slide":
            new_sp, seg = slide(rep.sp, op[1], op[2])
            extra = (seg,) if seg else ()
            rep = Representative(new_sp, rep.ops + (op,), rep.to_rep, rep.excluded + extra)
        else:
            raise ValueError(f"unknown surgery {op!r}")
    return rep


# ------------------------------------------------------- rectangle criterion


def _rectangle_in(rep: Representative, i: int) -> Optional[RectangleWitness]:
    sp = rep.sp
    poly = sp.polygon
    node_pos, corner = sp.cut(i)
    if not is_delzant_corner(poly, corner):
        return None
    lo, hi = sorted((node_pos[1], corner[1]))
    others = [j for j in range(len(sp.nodes)) if j != i]
    if any(sp.nodes[j].x == node_pos[0] and lo <= sp.nodes[j].y <= hi for j in others):
        return None
    obstacles = tuple(sp.cut(j) for j in others) + tuple(rep.excluded)
    u_prev, u_next = poly.vertex_directions(corner)
    best = None
    for u1, u2 in ((u_prev, u_next), (u_next, u_prev)):
        T = corner_normalization(u1, u2, corner)
        image = transform_polygon(T, poly)
        a, b = T(node_pos)
        obs = [(T(s[0]), T(s[1])) for s in obstacles]
        width = max_rectangle_width(image, (0, 0), b, obs)
        if width is None or not width > 2 * a:
            continue
        assert rectangle_fits(image, (0, 0), width, b, obs)
        cand = RectangleWitness(i, corner, T, width, b, (a, b), rep.ops, obstacles)
        if best is None or width > best.width:
            best = cand
    return best


def _node_reps(sp: SemitoricPolygon, i: int):
    base = Representative(sp, (), _identity)
    yield base
    try:
        yield replay(sp, (("mutate", i),))
    except ProbekitError:
        return


def ff_displaceable(sp: SemitoricPolygon, i: int) -> Verdict:
    """Rectangle criterion for a multiplicity-one node.

    Both cut directions are tried, since flipping the cut gives another
    representative of the same system.
    """
    node = sp.nodes[i]
    if node.k != 1:
        return Verdict(Status.UNKNOWN, note="multiplicity >= 2: the sphere rule applies instead")
    reasons = []
    for rep in _node_reps(sp, i):
        cert = _rectangle_in(rep, i)
        if cert is not None:
            return Verdict(Status.DISPLACEABLE_BY_RECTANGLE, witness=cert)
        reasons.append(f"epsilon={rep.sp.nodes[i].epsilon}: no admissible rectangle")
    return Verdict(Status.UNKNOWN, note="; ".join(reasons))


# ------------------------------------------------------------ classification


class Classifier:
    """Classifies points of one representative, caching derived representatives.

    Args:
        sp: the input representative.
        facts: external facts.
        bound: probe search bound.
        slides: candidate nodal slides as ``(node index, new y)`` pairs.
    """

    def __init__(self, sp: SemitoricPolygon, facts=(), bound: Optional[int] = None, slides=()):
        self.sp = sp
        self.facts = tuple(facts)
        self.bound = default_bound() if bound is None else bound
        self.slides = tuple(slides)
        self._reps = None
        self._rects = None
        self._node_verdicts = {}
        self._replays = {}

    @property
    def representatives(self) -> list:
        if self._reps is None:
            base = Representative(self.sp, (), _identity)
            reps = [base, trade_all(base)]
            for i in range(len(self.sp.nodes)):
                try:
                    m = replay(self.sp, (("mutate", i),))
                except ProbekitError:
                    continue
                reps += [m, trade_all(m)]
            for i, y in self.slides:
                try:
                    s = replay(self.sp, (("slide", i, q(y)),))
                except ProbekitError:
                    continue
                reps += [s, trade_all(s)]
            self._reps = reps
        return self._reps

    @property
    def rectangles(self) -> list:
        if self._rects is None:
            rects = []
            for i, node in enumerate(self.sp.nodes):
                if node.k != 1:
                    continue
                v = self.node_verdict(i)
                if v.status is Status.DISPLACEABLE_BY_RECTANGLE:
                    rects.append(v.witness)
            self._rects = rects
        return self._rects

    def node_verdict(self, i: int) -> Verdict:
        if i not in self._node_verdicts:
            self._node_verdicts[i] = ff_displaceable(self.sp, i)
        return self._node_verdicts[i]

    def replayed(self, ops) -> Representative:
        if ops not in self._replays:
            self._replays[ops] = replay(self.sp, ops)
        return self._replays[ops]

    def rectangle_cover(self, u) -> Optional[RectangleWitness]:
        for cert in self.rectangles:
            p = self.replayed(cert.representative).to_rep(u)
            if cert.covers(p):
                return cert
        return None

    def fact_verdict(self, u, note="") -> Verdict:
        for f in self.facts:
            if f.asserts_nondisplaceable and f.contains(u):
                return Verdict(Status.NONDISPLACEABLE_BY_FACT, fact=f, note=note)
        for f in self.facts:
            if f.asserts_displaceable and f.contains(u):
                return Verdict(Status.DISPLACEABLE_BY_FACT, witness=f, fact=f, note=note)
        return Verdict(Status.UNKNOWN, note=note)

    def classify(self, u) -> Verdict:
        u = (q(u[0]), q(u[1]))
        poly = self.sp.polygon
        if not poly.contains(u):
            raise OutOfRange(f"{u} is outside the polygon")
        idx = self.sp.node_index(u)
        if idx is not None:
            node = self.sp.nodes[idx]
            if node.k >= 2:
                return Verdict(Status.NONDISPLACEABLE_SPHERE, note=f"node of multiplicity {node.k}")
            v = self.node_verdict(idx)
            if v.status.displaceable:
                return v
            return self.fact_verdict(u, v.note)
        if not poly.interior_contains(u):
            return self.fact_verdict(u, "boundary point")
        on_cut = bool(self.sp.on_cut(u))
        if on_cut:
            cert = self.rectangle_cover(u)
            if cert is not None:
                return Verdict(Status.DISPLACEABLE_BY_RECTANGLE, witness=cert)
        for rep in self.representatives:
            p = rep.to_rep(u)
            if not rep.usable_for(p):
                continue
            probe = _search(rep.sp.polygon, rep.sp.cuts(), p, self.bound, rep.ops)
            if probe is not None:
                return Verdict(Status.DISPLACEABLE_BY_PROBE, witness=probe)
        if not on_cut:
            cert = self.rectangle_cover(u)
            if cert is not None:
                return Verdict(Status.DISPLACEABLE_BY_RECTANGLE, witness=cert)
        return self.fact_verdict(u, f"no certificate with bound {self.bound}")

    # -- exact coverage by explicit regions, used by stem inference

    def axis_certified(self, u) -> bool:
        for rep in self.representatives:
            p = rep.to_rep(u)
            if not rep.usable_for(p):
                continue
            poly = rep.sp.polygon
            cuts = rep.sp.cuts()
            for lam in AXIS_DIRECTIONS:
                span = line_interval(poly, p, lam)
                if span is None or span[0] == -INF:
                    continue
                w = add(p, lam, span[0])
                active = poly.active(w)
                if len(active) != 1 or dot(poly.halfplanes[active[0]].normal, lam) != 1:
                    continue
                length = span[1] - span[0]
                if length != INF and not 2 * (-span[0]) < length:
                    continue
                if any(_open_probe_hits(w, lam, length, c) for c in cuts):
                    continue
                return True
        return False

    def region_certified(self, u) -> bool:
        if any(f.asserts_displaceable and f.contains(u) for f in self.facts):
            return True
        idx = self.sp.node_index(u)
        if idx is not None:
            return self.sp.nodes[idx].k == 1 and self.node_verdict(idx).status.displaceable
        if self.rectangle_cover(u) is not None:
            return True
        return self.axis_certified(u)


def classify(sp: SemitoricPolygon, u, facts=(), bound: Optional[int] = None, slides=()) -> Verdict:
    return Classifier(sp, facts, bound, slides).classify(u)


# ------------------------------------------------------------ arrangement


def _line(a, b, c):
    """Normalize a*x + b*y = c to a canonical hashable triple."""
    a, b, c = Fraction(a), Fraction(b), Fraction(c)
    if a == 0 and b == 0:
        return None
    lead = a if a != 0 else b
    return (a / lead, b / lead, c / lead)


def _pullback(line, op_maps):
    """Lines in original coordinates whose images can be ``line`` under the
    piecewise shears in ``op_maps`` (both branches of each shear)."""
    out = {line}
    for x0, m in op_maps:
        more = set()
        for a, b, c in out:
            more.add(_line(a + b * m, b, c + b * m * x0))
        out |= {l for l in more if l}
    return out


def _rep_shears(sp, ops):
    """(x0, slope) of each mutation shear along ``ops``, for line pullback."""
    shears = []
    cur = sp
    for op in ops:
        if op[0] == "mutate":
            node = cur.nodes[op[1]]
            shears.append((node.x, node.epsilon * node.k))
            cur = mutate(cur, op[1])
        elif op[0] == "trade":
            cur = trade(cur, op[1])[0]
        elif op[0] == "slide":
            cur = slide(cur, op[1], op[2])[0]
    return shears


def _rep_lines(rep: Representative, rects) -> set:
    poly = rep.sp.polygon
    lines = set()
    hs = poly.halfplanes
    for h in hs:
        lines.add(_line(h.normal.x, h.normal.y, h.offset))
    pts = list(poly.vertices) + [n.position for n in rep.sp.nodes]
    for a, b in rep.sp.cuts() + list(rep.excluded):
        pts += [a, b]
    for p in pts:
        lines.add(_line(1, 0, p[0]))
        lines.add(_line(0, 1, p[1]))
    for f in hs:
        for g in hs:
            if f is g:
                continue
            nf, ng = f.normal, g.normal
            if nf.x and ng.x:
                lines.add(_line(2, Fraction(nf.y, nf.x) + Fraction(ng.y, ng.x), f.offset / nf.x + g.offset / ng.x))
            if nf.y and ng.y:
                lines.add(_line(Fraction(nf.x, nf.y) + Fraction(ng.x, ng.y), 2, f.offset / nf.y + g.offset / ng.y))
    for cert in rects:
        if cert.representative != rep.ops:
            continue
        (r0, r1), t = cert.normalization.linear, cert.normalization.translation
        lines.add(_line(r0[0], r0[1], -t[0]))
        lines.add(_line(r1[0], r1[1], -t[1]))
        lines.add(_line(r1[0], r1[1], cert.height - t[1]))
        if cert.width != INF:
            lines.add(_line(r0[0], r0[1], cert.width / 2 - t[0]))
    lines.discard(None)
    return lines


def arrangement_lines(clf: Classifier, extra_points=()) -> set:
    lines = set()
    for rep in clf.representatives:
        shears = _rep_shears(clf.sp, rep.ops)
        for line in _rep_lines(rep, clf.rectangles):
            lines |= _pullback(line, shears)
    for cert in clf.rectangles:
        if not any(r.ops == cert.representative for r in clf.representatives):
            rep = replay(clf.sp, cert.representative)
            shears = _rep_shears(clf.sp, cert.representative)
            for line in _rep_lines(rep, [cert]):
                lines |= _pullback(line, shears)
    for f in clf.facts:
        for region in f.regions:
            for c in region:
                lines.add(_line(c.normal[0], c.normal[1], c.offset))
        for p in f.points:
            lines.add(_line(1, 0, p[0]))
            lines.add(_line(0, 1, p[1]))
        if f.line is not None:
            lines.add(_line(1, 0, f.line))
    for p in extra_points:
        lines.add(_line(1, 0, p[0]))
        lines.add(_line(0, 1, p[1]))
    lines.discard(None)
    return lines


def _column_samples(poly, lines, x):
    try:
        ylo, yhi = slice_interval(poly, x)
    except OutOfRange:
        return []
    ys = {ylo, yhi}
    for a, b, c in lines:
        if b != 0:
            y = (c - a * x) / b
            if ylo < y < yhi:
                ys.add(y)
    ys = sorted(ys)
    out = [y for y in ys if ylo < y < yhi]
    out += [(s + t) / 2 for s, t in zip(ys, ys[1:])]
    return [(x, y) for y in out]


def arrangement_samples(poly: RationalPolygon, lines, x_only=None):
    """One interior point on every face of the line arrangement."""
    if x_only is not None:
        return _column_samples(poly, lines, x_only)
    lo, hi = poly.x_range()
    crit = {lo, hi}
    lst = list(lines)
    for a, b, c in lst:
        if b == 0:
            x = c / a
            if lo <= x <= hi:
                crit.add(x)
    for i in range(len(lst)):
        a1, b1, c1 = lst[i]
        for j in range(i + 1, len(lst)):
            a2, b2, c2 = lst[j]
            det = a1 * b2 - a2 * b1
            if det == 0:
                continue
            x = (c1 * b2 - c2 * b1) / det
            if lo < x < hi:
                crit.add(x)
    xs = sorted(crit)
    columns = [x for x in xs if lo < x < hi] + [(s + t) / 2 for s, t in zip(xs, xs[1:])]
    samples = []
    for x in columns:
        samples += _column_samples(poly, lst, x)
    return samples


def verify_coverage(clf: Classifier, exclude, x_only=None):
    """Check that every interior point other than ``exclude`` lies in an
    explicit displaceable region.  Returns (ok, first uncovered sample)."""
    lines = arrangement_lines(clf, [exclude])
    for p in arrangement_samples(clf.sp.polygon, lines, x_only):
        if p == exclude:
            continue
        if not clf.region_certified(p):
            return False, p
    return True, None


# ------------------------------------------------------------------ scans


@dataclass(frozen=True)
class PointRecord:
    point: tuple
    verdict: Verdict
    is_node: bool = False


@dataclass(frozen=True)
class Report:
    records: tuple
    stem_inference_applied: bool
    resolution: Fraction
    bound: int
    window: Optional[tuple] = None

    @property
    def counts(self) -> dict:
        out = {}
        for r in self.records:
            out[r.verdict.status.value] = out.get(r.verdict.status.value, 0) + 1
        return dict(sorted(out.items()))

    def uncertified(self) -> list:
        return [r.point for r in self.records if not r.verdict.status.displaceable]

    def status_of(self, p):
        for r in self.records:
            if r.point == p:
                return r.verdict.status
        raise KeyError(p)


def grid_points(poly: RationalPolygon, resolution, window=None) -> list:
    """Interior lattice points of step ``resolution``, optionally windowed.

    ``window`` is ``(xmin, xmax)`` or ``(xmin, xmax, ymin, ymax)``.
    """
    res = q(resolution)
    if res <= 0:
        raise ValueError("resolution must be positive")
    lo, hi = poly.x_range()
    ylim = (-INF, INF)
    if window is not None:
        lo, hi = max(lo, q(window[0])), min(hi, q(window[1]))
        if len(window) == 4:
            ylim = (q(window[2]), q(window[3]))
    if lo in (INF, -INF) or hi in (INF, -INF):
        raise NeedsWindow("unbounded polygon needs an x-window")
    pts = []
    x = math.ceil(lo / res) * res
    while x <= hi:
        try:
            ylo, yhi = slice_interval(poly, x)
        except OutOfRange:
            x += res
            continue
        ylo, yhi = max(ylo, ylim[0]), min(yhi, ylim[1])
        if ylo in (INF, -INF) or yhi in (INF, -INF):
            raise NeedsWindow("unbounded slice needs a y-window")
        y = math.ceil(ylo / res) * res
        while y <= yhi:
            p = (Fraction(x), Fraction(y))
            if poly.interior_contains(p):
                pts.append(p)
            y += res
        x += res
    return pts


def _in_window(p, window):
    if window is None:
        return True
    if not q(window[0]) <= p[0] <= q(window[1]):
        return False
    return len(window) < 4 or q(window[2]) <= p[1] <= q(window[3])


def scan(sp, resolution=DEFAULT_RESOLUTION, facts=(), bound: Optional[int] = None, window=None,
         compact: Optional[bool] = None, points=None, slides=()) -> Report:
    """Classify a grid of fibers and apply stem inference.

    ``points`` replaces the grid when given (used to compare a scan with its
    image under an affine map).  ``compact`` defaults to boundedness of the
    polygon; stem inference only runs when it is true.
    """
    if not isinstance(sp, SemitoricPolygon):
        sp = SemitoricPolygon(sp, ())
    poly = sp.polygon
    if not poly.bounded and window is None and points is None:
        raise NeedsWindow("unbounded polygon: supply a window")
    compact = poly.bounded if compact is None else (compact and poly.bounded)
    clf = Classifier(sp, facts, bound, slides)
    pts = list(points) if points is not None else grid_points(poly, resolution, window)
    node_pts = [n.position for n in sp.nodes if _in_window(n.position, window)]
    seen = set(pts)
    records = []
    for p in pts + [n for n in node_pts if n not in seen]:
        records.append(PointRecord(p, clf.classify(p), p in node_pts))

    applied = False
    if compact:
        open_records = [r for r in records if not r.verdict.status.displaceable]
        if len(open_records) == 1 and open_records[0].verdict.status is Status.UNKNOWN:
            cand = open_records[0]
            ok, _ = verify_coverage(clf, cand.point)
            if ok:
                applied = True
                records = [
                    replace(r, verdict=Verdict(Status.NONDISPLACEABLE_STEM,
                                               note="every other fiber lies in a certified region"))
                    if r is cand else r
                    for r in records
                ]
    for f in clf.facts:
        if f.kind != "ExistenceNondisplaceable" or f.line is None:
            continue
        on_line = [r for r in records if r.point[0] == f.line]
        open_records = [r for r in on_line if not r.verdict.status.displaceable]
        if len(open_records) == 1 and open_records[0].verdict.status is Status.UNKNOWN:
            cand = open_records[0]
            ok, _ = verify_coverage(clf, cand.point, x_only=f.line)
            if ok:
                records = [
                    replace(r, verdict=Verdict(Status.NONDISPLACEABLE_BY_FACT, fact=f,
                                               note="only uncertified fiber on a line with a nondisplaceable fiber"))
                    if r is cand else r
                    for r in records
                ]
    return Report(tuple(records), applied, q(resolution), clf.bound, window)
