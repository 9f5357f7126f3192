"""Generators for the example systems, plus the Kepler height numerics."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from scipy.optimize import bisect

from .affine import AffineMap, q, rationalize
from .displace import Constraint, Fact
from .errors import OutOfRange, SolveFailed
from .polygon import HalfPlane, RationalPolygon, polygon_from_halfplanes, polygon_from_vertices
from .semitoric import (
    Combinatorics,
    EllipticSpec,
    Node,
    NodeSpec,
    SemitoricPolygon,
    make_semitoric,
    mutate,
    shear_right,
    solve_representative,
)


@dataclass(frozen=True)
class System:
    """A representative together with facts and bookkeeping.

    Attributes:
        semitoric: the polygon with its nodes.
        facts: external facts shipped with the system.
        compact: whether the underlying manifold is compact.
        meta: provenance of derived numbers (e.g. rationalized heights).
    """

    semitoric: SemitoricPolygon
    facts: tuple = ()
    compact: bool = True
    meta: dict = field(default_factory=dict, compare=False)


# ------------------------------------------------------------------ octagon

OCTAGON_VERTICES = ((1, 0), (2, 0), (3, 1), (3, 2), (2, 3), (1, 3), (0, 2), (0, 1))


@dataclass(frozen=True)
class OctagonParams:
    h: Fraction

    @property
    def merged(self) -> bool:
        return self.h == Fraction(3, 2)


def octagon_toric() -> RationalPolygon:
    return polygon_from_vertices(OCTAGON_VERTICES)


def octagon_combinatorics(h=Fraction(1)) -> Combinatorics:
    """Slope-solver input for the four-node octagon with vertical ends."""
    h = q(h)
    nodes = (
        NodeSpec(Fraction(1), 1, -1, h),
        NodeSpec(Fraction(1), 1, 1, 3 - h),
        NodeSpec(Fraction(2), 1, -1, h),
        NodeSpec(Fraction(2), 1, 1, 3 - h),
    )
    return Combinatorics(
        breakpoints=(Fraction(0), Fraction(1), Fraction(2), Fraction(3)),
        left_width=Fraction(1),
        right_width=Fraction(1),
        left_slope=Fraction(2),
        right_slope=Fraction(-2),
        nodes=nodes,
        anchor=("bottom", Fraction(1)),
        anchored_slope=("bottom", 0, Fraction(-1)),
    )


def octagon_semitoric(params, eps=None) -> SemitoricPolygon:
    """Octagon representative with cut signs ``eps`` (ordered by x, then y).

    For 0 < h < 3/2 there are four simple nodes at heights h and 3 - h on the
    lines x = 1 and x = 2.  At h = 3/2 the two nodes on each line merge into
    one node of multiplicity 2.  A single cut then carries both, so the
    polygon is the octagon sheared on each line by the partner whose sign
    was flipped to match.
    """
    if not isinstance(params, OctagonParams):
        params = OctagonParams(q(params))
    h = params.h
    if not 0 < h <= Fraction(3, 2):
        raise OutOfRange(f"octagon height must lie in (0, 3/2], got {h}")
    poly = octagon_toric()
    if params.merged:
        eps = tuple(eps) if eps is not None else (-1, 1)
        if len(eps) != 2:
            raise ValueError("merged octagon has two nodes")
        nodes = []
        for x, e in zip((Fraction(1), Fraction(2)), eps):
            # the partner cut points the other way; flipping it shears by its k = 1
            poly = shear_right(poly, x, 1 if e < 0 else -1)
            nodes.append((x, e))
        # node positions transported through the first shear
        y1 = Fraction(3, 2)
        y2 = Fraction(3, 2) + (1 if eps[0] < 0 else -1)
        return make_semitoric(poly, [Node((nodes[0][0], y1), eps[0], 2), Node((nodes[1][0], y2), eps[1], 2)])
    sp = make_semitoric(
        poly,
        [Node((1, h), -1), Node((1, 3 - h), 1), Node((2, h), -1), Node((2, 3 - h), 1)],
    )
    sp = SemitoricPolygon(sp.polygon, tuple(Node(n.position, n.epsilon, n.k, n.height) for n in sp.nodes))
    if eps is None:
        return sp
    eps = tuple(eps)
    if len(eps) != 4:
        raise ValueError("octagon with simple nodes has four cut signs")
    for i, e in enumerate(eps):
        if sp.nodes[i].epsilon != e:
            sp = mutate(sp, i)
    return sp


def octagon_system(h=None, eps=None) -> System:
    if h is None:
        return System(SemitoricPolygon(octagon_toric(), ()), (), True, {"name": "octagon"})
    return System(octagon_semitoric(OctagonParams(q(h)), eps), (), True, {"name": "octagon", "h": q(h)})


# ------------------------------------------------------------------ Kepler


def kepler_height(t, boundary: str = "raise") -> float:
    """Normalized height invariant of the Kepler family.

    ``boundary="limit"`` returns the one-sided limits 2 at t = 1/5 and 0 at
    t = 1 with a warning instead of raising.
    """
    t = float(t)
    if t in (0.2, 1.0) and boundary == "limit":
        warnings.warn("kepler_height evaluated at the boundary: returning the limit", stacklevel=2)
        return 2.0 if t == 0.2 else 0.0
    if not 0.2 < t < 1.0:
        raise OutOfRange(f"t = {t} outside (1/5, 1)")
    v = math.atanh((1 - 3 * t) / (2 * t))
    return 2 - (2 / math.pi) * (2 * math.atan(math.exp(-v)) - 1 / math.cosh(v))


def kepler_t0(xtol: float = 1e-15) -> float:
    """Root of kepler_height(t) = 1 on (1/2, 1), by bisection."""
    a, b = 0.5, 1.0 - 1e-12

    def f(t):
        return kepler_height(t) - 1

    if f(a) * f(b) > 0:
        raise SolveFailed("no sign change of the height on (1/2, 1)")
    return bisect(f, a, b, xtol=xtol, maxiter=200)


@dataclass(frozen=True)
class KeplerParams:
    R: Fraction
    t: Optional[float] = None
    h: Optional[Fraction] = None
    precision: float = 1e-9

    def __post_init__(self):
        if q(self.R) <= 0:
            raise OutOfRange("R must be positive")
        if self.h is None:
            if self.t is None:
                raise ValueError("give t or h")
            if not 0.2 < float(self.t) < 1.0:
                raise OutOfRange(f"t = {self.t} outside (1/5, 1)")


def kepler_combinatorics(R, h) -> Combinatorics:
    R, h = q(R), q(h)
    return Combinatorics(
        breakpoints=(-2 * R, Fraction(0), 2 * R),
        left_width=Fraction(0),
        right_width=Fraction(0),
        left_slope=Fraction(1),
        right_slope=Fraction(-1),
        nodes=(NodeSpec(Fraction(0), 1, -1, h),),
        elliptic=(EllipticSpec(Fraction(0), "bottom", (-1, 1)),),
        anchor=("bottom", -h),
        anchored_slope=("top", 0, Fraction(1)),
    )


def kepler_normalizing_map(R, h) -> AffineMap:
    """A composed with the vertical translation by h - 2R; squares the eps=+1 representative."""
    A = AffineMap(((0, -1), (1, -1)))
    return A @ AffineMap.translate(0, q(h) - 2 * q(R))


def kepler(params: KeplerParams, epsilon: int = -1) -> System:
    R = q(params.R)
    meta = {"name": "kepler", "R": R}
    if params.h is not None:
        h = q(params.h)
    else:
        h_float = float(R) * kepler_height(params.t)
        h = rationalize(h_float, params.precision)
        meta.update({"t": params.t, "h_float": h_float, "h_precision": params.precision})
    meta["h"] = h
    if not 0 < h < 2 * R:
        raise OutOfRange(f"height {h} outside (0, 2R)")
    sp = solve_representative(kepler_combinatorics(R, h))
    if epsilon > 0:
        sp = mutate(sp, 0)
    return System(sp, (), True, meta)


# ------------------------------------------------------- coupled angular momenta


@dataclass(frozen=True)
class CamParams:
    R1: Fraction
    R2: Fraction
    t: float
    h1: Optional[Fraction] = None

    def t_bounds(self):
        r1, r2 = float(self.R1), float(self.R2)
        root = 2 * math.sqrt(r1 * r2)
        return r2 / (2 * r2 + r1 + root), r2 / (2 * r2 + r1 - root)


def coupled_angular_momenta(params: CamParams) -> System:
    """Representative with the node at the origin and eps = +1.

    The line x = R2 - R1 carries the distinguished value; the symmetry fact
    covers both open half-planes off that line.
    """
    R1, R2 = q(params.R1), q(params.R2)
    if R1 <= 0 or R2 <= 0:
        raise OutOfRange("radii must be positive")
    if R1 == R2:
        raise ValueError("equal radii: use kepler instead")
    lo, hi = params.t_bounds()
    if not lo < float(params.t) < hi:
        raise OutOfRange(f"t = {params.t} outside ({lo}, {hi})")
    if params.h1 is None:
        raise ValueError("h1 is a caller input for unequal radii")
    h1 = q(params.h1)
    if not 0 < h1 < 2 * R1:
        raise OutOfRange(f"h1 = {h1} outside (0, 2 R1)")
    poly = polygon_from_vertices([(-2 * R1, -h1), (2 * (R2 - R1), -h1), (2 * R2, 2 * R1 - h1), (0, 2 * R1 - h1)])
    sp = make_semitoric(poly, [Node((0, 0), 1, 1)])
    a = R2 - R1
    symmetry = Fact(
        "Symmetry",
        "fibers off the line x = R2 - R1 are displaced by a symmetry of the system",
        regions=((Constraint((1, 0), a, True),), (Constraint((-1, 0), -a, True),)),
    )
    meta = {"name": "cam", "R1": R1, "R2": R2, "t": params.t, "h1": h1, "distinguished": (a, R1 - h1)}
    return System(sp, (symmetry,), True, meta)


# ------------------------------------------------------------ spin-oscillator


def spin_oscillator(rho1, rho2=Fraction(1), lower_slope=Fraction(-1)) -> System:
    """Unbounded representative with the node at the origin and eps = +1.

    Only the upper facets are pinned down; the lower facet through
    (-rho1, 0) has slope ``lower_slope`` (negative), recorded in ``meta``.
    """
    rho1, rho2, m = q(rho1), q(rho2), q(lower_slope)
    if rho1 <= 0 or rho2 <= 0:
        raise OutOfRange("rho1 and rho2 must be positive")
    if m >= 0:
        raise OutOfRange("lower facet slope must be negative")
    hps = [
        HalfPlane.make((1, -1), -rho1),  # y <= x + rho1
        HalfPlane.make((0, -1), -rho1),  # y <= rho1
        # y >= m (x + rho1), scaled to an integral normal
        HalfPlane.make((-m.numerator, m.denominator), m.numerator * rho1),
    ]
    poly = polygon_from_halfplanes(hps)
    sp = make_semitoric(poly, [Node((0, 0), 1, 1)])
    meta = {"name": "spin", "rho1": rho1, "rho2": rho2, "lower_slope": m, "lower_slope_assumed": True}
    return System(sp, (), False, meta)
