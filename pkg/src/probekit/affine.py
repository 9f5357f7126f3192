"""Exact rationals, lattice vectors and the integral affine group Aff(2, Z).

Points are plain ``(Fraction, Fraction)`` tuples so they hash and compare
structurally.  Nothing here touches floating point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Union

from .errors import DegenerateDirection, NotDelzant, NotPrimitive

Rational = Fraction
Point = tuple  # (Fraction, Fraction)
INF = math.inf

Number = Union[int, Fraction, str]


def q(value: Number) -> Fraction:
    """Coerce an int, Fraction or ``"p/q"`` string to a Fraction.

    Floats are refused: silently rounding them would defeat exact arithmetic.
    """
    if isinstance(value, bool) or isinstance(value, float):
        raise TypeError(f"refusing inexact value {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if any(ch in text for ch in ".eE"):
            raise ValueError(f"not an exact rational: {value!r}")
        return Fraction(text)
    raise TypeError(f"cannot interpret {value!r} as a rational")


def pt(x: Number, y: Number) -> Point:
    return (q(x), q(y))


def fmt(value) -> str:
    """Canonical text form of a rational (``"3"``, ``"-1/2"``) or ``"inf"``."""
    if value == INF:
        return "inf"
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


class LatticeVector(NamedTuple):
    x: int
    y: int

    def dot(self, other) -> Fraction | int:
        return self.x * other[0] + self.y * other[1]

    def __neg__(self):
        return LatticeVector(-self.x, -self.y)

    @property
    def is_primitive(self) -> bool:
        return (self.x, self.y) != (0, 0) and math.gcd(self.x, self.y) == 1


def dot(u, v):
    return u[0] * v[0] + u[1] * v[1]


def cross(u, v):
    return u[0] * v[1] - u[1] * v[0]


def add(p, v, t=1):
    return (p[0] + t * v[0], p[1] + t * v[1])


def sub(p, r):
    return (p[0] - r[0], p[1] - r[1])


def primitive_vector(v) -> LatticeVector:
    """Shortest lattice vector with the orientation of the integer vector ``v``."""
    x, y = int(v[0]), int(v[1])
    if x == 0 and y == 0:
        raise DegenerateDirection("zero vector has no direction")
    g = math.gcd(x, y)
    return LatticeVector(x // g, y // g)


def direction_of(v) -> LatticeVector:
    """Primitive lattice direction of a vector with rational coordinates."""
    a, b = Fraction(v[0]), Fraction(v[1])
    if a == 0 and b == 0:
        raise DegenerateDirection("zero vector has no direction")
    den = math.lcm(a.denominator, b.denominator)
    return primitive_vector((int(a * den), int(b * den)))


def _require_primitive(v):
    if not LatticeVector(int(v[0]), int(v[1])).is_primitive:
        raise NotPrimitive(f"{tuple(v)} is not primitive")


def integrally_transverse(lam, eta) -> bool:
    _require_primitive(lam)
    _require_primitive(eta)
    return abs(dot(lam, eta)) == 1


def affine_distance(x: Point, y: Point) -> Fraction:
    """Lattice length of the segment from ``x`` to ``y``.

    Zero for coincident points.  Symmetric, and invariant under Aff(2, Z).
    """
    d = sub(y, x)
    if d[0] == 0 and d[1] == 0:
        return Fraction(0)
    v = direction_of(d)
    return Fraction(d[0] / v.x) if v.x else Fraction(d[1] / v.y)


def lattice_multiple(d, v) -> Fraction | None:
    """Return t with d = t*v when d is parallel to v, else None."""
    if cross(d, v) != 0:
        return None
    return Fraction(d[0], 1) / v[0] if v[0] else Fraction(d[1], 1) / v[1]


@dataclass(frozen=True)
class AffineMap:
    """x -> linear @ x + translation with linear in GL(2, Z)."""

    linear: tuple
    translation: Point = (Fraction(0), Fraction(0))

    def __post_init__(self):
        (a, b), (c, d) = self.linear
        lin = ((int(a), int(b)), (int(c), int(d)))
        if abs(lin[0][0] * lin[1][1] - lin[0][1] * lin[1][0]) != 1:
            raise ValueError(f"linear part {lin} is not unimodular")
        object.__setattr__(self, "linear", lin)
        object.__setattr__(self, "translation", (q(self.translation[0]), q(self.translation[1])))

    @classmethod
    def identity(cls) -> "AffineMap":
        return cls(((1, 0), (0, 1)))

    @classmethod
    def shear(cls, k: int) -> "AffineMap":
        """The matrix T^k = [[1, 0], [k, 1]]."""
        return cls(((1, 0), (k, 1)))

    @classmethod
    def translate(cls, dx, dy) -> "AffineMap":
        return cls(((1, 0), (0, 1)), (dx, dy))

    @property
    def det(self) -> int:
        (a, b), (c, d) = self.linear
        return a * d - b * c

    def apply_linear(self, v):
        (a, b), (c, d) = self.linear
        return (a * v[0] + b * v[1], c * v[0] + d * v[1])

    def __call__(self, p: Point) -> Point:
        x, y = self.apply_linear(p)
        return (x + self.translation[0], y + self.translation[1])

    def __matmul__(self, other: "AffineMap") -> "AffineMap":
        """Composition: (self @ other)(p) == self(other(p))."""
        (a, b), (c, d) = self.linear
        (e, f), (g, h) = other.linear
        lin = ((a * e + b * g, a * f + b * h), (c * e + d * g, c * f + d * h))
        return AffineMap(lin, self(other.translation))

    def inverse(self) -> "AffineMap":
        (a, b), (c, d) = self.linear
        det = self.det
        inv = ((d * det, -b * det), (-c * det, a * det))
        tx, ty = self.translation
        m = AffineMap(inv)
        ix, iy = m.apply_linear((tx, ty))
        return AffineMap(inv, (-ix, -iy))

    def dual_linear(self, n):
        """Image of a covector under the inverse transpose, keeping <n, v> fixed."""
        (a, b), (c, d) = self.inverse().linear
        return (a * n[0] + c * n[1], b * n[0] + d * n[1])

    def preserves_verticals(self) -> bool:
        """True for maps of the form translation composed with T^k."""
        (a, b), (_, d) = self.linear
        return a == 1 and b == 0 and d == 1


def affine_apply(T: AffineMap, obj):
    """Apply ``T`` to a point, a segment (pair of points) or a polygon."""
    from .polygon import RationalPolygon, transform_polygon

    if isinstance(obj, RationalPolygon):
        return transform_polygon(T, obj)
    if len(obj) == 2 and isinstance(obj[0], tuple):
        return (T(obj[0]), T(obj[1]))
    return T(obj)


def corner_normalization(u1, u2, apex: Point) -> AffineMap:
    """Integral affine map sending ``apex`` to the origin, u1 to e1 and u2 to e2."""
    det = u1[0] * u2[1] - u2[0] * u1[1]
    if abs(det) != 1:
        raise NotDelzant(f"edge vectors {tuple(u1)}, {tuple(u2)} have determinant {det}")
    # inverse of the column matrix [u1 u2]
    lin = ((u2[1] * det, -u2[0] * det), (-u1[1] * det, u1[0] * det))
    m = AffineMap(lin)
    ax, ay = m.apply_linear(apex)
    return AffineMap(lin, (-ax, -ay))


def rationalize(value: float, precision: float = 1e-9) -> Fraction:
    """Smallest-denominator continued-fraction convergent within ``precision``."""
    target = Fraction(value)
    bound = 1
    while True:
        approx = target.limit_denominator(bound)
        if abs(approx - target) <= precision:
            return approx
        bound *= 2
