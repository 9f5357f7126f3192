from fractions import Fraction as F

import pytest

from probekit.affine import INF, LatticeVector
from probekit.errors import NotInward, OutOfRange
from probekit.polygon import (
    HalfPlane,
    edge_affine_length,
    is_delzant_corner,
    line_interval,
    max_rectangle_width,
    polygon_from_halfplanes,
    polygon_from_vertices,
    ray_exit,
    rectangle_fits,
    slice_interval,
)
from probekit.systems import OCTAGON_VERTICES, octagon_toric, spin_oscillator

SQUARE = [HalfPlane.make((1, 0), 0), HalfPlane.make((0, 1), 0), HalfPlane.make((-1, 0), -1), HalfPlane.make((0, -1), -1)]


def square():
    return polygon_from_halfplanes(SQUARE)


def test_unit_square():
    assert square().vertices == ((0, 0), (1, 0), (1, 1), (0, 1))
    assert square().bounded


def test_octagon_from_facets():
    facets = [HalfPlane.make((0, 1), 0), HalfPlane.make((-1, 1), -2), HalfPlane.make((-1, 0), -3),
              HalfPlane.make((-1, -1), -5), HalfPlane.make((0, -1), -3), HalfPlane.make((1, -1), -2),
              HalfPlane.make((1, 0), 0), HalfPlane.make((1, 1), 1)]
    poly = polygon_from_halfplanes(facets)
    assert set(poly.vertices) == {tuple(map(F, v)) for v in OCTAGON_VERTICES}
    assert poly == octagon_toric()
    assert poly.area() == 7


def test_redundant_and_duplicate_halfplanes_are_dropped():
    poly = polygon_from_halfplanes(SQUARE + [HalfPlane.make((1, 0), -1), HalfPlane.make((1, 1), -5)])
    assert poly == square()


def test_unbounded_wedge():
    poly = polygon_from_halfplanes([HalfPlane.make((1, -1), -1), HalfPlane.make((1, 1), -1)])
    assert poly.vertices == ((-1, 0),)
    assert set(poly.rays) == {LatticeVector(1, 1), LatticeVector(1, -1)}
    assert not poly.bounded


def test_edge_affine_lengths():
    oct_edges = {(e.start, e.end): e for e in octagon_toric().edges()}
    assert edge_affine_length(octagon_toric(), oct_edges[((1, 0), (2, 0))]) == 1
    assert edge_affine_length(octagon_toric(), oct_edges[((2, 0), (3, 1))]) == 1
    spin = spin_oscillator(F(1)).semitoric.polygon
    rays = [e for e in spin.edges() if e.start is None or e.end is None]
    assert rays and all(edge_affine_length(spin, e) == INF for e in rays)


def test_delzant_corners():
    assert is_delzant_corner(square(), (0, 0))
    assert all(is_delzant_corner(octagon_toric(), v) for v in octagon_toric().vertices)
    thin = polygon_from_vertices([(0, 0), (2, 0), (1, 2)])
    assert not is_delzant_corner(thin, (0, 0))


def test_ray_exit_examples():
    assert ray_exit(octagon_toric(), (0, F(3, 2)), (1, 0)) == ((3, F(3, 2)), 3)
    assert ray_exit(octagon_toric(), (F(3, 2), 0), (0, 1)) == ((F(3, 2), 3), 3)
    spin = spin_oscillator(F(1)).semitoric.polygon
    exit_point, length = ray_exit(spin, (F(-1, 2), F(1, 2)), (1, 0))
    assert exit_point is None and length == INF


def test_ray_exit_requires_inward_direction():
    with pytest.raises(NotInward):
        ray_exit(octagon_toric(), (0, F(3, 2)), (-1, 0))


def test_slice_interval_examples():
    assert slice_interval(octagon_toric(), F(3, 2)) == (0, 3)
    assert slice_interval(octagon_toric(), F(1, 2)) == (F(1, 2), F(5, 2))
    assert slice_interval(square(), 0) == (0, 1)
    with pytest.raises(OutOfRange):
        slice_interval(square(), 2)


def test_line_interval_misses():
    assert line_interval(square(), (5, 5), (1, 0)) is None


def test_rectangle_fits_examples():
    assert rectangle_fits(square(), (0, 0), 1, 1)
    assert not rectangle_fits(square(), (0, 0), 2, F(1, 2))
    oct_ = octagon_toric()
    assert rectangle_fits(oct_, (1, 0), 1, F(1, 2), [((2, 0), (2, 1))])
    assert not rectangle_fits(oct_, (1, 0), 1, F(1, 2), [((F(3, 2), 0), (F(3, 2), 1))])


def test_max_rectangle_width():
    assert max_rectangle_width(square(), (0, 0), F(1, 2)) == 1
    oct_ = octagon_toric()
    assert max_rectangle_width(oct_, (1, 0), F(1, 2), [((F(3, 2), 0), (F(3, 2), 1))]) == F(1, 2)
    assert max_rectangle_width(oct_, (1, 0), 1) == 1  # the facet x - y = 2 stops it at y = 0
