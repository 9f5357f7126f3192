import random
from fractions import Fraction as F

import pytest

from generators import random_semitoric
from probekit.affine import AffineMap
from probekit.errors import (
    CrossingCuts,
    CutCornerMissing,
    InvalidSlide,
    MutationBreaksConvexity,
    NodeOnBoundary,
    TradeBlocked,
)
from probekit.polygon import HalfPlane, polygon_from_vertices
from probekit.semitoric import (
    Combinatorics,
    Node,
    SemitoricPolygon,
    dh_jump_report,
    make_semitoric,
    mutate,
    slide,
    solve_representative,
    trade,
    transform_semitoric,
)
from probekit.systems import KeplerParams, kepler, octagon_semitoric, octagon_toric, spin_oscillator

UNIT_SQUARE = polygon_from_vertices([(0, 0), (1, 0), (1, 1), (0, 1)])


def test_octagon_nodes_and_cut_corners():
    sp = octagon_semitoric(F(1))
    assert [n.position for n in sp.nodes] == [(1, 1), (1, 2), (2, 1), (2, 2)]
    assert [c[1] for c in sp.cuts()] == [(1, 0), (1, 3), (2, 0), (2, 3)]
    assert [n.height for n in sp.nodes] == [1, 2, 1, 2]


def test_cut_must_end_at_a_vertex():
    with pytest.raises(CutCornerMissing):
        make_semitoric(UNIT_SQUARE, [Node((F(1, 2), F(1, 2)), -1)])


def test_node_must_be_interior():
    with pytest.raises(NodeOnBoundary):
        make_semitoric(octagon_toric(), [Node((1, 0), -1)])


def test_opposing_cuts_on_one_line_are_rejected():
    with pytest.raises(CrossingCuts):
        make_semitoric(octagon_toric(), [Node((1, 1), 1), Node((1, 2), -1)])


def test_spin_node_is_valid():
    sp = spin_oscillator(F(1)).semitoric
    assert sp.nodes[0].position == (0, 0) and sp.nodes[0].epsilon == 1
    assert sp.cut(0) == ((0, 0), (0, 1))


def test_mutation_to_all_upward_cuts():
    sp = mutate(mutate(octagon_semitoric(F(1)), 0), 2)
    assert sp == octagon_semitoric(F(1), (1, 1, 1, 1))
    assert set(sp.polygon.vertices) == {(0, 1), (3, -2), (3, -1), (2, 2), (1, 3), (0, 2)}
    assert sp.polygon.area() == 7
    assert dh_jump_report(sp).all_match


def test_mutation_is_an_involution():
    sp = octagon_semitoric(F(1))
    for i in range(4):
        assert mutate(mutate(sp, i), i) == sp


def test_mutation_can_break_convexity():
    # the top corner bends by 1 but the node has k = 2, so the flip overshoots
    poly = polygon_from_vertices([(0, 0), (3, 0), (3, 1), (2, 2), (0, 2)])
    sp = make_semitoric(poly, [Node((2, 1), 1, 2)])
    with pytest.raises(MutationBreaksConvexity):
        mutate(sp, 0)


def test_slide_examples():
    sp = octagon_semitoric(F(1))
    same, seg = slide(sp, 0, 1)
    assert same == sp and seg is None
    moved, seg = slide(sp, 0, F(1, 2))
    assert moved.polygon == sp.polygon
    assert moved.nodes[0].position == (1, F(1, 2))
    assert seg == ((1, F(1, 2)), (1, 1))
    with pytest.raises(InvalidSlide):
        slide(sp, 0, 3)
    with pytest.raises(InvalidSlide):
        slide(sp, 0, F(5, 2))


def test_trade_examples():
    sp = octagon_semitoric(F(1))
    traded, excluded = trade(sp, 0)
    assert excluded == ((1, 1), (1, 0))
    assert len(traded.nodes) == 3 and traded.polygon == sp.polygon
    spin = spin_oscillator(F(1)).semitoric
    traded, excluded = trade(spin, 0)
    assert traded.nodes == () and excluded == ((0, 0), (0, 1))


def test_trade_blocked_at_non_delzant_corner():
    poly = polygon_from_vertices([(0, 0), (4, 0), (2, 2)])
    sp = make_semitoric(poly, [Node((2, 1), 1)])
    with pytest.raises(TradeBlocked):
        trade(sp, 0)


def test_vertical_maps_transport_nodes():
    sp = octagon_semitoric(F(1))
    T = AffineMap(((1, 0), (1, 1)), (F(1, 2), 2))
    image = transform_semitoric(T, sp)
    assert [n.position for n in image.nodes] == [T(n.position) for n in sp.nodes]
    assert dh_jump_report(image).all_match
    with pytest.raises(ValueError):
        transform_semitoric(AffineMap(((0, -1), (1, 0))), sp)


def test_dh_report_octagon_entries():
    rep = dh_jump_report(octagon_semitoric(F(1)))
    by_x = {e.x: e for e in rep.entries}
    assert (by_x[1].left_slope, by_x[1].right_slope, by_x[1].jump, by_x[1].predicted) == (2, 0, -2, -2)
    assert (by_x[2].left_slope, by_x[2].right_slope, by_x[2].jump) == (0, -2, -2)


def test_dh_report_square_is_empty():
    assert dh_jump_report(SemitoricPolygon(UNIT_SQUARE, ())).entries == ()


def test_dh_detects_a_wrong_multiplicity():
    poly = octagon_semitoric(F(1)).polygon
    sp = make_semitoric(poly, [Node((1, 1), -1, 2), Node((2, 1), -1), Node((2, 2), 1)])
    assert not dh_jump_report(sp).all_match


def test_mutation_preserves_dh_consistency():
    rng = random.Random(11)
    checked = 0
    while checked < 40:
        sp = random_semitoric(rng, require_dh=False)
        if not dh_jump_report(sp).all_match:
            continue
        for i in range(len(sp.nodes)):
            assert dh_jump_report(mutate(sp, i)).all_match
        checked += 1


def test_solver_square():
    comb = Combinatorics(breakpoints=(F(0), F(1)), left_width=F(1), right_width=F(1), left_slope=F(0),
                         right_slope=F(0), anchor=("bottom", F(0)), anchored_slope=("bottom", 0, F(0)))
    assert solve_representative(comb).polygon == UNIT_SQUARE


def test_solver_kepler_facets():
    R, h = F(1), F(6, 5)
    poly = kepler(KeplerParams(R, h=h)).semitoric.polygon
    assert HalfPlane.make((1, -1), -(2 * R - h)) in poly.halfplanes  # y = x + (2R - h)
    assert HalfPlane.make((-2, 1), -h) in poly.halfplanes  # y = 2x - h
    assert set(poly.vertices) == {(-2, F(-6, 5)), (0, F(-6, 5)), (2, F(14, 5))}


def test_kepler_mutation():
    sp = kepler(KeplerParams(F(1), h=F(6, 5)), epsilon=1).semitoric
    assert set(sp.polygon.vertices) == {(-2, F(-6, 5)), (0, F(-6, 5)), (2, F(4, 5)), (0, F(4, 5))}
    assert sp.nodes[0].epsilon == 1
