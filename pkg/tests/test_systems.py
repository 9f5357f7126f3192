import itertools
import math
import warnings
from fractions import Fraction as F

import pytest

from probekit.affine import AffineMap
from probekit.displace import Status, ff_displaceable, scan
from probekit.errors import OutOfRange
from probekit.polygon import is_delzant_corner
from probekit.semitoric import dh_jump_report, mutate
from probekit.systems import (
    OCTAGON_VERTICES,
    CamParams,
    KeplerParams,
    coupled_angular_momenta,
    kepler,
    kepler_height,
    kepler_normalizing_map,
    kepler_t0,
    octagon_semitoric,
    octagon_toric,
    spin_oscillator,
)


def valid_octagon_signs():
    for eps in itertools.product((-1, 1), repeat=4):
        if (eps[0], eps[1]) != (1, -1) and (eps[2], eps[3]) != (1, -1):
            yield eps


def test_octagon_toric():
    poly = octagon_toric()
    assert set(poly.vertices) == {tuple(map(F, v)) for v in OCTAGON_VERTICES}
    assert poly.area() == 7
    assert all(is_delzant_corner(poly, v) for v in poly.vertices)


@pytest.mark.parametrize("eps", list(valid_octagon_signs()))
def test_octagon_signs_are_mutations_of_canonical(eps):
    sp = octagon_semitoric(F(1), eps)
    assert tuple(n.epsilon for n in sp.nodes) == eps
    assert dh_jump_report(sp).all_match
    back = sp
    for i, e in enumerate(eps):
        if e != (-1, 1, -1, 1)[i]:
            back = mutate(back, i)
    assert back == octagon_semitoric(F(1))


@pytest.mark.parametrize("h", [F(1, 2), F(1), F(5, 4)])
def test_octagon_heights(h):
    sp = octagon_semitoric(h)
    assert [n.position for n in sp.nodes] == [(1, h), (1, 3 - h), (2, h), (2, 3 - h)]
    assert dh_jump_report(sp).all_match


def test_merged_octagon():
    sp = octagon_semitoric(F(3, 2), (-1, 1))
    assert [n.k for n in sp.nodes] == [2, 2]
    assert sp.nodes[0].position == (1, F(3, 2))
    assert dh_jump_report(sp).all_match
    assert sp.polygon.area() == 7


def test_octagon_height_range():
    with pytest.raises(OutOfRange):
        octagon_semitoric(F(2))


def test_kepler_height_closed_form():
    assert abs(kepler_height(0.5) - (2 / 3 + math.sqrt(3) / math.pi)) < 1e-12


def test_kepler_height_decreases_through_one():
    ts = [0.5 + i * 1e-3 for i in range(500)]
    hs = [kepler_height(t) for t in ts]
    assert all(a > b for a, b in zip(hs, hs[1:]))
    assert hs[0] > 1 > hs[-1]


def test_kepler_height_boundary():
    with pytest.raises(OutOfRange):
        kepler_height(1.0)
    with pytest.raises(OutOfRange):
        kepler_height(0.2)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        assert kepler_height(1.0, boundary="limit") == 0.0
        assert kepler_height(0.2, boundary="limit") == 2.0
    assert len(caught) == 2


def test_kepler_t0():
    t0 = kepler_t0()
    assert 0.5 < t0 < 1 and abs(kepler_height(t0) - 1) < 1e-10


def test_kepler_records_rationalization():
    system = kepler(KeplerParams(F(1), t=0.5))
    assert abs(float(system.meta["h"]) - system.meta["h_float"]) <= 1e-9
    assert dh_jump_report(system.semitoric).all_match


def test_kepler_normalizing_map_squares_the_flipped_representative():
    R, h = F(1), F(6, 5)
    sp = kepler(KeplerParams(R, h=h), epsilon=1).semitoric
    T = kepler_normalizing_map(R, h)
    assert T == AffineMap(((0, -1), (1, -1))) @ AffineMap.translate(0, h - 2 * R)
    corner = sp.cut(0)[1]
    assert T(corner) == (0, 0)


def test_kepler_rejects_bad_input():
    with pytest.raises(OutOfRange):
        KeplerParams(F(1), t=0.1)
    with pytest.raises(OutOfRange):
        kepler(KeplerParams(F(1), h=F(3)))


def test_cam():
    params = CamParams(F(1), F(2), 0.5, F(1, 2))
    system = coupled_angular_momenta(params)
    assert system.meta["distinguished"] == (1, F(1, 2))
    assert dh_jump_report(system.semitoric).all_match
    (fact,) = system.facts
    assert fact.contains((F(3, 2), 0)) and fact.contains((F(1, 2), 0)) and not fact.contains((1, 0))


def test_cam_rejects_bad_input():
    lo, hi = CamParams(F(1), F(2), 0.5).t_bounds()
    with pytest.raises(OutOfRange):
        coupled_angular_momenta(CamParams(F(1), F(2), hi + 0.01, F(1, 2)))
    with pytest.raises(ValueError):
        coupled_angular_momenta(CamParams(F(1), F(1), 0.5, F(1, 2)))


def test_spin():
    system = spin_oscillator(F(1))
    sp = system.semitoric
    assert not system.compact and not sp.bounded
    assert (-1, 0) in sp.polygon.vertices
    assert sp.nodes[0].position == (0, 0)
    assert dh_jump_report(sp).all_match


@pytest.mark.parametrize("slope", [F(-1), F(-1, 2), F(-1, 3)])
def test_spin_verdicts_do_not_depend_on_lower_facet(slope):
    system = spin_oscillator(F(1), lower_slope=slope)
    rep = scan(system.semitoric, F(1, 4), window=(F(-1), F(3)), compact=False)
    assert rep.uncertified() == []
    assert ff_displaceable(system.semitoric, 0).status is Status.DISPLACEABLE_BY_RECTANGLE


@pytest.mark.xfail(strict=True, reason="steep lower facets leave points below the node without a certificate")
def test_spin_steep_lower_facet():
    system = spin_oscillator(F(1), lower_slope=F(-2))
    rep = scan(system.semitoric, F(1, 4), window=(F(-1), F(3)), compact=False)
    assert rep.uncertified() == []
