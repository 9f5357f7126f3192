from fractions import Fraction as F

import pytest

from probekit.affine import INF, LatticeVector
from probekit.displace import (
    Classifier,
    Constraint,
    Fact,
    Status,
    classify,
    default_bound,
    ff_displaceable,
    probe_candidates,
    probe_search,
    probe_verdict,
    scan,
)
from probekit.errors import InvalidProbe, NeedsWindow
from probekit.polygon import polygon_from_vertices
from probekit.semitoric import make_semitoric, Node
from probekit.systems import (
    CamParams,
    KeplerParams,
    coupled_angular_momenta,
    kepler,
    octagon_semitoric,
    octagon_toric,
    spin_oscillator,
)


def test_probe_examples():
    oct_ = octagon_toric()
    v = probe_verdict(oct_, (0, F(3, 2)), (1, 0), (F(1, 2), F(3, 2)))
    assert v.status is Status.DISPLACEABLE_BY_PROBE
    assert v.witness.length == 3 and v.witness.exit == (3, F(3, 2))
    v = probe_verdict(oct_, (0, F(3, 2)), (1, 0), (F(3, 2), F(3, 2)))
    assert v.status is Status.UNKNOWN


def test_invalid_probes():
    oct_ = octagon_toric()
    with pytest.raises(InvalidProbe):  # not transverse to the facet x + y = 1
        probe_verdict(oct_, (F(1, 2), F(1, 2)), (1, 2), (1, F(3, 2)))
    with pytest.raises(InvalidProbe):  # start at a vertex
        probe_verdict(oct_, (1, 0), (0, 1), (1, F(1, 2)))
    with pytest.raises(InvalidProbe):  # target off the probe line
        probe_verdict(oct_, (0, F(3, 2)), (1, 0), (1, 1))


def test_infinite_probe():
    # the bare polygon: in the semitoric one this probe would cross the cut
    spin = spin_oscillator(F(1)).semitoric.polygon
    v = probe_verdict(spin, (F(-1, 2), F(1, 2)), (1, 0), (F(5), F(1, 2)))
    assert v.status is Status.DISPLACEABLE_BY_PROBE and v.witness.length == INF


def test_probe_blocked_by_cut():
    sp = octagon_semitoric(F(1))
    v = probe_verdict(sp, (F(1, 2), F(1, 2)), (1, 0), (F(3, 4), F(1, 2)))
    assert v.status is Status.UNKNOWN and "cut" in v.note


def test_probe_search_examples():
    oct_ = octagon_toric()
    assert probe_search(oct_, (F(1, 2), F(3, 2)), 3).status is Status.DISPLACEABLE_BY_PROBE
    assert probe_search(oct_, (F(3, 2), F(3, 2)), 10).status is Status.UNKNOWN
    assert probe_search(oct_, (1, 1), 10).status is Status.UNKNOWN


def test_candidates_pass_through_target():
    oct_ = octagon_toric()
    u = (F(3, 4), F(5, 4))
    cands = probe_candidates(oct_, u, 10)
    assert cands
    for _, _, _, h, lam, w, delta in cands:
        assert h.value(w) == 0 and h.normal.dot(lam) == 1
        assert (w[0] + delta * lam.x, w[1] + delta * lam.y) == u


def test_bound_from_environment(monkeypatch):
    monkeypatch.setenv("PROBEKIT_BOUND", "4")
    assert default_bound() == 4
    monkeypatch.delenv("PROBEKIT_BOUND")
    assert default_bound() == 10


def test_ff_examples():
    spin = spin_oscillator(F(1)).semitoric
    assert ff_displaceable(spin, 0).status is Status.DISPLACEABLE_BY_RECTANGLE
    v = ff_displaceable(kepler(KeplerParams(F(1), h=F(6, 5))).semitoric, 0)
    assert v.status is Status.DISPLACEABLE_BY_RECTANGLE
    assert v.witness.height == F(4, 5) and 2 * v.witness.height < v.witness.width
    assert ff_displaceable(kepler(KeplerParams(F(1), h=F(1))).semitoric, 0).status is Status.UNKNOWN


def test_ff_monotone_under_lengthening():
    # the same corner with the bottom edge and the height stretched step by step
    shapes = [([(0, 0), (2, 0), (2, 1), (1, 2), (0, 1)], 1),
              ([(0, 0), (4, 0), (4, 1), (2, 3), (0, 1)], 2),
              ([(0, 0), (6, 0), (6, 1), (3, 4), (0, 1)], 3)]
    statuses = [ff_displaceable(make_semitoric(polygon_from_vertices(v), [Node((x, F(1, 2)), 1)]), 0).status
                for v, x in shapes]
    assert statuses[0] is Status.UNKNOWN
    flags = [s.displaceable for s in statuses]
    assert flags == sorted(flags) and flags[-1]


def test_rectangle_witness_covers_node():
    sp = kepler(KeplerParams(F(1), h=F(6, 5))).semitoric
    clf = Classifier(sp)
    v = clf.classify(sp.nodes[0].position)
    assert v.status is Status.DISPLACEABLE_BY_RECTANGLE


def test_sphere_rule():
    sp = octagon_semitoric(F(3, 2))
    for n in sp.nodes:
        assert classify(sp, n.position).status is Status.NONDISPLACEABLE_SPHERE


def test_symmetry_fact():
    system = coupled_angular_momenta(CamParams(F(1), F(2), 0.4, F(1, 2)))
    clf = Classifier(system.semitoric, system.facts)
    assert clf.fact_verdict((F(3, 2), 0)).status is Status.DISPLACEABLE_BY_FACT
    assert clf.fact_verdict((1, 0)).status is Status.UNKNOWN


def test_superheavy_fact_applies_after_engine():
    sp = octagon_semitoric(F(1))
    center = (F(3, 2), F(3, 2))
    fact = Fact("SuperheavyPoint", "external quasi-state", points=(center,))
    assert classify(sp, center).status is Status.UNKNOWN
    assert classify(sp, center, [fact]).status is Status.NONDISPLACEABLE_BY_FACT


def test_unknown_fact_kind():
    with pytest.raises(ValueError):
        Fact("Rumour", "", points=((0, 0),))


def test_constraint():
    c = Constraint((1, 0), F(1), strict=True)
    assert c.holds((2, 0)) and not c.holds((1, 0))


def test_scan_unbounded_needs_window():
    with pytest.raises(NeedsWindow):
        scan(spin_oscillator(F(1)).semitoric, F(1, 4))


def test_semitoric_octagon_scan_agrees_with_toric():
    rep = scan(octagon_semitoric(F(1)), F(1, 4))
    # nodes and the center are the only fibers without a certificate
    assert set(rep.uncertified()) == {(1, 1), (1, 2), (2, 1), (2, 2), (F(3, 2), F(3, 2))}
    assert not rep.stem_inference_applied


def test_stem_needs_single_candidate():
    rep = scan(octagon_toric(), F(1, 4))
    assert not rep.stem_inference_applied
    assert all(rep.status_of(p) is Status.UNKNOWN for p in rep.uncertified())


def test_cam_engine_alone_isolates_distinguished_point():
    system = coupled_angular_momenta(CamParams(F(1), F(2), 0.4, F(1, 2)))
    rep = scan(system.semitoric, F(1, 4), compact=True)
    assert rep.uncertified() == [system.meta["distinguished"]]
    assert rep.stem_inference_applied


def test_axis_directions_are_primitive():
    from probekit.displace import AXIS_DIRECTIONS

    assert all(LatticeVector(*d).is_primitive for d in AXIS_DIRECTIONS)
