"""JSON polygon specs and scan reports.

Rationals travel as ``"p/q"`` strings.  A JSON float anywhere outside the
``meta`` block is a parse error.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .affine import AffineMap, LatticeVector, fmt, q
from .displace import Constraint, Fact, Probe, RectangleWitness, Report, Status, Verdict
from .errors import ProbekitError, SpecError
from .polygon import HalfPlane, polygon_from_halfplanes
from .semitoric import Combinatorics, EllipticSpec, Node, NodeSpec, make_semitoric
from .systems import System

SPEC_VERSION = 1


class _JsonFloat(float):
    """Marks numbers that arrived as JSON floats."""


def _loads(text: str):
    try:
        return json.loads(text, parse_float=_JsonFloat)
    except json.JSONDecodeError as exc:
        raise SpecError(f"invalid JSON: {exc}") from exc


def _read(path) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise SpecError(f"cannot read {path}: {exc}") from exc


def _reject_floats(obj, path="$"):
    if isinstance(obj, float):
        raise SpecError(f"{path}: floats are not allowed, use a 'p/q' string")
    if isinstance(obj, dict):
        for k, v in obj.items():
            if k != "meta":
                _reject_floats(v, f"{path}.{k}")
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            _reject_floats(v, f"{path}[{i}]")


def _rat(value, what) -> Fraction:
    if isinstance(value, bool) or not isinstance(value, (str, int)):
        raise SpecError(f"{what}: expected a rational string, got {value!r}")
    try:
        return q(value)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise SpecError(f"{what}: {exc}") from exc


def _int(value, what) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise SpecError(f"{what}: expected an integer, got {value!r}")
    return value


def _pair(value, what, conv=_rat):
    if not isinstance(value, list) or len(value) != 2:
        raise SpecError(f"{what}: expected a pair")
    return (conv(value[0], what), conv(value[1], what))


def _field(obj, key, what):
    if not isinstance(obj, dict) or key not in obj:
        raise SpecError(f"{what}: missing field {key!r}")
    return obj[key]


def point_json(p):
    return [fmt(p[0]), fmt(p[1])]


def _meta_json(value):
    if isinstance(value, Fraction):
        return fmt(value)
    if isinstance(value, tuple):
        return [_meta_json(v) for v in value]
    if isinstance(value, dict):
        return {k: _meta_json(v) for k, v in value.items()}
    return value


# ------------------------------------------------------------------ facts


def fact_to_json(f: Fact) -> dict:
    payload = {}
    if f.points:
        payload["points"] = [point_json(p) for p in f.points]
    if f.regions:
        payload["regions"] = [
            [{"normal": [int(c.normal[0]), int(c.normal[1])], "offset": fmt(c.offset), "strict": c.strict}
             for c in region]
            for region in f.regions
        ]
    if f.line is not None:
        payload["line"] = fmt(f.line)
    return {"kind": f.kind, "payload": payload, "citation": f.citation}


def fact_from_json(obj) -> Fact:
    kind = _field(obj, "kind", "fact")
    payload = obj.get("payload", {})
    if not isinstance(payload, dict):
        raise SpecError("fact payload must be an object")
    points = tuple(_pair(p, "fact point") for p in payload.get("points", []))
    regions = tuple(
        tuple(
            Constraint(_pair(_field(c, "normal", "constraint"), "constraint normal", _int),
                       _rat(_field(c, "offset", "constraint"), "constraint offset"),
                       bool(c.get("strict", False)))
            for c in region
        )
        for region in payload.get("regions", [])
    )
    line = payload.get("line")
    try:
        return Fact(kind, str(obj.get("citation", "")), points, regions,
                    None if line is None else _rat(line, "fact line"))
    except ValueError as exc:
        raise SpecError(str(exc)) from exc


# ------------------------------------------------------------------ specs


def system_to_json(system: System) -> dict:
    sp = system.semitoric
    poly = sp.polygon
    polygon = {
        "halfplanes": [{"normal": [h.normal.x, h.normal.y], "offset": fmt(h.offset)} for h in poly.halfplanes]
    }
    if poly.rays:
        polygon["rays"] = [[r[0], r[1]] for r in poly.rays]
    out = {
        "version": SPEC_VERSION,
        "polygon": polygon,
        "nodes": [{"position": point_json(n.position), "epsilon": n.epsilon, "k": n.k} for n in sp.nodes],
        "facts": [fact_to_json(f) for f in system.facts],
        "compact": system.compact,
    }
    if system.meta:
        out["meta"] = _meta_json(system.meta)
    return out


def system_from_json(obj) -> System:
    _reject_floats(obj)
    version = _int(_field(obj, "version", "spec"), "version")
    if version != SPEC_VERSION:
        raise SpecError(f"unsupported spec version {version}")
    pobj = _field(obj, "polygon", "spec")
    hps = []
    for i, h in enumerate(_field(pobj, "halfplanes", "polygon")):
        normal = _pair(_field(h, "normal", f"halfplane {i}"), f"halfplane {i} normal", _int)
        offset = _rat(_field(h, "offset", f"halfplane {i}"), f"halfplane {i} offset")
        try:
            hps.append(HalfPlane.make(normal, offset))
        except ProbekitError as exc:
            raise SpecError(f"halfplane {i}: {exc}") from exc
    nodes = []
    for i, n in enumerate(obj.get("nodes", [])):
        eps = _int(_field(n, "epsilon", f"node {i}"), f"node {i} epsilon")
        if eps not in (1, -1):
            raise SpecError(f"node {i}: epsilon must be 1 or -1")
        k = _int(n.get("k", 1), f"node {i} k")
        if k < 1:
            raise SpecError(f"node {i}: k must be positive")
        nodes.append(Node(_pair(_field(n, "position", f"node {i}"), f"node {i} position"), eps, k))
    try:
        poly = polygon_from_halfplanes(hps)
        sp = make_semitoric(poly, nodes)
    except ProbekitError as exc:
        raise SpecError(f"invalid polygon: {exc}") from exc
    if "rays" in pobj:
        rays = tuple(LatticeVector(*_pair(r, "ray", _int)) for r in pobj["rays"])
        if rays != tuple(poly.rays):
            raise SpecError(f"declared rays {rays} disagree with the half-planes {poly.rays}")
    facts = tuple(fact_from_json(f) for f in obj.get("facts", []))
    compact = obj.get("compact", poly.bounded)
    if not isinstance(compact, bool):
        raise SpecError("compact must be a boolean")
    return System(sp, facts, compact, dict(obj.get("meta", {})))


def dumps(obj) -> str:
    """Canonical text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def emit_spec(system: System) -> str:
    return dumps(system_to_json(system))


def parse_spec(text: str) -> System:
    return system_from_json(_loads(text))


def load_spec(path) -> System:
    text = _read(path)
    return parse_spec(text)


# ---------------------------------------------------------------- reports


def _map_json(T: AffineMap):
    return {"linear": [list(r) for r in T.linear], "translation": point_json(T.translation)}


def witness_to_json(verdict: Verdict):
    w = verdict.witness
    if isinstance(w, Probe):
        return {
            "type": "probe",
            "start": point_json(w.start),
            "direction": [w.direction[0], w.direction[1]],
            "facet": {"normal": [w.facet.normal.x, w.facet.normal.y], "offset": fmt(w.facet.offset)},
            "exit": None if w.exit is None else point_json(w.exit),
            "length": fmt(w.length),
            "representative": _ops_json(w.representative),
        }
    if isinstance(w, RectangleWitness):
        return {
            "type": "rectangle",
            "node": w.node,
            "corner": point_json(w.corner),
            "normalization": _map_json(w.normalization),
            "width": fmt(w.width),
            "height": fmt(w.height),
            "node_image": point_json(w.node_image),
            "representative": _ops_json(w.representative),
            "obstacles": [[point_json(a), point_json(b)] for a, b in w.obstacles],
        }
    if verdict.fact is not None and verdict.status.displaceable:
        return {"type": "fact", "kind": verdict.fact.kind, "citation": verdict.fact.citation}
    return None


def _ops_json(ops):
    return [[op[0]] + [fmt(a) if isinstance(a, Fraction) else a for a in op[1:]] for op in ops]


def report_to_json(report: Report, system: System) -> dict:
    records = []
    for r in report.records:
        rec = {"point": point_json(r.point), "status": r.verdict.status.value}
        if r.is_node:
            rec["node"] = True
        if r.verdict.status.displaceable:
            rec["witness"] = witness_to_json(r.verdict)
        if r.verdict.fact is not None:
            rec["fact"] = fact_to_json(r.verdict.fact)
        if r.verdict.note:
            rec["note"] = r.verdict.note
        records.append(rec)
    return {
        "version": SPEC_VERSION,
        "spec": system_to_json(system),
        "resolution": fmt(report.resolution),
        "bound": report.bound,
        "window": None if report.window is None else [fmt(v) for v in report.window],
        "records": records,
        "summary": {
            "counts": dict(sorted(report.counts.items())),
            "stem_inference_applied": report.stem_inference_applied,
        },
    }


def emit_report(report: Report, system: System) -> str:
    return dumps(report_to_json(report, system))


def parse_report(text: str):
    """Return (system, [(point, Status)]) from a report file's text."""
    obj = _loads(text)
    system = system_from_json(_field(obj, "spec", "report"))
    marks = []
    for i, rec in enumerate(_field(obj, "records", "report")):
        p = _pair(_field(rec, "point", f"record {i}"), f"record {i} point")
        try:
            status = Status(_field(rec, "status", f"record {i}"))
        except ValueError as exc:
            raise SpecError(f"record {i}: {exc}") from exc
        marks.append((p, status))
    return system, marks


def is_report(obj) -> bool:
    return isinstance(obj, dict) and "records" in obj and "spec" in obj


def load_any(path):
    """Load a spec or a report; returns (system, marks or None)."""
    text = _read(path)
    obj = _loads(text)
    if is_report(obj):
        return parse_report(text)
    return system_from_json(obj), None


# ----------------------------------------------------------- solver input


def combinatorics_from_json(obj) -> Combinatorics:
    """Read the solver input; every number is a rational string or an int."""
    _reject_floats(obj)

    def r(v, what):
        return _rat(v, what)

    try:
        nodes = tuple(NodeSpec(r(n["x"], "node x"), int(n.get("k", 1)), int(n["epsilon"]), r(n["height"], "height"))
                      for n in obj.get("nodes", []))
        elliptic = tuple(EllipticSpec(r(e["x"], "elliptic x"), e["side"], tuple(int(w) for w in e["weights"]))
                         for e in obj.get("elliptic", []))
        anchor = obj["anchor"]
        slope = obj["anchored_slope"]
        return Combinatorics(
            breakpoints=tuple(r(b, "breakpoint") for b in obj["breakpoints"]),
            left_width=r(obj["left_width"], "left_width"),
            right_width=r(obj["right_width"], "right_width"),
            left_slope=r(obj["left_slope"], "left_slope"),
            right_slope=r(obj["right_slope"], "right_slope"),
            nodes=nodes,
            elliptic=elliptic,
            anchor=(anchor["side"], r(anchor["y"], "anchor y")),
            anchored_slope=(slope["side"], int(slope["index"]), r(slope["value"], "anchored slope")),
        )
    except (KeyError, TypeError) as exc:
        raise SpecError(f"malformed combinatorics: missing or bad field {exc}") from exc


def load_combinatorics(path) -> Combinatorics:
    text = _read(path)
    return combinatorics_from_json(_loads(text))
