"""Scenario files: strict YAML documents describing one scenario.

Layout (SI units, unit-suffixed keys)::

    label: linear                      # optional, defaults to the file stem
    material: {name: plastic, mass_kg: 1.0, renewable_fraction: 0.0}
    nodes:
      - {id: 1, role: NonrenewableReservoir, dwell_s: 0}
    arcs:
      - {id: 5, from: 1, to: 2, role: TransportBatch, length_m: 800,
         incline_rad: 0.02, frame_axis: XZ_incline, carrier_mass_kg: 1.0e4,
         propulsion_N: 3000, resist_const_N: 1500, resist_linear_Ns_per_m: 200}
    route: [1, 5, 2]
    sim: {dt_s: 0.001, g: 9.80665, delta_s: 1, horizon_s: unbounded, max_time_s: 1.0e6}
    strategies:                        # groups; at most one option per group
      - [{kind: ReduceRenewable, fraction: 0.5, name: r1}]

Unknown keys are errors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import yaml

from .errors import ParseError, UnknownKey
from .mechanics import DEFAULT_MAX_TIME, STANDARD_GRAVITY, ArcGeometry, FrameAxis, ForceModel
from .network import Compartment, Role, build_network
from .optimize import InsertRepair, ReduceMaterial, ReduceRenewable, Scenario, Strategy
from .simulate import MaterialElement, Route

BUNDLED = ("example1.scn", "example2_renewable.scn", "example2_reduced.scn", "example3.scn")


@dataclass(frozen=True)
class SimSettings:
    dt: float = 1e-3
    g: float = STANDARD_GRAVITY
    delta: float = 1.0
    horizon: float = math.inf
    max_time: float = DEFAULT_MAX_TIME


@dataclass(frozen=True)
class ScenarioFile:
    scenario: Scenario
    sim: SimSettings = field(default_factory=SimSettings)
    menu: tuple[tuple[Strategy, ...], ...] = ()


_TOP = {"label", "material", "nodes", "arcs", "route", "sim", "strategies"}
_MATERIAL = {"name", "mass_kg", "renewable_fraction"}
_NODE = {"id", "role", "dwell_s"}
_ARC = {
    "id", "from", "to", "role", "length_m", "incline_rad", "frame_axis", "elevation_m",
    "carrier_mass_kg", "propulsion_N", "resist_const_N", "resist_linear_Ns_per_m", "flow_kg_per_s",
}
_SIM = {"dt_s", "g", "delta_s", "horizon_s", "max_time_s"}
_STRATEGY = {
    "ReduceRenewable": {"kind", "name", "fraction"},
    "ReduceMaterial": {"kind", "name", "factor"},
    "InsertRepair": {"kind", "name", "repair_node", "inbound_arc", "outbound_arc", "second_use_dwell_s"},
}


class _Reader:
    """Typed field access that reports the YAML line of the offending value."""

    def __init__(self, lines: dict):
        self.lines = lines

    def where(self, path) -> str:
        for n in range(len(path), -1, -1):
            line = self.lines.get(tuple(path[:n]))
            if line is not None:
                return f"line {line + 1}, {'.'.join(map(str, path)) or '<document>'}"
        return ".".join(map(str, path))

    def fail(self, path, msg, cls=ParseError):
        raise cls(f"{self.where(path)}: {msg}")

    def mapping(self, obj, path, allowed, required=()):
        if not isinstance(obj, dict):
            self.fail(path, "expected a mapping")
        for key in obj:
            if key not in allowed:
                self.fail(list(path) + [key], f"unknown key {key!r}", UnknownKey)
        for key in required:
            if key not in obj:
                self.fail(path, f"missing required key {key!r}")
        return obj

    def seq(self, obj, path):
        if not isinstance(obj, list):
            self.fail(path, "expected a list")
        return obj

    def num(self, obj, key, path, default=None):
        if key not in obj:
            if default is None:
                self.fail(path, f"missing required key {key!r}")
            return float(default)
        v = obj[key]
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            self.fail(list(path) + [key], f"expected a number, got {v!r}")
        return float(v)

    def int_(self, obj, key, path):
        if key not in obj:
            self.fail(path, f"missing required key {key!r}")
        v = obj[key]
        if isinstance(v, bool) or not isinstance(v, int):
            self.fail(list(path) + [key], f"expected an integer id, got {v!r}")
        return v

    def enum(self, obj, key, path, cls, default=None):
        v = obj.get(key, default)
        try:
            return cls(v)
        except ValueError:
            choices = ", ".join(m.value for m in cls)
            self.fail(list(path) + [key], f"{v!r} is not one of: {choices}")


def _line_index(node, path=(), out=None) -> dict:
    out = {} if out is None else out
    out[path] = node.start_mark.line
    if isinstance(node, yaml.MappingNode):
        for k, v in node.value:
            _line_index(v, path + (k.value,), out)
            out.setdefault(path + (k.value,), k.start_mark.line)
    elif isinstance(node, yaml.SequenceNode):
        for i, v in enumerate(node.value):
            _line_index(v, path + (i,), out)
    return out


def parse_scenario_file(text: str, default_label: str = "scenario") -> ScenarioFile:
    """Parse and fully validate a scenario document."""
    try:
        doc = yaml.safe_load(text)
        root = yaml.compose(text)
    except yaml.YAMLError as exc:
        raise ParseError(f"malformed document: {exc}") from None
    r = _Reader(_line_index(root) if root is not None else {})
    doc = r.mapping(doc, [], _TOP, required=("material", "nodes", "route"))

    sim = _parse_sim(r, doc.get("sim", {}))

    mat = r.mapping(doc["material"], ["material"], _MATERIAL, required=("name", "mass_kg"))
    try:
        element = MaterialElement(
            mass=r.num(mat, "mass_kg", ["material"]),
            material=str(mat["name"]),
            renewable_fraction=r.num(mat, "renewable_fraction", ["material"], 0.0),
        )
    except ValueError as exc:
        r.fail(["material"], str(exc))

    comps, dwell, flows = [], {}, {}
    for n, node in enumerate(r.seq(doc["nodes"], ["nodes"])):
        path = ["nodes", n]
        r.mapping(node, path, _NODE, required=("id", "role"))
        k = r.int_(node, "id", path)
        comps.append(Compartment.node(k, r.enum(node, "role", path, Role)))
        dwell[k] = r.num(node, "dwell_s", path, 0.0)

    for n, arc in enumerate(r.seq(doc.get("arcs", []), ["arcs"])):
        path = ["arcs", n]
        comp, flow = _parse_arc(r, arc, path, sim.g)
        comps.append(comp)
        if flow is not None:
            flows[comp.id] = flow

    seq = r.seq(doc["route"], ["route"])
    for n, k in enumerate(seq):
        if isinstance(k, bool) or not isinstance(k, int):
            r.fail(["route", n], f"expected a compartment id, got {k!r}")

    network = build_network(comps, element.material)
    scenario = Scenario(
        label=str(doc.get("label", default_label)),
        network=network,
        element=element,
        route=Route(tuple(seq), dwell),
        flows=flows,
    )
    menu = tuple(
        tuple(_parse_strategy(r, opt, ["strategies", g, o]) for o, opt in enumerate(r.seq(group, ["strategies", g])))
        for g, group in enumerate(r.seq(doc.get("strategies", []), ["strategies"]))
    )
    return ScenarioFile(scenario, sim, menu)


def _parse_sim(r: _Reader, sim) -> SimSettings:
    r.mapping(sim, ["sim"], _SIM)
    horizon = sim.get("horizon_s", "unbounded")
    if horizon == "unbounded":
        horizon = math.inf
    else:
        horizon = r.num(sim, "horizon_s", ["sim"])
        if not horizon > 0:
            r.fail(["sim", "horizon_s"], "horizon must be > 0 or 'unbounded'")
    out = SimSettings(
        dt=r.num(sim, "dt_s", ["sim"], 1e-3),
        g=r.num(sim, "g", ["sim"], STANDARD_GRAVITY),
        delta=r.num(sim, "delta_s", ["sim"], 1.0),
        horizon=horizon,
        max_time=r.num(sim, "max_time_s", ["sim"], DEFAULT_MAX_TIME),
    )
    for key, v in (("dt_s", out.dt), ("delta_s", out.delta), ("max_time_s", out.max_time)):
        if not v > 0:
            r.fail(["sim", key], "must be > 0")
    return out


def _parse_arc(r: _Reader, arc, path, g):
    r.mapping(arc, path, _ARC, required=("id", "from", "to"))
    k, i, j = (r.int_(arc, key, path) for key in ("id", "from", "to"))
    role = r.enum(arc, "role", path, Role, Role.TRANSPORT_BATCH.value)
    flow = None
    if "flow_kg_per_s" in arc:
        if role is not Role.TRANSPORT_CONTINUOUS:
            r.fail(path + ["flow_kg_per_s"], "only TransportContinuous arcs carry a flow")
        flow = r.num(arc, "flow_kg_per_s", path)
    geometry = forces = None
    try:
        if "length_m" in arc or role is Role.TRANSPORT_BATCH:
            geometry = ArcGeometry(
                length=r.num(arc, "length_m", path),
                incline=r.num(arc, "incline_rad", path, 0.0),
                elevation=r.num(arc, "elevation_m", path) if "elevation_m" in arc else None,
                frame_axis=r.enum(arc, "frame_axis", path, FrameAxis, FrameAxis.XZ_INCLINE.value),
            )
        if "propulsion_N" in arc or role is Role.TRANSPORT_BATCH:
            forces = ForceModel(
                propulsion=r.num(arc, "propulsion_N", path),
                resist_const=r.num(arc, "resist_const_N", path, 0.0),
                resist_linear=r.num(arc, "resist_linear_Ns_per_m", path, 0.0),
                g=g,
            )
    except ValueError as exc:
        r.fail(path, str(exc))
    comp = Compartment.arc(k, i, j, role, geometry, r.num(arc, "carrier_mass_kg", path, 0.0), forces)
    return comp, flow


def _parse_strategy(r: _Reader, opt, path) -> Strategy:
    if not isinstance(opt, dict) or opt.get("kind") not in _STRATEGY:
        r.fail(path, f"strategy needs kind in {sorted(_STRATEGY)}")
    kind = opt["kind"]
    r.mapping(opt, path, _STRATEGY[kind])
    name = opt.get("name")
    name = None if name is None else str(name)
    if kind == "ReduceRenewable":
        return ReduceRenewable(r.num(opt, "fraction", path), name)
    if kind == "ReduceMaterial":
        return ReduceMaterial(r.num(opt, "factor", path), name)
    return InsertRepair(
        r.int_(opt, "repair_node", path),
        r.int_(opt, "inbound_arc", path),
        r.int_(opt, "outbound_arc", path),
        r.num(opt, "second_use_dwell_s", path),
        name,
    )


def load_scenario_file(path) -> ScenarioFile:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    return parse_scenario_file(text, default_label=path.stem)


def bundled_text(name: str) -> str:
    return resources.files("tmnsim.scenarios").joinpath(name).read_text(encoding="utf-8")


def load_bundled(name: str) -> ScenarioFile:
    return parse_scenario_file(bundled_text(name), default_label=Path(name).stem)


def bundled_path(name: str) -> Path:
    return Path(str(resources.files("tmnsim.scenarios").joinpath(name)))


def to_document(sf: ScenarioFile) -> dict:
    """Canonical plain-data form of a scenario file."""
    sc, sim = sf.scenario, sf.sim
    nodes = [
        {"id": c.id, "role": c.role.value, "dwell_s": float(sc.route.dwell.get(c.id, 0.0))}
        for c in sc.network.nodes
    ]
    arcs = []
    for c in sc.network.arcs:
        a = {"id": c.id, "from": c.origin, "to": c.destination, "role": c.role.value}
        if c.geometry is not None:
            a.update(
                length_m=c.geometry.length,
                incline_rad=c.geometry.incline,
                frame_axis=c.geometry.frame_axis.value,
                elevation_m=c.geometry.elevation,
            )
        a["carrier_mass_kg"] = c.carrier_mass
        if c.force_model is not None:
            a.update(
                propulsion_N=c.force_model.propulsion,
                resist_const_N=c.force_model.resist_const,
                resist_linear_Ns_per_m=c.force_model.resist_linear,
            )
        if c.id in sc.flows:
            a["flow_kg_per_s"] = sc.flows[c.id]
        arcs.append(a)
    return {
        "label": sc.label,
        "material": {
            "name": sc.element.material,
            "mass_kg": sc.element.mass,
            "renewable_fraction": sc.element.renewable_fraction,
        },
        "nodes": nodes,
        "arcs": arcs,
        "route": list(sc.route.sequence),
        "sim": {
            "dt_s": sim.dt,
            "g": sim.g,
            "delta_s": sim.delta,
            "horizon_s": "unbounded" if math.isinf(sim.horizon) else sim.horizon,
            "max_time_s": sim.max_time,
        },
        "strategies": [[_strategy_doc(s) for s in group] for group in sf.menu],
    }


def _strategy_doc(s: Strategy) -> dict:
    if isinstance(s, ReduceRenewable):
        d = {"kind": "ReduceRenewable", "fraction": s.fraction}
    elif isinstance(s, ReduceMaterial):
        d = {"kind": "ReduceMaterial", "factor": s.factor}
    else:
        d = {
            "kind": "InsertRepair",
            "repair_node": s.repair_node,
            "inbound_arc": s.inbound_arc,
            "outbound_arc": s.outbound_arc,
            "second_use_dwell_s": s.second_use_dwell,
        }
    if s.name is not None:
        d["name"] = s.name
    return d


def serialize_scenario_file(sf: ScenarioFile) -> str:
    return yaml.safe_dump(to_document(sf), sort_keys=False, default_flow_style=None, width=100)

