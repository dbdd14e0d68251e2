"""Circular-economy strategies and the arg-max search over a scenario set."""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence, Union

from .circularity import DEFAULT_DELTA, UNBOUNDED, CircularityReport, circularity
from .errors import InvalidFraction, RewireConflict, ScenarioFailed, TMNError
from .mechanics import DEFAULT_MAX_TIME
from .network import Compartment, Role, TMNetwork, build_network
from .simulate import MaterialElement, Route, run_journey


@dataclass(frozen=True)
class ReduceRenewable:
    """Source a fraction of the element from renewable material."""

    fraction: float
    name: str | None = None

    def __post_init__(self):
        if not 0.0 <= self.fraction <= 1.0:
            raise InvalidFraction(f"renewable fraction must lie in [0, 1], got {self.fraction}")

    @property
    def tag(self) -> str:
        return self.name or f"reduce_renewable({self.fraction:g})"


@dataclass(frozen=True)
class ReduceMaterial:
    """Scale the element mass by ``factor``."""

    factor: float
    name: str | None = None

    def __post_init__(self):
        if not 0.0 < self.factor <= 1.0:
            raise InvalidFraction(f"material factor must lie in (0, 1], got {self.factor}")

    @property
    def tag(self) -> str:
        return self.name or f"reduce_material({self.factor:g})"


@dataclass(frozen=True)
class InsertRepair:
    """Divert the element through a repair / second-use node before disposal.

    The arc entering the disposal node is replaced by ``inbound_arc``
    (collection node -> repair node) and ``outbound_arc`` (repair node ->
    disposal node).  Arcs missing from the network are created as copies of
    the replaced arc.
    """

    repair_node: int
    inbound_arc: int
    outbound_arc: int
    second_use_dwell: float
    name: str | None = None

    def __post_init__(self):
        if self.second_use_dwell < 0:
            raise ValueError("second_use_dwell must be >= 0")
        ids = {self.repair_node, self.inbound_arc, self.outbound_arc}
        if len(ids) != 3:
            raise RewireConflict(f"repair node and arcs need distinct ids, got {sorted(ids)}")

    @property
    def tag(self) -> str:
        return self.name or f"repair(c{self.repair_node})"


Strategy = Union[ReduceRenewable, ReduceMaterial, InsertRepair]


@dataclass(frozen=True)
class Scenario:
    label: str
    network: TMNetwork
    element: MaterialElement
    route: Route
    flows: Mapping[int, float] = field(default_factory=dict)
    applied: tuple[Strategy, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "flows", dict(self.flows))
        object.__setattr__(self, "applied", tuple(self.applied))
        self.route.check(self.network)


def apply_strategy(base: Scenario, strategy: Strategy) -> Scenario:
    label = f"{base.label}+{strategy.tag}"
    applied = base.applied + (strategy,)
    if isinstance(strategy, ReduceRenewable):
        element = replace(base.element, renewable_fraction=strategy.fraction)
        return replace(base, label=label, element=element, applied=applied)
    if isinstance(strategy, ReduceMaterial):
        element = replace(base.element, mass=base.element.mass * strategy.factor)
        return replace(base, label=label, element=element, applied=applied)
    if isinstance(strategy, InsertRepair):
        return _insert_repair(base, strategy, label, applied)
    raise TypeError(f"unknown strategy {strategy!r}")


def _insert_repair(base: Scenario, rep: InsertRepair, label: str, applied) -> Scenario:
    net, route = base.network, base.route
    seq = list(route.sequence)
    # last arc on the route that delivers into a disposal node
    q = next(
        (p for p in range(len(seq) - 2, 0, -2) if net[seq[p + 1]].role.is_disposal),
        None,
    )
    if q is None:
        raise RewireConflict("route never reaches a disposal node; nothing to repair before")
    old = net[seq[q]]
    collect, sink = old.origin, old.destination
    if rep.repair_node in seq:
        raise RewireConflict(f"c{rep.repair_node} is already on the route")

    comps = {c.id: c for c in net}
    wanted = {
        rep.repair_node: Compartment.node(rep.repair_node, Role.REPAIR_STAGE),
        rep.inbound_arc: replace(old, id=rep.inbound_arc, origin=collect, destination=rep.repair_node),
        rep.outbound_arc: replace(old, id=rep.outbound_arc, origin=rep.repair_node, destination=sink),
    }
    for k, new in wanted.items():
        have = comps.get(k)
        if have is None:
            comps[k] = new
        elif (have.origin, have.destination) != (new.origin, new.destination) or (
            have.is_node and have.role is not Role.REPAIR_STAGE
        ):
            raise RewireConflict(f"existing {have} cannot serve as {new}")
    if seq.count(old.id) == 1:
        del comps[old.id]

    new_seq = seq[:q] + [rep.inbound_arc, rep.repair_node, rep.outbound_arc] + seq[q + 1 :]
    dwell = dict(route.dwell)
    dwell[rep.repair_node] = rep.second_use_dwell
    flows = {k: v for k, v in base.flows.items() if k in comps}
    return Scenario(
        label=label,
        network=build_network(comps.values(), net.material),
        element=base.element,
        route=Route(tuple(new_seq), dwell),
        flows=flows,
        applied=applied,
    )


def enumerate_scenarios(
    base: Scenario, strategy_menu: Sequence[Sequence[Strategy]]
) -> list[Scenario]:
    """All scenarios obtained by picking at most one option from each menu group.

    Groups are applied left to right; the base scenario (every group skipped)
    is always first.  Duplicate labels keep the first occurrence.
    """
    choices = [[None, *group] for group in strategy_menu]
    out: dict[str, Scenario] = {}
    for combo in itertools.product(*choices):
        sc = base
        for strategy in combo:
            if strategy is not None:
                sc = apply_strategy(sc, strategy)
        out.setdefault(sc.label, sc)
    return list(out.values())


def evaluate(
    scenario: Scenario,
    horizon: float = UNBOUNDED,
    delta: float = DEFAULT_DELTA,
    dt: float = 1e-3,
    max_time: float = DEFAULT_MAX_TIME,
) -> CircularityReport:
    try:
        log = run_journey(
            scenario.network, scenario.element, scenario.route, dt,
            max_time=max_time, record_every=1 << 30,
        )
        return circularity(log, scenario.network, scenario.flows, horizon, delta)
    except TMNError as exc:
        raise ScenarioFailed(scenario.label, exc) from exc


def argmax_circularity(
    scenarios: Iterable[Scenario],
    horizon: float = UNBOUNDED,
    delta: float = DEFAULT_DELTA,
    dt: float = 1e-3,
    *,
    max_time: float = DEFAULT_MAX_TIME,
    workers: int = 1,
) -> list[tuple[Scenario, CircularityReport]]:
    """Rank scenarios by circularity, best first; ties go to the smaller label."""
    scenarios = list(scenarios)
    if not scenarios:
        raise ValueError("need at least one scenario")
    labels = [s.label for s in scenarios]
    if len(set(labels)) != len(labels):
        raise ValueError(f"scenario labels must be unique: {labels}")

    def run(sc):
        return evaluate(sc, horizon, delta, dt, max_time)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(run, scenarios))
    else:
        reports = [run(sc) for sc in scenarios]
    ranked = sorted(zip(scenarios, reports), key=lambda p: (-p[1].lambda_, p[0].label))
    return ranked
