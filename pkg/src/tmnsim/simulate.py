"""Material journeys: arc segments and node dwells chained along a route."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Mapping

from .errors import MissingMilestone, RouteMismatch, UnknownCompartment
from .mechanics import DEFAULT_MAX_TIME, SegmentState, Trajectory, integrate_segment
from .network import Role, TMNetwork


@dataclass(frozen=True)
class MaterialElement:
    mass: float
    material: str = "beta"
    renewable_fraction: float = 0.0

    def __post_init__(self):
        if not self.mass > 0:
            raise ValueError(f"element mass must be > 0, got {self.mass}")
        if not 0.0 <= self.renewable_fraction <= 1.0:
            raise ValueError(f"renewable fraction must lie in [0, 1], got {self.renewable_fraction}")

    @property
    def nonrenewable_mass(self) -> float:
        return (1.0 - self.renewable_fraction) * self.mass


@dataclass(frozen=True)
class Route:
    """Alternating node, arc, node, ... id sequence with per-node dwell times."""

    sequence: tuple[int, ...]
    dwell: Mapping[int, float] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "sequence", tuple(self.sequence))
        object.__setattr__(self, "dwell", dict(self.dwell))
        if not self.sequence or len(self.sequence) % 2 == 0:
            raise RouteMismatch(f"route must alternate node/arc and end on a node: {self.sequence}")
        for k, d in self.dwell.items():
            if d < 0:
                raise RouteMismatch(f"dwell at node {k} is negative ({d})")

    @property
    def node_ids(self) -> tuple[int, ...]:
        return self.sequence[::2]

    @property
    def arc_ids(self) -> tuple[int, ...]:
        return self.sequence[1::2]

    def triples(self):
        seq = self.sequence
        for q in range(1, len(seq), 2):
            yield seq[q - 1], seq[q], seq[q + 1]

    def check(self, net: TMNetwork) -> None:
        """Raise :class:`RouteMismatch` unless the route is consistent with ``net``."""
        try:
            for k in self.sequence:
                net[k]
        except UnknownCompartment as exc:
            raise RouteMismatch(str(exc)) from None
        for k in self.node_ids:
            if not net[k].is_node:
                raise RouteMismatch(f"route position of c{k} expects a node")
        for left, k, right in self.triples():
            arc = net[k]
            if not arc.is_arc:
                raise RouteMismatch(f"route position of c{k} expects an arc")
            if (arc.origin, arc.destination) != (left, right):
                raise RouteMismatch(
                    f"arc c{k} runs {arc.origin}->{arc.destination}, route needs {left}->{right}"
                )
            if arc.role is not Role.TRANSPORT_BATCH:
                raise RouteMismatch(f"arc c{k} carries a continuous flow, not a batch")
        for k in self.dwell:
            if k not in net or not net[k].is_node:
                raise RouteMismatch(f"dwell given for c{k}, which is not a node")


class EventKind(enum.Enum):
    EXIT_NODE = "ExitNode"
    ENTER_NODE = "EnterNode"
    EXIT_RESERVOIR_NONRENEWABLE = "ExitReservoirNonrenewable"
    ENTER_LANDFILL = "EnterLandfill"
    ENTER_INCINERATOR = "EnterIncinerator"
    ENTER_ENVIRONMENT = "EnterEnvironment"

    @property
    def is_unsustainable(self) -> bool:
        return self not in (EventKind.EXIT_NODE, EventKind.ENTER_NODE)


_ENTRY_KIND = {
    Role.LANDFILL: EventKind.ENTER_LANDFILL,
    Role.INCINERATOR: EventKind.ENTER_INCINERATOR,
    Role.ENVIRONMENT: EventKind.ENTER_ENVIRONMENT,
}


@dataclass(frozen=True)
class JourneyEvent:
    time: float
    compartment: int
    kind: EventKind
    mass: float


@dataclass(frozen=True, eq=False)
class JourneyLog:
    events: tuple[JourneyEvent, ...]
    trajectories: Mapping[int, Trajectory] = field(default_factory=dict)
    milestones: Mapping[str, float] = field(default_factory=dict)

    @property
    def duration(self) -> float:
        return self.events[-1].time if self.events else 0.0


def run_journey(
    net: TMNetwork,
    element: MaterialElement,
    route: Route,
    dt: float,
    *,
    max_time: float = DEFAULT_MAX_TIME,
    record_every: int = 1,
) -> JourneyLog:
    """Simulate one element along ``route`` starting at t = 0.

    Each arc starts from rest (arrival resets the velocity) and carries the
    carrier mass plus the element mass.  Trajectories are stored with the
    global clock and the cumulative path coordinate; world x/y positions
    continue from the previous arc end.
    """
    route.check(net)
    events: list[JourneyEvent] = []
    trajectories: dict[int, Trajectory] = {}
    milestones: dict[str, float] = {}
    m = element.mass

    clock = 0.0
    s_offset = 0.0
    x0 = y0 = 0.0
    for q, (left, k, right) in enumerate(route.triples()):
        if q > 0:
            clock += route.dwell.get(left, 0.0)
        _departure(events, net[left], clock, element)
        if q < 3:
            milestones[f"t{2 * q}"] = clock

        arc = net[k]
        local = integrate_segment(
            SegmentState(0.0, 0.0, 0.0),
            arc.carrier_mass + m,
            arc.geometry,
            arc.force_model,
            dt,
            max_time=max_time,
            record_every=record_every,
        )
        trajectories[k] = local.shifted(clock, s_offset, x0, y0)
        clock += local.exit_time
        s_offset += arc.geometry.length
        x0 = float(trajectories[k].x[-1])
        y0 = float(trajectories[k].y[-1])

        _arrival(events, net[right], clock, m)
        if q < 2:
            milestones[f"t{2 * q + 1}"] = clock
        if net[right].role.is_disposal and "t5" not in milestones:
            milestones["t5"] = clock

    return JourneyLog(tuple(events), trajectories, milestones)


def _departure(events, node, clock, element):
    events.append(JourneyEvent(clock, node.id, EventKind.EXIT_NODE, element.mass))
    if node.role is Role.NONRENEWABLE_RESERVOIR and element.nonrenewable_mass > 0:
        events.append(
            JourneyEvent(clock, node.id, EventKind.EXIT_RESERVOIR_NONRENEWABLE, element.nonrenewable_mass)
        )


def _arrival(events, node, clock, mass):
    events.append(JourneyEvent(clock, node.id, EventKind.ENTER_NODE, mass))
    kind = _ENTRY_KIND.get(node.role)
    if kind is not None:
        events.append(JourneyEvent(clock, node.id, kind, mass))


def milestone_times(log: JourneyLog) -> dict[str, float]:
    """Milestones t0..t5; t5 is the first entry into a disposal node."""
    if "t5" not in log.milestones:
        raise MissingMilestone("journey never enters a landfill, incinerator or the environment")
    return dict(log.milestones)


def landfill_entry_time(log: JourneyLog) -> float:
    return milestone_times(log)["t5"]


def total_duration(log: JourneyLog, route: Route) -> float:
    """Sum of segment travel times plus dwells at intermediate nodes."""
    travel = sum(tr.exit_time - tr.t[0] for tr in log.trajectories.values())
    return travel + sum(route.dwell.get(k, 0.0) for k in route.node_ids[1:-1])
