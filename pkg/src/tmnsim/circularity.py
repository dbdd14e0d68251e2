"""Circularity of a material network over a time horizon.

``lambda = -(m_ub + mdot_uc * delta)`` where ``m_ub`` is the unsustainable
mass moved in batches up to the horizon and ``mdot_uc`` the unsustainable
continuous flow.  A mass counts as unsustainable when it leaves a
nonrenewable reservoir or enters a landfill, an incinerator or the
environment; an element that does both is counted twice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

from .errors import NegativeWeight, NonpositiveDelta, UnknownCompartment
from .network import Role, TMNetwork
from .simulate import JourneyEvent, JourneyLog, landfill_entry_time

UNBOUNDED = math.inf
DEFAULT_DELTA = 1.0


def check_horizon(phi: float) -> float:
    if not phi > 0:
        raise ValueError(f"horizon must be > 0 (or unbounded), got {phi}")
    return float(phi)


@dataclass(frozen=True)
class CircularityReport:
    lambda_: float
    horizon: float
    batch_contributions: tuple[tuple[JourneyEvent, float], ...]
    continuous_contribution: float
    delta: float

    @property
    def batch_mass(self) -> float:
        return sum(mass for _, mass in self.batch_contributions)

    def as_dict(self) -> dict:
        return {
            "lambda": self.lambda_,
            "horizon": "unbounded" if math.isinf(self.horizon) else self.horizon,
            "delta": self.delta,
            "continuous_contribution": self.continuous_contribution,
            "breakdown": [
                {"kind": e.kind.value, "compartment": e.compartment, "time": e.time, "mass": mass}
                for e, mass in self.batch_contributions
            ],
        }


def unsustainable_events(log: JourneyLog, horizon: float = UNBOUNDED) -> list[JourneyEvent]:
    """Classification events at or before the horizon (closed boundary)."""
    phi = check_horizon(horizon)
    return [e for e in log.events if e.kind.is_unsustainable and e.time <= phi]


def unsustainable_batch_mass(log: JourneyLog, horizon: float = UNBOUNDED) -> float:
    return sum(e.mass for e in unsustainable_events(log, horizon))


def unsustainable_continuous_flow(net: TMNetwork, flows: Mapping[int, float]) -> float:
    """Total flow on continuous arcs leaving a nonrenewable reservoir or
    entering a disposal node (a pipe doing both counts twice)."""
    total = 0.0
    for k, rate in flows.items():
        if k not in net or net[k].role is not Role.TRANSPORT_CONTINUOUS:
            raise UnknownCompartment(f"c{k} is not a continuous transport arc")
        if rate < 0:
            raise NegativeWeight(f"flow on c{k} is negative ({rate})")
        arc = net[k]
        if net[arc.origin].role is Role.NONRENEWABLE_RESERVOIR:
            total += rate
        if net[arc.destination].role.is_disposal:
            total += rate
    return total


def circularity(
    log: JourneyLog,
    net: TMNetwork,
    flows: Mapping[int, float] | None = None,
    horizon: float = UNBOUNDED,
    delta: float = DEFAULT_DELTA,
) -> CircularityReport:
    if not delta > 0:
        raise NonpositiveDelta(f"delta must be > 0, got {delta}")
    events = unsustainable_events(log, horizon)
    continuous = unsustainable_continuous_flow(net, flows or {}) * delta
    batch = tuple((e, e.mass) for e in events)
    return CircularityReport(
        # 0.0 - x keeps an empty report at +0.0
        lambda_=0.0 - (sum(m for _, m in batch) + continuous),
        horizon=float(horizon),
        batch_contributions=batch,
        continuous_contribution=continuous,
        delta=float(delta),
    )


def life_extension(log_a: JourneyLog, log_b: JourneyLog) -> float:
    """Extra in-use time of journey ``b`` over ``a`` (difference of landfill entries)."""
    return landfill_entry_time(log_b) - landfill_entry_time(log_a)
