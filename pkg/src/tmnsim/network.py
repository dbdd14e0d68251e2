"""Compartments, thermodynamical material networks and their mass-flow digraphs.

A compartment ``c^k_{i,j}`` is a node (store / transform / use) when
``i == j == k`` and an arc (moves material from node ``i`` to node ``j``)
when ``i != j``.  Ids are assigned by the caller.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import networkx as nx

from .errors import (
    ArcEndpointMissing,
    DisconnectedNetwork,
    DuplicateId,
    IndexRuleViolation,
    NegativeWeight,
    RoleMismatch,
    UnknownCompartment,
    ValidationError,
)
from .mechanics import ArcGeometry, ForceModel


class Role(enum.Enum):
    NONRENEWABLE_RESERVOIR = "NonrenewableReservoir"
    RENEWABLE_RESERVOIR = "RenewableReservoir"
    MANUFACTURER = "Manufacturer"
    USE_STAGE = "UseStage"
    REPAIR_STAGE = "RepairStage"
    LANDFILL = "Landfill"
    INCINERATOR = "Incinerator"
    ENVIRONMENT = "Environment"
    TRANSPORT_BATCH = "TransportBatch"
    TRANSPORT_CONTINUOUS = "TransportContinuous"

    @property
    def is_transport(self) -> bool:
        return self in (Role.TRANSPORT_BATCH, Role.TRANSPORT_CONTINUOUS)

    @property
    def is_disposal(self) -> bool:
        """Landfill, incinerator or environment: entering it is unsustainable."""
        return self in DISPOSAL_ROLES


DISPOSAL_ROLES = frozenset({Role.LANDFILL, Role.INCINERATOR, Role.ENVIRONMENT})


@dataclass(frozen=True)
class Compartment:
    id: int
    origin: int
    destination: int
    role: Role
    geometry: ArcGeometry | None = None
    carrier_mass: float = 0.0
    force_model: ForceModel | None = None

    def __post_init__(self):
        if isinstance(self.id, bool) or not isinstance(self.id, int) or self.id < 1:
            raise ValidationError(f"compartment id must be a positive integer, got {self.id!r}")
        if self.origin == self.destination:
            if self.origin != self.id:
                raise IndexRuleViolation(
                    f"c{self.id}: node compartments need i = j = k, got i=j={self.origin}"
                )
            if self.role.is_transport:
                raise RoleMismatch(f"c{self.id}: transport role {self.role.value} on a node")
            if self.geometry is not None or self.force_model is not None or self.carrier_mass:
                raise ValidationError(f"c{self.id}: geometry, forces and carrier mass are arc-only")
        else:
            if not self.role.is_transport:
                raise RoleMismatch(f"c{self.id}: node role {self.role.value} on an arc")
            if self.carrier_mass < 0:
                raise ValidationError(f"c{self.id}: carrier mass must be >= 0")
            if self.role is Role.TRANSPORT_BATCH and (self.geometry is None or self.force_model is None):
                raise ValidationError(f"c{self.id}: batch transport needs geometry and a force model")

    @classmethod
    def node(cls, k: int, role: Role) -> "Compartment":
        return cls(k, k, k, role)

    @classmethod
    def arc(
        cls,
        k: int,
        i: int,
        j: int,
        role: Role = Role.TRANSPORT_BATCH,
        geometry: ArcGeometry | None = None,
        carrier_mass: float = 0.0,
        force_model: ForceModel | None = None,
    ) -> "Compartment":
        if i == j:
            raise IndexRuleViolation(f"c{k}: arc compartments need i != j, got i=j={i}")
        return cls(k, i, j, role, geometry, carrier_mass, force_model)

    @property
    def is_node(self) -> bool:
        return self.origin == self.destination

    @property
    def is_arc(self) -> bool:
        return not self.is_node

    def __str__(self):
        return f"c^{self.id}_{{{self.origin},{self.destination}}}"


@dataclass(frozen=True)
class TMNetwork:
    """Validated thermodynamical material network for one target material.

    Build instances with :func:`build_network`.
    """

    compartments: tuple[Compartment, ...]
    material: str
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_index", {c.id: c for c in self.compartments})

    def __getitem__(self, k: int) -> Compartment:
        try:
            return self._index[k]
        except KeyError:
            raise UnknownCompartment(f"no compartment with id {k}") from None

    def __contains__(self, k) -> bool:
        return k in self._index

    def __iter__(self):
        return iter(self.compartments)

    def __len__(self):
        return len(self.compartments)

    @property
    def nodes(self) -> tuple[Compartment, ...]:
        return tuple(c for c in self.compartments if c.is_node)

    @property
    def arcs(self) -> tuple[Compartment, ...]:
        return tuple(c for c in self.compartments if c.is_arc)

    @property
    def n_v(self) -> int:
        return len(self.nodes)

    @property
    def n_a(self) -> int:
        return len(self.arcs)

    @property
    def n_c(self) -> int:
        return len(self.compartments)

    def summary(self) -> str:
        return f"material={self.material} n_v={self.n_v} n_a={self.n_a} n_c={self.n_c}"


def build_network(compartments: Iterable[Compartment], material: str) -> TMNetwork:
    """Validate a set of compartments and freeze it into a network.

    The result does not depend on the order of ``compartments``.
    """
    comps = list(compartments)
    if not comps:
        raise ValidationError("a network needs at least one compartment")
    seen: set[int] = set()
    for c in comps:
        if c.id in seen:
            raise DuplicateId(f"compartment id {c.id} used twice")
        seen.add(c.id)

    node_ids = {c.id for c in comps if c.is_node}
    for c in comps:
        if c.is_arc:
            for end in (c.origin, c.destination):
                if end not in node_ids:
                    raise ArcEndpointMissing(f"arc c{c.id} references missing node {end}")

    graph = nx.MultiDiGraph()
    graph.add_nodes_from(node_ids)
    graph.add_edges_from((c.origin, c.destination, c.id) for c in comps if c.is_arc)
    if not nx.is_weakly_connected(graph):
        parts = sorted(sorted(p) for p in nx.weakly_connected_components(graph))
        raise DisconnectedNetwork(f"network splits into components {parts}")

    net = TMNetwork(tuple(sorted(comps, key=lambda c: c.id)), material)
    assert net.n_c == net.n_v + net.n_a
    return net


def partition(net: TMNetwork) -> tuple[frozenset[Compartment], frozenset[Compartment]]:
    """Split into (store/transform/use nodes, transport arcs)."""
    return frozenset(net.nodes), frozenset(net.arcs)


@dataclass(frozen=True)
class MassFlowDigraph:
    """Weighted digraph: node weights are stocks (kg), arc weights are batch
    masses (kg) or flow rates (kg/s)."""

    network: TMNetwork
    node_weights: Mapping[int, float]
    arc_weights: Mapping[int, float]

    @property
    def edges(self) -> list[tuple[int, int, int]]:
        """Oriented arcs as ``(origin, destination, arc id)``."""
        return [(a.origin, a.destination, a.id) for a in self.network.arcs]

    def to_networkx(self) -> nx.MultiDiGraph:
        g = nx.MultiDiGraph()
        for k, w in self.node_weights.items():
            g.add_node(k, weight=w, role=self.network[k].role)
        for i, j, k in self.edges:
            g.add_edge(i, j, key=k, weight=self.arc_weights[k], role=self.network[k].role)
        return g


def mass_flow_digraph(
    net: TMNetwork,
    stocks: Mapping[int, float] | None = None,
    flows: Mapping[int, float] | None = None,
) -> MassFlowDigraph:
    stocks = dict(stocks or {})
    flows = dict(flows or {})
    for weights, want_node, what in ((stocks, True, "node"), (flows, False, "arc")):
        for k, w in weights.items():
            if k not in net or net[k].is_node != want_node:
                raise UnknownCompartment(f"{k} is not a {what} of the network")
            if w < 0:
                raise NegativeWeight(f"weight of c{k} is negative ({w})")
    return MassFlowDigraph(
        network=net,
        node_weights={c.id: float(stocks.get(c.id, 0.0)) for c in net.nodes},
        arc_weights={c.id: float(flows.get(c.id, 0.0)) for c in net.arcs},
    )
