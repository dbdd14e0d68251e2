"""Simulation and circularity analysis of thermodynamical material networks."""

from .circularity import (
    UNBOUNDED,
    CircularityReport,
    circularity,
    life_extension,
    unsustainable_batch_mass,
    unsustainable_continuous_flow,
)
from .mechanics import (
    ArcGeometry,
    EnergyBreakdown,
    ForceModel,
    FrameAxis,
    SegmentState,
    Trajectory,
    analytic_segment_solution,
    energy_breakdown,
    frame_kinematics,
    integrate_segment,
    lagrange_accel,
)
from .network import (
    Compartment,
    MassFlowDigraph,
    Role,
    TMNetwork,
    build_network,
    mass_flow_digraph,
    partition,
)
from .optimize import (
    InsertRepair,
    ReduceMaterial,
    ReduceRenewable,
    Scenario,
    apply_strategy,
    argmax_circularity,
    enumerate_scenarios,
)
from .simulate import (
    EventKind,
    JourneyEvent,
    JourneyLog,
    MaterialElement,
    Route,
    milestone_times,
    run_journey,
)

__version__ = "0.1.0"
