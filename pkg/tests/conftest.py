import math
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from tmnsim import (  # noqa: E402
    ArcGeometry,
    Compartment,
    ForceModel,
    FrameAxis,
    Role,
    SegmentState,
    build_network,
    integrate_segment,
)
from tmnsim.scenario_io import load_bundled  # noqa: E402


@pytest.fixture(scope="session", autouse=True)
def warm_jit():
    """Compile (or load cached) jitted kernels once so timings exclude it."""
    integrate_segment(SegmentState(0.0, 0.0, 0.0), 1.0, ArcGeometry(1.0), ForceModel(1.0), 0.1)


@pytest.fixture(scope="session")
def example1():
    return load_bundled("example1.scn")


@pytest.fixture(scope="session")
def example3():
    return load_bundled("example3.scn")


def truck(k, i, j, length=100.0, axis=FrameAxis.X_AXIS, incline=0.0, push=3000.0, c0=0.0, c1=0.0, carrier=1000.0):
    return Compartment.arc(
        k, i, j, Role.TRANSPORT_BATCH,
        ArcGeometry(length, incline, frame_axis=axis), carrier, ForceModel(push, c0, c1),
    )


def example1_compartments():
    """Topology of the linear example network with simple constant forces."""
    return [
        Compartment.node(1, Role.NONRENEWABLE_RESERVOIR),
        Compartment.node(2, Role.MANUFACTURER),
        Compartment.node(3, Role.USE_STAGE),
        Compartment.node(4, Role.LANDFILL),
        truck(5, 1, 2, axis=FrameAxis.XZ_INCLINE, incline=math.pi / 12),
        truck(6, 2, 3),
        truck(7, 3, 4, axis=FrameAxis.Y_AXIS),
    ]


@pytest.fixture
def linear_net():
    return build_network(example1_compartments(), "beta")
