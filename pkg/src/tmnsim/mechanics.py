"""Point-mass dynamics along the path coordinate of one arc compartment.

The material element rides inside a carrier (truck, ship, ...) whose total
mass ``m_c`` is the carrier mass plus the element mass.  The path coordinate
``s`` measures distance travelled along the arc, and the equation of motion
follows from the Lagrangian ``L = T - V`` with a nonconservative generalised
force made of constant propulsion minus an affine resistance::

    m_c * s_ddot = m_c * g * sin(alpha) + F - (c0 + c1 * |s_dot|) * sign(s_dot)

Level arcs (``X_axis`` / ``Y_axis``) drop the gravity term.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import NonpositiveMass, NonpositiveStep, StalledSegment, UnreachableEnd

STANDARD_GRAVITY = 9.80665
DEFAULT_MAX_TIME = 1.0e6
BOUNDARY_RTOL = 1.0e-9


class FrameAxis(enum.Enum):
    XZ_INCLINE = "XZ_incline"
    X_AXIS = "X_axis"
    Y_AXIS = "Y_axis"


@dataclass(frozen=True)
class ArcGeometry:
    """Path geometry of an arc compartment.

    ``elevation`` is the height of the path start.  When omitted it defaults
    to ``length * sin(incline)`` so that an inclined segment ends at z = 0.
    """

    length: float
    incline: float = 0.0
    elevation: float | None = None
    frame_axis: FrameAxis = FrameAxis.XZ_INCLINE

    def __post_init__(self):
        if not self.length > 0:
            raise ValueError(f"path length must be > 0, got {self.length}")
        if not abs(self.incline) < math.pi / 2:
            raise ValueError(f"incline must satisfy |alpha| < pi/2, got {self.incline}")
        if self.frame_axis is not FrameAxis.XZ_INCLINE and self.incline != 0.0:
            raise ValueError(f"{self.frame_axis.value} arcs are level; incline must be 0")
        if self.elevation is None:
            object.__setattr__(self, "elevation", self.length * math.sin(self.incline))

    @property
    def direction(self) -> tuple[float, float, float]:
        """Unit vector of the path in the world frame."""
        if self.frame_axis is FrameAxis.X_AXIS:
            return (1.0, 0.0, 0.0)
        if self.frame_axis is FrameAxis.Y_AXIS:
            return (0.0, 1.0, 0.0)
        return (math.cos(self.incline), 0.0, -math.sin(self.incline))

    @property
    def gravity_sine(self) -> float:
        # level axes carry no gravity component along the path
        if self.frame_axis is FrameAxis.XZ_INCLINE:
            return math.sin(self.incline)
        return 0.0


@dataclass(frozen=True)
class ForceModel:
    """Constant propulsion ``F`` and resistance ``c0 + c1 * |v|`` opposing motion."""

    propulsion: float
    resist_const: float = 0.0
    resist_linear: float = 0.0
    g: float = STANDARD_GRAVITY

    def __post_init__(self):
        for name in ("propulsion", "resist_const", "resist_linear"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0, got {getattr(self, name)}")


@dataclass(frozen=True)
class SegmentState:
    t: float
    s: float
    s_dot: float


@dataclass(frozen=True)
class EnergyBreakdown:
    kinetic: float
    potential: float
    lagrangian: float
    nonconservative: float


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Sampled motion of the element through one arc.

    Columns are numpy arrays of equal length.  ``x, y, z`` are world-frame
    positions; world-frame accelerations are derived on demand.
    """

    t: np.ndarray
    s: np.ndarray
    s_dot: np.ndarray
    s_ddot: np.ndarray
    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    exit_time: float
    geometry: ArcGeometry

    COLUMNS = ("t", "s", "s_dot", "s_ddot", "x", "y", "z")

    def __len__(self):
        return len(self.t)

    @property
    def exit_velocity(self) -> float:
        return float(self.s_dot[-1])

    @property
    def samples(self) -> list[tuple[float, ...]]:
        return list(zip(*(getattr(self, c).tolist() for c in self.COLUMNS)))

    @property
    def world_acceleration(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return frame_kinematics(self.s_ddot, self.geometry)

    def shifted(self, dt: float, ds: float, dx: float = 0.0, dy: float = 0.0) -> "Trajectory":
        """Copy with the time and path/world coordinates offset."""
        return Trajectory(
            t=self.t + dt,
            s=self.s + ds,
            s_dot=self.s_dot,
            s_ddot=self.s_ddot,
            x=self.x + dx,
            y=self.y + dy,
            z=self.z,
            exit_time=self.exit_time + dt,
            geometry=self.geometry,
        )


@njit(cache=True, nogil=True)
def _net_accel(v, drive, c0, c1, m):
    # At rest the constant resistance acts like static friction: it cancels
    # any drive up to c0 and opposes the drive direction beyond that.
    if v > 0.0:
        return (drive - c0 - c1 * v) / m
    if v < 0.0:
        return (drive + c0 - c1 * v) / m
    if abs(drive) <= c0:
        return 0.0
    if drive > 0.0:
        return (drive - c0) / m
    return (drive + c0) / m


@njit(cache=True, nogil=True)
def _rk4_step(s, v, h, drive, c0, c1, m):
    k1s = v
    k1v = _net_accel(v, drive, c0, c1, m)
    k2s = v + 0.5 * h * k1v
    k2v = _net_accel(k2s, drive, c0, c1, m)
    k3s = v + 0.5 * h * k2v
    k3v = _net_accel(k3s, drive, c0, c1, m)
    k4s = v + h * k3v
    k4v = _net_accel(k4s, drive, c0, c1, m)
    s_new = s + h / 6.0 * (k1s + 2.0 * k2s + 2.0 * k3s + k4s)
    v_new = v + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
    return s_new, v_new


@njit(cache=True, nogil=True)
def _integrate(s0, v0, length, drive, c0, c1, m, dt, max_time, record_every, tol):
    """Fixed-step RK4 until ``s >= length``.

    Returns (status, samples) with status 0 on success, 1 when stalled and
    samples as rows of (elapsed t, s, s_dot, s_ddot).
    """
    n_max = int(max_time / dt) + 2
    cap = min(n_max // record_every + 2, 1 << 16)
    out = np.empty((cap, 4))
    out[0, 0] = 0.0
    out[0, 1] = s0
    out[0, 2] = v0
    out[0, 3] = _net_accel(v0, drive, c0, c1, m)
    n_out = 1
    s = s0
    v = v0
    step = 0
    while True:
        a = _net_accel(v, drive, c0, c1, m)
        if (v <= 0.0 and a <= 0.0) or s < 0.0 or step * dt >= max_time:
            return 1, out[:n_out]
        s_new, v_new = _rk4_step(s, v, dt, drive, c0, c1, m)
        if s_new >= length:
            # bisect the partial step length h in (0, dt]; s(h) is monotone
            # here.  Runs to bracket collapse, well inside the required tol.
            lo = 0.0
            hi = dt
            s_hi = s_new
            v_hi = v_new
            for _ in range(200):
                if s_hi == length:
                    break
                mid = 0.5 * (lo + hi)
                if mid <= lo or mid >= hi:
                    break
                s_mid, v_mid = _rk4_step(s, v, mid, drive, c0, c1, m)
                if s_mid >= length:
                    hi = mid
                    s_hi = s_mid
                    v_hi = v_mid
                else:
                    lo = mid
            if abs(s_hi - length) > tol:
                return 2, out[:n_out]
            if n_out >= out.shape[0]:
                out = _grow(out)
            out[n_out, 0] = step * dt + hi
            out[n_out, 1] = s_hi
            out[n_out, 2] = v_hi
            out[n_out, 3] = _net_accel(v_hi, drive, c0, c1, m)
            n_out += 1
            return 0, out[:n_out]
        step += 1
        s = s_new
        v = v_new
        if step % record_every == 0:
            if n_out >= out.shape[0]:
                out = _grow(out)
            out[n_out, 0] = step * dt
            out[n_out, 1] = s
            out[n_out, 2] = v
            out[n_out, 3] = _net_accel(v, drive, c0, c1, m)
            n_out += 1


@njit(cache=True, nogil=True)
def _grow(a):
    b = np.empty((2 * a.shape[0], a.shape[1]))
    b[: a.shape[0]] = a
    return b


def _check_mass(total_mass):
    if not total_mass > 0:
        raise NonpositiveMass(f"total mass must be > 0, got {total_mass}")


def _drive(total_mass: float, geometry: ArcGeometry, forces: ForceModel) -> float:
    return total_mass * forces.g * geometry.gravity_sine + forces.propulsion


def lagrange_accel(
    state: SegmentState, total_mass: float, geometry: ArcGeometry, forces: ForceModel
) -> float:
    """Path acceleration from Lagrange's equation for the loaded carrier."""
    _check_mass(total_mass)
    return float(
        _net_accel(
            float(state.s_dot),
            _drive(total_mass, geometry, forces),
            forces.resist_const,
            forces.resist_linear,
            float(total_mass),
        )
    )


def resistance(s_dot: float, forces: ForceModel) -> float:
    """Signed resistance force for a moving element (zero at rest)."""
    return -math.copysign(forces.resist_const + forces.resist_linear * abs(s_dot), s_dot) if s_dot else 0.0


def energy_breakdown(
    state: SegmentState, total_mass: float, geometry: ArcGeometry, forces: ForceModel
) -> EnergyBreakdown:
    _check_mass(total_mass)
    kinetic = 0.5 * total_mass * state.s_dot**2
    if geometry.frame_axis is FrameAxis.XZ_INCLINE:
        height = geometry.elevation - state.s * math.sin(geometry.incline)
    else:
        height = geometry.elevation
    potential = total_mass * forces.g * height
    return EnergyBreakdown(
        kinetic=kinetic,
        potential=potential,
        lagrangian=kinetic - potential,
        nonconservative=forces.propulsion + resistance(state.s_dot, forces),
    )


def frame_kinematics(s_ddot, geometry: ArcGeometry):
    """Map path acceleration to world-frame ``(x_ddot, y_ddot, z_ddot)``.

    Accepts scalars or numpy arrays.
    """
    ex, ey, ez = geometry.direction
    return s_ddot * ex, s_ddot * ey, s_ddot * ez


def integrate_segment(
    initial: SegmentState,
    total_mass: float,
    geometry: ArcGeometry,
    forces: ForceModel,
    dt: float,
    *,
    max_time: float = DEFAULT_MAX_TIME,
    record_every: int = 1,
) -> Trajectory:
    """Integrate one arc with classical RK4 until the element reaches its end.

    The crossing of ``s = length`` is located by bisection on the last step
    (to floating-point resolution, never worse than ``1e-9 * length``).  ``record_every`` thins the stored samples
    (first and last sample are always kept).  Raises :class:`StalledSegment`
    when the end cannot be reached within ``max_time`` seconds.
    """
    _check_mass(total_mass)
    if not dt > 0:
        raise NonpositiveStep(f"time step must be > 0, got {dt}")
    if record_every < 1:
        raise ValueError("record_every must be >= 1")
    if not 0.0 <= initial.s < geometry.length:
        raise ValueError(f"initial s={initial.s} outside [0, {geometry.length})")

    drive = _drive(total_mass, geometry, forces)
    status, rows = _integrate(
        float(initial.s),
        float(initial.s_dot),
        float(geometry.length),
        float(drive),
        float(forces.resist_const),
        float(forces.resist_linear),
        float(total_mass),
        float(dt),
        float(max_time),
        int(record_every),
        BOUNDARY_RTOL * geometry.length,
    )
    if status == 2:
        raise RuntimeError("boundary bisection did not reach the required tolerance")
    if status != 0:
        raise StalledSegment(
            f"element stalls at s={rows[-1, 1]:.6g} m of {geometry.length:.6g} m "
            f"(net drive {drive:.6g} N, resistance {forces.resist_const:.6g} N at rest)"
        )

    t = rows[:, 0] + initial.t
    s = rows[:, 1].copy()
    s_dot = rows[:, 2].copy()
    s_ddot = rows[:, 3].copy()
    ex, ey, ez = geometry.direction
    return Trajectory(
        t=t,
        s=s,
        s_dot=s_dot,
        s_ddot=s_ddot,
        x=s * ex,
        y=s * ey,
        z=geometry.elevation + s * ez,
        exit_time=float(t[-1]),
        geometry=geometry,
    )


def analytic_segment_solution(
    total_mass: float, geometry: ArcGeometry, forces: ForceModel, initial: SegmentState
) -> tuple[float, float]:
    """Closed-form exit time and velocity for a constant-force segment.

    Only valid without velocity-proportional resistance (``c1 = 0``); the
    element must be moving forward or pushed forward from rest.
    """
    _check_mass(total_mass)
    if forces.resist_linear != 0.0:
        raise ValueError("closed form requires resist_linear == 0")
    a = lagrange_accel(initial, total_mass, geometry, forces)
    v0 = initial.s_dot
    dist = geometry.length - initial.s
    if v0 < 0 or (v0 == 0 and a <= 0):
        raise UnreachableEnd(f"element cannot advance (v0={v0}, a={a})")
    if a == 0.0:
        tau = dist / v0
        return initial.t + tau, v0
    disc = v0 * v0 + 2.0 * a * dist
    if disc < 0:
        raise UnreachableEnd(f"element stops after {-v0 * v0 / (2 * a):.6g} m of {dist:.6g} m")
    v_exit = math.sqrt(disc)
    # (v_exit - v0) / a rewritten to avoid cancellation for tiny a
    tau = 2.0 * dist / (v0 + v_exit)
    return initial.t + tau, v_exit
