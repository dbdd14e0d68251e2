import math

import numpy as np
import pytest

from tmnsim import (
    ArcGeometry,
    ForceModel,
    FrameAxis,
    SegmentState,
    analytic_segment_solution,
    energy_breakdown,
    frame_kinematics,
    integrate_segment,
    lagrange_accel,
)
from tmnsim.errors import NonpositiveMass, NonpositiveStep, StalledSegment, UnreachableEnd
from tmnsim.mechanics import STANDARD_GRAVITY

from oracles import drag_closed_form_exit, fine_step_exit, uniform_accel_exit

MOVING = SegmentState(0.0, 0.0, 1.0)
REST = SegmentState(0.0, 0.0, 0.0)
LEVEL = ArcGeometry(100.0)


class TestLagrangeAccel:
    def test_level_truck(self):
        a = lagrange_accel(MOVING, 10000.0, LEVEL, ForceModel(5000.0, 2000.0))
        assert a == pytest.approx(0.3, abs=1e-15)

    def test_gravity_term_alone(self):
        geom = ArcGeometry(100.0, math.pi / 6)
        a = lagrange_accel(MOVING, 1000.0, geom, ForceModel(700.0, 700.0))
        assert a == pytest.approx(4.903325, rel=1e-12)

    def test_zero_force(self):
        assert lagrange_accel(MOVING, 1.0, LEVEL, ForceModel(0.0)) == 0.0

    def test_level_axes_ignore_incline_gravity(self):
        geom = ArcGeometry(100.0, frame_axis=FrameAxis.Y_AXIS)
        assert lagrange_accel(MOVING, 2.0, geom, ForceModel(4.0, 1.0)) == 1.5

    def test_resistance_opposes_backward_motion(self):
        back = SegmentState(0.0, 0.0, -2.0)
        a = lagrange_accel(back, 1.0, LEVEL, ForceModel(0.0, 1.0, 0.5))
        assert a == pytest.approx(2.0)

    def test_static_friction_at_rest(self):
        assert lagrange_accel(REST, 1.0, LEVEL, ForceModel(1.0, 3.0)) == 0.0
        assert lagrange_accel(REST, 1.0, LEVEL, ForceModel(5.0, 3.0)) == 2.0

    @pytest.mark.parametrize("m", [0.0, -1.0])
    def test_nonpositive_mass(self, m):
        with pytest.raises(NonpositiveMass):
            lagrange_accel(MOVING, m, LEVEL, ForceModel(1.0))


class TestEnergyBreakdown:
    def test_rest_at_origin(self):
        e = energy_breakdown(REST, 5.0, ArcGeometry(10.0, elevation=0.0), ForceModel(0.0))
        assert (e.kinetic, e.potential, e.lagrangian) == (0.0, 0.0, 0.0)

    def test_kinetic(self):
        e = energy_breakdown(SegmentState(0.0, 0.0, 3.0), 2.0, LEVEL, ForceModel(0.0))
        assert e.kinetic == 9.0

    def test_potential_zero_at_segment_end(self):
        geom = ArcGeometry(40.0, 0.3)
        e = energy_breakdown(SegmentState(0.0, 40.0, 0.0), 1.0, geom, ForceModel(0.0))
        assert e.potential == pytest.approx(0.0, abs=1e-12)
        start = energy_breakdown(REST, 1.0, geom, ForceModel(0.0))
        assert start.potential == pytest.approx(STANDARD_GRAVITY * 40.0 * math.sin(0.3))

    def test_lagrangian_identity(self):
        e = energy_breakdown(SegmentState(0.0, 3.0, 4.0), 7.0, ArcGeometry(10.0, 0.2), ForceModel(9.0, 1.0, 0.5))
        assert e.lagrangian == e.kinetic - e.potential
        assert e.nonconservative == 9.0 - (1.0 + 0.5 * 4.0)

    def test_level_potential_uses_elevation(self):
        geom = ArcGeometry(10.0, elevation=3.0, frame_axis=FrameAxis.X_AXIS)
        e = energy_breakdown(SegmentState(0.0, 7.0, 0.0), 2.0, geom, ForceModel(0.0, g=10.0))
        assert e.potential == 60.0


class TestFrameKinematics:
    def test_incline(self):
        x, y, z = frame_kinematics(2.0, ArcGeometry(1.0, math.pi / 6))
        assert (x, y, z) == pytest.approx((math.sqrt(3.0), 0.0, -1.0))

    def test_x_axis(self):
        assert frame_kinematics(2.0, ArcGeometry(1.0, frame_axis=FrameAxis.X_AXIS)) == (2.0, 0.0, 0.0)

    def test_y_axis(self):
        assert frame_kinematics(2.0, ArcGeometry(1.0, frame_axis=FrameAxis.Y_AXIS)) == (0.0, 2.0, 0.0)

    @pytest.mark.parametrize("axis", list(FrameAxis))
    def test_zero(self, axis):
        geom = ArcGeometry(1.0, 0.4 if axis is FrameAxis.XZ_INCLINE else 0.0, frame_axis=axis)
        assert frame_kinematics(0.0, geom) == pytest.approx((0.0, 0.0, 0.0))

    def test_arrays(self):
        a = np.linspace(-1, 1, 5)
        x, y, z = frame_kinematics(a, ArcGeometry(1.0, 0.5))
        np.testing.assert_allclose(x**2 + y**2 + z**2, a**2, rtol=1e-15)


class TestGeometry:
    def test_default_elevation_ends_at_zero(self):
        assert ArcGeometry(50.0, 0.1).elevation == pytest.approx(50.0 * math.sin(0.1))

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(length=0.0),
            dict(length=1.0, incline=math.pi / 2),
            dict(length=1.0, incline=0.1, frame_axis=FrameAxis.X_AXIS),
        ],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            ArcGeometry(**kwargs)

    def test_negative_force(self):
        with pytest.raises(ValueError):
            ForceModel(-1.0)


class TestAnalytic:
    def test_from_rest(self):
        assert analytic_segment_solution(1.0, ArcGeometry(50.0), ForceModel(1.0), REST) == pytest.approx((10.0, 10.0))

    def test_uniform_motion(self):
        t, v = analytic_segment_solution(1.0, ArcGeometry(100.0), ForceModel(0.0), SegmentState(0.0, 0.0, 5.0))
        assert (t, v) == (20.0, 5.0)

    def test_decelerating_from_rest(self):
        uphill = ArcGeometry(50.0, -math.asin(1.0 / STANDARD_GRAVITY))
        with pytest.raises(UnreachableEnd):
            analytic_segment_solution(1.0, uphill, ForceModel(0.0), REST)

    def test_stops_short(self):
        with pytest.raises(UnreachableEnd):
            analytic_segment_solution(1.0, ArcGeometry(50.0), ForceModel(0.0, 1.0), SegmentState(0.0, 0.0, 5.0))

    def test_rejects_linear_drag(self):
        with pytest.raises(ValueError):
            analytic_segment_solution(1.0, LEVEL, ForceModel(1.0, 0.0, 1.0), REST)


class TestIntegrateSegment:
    def test_constant_accel_closed_form(self):
        tr = integrate_segment(REST, 1.0, ArcGeometry(50.0), ForceModel(1.0), 1e-3)
        assert tr.exit_time == pytest.approx(10.0, rel=1e-12)
        assert tr.exit_velocity == pytest.approx(10.0, rel=1e-12)
        assert abs(tr.s[-1] - 50.0) <= 1e-9 * 50.0

    def test_linear_drag_against_fine_step_oracle(self):
        m, push, c1, length = 1000.0, 3000.0, 100.0, 500.0
        t_ref, v_ref = fine_step_exit(m, push, c1, length, dt=1e-6)
        t_cf, _ = drag_closed_form_exit(m, push, c1, length)
        assert t_ref == pytest.approx(t_cf, rel=1e-9)
        tr = integrate_segment(REST, m, ArcGeometry(length), ForceModel(push, 0.0, c1), 1e-3)
        assert tr.exit_time == pytest.approx(t_ref, rel=1e-6)
        assert tr.exit_velocity == pytest.approx(v_ref, rel=1e-6)

    def test_coulomb_and_gravity(self):
        geom = ArcGeometry(300.0, 0.05)
        forces = ForceModel(2000.0, 800.0)
        m = 5000.0
        a = (m * STANDARD_GRAVITY * math.sin(0.05) + 2000.0 - 800.0) / m
        t_ref, v_ref = uniform_accel_exit(a, 300.0)
        tr = integrate_segment(REST, m, geom, forces, 1e-3)
        assert tr.exit_time == pytest.approx(t_ref, rel=1e-10)
        assert tr.exit_velocity == pytest.approx(v_ref, rel=1e-10)

    def test_stalled(self):
        with pytest.raises(StalledSegment):
            integrate_segment(REST, 1.0, LEVEL, ForceModel(0.0), 1e-3)

    def test_stalled_by_friction(self):
        with pytest.raises(StalledSegment):
            integrate_segment(REST, 1.0, LEVEL, ForceModel(2.0, 3.0), 1e-3)

    def test_stall_budget(self):
        with pytest.raises(StalledSegment):
            integrate_segment(REST, 1.0, ArcGeometry(1e6), ForceModel(1e-6), 0.1, max_time=10.0)

    def test_rolls_back_uphill(self):
        uphill = ArcGeometry(100.0, -0.2)
        with pytest.raises(StalledSegment):
            integrate_segment(SegmentState(0.0, 0.0, 3.0), 1.0, uphill, ForceModel(0.0), 1e-3)

    @pytest.mark.parametrize("dt", [0.0, -1e-3])
    def test_nonpositive_step(self, dt):
        with pytest.raises(NonpositiveStep):
            integrate_segment(REST, 1.0, LEVEL, ForceModel(1.0), dt)

    def test_trajectory_shape(self):
        geom = ArcGeometry(20.0, 0.3)
        tr = integrate_segment(SegmentState(5.0, 0.0, 0.0), 2.0, geom, ForceModel(3.0, 1.0, 0.2), 1e-2)
        assert np.all(np.diff(tr.t) > 0)
        assert np.all(np.diff(tr.s) >= 0)
        assert tr.t[0] == 5.0
        assert tr.exit_time == tr.t[-1]
        # positions follow the incline from (0, 0, h) down to z = 0
        assert tr.z[0] == pytest.approx(geom.elevation)
        assert tr.z[-1] == pytest.approx(0.0, abs=1e-9)
        np.testing.assert_allclose(tr.x, tr.s * math.cos(0.3))
        ax, ay, az = tr.world_acceleration
        np.testing.assert_allclose(ax**2 + ay**2 + az**2, tr.s_ddot**2, rtol=1e-14)

    def test_record_every_keeps_endpoints(self):
        full = integrate_segment(REST, 1.0, ArcGeometry(50.0), ForceModel(1.0), 1e-2)
        thin = integrate_segment(REST, 1.0, ArcGeometry(50.0), ForceModel(1.0), 1e-2, record_every=100)
        assert len(thin) < len(full) / 50
        assert thin.exit_time == full.exit_time
        assert thin.t[0] == full.t[0]

    def test_started_midway(self):
        start = SegmentState(0.0, 10.0, 2.0)
        tr = integrate_segment(start, 1.0, ArcGeometry(50.0), ForceModel(1.0), 1e-3)
        t_ref, v_ref = analytic_segment_solution(1.0, ArcGeometry(50.0), ForceModel(1.0), start)
        assert tr.exit_time == pytest.approx(t_ref, rel=1e-10)


def _exit_error(dt, problem, t_ref):
    m, push, c1, length = problem
    tr = integrate_segment(REST, m, ArcGeometry(length), ForceModel(push, 0.0, c1), dt)
    return abs(tr.exit_time - t_ref) / t_ref


def test_fourth_order_convergence():
    # time constant 0.05 s; the element exits during the drag transient,
    # where the step error is not washed out
    problem = (1.0, 20.0, 20.0, 0.05)
    t_ref, _ = fine_step_exit(*problem, dt=1e-6)
    errors = [_exit_error(dt, problem, t_ref) for dt in (1e-2, 5e-3, 2.5e-3)]
    ratios = [errors[i] / errors[i + 1] for i in range(2)]
    assert min(ratios) >= 8.0, ratios
