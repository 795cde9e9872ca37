import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rfswarm.errors import FormationError, InvalidParameterError, SingularityError
from rfswarm.sim import (
    DEFAULT_WAVELENGTH,
    DroneSpec,
    DroneTrajectory,
    NoiseModel,
    ReaderConfig,
    RotationEvent,
    analytic_phase_rate,
    closest_approach_time,
    ideal_phase,
    make_axis_sweep,
    plan_sweep,
    simulate_recording,
)
from rfswarm.trough import splice_values

LAM = 0.3275


class TestIdealPhase:
    def test_zero_distance(self):
        assert ideal_phase(0.0, LAM, 0.0) == 0.0

    @pytest.mark.parametrize("lam", [0.3275, DEFAULT_WAVELENGTH, 0.1, 1.0])
    def test_half_wavelength_wraps_to_zero(self, lam):
        assert ideal_phase(lam / 2, lam, 0.0) == 0.0

    def test_quarter_wrap(self):
        assert ideal_phase(LAM / 8, LAM, 0.0) == pytest.approx(math.pi / 2, abs=1e-15)

    def test_regression_value(self):
        # (4*pi*1.5/0.3275 + 0.7) mod 2*pi, evaluated at 50 digits with mpmath
        assert ideal_phase(1.5, LAM, 0.7) == pytest.approx(1.7072281790135214963, rel=1e-13)

    @pytest.mark.parametrize("lam", [0.0, -0.3, float("nan"), float("inf")])
    def test_bad_wavelength(self, lam):
        with pytest.raises(InvalidParameterError):
            ideal_phase(1.0, lam)

    def test_negative_distance(self):
        with pytest.raises(InvalidParameterError):
            ideal_phase(-0.1, LAM)

    def test_vectorised(self):
        d = np.array([0.0, LAM / 8, LAM / 2])
        np.testing.assert_allclose(ideal_phase(d, LAM), [0.0, math.pi / 2, 0.0], atol=1e-15)

    @settings(max_examples=200, deadline=None)
    @given(
        st.floats(0, 50, allow_nan=False),
        st.floats(0.05, 2.0),
        st.floats(0, 2 * math.pi, exclude_max=True),
    )
    def test_range(self, d, lam, mu):
        theta = ideal_phase(d, lam, mu)
        assert 0.0 <= theta < 2 * math.pi


class TestAnalyticRate:
    def test_zero_at_closest_approach(self):
        x0, v = -1.2, 0.15
        assert analytic_phase_rate(x0, 0.7, v, -x0 / v, LAM) == 0.0

    def test_stationary(self):
        for t in (0.0, 1.0, 7.5):
            assert analytic_phase_rate(-1.0, 0.5, 0.0, t, LAM) == 0.0

    def test_singular(self):
        with pytest.raises(SingularityError):
            analytic_phase_rate(0.0, 0.0, 0.15, 0.0, LAM)

    def test_matches_finite_difference(self):
        # oracle: central difference of the wrapped-then-spliced phase law
        x0, y0, v = -1.0, 0.5, 0.15
        h = 1e-3
        t = np.array([-h, 0.0, h])
        d = np.sqrt((x0 + v * t) ** 2 + y0**2)
        theta = splice_values(ideal_phase(d, LAM))
        fd = (theta[2] - theta[0]) / (2 * h)
        assert analytic_phase_rate(x0, y0, v, 0.0, LAM) == pytest.approx(fd, abs=1e-6)
        # 50-digit central difference of the unwrapped law
        assert analytic_phase_rate(x0, y0, v, 0.0, LAM) == pytest.approx(-5.1479558334344254484, rel=1e-12)

    def test_smaller_offset_changes_faster(self):
        near = abs(analytic_phase_rate(-1.0, 0.3, 0.15, 0.0, LAM))
        far = abs(analytic_phase_rate(-1.0, 0.9, 0.15, 0.0, LAM))
        assert near > far


class TestReaderConfig:
    def test_defaults(self):
        r = ReaderConfig()
        assert r.frequency == 915e6
        assert r.wavelength == pytest.approx(0.32764203060109289617, rel=1e-15)

    def test_out_of_band(self):
        with pytest.raises(InvalidParameterError):
            ReaderConfig(frequency=2.4e9)
        assert ReaderConfig(frequency=2.4e9, allow_out_of_band=True).wavelength < 0.2

    def test_wavelength_tracks_frequency(self):
        assert ReaderConfig(frequency=902e6).wavelength == pytest.approx(299792458.0 / 902e6)

    def test_rounds_per_second(self):
        with pytest.raises(InvalidParameterError):
            ReaderConfig(rounds_per_second=0)


class TestMakeAxisSweep:
    def test_two_drones(self):
        drones = [DroneSpec("a", (0.0, 1.5, 0.0)), DroneSpec("b", (0.2, 1.5, 0.0))]
        trajs = make_axis_sweep(drones, "x", 0.15, 10.0)
        assert [t.velocity for t in trajs] == [(0.15, 0.0, 0.0)] * 2
        assert [t.start for t in trajs] == [(0.0, 1.5, 0.0), (0.2, 1.5, 0.0)]

    def test_spacing_violation(self):
        drones = [DroneSpec("a", (0.0, 1.5, 0.0)), DroneSpec("b", (0.1, 1.5, 0.0))]
        with pytest.raises(FormationError) as err:
            make_axis_sweep(drones, "x", 0.15, 10.0)
        assert err.value.pairs[0][:2] == ("a", "b")
        assert "a-b" in str(err.value)

    def test_empty(self):
        assert make_axis_sweep([], "y", 0.15, 10.0) == []

    def test_bad_speed_and_axis(self):
        with pytest.raises(InvalidParameterError):
            make_axis_sweep([], "x", 0.0, 10.0)
        with pytest.raises(InvalidParameterError):
            make_axis_sweep([], "w", 0.15, 10.0)

    def test_trajectory_invariants(self):
        with pytest.raises(InvalidParameterError):
            DroneTrajectory("a", "t", (0, 0, 0), (0.1, 0.1, 0), 1.0)
        with pytest.raises(InvalidParameterError):
            DroneTrajectory("a", "t", (0, 0, 0), (0.1, 0, 0), 0.0)
        with pytest.raises(InvalidParameterError):
            DroneTrajectory("a", "t", (0, 0, 0), (0.1, 0, 0), 1.0, 2 * math.pi)

    def test_plan_preserves_formation(self, staggered, reader):
        for axis in "xyz":
            trajs = plan_sweep(staggered, axis, 0.15, reader)
            starts = np.array([t.start for t in trajs])
            offsets = np.array([d.position for d in staggered])
            np.testing.assert_allclose(starts - starts[0], offsets - offsets[0], atol=1e-12)
            # the formation centre crosses the reader's coordinate mid-sweep
            a = "xyz".index(axis)
            mid = starts[:, a].mean() + 0.15 * trajs[0].duration / 2
            assert mid == pytest.approx(0.0, abs=1e-12)


class TestNoiseModel:
    def test_validation(self):
        with pytest.raises(InvalidParameterError):
            NoiseModel(1, phase_sigma=-0.1)
        with pytest.raises(InvalidParameterError):
            NoiseModel(1, read_drop_prob=1.0)
        with pytest.raises(InvalidParameterError):
            NoiseModel(None)


def one_pass(reader, noise, speed=0.15):
    drone = DroneSpec("d", (0.0, 0.0, 0.0), "t", 0.0)
    return plan_sweep([drone], "x", speed, reader)


class TestSimulateRecording:
    def test_requires_trajectories(self, reader):
        with pytest.raises(InvalidParameterError):
            simulate_recording([], reader, NoiseModel(0))

    def test_noise_free_trough_at_closest_approach(self, reader):
        trajs = one_pass(reader, None)
        rec = simulate_recording(trajs, reader, NoiseModel(0))
        trace = rec.traces["t"]
        spliced = splice_values(trace.phase)
        t_star = closest_approach_time(trajs[0], reader)
        assert abs(trace.t[np.argmin(spliced)] - t_star) <= 1 / reader.rounds_per_second
        # phase at the minimum matches the law at the geometric minimum distance
        d_min = np.linalg.norm(trajs[0].position(t_star) - np.asarray(reader.position))
        assert trace.phase[np.argmin(spliced)] == pytest.approx(ideal_phase(d_min, reader.wavelength), abs=1e-3)

    def test_phases_in_range(self, reader, staggered):
        trajs = plan_sweep(staggered, "y", 0.15, reader)
        rec = simulate_recording(trajs, reader, NoiseModel(5, 0.8, 0.3))
        for tr in rec.traces.values():
            assert np.all((tr.phase >= 0) & (tr.phase < 2 * math.pi))
            assert np.all(np.diff(tr.t) > 0) and np.all(np.diff(tr.rounds) > 0)

    def test_sparse_trace_still_sorted(self, reader):
        rec = simulate_recording(one_pass(reader, None), reader, NoiseModel(3, 0.0, 1 - 1e-2))
        tr = rec.traces["t"]
        assert 0 < len(tr) < 50
        assert np.all(np.diff(tr.t) > 0)

    def test_deterministic(self, reader, staggered):
        trajs = plan_sweep(staggered, "z", 0.15, reader)
        noise = NoiseModel(11, 0.3, 0.2, (RotationEvent("tag-d1", 3.0, math.pi),))
        assert simulate_recording(trajs, reader, noise) == simulate_recording(trajs, reader, noise)
        other = simulate_recording(trajs, reader, NoiseModel(12, 0.3, 0.2))
        assert other != simulate_recording(trajs, reader, noise)

    def test_rotation_step_visible(self, reader):
        trajs = one_pass(reader, None)
        clean = simulate_recording(trajs, reader, NoiseModel(0)).traces["t"]
        rotated = simulate_recording(trajs, reader, NoiseModel(0, rotation_events=[("t", 2.0, math.pi)])).traces["t"]
        # oracle: difference against the clean trace isolates the injected step
        delta = np.mod(rotated.phase - clean.phase, 2 * math.pi)
        before = rotated.t < 2.0
        np.testing.assert_allclose(delta[before], 0.0, atol=1e-12)
        np.testing.assert_allclose(delta[~before], math.pi, atol=1e-9)
        # and the raw trace itself jumps at t = 2 s by more than the natural rate allows
        jumps = np.abs(np.angle(np.exp(1j * np.diff(rotated.phase))))
        k = int(np.searchsorted(rotated.t, 2.0))
        assert jumps[k - 1] > 2.5
        assert np.delete(jumps, k - 1).max() < 0.2

    def test_rate_matches_finite_difference_over_pass(self):
        # 1 kHz sampling; compare interior points against the closed form
        reader = ReaderConfig(rounds_per_second=1000.0)
        drone = DroneSpec("d", (0.0, 0.0, 0.0), "t", 0.0)
        (traj,) = plan_sweep([drone], "x", 0.15, reader, standoff=0.5, margin=1.0)
        rec = simulate_recording([traj], reader, NoiseModel(0))
        tr = rec.traces["t"]
        theta = splice_values(tr.phase)
        fd = (theta[2:] - theta[:-2]) / (tr.t[2:] - tr.t[:-2])
        t_mid = tr.t[1:-1]
        interior = (t_mid >= 0.1) & (t_mid <= traj.duration - 0.1)
        x0 = traj.start[0]
        rate = np.array([analytic_phase_rate(x0, 0.5, 0.15, t, reader.wavelength) for t in t_mid[interior]])
        assert np.max(np.abs(rate - fd[interior])) < 1e-3
