import math

import numpy as np
import pytest

from darkshelf.perturbations import dispersive_damping, linear_damping
from darkshelf.soliton import CoreParams, grey_profile
from darkshelf.simulator import (
    BoundaryContaminationError,
    FieldState,
    Grid,
    MeasurementError,
    SimBackground,
    SimConfig,
    conservation_residuals,
    conserved_quantities,
    frame_transform_state,
    initial_state,
    measure_core_minimum,
    measure_shelf,
    measure_sigma0_rate,
    run,
    track_edges,
    write_snapshot_csv,
)

BLACK = CoreParams.from_background(1.0, math.pi)
GREY = CoreParams.from_background(1.0, 4 * math.pi / 5)


def small_run(params, epsilon=0.0, pert=None, z_max=3.0, n=1024, L=50.0, shift=None):
    grid = Grid(half_width=L, n_points=n)
    cfg = SimConfig(epsilon=epsilon, perturbation=pert)
    bg = SimBackground.constant(params.u_inf)
    snaps = run(cfg, grid, initial_state(params, grid), bg, z_max, shift_fn=shift)
    return grid, cfg, bg, snaps


class TestGridAndConfig:
    def test_grid_invariants(self):
        with pytest.raises(ValueError):
            Grid(half_width=10.0, n_points=128)
        g = Grid(half_width=50.0, n_points=1000)
        assert g.dt == pytest.approx(0.1)
        assert g.t[0] == pytest.approx(-50.0 + 0.05)
        assert g.t[-1] == pytest.approx(50.0 - 0.05)
        # Cell-centered grid is symmetric about t = 0.
        np.testing.assert_allclose(g.t + g.t[::-1], 0.0, atol=1e-12)

    def test_dz_stability_bound(self):
        g = Grid(half_width=50.0, n_points=1024)
        cfg = SimConfig(dz=1.0)
        with pytest.raises(ValueError):
            cfg.resolve(g, 1.0)

    def test_perturbation_required_with_epsilon(self):
        with pytest.raises(ValueError):
            SimConfig(epsilon=0.1)

    def test_boundary_mode(self):
        with pytest.raises(ValueError):
            SimConfig(boundary="periodic")

    def test_domain_size_guard(self):
        grid = Grid(half_width=20.0, n_points=512)
        bg = SimBackground.constant(1.0)
        with pytest.raises(ValueError):
            run(SimConfig(), grid, initial_state(BLACK, grid), bg, z_max=10.0)


class TestUnperturbedFidelity:
    def test_black_short_run(self):
        grid, _, _, snaps = small_run(BLACK, z_max=3.0)
        exact = grey_profile(BLACK, grid.t)
        err = max(np.max(np.abs(s.samples - exact)) for s in snaps)
        assert err < 5e-5

    def test_grey_minimum_tracks_velocity(self):
        grid, _, _, snaps = small_run(GREY, z_max=5.0, shift=lambda z: GREY.A * z)
        pos, val = measure_core_minimum(snaps[-1], grid)
        assert pos == pytest.approx(GREY.A * snaps[-1].z, abs=1e-3)
        assert val == pytest.approx(abs(GREY.A), abs=1e-3)
        assert snaps[-1].frame.accumulated_shift == pytest.approx(GREY.A * snaps[-1].z)


class TestFrameTransformState:
    def test_round_trip_and_quarter_turn(self):
        grid = Grid(half_width=50.0, n_points=512)
        state = FieldState(z=math.pi / 2, samples=np.ones(512, dtype=complex))
        up = frame_transform_state(state, 1.0, "u_to_U")
        np.testing.assert_allclose(up.samples, 1j, atol=1e-12)
        back = frame_transform_state(up, 1.0, "U_to_u")
        np.testing.assert_allclose(back.samples, state.samples, atol=1e-12)


class TestGridRefinement:
    def test_fourth_order_convergence_in_dt(self):
        errs = []
        for n in (1024, 2048):
            grid, _, _, snaps = small_run(BLACK, z_max=5.0, n=n, L=50.0)
            exact = grey_profile(BLACK, grid.t)
            errs.append(float(np.max(np.abs(snaps[-1].samples - exact))))
        assert errs[0] / errs[1] > 10.0  # ~16 for a clean 4th-order scheme


class TestConservedQuantities:
    def test_constant_background_all_zero(self):
        grid = Grid(half_width=50.0, n_points=512)
        state = FieldState(z=0.0, samples=np.full(512, 1.0 + 0j))
        q = conserved_quantities(state, grid, 1.0)
        # H picks up squared one-sided-stencil roundoff (~1e-31); the rest
        # vanish identically.
        assert abs(q.H) < 1e-20
        assert (q.E, q.I, q.R) == (0.0, 0.0, 0.0)

    def test_black_profile_values(self):
        grid = Grid(half_width=60.0, n_points=4096)
        state = FieldState(z=0.0, samples=grey_profile(BLACK, grid.t))
        q = conserved_quantities(state, grid, 1.0)
        assert q.E == pytest.approx(2.0, abs=1e-8)
        assert q.I == pytest.approx(0.0, abs=1e-8)
        assert q.H == pytest.approx(4.0 / 3.0, abs=1e-7)

    def test_grey_momentum_value(self):
        grid = Grid(half_width=60.0, n_points=4096)
        state = FieldState(z=0.0, samples=grey_profile(GREY, grid.t))
        q = conserved_quantities(state, grid, 1.0)
        assert q.I == pytest.approx(-0.587785252292473, abs=1e-8)

    def test_unperturbed_conservation(self):
        grid, cfg, bg, snaps = small_run(BLACK, z_max=3.0)
        res = conservation_residuals(snaps, grid, cfg, bg)
        for law, val in res.items():
            assert val < 1e-6, law

    def test_dRdz_matches_momentum_for_moving_soliton(self):
        grid, cfg, bg, snaps = small_run(GREY, z_max=3.0)
        res = conservation_residuals(snaps, grid, cfg, bg)
        assert res["R"] < 1e-5

    def test_perturbed_residuals(self):
        # Residuals evaluated after the shelf-formation transient, where the
        # centered z-differences of the developed quantities are clean.
        grid, cfg, bg, snaps = small_run(
            BLACK, epsilon=0.05, pert=dispersive_damping(1.0), z_max=12.0, n=2048, L=50.0
        )
        developed = [s for s in snaps if s.z >= 6.0]
        res = conservation_residuals(developed, grid, cfg, bg)
        assert res["E"] < 1e-4
        assert res["I"] < 1e-4
        assert res["H"] < 1e-4
        assert res["R"] < 1e-4

    def test_needs_three_snapshots(self):
        grid, cfg, bg, snaps = small_run(BLACK, z_max=1.0)
        with pytest.raises(ValueError):
            conservation_residuals(snaps[:2], grid, cfg, bg)


class TestBoundaryHandling:
    def test_boundary_samples_pinned(self):
        grid, _, _, snaps = small_run(BLACK, z_max=3.0)
        for s in snaps:
            assert abs(abs(s.samples[0]) - 1.0) < 1e-6
            assert abs(abs(s.samples[-1]) - 1.0) < 1e-6

    def test_total_phase_difference_constant(self):
        grid, _, _, snaps = small_run(
            GREY, epsilon=0.05, pert=dispersive_damping(1.0), z_max=6.0, n=1024, L=50.0
        )
        jumps = [np.angle(s.samples[-1]) - np.angle(s.samples[0]) for s in snaps]
        assert max(abs(j - jumps[0]) for j in jumps) < 1e-6

    def test_contamination_detected_for_offset_soliton(self):
        params = CoreParams.from_background(1.0, math.pi, t0=40.0)
        grid = Grid(half_width=50.0, n_points=1024)
        bg = SimBackground.constant(1.0)
        with pytest.raises(BoundaryContaminationError):
            run(SimConfig(), grid, initial_state(params, grid), bg, z_max=12.0)


def synthetic_shelf(grid, eps, q1p, q1m, p1tp, p1tm, s_l, s_r, u_inf=1.0, B=1.0):
    """Analytic plateau field: core + flat shelves with linear phase ramps."""
    T = grid.t
    mag = u_inf + eps * np.where(
        (T > 0) & (T < s_r), q1p, np.where((T < 0) & (T > s_l), q1m, 0.0)
    )
    core = np.abs(grey_profile(CoreParams.from_background(u_inf, math.pi), T))
    mag = np.minimum(mag, np.where(np.abs(T) < 8, core + eps * q1p, np.inf))
    phase = eps * np.where(
        T >= 0, p1tp * np.clip(T, 0, s_r), p1tm * np.clip(T, s_l, 0)
    )
    return FieldState(z=30.0, samples=mag * np.exp(1j * phase))


class TestShelfMeasurement:
    def test_synthetic_plateaus_recovered(self):
        grid = Grid(half_width=100.0, n_points=4096)
        eps = 0.05
        state = synthetic_shelf(grid, eps, -0.66, -0.44, 1.32, -0.88, -39.0, 21.0)
        m = measure_shelf(state, grid, (-39.0, 21.0), eps, 1.0, 1.0)
        assert m.q1_plus == pytest.approx(-0.66, rel=1e-6)
        assert m.q1_minus == pytest.approx(-0.44, rel=1e-6)
        assert m.phi1t_plus == pytest.approx(1.32, rel=1e-6)
        assert m.phi1t_minus == pytest.approx(-0.88, rel=1e-6)
        assert m.flat_right and m.flat_left
        assert m.edge_right == pytest.approx(21.0, abs=0.2)
        assert m.edge_left == pytest.approx(-39.0, abs=0.2)

    def test_narrow_plateau_rejected(self):
        grid = Grid(half_width=100.0, n_points=4096)
        state = synthetic_shelf(grid, 0.05, -0.66, -0.44, 1.32, -0.88, -5.0, 5.0)
        with pytest.raises(MeasurementError):
            measure_shelf(state, grid, (-5.0, 5.0), 0.05, 1.0, 1.0)

    def test_epsilon_zero_rejected(self):
        grid = Grid(half_width=100.0, n_points=512)
        state = FieldState(z=1.0, samples=np.ones(512, dtype=complex))
        with pytest.raises(ValueError):
            measure_shelf(state, grid, (-5.0, 5.0), 0.0, 1.0, 1.0)


class TestEdgeTracking:
    def test_synthetic_moving_edges(self):
        grid = Grid(half_width=100.0, n_points=2048)
        eps = 0.05
        snaps = []
        for z in np.arange(10.0, 30.5, 1.0):
            state = synthetic_shelf(grid, eps, -0.66, -0.66, 0.0, 0.0, -z, z)
            snaps.append(FieldState(z=z, samples=state.samples))
        tr = track_edges(snaps, grid, eps * -0.66, eps * -0.66, (10.0, 30.0))
        assert tr["speed_right"] == pytest.approx(1.0, abs=0.02)
        assert tr["speed_left"] == pytest.approx(-1.0, abs=0.02)


class TestSigmaRate:
    def test_unperturbed_rate_is_zero(self):
        grid, _, _, snaps = small_run(BLACK, z_max=3.0, n=2048)
        rate = measure_sigma0_rate(snaps, grid, 2.0, 0.0)
        assert abs(rate) < 1e-6

    def test_probe_at_center_rejected(self):
        grid, _, _, snaps = small_run(BLACK, z_max=1.0)
        with pytest.raises(ValueError):
            measure_sigma0_rate(snaps, grid, 0.0, 0.0)

    def test_probe_overtaken_detected(self):
        grid, _, _, snaps = small_run(BLACK, z_max=3.0)
        with pytest.raises(MeasurementError):
            measure_sigma0_rate(snaps, grid, 5.0, 0.05, edges_fn=lambda z: (-z, z))


class TestSnapshotDump:
    def test_csv_format(self, tmp_path):
        grid = Grid(half_width=50.0, n_points=512)
        state = FieldState(z=1.5, samples=np.full(512, 0.5 - 0.25j))
        path = write_snapshot_csv(state, grid, tmp_path, "runx")
        lines = open(path).read().splitlines()
        assert path.endswith("runx_z1.5.csv")
        assert lines[0] == "z,1.5"
        assert len(lines) == 1 + 512
        t, re, im = lines[1].split(",")
        assert float(re) == 0.5 and float(im) == -0.25
        assert float(t) == pytest.approx(grid.t[0])
