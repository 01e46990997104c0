"""Experiment harness: configs, presets, prediction/comparison pipelines.

A configuration is a plain JSON document with keys {perturbation, epsilon,
soliton, grid, run, observables, outputs}.  ``predict`` integrates the slow
parameter cascade only; ``compare`` additionally runs the PDE, measures the
shelf observables and grades them against the asymptotic predictions.

Measurement protocol notes (dispersive-damping validation runs):

* Shelf plateaus are averaged over [margin, 0.7 S_side] per side, with the
  margin set so the bare-core tail biases the plateau by under 5%, and the
  measurement distance chosen per side so the slow edge has opened a usable
  window before second-order drift accumulates.
* A is measured kinematically: the dip velocity fitted over the two halves
  of the decade before the measurement distance must agree (A_rate = 0).
* Edge trajectories use quarter-level crossings (see track_edges); the
  sigma0 probe sits on the fast (left) side of the core where the edge-speed
  bias is smallest.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import asymptotics, boundary_layer, simulator
from .perturbations import BUILTINS, Perturbation
from .soliton import CoreParams

FMT = "{:.17g}"


class ConfigError(ValueError):
    """Configuration validation failure; message names the offending field."""


@dataclass(frozen=True)
class ComparisonRow:
    name: str
    predicted: float
    measured: float
    tolerance: float
    relative: bool = True

    @property
    def error(self) -> float:
        if self.relative:
            scale = abs(self.predicted) if self.predicted != 0 else 1.0
            return float(abs(self.measured - self.predicted) / scale)
        return float(abs(self.measured - self.predicted))

    @property
    def passed(self) -> bool:
        return bool(self.error <= self.tolerance)

    def as_dict(self) -> dict[str, Any]:
        def finite(v):
            return v if math.isfinite(v) else None

        return {
            "name": self.name,
            "predicted": float(self.predicted),
            "measured": finite(float(self.measured)),
            "error": finite(self.error),
            "tolerance": float(self.tolerance),
            "relative": bool(self.relative),
            "pass": self.passed,
        }


@dataclass
class ComparisonReport:
    rows: list[ComparisonRow] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def add(self, *args, **kwargs):
        self.rows.append(ComparisonRow(*args, **kwargs))

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    def sorted(self) -> "ComparisonReport":
        return ComparisonReport(rows=sorted(self.rows, key=lambda r: r.name), notes=list(self.notes))

    def as_dict(self) -> dict[str, Any]:
        rows = [r.as_dict() for r in sorted(self.rows, key=lambda r: r.name)]
        return {"pass": self.passed, "rows": rows, "notes": sorted(self.notes)}

    def table(self) -> str:
        lines = [f"{'observable':38s} {'predicted':>13s} {'measured':>13s} {'error':>9s} {'tol':>7s}  verdict"]
        for r in sorted(self.rows, key=lambda r: r.name):
            lines.append(
                f"{r.name:38s} {r.predicted:13.6g} {r.measured:13.6g} "
                f"{r.error:9.3g} {r.tolerance:7.3g}  {'pass' if r.passed else 'FAIL'}"
            )
        return "\n".join(lines)


PRESETS: dict[str, dict] = {
    "black_dispersive": {
        "perturbation": {"label": "dispersive_damping", "gamma": 1.0},
        "epsilon": 0.05,
        "soliton": {"u_inf": 1.0, "delta_phi0": math.pi, "t0": 0.0, "sigma0": 0.0},
        "grid": {"half_width": 100.0, "n_points": 4096},
        "run": {"z_max": 30.0, "snapshot_dz": 0.5},
        "observables": ["shelf", "black_balance", "sigma0", "edges", "t0", "layer"],
        "outputs": ["report"],
    },
    "grey_dispersive": {
        "perturbation": {"label": "dispersive_damping", "gamma": 1.0},
        "epsilon": 0.05,
        "soliton": {"u_inf": 1.0, "delta_phi0": 4 * math.pi / 5, "t0": 0.0, "sigma0": 0.0},
        "grid": {"half_width": 100.0, "n_points": 2048},
        "run": {"z_max": 30.0, "snapshot_dz": 0.5},
        "observables": ["shelf", "a_constancy", "sigma0", "edges"],
        "outputs": ["report"],
    },
    "black_unperturbed": {
        "perturbation": None,
        "epsilon": 0.0,
        "soliton": {"u_inf": 1.0, "delta_phi0": math.pi, "t0": 0.0, "sigma0": 0.0},
        "grid": {"half_width": 100.0, "n_points": 4096},
        "run": {"z_max": 10.0, "snapshot_dz": 0.5},
        "observables": ["fidelity"],
        "outputs": ["report"],
    },
    "grey_linear_damping": {
        "perturbation": {"label": "linear_damping", "Gamma": 0.5},
        "epsilon": 0.05,
        "soliton": {"u_inf": 1.0, "delta_phi0": 4 * math.pi / 5, "t0": 0.0, "sigma0": 0.0},
        "grid": {"half_width": 100.0, "n_points": 2048},
        "run": {"z_max": 20.0, "snapshot_dz": 0.5},
        "observables": ["shelf"],
        "outputs": ["report"],
    },
}


def load_config(source) -> dict:
    """Load a config dict from a preset name, path, or dict."""
    if isinstance(source, dict):
        return json.loads(json.dumps(source))
    if source in PRESETS:
        return json.loads(json.dumps(PRESETS[source]))
    if os.path.exists(source):
        with open(source, encoding="utf-8") as fh:
            return json.load(fh)
    raise ConfigError(f"config: no preset or file named {source!r}")


def _field(cfg: dict, path: str, typ, required=True, default=None):
    node = cfg
    parts = path.split(".")
    for p in parts[:-1]:
        node = node.get(p) or {}
    val = node.get(parts[-1], None)
    if val is None:
        if required:
            raise ConfigError(f"{path}: required field missing")
        return default
    try:
        return typ(val)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc


@dataclass(frozen=True)
class Experiment:
    """Validated, ready-to-run experiment."""

    params: CoreParams
    perturbation: Perturbation | None
    epsilon: float
    grid: simulator.Grid
    z_max: float
    snapshot_dz: float
    observables: tuple[str, ...]
    outputs: tuple[str, ...]
    raw: dict


def validate(cfg: dict) -> Experiment:
    eps = _field(cfg, "epsilon", float)
    pert_cfg = cfg.get("perturbation")
    pert = None
    if pert_cfg is not None:
        label = pert_cfg.get("label")
        if label not in BUILTINS:
            raise ConfigError(f"perturbation.label: unknown {label!r} (have {sorted(BUILTINS)})")
        strengths = {k: float(v) for k, v in pert_cfg.items() if k != "label"}
        try:
            pert = BUILTINS[label](**strengths)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"perturbation: {exc}") from exc
    if eps != 0.0 and pert is None:
        raise ConfigError("perturbation: required when epsilon != 0")
    u_inf = _field(cfg, "soliton.u_inf", float)
    dphi = _field(cfg, "soliton.delta_phi0", float)
    t0 = _field(cfg, "soliton.t0", float, required=False, default=0.0)
    sigma0 = _field(cfg, "soliton.sigma0", float, required=False, default=0.0)
    try:
        params = CoreParams.from_background(u_inf, dphi, t0=t0, sigma0=sigma0)
    except ValueError as exc:
        raise ConfigError(f"soliton: {exc}") from exc
    z_max = _field(cfg, "run.z_max", float)
    snapshot_dz = _field(cfg, "run.snapshot_dz", float, required=False, default=0.5)
    grid_cfg = cfg.get("grid") or auto_grid(params, z_max)
    try:
        grid = simulator.Grid(
            half_width=float(grid_cfg["half_width"]), n_points=int(grid_cfg["n_points"])
        )
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"grid: {exc}") from exc
    if grid.half_width < 3.0 * u_inf * z_max:
        raise ConfigError(
            f"grid.half_width: {grid.half_width} < 3*u_inf*z_max = {3 * u_inf * z_max}"
        )
    observables = tuple(
        cfg["observables"] if "observables" in cfg and cfg["observables"] is not None
        else default_observables(params)
    )
    outputs = tuple(cfg.get("outputs") or ("report",))
    return Experiment(
        params=params,
        perturbation=pert,
        epsilon=eps,
        grid=grid,
        z_max=z_max,
        snapshot_dz=snapshot_dz,
        observables=observables,
        outputs=outputs,
        raw=cfg,
    )


def default_observables(params: CoreParams) -> list[str]:
    if params.is_black:
        return ["shelf", "black_balance", "sigma0", "edges", "t0", "layer"]
    return ["shelf", "a_constancy"]


def auto_grid(params: CoreParams, z_max: float) -> dict:
    """Grid sized so edges stay inside L/3 and dt is about 0.1 or finer."""
    half = math.ceil(3.0 * params.u_inf * z_max * 1.05 + 5.0)
    n = 512 * math.ceil(2.0 * half / 0.1 / 512)
    return {"half_width": float(half), "n_points": int(max(n, 512))}


def shelf_margin(params: CoreParams, epsilon: float, q1_side: float, bias: float = 0.05) -> float:
    """Comoving offset beyond which the bare-core tail biases (|u|-u_inf)/eps
    by less than ``bias`` of the plateau value."""
    B, u = params.B, params.u_inf
    return math.log(40.0 * B * B / (u * abs(epsilon * q1_side) * bias / 0.05)) / (2.0 * B)


def measurement_distance(params: CoreParams, epsilon: float, q1_side: float, side: int) -> float:
    """Distance at which the plateau window on ``side`` has ~3 units of room.

    The 1.25 headroom lets the slowly opening window outrun the plateau
    formation transient; shallow solitons (small u_inf - A) need long runs.
    """
    speed = params.u_inf - side * params.A
    margin = shelf_margin(params, epsilon, q1_side)
    z = 1.25 * (margin + 3.0) / (0.7 * speed)
    return max(20.0, 5.0 * math.ceil(z / 5.0))


# -- Pipelines ---------------------------------------------------------------


def predict(exp: Experiment, samples: int = 121) -> asymptotics.ParameterTrajectory:
    """Asymptotics only: slow trajectory of core and shelf parameters."""
    return asymptotics.evolve_core_parameters(
        exp.perturbation, exp.params, exp.epsilon, exp.z_max, samples=samples
    )


def simulate(exp: Experiment, traj: asymptotics.ParameterTrajectory | None = None):
    """Run the PDE; returns (snapshots, background, trajectory)."""
    if traj is None:
        traj = predict(exp)
    if exp.epsilon == 0.0:
        background = simulator.SimBackground.constant(exp.params.u_inf)
    else:
        background = simulator.SimBackground.from_perturbation(
            exp.perturbation, exp.epsilon, exp.params.u_inf
        )
    cfg = simulator.SimConfig(epsilon=exp.epsilon, perturbation=exp.perturbation)
    dz, _, _ = cfg.resolve(exp.grid, exp.z_max)
    stride = max(1, round(exp.snapshot_dz / dz))
    cfg = simulator.SimConfig(
        epsilon=exp.epsilon, perturbation=exp.perturbation, output_stride=stride
    )
    initial = simulator.initial_state(exp.params, exp.grid)
    snapshots = simulator.run(
        cfg, exp.grid, initial, background, exp.z_max, shift_fn=traj.comoving_shift
    )
    return snapshots, background, traj


def _edges_at(traj: asymptotics.ParameterTrajectory, zeta: float) -> tuple[float, float]:
    u = np.array([p.u_inf for p in traj.params])
    A = np.array([p.A for p in traj.params])
    return boundary_layer.shelf_edges(traj.z, u, A, zeta)


def _snapshot_at(snapshots, z: float):
    return snapshots[int(np.argmin([abs(s.z - z) for s in snapshots]))]


def compare(exp: Experiment) -> tuple[ComparisonReport, dict]:
    """Full validation: simulate, measure, grade against the asymptotics.

    Returns the report plus an artifact dict {snapshots, traj, background}
    for emission.
    """
    snapshots, background, traj = simulate(exp)
    report = ComparisonReport()
    params = exp.params
    eps = exp.epsilon
    sh0 = traj.shelf[0]
    final = snapshots[-1]
    artifacts = {"snapshots": snapshots, "traj": traj, "background": background, "exp": exp}

    if "fidelity" in exp.observables:
        from .soliton import grey_profile

        exact = grey_profile(params, exp.grid.t - traj.comoving_shift(final.z))
        dev = float(np.max(np.abs(final.samples - exact)))
        report.add("fidelity_max_pointwise_dev", 0.0, dev, 1e-6, relative=False)
        q = [simulator.conserved_quantities(s, exp.grid, background.u_inf_fn(s.z)) for s in snapshots]
        for name in "HEI":
            series = np.array([getattr(c, name) for c in q])
            drift = float(np.max(np.abs(series - series[0]))) / max(1.0, abs(series[0]))
            report.add(f"conservation_drift_{name}", 0.0, drift, 1e-6, relative=False)
        zs = np.array([s.z for s in snapshots])
        rser = np.array([c.R for c in q])
        iser = np.array([c.I for c in q])
        dR = np.gradient(rser, zs)
        report.add(
            "dRdz_plus_I_residual", 0.0, float(np.max(np.abs(dR + iser))), 1e-5, relative=False
        )

    def guarded(block, fallback_rows):
        """Measurement failures become failed rows rather than crashes."""
        try:
            block()
        except (simulator.MeasurementError, ValueError) as exc:
            for name, predicted, tol, rel in fallback_rows:
                report.add(name, predicted, float("nan"), tol, relative=rel)
            report.notes.append(f"{fallback_rows[0][0]}: {exc}")

    if "shelf" in exp.observables and eps != 0.0:
        for side, q1_pred in ((+1, sh0.q1_plus), (-1, sh0.q1_minus)):
            tag = "plus" if side > 0 else "minus"

            def block(side=side, q1_pred=q1_pred, tag=tag):
                z_m = min(measurement_distance(params, eps, q1_pred, side), exp.z_max)
                snap = _snapshot_at(snapshots, z_m)
                margin = shelf_margin(params, eps, q1_pred)
                m = simulator.measure_shelf(
                    snap, exp.grid, _edges_at(traj, snap.z), eps, params.u_inf, params.B,
                    core_margin=margin, sides=(tag,),
                )
                got = m.q1_plus if side > 0 else m.q1_minus
                report.add(f"eps_q1_{tag}", eps * q1_pred, eps * got, 0.10)

            guarded(block, [(f"eps_q1_{tag}", eps * q1_pred, 0.10, True)])

    if "black_balance" in exp.observables and eps != 0.0:

        def block():
            m = simulator.measure_shelf(
                final, exp.grid, _edges_at(traj, final.z), eps, params.u_inf, params.B
            )
            # Signed convention: the left-side magnitude correction flips sign.
            signed_diff = eps * (m.q1_plus + m.q1_minus)
            report.add("eps_q1_diff_signed", eps * 2.0 * sh0.q1_plus, signed_diff, 0.10)
            report.add("phi1t_sum", 0.0, m.phi1t_plus + m.phi1t_minus, 0.005, relative=False)

        guarded(block, [("eps_q1_diff_signed", eps * 2.0 * sh0.q1_plus, 0.10, True),
                        ("phi1t_sum", 0.0, 0.005, False)])

    if "sigma0" in exp.observables and eps != 0.0:

        def block():
            probe = -2.0 / params.B
            sel = [s for s in snapshots if 10.0 <= s.z <= exp.z_max]
            rate = simulator.measure_sigma0_rate(sel, exp.grid, probe, eps)
            report.add("sigma0_rate", sh0.sigma0_rate, rate, 0.05)

        guarded(block, [("sigma0_rate", sh0.sigma0_rate, 0.05, True)])

    if "edges" in exp.observables and eps != 0.0:

        def block():
            tr = simulator.track_edges(
                snapshots, exp.grid, eps * sh0.q1_plus, eps * sh0.q1_minus,
                z_window=(10.0, exp.z_max),
            )
            report.add("edge_speed_right", params.u_inf - params.A, tr["speed_right"], 0.05)
            report.add("edge_speed_left", -(params.u_inf + params.A), tr["speed_left"], 0.05)
            artifacts["edges"] = tr

        guarded(block, [("edge_speed_right", params.u_inf - params.A, 0.05, True),
                        ("edge_speed_left", -(params.u_inf + params.A), 0.05, True)])

    if "t0" in exp.observables:
        p0, _ = simulator.measure_core_minimum(snapshots[0], exp.grid)
        p1, _ = simulator.measure_core_minimum(final, exp.grid)
        drift = (p1 - traj.comoving_shift(final.z)) - (p0 - traj.comoving_shift(0.0))
        report.add("t0_drift", 0.0, abs(drift), 0.1, relative=False)

    if "a_constancy" in exp.observables and eps != 0.0:

        def block():
            z_m = min(measurement_distance(params, eps, sh0.q1_plus, +1), exp.z_max)
            zs = np.array([s.z for s in snapshots])
            pos = np.array([simulator.measure_core_minimum(s, exp.grid)[0] for s in snapshots])
            vels = []
            for lo, hi in [(z_m - 10.0, z_m - 5.0), (z_m - 5.0, z_m)]:
                m = (zs >= lo) & (zs <= hi)
                if m.sum() < 4:
                    raise simulator.MeasurementError("too few snapshots for a velocity fit")
                vels.append(float(np.polyfit(zs[m], pos[m], 1)[0]))
            scale = params.A if abs(params.A) > 0.05 * params.u_inf else params.u_inf
            report.add("A_velocity_constancy", 0.0, abs(vels[1] - vels[0]) / scale, 0.02,
                       relative=False)

        guarded(block, [("A_velocity_constancy", 0.0, 0.02, False)])

    if "layer" in exp.observables and eps != 0.0:

        def block():
            dev = _layer_deviation(exp, traj, final)
            report.add("layer_max_deviation", 0.0, dev, 0.2 * abs(eps), relative=False)

        guarded(block, [("layer_max_deviation", 0.0, 0.2 * abs(eps), False)])

    return report.sorted(), artifacts


def _layer_deviation(exp: Experiment, traj, snap) -> float:
    """Max |sim - (u_inf + eps w)| over the right-edge layer window |xi| <= 5."""
    params = exp.params
    sh0 = traj.shelf[0]
    s_l, s_r = _edges_at(traj, snap.z)
    layer = boundary_layer.LayerProfile.at_edge("right", params.u_inf, sh0.q1_plus)
    width = 5.0 * snap.z ** (1.0 / 3.0) / abs(layer.a)
    x = np.linspace(-width, width, 257)
    T = exp.grid.t - snap.frame.accumulated_shift
    sim = np.interp(x + s_r, T, np.abs(snap.samples))
    pred = params.u_inf + exp.epsilon * boundary_layer.shelf_magnitude_profile(layer, snap.z, x)
    return float(np.max(np.abs(sim - pred)))


# -- Output emission ---------------------------------------------------------


def _writerows(path: str, header: list[str], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(FMT.format(v) for v in row) + "\n")


def emit_plotdata(artifacts: dict, kinds, out_dir: str, run_id: str) -> list[str]:
    """Write CSV plot data; returns the created paths."""
    os.makedirs(out_dir, exist_ok=True)
    exp: Experiment = artifacts["exp"]
    traj = artifacts["traj"]
    snapshots = artifacts["snapshots"]
    written = []
    for kind in kinds:
        if kind == "report":
            continue
        path = os.path.join(out_dir, f"{run_id}_{kind}.csv")
        if kind == "snapshots":
            for s in snapshots:
                written.append(simulator.write_snapshot_csv(s, exp.grid, out_dir, run_id))
            continue
        if kind == "profile":
            s = snapshots[-1]
            pred = _composite_magnitude(exp, traj, s)
            rows = zip(exp.grid.t, s.samples.real, s.samples.imag, np.abs(s.samples),
                       np.unwrap(np.angle(s.samples)), pred)
            _writerows(path, ["t", "re", "im", "abs", "phase", "predicted_abs"], rows)
        elif kind == "contour":
            stride = max(1, exp.grid.n_points // 512)
            t_sub = exp.grid.t[::stride]
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write("z," + ",".join(FMT.format(t) for t in t_sub) + "\n")
                for s in snapshots:
                    fh.write(FMT.format(s.z) + "," +
                             ",".join(FMT.format(v) for v in np.abs(s.samples[::stride])) + "\n")
            epath = os.path.join(out_dir, f"{run_id}_contour_edges.csv")
            rows = []
            for s in snapshots:
                s_l, s_r = _edges_at(traj, s.z)
                shift = traj.comoving_shift(s.z)
                rows.append((s.z, s_l + shift, s_r + shift))
            _writerows(epath, ["z", "t_edge_left", "t_edge_right"], rows)
            written.append(epath)
        elif kind == "trajectory":
            rows = []
            for z, Z, p, sh in zip(traj.z, traj.Z, traj.params, traj.shelf):
                rows.append((z, Z, p.u_inf, p.A, p.B, p.t0, p.sigma0, p.delta_phi0,
                             sh.q1_plus, sh.q1_minus, sh.phi1t_plus, sh.phi1t_minus,
                             sh.sigma0_rate, sh.delta_phi1))
            _writerows(path, ["z", "Z", "u_inf", "A", "B", "t0", "sigma0", "delta_phi0",
                              "q1_plus", "q1_minus", "phi1t_plus", "phi1t_minus",
                              "sigma0_rate", "delta_phi1"], rows)
        elif kind == "layer":
            s = snapshots[-1]
            sh0 = traj.shelf[0]
            s_l, s_r = _edges_at(traj, s.z)
            layer = boundary_layer.LayerProfile.at_edge("right", exp.params.u_inf, sh0.q1_plus)
            width = 8.0 * s.z ** (1.0 / 3.0) / abs(layer.a)
            x = np.linspace(-width, width, 513)
            T = exp.grid.t - s.frame.accumulated_shift
            sim = np.interp(x + s_r, T, np.abs(s.samples))
            pred = exp.params.u_inf + exp.epsilon * boundary_layer.shelf_magnitude_profile(layer, s.z, x)
            _writerows(path, ["x", "sim_abs", "predicted_abs"], zip(x, sim, pred))
        else:
            raise ConfigError(f"outputs: unknown kind {kind!r}")
        if kind != "snapshots":
            written.append(path)
    return written


def _composite_magnitude(exp: Experiment, traj, snap) -> np.ndarray:
    """Leading magnitude plus shelf plateaus smoothed by the edge layers."""
    params = exp.params
    sh = traj.shelf[-1]
    T = exp.grid.t - snap.frame.accumulated_shift
    q0 = np.abs(np.asarray(
        params.A + 1j * params.B * np.tanh(params.B * T), dtype=complex
    ))
    if exp.epsilon == 0.0:
        return q0
    s_l, s_r = _edges_at(traj, snap.z)
    right = boundary_layer.LayerProfile.at_edge("right", params.u_inf, sh.q1_plus)
    left = boundary_layer.LayerProfile.at_edge("left", params.u_inf, sh.q1_minus)
    w = np.where(
        T >= 0,
        boundary_layer.shelf_magnitude_profile(right, snap.z, T - s_r),
        boundary_layer.shelf_magnitude_profile(left, snap.z, T - s_l),
    )
    return q0 + exp.epsilon * w


def write_report(report: ComparisonReport, out_dir: str, run_id: str) -> str:
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, f"{run_id}_report.json")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(report.as_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def write_prediction_csv(traj, out_dir: str, run_id: str) -> str:
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, f"{run_id}_prediction.csv")
    rows = []
    for z, Z, p, sh in zip(traj.z, traj.Z, traj.params, traj.shelf):
        s_l, s_r = _edges_at(traj, z)
        rows.append((z, Z, p.u_inf, p.A, p.B, p.t0, p.sigma0, p.delta_phi0,
                     sh.u_inf_rate, sh.A_rate, sh.B_rate, sh.delta_phi0_rate, sh.sigma0_rate,
                     sh.q1_plus, sh.q1_minus, sh.phi1t_plus, sh.phi1t_minus, sh.delta_phi1,
                     s_l, s_r))
    _writerows(path, ["z", "Z", "u_inf", "A", "B", "t0", "sigma0", "delta_phi0",
                      "u_inf_rate", "A_rate", "B_rate", "delta_phi0_rate", "sigma0_rate",
                      "q1_plus", "q1_minus", "phi1t_plus", "phi1t_minus", "delta_phi1",
                      "S_L", "S_R"], rows)
    return path


def sweep_configs(base_cfg: dict, delta_phi0_values) -> list[tuple[str, dict]]:
    """Per-angle configs with measurement-aware run length and grid."""
    out = []
    for dphi in delta_phi0_values:
        cfg = json.loads(json.dumps(base_cfg))
        cfg["soliton"]["delta_phi0"] = float(dphi)
        params = CoreParams.from_background(cfg["soliton"]["u_inf"], float(dphi))
        eps = float(cfg["epsilon"])
        gamma = float(cfg["perturbation"].get("gamma", 1.0))
        alpha = 0.5 * params.delta_phi0
        q1p = -(2.0 / 3.0) * gamma * (params.u_inf + params.A) * math.sin(alpha)
        q1m = -(2.0 / 3.0) * gamma * (params.u_inf - params.A) * math.sin(alpha)
        z_max = max(
            measurement_distance(params, eps, q1p, +1),
            measurement_distance(params, eps, q1m, -1),
        )
        cfg["run"]["z_max"] = z_max
        cfg["grid"] = auto_grid(params, z_max)
        cfg["observables"] = ["shelf", "a_constancy"]
        out.append((f"dphi{dphi:.6g}", cfg))
    return out


def run_sweep(base_cfg: dict, delta_phi0_values, jobs: int = 1) -> ComparisonReport:
    """Compare across core phase angles; rows prefixed per angle."""
    items = sweep_configs(base_cfg, delta_phi0_values)
    results: dict[str, ComparisonReport] = {}
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = {tag: pool.submit(_sweep_worker, cfg) for tag, cfg in items}
            for tag, fut in futures.items():
                results[tag] = fut.result()
    else:
        for tag, cfg in items:
            results[tag] = _sweep_worker(cfg)
    combined = ComparisonReport()
    for tag in sorted(results):
        for row in results[tag].rows:
            combined.rows.append(ComparisonRow(
                name=f"{tag}.{row.name}", predicted=row.predicted, measured=row.measured,
                tolerance=row.tolerance, relative=row.relative,
            ))
    return combined.sorted()


def _sweep_worker(cfg: dict) -> ComparisonReport:
    report, _ = compare(validate(cfg))
    return report
