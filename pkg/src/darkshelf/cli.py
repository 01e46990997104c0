"""Command-line front end.

Subcommands: predict, simulate, compare, sweep, emit.  Exit codes: 0 all
comparisons pass, 1 comparison failures, 2 validation errors, 3 runtime/IO
errors.  The engine uses no randomness anywhere; --seedless is reserved to
document that fact and is rejected if supplied.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import harness, simulator

EXIT_OK = 0
EXIT_COMPARE_FAILED = 1
EXIT_VALIDATION = 2
EXIT_RUNTIME = 3


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="darkshelf",
        description="Dark-soliton shelf engine: asymptotic predictions vs direct NLS simulation.",
    )
    p.add_argument("--config", default=None,
                   help=f"preset name or JSON config path (presets: {', '.join(sorted(harness.PRESETS))})")
    p.add_argument("--out-dir", default="out", help="directory for CSV/JSON outputs")
    p.add_argument("--run-id", default=None, help="output file prefix (defaults to the subcommand)")
    p.add_argument("--seedless", action="store_true",
                   help="reserved: the engine is deterministic with no RNG; supplying this flag is an error")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("predict", help="run the slow-parameter cascade only; emit prediction CSV")
    sub.add_parser("simulate", help="run the PDE; emit snapshot CSVs")
    sub.add_parser("compare", help="simulate, measure and grade against the asymptotics")
    sw = sub.add_parser("sweep", help="compare across a list of core phase angles")
    sw.add_argument("--delta-phi0", type=float, nargs="+", required=True,
                    help="core phase changes to sweep (radians)")
    sw.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    em = sub.add_parser("emit", help="simulate and emit plot data of the requested kinds")
    em.add_argument("--kinds", nargs="+", default=None,
                    help="profile contour trajectory layer snapshots (default: config outputs)")
    return p


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    if args.seedless:
        print("error: --seedless is reserved; the engine has no RNG to disable", file=sys.stderr)
        return EXIT_VALIDATION
    if args.config is None:
        print("error: --config is required (preset name or JSON path)", file=sys.stderr)
        return EXIT_VALIDATION
    run_id = args.run_id or args.command
    try:
        cfg = harness.load_config(args.config)
        if args.command == "sweep":
            report = harness.run_sweep(cfg, args.delta_phi0, jobs=args.jobs)
            path = harness.write_report(report, args.out_dir, run_id)
            print(report.table())
            print(f"report: {path}")
            return EXIT_OK if report.passed else EXIT_COMPARE_FAILED
        exp = harness.validate(cfg)
        if args.command == "predict":
            traj = harness.predict(exp)
            path = harness.write_prediction_csv(traj, args.out_dir, run_id)
            print(f"prediction: {path}")
            return EXIT_OK
        if args.command == "simulate":
            snapshots, _, _ = harness.simulate(exp)
            for s in snapshots:
                simulator.write_snapshot_csv(s, exp.grid, args.out_dir, run_id)
            print(f"{len(snapshots)} snapshots -> {args.out_dir}/{run_id}_z*.csv")
            return EXIT_OK
        if args.command == "compare":
            report, artifacts = harness.compare(exp)
            harness.write_report(report, args.out_dir, run_id)
            kinds = [k for k in exp.outputs if k != "report"]
            if kinds:
                harness.emit_plotdata(artifacts, kinds, args.out_dir, run_id)
            print(report.table())
            return EXIT_OK if report.passed else EXIT_COMPARE_FAILED
        if args.command == "emit":
            report, artifacts = harness.compare(exp)
            kinds = args.kinds or [k for k in exp.outputs if k != "report"] or ["profile"]
            written = harness.emit_plotdata(artifacts, kinds, args.out_dir, run_id)
            for w in written:
                print(w)
            return EXIT_OK
        raise AssertionError(f"unhandled command {args.command}")
    except harness.ConfigError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except json.JSONDecodeError as exc:
        print(f"validation error: config is not valid JSON: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except simulator.SimulationError as exc:
        print(f"simulation error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    raise SystemExit(main())
