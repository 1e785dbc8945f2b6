"""Command-line entry points.

    eulerrom fom run <config> [-o out.ersn]
    eulerrom pod build <snapshots.ersn> --config <cfg> --ip <kind>
             --vars <conserved|entropy> -K <k> [-o out.erpb]
    eulerrom rom run <config> --formulation <tag> --basis <file.erpb>
             [--window n] [--snapshots file.ersn] [-o out.ertj]
    eulerrom report <dir> [--configurations both|dim|nondim]
    eulerrom sweep <plan-file>

Exit codes: 0 success, 1 configuration/format error, 2 unstable ROM (the
trajectory is still written).
"""

import argparse
import os
import sys
from dataclasses import replace

import numpy as np

from . import formats, inner_products, metrics, pod, problems, rom, sweep
from .errors import EulerRomError

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_UNSTABLE = 2


def _default_output(path, suffix):
    stem, _ = os.path.splitext(path)
    return stem + suffix


def cmd_fom_run(args):
    cfg = formats.read_problem_config(args.config)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    snapshots = problems.run_fom(cfg, progress=args.verbose)
    mesh = cfg.mesh()
    out = args.output or _default_output(args.config, ".ersn")
    formats.write_snapshots(
        out, snapshots.matrix, snapshots.times, mesh.d, mesh.n_cells, mesh.ncomp
    )
    print(f"wrote {snapshots.n_snapshots} snapshots to {out}")
    return EXIT_OK


def cmd_pod_build(args):
    cfg = formats.read_problem_config(args.config)
    matrix, _, d, n_cells, ncomp = formats.read_snapshots(args.snapshots)
    mesh = cfg.mesh()
    if (d, n_cells, ncomp) != (mesh.d, mesh.n_cells, mesh.ncomp):
        raise formats.ConfigurationError("snapshot file does not match the configuration")
    snapshot_set = problems.SnapshotSet(matrix, np.zeros(matrix.shape[1]), cfg)
    ip_spec = inner_products.spec_for_config(args.ip, cfg, snapshot_set)
    weight = inner_products.build_weight(ip_spec, mesh)
    data = pod.snapshots_in_variables(matrix, args.vars, cfg.gas(), ncomp)
    basis = pod.compute_pod(data, weight, args.k, args.vars)
    out = args.output or _default_output(args.snapshots, f"_{args.ip}_K{args.k}.erpb")
    pod.save_basis(out, basis)
    print(f"wrote K={args.k} {args.ip}/{args.vars} basis to {out}")
    return EXIT_OK


def cmd_rom_run(args):
    cfg = formats.read_problem_config(args.config)
    mesh = cfg.mesh()
    basis = pod.load_basis(args.basis, mesh)
    snapshots = None
    if args.snapshots:
        matrix, _, _, _, _ = formats.read_snapshots(args.snapshots)
        snapshots = problems.SnapshotSet(matrix, np.zeros(matrix.shape[1]), cfg)
    spec = rom.build_rom_spec(args.formulation, basis, cfg, snapshots, window=args.window)
    ic = problems.initial_field(cfg)
    traj = rom.run_rom(spec, ic, cfg.n_steps)
    out = args.output or _default_output(args.config, f"_{args.formulation}.ertj")
    formats.write_trajectory(
        out, args.formulation, traj.coords, traj.stable,
        [w.iterations for w in traj.window_reports],
    )
    status = "stable" if traj.stable else f"UNSTABLE at t={traj.t_first_nan:g}"
    print(f"{args.formulation} K={spec.k}: {status}; wrote {out}")
    return EXIT_OK if traj.stable else EXIT_UNSTABLE


def cmd_report(args):
    runs_path = os.path.join(args.directory, "runs.csv")
    with open(runs_path, "r", encoding="utf-8") as fh:
        reports = metrics.reports_from_csv(fh.read())
    dimensional = {"both": None, "dim": True, "nondim": False}[args.configurations]
    rows = metrics.summary_report(reports, dimensional_filter=dimensional)
    text = metrics.summary_to_text(rows)
    with open(os.path.join(args.directory, "summary.csv"), "w", encoding="utf-8") as fh:
        fh.write(metrics.summary_to_csv(rows))
    with open(os.path.join(args.directory, "summary.txt"), "w", encoding="utf-8") as fh:
        fh.write(text)
    print(text, end="")
    return EXIT_OK


def cmd_sweep(args):
    plan = sweep.read_plan(args.plan)
    if args.seed is not None:
        plan.seed = args.seed
    _, any_unstable = sweep.run_sweep(plan, progress=args.verbose)
    print(f"sweep complete; reports in {plan.out_dir}")
    return EXIT_UNSTABLE if any_unstable else EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="eulerrom", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    fom = sub.add_parser("fom").add_subparsers(dest="action", required=True)
    fom_run = fom.add_parser("run")
    fom_run.add_argument("config")
    fom_run.add_argument("--seed", type=int, help="override the config's RNG seed")
    fom_run.add_argument("-o", "--output")
    fom_run.set_defaults(func=cmd_fom_run)

    pod_sub = sub.add_parser("pod").add_subparsers(dest="action", required=True)
    pod_build = pod_sub.add_parser("build")
    pod_build.add_argument("snapshots")
    pod_build.add_argument("--config", required=True)
    pod_build.add_argument("--ip", required=True, choices=inner_products.KINDS)
    pod_build.add_argument("--vars", required=True, choices=(pod.CONSERVED, pod.ENTROPY))
    pod_build.add_argument("-K", dest="k", type=int, required=True)
    pod_build.add_argument("-o", "--output")
    pod_build.set_defaults(func=cmd_pod_build)

    rom_sub = sub.add_parser("rom").add_subparsers(dest="action", required=True)
    rom_run = rom_sub.add_parser("run")
    rom_run.add_argument("config")
    rom_run.add_argument("--formulation", required=True, choices=sorted(rom.FORMULATIONS))
    rom_run.add_argument("--basis", required=True)
    rom_run.add_argument("--window", type=int)
    rom_run.add_argument("--snapshots", help="training snapshots (entropy references)")
    rom_run.add_argument("-o", "--output")
    rom_run.set_defaults(func=cmd_rom_run)

    report = sub.add_parser("report")
    report.add_argument("directory")
    report.add_argument("--configurations", choices=("both", "dim", "nondim"), default="both")
    report.set_defaults(func=cmd_report)

    sweep_cmd = sub.add_parser("sweep")
    sweep_cmd.add_argument("plan")
    sweep_cmd.add_argument("--seed", type=int, help="override the plan's RNG seed")
    sweep_cmd.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except EulerRomError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
