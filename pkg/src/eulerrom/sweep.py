"""Experiment plans: run FOMs, build bases, run ROM sweeps, write reports.

A plan is a key/value text file:

    problem = sod
    cells = 200
    k_values = 10, 20, 30
    formulations = gal_ent_l2, wls_cons_l2star, wls_ent_ent
    configurations = both        # both | nondim | dim
    out_dir = results/sod_desk
    # optional: final_time_nd, snapshot_stride, weno_epsilon, window, seed,
    #           save_trajectories (default true)

The EULERROM_THREADS environment variable (default 1) sets how many
independent (formulation, K) runs execute concurrently within a
configuration; report rows keep their submission order either way.
"""

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

from . import formats, inner_products, metrics, pod, problems, rom
from .errors import ConfigurationError


def worker_count():
    raw = os.environ.get("EULERROM_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ConfigurationError(f"EULERROM_THREADS must be an integer, got {raw!r}") from None


_PRESETS = {
    "sod": problems.sod_desk,
    "kelvin_helmholtz": problems.kh_desk,
    "hit": problems.hit_desk,
}

# desk-scale default basis-dimension sweeps per problem
DEFAULT_K_VALUES = {
    "sod": (10, 20, 30),
    "kelvin_helmholtz": (10, 25),
    "hit": (10, 25),
}


@dataclass
class ExperimentPlan:
    problem: str
    cells: int
    formulations: tuple
    out_dir: str
    k_values: tuple = ()
    configurations: str = "both"
    window: int | None = None
    final_time_nd: float | None = None
    snapshot_stride: int | None = None
    weno_epsilon: float | None = None
    seed: int = 0
    save_trajectories: bool = True

    def __post_init__(self):
        if self.problem not in _PRESETS:
            raise ConfigurationError(f"unknown problem {self.problem!r}")
        if self.configurations not in ("both", "nondim", "dim"):
            raise ConfigurationError("configurations must be both, nondim, or dim")
        for name in self.formulations:
            if name not in rom.FORMULATIONS:
                raise ConfigurationError(
                    f"unknown formulation {name!r}\n{rom.pairing_table()}"
                )
        if not self.k_values:
            self.k_values = DEFAULT_K_VALUES[self.problem]

    def config(self, dimensional):
        cfg = _PRESETS[self.problem](dimensional)
        overrides = {"cells": self.cells, "seed": self.seed}
        if self.final_time_nd is not None:
            overrides["final_time_nd"] = self.final_time_nd
        if self.snapshot_stride is not None:
            overrides["snapshot_stride"] = self.snapshot_stride
        if self.weno_epsilon is not None:
            overrides["weno_epsilon"] = self.weno_epsilon
        return replace(cfg, **overrides)

    def config_list(self):
        if self.configurations == "both":
            return [self.config(False), self.config(True)]
        return [self.config(self.configurations == "dim")]


def _parse_list(text, cast):
    return tuple(cast(item.strip()) for item in text.split(",") if item.strip())


def read_plan(path):
    pairs = formats.read_keyvalues(path)
    for key in ("problem", "cells", "formulations", "out_dir"):
        if key not in pairs:
            raise ConfigurationError(f"{path}: missing plan key {key!r}")
    kwargs = dict(
        problem=pairs["problem"],
        cells=int(pairs["cells"]),
        formulations=_parse_list(pairs["formulations"], str),
        out_dir=pairs["out_dir"],
        configurations=pairs.get("configurations", "both"),
        seed=int(pairs.get("seed", 0)),
    )
    if "k_values" in pairs:
        kwargs["k_values"] = _parse_list(pairs["k_values"], int)
    if "window" in pairs:
        kwargs["window"] = int(pairs["window"])
    if "final_time_nd" in pairs:
        kwargs["final_time_nd"] = float(pairs["final_time_nd"])
    if "snapshot_stride" in pairs:
        kwargs["snapshot_stride"] = int(pairs["snapshot_stride"])
    if "weno_epsilon" in pairs:
        kwargs["weno_epsilon"] = float(pairs["weno_epsilon"])
    if "save_trajectories" in pairs:
        kwargs["save_trajectories"] = pairs["save_trajectories"].lower() in ("true", "1", "yes")
    return ExperimentPlan(**kwargs)


def bases_for_formulations(formulation_names, snapshots, k_max):
    """One POD basis per distinct (inner product, variable set) pair."""
    cfg = snapshots.config
    mesh = cfg.mesh()
    gas = cfg.gas()
    needed = {}
    for name in formulation_names:
        fmt = rom.FORMULATIONS[name]
        needed[(fmt.basis_ip, fmt.basis_variables)] = None
    for (ip_kind, variables) in needed:
        spec = inner_products.spec_for_config(ip_kind, cfg, snapshots)
        weight = inner_products.build_weight(spec, mesh)
        matrix = pod.snapshots_in_variables(snapshots.matrix, variables, gas, mesh.ncomp)
        needed[(ip_kind, variables)] = pod.compute_pod(matrix, weight, k_max, variables)
    return needed


def _config_label(cfg):
    return "dim" if cfg.dimensional else "nondim"


def run_sweep(plan, progress=False):
    """Execute a plan and write runs.csv / summary files into out_dir."""
    os.makedirs(plan.out_dir, exist_ok=True)
    reports = []
    any_unstable = False
    for cfg in plan.config_list():
        label = _config_label(cfg)
        if progress:
            print(f"[{plan.problem}/{label}] running FOM ({cfg.cells} cells)")
        snapshots = problems.run_fom(cfg)
        mesh = cfg.mesh()
        formats.write_snapshots(
            os.path.join(plan.out_dir, f"fom_{label}.ersn"),
            snapshots.matrix, snapshots.times, mesh.d, mesh.n_cells, mesh.ncomp,
        )
        bases = bases_for_formulations(plan.formulations, snapshots, max(plan.k_values))
        ic = problems.initial_field(cfg)

        def one_run(name, k):
            fmt = rom.FORMULATIONS[name]
            basis = pod.truncate(bases[(fmt.basis_ip, fmt.basis_variables)], k)
            spec = rom.build_rom_spec(name, basis, cfg, snapshots, window=plan.window)
            if progress:
                print(f"[{plan.problem}/{label}] {name} K={k}")
            return rom.run_rom(spec, ic, cfg.n_steps)

        jobs = [(name, k) for name in plan.formulations for k in plan.k_values]
        workers = worker_count()
        if workers == 1:
            trajectories = [one_run(name, k) for name, k in jobs]
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                futures = [pool.submit(one_run, name, k) for name, k in jobs]
                trajectories = [f.result() for f in futures]
        for (name, k), traj in zip(jobs, trajectories):
            any_unstable = any_unstable or not traj.stable
            reports.append(metrics.make_run_report(traj, snapshots))
            if plan.save_trajectories:
                formats.write_trajectory(
                    os.path.join(plan.out_dir, f"{name}_K{k}_{label}.ertj"),
                    name, traj.coords, traj.stable,
                    [w.iterations for w in traj.window_reports],
                )
    write_reports(plan.out_dir, reports)
    return reports, any_unstable


def write_reports(out_dir, reports):
    with open(os.path.join(out_dir, "runs.csv"), "w", encoding="utf-8") as fh:
        fh.write(metrics.reports_to_csv(reports))
    rows = metrics.summary_report(reports)
    with open(os.path.join(out_dir, "summary.csv"), "w", encoding="utf-8") as fh:
        fh.write(metrics.summary_to_csv(rows))
    with open(os.path.join(out_dir, "summary.txt"), "w", encoding="utf-8") as fh:
        fh.write(metrics.summary_to_text(rows))
