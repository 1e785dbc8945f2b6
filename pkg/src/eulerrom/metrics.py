"""Error metrics, consistency diagnostics, and report aggregation.

Errors are the relative, time-integrated mean-squared mismatch per
conserved variable,

    e_q = sum_t sum_cells (q~ - q)^2 vol dt / sum_t sum_cells q^2 vol dt,

evaluated at snapshot times with a left-endpoint quadrature (the final
snapshot carries no weight).  A ROM is "stable" exactly when its run
produced no NaN/Inf.
"""

import csv
import io
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .problems import nondimensionalize_columns

VARIABLE_NAMES_1D = ("rho", "rhou1", "rhoE")
VARIABLE_NAMES_2D = ("rho", "rhou1", "rhou2", "rhoE")

CSV_COLUMNS = (
    "problem", "dimensional", "formulation", "K", "stable", "t_first_nan",
    "e_rho", "e_rhou1", "e_rhou2", "e_rhoE", "wall_seconds",
)

# errors within this relative margin count as tied for "lowest"
TIE_RTOL = 1e-12


def variable_names(ncomp):
    return VARIABLE_NAMES_1D if ncomp == 3 else VARIABLE_NAMES_2D


@dataclass
class RunReport:
    problem: str
    dimensional: bool
    formulation: str
    k: int
    stable: bool
    t_first_nan: float | None
    errors: dict
    wall_seconds: float

    def csv_row(self):
        def fmt(x):
            return "" if x is None else repr(float(x))

        row = {
            "problem": self.problem,
            "dimensional": "true" if self.dimensional else "false",
            "formulation": self.formulation,
            "K": str(self.k),
            "stable": "true" if self.stable else "false",
            "t_first_nan": fmt(self.t_first_nan),
            "wall_seconds": repr(float(self.wall_seconds)),
        }
        for name in ("rho", "rhou1", "rhou2", "rhoE"):
            row[f"e_{name}"] = fmt(self.errors.get(name))
        return row


def error_metrics(rom_traj, fom_snapshots):
    """Per-variable relative time-integrated errors of a ROM run.

    Trajectories are compared at the FOM snapshot times only; an unstable
    run is scored over the prefix it completed.
    """
    cfg = fom_snapshots.config
    mesh = cfg.mesh()
    ncomp = mesh.ncomp
    stride = cfg.snapshot_stride
    if fom_snapshots.n_snapshots < 2:
        raise ConfigurationError("need at least two snapshots to integrate errors")
    n_available = (rom_traj.n_saved - 1) // stride + 1
    n_snaps = min(fom_snapshots.n_snapshots, n_available)
    if n_snaps < 2:
        # the run died before the second snapshot time; no error is defined
        return {name: float("nan") for name in variable_names(ncomp)}
    # left-endpoint rule: the final snapshot carries no quadrature weight
    idx = np.arange(n_snaps - 1)
    rom_states = rom_traj.conserved_at(idx * stride)
    fom_states = fom_snapshots.matrix[:, idx]
    n_cells = mesh.n_cells
    diff = (rom_states - fom_states).reshape(ncomp, n_cells, -1)
    ref = fom_states.reshape(ncomp, n_cells, -1)
    vol = mesh.cell_volume
    dt_snap = stride * cfg.dt
    num = np.nansum(diff**2, axis=(1, 2)) * vol * dt_snap
    den = np.sum(ref**2, axis=(1, 2)) * vol * dt_snap
    values = num / den
    return dict(zip(variable_names(ncomp), values))


def make_run_report(rom_traj, fom_snapshots):
    cfg = fom_snapshots.config
    return RunReport(
        problem=cfg.problem,
        dimensional=cfg.dimensional,
        formulation=rom_traj.spec.formulation,
        k=rom_traj.spec.k,
        stable=rom_traj.stable,
        t_first_nan=rom_traj.t_first_nan,
        errors=error_metrics(rom_traj, fom_snapshots),
        wall_seconds=rom_traj.wall_seconds,
    )


def max_relative_column_difference(candidate, reference):
    """max over columns of ||cand - ref||_2 / ||ref||_2."""
    diff = np.linalg.norm(candidate - reference, axis=0)
    ref = np.linalg.norm(reference, axis=0)
    return float(np.max(diff / np.where(ref > 0, ref, 1.0)))


def consistency_check(traj_dim, traj_nondim, cfg_dim):
    """Largest relative field discrepancy between a dimensional run
    (non-dimensionalized) and its non-dimensional twin, over time."""
    n = min(traj_dim.n_saved, traj_nondim.n_saved)
    idx = np.arange(n)
    states_dim = nondimensionalize_columns(traj_dim.conserved_at(idx), cfg_dim)
    states_nd = traj_nondim.conserved_at(idx)
    return max_relative_column_difference(states_dim, states_nd)


def summary_report(reports, dimensional_filter=None):
    """Aggregate stability and lowest-error percentages per formulation.

    dimensional_filter selects which configurations enter the aggregate:
    None for both, True for dimensional only, False for non-dimensional
    only.  Lowest-error credit is awarded per (problem, configuration, K,
    variable) cell among stable runs, with ties within 1e-12 sharing it.
    """
    if dimensional_filter is not None:
        reports = [r for r in reports if r.dimensional == dimensional_filter]
    if not reports:
        raise ConfigurationError("no reports to aggregate")
    formulations = sorted({r.formulation for r in reports})
    stable_counts = {f: 0 for f in formulations}
    run_counts = {f: 0 for f in formulations}
    best_counts = {f: 0 for f in formulations}
    cell_counts = {f: 0 for f in formulations}

    cells = {}
    for r in reports:
        run_counts[r.formulation] += 1
        stable_counts[r.formulation] += int(r.stable)
        for var, err in r.errors.items():
            cells.setdefault((r.problem, r.dimensional, r.k, var), []).append(r)

    for (problem, dimensional, k, var), entries in cells.items():
        stable_entries = [r for r in entries if r.stable and np.isfinite(r.errors[var])]
        for r in entries:
            cell_counts[r.formulation] += 1
        if not stable_entries:
            continue
        best = min(r.errors[var] for r in stable_entries)
        for r in stable_entries:
            if r.errors[var] <= best * (1.0 + TIE_RTOL):
                best_counts[r.formulation] += 1

    rows = []
    for f in formulations:
        rows.append({
            "formulation": f,
            "runs": run_counts[f],
            "stable_percent": 100.0 * stable_counts[f] / run_counts[f],
            "lowest_error_percent": (
                100.0 * best_counts[f] / cell_counts[f] if cell_counts[f] else 0.0
            ),
        })
    return rows


def summary_to_csv(rows):
    buf = io.StringIO()
    writer = csv.DictWriter(
        buf, fieldnames=("formulation", "runs", "stable_percent", "lowest_error_percent"),
        lineterminator="\n",
    )
    writer.writeheader()
    for row in rows:
        writer.writerow({
            "formulation": row["formulation"],
            "runs": row["runs"],
            "stable_percent": repr(row["stable_percent"]),
            "lowest_error_percent": repr(row["lowest_error_percent"]),
        })
    return buf.getvalue()


def summary_to_text(rows):
    lines = [f"{'formulation':<18} {'runs':>5} {'stable %':>9} {'lowest-error %':>15}"]
    for row in rows:
        lines.append(
            f"{row['formulation']:<18} {row['runs']:>5d} "
            f"{row['stable_percent']:>9.1f} {row['lowest_error_percent']:>15.1f}"
        )
    return "\n".join(lines) + "\n"


def reports_to_csv(reports):
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for r in reports:
        writer.writerow(r.csv_row())
    return buf.getvalue()


def reports_from_csv(text):
    reader = csv.DictReader(io.StringIO(text))
    reports = []
    for row in reader:
        errors = {}
        for name in ("rho", "rhou1", "rhou2", "rhoE"):
            cell = row.get(f"e_{name}", "")
            if cell:
                errors[name] = float(cell)
        reports.append(RunReport(
            problem=row["problem"],
            dimensional=row["dimensional"] == "true",
            formulation=row["formulation"],
            k=int(row["K"]),
            stable=row["stable"] == "true",
            t_first_nan=float(row["t_first_nan"]) if row["t_first_nan"] else None,
            errors=errors,
            wall_seconds=float(row["wall_seconds"]),
        ))
    return reports
