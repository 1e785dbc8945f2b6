"""Figure rendering with plain-text sidecar exports.

Every rendered image is accompanied by a ``<stem>_data.txt`` sidecar that
dumps the exact arrays plotted (full float precision), so correctness is
testable without image comparison and repeated renders are idempotent on
the sidecar.
"""

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from . import readers
from .readers import SchemaError

KINDS = ("convergence", "summary_bars", "field_1d", "field_2d")

VARIABLE_LABELS = {
    "e_rho": "density",
    "e_rhou1": "x1 momentum",
    "e_rhou2": "x2 momentum",
    "e_rhoE": "total energy",
}


def sidecar_path(image_path):
    stem, _ = os.path.splitext(image_path)
    return stem + "_data.txt"


class SidecarWriter:
    def __init__(self):
        self.lines = []

    def series(self, name, xs, ys):
        self.lines.append(f"series {name}")
        for x, y in zip(xs, ys):
            self.lines.append(f"{float(x)!r} {float(y)!r}")

    def write(self, image_path):
        with open(sidecar_path(image_path), "w", encoding="utf-8") as fh:
            fh.write("\n".join(self.lines) + "\n")


def read_sidecar(path):
    """Parse a sidecar back into {series_name: (xs, ys)}."""
    out = {}
    name = None
    xs, ys = [], []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("series "):
                if name is not None:
                    out[name] = (np.asarray(xs), np.asarray(ys))
                name = line[len("series "):]
                xs, ys = [], []
            else:
                a, b = line.split()
                xs.append(float(a))
                ys.append(float(b))
    if name is not None:
        out[name] = (np.asarray(xs), np.asarray(ys))
    return out


def render_convergence(report_dir, output, variable=None):
    rows = readers.read_runs_csv(os.path.join(report_dir, "runs.csv"))
    present = [c for c in readers.ERROR_COLUMNS
               if any(r[c] is not None for r in rows)]
    columns = [variable] if variable else present
    if variable and variable not in present:
        raise SchemaError(f"variable {variable} not present in the report")
    sidecar = SidecarWriter()
    fig, axes = plt.subplots(1, len(columns), figsize=(4.2 * len(columns), 3.4),
                             squeeze=False)
    for ax, column in zip(axes[0], columns):
        groups = {}
        for r in rows:
            if r[column] is None or not r["stable"]:
                continue
            label = f"{r['formulation']}/{'dim' if r['dimensional'] else 'nondim'}"
            groups.setdefault(label, []).append((r["K"], r[column]))
        for label in sorted(groups):
            pts = sorted(groups[label])
            ks = [p[0] for p in pts]
            errs = [p[1] for p in pts]
            ax.semilogy(ks, errs, marker="o", label=label)
            sidecar.series(f"{column}:{label}", ks, errs)
        ax.set_xlabel("basis dimension K")
        ax.set_ylabel(f"relative error, {VARIABLE_LABELS[column]}")
        ax.grid(True, which="both", alpha=0.3)
    axes[0][-1].legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(output, dpi=130)
    plt.close(fig)
    sidecar.write(output)


def render_summary_bars(report_dir, output, variable=None):
    rows = readers.read_summary_csv(os.path.join(report_dir, "summary.csv"))
    names = [r["formulation"] for r in rows]
    stable = [r["stable_percent"] for r in rows]
    lowest = [r["lowest_error_percent"] for r in rows]
    x = np.arange(len(names))
    fig, ax = plt.subplots(figsize=(1.6 * len(names) + 2, 3.6))
    ax.bar(x - 0.2, stable, width=0.4, label="% stable")
    ax.bar(x + 0.2, lowest, width=0.4, label="% lowest error")
    ax.set_xticks(x)
    ax.set_xticklabels(names, rotation=30, ha="right", fontsize=8)
    ax.set_ylim(0, 105)
    ax.legend()
    fig.tight_layout()
    fig.savefig(output, dpi=130)
    plt.close(fig)
    sidecar = SidecarWriter()
    sidecar.series("stable_percent", x, stable)
    sidecar.series("lowest_error_percent", x, lowest)
    sidecar.write(output)


_FIELD_NAMES_1D = ("rho", "rhou1", "rhoE")
_FIELD_NAMES_2D = ("rho", "rhou1", "rhou2", "rhoE")


def _variable_index(ncomp, variable):
    names = _FIELD_NAMES_1D if ncomp == 3 else _FIELD_NAMES_2D
    if variable is None:
        return 0, names[0]
    if variable not in names:
        raise SchemaError(f"unknown variable {variable!r}; choose from {names}")
    return names.index(variable), variable


def render_field_1d(snapshot_file, output, variable=None, snapshot=-1):
    matrix, times, d, n_cells, ncomp = readers.read_snapshots(snapshot_file)
    if d != 1:
        raise SchemaError(f"{snapshot_file} holds a {d}-D field, expected 1-D")
    idx, name = _variable_index(ncomp, variable)
    column = matrix[:, snapshot].reshape(ncomp, n_cells)
    values = column[idx]
    cells = np.arange(n_cells)
    fig, ax = plt.subplots(figsize=(5.2, 3.4))
    ax.plot(cells, values, lw=1.2)
    ax.set_xlabel("cell index")
    ax.set_ylabel(name)
    ax.set_title(f"t = {times[snapshot]:.4g}")
    fig.tight_layout()
    fig.savefig(output, dpi=130)
    plt.close(fig)
    sidecar = SidecarWriter()
    sidecar.series(f"{name}@t={float(times[snapshot])!r}", cells, values)
    sidecar.write(output)


def render_field_2d(snapshot_file, output, variable=None, snapshot=-1):
    matrix, times, d, n_cells, ncomp = readers.read_snapshots(snapshot_file)
    if d != 2:
        raise SchemaError(f"{snapshot_file} holds a {d}-D field, expected 2-D")
    side = int(round(np.sqrt(n_cells)))
    if side * side != n_cells:
        raise SchemaError("2-D field is not square; cannot infer grid shape")
    idx, name = _variable_index(ncomp, variable)
    grid = matrix[:, snapshot].reshape(ncomp, side, side)[idx]
    fig, ax = plt.subplots(figsize=(4.6, 4.0))
    im = ax.imshow(grid.T, origin="lower", cmap="viridis")
    fig.colorbar(im, ax=ax, label=name)
    ax.set_title(f"{name} at t = {times[snapshot]:.4g}")
    fig.tight_layout()
    fig.savefig(output, dpi=130)
    plt.close(fig)
    sidecar = SidecarWriter()
    for i in range(side):
        sidecar.series(f"{name}[{i},:]", np.arange(side), grid[i])
    sidecar.write(output)


def render(kind, source, output, variable=None):
    """Dispatch on the figure kind; source is a report dir or a data file."""
    if kind == "convergence":
        render_convergence(source, output, variable)
    elif kind == "summary_bars":
        render_summary_bars(source, output, variable)
    elif kind == "field_1d":
        render_field_1d(source, output, variable)
    elif kind == "field_2d":
        render_field_2d(source, output, variable)
    else:
        raise SchemaError(f"unknown figure kind {kind!r}; choose from {KINDS}")
