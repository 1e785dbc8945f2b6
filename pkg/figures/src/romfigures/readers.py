"""Readers for the solver's published artifact formats.

These parse the documented external interfaces directly (runs.csv /
summary.csv schemas, ERSN snapshot files, ERTJ trajectory files) so the
figure tool depends only on the file contracts, not on the solver package.
"""

import csv
import struct

import numpy as np


class SchemaError(ValueError):
    """An input file does not match its declared schema."""


RUNS_COLUMNS = (
    "problem", "dimensional", "formulation", "K", "stable", "t_first_nan",
    "e_rho", "e_rhou1", "e_rhou2", "e_rhoE", "wall_seconds",
)

SUMMARY_COLUMNS = ("formulation", "runs", "stable_percent", "lowest_error_percent")

ERROR_COLUMNS = ("e_rho", "e_rhou1", "e_rhou2", "e_rhoE")

_FORMAT_VERSION = 1


def read_runs_csv(path):
    """Rows of the per-run report CSV, with numeric fields converted."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or tuple(reader.fieldnames) != RUNS_COLUMNS:
            raise SchemaError(
                f"{path}: expected columns {','.join(RUNS_COLUMNS)}, "
                f"got {reader.fieldnames}"
            )
        rows = []
        for raw in reader:
            row = dict(raw)
            try:
                row["K"] = int(raw["K"])
                row["dimensional"] = raw["dimensional"] == "true"
                row["stable"] = raw["stable"] == "true"
                for name in ERROR_COLUMNS:
                    row[name] = float(raw[name]) if raw[name] else None
            except (TypeError, ValueError) as err:
                raise SchemaError(f"{path}: malformed row {raw}: {err}") from err
            rows.append(row)
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return rows


def read_summary_csv(path):
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or tuple(reader.fieldnames) != SUMMARY_COLUMNS:
            raise SchemaError(f"{path}: expected columns {','.join(SUMMARY_COLUMNS)}")
        rows = []
        for raw in reader:
            try:
                rows.append({
                    "formulation": raw["formulation"],
                    "runs": int(raw["runs"]),
                    "stable_percent": float(raw["stable_percent"]),
                    "lowest_error_percent": float(raw["lowest_error_percent"]),
                })
            except (TypeError, ValueError) as err:
                raise SchemaError(f"{path}: malformed row {raw}: {err}") from err
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return rows


def _need(fh, size, what, path):
    data = fh.read(size)
    if len(data) != size:
        raise SchemaError(f"{path}: truncated while reading {what}")
    return data


def read_snapshots(path):
    """ERSN: (matrix, times, d, n_cells, components)."""
    with open(path, "rb") as fh:
        if fh.read(4) != b"ERSN":
            raise SchemaError(f"{path}: not an ERSN snapshot file")
        (version,) = struct.unpack("<I", _need(fh, 4, "version", path))
        if version != _FORMAT_VERSION:
            raise SchemaError(f"{path}: unsupported ERSN version {version}")
        d, n_cells, n_snaps, ncomp = struct.unpack(
            "<IQQQ", _need(fh, 28, "header", path)
        )
        rows = ncomp * n_cells
        matrix = np.frombuffer(
            _need(fh, 8 * rows * n_snaps, "payload", path), dtype="<f8"
        ).reshape(rows, n_snaps).copy()
        times = np.frombuffer(_need(fh, 8 * n_snaps, "times", path), dtype="<f8").copy()
    return matrix, times, d, n_cells, ncomp


def read_trajectory(path):
    """ERTJ: (formulation_tag, coords, stable, iterations)."""
    with open(path, "rb") as fh:
        if fh.read(4) != b"ERTJ":
            raise SchemaError(f"{path}: not an ERTJ trajectory file")
        (version,) = struct.unpack("<I", _need(fh, 4, "version", path))
        if version != _FORMAT_VERSION:
            raise SchemaError(f"{path}: unsupported ERTJ version {version}")
        (tag,) = struct.unpack("<B", _need(fh, 1, "formulation", path))
        k, n_states = struct.unpack("<QQ", _need(fh, 16, "dims", path))
        coords = np.frombuffer(
            _need(fh, 8 * k * n_states, "coords", path), dtype="<f8"
        ).reshape(n_states, k).copy()
        (stable,) = struct.unpack("<B", _need(fh, 1, "stable", path))
        (n_windows,) = struct.unpack("<Q", _need(fh, 8, "windows", path))
        iters = np.frombuffer(_need(fh, 4 * n_windows, "iterations", path), dtype="<u4").copy()
    return tag, coords, bool(stable), iters
