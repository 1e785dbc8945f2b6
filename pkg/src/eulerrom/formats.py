"""Binary and text artifact formats.

Three little-endian binary formats are defined:

ERSN (snapshots)
    magic ``ERSN``, version u32, d u32, n_cells u64, n_snapshots u64,
    components u64, payload float64 row-major with shape
    (components * n_cells, n_snapshots), times float64[n_snapshots].

ERPB (POD basis)
    magic ``ERPB``, version u32, inner-product kind u8, variable-set u8,
    reference block (count u8 followed by count float64: gamma, rho_ref,
    p_ref, then the kind-specific reference values), rows u64, K u64,
    sigma float64[K], modes float64 row-major (rows, K).

ERTJ (ROM trajectory)
    magic ``ERTJ``, version u32, formulation u8, K u64, n_states u64,
    coords float64 row-major (n_states, K), stable u8, n_windows u64,
    iterations u32[n_windows].

Problem configurations and sweep plans are line-oriented ``key = value``
text files; ``#`` starts a comment.
"""

import struct

import numpy as np

from .errors import ConfigurationError, FormatError
from .problems import ProblemConfig

FORMAT_VERSION = 1

IP_KIND_TAGS = {"l2": 0, "l2star": 1, "entropy_a": 2, "entropy_atilde": 3}
IP_KIND_NAMES = {v: k for k, v in IP_KIND_TAGS.items()}

VARSET_TAGS = {"conserved": 0, "entropy": 1}
VARSET_NAMES = {v: k for k, v in VARSET_TAGS.items()}

FORMULATION_TAGS = {
    "gal_cons_l2": 0,
    "gal_cons_l2star": 1,
    "gal_ent_l2": 2,
    "wls_cons_l2": 3,
    "wls_cons_l2star": 4,
    "wls_cons_ent": 5,
    "wls_ent_ent": 6,
}
FORMULATION_NAMES = {v: k for k, v in FORMULATION_TAGS.items()}


def _read_exact(fh, size, what):
    data = fh.read(size)
    if len(data) != size:
        raise FormatError(f"truncated file while reading {what}")
    return data


def _check_magic(fh, magic):
    got = fh.read(4)
    if got != magic:
        raise FormatError(f"bad magic {got!r}, expected {magic!r}")
    (version,) = struct.unpack("<I", _read_exact(fh, 4, "version"))
    if version != FORMAT_VERSION:
        raise FormatError(f"unsupported format version {version}")


# ---------------------------------------------------------------- ERSN ----

def write_snapshots(path, matrix, times, d, n_cells, components):
    matrix = np.ascontiguousarray(matrix, dtype="<f8")
    times = np.ascontiguousarray(times, dtype="<f8")
    if matrix.shape != (components * n_cells, times.size):
        raise FormatError("snapshot matrix shape disagrees with header")
    with open(path, "wb") as fh:
        fh.write(b"ERSN")
        fh.write(struct.pack("<I", FORMAT_VERSION))
        fh.write(struct.pack("<IQQQ", d, n_cells, times.size, components))
        fh.write(matrix.tobytes(order="C"))
        fh.write(times.tobytes())


def read_snapshots(path):
    """Return (matrix, times, d, n_cells, components)."""
    with open(path, "rb") as fh:
        _check_magic(fh, b"ERSN")
        d, n_cells, n_snaps, components = struct.unpack(
            "<IQQQ", _read_exact(fh, 4 + 8 * 3, "ERSN header")
        )
        rows = components * n_cells
        payload = _read_exact(fh, 8 * rows * n_snaps, "snapshot payload")
        matrix = np.frombuffer(payload, dtype="<f8").reshape(rows, n_snaps).copy()
        tdata = _read_exact(fh, 8 * n_snaps, "snapshot times")
        times = np.frombuffer(tdata, dtype="<f8").copy()
    return matrix, times, d, n_cells, components


# ---------------------------------------------------------------- ERPB ----

def write_basis(path, basis):
    spec = basis.ip_spec
    ref = np.asarray([], dtype=float) if spec.reference is None else np.asarray(spec.reference)
    block = np.concatenate([[spec.gas.gamma, spec.gas.rho_ref, spec.gas.p_ref], ref])
    modes = np.ascontiguousarray(basis.modes, dtype="<f8")
    sigma = np.ascontiguousarray(basis.sigma, dtype="<f8")
    with open(path, "wb") as fh:
        fh.write(b"ERPB")
        fh.write(struct.pack("<I", FORMAT_VERSION))
        fh.write(struct.pack("<BB", IP_KIND_TAGS[spec.kind], VARSET_TAGS[basis.variables]))
        fh.write(struct.pack("<B", block.size))
        fh.write(block.astype("<f8").tobytes())
        fh.write(struct.pack("<QQ", modes.shape[0], modes.shape[1]))
        fh.write(sigma.tobytes())
        fh.write(modes.tobytes(order="C"))


def read_basis(path):
    """Return a dict of the raw ERPB contents (the pod module rebuilds a basis)."""
    with open(path, "rb") as fh:
        _check_magic(fh, b"ERPB")
        kind_tag, varset_tag = struct.unpack("<BB", _read_exact(fh, 2, "ERPB tags"))
        if kind_tag not in IP_KIND_NAMES or varset_tag not in VARSET_NAMES:
            raise FormatError("unknown inner-product or variable-set tag")
        (ref_count,) = struct.unpack("<B", _read_exact(fh, 1, "reference count"))
        block = np.frombuffer(_read_exact(fh, 8 * ref_count, "reference block"), dtype="<f8")
        if ref_count < 3:
            raise FormatError("reference block must carry gamma and the entropy gauge")
        rows, k = struct.unpack("<QQ", _read_exact(fh, 16, "basis dims"))
        sigma = np.frombuffer(_read_exact(fh, 8 * k, "singular values"), dtype="<f8").copy()
        payload = _read_exact(fh, 8 * rows * k, "basis payload")
        modes = np.frombuffer(payload, dtype="<f8").reshape(rows, k).copy()
    return {
        "kind": IP_KIND_NAMES[kind_tag],
        "variables": VARSET_NAMES[varset_tag],
        "gamma": float(block[0]),
        "rho_ref": float(block[1]),
        "p_ref": float(block[2]),
        "reference": block[3:].copy(),
        "sigma": sigma,
        "modes": modes,
    }


# ---------------------------------------------------------------- ERTJ ----

def write_trajectory(path, formulation, coords, stable, iterations):
    coords = np.ascontiguousarray(coords, dtype="<f8")
    iters = np.ascontiguousarray(iterations, dtype="<u4")
    with open(path, "wb") as fh:
        fh.write(b"ERTJ")
        fh.write(struct.pack("<I", FORMAT_VERSION))
        fh.write(struct.pack("<B", FORMULATION_TAGS[formulation]))
        fh.write(struct.pack("<QQ", coords.shape[1], coords.shape[0]))
        fh.write(coords.tobytes(order="C"))
        fh.write(struct.pack("<B", 1 if stable else 0))
        fh.write(struct.pack("<Q", iters.size))
        fh.write(iters.tobytes())


def read_trajectory(path):
    """Return (formulation, coords, stable, iterations)."""
    with open(path, "rb") as fh:
        _check_magic(fh, b"ERTJ")
        (tag,) = struct.unpack("<B", _read_exact(fh, 1, "formulation tag"))
        if tag not in FORMULATION_NAMES:
            raise FormatError(f"unknown formulation tag {tag}")
        k, n_states = struct.unpack("<QQ", _read_exact(fh, 16, "trajectory dims"))
        payload = _read_exact(fh, 8 * k * n_states, "coords payload")
        coords = np.frombuffer(payload, dtype="<f8").reshape(n_states, k).copy()
        (stable,) = struct.unpack("<B", _read_exact(fh, 1, "stability flag"))
        (n_windows,) = struct.unpack("<Q", _read_exact(fh, 8, "window count"))
        idata = _read_exact(fh, 4 * n_windows, "iteration counts")
        iterations = np.frombuffer(idata, dtype="<u4").copy()
    return FORMULATION_NAMES[tag], coords, bool(stable), iterations


# ------------------------------------------------------------ key/value ----

def read_keyvalues(path):
    pairs = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigurationError(f"{path}:{lineno}: expected 'key = value'")
            key, value = line.split("=", 1)
            pairs[key.strip()] = value.strip()
    return pairs


def write_keyvalues(path, pairs):
    with open(path, "w", encoding="utf-8") as fh:
        for key, value in pairs.items():
            fh.write(f"{key} = {value}\n")


_CONFIG_BOOL = {"true": True, "false": False, "1": True, "0": False,
                "yes": True, "no": False}


def parse_problem_config(pairs, path="<config>"):
    required = ("problem", "dimensional", "cells", "final_time_nd",
                "snapshot_stride", "weno_epsilon")
    for key in required:
        if key not in pairs:
            raise ConfigurationError(f"{path}: missing required key {key!r}")
    try:
        dimensional = _CONFIG_BOOL[pairs["dimensional"].lower()]
    except KeyError:
        raise ConfigurationError(f"{path}: bad boolean {pairs['dimensional']!r}") from None
    kwargs = dict(
        problem=pairs["problem"],
        dimensional=dimensional,
        cells=int(pairs["cells"]),
        final_time_nd=float(pairs["final_time_nd"]),
        snapshot_stride=int(pairs["snapshot_stride"]),
        weno_epsilon=float(pairs["weno_epsilon"]),
        seed=int(pairs.get("seed", 0)),
    )
    for key, cast in (("gamma", float), ("hit_u0_factor", float),
                      ("hit_kp", int), ("hit_s", int)):
        if key in pairs:
            kwargs[key] = cast(pairs[key])
    return ProblemConfig(**kwargs)


def read_problem_config(path):
    return parse_problem_config(read_keyvalues(path), path)


def write_problem_config(path, cfg):
    pairs = {
        "problem": cfg.problem,
        "dimensional": "true" if cfg.dimensional else "false",
        "cells": cfg.cells,
        "final_time_nd": repr(cfg.final_time_nd),
        "snapshot_stride": cfg.snapshot_stride,
        "weno_epsilon": repr(cfg.weno_epsilon),
        "seed": cfg.seed,
    }
    if cfg.problem == "hit":
        pairs["hit_u0_factor"] = repr(cfg.hit_u0_factor)
        pairs["hit_kp"] = cfg.hit_kp
        pairs["hit_s"] = cfg.hit_s
    write_keyvalues(path, pairs)
