"""Artifact serialization: ensemble CSV / binary round-trip, density exports.

Floats are written with Python repr (shortest round-trip form) so repeated
runs with the same configuration produce byte-identical files.  The binary
ensemble layout is little-endian:

    magic "SKDF" | u16 version | u16 flags (bit0 = labels present)
    | u64 n_paths | u64 n_times | i64 seed | f64 t_start | f64 t_end
    | f64 epsilon | u32 record_stride | u32 n_steps
    | f64 times[n_times] | f64 values[n_paths * n_times]
    | i8 labels[n_paths] (iff flag)
"""
from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .densities import DensityGrid
from .sde import PathEnsemble, TimeGrid

MAGIC = b"SKDF"
VERSION = 1


def _fmt(v: float) -> str:
    return repr(float(v))


def ensemble_to_csv(ens: PathEnsemble, path) -> None:
    """One row per path; metadata in a leading comment, times in the header."""
    path = Path(path)
    times = ens.times
    with path.open("w", newline="\n") as fh:
        fh.write(f"# skewdiff-ensemble seed={ens.seed} scheme={ens.scheme} "
                 f"n_paths={ens.n_paths} n_steps={ens.grid.n_steps} "
                 f"t_start={_fmt(ens.grid.t_start)} t_end={_fmt(ens.grid.t_end)} "
                 f"epsilon={_fmt(ens.grid.terminal_cutoff_epsilon)} "
                 f"record_stride={ens.record_stride} clamp_events={ens.clamp_events}\n")
        cols = ["path"] + (["label"] if ens.labels is not None else []) \
            + [f"t={_fmt(t)}" for t in times]
        fh.write(",".join(cols) + "\n")
        for i in range(ens.n_paths):
            row = [str(i)]
            if ens.labels is not None:
                row.append(str(int(ens.labels[i])))
            row.extend(_fmt(v) for v in ens.values[i])
            fh.write(",".join(row) + "\n")


def ensemble_to_binary(ens: PathEnsemble, path) -> None:
    path = Path(path)
    times = np.ascontiguousarray(ens.times, dtype="<f8")
    values = np.ascontiguousarray(ens.values, dtype="<f8")
    flags = 1 if ens.labels is not None else 0
    header = struct.pack(
        "<4sHHQQqdddII", MAGIC, VERSION, flags, ens.n_paths, len(times),
        ens.seed, ens.grid.t_start, ens.grid.t_end,
        ens.grid.terminal_cutoff_epsilon, ens.record_stride, ens.grid.n_steps)
    with path.open("wb") as fh:
        fh.write(header)
        fh.write(times.tobytes())
        fh.write(values.tobytes())
        if ens.labels is not None:
            fh.write(np.ascontiguousarray(ens.labels, dtype="<i1").tobytes())


def ensemble_from_binary(path) -> PathEnsemble:
    path = Path(path)
    raw = path.read_bytes()
    head = struct.calcsize("<4sHHQQqdddII")
    magic, version, flags, n_paths, n_times, seed, t_start, t_end, eps, stride, n_steps = \
        struct.unpack("<4sHHQQqdddII", raw[:head])
    if magic != MAGIC:
        raise ValueError(f"not a skewdiff ensemble file: magic={magic!r}")
    if version != VERSION:
        raise ValueError(f"unsupported ensemble version {version}")
    off = head
    times = np.frombuffer(raw, dtype="<f8", count=n_times, offset=off)
    off += 8 * n_times
    values = np.frombuffer(raw, dtype="<f8", count=n_paths * n_times, offset=off)
    values = values.reshape(n_paths, n_times).copy()
    off += 8 * n_paths * n_times
    labels = None
    if flags & 1:
        labels = np.frombuffer(raw, dtype="<i1", count=n_paths, offset=off).copy()
    grid = TimeGrid(t_start=t_start, t_end=t_end, n_steps=n_steps,
                    terminal_cutoff_epsilon=eps)
    ens = PathEnsemble(grid=grid, values=values, seed=seed, labels=labels,
                       record_stride=stride)
    if not np.allclose(ens.times, times, rtol=0, atol=1e-12):
        raise ValueError("inconsistent time grid in binary file")
    return ens


def density_grid_to_csv(grid: DensityGrid, path) -> None:
    """Long-form x,t,q rows (one per node pair)."""
    path = Path(path)
    with path.open("w", newline="\n") as fh:
        fh.write("x,t,q\n")
        for j, t in enumerate(grid.t_nodes):
            for i, x in enumerate(grid.x_nodes):
                fh.write(f"{_fmt(x)},{_fmt(t)},{_fmt(grid.values[j, i])}\n")


def density_grid_summary(grid: DensityGrid) -> dict:
    moments = grid.moments()
    return {"t": [float(t) for t in grid.t_nodes],
            "mass": [m[0] for m in moments],
            "mean": [m[1] for m in moments],
            "variance": [m[2] for m in moments],
            "skewness": [m[3] for m in moments]}


def write_json(path, obj) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")
