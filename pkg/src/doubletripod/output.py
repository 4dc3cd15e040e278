"""Deterministic text and binary emitters for run results.

Text files are plain columns with '#'-prefixed header lines naming the
columns and units.  Binary snapshots store a complex grid field with a
fixed little-endian header (magic, component count, dims, box, time) and
the payload as row-major, component-major complex128.
"""

import struct
from pathlib import Path

import numpy as np

SNAPSHOT_MAGIC = b"DTPS"
SNAPSHOT_VERSION = 1
_HEADER = struct.Struct("<4sIIIIddd")   # magic, version, ncomp, nx, ny, lx, ly, time

FLOAT_FMT = "%.12e"


def write_columns(path, names, columns, header_lines=()):
    """Write aligned numeric columns with a commented header."""
    path = Path(path)
    columns = [np.asarray(c) for c in columns]
    lines = [f"# {line}" for line in header_lines]
    lines.append("# columns: " + " ".join(names))
    width = max(len(FLOAT_FMT % 0.0) + 4, max(len(n) for n in names) + 2)
    for row in zip(*columns):
        lines.append(" ".join((FLOAT_FMT % v).rjust(width) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_evolution_report(path, report, header_lines=()):
    """Emit an EvolutionReport as columnar text."""
    names = ["time", "x_mean", "y_mean", "norm", "energy"]
    cols = [report.times, report.mean_position[:, 0], report.mean_position[:, 1],
            report.norm, report.energy]
    for i in range(report.populations.shape[1]):
        names.append(f"pop_{i}")
        cols.append(report.populations[:, i])
    if report.spin_expectations is not None:
        for i, ax in enumerate("xyz"):
            names.append(f"sigma_{ax}")
            cols.append(report.spin_expectations[:, i])
    if report.ground_fidelity is not None:
        names.append("ground_fidelity")
        cols.append(report.ground_fidelity)
    write_columns(path, names, cols, header_lines)


def write_dispersion(path, result, header_lines=()):
    """Emit a DispersionResult with the ring minimum in footer metadata."""
    path = Path(path)
    names = ["k_x", "k_y", "E_lower", "E_upper"]
    cols = [result.k_grid[:, 0], result.k_grid[:, 1],
            result.lower_band, result.upper_band]
    write_columns(path, names, cols, header_lines)
    with path.open("a", encoding="utf-8") as fh:
        fh.write(f"# ring_radius = {FLOAT_FMT % result.ring_radius}\n")
        fh.write(f"# min_energy = {FLOAT_FMT % result.min_energy}\n")


def write_snapshot(path, psi, lx, ly, time):
    """Store a complex (ncomp, nx, ny) field as a binary snapshot."""
    psi = np.ascontiguousarray(psi, dtype="<c16")
    ncomp, nx, ny = psi.shape
    header = _HEADER.pack(SNAPSHOT_MAGIC, SNAPSHOT_VERSION, ncomp, nx, ny,
                          float(lx), float(ly), float(time))
    Path(path).write_bytes(header + psi.tobytes(order="C"))


def read_snapshot(path):
    """Read a binary snapshot; returns (psi, lx, ly, time)."""
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size or raw[:4] != SNAPSHOT_MAGIC:
        raise ValueError(f"not a snapshot file: {path}")
    magic, version, ncomp, nx, ny, lx, ly, time = _HEADER.unpack_from(raw)
    if magic != SNAPSHOT_MAGIC:
        raise ValueError(f"not a snapshot file: bad magic {magic!r}")
    if version != SNAPSHOT_VERSION:
        raise ValueError(f"unsupported snapshot version {version}")
    payload = np.frombuffer(raw, dtype="<c16", offset=_HEADER.size)
    psi = payload.reshape(ncomp, nx, ny).astype(complex)
    return psi, lx, ly, time
