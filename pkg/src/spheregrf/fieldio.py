"""Field files.

Binary layout (little endian)::

    offset  size  field
    0       4     magic b"SGRF"
    4       2     format version (1)
    6       2     flags: bit 0 space-time, bit 1 imaginary part of the draw (pair B)
    8       4     N  (uint32)
    12      4     M  (uint32)
    16      4     T  (uint32, 1 for spatial fields)
    20      8     seed (uint64)
    28      8*N*M*T  float64 values, colatitude fastest, then ring, then time

CSV files carry columns lon_deg, colat_deg[, time], value in the same order.
"""

from __future__ import annotations

import csv
import struct
from pathlib import Path

import numpy as np

from .circulant import FieldRealization
from .errors import FieldFormatError
from .grid import SphereGrid, TimeGrid

MAGIC = b"SGRF"
VERSION = 1
HEADER = struct.Struct("<4sHHIIIQ")
FLAG_SPACETIME = 1
FLAG_PAIR_B = 2


def encode(field: FieldRealization) -> bytes:
    values = np.asarray(field.values, dtype="<f8")
    spacetime = values.ndim == 3
    T, N, M = values.shape if spacetime else (1, *values.shape)
    flags = (FLAG_SPACETIME if spacetime else 0) | (FLAG_PAIR_B if field.pair_id == "B" else 0)
    header = HEADER.pack(MAGIC, VERSION, flags, N, M, T, int(field.seed) & (2**64 - 1))
    return header + np.ascontiguousarray(values).tobytes()


def decode(data: bytes, index: int = 0) -> FieldRealization:
    if len(data) < HEADER.size:
        raise FieldFormatError(f"file shorter than the {HEADER.size}-byte header", len(data))
    magic, version, flags, N, M, T, seed = HEADER.unpack_from(data)
    if magic != MAGIC:
        raise FieldFormatError(f"bad magic {magic!r}", 0)
    if version != VERSION:
        raise FieldFormatError(f"unsupported version {version}", 4)
    if flags & ~(FLAG_SPACETIME | FLAG_PAIR_B):
        raise FieldFormatError(f"unknown flag bits {flags:#x}", 6)
    if N < 2 or M < 2 or T < 1:
        raise FieldFormatError(f"invalid dimensions N={N}, M={M}, T={T}", 8)
    if not flags & FLAG_SPACETIME and T != 1:
        raise FieldFormatError(f"spatial field with T={T}", 16)
    expected = HEADER.size + 8 * N * M * T
    if len(data) != expected:
        raise FieldFormatError(
            f"payload length mismatch: expected {expected} bytes in total, got {len(data)}",
            min(len(data), expected))
    values = np.frombuffer(data, dtype="<f8", offset=HEADER.size).astype(np.float64)
    shape = (T, N, M) if flags & FLAG_SPACETIME else (N, M)
    return FieldRealization(values.reshape(shape), int(seed),
                            "B" if flags & FLAG_PAIR_B else "A", index)


def write_binary(path, field: FieldRealization):
    Path(path).write_bytes(encode(field))


def read_binary(path, index: int = 0) -> FieldRealization:
    return decode(Path(path).read_bytes(), index)


def write_csv(path, field: FieldRealization, grid: SphereGrid, tgrid: TimeGrid | None = None):
    values = np.asarray(field.values)
    lon, colat = grid.flat_coordinates()
    lon_deg, colat_deg = np.degrees(lon), np.degrees(colat)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        if values.ndim == 2:
            writer.writerow(["lon_deg", "colat_deg", "value"])
            for lo, co, v in zip(lon_deg, colat_deg, values.ravel()):
                writer.writerow([repr(float(lo)), repr(float(co)), repr(float(v))])
        else:
            times = tgrid.times if tgrid is not None else np.arange(1, values.shape[0] + 1)
            writer.writerow(["lon_deg", "colat_deg", "time", "value"])
            for t, slab in zip(times, values.reshape(values.shape[0], -1)):
                for lo, co, v in zip(lon_deg, colat_deg, slab):
                    writer.writerow([repr(float(lo)), repr(float(co)), repr(float(t)),
                                     repr(float(v))])


def read_csv_values(path) -> np.ndarray:
    """Value column of a field CSV, flat in file order."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        return np.array([float(row["value"]) for row in reader])
