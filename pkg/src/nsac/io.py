"""Binary field snapshots, CSV tables and TOML configuration.

Snapshot layout (little-endian throughout)::

    b"NSAC1" | u32 nx | u32 ny | f64 lx | f64 ly | f64 t | f64 eps | c | vx | vy | p

each field ``ny * nx`` doubles in row-major order (rows are ``y``).
"""

from __future__ import annotations

import csv
import struct
import sys
from pathlib import Path

import numpy as np

from .diffuse_solver import DiffuseState, GridSpec
from .errors import BadMagic, TruncatedFile, ValidationError, VersionMismatch

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

MAGIC = b"NSAC1"
_HEADER = struct.Struct("<IIdddd")
HEADER_SIZE = len(MAGIC) + _HEADER.size


def write_snapshot(path, state: DiffuseState) -> None:
    g = state.grid
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(_HEADER.pack(g.nx, g.ny, g.lx, g.ly, state.t, state.eps))
        for arr in (state.c, state.u, state.v, state.p):
            fh.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())


def read_snapshot(path, bc: str = "periodic") -> DiffuseState:
    """Inverse of :func:`write_snapshot`; the boundary mode is not stored."""
    data = Path(path).read_bytes()
    if len(data) < len(MAGIC):
        raise TruncatedFile("file shorter than the magic")
    magic = data[: len(MAGIC)]
    if magic != MAGIC:
        if magic[:4] == MAGIC[:4]:
            raise VersionMismatch(f"unsupported snapshot version {magic[4:]!r}")
        raise BadMagic(f"bad magic {magic!r}")
    if len(data) < HEADER_SIZE:
        raise TruncatedFile("header incomplete")
    nx, ny, lx, ly, t, eps = _HEADER.unpack_from(data, len(MAGIC))
    expected = HEADER_SIZE + 4 * 8 * nx * ny
    if len(data) != expected:
        bnx, bny = struct.unpack_from(">II", data, len(MAGIC))
        if len(data) == HEADER_SIZE + 4 * 8 * bnx * bny:
            raise VersionMismatch("big-endian snapshot; the format is little-endian only")
        if len(data) < expected:
            raise TruncatedFile(f"expected {expected} bytes, found {len(data)}")
        raise VersionMismatch(f"size {len(data)} does not match header ({expected} bytes)")
    if not (np.isfinite(lx) and np.isfinite(ly) and lx > 0 and ly > 0):
        raise VersionMismatch("implausible header values")
    arrays = np.frombuffer(data, dtype="<f8", offset=HEADER_SIZE).reshape(4, ny, nx).astype(float)
    grid = GridSpec(nx, ny, lx, ly, bc)
    return DiffuseState(arrays[0].copy(), arrays[1].copy(), arrays[2].copy(), arrays[3].copy(),
                        float(t), float(eps), grid)


def format_value(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.17g}"
    return str(x)


def write_csv(path, header, rows) -> None:
    """Write ``rows`` with floats at 17 significant digits."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([format_value(x) for x in row])


def read_csv(path):
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        rows = [[float(x) for x in row] for row in r]
    return header, np.array(rows) if rows else np.empty((0, len(header)))


def load_config(path) -> dict:
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ValidationError(f"invalid TOML in {path}: {exc}") from exc
    except FileNotFoundError as exc:
        raise ValidationError(f"config file not found: {path}") from exc
