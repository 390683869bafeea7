"""
Snapshot files.

Binary layout (little-endian):
    b"UHYP" | u4 version | u4 d | u4 n | u4 points[1+d+n] | f8 extent[1+d+n]
    | f8 time | (f8 re, f8 im) per node, s slowest, last ȳ fastest

CSV: header `t,s,x1..xd,y1..yn,re,im`, one row per node in the same order.
"""

import io
import logging
import os
import tempfile
from pathlib import Path
from typing import Union

import numpy as np
import pandas as pd

from .errors import SnapshotFormatError
from .grid import Field, GridSpec
from .settings import CONFIG

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]
FLOAT_FORMAT = "%.17g"


def atomic_write_bytes(path: PathLike, data: bytes) -> Path:
    """Write to a temporary file next to `path`, then rename over it"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(data)
            handle.flush()
            os.fsync(handle.fileno())
        os.replace(tmp_name, path)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise
    return path


def write_table(table: pd.DataFrame, path: PathLike) -> Path:
    buffer = io.StringIO()
    table.to_csv(buffer, index=False, float_format=FLOAT_FORMAT)
    return atomic_write_bytes(path, buffer.getvalue().encode("utf-8"))


def write_binary(field: Field, path: PathLike) -> Path:
    grid = field.grid
    header = [
        CONFIG["SNAPSHOT_MAGIC"],
        np.array([CONFIG["SNAPSHOT_VERSION"], grid.d, grid.n], dtype="<u4").tobytes(),
        np.asarray(grid.points, dtype="<u4").tobytes(),
        np.asarray(grid.extent, dtype="<f8").tobytes(),
        np.array([field.time], dtype="<f8").tobytes(),
    ]
    payload = np.ascontiguousarray(field.values, dtype="<c16").tobytes()
    return atomic_write_bytes(path, b"".join(header) + payload)


def read_binary(path: PathLike) -> Field:
    raw = Path(path).read_bytes()
    magic = CONFIG["SNAPSHOT_MAGIC"]
    if raw[: len(magic)] != magic:
        raise SnapshotFormatError(f"{path}: not a snapshot file (bad magic)")
    offset = len(magic)
    if len(raw) < offset + 12:
        raise SnapshotFormatError(f"{path}: truncated header")
    version, d, n = (int(v) for v in np.frombuffer(raw, dtype="<u4", count=3, offset=offset))
    offset += 12
    if version != CONFIG["SNAPSHOT_VERSION"]:
        raise SnapshotFormatError(f"{path}: unsupported snapshot version {version}")

    ndim = 1 + d + n
    header_size = offset + 4 * ndim + 8 * ndim + 8
    if len(raw) < header_size:
        raise SnapshotFormatError(f"{path}: truncated header")
    points = np.frombuffer(raw, dtype="<u4", count=ndim, offset=offset)
    offset += 4 * ndim
    extent = np.frombuffer(raw, dtype="<f8", count=ndim, offset=offset)
    offset += 8 * ndim
    time = float(np.frombuffer(raw, dtype="<f8", count=1, offset=offset)[0])
    offset += 8

    size = int(np.prod(points))
    if len(raw) - offset != 16 * size:
        raise SnapshotFormatError(
            f"{path}: expected {16 * size} bytes of values, found {len(raw) - offset}"
        )
    try:
        grid = GridSpec(d=d, n=n, extent=tuple(extent.tolist()), points=tuple(int(p) for p in points))
    except ValueError as error:
        raise SnapshotFormatError(f"{path}: cannot recover the grid ({error})") from error
    values = np.frombuffer(raw, dtype="<c16", count=size, offset=offset).astype(np.complex128)
    return Field(grid=grid, time=time, values=values.reshape(grid.shape))


def _coordinate_columns(grid: GridSpec):
    return ["s"] + [f"x{i + 1}" for i in range(grid.d)] + [f"y{i + 1}" for i in range(grid.n)]


def field_table(field: Field) -> pd.DataFrame:
    grid = field.grid
    mesh = np.meshgrid(*grid.axes(), indexing="ij")
    table = pd.DataFrame({name: axis.ravel() for name, axis in zip(_coordinate_columns(grid), mesh)})
    table.insert(0, "t", field.time)
    flat = field.flat()
    table["re"] = flat.real
    table["im"] = flat.imag
    return table


def write_csv(field: Field, path: PathLike) -> Path:
    return write_table(field_table(field), path)


def read_csv(path: PathLike) -> Field:
    table = pd.read_csv(path, float_precision="round_trip")
    columns = list(table.columns)
    if columns[:2] != ["t", "s"] or columns[-2:] != ["re", "im"]:
        raise SnapshotFormatError(f"{path}: unexpected columns {columns}")
    d = sum(1 for c in columns if c.startswith("x"))
    n = sum(1 for c in columns if c.startswith("y"))
    axes = [np.unique(table[c].to_numpy()) for c in columns[1:-2]]
    try:
        grid = GridSpec(
            d=d,
            n=n,
            extent=tuple(float(-axis[0]) for axis in axes),
            points=tuple(len(axis) for axis in axes),
        )
    except ValueError as error:
        raise SnapshotFormatError(f"{path}: cannot recover the grid ({error})") from error
    if len(table) != grid.size:
        raise SnapshotFormatError(f"{path}: {len(table)} rows for a grid of {grid.size} nodes")
    values = table["re"].to_numpy() + 1j * table["im"].to_numpy()
    return Field(grid=grid, time=float(table["t"].iloc[0]), values=values)


def write_snapshot(field: Field, path: PathLike) -> Path:
    """Binary for .bin, CSV for .csv"""
    path = Path(path)
    if path.suffix == ".bin":
        written = write_binary(field, path)
    elif path.suffix == ".csv":
        written = write_csv(field, path)
    else:
        raise SnapshotFormatError(f"unknown snapshot suffix '{path.suffix}' (use .bin or .csv)")
    logger.info(f"📝 Wrote snapshot t={field.time:g} to {written}")
    return written


def read_snapshot(path: PathLike) -> Field:
    path = Path(path)
    if path.suffix == ".bin":
        return read_binary(path)
    if path.suffix == ".csv":
        return read_csv(path)
    raise SnapshotFormatError(f"unknown snapshot suffix '{path.suffix}' (use .bin or .csv)")
