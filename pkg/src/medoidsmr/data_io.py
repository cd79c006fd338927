"""Row-keyed point storage, CSV ingestion, and synthetic blob data.

A :class:`RowStore` keys rows by consecutive integer ids ``0..n-1`` and
serves contiguous id ranges, which is all the map phase needs from its
input table.  CSV is the canonical encoding (``x1,...,xd`` or
``id,x1,...,xd`` per line, ``#`` comments allowed); ``.npy`` files are
accepted as a compact binary alternative for large benchmarks.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .core import Point
from .errors import InvalidInputError, ParseError, SchemaError
from .rng import Rng


@dataclass(frozen=True, eq=False)
class RowStore:
    coords: np.ndarray
    path: Optional[str] = None

    def __post_init__(self):
        coords = np.ascontiguousarray(self.coords, dtype=np.float64)
        if coords.ndim != 2:
            raise InvalidInputError(f"row store needs an (n, d) array, got shape {coords.shape}")
        coords.setflags(write=False)
        object.__setattr__(self, "coords", coords)

    @property
    def row_count(self) -> int:
        return self.coords.shape[0]

    @property
    def dimension(self) -> int:
        return self.coords.shape[1]

    def __len__(self):
        return self.row_count

    def point(self, i: int) -> Point:
        return Point(i, tuple(self.coords[i]))

    def __eq__(self, other):
        if not isinstance(other, RowStore):
            return NotImplemented
        return self.coords.shape == other.coords.shape and np.array_equal(
            self.coords.view(np.uint64), other.coords.view(np.uint64)
        )

    __hash__ = None


def read_range(store: RowStore, lo: int, hi: int) -> list:
    """Rows ``lo..hi-1`` as ``(point_id, coords)`` pairs, in id order."""
    if not 0 <= lo <= hi <= store.row_count:
        raise InvalidInputError(f"range [{lo}, {hi}) outside [0, {store.row_count}]")
    return [(i, tuple(row)) for i, row in zip(range(lo, hi), store.coords[lo:hi].tolist())]


def _parse_lines(path, dimension):
    rows, ids = [], []
    layout = None
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            fields = text.split(",")
            if len(fields) not in (dimension, dimension + 1):
                raise SchemaError(
                    f"expected {dimension} coordinates (optionally preceded by an id), "
                    f"got {len(fields)} fields", lineno)
            has_id = len(fields) == dimension + 1
            if layout is None:
                layout = has_id
            elif layout != has_id:
                raise SchemaError("rows mix id-prefixed and bare coordinate layouts", lineno)
            try:
                values = [float(x) for x in fields]
            except ValueError:
                raise ParseError(f"non-numeric field in {text!r}", lineno) from None
            if not np.all(np.isfinite(values)):
                raise ParseError(f"non-finite coordinate in {text!r}", lineno)
            if has_id:
                pid = values[0]
                if pid != int(pid) or pid < 0:
                    raise ParseError(f"id {fields[0]!r} is not a non-negative integer", lineno)
                ids.append(int(pid))
                values = values[1:]
            rows.append(values)
    return rows, (ids if layout else None)


def _order_by_ids(coords, ids):
    ids = np.asarray(ids, dtype=np.int64)
    order = np.argsort(ids, kind="stable")
    if not np.array_equal(ids[order], np.arange(len(ids))):
        raise SchemaError("row ids must be exactly 0..n-1")
    return coords[order]


def ingest_csv(path, dimension: int = 2) -> RowStore:
    """Load a CSV of points into a row store, validating every line."""
    if dimension < 1:
        raise InvalidInputError(f"dimension must be >= 1, got {dimension}")
    path = Path(path)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            table = np.loadtxt(path, delimiter=",", comments="#", ndmin=2, dtype=np.float64)
        fast = table.shape[1] in (dimension, dimension + 1) or table.size == 0
        fast = fast and bool(np.all(np.isfinite(table)))
    except ValueError:
        fast = False
    if fast:
        if table.size == 0:
            return RowStore(np.empty((0, dimension)), str(path))
        if table.shape[1] == dimension + 1:
            ids = table[:, 0]
            if np.any(ids != np.floor(ids)) or np.any(ids < 0):
                fast = False
            else:
                return RowStore(_order_by_ids(table[:, 1:], ids.astype(np.int64)), str(path))
        else:
            return RowStore(table, str(path))
    # slow path: pinpoints the offending line
    rows, ids = _parse_lines(path, dimension)
    coords = np.array(rows, dtype=np.float64).reshape(len(rows), dimension)
    if ids is not None:
        coords = _order_by_ids(coords, ids)
    return RowStore(coords, str(path))


def write_csv(store: RowStore, path, with_ids: bool = True) -> Path:
    """Write with 17 significant digits, enough to round-trip every double."""
    path = Path(path)
    d = store.dimension
    if with_ids:
        table = np.column_stack([np.arange(store.row_count, dtype=np.float64), store.coords])
        fmt = ["%d"] + ["%.17g"] * d
    else:
        table, fmt = store.coords, ["%.17g"] * d
    np.savetxt(path, table, fmt=fmt, delimiter=",")
    return path


def load_store(path, dimension: int = 2) -> RowStore:
    path = Path(path)
    if path.suffix == ".npy":
        coords = np.load(path)
        if coords.ndim != 2:
            raise SchemaError(f"{path} holds shape {coords.shape}, expected (n, d)")
        if not np.all(np.isfinite(coords)):
            raise ParseError(f"{path} holds non-finite coordinates")
        return RowStore(coords, str(path))
    return ingest_csv(path, dimension)


def save_store(store: RowStore, path) -> Path:
    path = Path(path)
    if path.suffix == ".npy":
        np.save(path, store.coords)
        return path
    return write_csv(store, path)


@dataclass(frozen=True)
class BlobSpec:
    n_points: int
    n_centers: int
    center_box: tuple = (0.0, 1000.0)
    stddev: float = 10.0
    seed: int = 0
    dimension: int = 2

    def __post_init__(self):
        if self.n_centers < 1 or self.n_points < self.n_centers:
            raise InvalidInputError(
                f"need n_points >= n_centers >= 1, got {self.n_points}, {self.n_centers}"
            )
        if not self.stddev > 0:
            raise InvalidInputError(f"stddev must be > 0, got {self.stddev}")
        lo, hi = self.center_box
        if not lo < hi:
            raise InvalidInputError(f"center_box must satisfy lo < hi, got {self.center_box}")
        if self.dimension < 1:
            raise InvalidInputError(f"dimension must be >= 1, got {self.dimension}")


def generate_blobs(spec: BlobSpec) -> RowStore:
    """Isotropic Gaussian blobs; point ``i`` belongs to center ``i % n_centers``."""
    rng = Rng(spec.seed)
    lo, hi = spec.center_box
    centers = rng.uniform_array(lo, hi, (spec.n_centers, spec.dimension))
    owner = np.arange(spec.n_points) % spec.n_centers
    noise = rng.normal((spec.n_points, spec.dimension))
    noise *= spec.stddev
    noise += centers[owner]
    return RowStore(noise)
