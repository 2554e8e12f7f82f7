"""Dataset container, loaders, generator, and CSV persistence.

A dataset is an input matrix and an output matrix over the same records.
Distances are later computed on each side independently, so the split is
fixed at load time. All feature values must be finite numbers; categorical
values have to be mapped to numeric codes by the caller (the mapping changes
distances and must stay user-visible).
"""

from __future__ import annotations

import csv
import gzip
import hashlib
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

__all__ = [
    "Dataset",
    "ClusterSpec",
    "PointCloudSpec",
    "REFERENCE_CLOUD_SPEC",
    "load_csv",
    "save_csv",
    "load_mnist_idx",
    "generate_point_cloud",
    "reference_cloud",
]

_IDX_IMAGES_MAGIC = 0x00000803
_IDX_LABELS_MAGIC = 0x00000801


@dataclass
class Dataset:
    """n records of input vector + output vector.

    ``meta`` is an optional per-record payload for inspection (raw image
    bytes, generator cluster index, ...); it never takes part in distance
    computations and is excluded from the content fingerprint.
    """

    inputs: np.ndarray
    outputs: np.ndarray
    meta: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        self.inputs = np.ascontiguousarray(self.inputs, dtype=np.float64)
        self.outputs = np.ascontiguousarray(self.outputs, dtype=np.float64)
        if self.inputs.ndim == 1:
            self.inputs = self.inputs[:, None]
        if self.outputs.ndim == 1:
            self.outputs = self.outputs[:, None]
        if self.inputs.ndim != 2 or self.outputs.ndim != 2:
            raise ValueError("inputs and outputs must be 2-D matrices")
        if self.inputs.shape[0] != self.outputs.shape[0]:
            raise ValueError(
                f"record count mismatch: {self.inputs.shape[0]} inputs vs "
                f"{self.outputs.shape[0]} outputs"
            )
        if self.inputs.shape[0] < 2:
            raise ValueError(f"need at least 2 records, got {self.inputs.shape[0]}")
        if self.inputs.shape[1] < 1 or self.outputs.shape[1] < 1:
            raise ValueError("need at least one input and one output feature")
        if not np.isfinite(self.inputs).all():
            raise ValueError("inputs contain NaN or infinity")
        if not np.isfinite(self.outputs).all():
            raise ValueError("outputs contain NaN or infinity")
        if self.meta is not None and len(self.meta) != self.inputs.shape[0]:
            raise ValueError("meta must have one entry per record")
        # shared across threads; freeze the numeric payload
        self.inputs.setflags(write=False)
        self.outputs.setflags(write=False)

    @property
    def n(self) -> int:
        return self.inputs.shape[0]

    @property
    def d_in(self) -> int:
        return self.inputs.shape[1]

    @property
    def d_out(self) -> int:
        return self.outputs.shape[1]

    @property
    def ids(self) -> np.ndarray:
        """Record identifiers: always exactly 0..n-1."""
        return np.arange(self.n)

    def fingerprint(self) -> str:
        """SHA-256 over shape and numeric content (meta excluded)."""
        h = hashlib.sha256()
        h.update(b"ecs-dataset-v1")
        h.update(np.int64([self.n, self.d_in, self.d_out]).tobytes())
        h.update(self.inputs.tobytes())
        h.update(self.outputs.tobytes())
        return h.hexdigest()


@dataclass(frozen=True)
class ClusterSpec:
    center: tuple
    stddev: float
    count: int
    label: int

    def __post_init__(self) -> None:
        if self.stddev <= 0:
            raise ValueError(f"cluster stddev must be > 0, got {self.stddev}")
        if self.count < 1:
            raise ValueError(f"cluster count must be >= 1, got {self.count}")


@dataclass(frozen=True)
class PointCloudSpec:
    """Gaussian cluster mixture; fully determined by its seed."""

    clusters: tuple
    seed: int = 0

    def __post_init__(self) -> None:
        clusters = tuple(self.clusters)
        object.__setattr__(self, "clusters", clusters)
        if not clusters:
            raise ValueError("need at least one cluster")
        if sum(c.count for c in clusters) < 2:
            raise ValueError("total point count must be >= 2")
        dims = {len(c.center) for c in clusters}
        if len(dims) != 1:
            raise ValueError(f"all cluster centers must share one dimensionality, got {dims}")
        if self.seed < 0:
            raise ValueError("seed must be unsigned")


# Reference study cloud: four 2-D Gaussian clusters of decreasing size and
# varying density, partially overlapping; the bottom-left and bottom-right
# clusters share output label 0. Not claimed to match any previously
# published point-for-point figure; it reproduces the described structure.
REFERENCE_CLOUD_SPEC = PointCloudSpec(
    clusters=(
        ClusterSpec(center=(0.0, 0.0), stddev=0.60, count=400, label=0),
        ClusterSpec(center=(3.6, 3.6), stddev=0.75, count=300, label=1),
        ClusterSpec(center=(0.0, 3.4), stddev=0.50, count=200, label=2),
        ClusterSpec(center=(3.4, 0.0), stddev=0.45, count=100, label=0),
    ),
    seed=42,
)


def _standard_normals(rng: np.random.Generator, count: int) -> np.ndarray:
    """Box-Muller transform over PCG64 uniform doubles.

    Spelled out instead of using Generator.standard_normal so the stream is
    pinned to two documented primitives (PCG64 raw doubles + Box-Muller) and
    generated clouds stay bit-identical across platforms and numpy versions.
    """
    half = (count + 1) // 2
    u1 = rng.random(half)
    u2 = rng.random(half)
    radius = np.sqrt(-2.0 * np.log1p(-u1))  # u1 in [0,1) so 1-u1 in (0,1]
    angle = 2.0 * np.pi * u2
    z = np.concatenate([radius * np.cos(angle), radius * np.sin(angle)])
    return z[:count]


def generate_point_cloud(spec: PointCloudSpec) -> Dataset:
    """Sample the Gaussian clusters of ``spec``, deterministically.

    Records are emitted cluster by cluster in spec order. Outputs are the
    integer labels (as one real feature); ``meta`` records each point's
    cluster index so studies can recover ground-truth membership even when
    clusters share a label.
    """
    rng = np.random.default_rng(spec.seed)
    dim = len(spec.clusters[0].center)
    blocks = []
    labels = []
    cluster_ids = []
    for ci, cl in enumerate(spec.clusters):
        z = _standard_normals(rng, cl.count * dim).reshape(cl.count, dim)
        blocks.append(np.asarray(cl.center, dtype=np.float64) + cl.stddev * z)
        labels.extend([cl.label] * cl.count)
        cluster_ids.extend([ci] * cl.count)
    inputs = np.concatenate(blocks, axis=0)
    outputs = np.asarray(labels, dtype=np.float64)[:, None]
    return Dataset(inputs=inputs, outputs=outputs, meta=np.asarray(cluster_ids, dtype=np.int64))


def reference_cloud() -> Dataset:
    """The 1000-point reference cloud used throughout the docs and tests."""
    return generate_point_cloud(REFERENCE_CLOUD_SPEC)


def _resolve_columns(selector, header: Optional[list], what: str) -> list:
    """Map a column selector (names or 0-based indices) to index positions."""
    if isinstance(selector, str):
        selector = [s.strip() for s in selector.split(",") if s.strip()]
    cols = []
    for item in selector:
        if isinstance(item, int) or (isinstance(item, str) and item.lstrip("-").isdigit()):
            cols.append(int(item))
        else:
            if header is None:
                raise ValueError(f"{what} column {item!r} needs a header row to resolve by name")
            try:
                cols.append(header.index(item))
            except ValueError:
                raise ValueError(f"{what} column {item!r} not found in header {header}") from None
    if not cols:
        raise ValueError(f"{what} column selector is empty")
    return cols


def load_csv(path, input_cols, output_cols, has_header: bool = True) -> Dataset:
    """Load a dataset from CSV with explicit input/output column selection.

    Selectors are comma-separated column names (header required) or 0-based
    indices; they must be disjoint and non-empty. Every selected cell must
    parse as a finite number; violations report the 0-based data row and the
    column name.
    """
    path = Path(path)
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        rows = [row for row in reader if row]
    if not rows:
        raise ValueError(f"{path}: empty file")
    header = rows[0] if has_header else None
    data_rows = rows[1:] if has_header else rows
    in_idx = _resolve_columns(input_cols, header, "input")
    out_idx = _resolve_columns(output_cols, header, "output")
    if set(in_idx) & set(out_idx):
        overlap = sorted(set(in_idx) & set(out_idx))
        raise ValueError(f"input and output selectors overlap on columns {overlap}")
    if len(data_rows) < 2:
        raise ValueError(f"{path}: need at least 2 data rows, got {len(data_rows)}")

    def colname(c: int) -> str:
        return header[c] if header is not None else str(c)

    def parse_cell(row_i: int, row: list, c: int) -> float:
        try:
            v = float(row[c])
        except (ValueError, IndexError):
            cell = row[c] if c < len(row) else "<missing>"
            raise ValueError(
                f"{path}: non-numeric cell at row {row_i}, column {colname(c)!r}: {cell!r}"
            ) from None
        if not np.isfinite(v):
            raise ValueError(f"{path}: non-finite value at row {row_i}, column {colname(c)!r}")
        return v

    inputs = np.empty((len(data_rows), len(in_idx)), dtype=np.float64)
    outputs = np.empty((len(data_rows), len(out_idx)), dtype=np.float64)
    for i, row in enumerate(data_rows):
        for j, c in enumerate(in_idx):
            inputs[i, j] = parse_cell(i, row, c)
        for j, c in enumerate(out_idx):
            outputs[i, j] = parse_cell(i, row, c)
    return Dataset(inputs=inputs, outputs=outputs)


def save_csv(ds: Dataset, path) -> None:
    """Write ``in_0..,out_0..`` CSV, one row per record in id order.

    Floats are written with repr, the shortest form that parses back to the
    same double, so a save/load round trip is exact.
    """
    path = Path(path)
    header = [f"in_{j}" for j in range(ds.d_in)] + [f"out_{j}" for j in range(ds.d_out)]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for i in range(ds.n):
            cells = [repr(float(v)) for v in ds.inputs[i]] + [
                repr(float(v)) for v in ds.outputs[i]
            ]
            fh.write(",".join(cells) + "\n")


def _open_maybe_gzip(path: Path):
    with open(path, "rb") as fh:
        magic = fh.read(2)
    if magic == b"\x1f\x8b":
        return gzip.open(path, "rb")
    return open(path, "rb")


def _read_exact(fh, nbytes: int, path: Path, what: str) -> bytes:
    buf = fh.read(nbytes)
    if len(buf) != nbytes:
        raise ValueError(f"{path}: truncated {what} (wanted {nbytes} bytes, got {len(buf)})")
    return buf


def load_mnist_idx(images_path, labels_path) -> Dataset:
    """Load an MNIST-style IDX image/label file pair (plain or gzipped).

    Inputs are the row-major flattened pixels as raw 0..255 reals, outputs
    the label digit as one real. ``meta`` keeps the raw 2-D uint8 images for
    inspection. Byte order is big-endian per the IDX convention.
    """
    images_path, labels_path = Path(images_path), Path(labels_path)
    with _open_maybe_gzip(images_path) as fh:
        magic, n_img, rows, cols = struct.unpack(">IIII", _read_exact(fh, 16, images_path, "header"))
        if magic != _IDX_IMAGES_MAGIC:
            raise ValueError(
                f"{images_path}: bad magic 0x{magic:08x}, expected 0x{_IDX_IMAGES_MAGIC:08x} (images)"
            )
        pixels = np.frombuffer(
            _read_exact(fh, n_img * rows * cols, images_path, "pixel payload"), dtype=np.uint8
        ).reshape(n_img, rows, cols)
    with _open_maybe_gzip(labels_path) as fh:
        magic, n_lab = struct.unpack(">II", _read_exact(fh, 8, labels_path, "header"))
        if magic != _IDX_LABELS_MAGIC:
            raise ValueError(
                f"{labels_path}: bad magic 0x{magic:08x}, expected 0x{_IDX_LABELS_MAGIC:08x} (labels)"
            )
        labels = np.frombuffer(_read_exact(fh, n_lab, labels_path, "label payload"), dtype=np.uint8)
    if n_img != n_lab:
        raise ValueError(f"record count mismatch: {n_img} images vs {n_lab} labels")
    inputs = pixels.reshape(n_img, rows * cols).astype(np.float64)
    outputs = labels.astype(np.float64)[:, None]
    return Dataset(inputs=inputs, outputs=outputs, meta=pixels.copy())
