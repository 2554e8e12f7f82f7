"""Distance functions for the input and output space, and threshold resolution.

Distances in the input space and the output space are always computed
independently, each with its own metric. A threshold (delta) separates
"small" from "large" distances on each side; it is given either as an
absolute value or relative to the exact maximum pairwise distance of the
dataset at hand. All arithmetic is 64-bit floating point and comparisons
carry no epsilon fuzz, so verdicts are reproducible bit-for-bit.

Euclidean and manhattan distances are delegated to ``scipy.spatial.distance``,
which accumulates per-feature terms sequentially. That makes every pairwise
value exactly symmetric (d(a,b) and d(b,a) run the same float ops) and
independent of how the computation is blocked or threaded.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.spatial.distance import cdist

__all__ = [
    "MetricKind",
    "DeltaSpec",
    "ResolvedDeltas",
    "PairwiseMatrix",
    "distance",
    "pairwise",
    "max_pairwise_distance",
    "resolve_deltas",
]

# target elements per distance block, ~100 MB of float64
_BLOCK_ELEMS = 12_800_000

_CDIST_NAME = {
    "euclidean": "euclidean",
    "manhattan": "cityblock",
}


class MetricKind(str, Enum):
    """Closed set of supported metrics.

    ``EXACT_MATCH`` yields 0.0 when the two vectors are identical and 1.0
    otherwise; it exists so categorical outputs need no one-hot encoding.
    """

    EUCLIDEAN = "euclidean"
    MANHATTAN = "manhattan"
    EXACT_MATCH = "exact_match"

    @classmethod
    def parse(cls, name: str) -> "MetricKind":
        try:
            return cls(name)
        except ValueError:
            valid = ", ".join(k.value for k in cls)
            raise ValueError(f"unknown metric {name!r} (valid: {valid})") from None


@dataclass(frozen=True)
class DeltaSpec:
    """A small/large distance threshold, absolute or relative.

    In relative mode ``value`` is a fraction in [0, 1] of the maximum
    pairwise distance on the corresponding side of the dataset.
    """

    mode: str  # "absolute" | "relative"
    value: float

    def __post_init__(self) -> None:
        if self.mode not in ("absolute", "relative"):
            raise ValueError(f"delta mode must be 'absolute' or 'relative', got {self.mode!r}")
        v = float(self.value)
        if not np.isfinite(v) or v < 0.0:
            raise ValueError(f"delta value must be finite and >= 0, got {self.value!r}")
        if self.mode == "relative" and v > 1.0:
            raise ValueError(f"relative delta must lie in [0, 1], got {self.value!r}")
        object.__setattr__(self, "value", v)

    @classmethod
    def absolute(cls, value: float) -> "DeltaSpec":
        return cls("absolute", value)

    @classmethod
    def relative(cls, value: float) -> "DeltaSpec":
        return cls("relative", value)

    @classmethod
    def parse(cls, text: str) -> "DeltaSpec":
        """Parse the ``rel:X`` / ``abs:X`` command-line form."""
        prefix, _, num = text.partition(":")
        if prefix == "rel":
            return cls.relative(float(num))
        if prefix == "abs":
            return cls.absolute(float(num))
        raise ValueError(f"delta spec must look like 'rel:0.3' or 'abs:2.5', got {text!r}")

    def __str__(self) -> str:
        return f"{'rel' if self.mode == 'relative' else 'abs'}:{self.value!r}"


@dataclass(frozen=True)
class ResolvedDeltas:
    """Absolute thresholds after resolving relative specs against a dataset.

    The maximum pairwise distances are recorded even when no relative spec
    needed them, so every run artifact documents the scale it was computed on.
    """

    delta_in_abs: float
    delta_out_abs: float
    max_in_dist: float
    max_out_dist: float


def _normalized(m: np.ndarray) -> np.ndarray:
    # -0.0 + 0.0 == +0.0: makes byte-level row comparison equal numeric equality
    return np.ascontiguousarray(m, dtype=np.float64) + 0.0


def _row_codes(m: np.ndarray) -> np.ndarray:
    """Integer code per row such that codes agree exactly for identical rows."""
    _, codes = np.unique(_normalized(m), axis=0, return_inverse=True)
    return codes.ravel()


class PairwiseMatrix:
    """Block-wise pairwise distances of one point matrix against itself.

    Precomputes row-identity codes once for ``exact_match`` so repeated block
    requests stay cheap. Blocks are plain float64 arrays; rows are anchors,
    columns the full dataset.
    """

    def __init__(self, kind: MetricKind, points: np.ndarray):
        self.kind = MetricKind(kind)
        self.points = np.ascontiguousarray(points, dtype=np.float64)
        if self.points.ndim != 2:
            raise ValueError("points must be a 2-D matrix")
        self._codes = _row_codes(self.points) if self.kind is MetricKind.EXACT_MATCH else None

    @property
    def n(self) -> int:
        return self.points.shape[0]

    def block(self, lo: int, hi: int, cols_from: int = 0) -> np.ndarray:
        """Distances of rows [lo, hi) against rows [cols_from, n)."""
        if self._codes is not None:
            return (self._codes[lo:hi, None] != self._codes[None, cols_from:]).astype(np.float64)
        name = _CDIST_NAME[self.kind.value]
        return cdist(self.points[lo:hi], self.points[cols_from:], name)

    def one_vs(self, i: int, idx: np.ndarray) -> np.ndarray:
        """Distances of row ``i`` against the rows listed in ``idx``."""
        if self._codes is not None:
            return (self._codes[idx] != self._codes[i]).astype(np.float64)
        name = _CDIST_NAME[self.kind.value]
        return cdist(self.points[i : i + 1], self.points[idx], name)[0]


def pairwise(kind: MetricKind, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Full (len(a), len(b)) distance matrix between two point sets."""
    kind = MetricKind(kind)
    a = np.ascontiguousarray(a, dtype=np.float64)
    b = np.ascontiguousarray(b, dtype=np.float64)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[1]:
        raise ValueError(f"point sets must be 2-D with equal width, got {a.shape} vs {b.shape}")
    if kind is MetricKind.EXACT_MATCH:
        codes = _row_codes(np.concatenate([a, b], axis=0))
        return (codes[: len(a), None] != codes[None, len(a) :]).astype(np.float64)
    return cdist(a, b, _CDIST_NAME[kind.value])


def distance(kind: MetricKind, a, b) -> float:
    """Distance between two vectors under the chosen metric.

    Exactly the same float semantics as the bulk engine, so a single-pair
    recomputation can never disagree with a value taken from a block.
    """
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.shape[0]} vs {b.shape[0]}")
    if not (np.isfinite(a).all() and np.isfinite(b).all()):
        raise ValueError("vectors must be finite")
    return float(pairwise(kind, a[None, :], b[None, :])[0, 0])


def _block_rows(n: int) -> int:
    return max(1, min(1024, _BLOCK_ELEMS // max(n, 1)))


def max_pairwise_distance(points: np.ndarray, kind: MetricKind, workers: int = 1) -> float:
    """Exact maximum distance over all unordered pairs.

    Exhaustive by contract: every pair is visited (in upper-triangle blocks),
    never sampled, so relative thresholds derived from this value are
    reproducible. The float max is associative, hence worker count and block
    layout cannot change the result.
    """
    points = np.ascontiguousarray(points, dtype=np.float64)
    n = points.shape[0]
    if n < 2:
        raise ValueError(f"need at least 2 points, got {n}")
    pm = PairwiseMatrix(kind, points)
    rows = _block_rows(n)
    spans = [(lo, min(lo + rows, n)) for lo in range(0, n, rows)]

    def block_max(span):
        lo, hi = span
        return float(pm.block(lo, hi, cols_from=lo).max())

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return max(pool.map(block_max, spans))
    return max(map(block_max, spans))


def resolve_deltas(
    ds,
    in_kind: MetricKind,
    out_kind: MetricKind,
    delta_in: DeltaSpec,
    delta_out: DeltaSpec,
    workers: int = 1,
) -> ResolvedDeltas:
    """Turn (possibly relative) delta specs into absolute thresholds.

    Both maximum pairwise distances are always computed, also for absolute
    specs, so the provenance of a run records the scale of its dataset.
    """
    max_in = max_pairwise_distance(ds.inputs, in_kind, workers=workers)
    max_out = max_pairwise_distance(ds.outputs, out_kind, workers=workers)
    din = delta_in.value * max_in if delta_in.mode == "relative" else delta_in.value
    dout = delta_out.value * max_out if delta_out.mode == "relative" else delta_out.value
    return ResolvedDeltas(
        delta_in_abs=din,
        delta_out_abs=dout,
        max_in_dist=max_in,
        max_out_dist=max_out,
    )
