"""Neighbor-rank pair classification engine.

Every unordered pair of records falls in exactly one of four classes by
comparing its input distance and its output distance against the two
thresholds: EE (both small), EU (small input, large output), UE (large
input, small output), UU (both large). The boundary is "small": a distance
equal to its threshold counts as E.

Per record (the anchor), all other records are ranked by ascending input
distance, ties broken by ascending record id, and the first k ranks are
classified. Accumulating the class indicators over the rank axis yields the
four monotone step functions that everything downstream (histograms,
detectors, the service) consumes.

The full n x n distance matrix is never materialized. Anchors are processed
in blocks; a block's distance rows are computed, reduced to each anchor's
k-smallest window, classified, and dropped. When a threshold is relative the
engine therefore makes two passes over all pairs: one to find the maximum
distance (the threshold must be fixed before any pair is classified), one to
classify. Blocks may be spread over worker threads; each anchor's result is
a pure function of the dataset, so scheduling cannot change any output bit.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import IntEnum
from typing import Iterator, Optional

import numpy as np

from .dataset import Dataset
from .metrics import (
    DeltaSpec,
    MetricKind,
    PairwiseMatrix,
    ResolvedDeltas,
    distance,
    resolve_deltas,
)

__all__ = [
    "PairClass",
    "EcsConfig",
    "EcsProfile",
    "EcsRun",
    "classify_pair",
    "compute_run",
    "pair_membership",
]

DEFAULT_K_MAX = 500


class PairClass(IntEnum):
    """The four pair classes; codes are 2*(input large) + (output large)."""

    EE = 0
    EU = 1
    UE = 2
    UU = 3

    @classmethod
    def parse(cls, name: str) -> "PairClass":
        try:
            return cls[name.upper()]
        except KeyError:
            valid = ", ".join(c.name for c in cls)
            raise ValueError(f"unknown pair class {name!r} (valid: {valid})") from None


def classify_pair(d_in: float, d_out: float, resolved: ResolvedDeltas) -> PairClass:
    """Classify one pair from its two distances. Boundary values are E."""
    if not (np.isfinite(d_in) and np.isfinite(d_out)) or d_in < 0 or d_out < 0:
        raise ValueError(f"distances must be finite and >= 0, got {d_in!r}, {d_out!r}")
    return PairClass(2 * (d_in > resolved.delta_in_abs) + (d_out > resolved.delta_out_abs))


@dataclass(frozen=True)
class EcsConfig:
    """Everything needed to reproduce a run on a given dataset."""

    in_metric: MetricKind = MetricKind.EUCLIDEAN
    out_metric: MetricKind = MetricKind.EUCLIDEAN
    delta_in: DeltaSpec = DeltaSpec.relative(0.3)
    delta_out: DeltaSpec = DeltaSpec.absolute(0.0)
    k_max: int = DEFAULT_K_MAX  # neighbor window, clamped to n-1 at run time

    def __post_init__(self) -> None:
        if self.k_max < 1:
            raise ValueError(f"k_max must be >= 1, got {self.k_max}")
        object.__setattr__(self, "in_metric", MetricKind(self.in_metric))
        object.__setattr__(self, "out_metric", MetricKind(self.out_metric))

    def to_dict(self) -> dict:
        return {
            "in_metric": self.in_metric.value,
            "out_metric": self.out_metric.value,
            "delta_in": {"mode": self.delta_in.mode, "value": self.delta_in.value},
            "delta_out": {"mode": self.delta_out.mode, "value": self.delta_out.value},
            "k_max": self.k_max,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EcsConfig":
        return cls(
            in_metric=MetricKind(d["in_metric"]),
            out_metric=MetricKind(d["out_metric"]),
            delta_in=DeltaSpec(d["delta_in"]["mode"], d["delta_in"]["value"]),
            delta_out=DeltaSpec(d["delta_out"]["mode"], d["delta_out"]["value"]),
            k_max=int(d["k_max"]),
        )


@dataclass(frozen=True)
class EcsProfile:
    """One anchor's ranked window: neighbor ids, classes, cumulative counts.

    ``cumulative[s][r]`` is the number of ranks <= r+1 classified s. At every
    rank exactly one of the four functions increments, so their values sum to
    the rank and each stays below the main diagonal F(k) <= k.
    """

    anchor_id: int
    neighbor_ids: np.ndarray
    class_at_rank: np.ndarray
    cumulative: dict

    @property
    def k(self) -> int:
        return len(self.neighbor_ids)


class EcsRun:
    """Computed profiles for every record, with full provenance.

    Stores the compact (n, k) neighbor-id and class-code arrays; per-anchor
    ``EcsProfile`` views and per-set cumulative matrices are derived on
    demand. Immutable after construction and safe to share across threads.
    """

    def __init__(
        self,
        config: EcsConfig,
        resolved: ResolvedDeltas,
        dataset: Dataset,
        neighbor_ids: np.ndarray,
        class_codes: np.ndarray,
        dataset_fingerprint: Optional[str] = None,
    ):
        if neighbor_ids.shape != class_codes.shape:
            raise ValueError("neighbor_ids and class_codes must have identical shape")
        if neighbor_ids.shape[0] != dataset.n:
            raise ValueError("exactly one profile per record required")
        self.config = config
        self.resolved = resolved
        self.dataset = dataset
        self.neighbor_ids = neighbor_ids
        self.class_codes = class_codes
        self.dataset_fingerprint = dataset_fingerprint or dataset.fingerprint()
        self.neighbor_ids.setflags(write=False)
        self.class_codes.setflags(write=False)

    @property
    def n(self) -> int:
        return self.neighbor_ids.shape[0]

    @property
    def k(self) -> int:
        """Effective window length (requested k_max clamped to n-1)."""
        return self.neighbor_ids.shape[1]

    def profile(self, anchor_id: int) -> EcsProfile:
        if not 0 <= anchor_id < self.n:
            raise ValueError(f"record id {anchor_id} out of range 0..{self.n - 1}")
        codes = self.class_codes[anchor_id]
        cumulative = {s: np.cumsum(codes == s.value, dtype=np.int64) for s in PairClass}
        return EcsProfile(
            anchor_id=anchor_id,
            neighbor_ids=self.neighbor_ids[anchor_id],
            class_at_rank=codes,
            cumulative=cumulative,
        )

    def profiles(self) -> Iterator[EcsProfile]:
        return (self.profile(i) for i in range(self.n))

    def counts_at(self, set_: PairClass, window: int) -> np.ndarray:
        """F_set(window) for every record, shape (n,)."""
        self._check_window(window)
        return np.count_nonzero(self.class_codes[:, :window] == int(set_), axis=1)

    def cumulative_matrix(self, set_: PairClass, window: int) -> np.ndarray:
        """F_set(1..window) for every record, shape (n, window)."""
        self._check_window(window)
        return np.cumsum(self.class_codes[:, :window] == int(set_), axis=1, dtype=np.int32)

    def _check_window(self, window: int) -> None:
        if not 1 <= window <= self.k:
            raise ValueError(f"window {window} outside computed profile length 1..{self.k}")

    def pair_membership(self, i: int, j: int) -> PairClass:
        """Class of the unordered pair (i, j); symmetric by construction."""
        if i == j:
            raise ValueError(f"self-comparison ({i}, {i}) is excluded")
        for a in (i, j):
            if not 0 <= a < self.n:
                raise ValueError(f"record id {a} out of range 0..{self.n - 1}")
        for a, b in ((i, j), (j, i)):
            hit = np.flatnonzero(self.neighbor_ids[a] == b)
            if hit.size:
                return PairClass(int(self.class_codes[a, hit[0]]))
        # outside both stored windows: recompute from raw vectors
        d_in = distance(self.config.in_metric, self.dataset.inputs[i], self.dataset.inputs[j])
        d_out = distance(self.config.out_metric, self.dataset.outputs[i], self.dataset.outputs[j])
        return classify_pair(d_in, d_out, self.resolved)


def pair_membership(run: EcsRun, i: int, j: int) -> PairClass:
    return run.pair_membership(i, j)


def _window_of(row: np.ndarray, k: int) -> np.ndarray:
    """Indices of the k smallest row entries, ordered by (value, index).

    The anchor's own entry must be +inf. Ties at the window boundary are
    resolved by ascending index so the ordering is total and deterministic.
    """
    kth = np.partition(row, k - 1)[k - 1]
    cand = np.flatnonzero(row <= kth)
    order = np.lexsort((cand, row[cand]))
    return cand[order[:k]]


_BLOCK_ELEMS = 12_800_000  # ~100 MB of float64 distance rows per block


def compute_run(ds: Dataset, cfg: EcsConfig, workers: int = 1) -> EcsRun:
    """Rank, classify, and accumulate the neighbor window of every record.

    ``workers`` only caps thread fan-out over anchor blocks; results are
    bit-identical for any worker count.
    """
    n = ds.n
    k = min(cfg.k_max, n - 1)
    resolved = resolve_deltas(ds, cfg.in_metric, cfg.out_metric, cfg.delta_in, cfg.delta_out,
                              workers=workers)
    din = PairwiseMatrix(cfg.in_metric, ds.inputs)
    dout = PairwiseMatrix(cfg.out_metric, ds.outputs)
    neighbor_ids = np.empty((n, k), dtype=np.int32)
    class_codes = np.empty((n, k), dtype=np.uint8)
    delta_in_abs = resolved.delta_in_abs
    delta_out_abs = resolved.delta_out_abs

    def fill_block(span):
        lo, hi = span
        rows = din.block(lo, hi)
        for i in range(lo, hi):
            row = rows[i - lo]
            row[i] = np.inf
            nbrs = _window_of(row, k)
            d_out_row = dout.one_vs(i, nbrs)
            big_in = (row[nbrs] > delta_in_abs).astype(np.uint8)
            big_out = (d_out_row > delta_out_abs).astype(np.uint8)
            neighbor_ids[i] = nbrs
            class_codes[i] = 2 * big_in + big_out

    rows_per_block = max(1, min(1024, _BLOCK_ELEMS // n))
    spans = [(lo, min(lo + rows_per_block, n)) for lo in range(0, n, rows_per_block)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(fill_block, spans))
    else:
        for span in spans:
            fill_block(span)

    return EcsRun(
        config=cfg,
        resolved=resolved,
        dataset=ds,
        neighbor_ids=neighbor_ids,
        class_codes=class_codes,
    )
