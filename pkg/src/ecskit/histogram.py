"""Superimposed profile-function histograms.

All records' cumulative functions for one pair class are stacked into a 2-D
count grid: cell (k, v) counts the records whose function passes through
value v at rank k. Dense regions render darker; a gamma correction keeps
even a single function visible against tens of thousands. Counts are stored
exactly; gamma only ever applies to the derived intensity, never the data.

The grid also answers reverse queries (region -> record ids), which makes a
brushed rectangle and a detector rule two spellings of the same predicate.
"""

from __future__ import annotations

import csv as _csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from .core import EcsRun, PairClass

__all__ = ["HistogramGrid", "RegionQuery", "build_grid", "query_region", "export_grid"]


@dataclass(frozen=True)
class HistogramGrid:
    """Counts and gamma-corrected intensity over ranks 1..k_max, values 0..k_max.

    ``counts[k-1, v]`` is the number of records with F(k) = v. Every column
    sums to n. ``intensity = (counts / counts.max()) ** gamma``, zero for
    empty cells, one at the densest cell.
    """

    set_: PairClass
    k_max: int
    counts: np.ndarray  # (k_max, k_max + 1) int64
    gamma: float
    intensity: np.ndarray  # same shape, float64 in [0, 1]

    @property
    def n(self) -> int:
        return int(self.counts[0].sum())

    def cell(self, k: int, v: int) -> int:
        return int(self.counts[k - 1, v])


def build_grid(run: EcsRun, set_: PairClass, window: int, gamma: float = 0.4) -> HistogramGrid:
    """Superimpose all cumulative functions of one class into a count grid."""
    if gamma <= 0:
        raise ValueError(f"gamma must be > 0, got {gamma}")
    cum = run.cumulative_matrix(set_, window)  # validates the window
    counts = np.empty((window, window + 1), dtype=np.int64)
    for k in range(window):
        counts[k] = np.bincount(cum[:, k], minlength=window + 1)
    peak = counts.max()
    intensity = (counts / peak) ** float(gamma)
    counts.setflags(write=False)
    intensity.setflags(write=False)
    return HistogramGrid(set_=set_, k_max=window, counts=counts, gamma=float(gamma),
                         intensity=intensity)


@dataclass(frozen=True)
class RegionQuery:
    """A rectangle in (rank, value) space plus the matching mode.

    ``passes_through`` selects records whose function enters the value band
    anywhere in the rank interval; ``ends_in`` requires it at the interval's
    right edge (that is the detector-rule shape: F(k_hi) within the band).
    """

    set_: PairClass
    k_lo: int
    k_hi: int
    v_lo: int
    v_hi: int
    mode: str = "passes_through"

    def __post_init__(self) -> None:
        if self.mode not in ("passes_through", "ends_in"):
            raise ValueError(f"mode must be 'passes_through' or 'ends_in', got {self.mode!r}")
        if self.k_lo > self.k_hi or self.v_lo > self.v_hi:
            raise ValueError("empty interval: lo must not exceed hi")
        if self.k_lo < 1 or self.v_lo < 0:
            raise ValueError("rank interval starts at 1, value interval at 0")


def query_region(run: EcsRun, grid: HistogramGrid, q: RegionQuery) -> np.ndarray:
    """Record ids whose function meets the region, ascending."""
    if q.set_ is not grid.set_:
        raise ValueError(f"query targets {q.set_.name} but grid holds {grid.set_.name}")
    if q.k_hi > grid.k_max or q.v_hi > grid.k_max:
        raise ValueError(
            f"region ({q.k_lo}..{q.k_hi}, {q.v_lo}..{q.v_hi}) exceeds "
            f"grid bounds (k <= {grid.k_max}, v <= {grid.k_max})"
        )
    if q.mode == "ends_in":
        values = run.counts_at(q.set_, q.k_hi)
        hit = (values >= q.v_lo) & (values <= q.v_hi)
    else:
        cum = run.cumulative_matrix(q.set_, q.k_hi)[:, q.k_lo - 1 :]
        hit = ((cum >= q.v_lo) & (cum <= q.v_hi)).any(axis=1)
    return np.flatnonzero(hit)


def _grid_pixels(grid: HistogramGrid) -> np.ndarray:
    """8-bit grayscale raster: k rightward, v upward, origin bottom-left."""
    levels = np.rint(255.0 * grid.intensity).astype(np.uint8)  # (k, v)
    return levels.T[::-1]  # rows top-down = v descending


def export_grid(grid: HistogramGrid, format: str, path) -> None:
    """Write the grid as an 8-bit grayscale PNG or as a k,v,count,intensity CSV.

    Both outputs are deterministic for identical grids.
    """
    path = Path(path)
    if format == "png":
        Image.fromarray(_grid_pixels(grid), mode="L").save(path, format="PNG")
    elif format == "csv":
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = _csv.writer(fh, lineterminator="\n")
            writer.writerow(["k", "v", "count", "intensity"])
            for k in range(1, grid.k_max + 1):
                for v in range(grid.k_max + 1):
                    writer.writerow(
                        [k, v, grid.counts[k - 1, v], repr(float(grid.intensity[k - 1, v]))]
                    )
    else:
        raise ValueError(f"unknown export format {format!r} (valid: png, csv)")
