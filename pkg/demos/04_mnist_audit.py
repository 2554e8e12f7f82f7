"""Large-scale audit: the 60k handwritten-digit training set.

Usage:
    python demos/04_mnist_audit.py <train-images-idx3-ubyte[.gz]> \
                                   <train-labels-idx1-ubyte[.gz]> [threads]

Pixel vectors are compared with plain euclidean distance on the raw 0..255
values. High-dimensional distances concentrate, so the input threshold is
set generously at 75% of the maximum pairwise distance; the output threshold
stays 0 (any differing digit is a disagreement).

This computes 1.8e9 pair distances over 784 dimensions twice (the relative
threshold needs the exact maximum before classification starts); give it
threads and time. Expect well under two hours on eight cores.
"""

import sys
import time
from pathlib import Path

import ecskit as ek

if len(sys.argv) < 3:
    print(__doc__)
    sys.exit(2)

images, labels = sys.argv[1], sys.argv[2]
threads = int(sys.argv[3]) if len(sys.argv) > 3 else 8

ds = ek.load_mnist_idx(images, labels)
print(f"loaded {ds.n} records, {ds.d_in} pixels each")

cfg = ek.EcsConfig(
    delta_in=ek.DeltaSpec.relative(0.75),
    delta_out=ek.DeltaSpec.absolute(0.0),
    k_max=1500,  # large enough for the biggest group size studied below
)
t0 = time.perf_counter()
run = ek.compute_run(ds, cfg, workers=threads)
print(f"profiles computed in {time.perf_counter() - t0:.0f}s; "
      f"delta_in = {run.resolved.delta_in_abs:.2f}")

out_dir = Path(__file__).parent / "output"
out_dir.mkdir(exist_ok=True)
ek.save_run(run, out_dir / "mnist_run")

# --- outliers -------------------------------------------------------------------

print("\nfulfillment of the EU set at window 200 (how many of a record's")
print("200 nearest neighbors carry a different digit):")
for (lo, hi), count in ek.fulfillment_histogram(run, ek.PairClass.EU, 200):
    label = f"{lo}-{hi}" if lo != hi else f"{lo}"
    print(f"   {label:>8}: {count}")

rep = ek.detect_outliers(run, ek.OutlierRule(window=200, min_eu=181))
print(f"\noutliers (worse than random assignment, >180 of 200 disagreeing): "
      f"{rep.counts['findings']}")

# --- isolation -------------------------------------------------------------------

iso = ek.detect_isolated(run, ek.IsolationRule(window=200))
print(f"isolated digits (fewer than 200 close neighbors): "
      f"UE {iso.counts['UE']}, UU {iso.counts['UU']}, union {iso.counts['findings']}")
earliest = [f for f in iso.findings if f.onset and f.onset <= 10]
print(f"   of which {len(earliest)} start rising within their first 10 neighbors")

# --- local groups ------------------------------------------------------------------

print("\nrecords belonging to local groups of identical digit (tolerance 5):")
for g in (100, 200, 500, 1000, 1500):
    grp = ek.detect_groups(run, ek.GroupRule(group_size=g, tolerance=5))
    print(f"   group size >= {g:>5}: {grp.counts['findings']}")

for set_ in (ek.PairClass.EU, ek.PairClass.EE):
    grid = ek.build_grid(run, set_, 500, gamma=0.4)
    ek.export_grid(grid, "png", out_dir / f"mnist_{set_.name}.png")
print(f"\nhistograms written to {out_dir}/mnist_EU.png and mnist_EE.png")
print(f"run artifact at {out_dir}/mnist_run  (explore with: "
      f"ecs serve --run {out_dir}/mnist_run)")
