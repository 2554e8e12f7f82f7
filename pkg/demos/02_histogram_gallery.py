"""Gallery: how the histogram grid, gamma correction, and brushing relate.

Renders the same EU histogram at several gamma values, then shows that a
brushed rectangle and a detector rule select exactly the same records.
"""

from pathlib import Path

import numpy as np

import ecskit as ek

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

cloud = ek.reference_cloud()
run = ek.compute_run(cloud, ek.EcsConfig(delta_in=ek.DeltaSpec.relative(0.3),
                                         delta_out=ek.DeltaSpec.absolute(0.0),
                                         k_max=150))

# --- gamma correction ---------------------------------------------------------
# Counts per cell span several orders of magnitude; linear shading (gamma 1)
# hides sparse functions. Lower gamma lifts them without touching the data.

for gamma in (1.0, 0.7, 0.4, 0.25):
    grid = ek.build_grid(run, ek.PairClass.EU, 150, gamma=gamma)
    name = OUT / f"gallery_EU_gamma{gamma:g}.png"
    ek.export_grid(grid, "png", name)
    visible = int(np.count_nonzero(np.rint(255 * grid.intensity) >= 8))
    print(f"gamma {gamma:>4}: {name.name}  ({visible} cells above display floor)")

print("\nthe stored counts are identical in all four images; only the")
print("intensity mapping changed")

# --- brushing == detecting ------------------------------------------------------
# The outlier rule "at least 71 of 100 neighbors disagree" is the rectangle
# [k = 100, v in 71..100] entered at its right edge.

grid = ek.build_grid(run, ek.PairClass.EU, 100)
region = ek.RegionQuery(set_=ek.PairClass.EU, k_lo=1, k_hi=100,
                        v_lo=71, v_hi=100, mode="ends_in")
brushed = ek.query_region(run, grid, region)
report = ek.detect_outliers(run, ek.OutlierRule(window=100, min_eu=71))
assert brushed.tolist() == sorted(f.id for f in report.findings)
print(f"\nbrushed rectangle and detector rule agree on {len(brushed)} record(s): "
      f"{brushed.tolist()}")

# passes_through answers a different question: "was the function ever flat?"
ee_grid = ek.build_grid(run, ek.PairClass.EE, 100)
flat_start = ek.RegionQuery(set_=ek.PairClass.EE, k_lo=10, k_hi=10, v_lo=0, v_hi=0)
never_grew = ek.query_region(run, ee_grid, flat_start)
print(f"records with zero same-label close neighbors among their first 10: "
      f"{len(never_grew)}")
