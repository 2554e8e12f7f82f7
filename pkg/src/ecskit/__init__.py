"""Data-quality auditing by pairwise-distance equivalence classes.

Splits a dataset into input and output space, classifies every record pair
by its two distances against two thresholds, builds per-record cumulative
neighbor-rank profiles, and derives outlier / isolation / local-group
findings plus superimposed histograms from them.
"""

__version__ = "0.1.0"

from .dataset import (
    ClusterSpec,
    Dataset,
    PointCloudSpec,
    REFERENCE_CLOUD_SPEC,
    generate_point_cloud,
    load_csv,
    load_mnist_idx,
    reference_cloud,
    save_csv,
)
from .metrics import (
    DeltaSpec,
    MetricKind,
    ResolvedDeltas,
    distance,
    max_pairwise_distance,
    resolve_deltas,
)
from .core import (
    EcsConfig,
    EcsProfile,
    EcsRun,
    PairClass,
    classify_pair,
    compute_run,
    pair_membership,
)
from .detectors import (
    DetectionReport,
    Finding,
    GroupRule,
    IsolationRule,
    OutlierRule,
    Requirement,
    RequirementsVerdict,
    check_requirements,
    detect_groups,
    detect_isolated,
    detect_outliers,
    fulfillment_histogram,
    parse_requirements,
)
from .histogram import HistogramGrid, RegionQuery, build_grid, export_grid, query_region
from .runio import load_run, save_run

__all__ = [
    "__version__",
    "ClusterSpec",
    "Dataset",
    "PointCloudSpec",
    "REFERENCE_CLOUD_SPEC",
    "generate_point_cloud",
    "load_csv",
    "load_mnist_idx",
    "reference_cloud",
    "save_csv",
    "DeltaSpec",
    "MetricKind",
    "ResolvedDeltas",
    "distance",
    "max_pairwise_distance",
    "resolve_deltas",
    "EcsConfig",
    "EcsProfile",
    "EcsRun",
    "PairClass",
    "classify_pair",
    "compute_run",
    "pair_membership",
    "DetectionReport",
    "Finding",
    "GroupRule",
    "IsolationRule",
    "OutlierRule",
    "Requirement",
    "RequirementsVerdict",
    "check_requirements",
    "detect_groups",
    "detect_isolated",
    "detect_outliers",
    "fulfillment_histogram",
    "parse_requirements",
    "HistogramGrid",
    "RegionQuery",
    "build_grid",
    "export_grid",
    "query_region",
    "load_run",
    "save_run",
]
