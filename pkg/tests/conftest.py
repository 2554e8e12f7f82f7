import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))  # for the oracle module

import ecskit as ek

# study configuration used by the reference-cloud fixtures: relative input
# threshold 0.3, output threshold 0 (any differing output is "large")
CLOUD_CFG = ek.EcsConfig(
    in_metric=ek.MetricKind.EUCLIDEAN,
    out_metric=ek.MetricKind.EUCLIDEAN,
    delta_in=ek.DeltaSpec.relative(0.3),
    delta_out=ek.DeltaSpec.absolute(0.0),
    k_max=150,
)


def make_line_ds():
    """Four points on a line: x = 0, 1, 2, 10 with labels 0, 0, 1, 0."""
    return ek.Dataset(
        inputs=np.array([[0.0], [1.0], [2.0], [10.0]]),
        outputs=np.array([[0.0], [0.0], [1.0], [0.0]]),
    )


LINE_CFG = ek.EcsConfig(
    in_metric=ek.MetricKind.EUCLIDEAN,
    out_metric=ek.MetricKind.EXACT_MATCH,
    delta_in=ek.DeltaSpec.absolute(3.0),
    delta_out=ek.DeltaSpec.absolute(0.0),
    k_max=3,
)


@pytest.fixture(scope="session")
def line_ds():
    return make_line_ds()


@pytest.fixture(scope="session")
def line_run(line_ds):
    return ek.compute_run(line_ds, LINE_CFG)


@pytest.fixture(scope="session")
def cloud():
    return ek.reference_cloud()


@pytest.fixture(scope="session")
def cloud_run(cloud):
    return ek.compute_run(cloud, CLOUD_CFG)


def random_instance(rng, n=None, d_in=None, d_out=None, duplicates=False):
    """Random dataset + config pair for property/oracle tests."""
    n = n or int(rng.integers(10, 80))
    d_in = d_in or int(rng.integers(1, 11))
    d_out = d_out or int(rng.integers(1, 4))
    inputs = rng.normal(size=(n, d_in)) * rng.uniform(0.5, 5.0)
    if rng.random() < 0.5:
        outputs = rng.integers(0, 4, size=(n, d_out)).astype(float)
    else:
        outputs = rng.normal(size=(n, d_out))
    if duplicates:
        k = max(2, n // 5)
        src = rng.integers(0, n, size=k)
        dst = rng.integers(0, n, size=k)
        inputs[dst] = inputs[src]
        if rng.random() < 0.5:
            outputs[dst] = outputs[src]
    in_kind = rng.choice(["euclidean", "manhattan"])
    out_kind = rng.choice(["euclidean", "manhattan", "exact_match"])
    if rng.random() < 0.5:
        din = ("relative", float(rng.uniform(0.05, 0.9)))
    else:
        din = ("absolute", float(rng.uniform(0.1, 3.0)))
    if rng.random() < 0.5:
        dout = ("absolute", 0.0)
    else:
        dout = ("relative", float(rng.uniform(0.0, 0.9)))
    k_max = int(rng.integers(1, n))
    ds = ek.Dataset(inputs=inputs, outputs=outputs)
    cfg = ek.EcsConfig(
        in_metric=ek.MetricKind(in_kind),
        out_metric=ek.MetricKind(out_kind),
        delta_in=ek.DeltaSpec(din[0], din[1]),
        delta_out=ek.DeltaSpec(dout[0], dout[1]),
        k_max=k_max,
    )
    return ds, cfg, (din, dout)
