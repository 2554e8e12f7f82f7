"""Acceptance suite.

One test per criterion; each prints a single PASS/FAIL line (run pytest with
-s to see them inline). Criteria that need the full MNIST training set look
for it under $ECS_MNIST_DIR or tests/data/mnist and skip honestly when the
files are absent; everything else is self-contained.
"""

import json
import os
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

import ecskit as ek
from ecskit.core import PairClass
from ecskit.detectors import build_rule

from conftest import CLOUD_CFG, random_instance
from oracle import brute_force_run

EE, EU, UE, UU = PairClass.EE, PairClass.EU, PairClass.UE, PairClass.UU

_t0 = {}


def _start(name):
    _t0[name] = time.perf_counter()


def _finish(name, budget_s, failed=False):
    dt = time.perf_counter() - _t0[name]
    ok = not failed and dt <= budget_s
    label = "PASS" if ok else ("FAIL" if failed else "FAIL (over time budget)")
    print(f"\n[{name}] {label} ({dt:.1f}s, budget {budget_s:.0f}s)")
    assert dt <= budget_s, f"{name}: runtime {dt:.1f}s over budget {budget_s}s"


class _criterion:
    def __init__(self, name, budget_s):
        self.name, self.budget = name, budget_s

    def __enter__(self):
        _start(self.name)

    def __exit__(self, exc_type, exc, tb):
        if exc_type is not None:
            dt = time.perf_counter() - _t0[self.name]
            print(f"\n[{self.name}] FAIL ({dt:.1f}s): {exc}")
            return False
        _finish(self.name, self.budget)
        return False


def _check_invariants(run):
    """Partition identity, monotone 0/1 increments, diagonal bound."""
    k = run.k
    ranks = np.arange(1, k + 1)
    cums = {s: run.cumulative_matrix(s, k) for s in PairClass}
    total = sum(cums.values())
    assert (total == ranks).all(), "partition identity violated"
    for s, cum in cums.items():
        steps = np.diff(cum, axis=1, prepend=0)
        assert steps.min() >= 0 and steps.max() <= 1, f"{s.name} increments not in {{0,1}}"
        assert (cum <= ranks).all(), f"{s.name} exceeds the main diagonal"
    assert (run.neighbor_ids != np.arange(run.n)[:, None]).all(), "anchor in own window"


def test_p1_partition_identity_property_suite():
    with _criterion("P1 partition identity", 30):
        rng = np.random.default_rng(101)
        for trial in range(12):
            n = int(rng.integers(10, 301))
            ds, cfg, _ = random_instance(rng, n=n, duplicates=bool(rng.random() < 0.3))
            run = ek.compute_run(ds, cfg)
            _check_invariants(run)


def test_p2_brute_force_oracle_equivalence():
    with _criterion("P2 oracle equivalence", 120):
        rng = np.random.default_rng(202)
        for trial in range(50):
            n = int(rng.integers(10, 301)) if trial % 5 else int(rng.integers(200, 301))
            ds, cfg, (din, dout) = random_instance(
                rng, n=n, duplicates=bool(trial % 2 == 0)
            )
            run = ek.compute_run(ds, cfg)
            ref = brute_force_run(ds.inputs, ds.outputs, cfg.in_metric.value,
                                  cfg.out_metric.value, din, dout, cfg.k_max)
            assert np.array_equal(run.neighbor_ids, ref["neighbors"]), \
                f"trial {trial}: neighbor order differs"
            assert np.array_equal(run.class_codes, ref["codes"]), \
                f"trial {trial}: classes differ"
            for s in PairClass:
                assert np.array_equal(run.cumulative_matrix(s, run.k),
                                      ref["cumulative"][s.name]), \
                    f"trial {trial}: cumulative {s.name} differs"


def test_p3_point_cloud_study(cloud, cloud_run):
    with _criterion("P3 point-cloud study", 60):
        # (a) no isolated points below 50 close neighbors
        iso = ek.detect_isolated(cloud_run, ek.IsolationRule(window=50))
        assert iso.counts["findings"] == 0, f"expected 0 isolated, got {iso.counts}"

        # (b) 10 planted interior label flips recovered by the 71-of-100 rule
        spec = ek.REFERENCE_CLOUD_SPEC
        centers = np.array([c.center for c in spec.clusters])
        stds = np.array([c.stddev for c in spec.clusters])
        cluster = cloud.meta
        radii = np.linalg.norm(cloud.inputs - centers[cluster], axis=1) / stds[cluster]
        rng = np.random.default_rng(7)
        planted = []
        for ci, take in ((0, 4), (1, 3), (2, 2), (3, 1)):
            ids = np.flatnonzero((cluster == ci) & (radii <= 1.0))
            planted.extend(int(i) for i in rng.choice(ids, size=take, replace=False))
        flipped_label = {0: 1.0, 1: 0.0, 2: 0.0, 3: 2.0}
        outputs = cloud.outputs.copy()
        for i in planted:
            outputs[i, 0] = flipped_label[int(cluster[i])]
        noisy = ek.Dataset(inputs=cloud.inputs, outputs=outputs, meta=cloud.meta)
        noisy_run = ek.compute_run(noisy, CLOUD_CFG)
        rep = ek.detect_outliers(noisy_run, ek.OutlierRule(window=100, min_eu=71))
        found = set(f.id for f in rep.findings)
        missed = set(planted) - found
        false_pos = found - set(planted)
        assert not missed, f"planted outliers not recovered: {sorted(missed)}"
        assert len(false_pos) <= 2, f"too many false positives: {sorted(false_pos)}"

        # (c) group detection marks at least 90% of cluster-interior points
        grp = ek.detect_groups(cloud_run, ek.GroupRule(group_size=100, tolerance=5))
        members = set(f.id for f in grp.findings)
        interior = np.flatnonzero(radii <= 2.0)
        coverage = np.mean([int(i) in members for i in interior])
        assert coverage >= 0.90, f"interior coverage {coverage:.3f} < 0.90"


# --- P4: MNIST ------------------------------------------------------------------

MNIST_EXPECT = {
    "outliers_804": 804,             # window 200, threshold 181
    "eu_buckets": {(101, 200): 6021, (51, 100): 7337, (11, 50): 14914,
                   (0, 10): 31728, (0, 0): 16813},
    "isolated_ue": 129,              # window 200
    "isolated_uu": 132,
    "groups_tol5": {100: 38383, 200: 27351, 500: 14745, 1000: 7851, 1500: 4329},
}

MNIST_CFG = ek.EcsConfig(
    in_metric=ek.MetricKind.EUCLIDEAN,
    out_metric=ek.MetricKind.EUCLIDEAN,
    delta_in=ek.DeltaSpec.relative(0.75),
    delta_out=ek.DeltaSpec.absolute(0.0),
    k_max=1500,  # the largest studied group size
)


def _find_mnist():
    base = os.environ.get("ECS_MNIST_DIR")
    candidates = [Path(base)] if base else []
    candidates.append(Path(__file__).parent / "data" / "mnist")
    for d in candidates:
        if not d or not d.is_dir():
            continue
        for suffix in ("", ".gz"):
            img = d / f"train-images-idx3-ubyte{suffix}"
            lab = d / f"train-labels-idx1-ubyte{suffix}"
            if img.is_file() and lab.is_file():
                return img, lab
    return None


def _within(observed, expected, rel):
    return abs(observed - expected) <= rel * expected


@pytest.mark.skipif(_find_mnist() is None,
                    reason="MNIST IDX files not available (set ECS_MNIST_DIR)")
def test_p4_mnist_quantitative_reproduction():
    img, lab = _find_mnist()
    with _criterion("P4 MNIST reproduction", 7200):
        ds = ek.load_mnist_idx(img, lab)
        assert ds.n == 60000 and ds.d_in == 784
        workers = min(8, os.cpu_count() or 1)
        run = ek.compute_run(ds, MNIST_CFG, workers=workers)

        # (a) outliers at 181 of 200, within 1% of 804
        out = ek.detect_outliers(run, ek.OutlierRule(window=200, min_eu=181))
        assert _within(out.counts["findings"], MNIST_EXPECT["outliers_804"], 0.01), \
            f"outliers: {out.counts['findings']}"

        # (b) EU fulfillment buckets at window 200, within 1% each, summing to n
        hist = dict(ek.fulfillment_histogram(run, EU, 200))
        partition_total = sum(
            c for (lo, hi), c in hist.items()
        )
        assert partition_total == 60000
        for bucket, expect in MNIST_EXPECT["eu_buckets"].items():
            if bucket == (0, 10):
                observed = hist[(0, 0)] + hist[(1, 10)]
            else:
                observed = hist[bucket]
            assert _within(observed, expect, 0.01), f"bucket {bucket}: {observed}"

        # (c) isolation lists at window 200, within 2 ids
        iso = ek.detect_isolated(run, ek.IsolationRule(window=200))
        assert abs(iso.counts["UE"] - MNIST_EXPECT["isolated_ue"]) <= 2, iso.counts
        assert abs(iso.counts["UU"] - MNIST_EXPECT["isolated_uu"]) <= 2, iso.counts

        # (d) group membership counts, within 1% each
        for g, expect in MNIST_EXPECT["groups_tol5"].items():
            grp = ek.detect_groups(run, ek.GroupRule(group_size=g, tolerance=5))
            assert _within(grp.counts["findings"], expect, 0.01), \
                f"groups g={g}: {grp.counts['findings']}"

        # every reported outlier is worse than random assignment (> 90% EU)
        for f in out.findings:
            assert f.score / 200 > 0.90


def test_p4_smoke_10k_subsample():
    """Scale smoke: 10k x 784 pairs under the study thresholds, invariants only."""
    with _criterion("P4 smoke 10k", 180):
        found = _find_mnist()
        rng = np.random.default_rng(404)
        if found:
            full = ek.load_mnist_idx(*found)
            idx = np.arange(10000)
            ds = ek.Dataset(inputs=full.inputs[idx], outputs=full.outputs[idx])
        else:
            # surrogate with MNIST-like shape and value range
            inputs = rng.integers(0, 256, size=(10000, 784)).astype(np.float64)
            outputs = rng.integers(0, 10, size=(10000, 1)).astype(np.float64)
            ds = ek.Dataset(inputs=inputs, outputs=outputs)
        cfg = ek.EcsConfig(
            in_metric=ek.MetricKind.EUCLIDEAN,
            out_metric=ek.MetricKind.EUCLIDEAN,
            delta_in=ek.DeltaSpec.relative(0.75),
            delta_out=ek.DeltaSpec.absolute(0.0),
            k_max=200,
        )
        run = ek.compute_run(ds, cfg, workers=min(8, os.cpu_count() or 1))
        assert run.k == 200
        assert run.resolved.delta_in_abs == 0.75 * run.resolved.max_in_dist
        _check_invariants(run)
        grid = ek.build_grid(run, EU, 200)
        assert (grid.counts.sum(axis=1) == 10000).all()


def test_p5_histogram_detector_equivalence(cloud_run):
    with _criterion("P5 brushing/detector equivalence", 30):
        rng = np.random.default_rng(505)
        checked = 0
        while checked < 20:
            kind = rng.choice(["outliers", "groups", "isolated_ue", "isolated_uu"])
            window = int(rng.integers(2, cloud_run.k + 1))
            if kind == "outliers":
                t = int(rng.integers(1, window + 1))
                rep = ek.detect_outliers(cloud_run, ek.OutlierRule(window=window, min_eu=t))
                region = ek.RegionQuery(set_=EU, k_lo=1, k_hi=window,
                                        v_lo=t, v_hi=window, mode="ends_in")
                want = rep.ids()
            elif kind == "groups":
                tol = int(rng.integers(0, window))
                rep = ek.detect_groups(cloud_run,
                                       ek.GroupRule(group_size=window, tolerance=tol))
                region = ek.RegionQuery(set_=EE, k_lo=1, k_hi=window,
                                        v_lo=window - tol, v_hi=window, mode="ends_in")
                want = rep.ids()
            else:
                set_ = UE if kind == "isolated_ue" else UU
                rep = ek.detect_isolated(cloud_run, ek.IsolationRule(window=window))
                region = ek.RegionQuery(set_=set_, k_lo=1, k_hi=window,
                                        v_lo=1, v_hi=window, mode="ends_in")
                want = rep.ids(section=set_.name)
            grid = ek.build_grid(cloud_run, region.set_, window)
            got = ek.query_region(cloud_run, grid, region)
            assert np.array_equal(got, want), f"{kind} window={window} mismatch"
            checked += 1


def test_p6_determinism_and_parallelism(cloud, tmp_path):
    with _criterion("P6 determinism", 120):
        dirs = []
        for workers in (1, 4, 8):
            run = ek.compute_run(cloud, CLOUD_CFG, workers=workers)
            d = tmp_path / f"run_w{workers}"
            ek.save_run(run, d)
            dirs.append(d)
        names = ["run.json", "neighbors.npy", "classes.npy", "inputs.npy",
                 "outputs.npy", "meta.npy"]
        for name in names:
            blobs = [(d / name).read_bytes() for d in dirs]
            assert blobs[0] == blobs[1] == blobs[2], f"{name} differs across worker counts"

        run = ek.load_run(dirs[0])
        grid = ek.build_grid(run, EU, 100)
        pngs, csvs = [], []
        for i in range(2):
            p, c = tmp_path / f"g{i}.png", tmp_path / f"g{i}.csv"
            ek.export_grid(grid, "png", p)
            ek.export_grid(grid, "csv", c)
            pngs.append(p.read_bytes())
            csvs.append(c.read_bytes())
        assert pngs[0] == pngs[1] and csvs[0] == csvs[1]


def test_p7_cli_contract(tmp_path):
    with _criterion("P7 CLI contract", 120):
        import jsonschema

        def ecs(*args):
            return subprocess.run([sys.executable, "-m", "ecskit", *map(str, args)],
                                  capture_output=True, text=True)

        csv_path = tmp_path / "cloud.csv"
        assert ecs("generate", "--out", csv_path).returncode == 0
        run_dir = tmp_path / "run"
        res = ecs("compute", "--csv", csv_path, "--inputs", "in_0,in_1",
                  "--outputs", "out_0", "--delta-in", "rel:0.3", "--delta-out", "abs:0",
                  "--k", "120", "--out", run_dir)
        assert res.returncode == 0, res.stderr

        report_path = tmp_path / "report.json"
        req_ok = tmp_path / "ok.txt"
        req_ok.write_text("outliers K=100 t=71 max=12\nisolated m=50 max=0\n")
        res = ecs("detect", "--run", run_dir, "--outliers", "K=100,t=71",
                  "--require", req_ok, "--out", report_path)
        assert res.returncode == 0, res.stderr
        payload = json.loads(report_path.read_text())
        schema = json.loads((Path(__file__).parent.parent / "docs"
                             / "report.schema.json").read_text())
        jsonschema.validate(payload, schema)

        res = ecs("render", "--run", run_dir, "--set", "all", "--k", "100",
                  "--png", tmp_path / "grid.png")
        assert res.returncode == 0, res.stderr
        assert (tmp_path / "grid_EU.png").is_file()

        req_bad = tmp_path / "bad.txt"
        req_bad.write_text("isolated m=50 min=5\n")
        assert ecs("detect", "--run", run_dir, "--require", req_bad).returncode == 1

        assert ecs("compute", "--csv", tmp_path / "missing.csv", "--inputs", "a",
                   "--outputs", "b", "--delta-in", "rel:0.3",
                   "--out", tmp_path / "r2").returncode == 2
