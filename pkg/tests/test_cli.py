import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

import ecskit as ek

SCHEMA_PATH = Path(__file__).parent.parent / "docs" / "report.schema.json"


def ecs(*args, cwd=None):
    return subprocess.run(
        [sys.executable, "-m", "ecskit", *map(str, args)],
        capture_output=True, text=True, cwd=cwd,
    )


@pytest.fixture(scope="module")
def small_csv(tmp_path_factory):
    """A 200-point two-cluster csv to keep subprocess runs quick."""
    d = tmp_path_factory.mktemp("data")
    spec = ek.PointCloudSpec(
        clusters=(
            ek.ClusterSpec(center=(0.0, 0.0), stddev=0.5, count=120, label=0),
            ek.ClusterSpec(center=(4.0, 4.0), stddev=0.5, count=80, label=1),
        ),
        seed=5,
    )
    path = d / "cloud.csv"
    ek.save_csv(ek.generate_point_cloud(spec), path)
    return path


@pytest.fixture(scope="module")
def run_dir(small_csv, tmp_path_factory):
    out = tmp_path_factory.mktemp("runs") / "run"
    res = ecs("compute", "--csv", small_csv, "--inputs", "in_0,in_1", "--outputs", "out_0",
              "--delta-in", "rel:0.3", "--delta-out", "abs:0", "--k", "100", "--out", out)
    assert res.returncode == 0, res.stderr
    return out


def test_generate_writes_reference_cloud(tmp_path):
    out = tmp_path / "cloud.csv"
    res = ecs("generate", "--out", out)
    assert res.returncode == 0, res.stderr
    ds = ek.load_csv(out, "in_0,in_1", "out_0")
    assert ds.n == 1000


def test_compute_produces_run_artifact(run_dir):
    assert (run_dir / "run.json").is_file()
    header = json.loads((run_dir / "run.json").read_text())
    assert header["format"] == "ecs-run/1"
    assert header["n"] == 200
    run = ek.load_run(run_dir)
    assert run.k == 100


def test_compute_idempotent(small_csv, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        res = ecs("compute", "--csv", small_csv, "--inputs", "in_0,in_1",
                  "--outputs", "out_0", "--delta-in", "rel:0.3", "--k", "50", "--out", out)
        assert res.returncode == 0, res.stderr
    for name in ("run.json", "neighbors.npy", "classes.npy", "inputs.npy", "outputs.npy"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_compute_missing_file_exits_2_no_artifact(tmp_path):
    out = tmp_path / "run"
    res = ecs("compute", "--csv", tmp_path / "absent.csv", "--inputs", "a", "--outputs", "b",
              "--delta-in", "rel:0.3", "--out", out)
    assert res.returncode == 2
    assert "error" in res.stderr.lower()
    assert not out.exists()


def test_compute_bad_delta_exits_2(small_csv, tmp_path):
    res = ecs("compute", "--csv", small_csv, "--inputs", "in_0,in_1", "--outputs", "out_0",
              "--delta-in", "0.3", "--out", tmp_path / "r")
    assert res.returncode == 2
    assert "rel:" in res.stderr


def test_detect_json_validates_against_schema(run_dir, tmp_path):
    import jsonschema

    out = tmp_path / "report.json"
    res = ecs("detect", "--run", run_dir, "--outliers", "K=100,t=71",
              "--isolated", "m=50", "--groups", "g=50,tol=5", "--out", out)
    assert res.returncode == 0, res.stderr
    payload = json.loads(out.read_text())
    schema = json.loads(SCHEMA_PATH.read_text())
    jsonschema.validate(payload, schema)
    assert len(payload["reports"]) == 3
    detectors = [r["detector"] for r in payload["reports"]]
    assert detectors == ["outliers", "isolated", "groups"]
    assert payload["requirements"] is None
    # resolved deltas are echoed for auditability
    assert payload["run"]["resolved"]["delta_in_abs"] > 0


def test_detect_stdout_when_no_out_file(run_dir):
    res = ecs("detect", "--run", run_dir, "--isolated", "m=10")
    assert res.returncode == 0, res.stderr
    payload = json.loads(res.stdout)
    assert payload["reports"][0]["detector"] == "isolated"


def test_detect_requirements_pass_and_fail(run_dir, tmp_path):
    good = tmp_path / "good.txt"
    good.write_text("outliers K=100 t=71 max=5\nisolated m=50 max=0\ngroups g=50 tol=5 min=100\n")
    res = ecs("detect", "--run", run_dir, "--require", good)
    assert res.returncode == 0, res.stderr

    bad = tmp_path / "bad.txt"
    bad.write_text("groups g=50 tol=5 min=100000\n")
    res = ecs("detect", "--run", run_dir, "--require", bad)
    assert res.returncode == 1
    assert "VIOLATED" in res.stderr
    payload = json.loads(res.stdout)
    assert payload["requirements"]["passed"] is False


def test_detect_without_rules_exits_2(run_dir):
    res = ecs("detect", "--run", run_dir)
    assert res.returncode == 2


def test_detect_missing_run_exits_2(tmp_path):
    res = ecs("detect", "--run", tmp_path / "nope", "--isolated", "m=10")
    assert res.returncode == 2


def test_render_png_and_csv(run_dir, tmp_path):
    png = tmp_path / "eu.png"
    res = ecs("render", "--run", run_dir, "--set", "EU", "--k", "100",
              "--gamma", "0.4", "--png", png)
    assert res.returncode == 0, res.stderr
    from PIL import Image

    img = Image.open(png)
    assert img.size == (100, 101)
    assert img.mode == "L"


def test_render_all_sets_suffixed(run_dir, tmp_path):
    res = ecs("render", "--run", run_dir, "--set", "all", "--k", "20",
              "--png", tmp_path / "g.png", "--csv", tmp_path / "g.csv")
    assert res.returncode == 0, res.stderr
    for s in ("EE", "EU", "UE", "UU"):
        assert (tmp_path / f"g_{s}.png").is_file()
        assert (tmp_path / f"g_{s}.csv").is_file()


def test_render_invalid_set_exits_2_listing_names(run_dir, tmp_path):
    res = ecs("render", "--run", run_dir, "--set", "XX", "--png", tmp_path / "x.png")
    assert res.returncode == 2
    assert "EE" in res.stderr and "UU" in res.stderr


def test_render_without_outputs_exits_2(run_dir):
    res = ecs("render", "--run", run_dir, "--set", "EU")
    assert res.returncode == 2


def test_full_pipeline_exit_codes(small_csv, tmp_path):
    run = tmp_path / "run"
    assert ecs("compute", "--csv", small_csv, "--inputs", "in_0,in_1", "--outputs", "out_0",
               "--delta-in", "rel:0.3", "--k", "60", "--out", run).returncode == 0
    req = tmp_path / "req.txt"
    req.write_text("outliers K=60 t=43 max=0\n")
    assert ecs("detect", "--run", run, "--require", req).returncode == 0
    assert ecs("render", "--run", run, "--set", "EE", "--k", "60",
               "--png", tmp_path / "ee.png").returncode == 0
