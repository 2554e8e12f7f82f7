"""Batch command-line interface.

Subcommands: ``generate`` (reference cloud CSV), ``compute`` (dataset ->
run artifact), ``detect`` (run artifact -> JSON findings, optionally gated
by a requirements file), ``render`` (run artifact -> histogram PNG/CSV),
``serve`` (run artifact -> exploration HTTP service).

Exit codes: 0 success, 1 requirements gate failed, 2 error (I/O, parsing,
validation). Human-readable messages go to stderr, machine output (JSON) to
stdout or the file named by --out.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .core import EcsConfig, PairClass, compute_run
from .dataset import (
    REFERENCE_CLOUD_SPEC,
    PointCloudSpec,
    generate_point_cloud,
    load_csv,
    load_mnist_idx,
    save_csv,
)
from .detectors import (
    build_rule,
    check_requirements,
    detect_groups,
    detect_isolated,
    detect_outliers,
    normalize_rule_params,
    parse_requirements,
    run_requirement_detectors,
)
from .histogram import build_grid, export_grid
from .metrics import DeltaSpec, MetricKind
from .runio import load_run, save_run

__all__ = ["main", "RunManifest"]


@dataclass
class RunManifest:
    """Everything one compute invocation needs, resolved from flags."""

    dataset_kind: str  # "csv" | "mnist"
    dataset_paths: dict
    config: EcsConfig = field(default_factory=EcsConfig)
    out_dir: Path = Path("run")
    threads: int = 1
    csv_inputs: str = ""
    csv_outputs: str = ""
    csv_has_header: bool = True

    def load_dataset(self):
        if self.dataset_kind == "csv":
            return load_csv(
                self.dataset_paths["csv"],
                self.csv_inputs,
                self.csv_outputs,
                has_header=self.csv_has_header,
            )
        return load_mnist_idx(self.dataset_paths["images"], self.dataset_paths["labels"])


def _parse_rule_flag(detector: str, text: str) -> dict:
    """Parse 'K=200,t=181' style rule flags into canonical parameters."""
    params = {}
    for item in text.split(","):
        name, _, value = item.partition("=")
        if not value:
            raise ValueError(f"--{detector}: expected name=value pairs, got {text!r}")
        params[name.strip()] = int(value)
    return normalize_rule_params(detector, params)


def _emit_json(payload: dict, out_path) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True)
    if out_path:
        Path(out_path).write_text(text + "\n")
    else:
        print(text)


def cmd_generate(args) -> int:
    spec = REFERENCE_CLOUD_SPEC if args.seed is None else PointCloudSpec(
        clusters=REFERENCE_CLOUD_SPEC.clusters, seed=args.seed
    )
    ds = generate_point_cloud(spec)
    save_csv(ds, args.out)
    print(f"wrote {ds.n} points ({ds.d_in} inputs, {ds.d_out} outputs) to {args.out}",
          file=sys.stderr)
    return 0


def cmd_compute(args) -> int:
    if args.csv and (args.mnist_images or args.mnist_labels):
        raise ValueError("choose either --csv or --mnist-images/--mnist-labels")
    if args.csv:
        if not (args.inputs and args.outputs):
            raise ValueError("--csv needs --inputs and --outputs column selectors")
        manifest = RunManifest(
            dataset_kind="csv",
            dataset_paths={"csv": args.csv},
            csv_inputs=args.inputs,
            csv_outputs=args.outputs,
            csv_has_header=not args.no_header,
        )
    elif args.mnist_images and args.mnist_labels:
        manifest = RunManifest(
            dataset_kind="mnist",
            dataset_paths={"images": args.mnist_images, "labels": args.mnist_labels},
        )
    else:
        raise ValueError("no dataset given: use --csv or --mnist-images + --mnist-labels")
    manifest.config = EcsConfig(
        in_metric=MetricKind.parse(args.in_metric),
        out_metric=MetricKind.parse(args.out_metric),
        delta_in=DeltaSpec.parse(args.delta_in),
        delta_out=DeltaSpec.parse(args.delta_out),
        k_max=args.k,
    )
    manifest.out_dir = Path(args.out)
    manifest.threads = args.threads

    ds = manifest.load_dataset()
    print(f"computing profiles for n={ds.n} (d_in={ds.d_in}, d_out={ds.d_out}, "
          f"k={min(manifest.config.k_max, ds.n - 1)}, threads={manifest.threads})",
          file=sys.stderr)
    run = compute_run(ds, manifest.config, workers=manifest.threads)
    save_run(run, manifest.out_dir)
    print(f"run written to {manifest.out_dir} "
          f"(delta_in={run.resolved.delta_in_abs:g}, delta_out={run.resolved.delta_out_abs:g}, "
          f"fingerprint {run.dataset_fingerprint[:12]})", file=sys.stderr)
    return 0


def cmd_detect(args) -> int:
    run = load_run(args.run)
    reports = []
    for detector, flags in (("outliers", args.outliers), ("isolated", args.isolated),
                            ("groups", args.groups)):
        for text in flags or []:
            params = _parse_rule_flag(detector, text)
            rule = build_rule(detector, params)
            fn = {"outliers": detect_outliers, "isolated": detect_isolated,
                  "groups": detect_groups}[detector]
            reports.append(fn(run, rule))

    verdict = None
    if args.require:
        requirements = parse_requirements(Path(args.require).read_text())
        have = {(r.detector, tuple(sorted(r.rule.items()))) for r in reports}
        missing = [q for q in requirements
                   if (q.detector, tuple(sorted(q.params.items()))) not in have]
        reports.extend(run_requirement_detectors(run, missing))
        verdict = check_requirements(reports, requirements)
        for check in verdict.checks:
            state = "ok" if check.ok else "VIOLATED"
            print(f"requirement {check.requirement.describe()}: observed "
                  f"{check.observed} ({state})", file=sys.stderr)

    if not reports:
        raise ValueError("nothing to do: pass --outliers/--isolated/--groups or --require")

    payload = {
        "run": {
            "n": run.n,
            "k": run.k,
            "config": run.config.to_dict(),
            "resolved": {
                "delta_in_abs": run.resolved.delta_in_abs,
                "delta_out_abs": run.resolved.delta_out_abs,
                "max_in_dist": run.resolved.max_in_dist,
                "max_out_dist": run.resolved.max_out_dist,
            },
            "dataset_fingerprint": run.dataset_fingerprint,
            "tool": f"ecskit {__version__}",
        },
        "reports": [r.to_dict() for r in reports],
        "requirements": verdict.to_dict() if verdict else None,
    }
    _emit_json(payload, args.out)
    if verdict is not None and not verdict.passed:
        print("requirements gate FAILED", file=sys.stderr)
        return 1
    return 0


def cmd_render(args) -> int:
    run = load_run(args.run)
    sets = list(PairClass) if args.set == "all" else [PairClass.parse(args.set)]
    if not args.png and not args.csv:
        raise ValueError("nothing to render: pass --png and/or --csv")
    window = args.k if args.k else run.k

    def suffixed(path, set_):
        path = Path(path)
        if len(sets) == 1:
            return path
        return path.with_name(f"{path.stem}_{set_.name}{path.suffix}")

    for set_ in sets:
        grid = build_grid(run, set_, window, gamma=args.gamma)
        if args.png:
            export_grid(grid, "png", suffixed(args.png, set_))
            print(f"wrote {suffixed(args.png, set_)}", file=sys.stderr)
        if args.csv:
            export_grid(grid, "csv", suffixed(args.csv, set_))
            print(f"wrote {suffixed(args.csv, set_)}", file=sys.stderr)
    return 0


def cmd_serve(args) -> int:
    from .service import serve  # deferred: fastapi/uvicorn only needed here

    serve(args.run, embedding_path=args.embedding, ui_dir=args.ui,
          host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ecs",
        description="Pairwise-distance data quality auditing",
    )
    parser.add_argument("--version", action="version", version=f"ecs (ecskit {__version__})")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write the reference point cloud as CSV")
    p.add_argument("--out", required=True, help="CSV output path")
    p.add_argument("--seed", type=int, default=None, help="override the default seed")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("compute", help="compute a run artifact from a dataset")
    p.add_argument("--csv", help="CSV dataset path")
    p.add_argument("--inputs", help="input column selector (names or 0-based indices)")
    p.add_argument("--outputs", help="output column selector")
    p.add_argument("--no-header", action="store_true", help="CSV has no header row")
    p.add_argument("--mnist-images", help="IDX image file (optionally .gz)")
    p.add_argument("--mnist-labels", help="IDX label file (optionally .gz)")
    p.add_argument("--in-metric", default="euclidean",
                   choices=[m.value for m in MetricKind], help="input-space metric")
    p.add_argument("--out-metric", default="euclidean",
                   choices=[m.value for m in MetricKind], help="output-space metric")
    p.add_argument("--delta-in", required=True, help="input threshold, rel:X or abs:X")
    p.add_argument("--delta-out", default="abs:0", help="output threshold, rel:X or abs:X")
    p.add_argument("--k", type=int, default=500, help="neighbor window (clamped to n-1)")
    p.add_argument("--threads", type=int, default=1,
                   help="worker threads; never changes results")
    p.add_argument("--out", required=True, help="run output directory")
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("detect", help="run detectors against a run artifact")
    p.add_argument("--run", required=True, help="run directory from 'ecs compute'")
    p.add_argument("--outliers", action="append", metavar="K=..,t=..",
                   help="outlier rule (window K, threshold t)")
    p.add_argument("--isolated", action="append", metavar="m=..",
                   help="isolation rule (window m)")
    p.add_argument("--groups", action="append", metavar="g=..,tol=..",
                   help="local-group rule (size g, tolerance tol)")
    p.add_argument("--require", help="requirements file; violations exit 1")
    p.add_argument("--out", help="write the JSON report here instead of stdout")
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("render", help="export histogram grids from a run artifact")
    p.add_argument("--run", required=True)
    p.add_argument("--set", required=True, choices=["EE", "EU", "UE", "UU", "all"])
    p.add_argument("--k", type=int, default=None, help="window (default: full stored window)")
    p.add_argument("--gamma", type=float, default=0.4)
    p.add_argument("--png", help="PNG output path")
    p.add_argument("--csv", help="CSV output path")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("serve", help="serve the exploration API/UI for a run artifact")
    p.add_argument("--run", required=True)
    p.add_argument("--embedding", help="optional id,x,y CSV with 2-D display coordinates")
    p.add_argument("--ui", help="directory of static UI assets to serve at /")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed usage; keep its code
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"ecs: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
