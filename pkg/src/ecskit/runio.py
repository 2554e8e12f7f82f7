"""Run artifact persistence.

A run directory is a JSON header plus flat numpy arrays (see
docs/run_format.md for the byte-level layout). Every file is written
deterministically: identical runs serialize to identical bytes, so artifacts
can be fingerprint-compared and cached.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from . import __version__
from .core import EcsConfig, EcsRun
from .dataset import Dataset
from .metrics import ResolvedDeltas

__all__ = ["save_run", "load_run", "RUN_FORMAT"]

RUN_FORMAT = "ecs-run/1"

_HEADER = "run.json"
_NEIGHBORS = "neighbors.npy"
_CLASSES = "classes.npy"
_INPUTS = "inputs.npy"
_OUTPUTS = "outputs.npy"
_META = "meta.npy"


def save_run(run: EcsRun, dirpath) -> Path:
    """Write ``run`` (including its dataset snapshot) into a directory."""
    dirpath = Path(dirpath)
    dirpath.mkdir(parents=True, exist_ok=True)
    header = {
        "format": RUN_FORMAT,
        "tool": f"ecskit {__version__}",
        "n": run.n,
        "k": run.k,
        "d_in": run.dataset.d_in,
        "d_out": run.dataset.d_out,
        "config": run.config.to_dict(),
        "resolved": {
            "delta_in_abs": run.resolved.delta_in_abs,
            "delta_out_abs": run.resolved.delta_out_abs,
            "max_in_dist": run.resolved.max_in_dist,
            "max_out_dist": run.resolved.max_out_dist,
        },
        "dataset_fingerprint": run.dataset_fingerprint,
        "class_codes": {"EE": 0, "EU": 1, "UE": 2, "UU": 3},
        "files": {
            "neighbors": _NEIGHBORS,
            "classes": _CLASSES,
            "inputs": _INPUTS,
            "outputs": _OUTPUTS,
            "meta": _META if run.dataset.meta is not None else None,
        },
    }
    (dirpath / _HEADER).write_text(json.dumps(header, indent=2, sort_keys=True) + "\n")
    np.save(dirpath / _NEIGHBORS, run.neighbor_ids)
    np.save(dirpath / _CLASSES, run.class_codes)
    np.save(dirpath / _INPUTS, run.dataset.inputs)
    np.save(dirpath / _OUTPUTS, run.dataset.outputs)
    if run.dataset.meta is not None:
        np.save(dirpath / _META, np.asarray(run.dataset.meta))
    return dirpath


def load_run(dirpath) -> EcsRun:
    """Load a run directory back; verifies the dataset fingerprint."""
    dirpath = Path(dirpath)
    header_path = dirpath / _HEADER
    if not header_path.is_file():
        raise FileNotFoundError(f"{dirpath}: not a run directory (missing {_HEADER})")
    header = json.loads(header_path.read_text())
    if header.get("format") != RUN_FORMAT:
        raise ValueError(f"{dirpath}: unsupported run format {header.get('format')!r}")
    config = EcsConfig.from_dict(header["config"])
    res = header["resolved"]
    resolved = ResolvedDeltas(
        delta_in_abs=float(res["delta_in_abs"]),
        delta_out_abs=float(res["delta_out_abs"]),
        max_in_dist=float(res["max_in_dist"]),
        max_out_dist=float(res["max_out_dist"]),
    )
    meta = None
    if header["files"].get("meta"):
        meta = np.load(dirpath / header["files"]["meta"])
    dataset = Dataset(
        inputs=np.load(dirpath / header["files"]["inputs"]),
        outputs=np.load(dirpath / header["files"]["outputs"]),
        meta=meta,
    )
    fingerprint = dataset.fingerprint()
    if fingerprint != header["dataset_fingerprint"]:
        raise ValueError(
            f"{dirpath}: dataset fingerprint mismatch "
            f"(header {header['dataset_fingerprint'][:12]}.., data {fingerprint[:12]}..)"
        )
    neighbor_ids = np.load(dirpath / header["files"]["neighbors"])
    class_codes = np.load(dirpath / header["files"]["classes"])
    if neighbor_ids.shape != (header["n"], header["k"]):
        raise ValueError(f"{dirpath}: neighbor array shape {neighbor_ids.shape} "
                         f"does not match header ({header['n']}, {header['k']})")
    return EcsRun(
        config=config,
        resolved=resolved,
        dataset=dataset,
        neighbor_ids=neighbor_ids,
        class_codes=class_codes,
        dataset_fingerprint=fingerprint,
    )
