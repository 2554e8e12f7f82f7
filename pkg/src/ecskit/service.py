"""HTTP facade over one loaded run for the interactive exploration UI.

The service never computes runs; it is started on an artifact produced by
``ecs compute`` and answers read-only queries: run summary, histogram grids,
region selections, detector runs, and per-record inspection payloads. All
state is immutable, so identical requests return identical bodies and
concurrent handling needs no locking.

Display coordinates for the scatter view are consumed, never computed: an
optional id,x,y CSV supplies them; for 2-D inputs the inputs themselves are
used as a fallback.
"""

from __future__ import annotations

import base64
import csv as _csv
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Optional

import numpy as np
from fastapi import FastAPI, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import HTMLResponse, JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .core import EcsRun, PairClass
from .histogram import RegionQuery, build_grid, query_region
from .metrics import PairwiseMatrix
from .detectors import build_rule, detect_groups, detect_isolated, detect_outliers
from .runio import load_run

__all__ = ["SessionState", "create_app", "serve", "load_embedding"]

DEFAULT_GAMMA = 0.4

_PLACEHOLDER_PAGE = """<!doctype html>
<html><head><title>ecs service</title></head>
<body><h1>ecs service</h1>
<p>No UI assets configured (start with --ui). The JSON API lives under /api:</p>
<ul>
<li>GET /api/run</li>
<li>GET /api/grid?set=EE&amp;k=100&amp;gamma=0.4</li>
<li>POST /api/select</li>
<li>GET /api/record/{id}</li>
<li>POST /api/detect</li>
</ul></body></html>
"""


def load_embedding(path, n: int) -> np.ndarray:
    """Read an id,x,y CSV into an (n, 2) coordinate array."""
    coords = np.full((n, 2), np.nan)
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = _csv.reader(fh)
        rows = [r for r in reader if r]
    if rows and not rows[0][0].lstrip("-").isdigit():
        rows = rows[1:]  # header
    for row in rows:
        if len(row) < 3:
            raise ValueError(f"embedding rows need id,x,y, got {row!r}")
        rid = int(row[0])
        if not 0 <= rid < n:
            raise ValueError(f"embedding id {rid} out of range 0..{n - 1}")
        coords[rid] = (float(row[1]), float(row[2]))
    if np.isnan(coords).any():
        missing = int(np.isnan(coords[:, 0]).sum())
        raise ValueError(f"embedding must cover all {n} records ({missing} missing)")
    return coords


@dataclass
class SessionState:
    """One loaded run plus optional display coordinates."""

    run: Optional[EcsRun] = None
    embedding: Optional[np.ndarray] = None
    ui_dir: Optional[Path] = None

    def __post_init__(self) -> None:
        if self.run is not None:
            ds = self.run.dataset
            if self.embedding is None and ds.d_in == 2:
                self.embedding = np.asarray(ds.inputs)
            if self.embedding is not None and len(self.embedding) != ds.n:
                raise ValueError(
                    f"embedding has {len(self.embedding)} rows, dataset has {ds.n}"
                )
            self._din = PairwiseMatrix(self.run.config.in_metric, ds.inputs)
            self._dout = PairwiseMatrix(self.run.config.out_metric, ds.outputs)


class SelectBody(BaseModel):
    set: str
    k_lo: int
    k_hi: int
    v_lo: int
    v_hi: int
    mode: str = "passes_through"


class DetectBody(BaseModel):
    detector: str
    params: dict


def _meta_payload(meta, i: int):
    if meta is None:
        return None
    entry = np.asarray(meta[i])
    if entry.ndim == 2 and entry.dtype == np.uint8:
        return {
            "kind": "image",
            "rows": int(entry.shape[0]),
            "cols": int(entry.shape[1]),
            "base64": base64.b64encode(entry.tobytes()).decode("ascii"),
        }
    if entry.ndim == 0:
        return {"kind": "value", "value": entry.item()}
    return {"kind": "array", "values": entry.tolist()}


def create_app(state: SessionState) -> FastAPI:
    app = FastAPI(title="ecs exploration service")

    @lru_cache(maxsize=16)
    def cached_grid(set_name: str, window: int, gamma: float):
        return build_grid(state.run, PairClass[set_name], window, gamma)

    @app.exception_handler(RequestValidationError)
    async def on_validation_error(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"detail": str(exc.errors())})

    @app.exception_handler(ValueError)
    async def on_value_error(request: Request, exc: ValueError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    def require_run() -> EcsRun:
        if state.run is None:
            raise LookupError("no run loaded")
        return state.run

    @app.exception_handler(LookupError)
    async def on_lookup_error(request: Request, exc: LookupError):
        return JSONResponse(status_code=404, content={"detail": str(exc)})

    @app.get("/api/run")
    def run_summary():
        run = require_run()
        return {
            "n": run.n,
            "d_in": run.dataset.d_in,
            "d_out": run.dataset.d_out,
            "k": run.k,
            "config": run.config.to_dict(),
            "resolved": {
                "delta_in_abs": run.resolved.delta_in_abs,
                "delta_out_abs": run.resolved.delta_out_abs,
                "max_in_dist": run.resolved.max_in_dist,
                "max_out_dist": run.resolved.max_out_dist,
            },
            "dataset_fingerprint": run.dataset_fingerprint,
            "has_embedding": state.embedding is not None,
            "has_meta": run.dataset.meta is not None,
        }

    @app.get("/api/grid")
    def grid(set: str = Query(...), k: Optional[int] = None, gamma: float = DEFAULT_GAMMA):
        run = require_run()
        set_ = PairClass.parse(set)
        window = run.k if k is None else k
        g = cached_grid(set_.name, window, float(gamma))
        return {
            "set": set_.name,
            "k": g.k_max,
            "gamma": g.gamma,
            "n": run.n,
            "max_count": int(g.counts.max()),
            "counts": g.counts.tolist(),
            "intensity": g.intensity.tolist(),
        }

    @app.get("/api/points")
    def points():
        """Bulk display coordinates for the scatter view (one request, not n)."""
        run = require_run()
        if state.embedding is None:
            return {"available": False, "points": [], "outputs": []}
        return {
            "available": True,
            "points": np.asarray(state.embedding).tolist(),
            "outputs": run.dataset.outputs[:, 0].tolist(),
        }

    @app.post("/api/select")
    def select(body: SelectBody):
        run = require_run()
        set_ = PairClass.parse(body.set)
        q = RegionQuery(set_=set_, k_lo=body.k_lo, k_hi=body.k_hi,
                        v_lo=body.v_lo, v_hi=body.v_hi, mode=body.mode)
        grid_ = cached_grid(set_.name, run.k, DEFAULT_GAMMA)
        ids = query_region(run, grid_, q)
        cum = run.cumulative_matrix(set_, q.k_hi)[:, q.k_lo - 1 :]
        return {
            "ids": ids.tolist(),
            "k_lo": q.k_lo,
            "k_hi": q.k_hi,
            "trajectories": {str(int(i)): cum[i].tolist() for i in ids},
        }

    @app.get("/api/record/{rid}")
    def record(rid: int):
        run = require_run()
        ds = run.dataset
        if not 0 <= rid < ds.n:
            raise LookupError(f"record id {rid} out of range 0..{ds.n - 1}")
        nbrs = run.neighbor_ids[rid]
        d_in = state._din.one_vs(rid, nbrs)
        d_out = state._dout.one_vs(rid, nbrs)
        classes = [PairClass(int(c)).name for c in run.class_codes[rid]]
        emb = state.embedding[rid].tolist() if state.embedding is not None else None
        return {
            "id": rid,
            "input": ds.inputs[rid].tolist(),
            "output": ds.outputs[rid].tolist(),
            "meta": _meta_payload(ds.meta, rid),
            "embedding": emb,
            "neighbors": [
                {
                    "id": int(nbrs[r]),
                    "rank": r + 1,
                    "d_in": float(d_in[r]),
                    "d_out": float(d_out[r]),
                    "class": classes[r],
                }
                for r in range(len(nbrs))
            ],
        }

    @app.post("/api/detect")
    def detect(body: DetectBody):
        run = require_run()
        rule = build_rule(body.detector, body.params)
        fn = {"outliers": detect_outliers, "isolated": detect_isolated,
              "groups": detect_groups}[body.detector]
        return fn(run, rule).to_dict()

    if state.ui_dir is not None and Path(state.ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(state.ui_dir), html=True), name="ui")
    else:
        @app.get("/", response_class=HTMLResponse)
        def index():
            return _PLACEHOLDER_PAGE

    return app


def serve(run_dir, embedding_path=None, ui_dir=None, host="127.0.0.1", port=8000) -> None:
    """Load a run artifact and serve the exploration API (blocking)."""
    import uvicorn

    run = load_run(run_dir)
    embedding = load_embedding(embedding_path, run.n) if embedding_path else None
    state = SessionState(run=run, embedding=embedding,
                         ui_dir=Path(ui_dir) if ui_dir else None)
    app = create_app(state)
    uvicorn.run(app, host=host, port=port)
