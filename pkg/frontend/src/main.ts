/** DOM wiring for the explorer: histogram with brushing on the left,
 * inspection (scatter + records) on the right, detector panel at the bottom.
 * All numbers shown come from server responses; this file only routes them.
 */

import { ApiClient, ApiError } from "./api.js";
import {
  addToSelection,
  brushToSelectRequest,
  detectPayload,
  initialView,
  validateGroup,
  validateIsolation,
  validateOutlier,
  ViewState,
} from "./state.js";
import {
  canvasToCell,
  cellToCanvas,
  diagonalPath,
  gridToRaster,
  imageToRaster,
  labelColor,
  ribbonCounts,
  ribbonSegments,
  scatterTransform,
  SET_COLORS,
} from "./render.js";
import { GridPayload, PointsPayload, RunSummary, SET_NAMES, SetName } from "./types.js";

const api = new ApiClient();

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
};

let view: ViewState;
let run: RunSummary;
let grid: GridPayload | null = null;
let points: PointsPayload | null = null;
let dragStart: { k: number; v: number } | null = null;

const histCanvas = $<HTMLCanvasElement>("histogram");
const scatterCanvas = $<HTMLCanvasElement>("scatter");
const statusLine = $<HTMLElement>("status");

function setStatus(text: string, error = false) {
  statusLine.textContent = text;
  statusLine.className = error ? "error" : "";
}

// --- histogram -----------------------------------------------------------------

async function refreshGrid() {
  try {
    grid = await api.grid(view.set, view.k, view.gamma);
    drawHistogram();
    setStatus(`${view.set} histogram, window ${grid.k}, gamma ${grid.gamma}`);
  } catch (err) {
    if ((err as Error).name === "AbortError") return;
    grid = null;
    drawHistogram();
    setStatus(`histogram unavailable: ${(err as Error).message}`, true);
  }
}

function drawHistogram() {
  const ctx = histCanvas.getContext("2d")!;
  ctx.fillStyle = "#f8f9fa";
  ctx.fillRect(0, 0, histCanvas.width, histCanvas.height);
  if (!grid) {
    ctx.fillStyle = "#868e96";
    ctx.fillText("no grid loaded", 20, 20);
    return;
  }
  const raster = gridToRaster(grid);
  const cell = new OffscreenCanvas(raster.width, raster.height);
  const img = new ImageData(raster.width, raster.height);
  img.data.set(raster.pixels);
  cell.getContext("2d")!.putImageData(img, 0, 0);
  ctx.imageSmoothingEnabled = false;
  ctx.drawImage(cell, 0, 0, histCanvas.width, histCanvas.height);

  // main diagonal: the fastest any function can grow
  const d = diagonalPath(grid.k, histCanvas.width, histCanvas.height);
  ctx.strokeStyle = "#adb5bd";
  ctx.setLineDash([4, 4]);
  ctx.beginPath();
  ctx.moveTo(d.x1, d.y1);
  ctx.lineTo(d.x2, d.y2);
  ctx.stroke();
  ctx.setLineDash([]);

  if (view.brush) {
    const b = view.brush;
    const lo = cellToCanvas(b.kLo, b.vHi, grid.k, histCanvas.width, histCanvas.height);
    const hi = cellToCanvas(b.kHi, b.vLo, grid.k, histCanvas.width, histCanvas.height);
    ctx.strokeStyle = "#e03131";
    ctx.lineWidth = 1.5;
    ctx.strokeRect(lo.x, lo.y, hi.x + hi.w - lo.x, hi.y + hi.h - lo.y);
    ctx.lineWidth = 1;
  }
}

histCanvas.addEventListener("pointerdown", (ev) => {
  if (!grid) return;
  const rect = histCanvas.getBoundingClientRect();
  dragStart = canvasToCell(ev.clientX - rect.left, ev.clientY - rect.top,
                           grid.k, histCanvas.width, histCanvas.height);
});

histCanvas.addEventListener("pointermove", (ev) => {
  if (!grid || !dragStart) return;
  const rect = histCanvas.getBoundingClientRect();
  const cur = canvasToCell(ev.clientX - rect.left, ev.clientY - rect.top,
                           grid.k, histCanvas.width, histCanvas.height);
  view.brush = { kLo: dragStart.k, kHi: cur.k, vLo: dragStart.v, vHi: cur.v };
  drawHistogram();
});

histCanvas.addEventListener("pointerup", async () => {
  dragStart = null;
  const req = brushToSelectRequest(view);
  if (!req) return;
  try {
    const resp = await api.select(req);
    view.selection = addToSelection(view.selection, resp.ids);
    setStatus(`brush selected ${resp.ids.length} record(s); selection now ` +
              `${view.selection.length}`);
    await refreshInspection();
  } catch (err) {
    if ((err as Error).name !== "AbortError")
      setStatus(`selection failed: ${(err as Error).message}`, true);
  }
});

// --- inspection ------------------------------------------------------------------

const MAX_DETAIL = 9;

async function refreshInspection() {
  drawScatter();
  $<HTMLElement>("selection-count").textContent = String(view.selection.length);
  const host = $<HTMLElement>("records");
  host.innerHTML = "";
  if (view.selection.length === 0) {
    host.innerHTML = "<p class='hint'>nothing selected: brush the histogram " +
      "or apply a detector</p>";
    return;
  }
  const shown = view.selection.slice(0, MAX_DETAIL);
  for (const id of shown) {
    try {
      host.appendChild(recordCard(await api.record(id)));
    } catch (err) {
      if ((err as ApiError).name !== "AbortError") {
        const p = document.createElement("p");
        p.className = "error";
        p.textContent = `record ${id}: ${(err as Error).message}`;
        host.appendChild(p);
      }
    }
  }
  if (view.selection.length > shown.length) {
    const p = document.createElement("p");
    p.className = "hint";
    p.textContent = `... and ${view.selection.length - shown.length} more`;
    host.appendChild(p);
  }
}

function recordCard(rec: import("./types.js").RecordPayload): HTMLElement {
  const card = document.createElement("div");
  card.className = "record";
  const title = document.createElement("h4");
  title.textContent = `#${rec.id}  output ${rec.output.map((v) => +v.toFixed(4)).join(", ")}`;
  card.appendChild(title);

  if (rec.meta && rec.meta.kind === "image") {
    const image = imageToRaster(rec.meta.base64, rec.meta.rows, rec.meta.cols);
    const canvas = document.createElement("canvas");
    canvas.width = image.width;
    canvas.height = image.height;
    canvas.className = "thumb";
    const img = new ImageData(image.width, image.height);
    img.data.set(image.pixels);
    canvas.getContext("2d")!.putImageData(img, 0, 0);
    card.appendChild(canvas);
  } else {
    const p = document.createElement("p");
    p.className = "coords";
    p.textContent = `input (${rec.input.map((v) => +v.toFixed(3)).join(", ")})`;
    card.appendChild(p);
  }

  // neighbor class ribbon over the viewed window, with its counts
  const window_ = Math.min(view.k, rec.neighbors.length);
  const ribbon = document.createElement("canvas");
  ribbon.width = 300;
  ribbon.height = 14;
  ribbon.className = "ribbon";
  const ctx = ribbon.getContext("2d")!;
  const px = ribbon.width / window_;
  for (const seg of ribbonSegments(rec.neighbors.slice(0, window_))) {
    ctx.fillStyle = SET_COLORS[seg.cls];
    ctx.fillRect(seg.start * px, 0, seg.length * px, ribbon.height);
  }
  card.appendChild(ribbon);

  const counts = ribbonCounts(rec.neighbors, window_);
  const line = document.createElement("p");
  line.className = "ribbon-counts";
  line.textContent = SET_NAMES
    .map((s) => `${s} ${counts[s]}`)
    .join("  ") + `  (first ${window_} neighbors)`;
  card.appendChild(line);
  return card;
}

function drawScatter() {
  const ctx = scatterCanvas.getContext("2d")!;
  ctx.fillStyle = "#ffffff";
  ctx.fillRect(0, 0, scatterCanvas.width, scatterCanvas.height);
  if (!points || !points.available) {
    ctx.fillStyle = "#868e96";
    ctx.fillText("no 2-D coordinates for this run", 16, 20);
    return;
  }
  const place = scatterTransform(points.points, scatterCanvas.width, scatterCanvas.height);
  const selected = new Set(view.selection);
  points.points.forEach((p, id) => {
    const [x, y] = place(p);
    ctx.fillStyle = labelColor(points!.outputs[id]);
    ctx.globalAlpha = selected.size && !selected.has(id) ? 0.25 : 0.9;
    ctx.beginPath();
    ctx.arc(x, y, selected.has(id) ? 4 : 2, 0, 2 * Math.PI);
    ctx.fill();
    if (selected.has(id)) {
      ctx.globalAlpha = 1;
      ctx.strokeStyle = "#000";
      ctx.stroke();
    }
  });
  ctx.globalAlpha = 1;
}

// --- detector panel ---------------------------------------------------------------

interface PanelSpec {
  name: "outliers" | "isolated" | "groups";
  inputs: [string, keyof ViewState["detectors"]][];
  validate: () => string | null;
}

const PANELS: PanelSpec[] = [
  {
    name: "outliers",
    inputs: [["K", "outlierK"], ["t", "outlierT"]],
    validate: () => validateOutlier(view.detectors.outlierK, view.detectors.outlierT, run.k),
  },
  {
    name: "isolated",
    inputs: [["m", "isolationM"]],
    validate: () => validateIsolation(view.detectors.isolationM, run.k),
  },
  {
    name: "groups",
    inputs: [["g", "groupG"], ["tol", "groupTol"]],
    validate: () => validateGroup(view.detectors.groupG, view.detectors.groupTol, run.k),
  },
];

const panelFindings = new Map<string, number[]>();

async function refreshPanel(spec: PanelSpec) {
  const errEl = $<HTMLElement>(`${spec.name}-error`);
  const countEl = $<HTMLElement>(`${spec.name}-count`);
  const problem = spec.validate();
  if (problem) {
    errEl.textContent = problem;
    countEl.textContent = "-";
    panelFindings.delete(spec.name);
    return; // invalid: no request leaves the client
  }
  errEl.textContent = "";
  try {
    const report = await api.detect(detectPayload(spec.name, view.detectors));
    const extra = spec.name === "isolated"
      ? `  (UE ${report.counts.UE}, UU ${report.counts.UU})`
      : "";
    countEl.textContent = `${report.counts.findings}${extra}`;
    panelFindings.set(spec.name, report.findings.map((f) => f.id));
  } catch (err) {
    if ((err as Error).name === "AbortError") return;
    errEl.textContent = (err as Error).message;
    countEl.textContent = "-";
    panelFindings.delete(spec.name);
  }
}

function buildPanels() {
  const host = $<HTMLElement>("panels");
  for (const spec of PANELS) {
    const box = document.createElement("fieldset");
    const legend = document.createElement("legend");
    legend.textContent = spec.name;
    box.appendChild(legend);
    for (const [label, key] of spec.inputs) {
      const wrap = document.createElement("label");
      wrap.textContent = `${label} `;
      const input = document.createElement("input");
      input.type = "number";
      input.value = String(view.detectors[key]);
      input.addEventListener("input", () => {
        view.detectors[key] = Number(input.value);
        void refreshPanel(spec);
      });
      wrap.appendChild(input);
      box.appendChild(wrap);
    }
    const count = document.createElement("span");
    count.id = `${spec.name}-count`;
    count.className = "count";
    count.textContent = "-";
    box.appendChild(count);
    const apply = document.createElement("button");
    apply.textContent = "apply as selection";
    apply.addEventListener("click", async () => {
      const ids = panelFindings.get(spec.name);
      if (ids) {
        view.selection = addToSelection(view.selection, ids);
        await refreshInspection();
      }
    });
    box.appendChild(apply);
    const err = document.createElement("span");
    err.id = `${spec.name}-error`;
    err.className = "error";
    box.appendChild(err);
    host.appendChild(box);
  }
}

// --- top controls -----------------------------------------------------------------

function buildControls() {
  const setHost = $<HTMLElement>("set-buttons");
  for (const s of SET_NAMES) {
    const b = document.createElement("button");
    b.textContent = s;
    b.className = s === view.set ? "active" : "";
    b.addEventListener("click", () => {
      view.set = s as SetName;
      view.brush = null;
      setHost.querySelectorAll("button").forEach((x) =>
        x.className = x.textContent === s ? "active" : "");
      void refreshGrid();
    });
    setHost.appendChild(b);
  }
  const kInput = $<HTMLInputElement>("k-input");
  kInput.value = String(view.k);
  kInput.max = String(run.k);
  kInput.addEventListener("change", () => {
    const k = Number(kInput.value);
    if (Number.isInteger(k) && k >= 1 && k <= run.k) {
      view.k = k;
      view.brush = null;
      void refreshGrid();
    }
  });
  const gammaInput = $<HTMLInputElement>("gamma-input");
  gammaInput.value = String(view.gamma);
  gammaInput.addEventListener("input", () => {
    view.gamma = Number(gammaInput.value);
    $<HTMLElement>("gamma-value").textContent = gammaInput.value;
    void refreshGrid();
  });
  const modeInput = $<HTMLInputElement>("mode-ends");
  modeInput.checked = view.mode === "ends_in";
  modeInput.addEventListener("change", () => {
    view.mode = modeInput.checked ? "ends_in" : "passes_through";
  });
  $<HTMLButtonElement>("clear-selection").addEventListener("click", async () => {
    view.selection = [];
    view.brush = null;
    drawHistogram();
    await refreshInspection();
  });
}

// --- boot -------------------------------------------------------------------------

async function boot() {
  try {
    run = await api.run();
  } catch (err) {
    setStatus(`no run loaded: ${(err as Error).message}`, true);
    return;
  }
  view = initialView(run.k);
  $<HTMLElement>("run-info").textContent =
    `${run.n} records, ${run.d_in} input dims, window ${run.k}, ` +
    `delta_in ${run.resolved.delta_in_abs.toPrecision(4)}, ` +
    `delta_out ${run.resolved.delta_out_abs.toPrecision(4)}`;
  buildControls();
  buildPanels();
  try {
    points = await api.points();
  } catch {
    points = null;
  }
  await refreshGrid();
  await refreshInspection();
  for (const spec of PANELS) void refreshPanel(spec);
}

void boot();
