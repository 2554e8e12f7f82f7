/** Pure raster and geometry helpers for the histogram canvas and the
 * per-record neighbor ribbons. No DOM access; main.ts blits the returned
 * pixel buffers. */

import { GridPayload, NeighborEntry, SetName, SET_NAMES } from "./types.js";

export interface Raster {
  width: number;
  height: number;
  /** RGBA, row-major, top row first */
  pixels: Uint8ClampedArray;
}

/** Dense cells render darker (white background, black at the densest cell);
 * the grid's gamma-corrected intensity arrives precomputed from the server. */
export function gridToRaster(grid: GridPayload): Raster {
  const width = grid.k;
  const height = grid.k + 1;
  const pixels = new Uint8ClampedArray(width * height * 4);
  for (let col = 0; col < width; col++) {
    const intensity = grid.intensity[col];
    for (let v = 0; v <= grid.k; v++) {
      const row = height - 1 - v; // v points up
      const level = Math.round(255 * (1 - intensity[v]));
      const off = (row * width + col) * 4;
      pixels[off] = pixels[off + 1] = pixels[off + 2] = level;
      pixels[off + 3] = 255;
    }
  }
  return { width, height, pixels };
}

/** Cell rectangle in canvas coordinates (y grows downward). */
export function cellToCanvas(
  k: number, v: number, gridK: number, cw: number, ch: number,
): { x: number; y: number; w: number; h: number } {
  const sx = cw / gridK;
  const sy = ch / (gridK + 1);
  return { x: (k - 1) * sx, y: ch - (v + 1) * sy, w: sx, h: sy };
}

/** Inverse mapping from a canvas point to the (k, v) cell under it. */
export function canvasToCell(
  px: number, py: number, gridK: number, cw: number, ch: number,
): { k: number; v: number } {
  const sx = cw / gridK;
  const sy = ch / (gridK + 1);
  const k = Math.min(gridK, Math.max(1, Math.floor(px / sx) + 1));
  const v = Math.min(gridK, Math.max(0, Math.floor((ch - py) / sy)));
  return { k, v };
}

/** The v = k guide marking the fastest possible growth of any function. */
export function diagonalPath(gridK: number, cw: number, ch: number):
    { x1: number; y1: number; x2: number; y2: number } {
  const a = cellToCanvas(1, 1, gridK, cw, ch);
  const b = cellToCanvas(gridK, gridK, gridK, cw, ch);
  return { x1: a.x, y1: a.y + a.h / 2, x2: b.x + b.w, y2: b.y + b.h / 2 };
}

/** Cumulative class counts over the first `window` ranks; by construction
 * these equal the record's four profile values F(window). */
export function ribbonCounts(
  neighbors: NeighborEntry[], window: number,
): Record<SetName, number> {
  const counts: Record<SetName, number> = { EE: 0, EU: 0, UE: 0, UU: 0 };
  const upto = Math.min(window, neighbors.length);
  for (let r = 0; r < upto; r++) counts[neighbors[r].class] += 1;
  return counts;
}

export interface RibbonSegment {
  cls: SetName;
  start: number;
  length: number;
}

/** Run-length segments of the class sequence, for drawing the ribbon. */
export function ribbonSegments(neighbors: NeighborEntry[]): RibbonSegment[] {
  const segments: RibbonSegment[] = [];
  for (let r = 0; r < neighbors.length; r++) {
    const cls = neighbors[r].class;
    const last = segments[segments.length - 1];
    if (last && last.cls === cls) last.length += 1;
    else segments.push({ cls, start: r, length: 1 });
  }
  return segments;
}

export const SET_COLORS: Record<SetName, string> = {
  EE: "#2b8a3e", // close input, same output: healthy
  EU: "#c92a2a", // close input, different output: suspicious
  UE: "#1971c2",
  UU: "#868e96",
};

/** Decode a base64 grayscale image payload into RGBA pixels. */
export function imageToRaster(base64: string, rows: number, cols: number): Raster {
  const bin = atob(base64); // present in browsers and node >= 16
  const pixels = new Uint8ClampedArray(rows * cols * 4);
  for (let i = 0; i < rows * cols; i++) {
    const value = bin.charCodeAt(i);
    const off = i * 4;
    pixels[off] = pixels[off + 1] = pixels[off + 2] = value;
    pixels[off + 3] = 255;
  }
  return { width: cols, height: rows, pixels };
}

/** Scatter layout: scale data coordinates into a canvas, y flipped. */
export function scatterTransform(
  points: number[][], cw: number, ch: number, pad = 10,
): (p: number[]) => [number, number] {
  let xMin = Infinity, xMax = -Infinity, yMin = Infinity, yMax = -Infinity;
  for (const [x, y] of points) {
    xMin = Math.min(xMin, x); xMax = Math.max(xMax, x);
    yMin = Math.min(yMin, y); yMax = Math.max(yMax, y);
  }
  const sx = (cw - 2 * pad) / (xMax - xMin || 1);
  const sy = (ch - 2 * pad) / (yMax - yMin || 1);
  return ([x, y]) => [pad + (x - xMin) * sx, ch - pad - (y - yMin) * sy];
}

export function labelColor(label: number): string {
  const palette = ["#364fc7", "#e8590c", "#2b8a3e", "#9c36b5", "#e64980",
                   "#0b7285", "#5c940d", "#d9480f", "#5f3dc4", "#862e9c"];
  const idx = Math.abs(Math.round(label)) % palette.length;
  return palette[idx];
}

export { SET_NAMES };
