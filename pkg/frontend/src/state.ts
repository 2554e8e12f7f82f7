/** View state and the pure logic behind brushing, selection, and the
 * detector panel. Everything here is side-effect free so it can be tested
 * without a DOM; main.ts only wires these functions to events.
 *
 * The central contract: a brushed rectangle entered at its right edge and a
 * detector rule are the same predicate, so both produce identical selection
 * requests and therefore identical server answers (the client never
 * recomputes memberships itself).
 */

import { SelectMode, SelectRequest, SetName } from "./types.js";

export interface BrushRegion {
  kLo: number;
  kHi: number;
  vLo: number;
  vHi: number;
}

export interface DetectorParams {
  outlierK: number;
  outlierT: number;
  isolationM: number;
  groupG: number;
  groupTol: number;
}

export interface ViewState {
  set: SetName;
  k: number;
  gamma: number;
  mode: SelectMode;
  brush: BrushRegion | null;
  /** additive across brushes/applies; cleared explicitly */
  selection: number[];
  detectors: DetectorParams;
}

export function initialView(runK: number): ViewState {
  const k = Math.min(100, runK);
  return {
    set: "EE",
    k,
    gamma: 0.4,
    mode: "ends_in",
    brush: null,
    selection: [],
    detectors: {
      outlierK: k,
      outlierT: Math.ceil(k * 0.71),
      isolationM: Math.min(50, runK),
      groupG: k,
      groupTol: 5,
    },
  };
}

export function clampBrush(b: BrushRegion, gridK: number): BrushRegion {
  const clamp = (x: number, lo: number, hi: number) =>
    Math.min(hi, Math.max(lo, Math.round(x)));
  const kLo = clamp(Math.min(b.kLo, b.kHi), 1, gridK);
  const kHi = clamp(Math.max(b.kLo, b.kHi), 1, gridK);
  const vLo = clamp(Math.min(b.vLo, b.vHi), 0, gridK);
  const vHi = clamp(Math.max(b.vLo, b.vHi), 0, gridK);
  return { kLo, kHi, vLo, vHi };
}

export function brushToSelectRequest(view: ViewState): SelectRequest | null {
  if (!view.brush) return null;
  const b = clampBrush(view.brush, view.k);
  return {
    set: view.set,
    k_lo: b.kLo,
    k_hi: b.kHi,
    v_lo: b.vLo,
    v_hi: b.vHi,
    mode: view.mode,
  };
}

/** The outlier rule "at least t of the first K disagree" as a region. */
export function outlierRuleToRequest(K: number, t: number): SelectRequest {
  return { set: "EU", k_lo: 1, k_hi: K, v_lo: t, v_hi: K, mode: "ends_in" };
}

/** The group rule "F_EE(g) >= g - tol" as a region. */
export function groupRuleToRequest(g: number, tol: number): SelectRequest {
  return { set: "EE", k_lo: 1, k_hi: g, v_lo: g - tol, v_hi: g, mode: "ends_in" };
}

/** Isolation "any UE (or UU) rank within m" as a region. */
export function isolationRuleToRequest(m: number, set: "UE" | "UU"): SelectRequest {
  return { set, k_lo: 1, k_hi: m, v_lo: 1, v_hi: m, mode: "ends_in" };
}

export function addToSelection(selection: number[], ids: number[]): number[] {
  const merged = new Set(selection);
  for (const id of ids) merged.add(id);
  return [...merged].sort((a, b) => a - b);
}

/** Inline validation mirroring the server's rule constraints; a non-null
 * message means the request must not be sent. */
export function validateOutlier(K: number, t: number, runK: number): string | null {
  if (!Number.isInteger(K) || K < 1) return "window K must be a positive integer";
  if (K > runK) return `window K exceeds the stored profile length ${runK}`;
  if (!Number.isInteger(t) || t < 1) return "threshold t must be a positive integer";
  if (t > K) return "threshold t cannot exceed the window K";
  return null;
}

export function validateIsolation(m: number, runK: number): string | null {
  if (!Number.isInteger(m) || m < 1) return "window m must be a positive integer";
  if (m > runK) return `window m exceeds the stored profile length ${runK}`;
  return null;
}

export function validateGroup(g: number, tol: number, runK: number): string | null {
  if (!Number.isInteger(g) || g < 1) return "group size must be a positive integer";
  if (g > runK) return `group size exceeds the stored profile length ${runK}`;
  if (!Number.isInteger(tol) || tol < 0) return "tolerance must be >= 0";
  if (tol >= g) return "tolerance must be smaller than the group size";
  return null;
}

export function detectPayload(
  detector: "outliers" | "isolated" | "groups",
  p: DetectorParams,
): { detector: string; params: Record<string, number> } {
  switch (detector) {
    case "outliers":
      return { detector, params: { K: p.outlierK, t: p.outlierT } };
    case "isolated":
      return { detector, params: { m: p.isolationM } };
    case "groups":
      return { detector, params: { g: p.groupG, tol: p.groupTol } };
  }
}
