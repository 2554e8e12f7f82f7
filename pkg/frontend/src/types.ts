/** Payload shapes of the /api endpoints. The client renders these verbatim;
 * it never derives audit numbers of its own. */

export type SetName = "EE" | "EU" | "UE" | "UU";

export const SET_NAMES: SetName[] = ["EE", "EU", "UE", "UU"];

export interface DeltaSpec {
  mode: "absolute" | "relative";
  value: number;
}

export interface RunSummary {
  n: number;
  d_in: number;
  d_out: number;
  k: number;
  config: {
    in_metric: string;
    out_metric: string;
    delta_in: DeltaSpec;
    delta_out: DeltaSpec;
    k_max: number;
  };
  resolved: {
    delta_in_abs: number;
    delta_out_abs: number;
    max_in_dist: number;
    max_out_dist: number;
  };
  dataset_fingerprint: string;
  has_embedding: boolean;
  has_meta: boolean;
}

export interface GridPayload {
  set: SetName;
  k: number;
  gamma: number;
  n: number;
  max_count: number;
  /** counts[k-1][v], columns sum to n */
  counts: number[][];
  intensity: number[][];
}

export type SelectMode = "passes_through" | "ends_in";

export interface SelectRequest {
  set: SetName;
  k_lo: number;
  k_hi: number;
  v_lo: number;
  v_hi: number;
  mode: SelectMode;
}

export interface SelectResponse {
  ids: number[];
  k_lo: number;
  k_hi: number;
  /** per selected id: its cumulative values over k_lo..k_hi */
  trajectories: Record<string, number[]>;
}

export interface Finding {
  id: number;
  score: number;
  onset?: number;
}

export interface DetectionReport {
  detector: "outliers" | "isolated" | "groups";
  rule: Record<string, number>;
  counts: Record<string, number>;
  findings: Finding[];
  sections: Record<string, Finding[]>;
}

export interface NeighborEntry {
  id: number;
  rank: number;
  d_in: number;
  d_out: number;
  class: SetName;
}

export type MetaPayload =
  | { kind: "image"; rows: number; cols: number; base64: string }
  | { kind: "value"; value: number }
  | { kind: "array"; values: number[] }
  | null;

export interface RecordPayload {
  id: number;
  input: number[];
  output: number[];
  meta: MetaPayload;
  embedding: [number, number] | null;
  neighbors: NeighborEntry[];
}

export interface PointsPayload {
  available: boolean;
  points: number[][];
  outputs: number[];
}
