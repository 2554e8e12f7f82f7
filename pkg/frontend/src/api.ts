/** Thin typed client for the /api endpoints.
 *
 * Requests are grouped into slots (grid, select, detect, ...); issuing a new
 * request in a slot aborts the one still in flight, so the view always
 * reflects the newest parameters and never a stale response.
 */

import {
  DetectionReport,
  GridPayload,
  PointsPayload,
  RecordPayload,
  RunSummary,
  SelectRequest,
  SelectResponse,
} from "./types.js";

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(public status: number, detail: string) {
    super(detail);
  }
}

export class ApiClient {
  private inflight = new Map<string, AbortController>();

  constructor(private fetchFn: FetchLike = (...a) => fetch(...a), private base = "") {}

  private async request<T>(slot: string, url: string, init?: RequestInit): Promise<T> {
    this.inflight.get(slot)?.abort();
    const controller = new AbortController();
    this.inflight.set(slot, controller);
    try {
      const resp = await this.fetchFn(this.base + url, { ...init, signal: controller.signal });
      if (!resp.ok) {
        let detail = `${resp.status}`;
        try {
          const body = await resp.json();
          detail = typeof body.detail === "string" ? body.detail : JSON.stringify(body);
        } catch {
          /* non-JSON error body */
        }
        throw new ApiError(resp.status, detail);
      }
      return (await resp.json()) as T;
    } finally {
      if (this.inflight.get(slot) === controller) this.inflight.delete(slot);
    }
  }

  run(): Promise<RunSummary> {
    return this.request("run", "/api/run");
  }

  grid(set: string, k: number, gamma: number): Promise<GridPayload> {
    const q = new URLSearchParams({ set, k: String(k), gamma: String(gamma) });
    return this.request("grid", `/api/grid?${q}`);
  }

  points(): Promise<PointsPayload> {
    return this.request("points", "/api/points");
  }

  select(req: SelectRequest): Promise<SelectResponse> {
    return this.request("select", "/api/select", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(req),
    });
  }

  detect(payload: { detector: string; params: Record<string, number> }):
      Promise<DetectionReport> {
    return this.request(`detect:${payload.detector}`, "/api/detect", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(payload),
    });
  }

  record(id: number): Promise<RecordPayload> {
    return this.request(`record:${id}`, `/api/record/${id}`);
  }
}
