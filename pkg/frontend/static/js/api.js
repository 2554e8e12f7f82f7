/** Thin typed client for the /api endpoints.
 *
 * Requests are grouped into slots (grid, select, detect, ...); issuing a new
 * request in a slot aborts the one still in flight, so the view always
 * reflects the newest parameters and never a stale response.
 */
export class ApiError extends Error {
    constructor(status, detail) {
        super(detail);
        this.status = status;
    }
}
export class ApiClient {
    constructor(fetchFn = (...a) => fetch(...a), base = "") {
        this.fetchFn = fetchFn;
        this.base = base;
        this.inflight = new Map();
    }
    async request(slot, url, init) {
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
                }
                catch {
                    /* non-JSON error body */
                }
                throw new ApiError(resp.status, detail);
            }
            return (await resp.json());
        }
        finally {
            if (this.inflight.get(slot) === controller)
                this.inflight.delete(slot);
        }
    }
    run() {
        return this.request("run", "/api/run");
    }
    grid(set, k, gamma) {
        const q = new URLSearchParams({ set, k: String(k), gamma: String(gamma) });
        return this.request("grid", `/api/grid?${q}`);
    }
    points() {
        return this.request("points", "/api/points");
    }
    select(req) {
        return this.request("select", "/api/select", {
            method: "POST",
            headers: { "content-type": "application/json" },
            body: JSON.stringify(req),
        });
    }
    detect(payload) {
        return this.request(`detect:${payload.detector}`, "/api/detect", {
            method: "POST",
            headers: { "content-type": "application/json" },
            body: JSON.stringify(payload),
        });
    }
    record(id) {
        return this.request(`record:${id}`, `/api/record/${id}`);
    }
}
