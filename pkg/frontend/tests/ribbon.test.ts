/** Inspection round trip: the neighbor class ribbon shown for a record must
 * reproduce the record's profile values at the viewed window. Fixtures are
 * real service responses. */

import { describe, expect, it } from "vitest";

import { ribbonCounts, ribbonSegments } from "../src/render.js";
import { DetectionReport, RecordPayload, SelectResponse, SET_NAMES } from "../src/types.js";
import { fixture } from "./helpers.js";

const rec649 = fixture<RecordPayload>("record_649.json");
const rec0 = fixture<RecordPayload>("record_0.json");
const selectOutliers = fixture<SelectResponse>("select_outlier_rect.json");
const detectOutliers = fixture<DetectionReport>("detect_outliers_100_71.json");

describe("ribbon counts equal the record's profile values", () => {
  it("EU count over the window equals the detector score", () => {
    const finding = detectOutliers.findings.find((f) => f.id === 649)!;
    expect(ribbonCounts(rec649.neighbors, 100).EU).toBe(finding.score);
  });

  it("EU counts reproduce the trajectory at every rank", () => {
    const traj = selectOutliers.trajectories["649"];
    for (let k = 1; k <= traj.length; k++) {
      expect(ribbonCounts(rec649.neighbors, k).EU).toBe(traj[k - 1]);
    }
  });

  it("the four counts always partition the window", () => {
    for (const rec of [rec0, rec649]) {
      for (const window of [1, 7, 50, 100, rec.neighbors.length]) {
        const counts = ribbonCounts(rec.neighbors, window);
        const total = SET_NAMES.reduce((acc, s) => acc + counts[s], 0);
        expect(total).toBe(Math.min(window, rec.neighbors.length));
      }
    }
  });
});

describe("ribbon segments", () => {
  it("cover the sequence exactly, in order", () => {
    const segments = ribbonSegments(rec0.neighbors);
    let cursor = 0;
    for (const seg of segments) {
      expect(seg.start).toBe(cursor);
      expect(seg.length).toBeGreaterThan(0);
      cursor += seg.length;
    }
    expect(cursor).toBe(rec0.neighbors.length);
  });

  it("merge only equal classes", () => {
    const segments = ribbonSegments(rec649.neighbors);
    for (let i = 1; i < segments.length; i++) {
      expect(segments[i].cls).not.toBe(segments[i - 1].cls);
    }
  });
});

describe("record payload shape", () => {
  it("neighbors arrive distance-sorted with 2-D coordinates attached", () => {
    const d = rec649.neighbors.map((n) => n.d_in);
    expect([...d].sort((a, b) => a - b)).toEqual(d);
    expect(rec649.embedding).toEqual(rec649.input); // 2-D inputs double as coordinates
    expect(rec649.input.length).toBe(2);
  });
});
