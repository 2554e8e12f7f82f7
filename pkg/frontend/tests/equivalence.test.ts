/** Thin-client fidelity: brushing the detector rectangle must display
 * exactly the ids the corresponding detector call reports, and panel counts
 * must equal report counts. Fixtures are verbatim responses of the real
 * service for the bundled 1000-point reference cloud. */

import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import {
  addToSelection,
  brushToSelectRequest,
  groupRuleToRequest,
  initialView,
  outlierRuleToRequest,
} from "../src/state.js";
import { DetectionReport, SelectResponse } from "../src/types.js";
import { fixture, mockFetch } from "./helpers.js";

const run = fixture("run.json");
const selectOutliers = fixture<SelectResponse>("select_outlier_rect.json");
const detectOutliers = fixture<DetectionReport>("detect_outliers_100_71.json");
const selectGroups = fixture<SelectResponse>("select_group_rect.json");
const detectGroups = fixture<DetectionReport>("detect_groups_100_5.json");
const detectIsolated = fixture<DetectionReport>("detect_isolated_50.json");

function sortedFindingIds(report: DetectionReport): number[] {
  return report.findings.map((f) => f.id).sort((a, b) => a - b);
}

describe("brushing the outlier rectangle == the outlier detector", () => {
  it("produces the identical request either way", () => {
    const view = initialView(run.k);
    view.set = "EU";
    view.k = 100;
    view.mode = "ends_in";
    view.brush = { kLo: 1, kHi: 100, vLo: 71, vHi: 100 };
    expect(brushToSelectRequest(view)).toEqual(outlierRuleToRequest(100, 71));
  });

  it("the service answers with exactly the detector's ids", () => {
    expect(selectOutliers.ids).toEqual(sortedFindingIds(detectOutliers));
    expect(detectOutliers.counts.findings).toBe(selectOutliers.ids.length);
  });

  it("selection displayed after the round trip equals the report ids", async () => {
    const routes = new Map<string, unknown>();
    const req = outlierRuleToRequest(100, 71);
    routes.set(`/api/select ${JSON.stringify(req)}`, selectOutliers);
    routes.set(
      `/api/detect ${JSON.stringify({ detector: "outliers", params: { K: 100, t: 71 } })}`,
      detectOutliers,
    );
    const { fn } = mockFetch(routes);
    const client = new ApiClient(fn);

    const brushed = await client.select(req);
    let selection = addToSelection([], brushed.ids);

    const report = await client.detect({ detector: "outliers", params: { K: 100, t: 71 } });
    const applied = addToSelection([], report.findings.map((f) => f.id));

    expect(selection).toEqual(applied);
    expect(report.counts.findings).toBe(selection.length);
  });
});

describe("group rectangle == group detector", () => {
  it("rule maps to the near-diagonal band", () => {
    expect(groupRuleToRequest(100, 5))
      .toEqual({ set: "EE", k_lo: 1, k_hi: 100, v_lo: 95, v_hi: 100, mode: "ends_in" });
  });

  it("service ids agree id-for-id", () => {
    expect(selectGroups.ids).toEqual(sortedFindingIds(detectGroups));
    expect(detectGroups.counts.findings).toBe(selectGroups.ids.length);
  });
});

describe("isolation panel counts", () => {
  it("panel shows the report's merged/UE/UU counts verbatim", () => {
    expect(detectIsolated.counts.findings).toBe(detectIsolated.findings.length);
    expect(detectIsolated.counts.UE).toBe(detectIsolated.sections.UE.length);
    expect(detectIsolated.counts.UU).toBe(detectIsolated.sections.UU.length);
    // the reference cloud is clean at window 50
    expect(detectIsolated.counts.findings).toBe(0);
  });
});

describe("selected trajectories", () => {
  it("every selected id carries its profile slice over the brushed window", () => {
    for (const id of selectOutliers.ids) {
      const traj = selectOutliers.trajectories[String(id)];
      expect(traj).toBeDefined();
      expect(traj.length).toBe(selectOutliers.k_hi - selectOutliers.k_lo + 1);
      // ends_in with v_lo 71: the right edge lies inside the band
      const last = traj[traj.length - 1];
      expect(last).toBeGreaterThanOrEqual(71);
      expect(last).toBeLessThanOrEqual(100);
    }
  });
});
