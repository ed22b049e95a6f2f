// The leader sees the pending-post queue and member aggregates, but has no
// path whatsoever to a member's reflective profile.

import { describe, expect, it } from "vitest";

import { find, textOf } from "../src/nodes.js";
import { buildLeaderView } from "../src/views/leader.js";
import { fixture, leaderModel, loadTable } from "./helpers.js";
import type { DashboardSnapshot } from "../src/types.js";

const table = loadTable();

describe("leader view", () => {
  it("shows pending drafts with a publish control", () => {
    const model = leaderModel();
    expect(model.drafts.length).toBeGreaterThan(0);
    const view = buildLeaderView(model, table.forRole("ProjectLeader"));
    const queue = find(view, (n) => n.attrs["data-section"] === "draft-queue");
    expect(queue).toHaveLength(1);
    const buttons = find(queue[0], (n) =>
      n.attrs["data-form"] === "confirm-post");
    expect(buttons.length).toBe(model.drafts.length);
  });

  it("exposes no route to member reflective profiles", () => {
    const view = buildLeaderView(leaderModel(), table.forRole("ProjectLeader"));
    const routes = find(view, (n) => (n.attrs["data-route"] ?? "").startsWith("metacog"))
      .map((n) => n.attrs["data-route"]);
    expect(routes).toEqual(["metacog:self"]); // own profile only
    // and no per-member reflective markers anywhere
    const memberMetacog = find(view, (n) =>
      (n.attrs["data-indicator"] ?? "").startsWith("metacog:s"));
    expect(memberMetacog).toHaveLength(0);
  });

  it("renders member aggregates exactly as the API reports them", () => {
    const snapshot = fixture<DashboardSnapshot>("dashboard");
    const view = buildLeaderView(leaderModel(), table.forRole("ProjectLeader"));
    for (const [member, hours] of Object.entries(
      snapshot.project_dashboard.working_time.per_member_period)) {
      const cells = find(view, (n) => n.attrs["data-indicator"] === `hours:${member}`);
      expect(cells.length).toBeGreaterThan(0);
      for (const cell of cells) {
        expect(cell.attrs["data-value"]).toBe(String(hours));
      }
    }
    const delay = find(view, (n) => n.attrs["data-indicator"] === "total_delay_days");
    expect(delay[0].attrs["data-value"]).toBe(
      String(snapshot.project_dashboard.total_delay_days));
  });

  it("skills controls exist for the leader and mirror the checklist", () => {
    const snapshot = fixture<DashboardSnapshot>("dashboard");
    const view = buildLeaderView(leaderModel(), table.forRole("ProjectLeader"));
    const items = find(view, (n) => "data-skill-index" in n.attrs);
    expect(items.length).toBe(snapshot.project_dashboard.skills_checklist.length);
    const addForm = find(view, (n) => n.attrs["data-form"] === "skill-add");
    expect(addForm).toHaveLength(1);
  });

  it("a plain student building the leader sections gets no leader controls", () => {
    const model = { ...leaderModel(), session: { ...leaderModel().session, role: "Student" as const } };
    const view = buildLeaderView(model, table.forRole("Student"));
    expect(find(view, (n) => n.attrs["data-form"] === "confirm-post")).toHaveLength(0);
    expect(find(view, (n) => n.attrs["data-form"] === "skill-add")).toHaveLength(0);
    expect(textOf(view)).toContain("Pending group posts"); // section shell remains
  });
});
