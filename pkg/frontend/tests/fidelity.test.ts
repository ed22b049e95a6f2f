// Capability fidelity: walking every role's rendered view, no actionable
// control may carry an (action, class, relationship) the decision table
// denies for that role.

import { describe, expect, it } from "vitest";

import { Capabilities, parseActionTag } from "../src/capabilities.js";
import { find, ViewNode } from "../src/nodes.js";
import { buildLeaderView } from "../src/views/leader.js";
import { buildOversightView } from "../src/views/oversight.js";
import { buildStudentView } from "../src/views/student.js";
import { buildTutorView } from "../src/views/tutor.js";
import type { DecisionRow, RoleName } from "../src/types.js";
import {
  fixture,
  leaderModel,
  loadTable,
  oversightModel,
  studentModel,
  tutorModel,
} from "./helpers.js";

const table = loadTable();

function renderedActions(view: ViewNode): string[] {
  return find(view, (n) => "data-action" in n.attrs).map((n) => n.attrs["data-action"]);
}

function assertAllAllowed(view: ViewNode, role: RoleName): number {
  const actions = renderedActions(view);
  for (const tag of actions) {
    const { action, cls, relationship } = parseActionTag(tag);
    expect(table.can(role, relationship, action, cls),
      `${role} renders denied action ${tag}`).toBe(true);
  }
  return actions.length;
}

describe("capability fidelity across every role", () => {
  it("student view renders only allowed actions, and does render some", () => {
    const view = buildStudentView(studentModel(), table.forRole("Student"));
    expect(assertAllAllowed(view, "Student")).toBeGreaterThan(0);
  });

  it("leader view renders only allowed actions", () => {
    const view = buildLeaderView(leaderModel(), table.forRole("ProjectLeader"));
    expect(assertAllAllowed(view, "ProjectLeader")).toBeGreaterThan(3);
  });

  it("tutor view renders only allowed actions", () => {
    const view = buildTutorView(tutorModel(), table.forRole("TechnicalTutor"));
    expect(assertAllAllowed(view, "TechnicalTutor")).toBeGreaterThan(3);
  });

  it("manager and director get oversight actions, teacher gets none", () => {
    for (const [role, fixtureRole] of [
      ["TechnicalManager", "manager"],
      ["Director", "director"],
    ] as const) {
      const view = buildOversightView(oversightModel(fixtureRole), table.forRole(role));
      expect(assertAllAllowed(view, role)).toBeGreaterThan(0);
    }
    const teacherView = buildOversightView(oversightModel("teacher"),
      table.forRole("Teacher"));
    expect(assertAllAllowed(teacherView, "Teacher")).toBe(0);
  });

  it("a student view never shows forum or taxonomy writes", () => {
    const view = buildStudentView(studentModel(), table.forRole("Student"));
    const tags = renderedActions(view);
    expect(tags.some((t) => t.includes("ForumDiscussion"))).toBe(false);
    expect(tags.some((t) => t.includes("Taxonomy"))).toBe(false);
  });

  it("contract edit control is absent while the course runs", () => {
    const model = studentModel(); // fixture course is Running, contract exists
    expect(model.course.status).toBe("Running");
    const view = buildStudentView(model, table.forRole("Student"));
    const tags = renderedActions(view);
    expect(tags.some((t) => t.startsWith("Write:LearningContract"))).toBe(false);
  });

  it("contract revision control appears once the course closes", () => {
    // the closed-course table flips the self_contracted write row to allow
    const rows = fixture<DecisionRow[]>("decision_table").map((row) =>
      row.resource_class === "LearningContract" && row.action === "Write"
        && row.relationship === "self_contracted"
        ? { ...row, allow: true, rule_id: "R1" }
        : row);
    const closedTable = new Capabilities(rows);
    const base = studentModel();
    const model = { ...base, course: { ...base.course, status: "Closed" as const } };
    const view = buildStudentView(model, closedTable.forRole("Student"));
    expect(renderedActions(view)).toContain("Write:LearningContract:self_contracted");
  });
});
