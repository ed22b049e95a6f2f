// The project leader's interface: everything a student gets, plus group
// dashboard upkeep (skills checklist, tasks) and the pending-post queue.
// Member working time and mood arrive pre-aggregated from the API; there is
// deliberately no route to any member's reflective profile.

import { BoundCapabilities, actionTag } from "../capabilities.js";
import { el, ViewNode } from "../nodes.js";
import { buildStudentView, groupDashboardSection, StudentViewModel } from "./student.js";
import type { BlogPost, DashboardSnapshot, TaskDoc } from "../types.js";

export interface LeaderViewModel extends StudentViewModel {
  drafts: BlogPost[];
  tasks: TaskDoc[];
}

export function buildLeaderView(model: LeaderViewModel,
                                can: BoundCapabilities): ViewNode {
  const personal = buildStudentView(model, can);
  return el("main", { "data-view": "leader", "data-actor": model.session.actor_id },
    skillsSection(model.dashboard, can),
    tasksSection(model, can),
    draftQueueSection(model, can),
    groupProposalSection(can),
    el("section", { "data-section": "personal" }, personal),
  );
}

function skillsSection(snapshot: DashboardSnapshot, can: BoundCapabilities): ViewNode {
  const dash = snapshot.project_dashboard;
  const editable = can.can("Write", "GroupDashboard", "leader_same_group");
  const items = dash.skills_checklist.map((item, index) =>
    el("li", { "data-skill-index": String(index), "data-done": String(item.done) },
      item.text,
      ...(editable
        ? [el("button", {
            "data-action": actionTag("Write", "GroupDashboard", "leader_same_group"),
            "data-form": "skill-toggle",
          }, item.done ? "Reopen" : "Mark done")]
        : []),
    ),
  );
  const children: Array<ViewNode | string> = [
    el("h2", {}, "Skills to build"),
    el("ul", {}, ...items),
  ];
  if (editable) {
    children.push(
      el("form", { "data-action": actionTag("Write", "GroupDashboard", "leader_same_group"),
                   "data-form": "skill-add" },
        el("input", { type: "text", name: "text" }),
        el("button", { type: "submit" }, "Add skill"),
      ),
    );
  }
  return el("section", { "data-section": "skills" }, ...children);
}

function tasksSection(model: LeaderViewModel, can: BoundCapabilities): ViewNode {
  const editable = can.can("Write", "Task", "leader_same_group");
  const rows = model.tasks.map((t) =>
    el("tr", { "data-task": t.id },
      el("td", {}, t.title),
      el("td", {}, t.status),
      el("td", {}, t.assignee_id ?? "unassigned"),
      ...(editable
        ? [el("td", {},
            el("button", { "data-action": actionTag("Write", "Task", "leader_same_group"),
                           "data-form": "task-advance" }, "Advance"))]
        : []),
    ),
  );
  const children: Array<ViewNode | string> = [
    el("h2", {}, "Tasks"),
    el("table", {}, ...rows),
  ];
  if (editable) {
    children.push(
      el("form", { "data-action": actionTag("Write", "Task", "leader_same_group"),
                   "data-form": "task-add" },
        el("input", { type: "text", name: "title" }),
        el("input", { type: "date", name: "planned_start" }),
        el("input", { type: "date", name: "planned_end" }),
        el("button", { type: "submit" }, "Add task"),
      ),
    );
  }
  return el("section", { "data-section": "tasks" }, ...children);
}

function draftQueueSection(model: LeaderViewModel, can: BoundCapabilities): ViewNode {
  const confirmable = can.can("Write", "GroupBlog", "leader_same_group");
  const items = model.drafts.map((draft) =>
    el("li", { "data-draft": draft.id },
      `${draft.author_id}: ${draft.body}`,
      ...(confirmable
        ? [el("button", { "data-action": actionTag("Write", "GroupBlog", "leader_same_group"),
                          "data-form": "confirm-post" }, "Publish")]
        : []),
    ),
  );
  return el("section", { "data-section": "draft-queue" },
    el("h2", {}, "Pending group posts"),
    el("ul", {}, ...items),
  );
}

function groupProposalSection(can: BoundCapabilities): ViewNode {
  const children: Array<ViewNode | string> = [el("h2", {}, "Propose a group post")];
  if (can.can("Write", "GroupBlogDraft", "leader_same_group")) {
    children.push(
      el("form", { "data-action": actionTag("Write", "GroupBlogDraft", "leader_same_group"),
                   "data-form": "group-post-propose" },
        el("textarea", { name: "body" }),
        el("button", { type: "submit" }, "Propose"),
      ),
    );
  }
  return el("section", { "data-section": "group-post" }, ...children);
}

export { groupDashboardSection };
