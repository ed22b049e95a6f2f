// The student's interface: personal data entry (hours, mood), the
// reflective questionnaire, the personal blog, the group dashboard as the
// API reports it, and the learning contract. Every actionable control is
// gated by the decision table and tagged with its (action, class,
// relationship) triple.

import { BoundCapabilities, actionTag } from "../capabilities.js";
import { el, ViewNode } from "../nodes.js";
import type {
  BlogPost,
  Contract,
  CourseInfo,
  DashboardSnapshot,
  MetacogProfile,
  Session,
} from "../types.js";

export interface StudentViewModel {
  session: Session;
  course: CourseInfo;
  dashboard: DashboardSnapshot;
  profile: MetacogProfile;
  posts: BlogPost[];
  contract: Contract | null;
}

export function buildStudentView(model: StudentViewModel,
                                 can: BoundCapabilities): ViewNode {
  const sections: ViewNode[] = [];
  sections.push(moodSection(can));
  sections.push(timeSection(can));
  sections.push(questionnaireSection(model.profile, can));
  sections.push(profileSection(model.profile));
  sections.push(groupDashboardSection(model.dashboard));
  sections.push(blogSection(model.posts, can));
  sections.push(contractSection(model, can));
  return el("main", { "data-view": "student", "data-actor": model.session.actor_id },
    ...sections);
}

function moodSection(can: BoundCapabilities): ViewNode {
  const children: Array<ViewNode | string> = [el("h2", {}, "Frame of mind")];
  if (can.can("Write", "TimeEntryStream", "self")) {
    children.push(
      el("form", { "data-action": actionTag("Write", "TimeEntryStream", "self"),
                   "data-form": "frame-of-mind" },
        el("input", { type: "number", name: "score", min: "1", max: "5", step: "1" }),
        el("button", { type: "submit" }, "Record mood"),
      ),
    );
  }
  return el("section", { "data-section": "mood" }, ...children);
}

function timeSection(can: BoundCapabilities): ViewNode {
  const children: Array<ViewNode | string> = [el("h2", {}, "Working time")];
  if (can.can("Write", "TimeEntryStream", "self")) {
    children.push(
      el("form", { "data-action": actionTag("Write", "TimeEntryStream", "self"),
                   "data-form": "time-entry" },
        el("input", { type: "date", name: "date" }),
        el("input", { type: "number", name: "hours", min: "0", max: "24", step: "0.25" }),
        el("button", { type: "submit" }, "Log hours"),
      ),
    );
  }
  return el("section", { "data-section": "time" }, ...children);
}

function questionnaireSection(profile: MetacogProfile,
                              can: BoundCapabilities): ViewNode {
  const children: Array<ViewNode | string> = [el("h2", {}, "Self-assessment")];
  if (can.can("Write", "StudentMetacogDashboard", "self")) {
    const prompts = profile.questionnaire ?? {};
    const groups = Object.entries(prompts).map(([dimension, items]) =>
      el("fieldset", { "data-dimension": dimension },
        el("legend", {}, dimension),
        ...items.map((prompt) =>
          el("label", {}, prompt,
            el("input", { type: "number", name: prompt, min: "1", max: "5", step: "1" })),
        ),
      ),
    );
    children.push(
      el("form", { "data-action": actionTag("Write", "StudentMetacogDashboard", "self"),
                   "data-form": "self-report" },
        ...groups,
        el("button", { type: "submit" }, "Submit self-report"),
      ),
    );
  }
  return el("section", { "data-section": "questionnaire" }, ...children);
}

function profileSection(profile: MetacogProfile): ViewNode {
  const periods = Object.keys(profile.periods).sort();
  const latest = periods[periods.length - 1];
  const rows: ViewNode[] = [];
  if (latest) {
    for (const [dimension, score] of Object.entries(profile.periods[latest]).sort()) {
      const trend = profile.trends[dimension];
      rows.push(
        el("tr", {},
          el("td", {}, dimension),
          el("td", { "data-indicator": `metacog:${dimension}`,
                     "data-value": String(score) }, score.toFixed(2)),
          el("td", { "data-trend": dimension },
            trend === null || trend === undefined ? "n/a" : trend.toFixed(2)),
        ),
      );
    }
  }
  return el("section", { "data-section": "profile", "data-route": "metacog:self" },
    el("h2", {}, "My reflective profile"),
    el("table", {}, ...rows),
  );
}

export function groupDashboardSection(snapshot: DashboardSnapshot): ViewNode {
  const dash = snapshot.project_dashboard;
  const mood = dash.frame_of_mind;
  const rows = Object.entries(dash.working_time.per_member_period).map(([member, hours]) =>
    el("tr", {},
      el("td", {}, member),
      el("td", { "data-indicator": `hours:${member}`, "data-value": String(hours) },
        hours.toFixed(2))),
  );
  return el("section", { "data-section": "group-dashboard" },
    el("h2", {}, `Group dashboard (${dash.period})`),
    el("p", { "data-indicator": "frame_of_mind",
              "data-value": mood === null ? "" : String(mood) },
      mood === null ? "no mood entries" : mood.toFixed(2)),
    el("p", { "data-indicator": "total_delay_days",
              "data-value": String(dash.total_delay_days) },
      `${dash.total_delay_days} delay days`),
    el("table", {}, ...rows),
  );
}

function blogSection(posts: BlogPost[], can: BoundCapabilities): ViewNode {
  const children: Array<ViewNode | string> = [el("h2", {}, "My blog")];
  if (can.can("Write", "StudentBlog", "self")) {
    children.push(
      el("form", { "data-action": actionTag("Write", "StudentBlog", "self"),
                   "data-form": "blog-post" },
        el("textarea", { name: "body" }),
        el("button", { type: "submit" }, "Publish"),
      ),
    );
  }
  children.push(
    el("ul", {}, ...posts.map((p) => el("li", { "data-post": p.id }, p.body))),
  );
  return el("section", { "data-section": "blog" }, ...children);
}

function contractSection(model: StudentViewModel, can: BoundCapabilities): ViewNode {
  const children: Array<ViewNode | string> = [el("h2", {}, "Learning contract")];
  const contract = model.contract;
  if (contract) {
    children.push(
      el("dl", { "data-contract-status": contract.status },
        ...Object.entries(contract.answers).flatMap(([q, a]) => [
          el("dt", {}, q),
          el("dd", {}, a),
        ])),
    );
    // Touching a written contract is only offered when the table's
    // self_contracted row allows it (the course must be closed).
    if (can.can("Write", "LearningContract", "self_contracted")) {
      children.push(
        el("form", { "data-action": actionTag("Write", "LearningContract", "self_contracted"),
                     "data-form": "contract-revise" },
          el("button", { type: "submit" }, "Revise contract"),
        ),
      );
    }
  } else if (model.course.status !== "Closed"
             && can.can("Write", "LearningContract", "self")) {
    children.push(
      el("form", { "data-action": actionTag("Write", "LearningContract", "self"),
                   "data-form": "contract-create" },
        el("button", { type: "submit" }, "Write my contract"),
      ),
    );
  }
  return el("section", { "data-section": "contract" }, ...children);
}
