// The tutor's monitoring interface: per-group teamwork indicators (with
// explicit no-data badges), deliverable states and delays, member
// reflective summaries, recent blog headlines, the practice-sharing forum
// with its subject tree and tag search, and the evaluation forms with the
// hard-bounded adjustment control.

import { BoundCapabilities, actionTag } from "../capabilities.js";
import { el, ViewNode } from "../nodes.js";
import type {
  Discussion,
  Session,
  TaxonomySubject,
  TutorView,
  TutorViewGroup,
} from "../types.js";

export interface TutorViewModel {
  session: Session;
  view: TutorView;
  taxonomy: TaxonomySubject[];
  discussions: Discussion[];
}

const INDICATOR_ORDER = [
  "activity_score",
  "team_orientation",
  "team_leadership",
  "monitoring",
  "feedback",
  "backup",
  "coordination",
] as const;

export function buildTutorView(model: TutorViewModel,
                               can: BoundCapabilities): ViewNode {
  return el("main", { "data-view": "tutor", "data-actor": model.session.actor_id },
    ...model.view.groups.map((g) => groupPanel(g, can)),
    forumSection(model, can),
  );
}

function groupPanel(group: TutorViewGroup, can: BoundCapabilities): ViewNode {
  return el("section", { "data-section": "group-panel", "data-group": group.group_id },
    el("h2", {}, `${group.name} (${group.indicators.period})`),
    indicatorStrip(group),
    deliverableTable(group, can),
    studentSummaries(group),
    headlines(group),
    evaluationForms(group, can),
    noteForm(group, can),
  );
}

function indicatorStrip(group: TutorViewGroup): ViewNode {
  const indicators = group.indicators;
  const flagged = new Set(indicators.no_data);
  const cells = INDICATOR_ORDER.map((name) => {
    const value = indicators[name];
    const noData = flagged.has(name);
    return el("span", {
      "data-indicator": name,
      "data-value": String(value),
      "data-no-data": String(noData),
      class: noData ? "indicator no-data" : "indicator",
    }, noData ? `${name}: no data` : `${name}: ${value.toFixed(2)}`);
  });
  return el("div", { "data-section": "indicators" }, ...cells);
}

function deliverableTable(group: TutorViewGroup, can: BoundCapabilities): ViewNode {
  const acceptable = can.can("Write", "Deliverable", "tutor_same_group");
  const rows = group.dashboard.deliverables_due.map((d) =>
    el("tr", { "data-deliverable": d.id },
      el("td", {}, d.title),
      el("td", {}, d.status),
      el("td", { "data-indicator": `delay:${d.id}`, "data-value": String(d.delay_days) },
        `${d.delay_days}d late`),
      ...(acceptable && d.status === "Submitted"
        ? [el("td", {},
            el("button", { "data-action": actionTag("Write", "Deliverable", "tutor_same_group"),
                           "data-form": "accept-deliverable" }, "Accept"))]
        : []),
    ),
  );
  return el("section", { "data-section": "deliverables" },
    el("h3", {}, "Deliverables"),
    el("p", { "data-indicator": "total_delay_days",
              "data-value": String(group.dashboard.total_delay_days) },
      `${group.dashboard.total_delay_days} delay days in total`),
    el("table", {}, ...rows),
  );
}

function studentSummaries(group: TutorViewGroup): ViewNode {
  const rows = group.students.map((s) => {
    const cells = Object.entries(s.scores).sort().map(([dimension, score]) =>
      el("td", { "data-indicator": `metacog:${s.student_id}:${dimension}`,
                 "data-value": String(score) }, score.toFixed(2)));
    return el("tr", { "data-student": s.student_id, "data-route": "metacog:member" },
      el("td", {}, s.name),
      el("td", {}, s.latest_period ?? "no reports"),
      ...cells,
    );
  });
  return el("section", { "data-section": "student-summaries" },
    el("h3", {}, "Member reflective summaries"),
    el("table", {}, ...rows),
  );
}

function headlines(group: TutorViewGroup): ViewNode {
  return el("section", { "data-section": "headlines" },
    el("h3", {}, "Recent posts"),
    el("ul", {},
      ...group.recent_posts.map((p) =>
        el("li", { "data-blog-owner": p.blog_owner }, p.headline)),
    ),
  );
}

function evaluationForms(group: TutorViewGroup, can: BoundCapabilities): ViewNode {
  const children: Array<ViewNode | string> = [el("h3", {}, "Evaluation")];
  if (can.can("Write", "Evaluation", "tutor_same_group")) {
    children.push(
      el("form", { "data-action": actionTag("Write", "Evaluation", "tutor_same_group"),
                   "data-form": "group-grade" },
        el("input", { type: "number", name: "grade", min: "0", max: "20", step: "0.5" }),
        el("button", { type: "submit" }, "Grade group"),
      ),
    );
    for (const s of group.students) {
      children.push(
        el("form", { "data-action": actionTag("Write", "Evaluation", "tutor_same_group"),
                     "data-form": "student-adjustment", "data-student": s.student_id },
          // The +/-2 bound is hard-wired into the control itself.
          el("input", { type: "number", name: "adjustment",
                        min: "-2", max: "2", step: "0.1" }),
          el("button", { type: "submit" }, `Adjust ${s.name}`),
        ),
      );
    }
  }
  return el("section", { "data-section": "evaluation" }, ...children);
}

function noteForm(group: TutorViewGroup, can: BoundCapabilities): ViewNode {
  const children: Array<ViewNode | string> = [
    el("h3", {}, "My notes"),
    el("ul", {}, ...group.notes.map((n) => el("li", {}, n.text))),
  ];
  if (can.can("Write", "TutorView", "self")) {
    children.push(
      el("form", { "data-action": actionTag("Write", "TutorView", "self"),
                   "data-form": "tutor-note" },
        el("textarea", { name: "text" }),
        el("button", { type: "submit" }, "Pin note"),
      ),
    );
  }
  return el("section", { "data-section": "notes" }, ...children);
}

export function forumSection(model: { taxonomy: TaxonomySubject[]; discussions: Discussion[] },
                             can: BoundCapabilities): ViewNode {
  const children: Array<ViewNode | string> = [el("h2", {}, "Practice forum")];
  children.push(taxonomyTree(model.taxonomy));
  children.push(
    el("form", { "data-form": "tag-search" },
      ...model.taxonomy.map((s) =>
        el("label", {}, s.label,
          el("input", { type: "checkbox", name: "tags", value: s.id }))),
      el("button", { type: "submit" }, "Search"),
    ),
  );
  if (can.can("Write", "ForumDiscussion", "none")) {
    children.push(
      el("form", { "data-action": actionTag("Write", "ForumDiscussion", "none"),
                   "data-form": "new-discussion" },
        el("input", { type: "text", name: "title" }),
        el("textarea", { name: "body" }),
        // proposals are immediately selectable: options come from the live tree
        el("select", { name: "tags", multiple: "multiple" },
          ...model.taxonomy.map((s) => el("option", { value: s.id }, s.label))),
        el("button", { type: "submit" }, "Open discussion"),
      ),
    );
  }
  if (can.can("Write", "Taxonomy", "none")) {
    children.push(
      el("form", { "data-action": actionTag("Write", "Taxonomy", "none"),
                   "data-form": "propose-subject" },
        el("select", { name: "parent_id" },
          ...model.taxonomy.map((s) => el("option", { value: s.id }, s.label))),
        el("input", { type: "text", name: "label" }),
        el("button", { type: "submit" }, "Propose subject"),
      ),
    );
  }
  const list = model.discussions.map((d) =>
    el("li", { "data-discussion": d.id },
      el("strong", {}, d.title),
      ` (${d.messages.length} messages)`,
      ...(can.can("Write", "ForumDiscussion", "none")
        ? [el("button", { "data-action": actionTag("Write", "ForumDiscussion", "none"),
                          "data-form": "reply" }, "Reply")]
        : []),
    ),
  );
  children.push(el("ul", { "data-section": "discussions" }, ...list));
  return el("section", { "data-section": "forum" }, ...children);
}

function taxonomyTree(subjects: TaxonomySubject[]): ViewNode {
  const byParent = new Map<string | null, TaxonomySubject[]>();
  for (const s of subjects) {
    const list = byParent.get(s.parent_id) ?? [];
    list.push(s);
    byParent.set(s.parent_id, list);
  }
  const render = (parent: string | null): ViewNode =>
    el("ul", parent === null ? { "data-section": "taxonomy" } : {},
      ...(byParent.get(parent) ?? []).map((s) =>
        el("li", { "data-subject": s.id, "data-status": s.status },
          s.label, render(s.id))),
    );
  return render(null);
}
