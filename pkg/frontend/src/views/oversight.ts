// Read-mostly view for the coordination roles. Managers and the director
// see every group dashboard and the forum (where they may post); the
// teacher follows the forum read-only.

import { BoundCapabilities } from "../capabilities.js";
import { el, ViewNode } from "../nodes.js";
import { forumSection } from "./tutor.js";
import type { DashboardSnapshot, Discussion, Session, TaxonomySubject } from "../types.js";

export interface OversightViewModel {
  session: Session;
  dashboards: DashboardSnapshot[];
  taxonomy: TaxonomySubject[];
  discussions: Discussion[];
}

export function buildOversightView(model: OversightViewModel,
                                   can: BoundCapabilities): ViewNode {
  const sections: ViewNode[] = [];
  if (can.can("Read", "GroupDashboard", "none")) {
    sections.push(
      el("section", { "data-section": "oversight-dashboards" },
        el("h2", {}, "Group dashboards"),
        ...model.dashboards.map((snapshot) =>
          el("div", { "data-group": snapshot.project_dashboard.group_id },
            el("h3", {}, snapshot.project_dashboard.group_id),
            el("span", {
              "data-indicator": "total_cumulative",
              "data-value": String(snapshot.project_dashboard.working_time.total_cumulative),
            }, snapshot.project_dashboard.working_time.total_cumulative.toFixed(1)),
          )),
      ),
    );
  }
  if (can.can("Read", "ForumDiscussion", "none")) {
    sections.push(forumSection(model, can));
  }
  return el("main", { "data-view": "oversight", "data-actor": model.session.actor_id },
    ...sections);
}
