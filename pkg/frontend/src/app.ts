// Browser shell: logs in, fetches the decision table and the data the
// actor's role needs, renders the matching view, and re-fetches on a poll
// timer. Mutations always wait for the server acknowledgment and then force
// a refresh; nothing updates optimistically.

import { ApiClient, startPolling } from "./api.js";
import { BoundCapabilities, Capabilities } from "./capabilities.js";
import { el, toDom, ViewNode } from "./nodes.js";
import { buildLeaderView } from "./views/leader.js";
import { buildOversightView } from "./views/oversight.js";
import { buildStudentView } from "./views/student.js";
import { buildTutorView } from "./views/tutor.js";
import type { Contract, Session } from "./types.js";

const api = new ApiClient("");

async function fetchContract(actorId: string): Promise<Contract | null> {
  try {
    return await api.contract(actorId);
  } catch {
    return null;
  }
}

async function buildForRole(session: Session, can: BoundCapabilities): Promise<ViewNode> {
  const course = await api.course();
  if (session.role === "Student" || session.role === "ProjectLeader") {
    const groupId = session.group_id!;
    const [dashboard, profile, posts, contract] = await Promise.all([
      api.dashboard(groupId),
      api.profile(session.actor_id),
      api.blogPosts(session.actor_id),
      fetchContract(session.actor_id),
    ]);
    const base = { session, course, dashboard, profile, posts, contract };
    if (session.role === "ProjectLeader") {
      const [groupPosts, tasks] = await Promise.all([
        api.blogPosts(groupId),
        api.tasks(groupId),
      ]);
      const drafts = groupPosts.filter((p) => p.status === "Draft");
      return buildLeaderView({ ...base, drafts, tasks }, can);
    }
    return buildStudentView(base, can);
  }
  if (session.role === "TechnicalTutor" || session.role === "ManagementTutor") {
    const [view, taxonomy, discussions] = await Promise.all([
      api.tutorView(), api.taxonomy(), api.discussions(),
    ]);
    return buildTutorView({ session, view, taxonomy, discussions }, can);
  }
  const canRead = can.can("Read", "ForumDiscussion", "none");
  const [taxonomy, discussions] = canRead
    ? await Promise.all([api.taxonomy(), api.discussions()])
    : [[], []];
  const dashboards = [];
  if (can.can("Read", "GroupDashboard", "none")) {
    const actors = await fetch("/api/actors").then((r) => r.json());
    const groups = [...new Set(actors.map((a: { group_id: string | null }) => a.group_id)
      .filter(Boolean))] as string[];
    for (const groupId of groups.sort()) {
      dashboards.push(await api.dashboard(groupId));
    }
  }
  return buildOversightView({ session, dashboards, taxonomy, discussions }, can);
}

async function refresh(session: Session, can: BoundCapabilities): Promise<void> {
  const view = await buildForRole(session, can);
  const root = document.getElementById("app")!;
  root.replaceChildren(toDom(view, document));
}

async function boot(): Promise<void> {
  const root = document.getElementById("app")!;
  const form = el("form", { "data-form": "login" },
    el("h1", {}, "Course monitor"),
    el("input", { type: "text", name: "actor_id", placeholder: "actor id" }),
    el("button", { type: "submit" }, "Enter"),
  );
  root.replaceChildren(toDom(form, document));
  root.querySelector("form")!.addEventListener("submit", async (event) => {
    event.preventDefault();
    const actorId = (root.querySelector("input[name=actor_id]") as HTMLInputElement).value;
    const session = await api.login(actorId);
    const table = new Capabilities(await api.decisionTable());
    const can = table.forRole(session.role);
    await refresh(session, can);
    startPolling(() => void refresh(session, can),
      (session.poll_interval_s ?? 30) * 1000);
  });
}

if (typeof document !== "undefined") {
  void boot();
}
