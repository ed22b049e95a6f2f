// Fixture loading and model assembly shared by the test files. Fixtures are
// captured verbatim from the backend API (scripts/export_ui_fixtures.py).

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { Capabilities } from "../src/capabilities.js";
import type { LeaderViewModel } from "../src/views/leader.js";
import type { OversightViewModel } from "../src/views/oversight.js";
import type { StudentViewModel } from "../src/views/student.js";
import type { TutorViewModel } from "../src/views/tutor.js";
import type {
  BlogPost,
  Contract,
  CourseInfo,
  DashboardSnapshot,
  DecisionRow,
  Discussion,
  MetacogProfile,
  Session,
  TaskDoc,
  TaxonomySubject,
} from "../src/types.js";

const here = dirname(fileURLToPath(import.meta.url));

export function fixture<T>(name: string): T {
  return JSON.parse(readFileSync(join(here, "fixtures", `${name}.json`), "utf-8")) as T;
}

export interface SessionFixtures {
  student: Session;
  leader: Session;
  tutor: Session;
  manager: Session;
  teacher: Session;
  director: Session;
}

export function loadTable(): Capabilities {
  return new Capabilities(fixture<DecisionRow[]>("decision_table"));
}

export function studentModel(): StudentViewModel {
  const sessions = fixture<SessionFixtures>("sessions");
  return {
    session: sessions.student,
    course: fixture<CourseInfo>("course"),
    dashboard: fixture<DashboardSnapshot>("dashboard"),
    profile: fixture<MetacogProfile>("profile"),
    posts: fixture<BlogPost[]>("student_posts"),
    contract: fixture<Contract>("contract"),
  };
}

export function leaderModel(): LeaderViewModel {
  const sessions = fixture<SessionFixtures>("sessions");
  const groupPosts = fixture<BlogPost[]>("group_posts_leader");
  return {
    ...studentModel(),
    session: sessions.leader,
    contract: null,
    drafts: groupPosts.filter((p) => p.status === "Draft"),
    tasks: fixture<TaskDoc[]>("tasks"),
  };
}

export function tutorModel(): TutorViewModel {
  const sessions = fixture<SessionFixtures>("sessions");
  return {
    session: sessions.tutor,
    view: fixture<TutorViewModel["view"]>("tutor_view"),
    taxonomy: fixture<TaxonomySubject[]>("taxonomy"),
    discussions: fixture<Discussion[]>("discussions"),
  };
}

export function oversightModel(role: "manager" | "teacher" | "director"): OversightViewModel {
  const sessions = fixture<SessionFixtures>("sessions");
  return {
    session: sessions[role],
    dashboards: [fixture<DashboardSnapshot>("dashboard")],
    taxonomy: fixture<TaxonomySubject[]>("taxonomy"),
    discussions: fixture<Discussion[]>("discussions"),
  };
}
