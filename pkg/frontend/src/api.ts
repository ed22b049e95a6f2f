// Thin fetch client. Every mutation awaits the server's acknowledgment;
// nothing is applied optimistically.

import type {
  ApiError,
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
  TutorView,
} from "./types.js";

export class ApiRequestError extends Error {
  constructor(readonly status: number, readonly detail: ApiError) {
    super(`${detail.code}: ${detail.message}`);
  }
}

export class ApiClient {
  private token: string | null = null;

  constructor(private base: string = "") {}

  async login(actorId: string): Promise<Session> {
    const session = await this.request<Session & { token: string }>(
      "POST", "/api/session", { actor_id: actorId },
    );
    this.token = session.token;
    return session;
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const headers: Record<string, string> = { "Content-Type": "application/json" };
    if (this.token) headers["Authorization"] = `Bearer ${this.token}`;
    const response = await fetch(this.base + path, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const payload = await response.json();
    if (!response.ok) {
      throw new ApiRequestError(response.status, payload as ApiError);
    }
    return payload as T;
  }

  course(): Promise<CourseInfo> {
    return this.request("GET", "/api/course");
  }

  decisionTable(): Promise<DecisionRow[]> {
    return this.request("GET", "/api/decision-table");
  }

  dashboard(groupId: string, period?: string): Promise<DashboardSnapshot> {
    const suffix = period ? `?period=${encodeURIComponent(period)}` : "";
    return this.request("GET", `/api/groups/${groupId}/dashboard${suffix}`);
  }

  recordTime(studentId: string, date: string, hours: number): Promise<{ seq: number }> {
    return this.request("POST", `/api/students/${studentId}/time`, { date, hours });
  }

  recordMood(studentId: string, period: string, score: number): Promise<{ seq: number }> {
    return this.request("POST", `/api/students/${studentId}/frame-of-mind`,
      { period, score });
  }

  profile(studentId: string): Promise<MetacogProfile> {
    return this.request("GET", `/api/students/${studentId}/metacog`);
  }

  submitReport(studentId: string, period: string,
               items: Array<{ dimension: string; prompt: string; response: number }>,
  ): Promise<{ seq: number }> {
    return this.request("POST", `/api/students/${studentId}/metacog`, { period, items });
  }

  tutorView(period?: string): Promise<TutorView> {
    const suffix = period ? `?period=${encodeURIComponent(period)}` : "";
    return this.request("GET", `/api/tutor/view${suffix}`);
  }

  blogPosts(ownerId: string): Promise<BlogPost[]> {
    return this.request("GET", `/api/blogs/${ownerId}/posts`);
  }

  writePost(ownerId: string, body: string): Promise<BlogPost> {
    return this.request("POST", `/api/blogs/${ownerId}/posts`, { body });
  }

  confirmPost(groupId: string, postId: string): Promise<BlogPost> {
    return this.request("POST", `/api/blogs/group/${groupId}/posts/${postId}/confirm`);
  }

  tasks(groupId: string): Promise<TaskDoc[]> {
    return this.request("GET", `/api/groups/${groupId}/tasks`);
  }

  taxonomy(): Promise<TaxonomySubject[]> {
    return this.request("GET", "/api/forum/taxonomy");
  }

  proposeSubject(parentId: string, label: string): Promise<TaxonomySubject> {
    return this.request("POST", "/api/forum/taxonomy",
      { action: "propose", parent_id: parentId, label });
  }

  discussions(): Promise<Discussion[]> {
    return this.request("GET", "/api/forum/discussions");
  }

  openDiscussion(title: string, body: string, tags: string[]): Promise<Discussion> {
    return this.request("POST", "/api/forum/discussions", { title, body, tags });
  }

  reply(discussionId: string, body: string): Promise<Discussion> {
    return this.request("POST", `/api/forum/discussions/${discussionId}/reply`, { body });
  }

  search(tags: string[]): Promise<Discussion[]> {
    return this.request("GET", `/api/forum/search?tags=${tags.join(",")}`);
  }

  contract(ownerId: string): Promise<Contract> {
    return this.request("GET", `/api/contracts/${ownerId}`);
  }

  writeContract(ownerId: string, answers: Record<string, string>): Promise<Contract> {
    return this.request("POST", `/api/contracts/${ownerId}`, { answers });
  }

  reviseContract(ownerId: string, answers: Record<string, string>,
                 linkedSeqs: number[]): Promise<Contract> {
    return this.request("POST", `/api/contracts/${ownerId}/revise`,
      { answers, linked_event_seqs: linkedSeqs });
  }

  gradeGroup(groupId: string, grade: number): Promise<unknown> {
    return this.request("POST", `/api/evaluations/group/${groupId}`, { grade });
  }

  adjustStudent(studentId: string, adjustment: number): Promise<unknown> {
    return this.request("POST", `/api/evaluations/student/${studentId}`, { adjustment });
  }
}

/** Poll a refresh callback at a fixed interval (default 30 s). */
export function startPolling(
  refresh: () => void,
  intervalMs = 30_000,
  timers: { setInterval: typeof setInterval } = globalThis,
): () => void {
  const handle = timers.setInterval(refresh, intervalMs);
  return () => clearInterval(handle as Parameters<typeof clearInterval>[0]);
}
