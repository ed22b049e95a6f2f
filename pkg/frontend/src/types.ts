// Shapes of the API payloads the client consumes. Field names mirror the
// wire format exactly; the client never recomputes any of these numbers.

export type RoleName =
  | "Student"
  | "ProjectLeader"
  | "TechnicalTutor"
  | "ManagementTutor"
  | "TechnicalManager"
  | "ManagementManager"
  | "Teacher"
  | "Director";

export type ActionName = "Read" | "Write";

export type ResourceClassName =
  | "GroupDashboard"
  | "StudentMetacogDashboard"
  | "StudentBlog"
  | "GroupBlog"
  | "GroupBlogDraft"
  | "TutorView"
  | "ForumDiscussion"
  | "Taxonomy"
  | "LearningContract"
  | "Task"
  | "Deliverable"
  | "TimeEntryStream"
  | "Evaluation";

export type Relationship =
  | "self"
  | "self_contracted"
  | "leader_same_group"
  | "member_same_group"
  | "tutor_same_group"
  | "member_other_group"
  | "tutor_other_group"
  | "none";

export interface DecisionRow {
  relationship: Relationship;
  role: RoleName;
  action: ActionName;
  resource_class: ResourceClassName;
  allow: boolean;
  rule_id: string;
}

export interface Session {
  actor_id: string;
  role: RoleName;
  group_id: string | null;
  expires_at: string;
  poll_interval_s: number;
  token?: string;
}

export interface ApiError {
  code: string;
  rule_id?: string;
  message: string;
}

export interface CourseInfo {
  id: string;
  name: string;
  status: "Setup" | "Running" | "Closed";
  calendar: Array<{ phase: string; start: string; end: string }>;
  seq: number;
}

export interface WorkingTime {
  per_member_period: Record<string, number>;
  per_member_cumulative: Record<string, number>;
  total_period: number;
  total_cumulative: number;
}

export interface ProjectDashboard {
  group_id: string;
  period: string;
  frame_of_mind: number | null;
  skills_checklist: Array<{ text: string; done: boolean }>;
  working_time: WorkingTime;
  open_tasks: Record<string, number>;
  deliverables_due: Array<{
    id: string;
    title: string;
    due: string;
    status: string;
    submitted_at: string | null;
    delay_days: number;
  }>;
  total_delay_days: number;
}

export interface TeamworkIndicators {
  group_id: string;
  period: string;
  activity_score: number;
  team_orientation: number;
  team_leadership: number;
  monitoring: number;
  feedback: number;
  backup: number;
  coordination: number;
  no_data: string[];
}

export interface DashboardSnapshot {
  seq: number;
  project_dashboard: ProjectDashboard;
  teamwork_indicators: TeamworkIndicators;
}

export interface MetacogProfile {
  student_id: string;
  periods: Record<string, Record<string, number>>;
  trends: Record<string, number | null>;
  seq?: number;
  questionnaire?: Record<string, string[]>;
}

export interface TutorViewGroup {
  group_id: string;
  name: string;
  indicators: TeamworkIndicators;
  dashboard: ProjectDashboard;
  students: Array<{
    student_id: string;
    name: string;
    latest_period: string | null;
    scores: Record<string, number>;
    trends: Record<string, number | null>;
  }>;
  recent_posts: Array<{ at: string; blog_owner: string; headline: string }>;
  notes: Array<{ at: string; group_id: string; text: string }>;
}

export interface TutorView {
  tutor_id: string;
  period: string;
  groups: TutorViewGroup[];
  seq?: number;
}

export interface TaxonomySubject {
  id: string;
  label: string;
  parent_id: string | null;
  root: string;
  status: "Seed" | "Proposed";
}

export interface Discussion {
  id: string;
  title: string;
  opener_id: string;
  tags: string[];
  messages: Array<{ author_id: string; body: string; at: string }>;
}

export interface BlogPost {
  id: string;
  author_id: string;
  body: string;
  created_at: string;
  status: "Draft" | "Published";
  published_by: string | null;
}

export interface TaskDoc {
  id: string;
  group_id: string;
  title: string;
  assignee_id: string | null;
  original_assignee_id: string | null;
  dependency_ids: string[];
  status: "Planned" | "Active" | "Done";
  planned_start: string;
  planned_end: string;
  actual_start: string | null;
  actual_end: string | null;
}

export interface DeliverableDoc {
  id: string;
  group_id: string;
  title: string;
  due: string;
  submitted_at: string | null;
  accepted_at: string | null;
  accepted_by: string | null;
  comment_count: number;
}

export interface Contract {
  owner_id: string;
  status: "Active" | "Revised";
  answers: Record<string, string>;
  created_at: string;
  revision?: {
    answers: Record<string, string>;
    linked_event_seqs: number[];
    revised_at: string;
  };
}
