"""Domain types: course structure, actors, work items, and sharing artifacts.

Everything here is plain state rebuilt from the activity event log; nothing
is persisted independently of it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import date, datetime
from enum import Enum


class CourseStatus(str, Enum):
    SETUP = "Setup"
    RUNNING = "Running"
    CLOSED = "Closed"


class Phase(str, Enum):
    TENDER = "Tender"
    MASTER_PLAN = "MasterPlan"
    DEVELOPMENT = "Development"
    CLOSURE = "Closure"


PHASE_ORDER = [Phase.TENDER, Phase.MASTER_PLAN, Phase.DEVELOPMENT, Phase.CLOSURE]


class Role(str, Enum):
    STUDENT = "Student"
    PROJECT_LEADER = "ProjectLeader"
    TECHNICAL_TUTOR = "TechnicalTutor"
    MANAGEMENT_TUTOR = "ManagementTutor"
    TECHNICAL_MANAGER = "TechnicalManager"
    MANAGEMENT_MANAGER = "ManagementManager"
    TEACHER = "Teacher"
    DIRECTOR = "Director"


#: Roles that must belong to a project group once the course is assembled.
GROUP_BOUND_ROLES = frozenset(
    {Role.STUDENT, Role.PROJECT_LEADER, Role.TECHNICAL_TUTOR, Role.MANAGEMENT_TUTOR}
)
#: Roles counted as group members (work on the project).
MEMBER_ROLES = frozenset({Role.STUDENT, Role.PROJECT_LEADER})
#: Roles monitoring a single group.
TUTOR_ROLES = frozenset({Role.TECHNICAL_TUTOR, Role.MANAGEMENT_TUTOR})
#: Roles admitted to the tutors' community forum as authors.
FORUM_WRITE_ROLES = frozenset(
    {
        Role.TECHNICAL_TUTOR,
        Role.MANAGEMENT_TUTOR,
        Role.TECHNICAL_MANAGER,
        Role.MANAGEMENT_MANAGER,
        Role.DIRECTOR,
    }
)


class TaskStatus(str, Enum):
    PLANNED = "Planned"
    ACTIVE = "Active"
    DONE = "Done"


class PostStatus(str, Enum):
    DRAFT = "Draft"
    PUBLISHED = "Published"


class SubjectStatus(str, Enum):
    SEED = "Seed"
    PROPOSED = "Proposed"


class ContractStatus(str, Enum):
    ACTIVE = "Active"
    REVISED = "Revised"


class Dimension(str, Enum):
    COGNITION = "Cognition"
    METACOGNITION = "Metacognition"
    MOTIVATION = "Motivation"
    BEHAVIOUR = "Behaviour"


class TaxonomyRoot(str, Enum):
    ROLES_AND_TASKS = "RolesAndTasks"
    PROJECT_CALENDAR = "ProjectCalendar"
    GROUP_PROGRESS = "GroupProgress"


@dataclass
class PhaseWindow:
    phase: Phase
    start: date
    end: date


@dataclass
class Course:
    id: str
    name: str
    calendar: list[PhaseWindow]
    status: CourseStatus
    created_at: datetime

    def phase_on(self, d: date) -> Phase | None:
        for w in self.calendar:
            if w.start <= d <= w.end:
                return w.phase
        return None


@dataclass
class Actor:
    id: str
    name: str
    role: Role
    group_id: str | None = None


@dataclass
class ProjectGroup:
    id: str
    name: str
    member_ids: set[str]
    leader_id: str
    technical_tutor_id: str
    management_tutor_id: str
    subject: str

    @property
    def tutor_ids(self) -> tuple[str, str]:
        return (self.technical_tutor_id, self.management_tutor_id)


@dataclass
class Task:
    id: str
    group_id: str
    title: str
    assignee_id: str | None
    original_assignee_id: str | None
    dependency_ids: set[str]
    status: TaskStatus
    planned_start: date
    planned_end: date
    actual_start: date | None = None
    actual_end: date | None = None
    # (timestamp, status) for every status the task has held, creation included.
    status_history: list[tuple[datetime, TaskStatus]] = field(default_factory=list)
    # (timestamp, assignee) for every assignment change, creation included.
    assignee_history: list[tuple[datetime, str | None]] = field(default_factory=list)

    def first_activation(self) -> datetime | None:
        for ts, status in self.status_history:
            if status == TaskStatus.ACTIVE:
                return ts
        return None


@dataclass
class Deliverable:
    id: str
    group_id: str
    title: str
    due: date
    submitted_at: datetime | None = None
    accepted_at: datetime | None = None
    accepted_by: str | None = None
    comment_count: int = 0


@dataclass
class TimeEntry:
    student_id: str
    date: date
    hours: float


@dataclass
class BlogPost:
    id: str
    author_id: str
    body: str
    created_at: datetime
    status: PostStatus
    published_by: str | None = None


@dataclass
class Blog:
    id: str
    owner_id: str  # student id or group id
    posts: list[BlogPost] = field(default_factory=list)

    def find(self, post_id: str) -> BlogPost | None:
        for p in self.posts:
            if p.id == post_id:
                return p
        return None


@dataclass
class TaxonomySubject:
    id: str
    label: str
    parent_id: str | None
    root: TaxonomyRoot
    status: SubjectStatus


@dataclass
class ForumMessage:
    author_id: str
    body: str
    at: datetime


@dataclass
class Discussion:
    id: str
    title: str
    opener_id: str
    tags: set[str]
    messages: list[ForumMessage] = field(default_factory=list)

    def last_message_at(self) -> datetime:
        return self.messages[-1].at


#: The six self-commitment questions every learning contract answers.
CONTRACT_QUESTIONS = (
    "What do I want to learn?",
    "How will I learn this?",
    "Who can give support?",
    "When can I start?",
    "How will I know that I have learned?",
    "How will others realize that I have learned?",
)


@dataclass
class ContractRevision:
    answers: dict[str, str]
    linked_event_seqs: list[int]
    revised_at: datetime


@dataclass
class LearningContract:
    owner_id: str
    answers: dict[str, str]
    status: ContractStatus
    created_at: datetime
    revision: ContractRevision | None = None


@dataclass
class SkillItem:
    text: str
    done: bool = False


@dataclass
class GroupEvaluation:
    group_id: str
    group_grade: float | None = None
    adjustments: dict[str, float] = field(default_factory=dict)

    def individual_grade(self, student_id: str) -> float | None:
        """Group grade plus the student's adjustment, clamped to [0, 20]."""
        if self.group_grade is None or student_id not in self.adjustments:
            return None
        raw = self.group_grade + self.adjustments[student_id]
        return min(20.0, max(0.0, raw))


@dataclass
class TutorNote:
    at: datetime
    group_id: str
    text: str
