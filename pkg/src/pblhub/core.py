"""Course structure and raw activity entry: the operations every other
module builds on. Each operation validates against current state, consults
the access policy where a resource class applies, then commits exactly one
event through the store's single append point.
"""

from __future__ import annotations

import graphlib
import math
from datetime import date, datetime

from .errors import (
    AlreadyAccepted,
    AlreadyClosed,
    AlreadyGrouped,
    CourseNotInSetup,
    CycleDetected,
    DuplicateActor,
    DuplicateGroupName,
    DuplicateTutor,
    Forbidden,
    IncompatibleRole,
    InvalidCalendar,
    LeaderNotMember,
    NoCourse,
    NotSubmitted,
    OutOfRange,
    StoreNotEmpty,
    TutorIsMember,
    UnknownActor,
    UnknownDeliverable,
    UnknownGroup,
    UnknownTask,
)
from .events import EventKind, SYSTEM_ACTOR
from .model import (
    Actor,
    Course,
    CourseStatus,
    Deliverable,
    MEMBER_ROLES,
    PHASE_ORDER,
    PhaseWindow,
    ProjectGroup,
    Role,
    Task,
    TaskStatus,
)
from .policy import Action, ResourceRef, require
from .store import Store


def _course(store: Store) -> Course:
    course = store.state.course
    if course is None:
        raise NoCourse("create a course first")
    return course


def _actor(store: Store, actor_id: str) -> Actor:
    actor = store.state.actors.get(actor_id)
    if actor is None:
        raise UnknownActor(f"no actor {actor_id}")
    return actor


def _group(store: Store, group_id: str) -> ProjectGroup:
    group = store.state.groups.get(group_id)
    if group is None:
        raise UnknownGroup(f"no group {group_id}")
    return group


# -- course ----------------------------------------------------------------


def create_course(store: Store, name: str, calendar: list[PhaseWindow],
                  at: datetime | None = None) -> Course:
    """Open a course in Setup with its four-phase calendar."""
    if store.state.course is not None:
        raise StoreNotEmpty("a course already exists in this store")
    if len(calendar) != 4:
        raise InvalidCalendar(f"expected 4 phase windows, got {len(calendar)}")
    for i, window in enumerate(calendar):
        if window.phase != PHASE_ORDER[i]:
            raise InvalidCalendar(f"phase {i + 1} must be {PHASE_ORDER[i].value}")
        if window.start >= window.end:
            raise InvalidCalendar(f"{window.phase.value} window is empty or inverted")
        if i and calendar[i - 1].end >= window.start:
            raise InvalidCalendar(
                f"{calendar[i - 1].phase.value} overlaps {window.phase.value}"
            )
    course_id = store.next_id("crs", 0)
    store.commit(
        EventKind.COURSE_CREATED,
        SYSTEM_ACTOR,
        {
            "course_id": course_id,
            "name": name,
            "calendar": [
                {"phase": w.phase.value, "start": w.start.isoformat(), "end": w.end.isoformat()}
                for w in calendar
            ],
        },
        at=at,
    )
    return store.state.course  # type: ignore[return-value]


def register_actor(store: Store, actor_id: str, name: str, role: Role,
                   at: datetime | None = None) -> Actor:
    if actor_id in store.state.actors or actor_id == SYSTEM_ACTOR:
        raise DuplicateActor(f"actor id {actor_id} taken")
    if role == Role.PROJECT_LEADER:
        raise IncompatibleRole("register leaders as students; group creation promotes them")
    payload = {"actor_id": actor_id, "name": name, "role": role.value}
    if role == Role.STUDENT:
        payload["blog_id"] = f"blog-{actor_id}"
    store.commit(EventKind.ACTOR_REGISTERED, actor_id, payload, at=at)
    return store.state.actors[actor_id]


def create_group(store: Store, name: str, member_ids: list[str], leader_id: str,
                 technical_tutor_id: str, management_tutor_id: str, subject: str,
                 at: datetime | None = None) -> ProjectGroup:
    """Assemble a project group during Setup; promotes the leader."""
    course = _course(store)
    if course.status != CourseStatus.SETUP:
        raise CourseNotInSetup("groups are fixed once the course runs")
    members = list(dict.fromkeys(member_ids))
    if len(members) < 2:
        raise IncompatibleRole("a group needs at least 2 members")
    if any(g.name == name for g in store.state.groups.values()):
        # group names label the forum's per-group subjects, which must stay
        # unique among siblings
        raise DuplicateGroupName(f"a group named {name!r} already exists")
    if leader_id not in members:
        raise LeaderNotMember(f"{leader_id} is not in the member list")
    if technical_tutor_id == management_tutor_id:
        raise DuplicateTutor("technical and management tutor must differ")
    if technical_tutor_id in members or management_tutor_id in members:
        raise TutorIsMember("tutors cannot be members of the group they monitor")
    for member_id in members:
        actor = _actor(store, member_id)
        if actor.role not in MEMBER_ROLES:
            raise IncompatibleRole(f"{member_id} has role {actor.role.value}, not a student")
        if actor.group_id is not None:
            raise AlreadyGrouped(f"{member_id} already belongs to {actor.group_id}")
    for tutor_id, wanted in (
        (technical_tutor_id, Role.TECHNICAL_TUTOR),
        (management_tutor_id, Role.MANAGEMENT_TUTOR),
    ):
        actor = _actor(store, tutor_id)
        if actor.role != wanted:
            raise IncompatibleRole(f"{tutor_id} is {actor.role.value}, expected {wanted.value}")
        if actor.group_id is not None:
            raise AlreadyGrouped(f"tutor {tutor_id} already monitors {actor.group_id}")
    group_id = store.next_id("grp", len(store.state.groups))
    store.commit(
        EventKind.GROUP_CREATED,
        SYSTEM_ACTOR,
        {
            "group_id": group_id,
            "name": name,
            "member_ids": sorted(members),
            "leader_id": leader_id,
            "technical_tutor_id": technical_tutor_id,
            "management_tutor_id": management_tutor_id,
            "subject": subject,
            "blog_id": f"blog-{group_id}",
            "progress_subject_id": f"sbj-{group_id}",
        },
        at=at,
    )
    return store.state.groups[group_id]


def advance_course(store: Store, actor_id: str, at: datetime | None = None) -> Course:
    """Setup -> Running -> Closed; the director drives the state machine."""
    course = _course(store)
    actor = _actor(store, actor_id)
    if actor.role != Role.DIRECTOR:
        raise Forbidden("only the director advances the course", rule_id="R8")
    if course.status == CourseStatus.CLOSED:
        raise AlreadyClosed("the course is already closed")
    nxt = CourseStatus.RUNNING if course.status == CourseStatus.SETUP else CourseStatus.CLOSED
    store.commit(
        EventKind.COURSE_ADVANCED,
        actor_id,
        {"course_id": course.id, "status": nxt.value},
        at=at,
    )
    return course


# -- tasks -------------------------------------------------------------------


def _check_acyclic(store: Store, group_id: str, task_id: str, dependency_ids: set[str]) -> None:
    graph: dict[str, set[str]] = {
        t.id: set(t.dependency_ids) for t in store.state.group_tasks(group_id)
    }
    graph[task_id] = dependency_ids
    try:
        graphlib.TopologicalSorter(graph).prepare()
    except graphlib.CycleError:
        raise CycleDetected(f"dependencies of {task_id} form a cycle") from None


def add_task(store: Store, actor_id: str, group_id: str, title: str,
             planned_start: date, planned_end: date,
             assignee_id: str | None = None,
             dependency_ids: set[str] | None = None,
             at: datetime | None = None) -> Task:
    group = _group(store, group_id)
    require(store.state, actor_id, Action.WRITE, ResourceRef.task(group_id))
    deps = set(dependency_ids or ())
    for dep in deps:
        dep_task = store.state.tasks.get(dep)
        if dep_task is None or dep_task.group_id != group_id:
            raise UnknownTask(f"dependency {dep} not in group {group_id}")
    if assignee_id is not None and assignee_id not in group.member_ids:
        raise UnknownActor(f"assignee {assignee_id} is not a member of {group_id}")
    task_id = store.next_id("tsk", len(store.state.tasks))
    if task_id in deps:
        raise CycleDetected("a task cannot depend on itself")
    _check_acyclic(store, group_id, task_id, deps)
    store.commit(
        EventKind.TASK_UPDATE,
        actor_id,
        {
            "action": "add",
            "task_id": task_id,
            "group_id": group_id,
            "title": title,
            "assignee_id": assignee_id,
            "dependency_ids": sorted(deps),
            "planned_start": planned_start.isoformat(),
            "planned_end": planned_end.isoformat(),
        },
        at=at,
    )
    return store.state.tasks[task_id]


def update_task(store: Store, actor_id: str, group_id: str, task_id: str,
                changes: dict, at: datetime | None = None) -> Task:
    """Apply field changes. Reassignment touches only ``assignee_id``; the
    original assignee is pinned by the first assignment forever."""
    _group(store, group_id)
    require(store.state, actor_id, Action.WRITE, ResourceRef.task(group_id))
    task = store.state.tasks.get(task_id)
    if task is None or task.group_id != group_id:
        raise UnknownTask(f"no task {task_id} in group {group_id}")
    payload_changes: dict = {}
    if "title" in changes:
        payload_changes["title"] = str(changes["title"])
    if "dependency_ids" in changes:
        deps = set(changes["dependency_ids"])
        if task_id in deps:
            raise CycleDetected("a task cannot depend on itself")
        for dep in deps:
            dep_task = store.state.tasks.get(dep)
            if dep_task is None or dep_task.group_id != group_id:
                raise UnknownTask(f"dependency {dep} not in group {group_id}")
        _check_acyclic(store, group_id, task_id, deps)
        payload_changes["dependency_ids"] = sorted(deps)
    if "assignee_id" in changes:
        assignee = changes["assignee_id"]
        if assignee is not None and assignee not in _group(store, group_id).member_ids:
            raise UnknownActor(f"assignee {assignee} is not a member of {group_id}")
        payload_changes["assignee_id"] = assignee
    if "status" in changes:
        payload_changes["status"] = TaskStatus(changes["status"]).value
    for key in ("planned_start", "planned_end"):
        if key in changes:
            value = changes[key]
            payload_changes[key] = value.isoformat() if isinstance(value, date) else str(value)
    store.commit(
        EventKind.TASK_UPDATE,
        actor_id,
        {"action": "update", "task_id": task_id, "group_id": group_id,
         "changes": payload_changes},
        at=at,
    )
    return store.state.tasks[task_id]


# -- raw time entry -----------------------------------------------------------


def record_time_entry(store: Store, actor_id: str, student_id: str, on: date,
                      hours: float, at: datetime | None = None):
    """Log worked hours for one student and day; 0..24 per entry."""
    _actor(store, student_id)
    require(store.state, actor_id, Action.WRITE, ResourceRef.time_stream(student_id))
    if store.state.group_of_actor(student_id) is None:
        raise UnknownGroup(f"{student_id} belongs to no group")
    if not isinstance(hours, (int, float)) or math.isnan(hours) or not 0 <= hours <= 24:
        raise OutOfRange(f"hours must be within 0..24, got {hours!r}")
    return store.commit(
        EventKind.TIME_ENTRY,
        actor_id,
        {"student_id": student_id, "date": on.isoformat(), "hours": float(hours)},
        at=at,
    )


# -- deliverables --------------------------------------------------------------


def add_deliverable(store: Store, actor_id: str, group_id: str, title: str,
                    due: date, at: datetime | None = None) -> Deliverable:
    _group(store, group_id)
    require(store.state, actor_id, Action.WRITE, ResourceRef.deliverable(group_id))
    deliverable_id = store.next_id("dlv", len(store.state.deliverables))
    store.commit(
        EventKind.DELIVERABLE_ADDED,
        actor_id,
        {"deliverable_id": deliverable_id, "group_id": group_id,
         "title": title, "due": due.isoformat()},
        at=at,
    )
    return store.state.deliverables[deliverable_id]


def _resolve_deliverable(store: Store, group_id: str, deliverable_id: str) -> Deliverable:
    _group(store, group_id)
    d = store.state.deliverables.get(deliverable_id)
    if d is None or d.group_id != group_id:
        raise UnknownDeliverable(f"no deliverable {deliverable_id} in {group_id}")
    return d


def submit_deliverable(store: Store, actor_id: str, group_id: str,
                       deliverable_id: str, at: datetime | None = None) -> Deliverable:
    d = _resolve_deliverable(store, group_id, deliverable_id)
    require(store.state, actor_id, Action.WRITE, ResourceRef.deliverable(group_id))
    if not store.state.is_member(actor_id, group_id):
        raise Forbidden("only group members submit deliverables", rule_id="R8")
    if d.accepted_at is not None:
        raise AlreadyAccepted(f"{deliverable_id} was already accepted")
    store.commit(
        EventKind.DELIVERABLE_SUBMIT,
        actor_id,
        {"deliverable_id": deliverable_id, "group_id": group_id},
        at=at,
    )
    return d


def accept_deliverable(store: Store, actor_id: str, group_id: str,
                       deliverable_id: str, at: datetime | None = None) -> Deliverable:
    d = _resolve_deliverable(store, group_id, deliverable_id)
    require(store.state, actor_id, Action.WRITE, ResourceRef.deliverable(group_id))
    if not store.state.is_tutor_of(actor_id, group_id):
        raise Forbidden("only the group's tutors accept deliverables", rule_id="R8")
    if d.submitted_at is None:
        raise NotSubmitted(f"{deliverable_id} has not been submitted")
    if d.accepted_at is not None:
        raise AlreadyAccepted(f"{deliverable_id} was already accepted")
    store.commit(
        EventKind.DELIVERABLE_ACCEPT,
        actor_id,
        {"deliverable_id": deliverable_id, "group_id": group_id},
        at=at,
    )
    return d


def comment_deliverable(store: Store, actor_id: str, group_id: str,
                        deliverable_id: str, body: str,
                        at: datetime | None = None) -> Deliverable:
    d = _resolve_deliverable(store, group_id, deliverable_id)
    require(store.state, actor_id, Action.WRITE, ResourceRef.deliverable(group_id))
    group = _group(store, group_id)
    if not (store.state.is_tutor_of(actor_id, group_id) or actor_id == group.leader_id):
        raise Forbidden("deliverable comments come from tutors or the leader", rule_id="R8")
    store.commit(
        EventKind.DELIVERABLE_COMMENT,
        actor_id,
        {"deliverable_id": deliverable_id, "group_id": group_id, "body": body},
        at=at,
    )
    return d


# -- group dashboard upkeep (skills checklist) ---------------------------------


def add_skill(store: Store, actor_id: str, group_id: str, text: str,
              at: datetime | None = None) -> None:
    _group(store, group_id)
    require(store.state, actor_id, Action.WRITE, ResourceRef.group_dashboard(group_id))
    store.commit(
        EventKind.SKILLS_CHANGE,
        actor_id,
        {"action": "add", "group_id": group_id, "text": text},
        at=at,
    )


def set_skill_done(store: Store, actor_id: str, group_id: str, index: int,
                   done: bool = True, at: datetime | None = None) -> None:
    _group(store, group_id)
    require(store.state, actor_id, Action.WRITE, ResourceRef.group_dashboard(group_id))
    checklist = store.state.skills.get(group_id, [])
    if not 0 <= index < len(checklist):
        raise OutOfRange(f"no checklist item {index}")
    store.commit(
        EventKind.SKILLS_CHANGE,
        actor_id,
        {"action": "set_done", "group_id": group_id, "index": index, "done": bool(done)},
        at=at,
    )
