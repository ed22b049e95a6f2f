"""Materialized course state and the event transition function.

``apply`` is the only way state changes: live commits and replays run through
the same code path, so incremental state always equals a fresh fold over the
log. Events are trusted here (preconditions were checked before commit);
anything structurally impossible raises CorruptStore.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import date, datetime
from typing import Iterable

from .errors import CorruptStore
from .events import ActivityEvent, EventKind
from .model import (
    Actor,
    Blog,
    BlogPost,
    ContractRevision,
    ContractStatus,
    Course,
    CourseStatus,
    Deliverable,
    Dimension,
    Discussion,
    ForumMessage,
    GroupEvaluation,
    LearningContract,
    Phase,
    PhaseWindow,
    PostStatus,
    ProjectGroup,
    Role,
    SkillItem,
    SubjectStatus,
    Task,
    TaskStatus,
    TaxonomyRoot,
    TaxonomySubject,
    TimeEntry,
    TutorNote,
)

#: Fixed ids for the three taxonomy roots, created with the course.
ROOT_SUBJECT_IDS = {
    TaxonomyRoot.ROLES_AND_TASKS: "root-roles",
    TaxonomyRoot.PROJECT_CALENDAR: "root-calendar",
    TaxonomyRoot.GROUP_PROGRESS: "root-progress",
}


@dataclass
class State:
    course: Course | None = None
    actors: dict[str, Actor] = field(default_factory=dict)
    groups: dict[str, ProjectGroup] = field(default_factory=dict)
    tasks: dict[str, Task] = field(default_factory=dict)
    deliverables: dict[str, Deliverable] = field(default_factory=dict)
    time_entries: list[TimeEntry] = field(default_factory=list)
    # (student_id, period) -> score; latest entry wins.
    frame_of_mind: dict[tuple[str, str], int] = field(default_factory=dict)
    # (student_id, period) -> dimension -> accumulated item responses.
    self_reports: dict[tuple[str, str], dict[Dimension, list[int]]] = field(default_factory=dict)
    blogs: dict[str, Blog] = field(default_factory=dict)  # keyed by owner id
    taxonomy: dict[str, TaxonomySubject] = field(default_factory=dict)
    discussions: dict[str, Discussion] = field(default_factory=dict)
    contracts: dict[str, LearningContract] = field(default_factory=dict)
    evaluations: dict[str, GroupEvaluation] = field(default_factory=dict)
    skills: dict[str, list[SkillItem]] = field(default_factory=dict)
    tutor_notes: dict[str, list[TutorNote]] = field(default_factory=dict)
    # Monotone count of tutor proposals; merges delete subjects, so the live
    # subject count cannot be used to mint fresh ids.
    proposal_count: int = 0
    last_seq: int = 0

    # -- queries used across modules ------------------------------------

    def group_of_actor(self, actor_id: str) -> ProjectGroup | None:
        actor = self.actors.get(actor_id)
        if actor is None or actor.group_id is None:
            return None
        return self.groups.get(actor.group_id)

    def groups_of_tutor(self, tutor_id: str) -> list[ProjectGroup]:
        return [
            g for g in self.groups.values()
            if tutor_id in (g.technical_tutor_id, g.management_tutor_id)
        ]

    def is_member(self, actor_id: str, group_id: str) -> bool:
        g = self.groups.get(group_id)
        return g is not None and actor_id in g.member_ids

    def is_tutor_of(self, actor_id: str, group_id: str) -> bool:
        g = self.groups.get(group_id)
        return g is not None and actor_id in g.tutor_ids

    def group_tasks(self, group_id: str) -> list[Task]:
        return [t for t in self.tasks.values() if t.group_id == group_id]

    def group_deliverables(self, group_id: str) -> list[Deliverable]:
        return [d for d in self.deliverables.values() if d.group_id == group_id]


def _date(s: str) -> date:
    return date.fromisoformat(s)


def _dt(s: str) -> datetime:
    return datetime.fromisoformat(s)


def apply(state: State, ev: ActivityEvent) -> None:
    """Fold one event into the state. Mutates ``state``."""
    if ev.seq <= state.last_seq:
        raise CorruptStore(f"event seq {ev.seq} not increasing past {state.last_seq}")
    handler = _HANDLERS.get(ev.kind)
    if handler is None:
        raise CorruptStore(f"no handler for event kind {ev.kind}")
    handler(state, ev)
    state.last_seq = ev.seq


def replay(events: Iterable[ActivityEvent]) -> State:
    state = State()
    for ev in events:
        apply(state, ev)
    return state


# -- structural events --------------------------------------------------


def _course_created(state: State, ev: ActivityEvent) -> None:
    if state.course is not None:
        raise CorruptStore("second course in log")
    p = ev.payload
    calendar = [
        PhaseWindow(phase=Phase(w["phase"]), start=_date(w["start"]), end=_date(w["end"]))
        for w in p["calendar"]
    ]
    state.course = Course(
        id=p["course_id"],
        name=p["name"],
        calendar=calendar,
        status=CourseStatus.SETUP,
        created_at=ev.timestamp,
    )
    for root in TaxonomyRoot:
        sid = ROOT_SUBJECT_IDS[root]
        state.taxonomy[sid] = TaxonomySubject(
            id=sid, label=root.value, parent_id=None, root=root, status=SubjectStatus.SEED
        )


def _course_advanced(state: State, ev: ActivityEvent) -> None:
    course = state.course
    if course is None:
        raise CorruptStore("advance before course creation")
    course.status = CourseStatus(ev.payload["status"])


def _actor_registered(state: State, ev: ActivityEvent) -> None:
    p = ev.payload
    actor = Actor(id=p["actor_id"], name=p["name"], role=Role(p["role"]))
    if actor.id in state.actors:
        raise CorruptStore(f"duplicate actor {actor.id}")
    state.actors[actor.id] = actor
    blog_id = p.get("blog_id")
    if blog_id:
        state.blogs[actor.id] = Blog(id=blog_id, owner_id=actor.id)


def _group_created(state: State, ev: ActivityEvent) -> None:
    p = ev.payload
    group = ProjectGroup(
        id=p["group_id"],
        name=p["name"],
        member_ids=set(p["member_ids"]),
        leader_id=p["leader_id"],
        technical_tutor_id=p["technical_tutor_id"],
        management_tutor_id=p["management_tutor_id"],
        subject=p["subject"],
    )
    state.groups[group.id] = group
    state.skills[group.id] = []
    for member_id in group.member_ids:
        state.actors[member_id].group_id = group.id
    state.actors[group.leader_id].role = Role.PROJECT_LEADER
    for tutor_id in group.tutor_ids:
        state.actors[tutor_id].group_id = group.id
    state.blogs[group.id] = Blog(id=p["blog_id"], owner_id=group.id)
    state.taxonomy[p["progress_subject_id"]] = TaxonomySubject(
        id=p["progress_subject_id"],
        label=group.name,
        parent_id=ROOT_SUBJECT_IDS[TaxonomyRoot.GROUP_PROGRESS],
        root=TaxonomyRoot.GROUP_PROGRESS,
        status=SubjectStatus.SEED,
    )


# -- work items ----------------------------------------------------------


def _task_update(state: State, ev: ActivityEvent) -> None:
    p = ev.payload
    if p["action"] == "add":
        assignee = p.get("assignee_id")
        task = Task(
            id=p["task_id"],
            group_id=p["group_id"],
            title=p["title"],
            assignee_id=assignee,
            original_assignee_id=assignee,
            dependency_ids=set(p.get("dependency_ids", [])),
            status=TaskStatus.PLANNED,
            planned_start=_date(p["planned_start"]),
            planned_end=_date(p["planned_end"]),
            status_history=[(ev.timestamp, TaskStatus.PLANNED)],
            assignee_history=[(ev.timestamp, assignee)],
        )
        state.tasks[task.id] = task
        return
    task = state.tasks.get(p["task_id"])
    if task is None:
        raise CorruptStore(f"update for unknown task {p['task_id']}")
    changes = p["changes"]
    if "title" in changes:
        task.title = changes["title"]
    if "dependency_ids" in changes:
        task.dependency_ids = set(changes["dependency_ids"])
    if "planned_start" in changes:
        task.planned_start = _date(changes["planned_start"])
    if "planned_end" in changes:
        task.planned_end = _date(changes["planned_end"])
    if "assignee_id" in changes:
        new = changes["assignee_id"]
        if new != task.assignee_id:
            task.assignee_id = new
            task.assignee_history.append((ev.timestamp, new))
            # First ever assignment pins the original assignee for good.
            if task.original_assignee_id is None and new is not None:
                task.original_assignee_id = new
    if "status" in changes:
        new_status = TaskStatus(changes["status"])
        if new_status != task.status:
            task.status = new_status
            task.status_history.append((ev.timestamp, new_status))
            if new_status == TaskStatus.ACTIVE and task.actual_start is None:
                task.actual_start = ev.timestamp.date()
            if new_status == TaskStatus.DONE:
                task.actual_end = ev.timestamp.date()
            elif task.actual_end is not None:
                task.actual_end = None  # reopened


def _deliverable_added(state: State, ev: ActivityEvent) -> None:
    p = ev.payload
    state.deliverables[p["deliverable_id"]] = Deliverable(
        id=p["deliverable_id"], group_id=p["group_id"], title=p["title"], due=_date(p["due"])
    )


def _deliverable(state: State, ev: ActivityEvent) -> Deliverable:
    d = state.deliverables.get(ev.payload["deliverable_id"])
    if d is None:
        raise CorruptStore(f"unknown deliverable {ev.payload['deliverable_id']}")
    return d


def _deliverable_submit(state: State, ev: ActivityEvent) -> None:
    _deliverable(state, ev).submitted_at = ev.timestamp


def _deliverable_accept(state: State, ev: ActivityEvent) -> None:
    d = _deliverable(state, ev)
    d.accepted_at = ev.timestamp
    d.accepted_by = ev.actor_id


def _deliverable_comment(state: State, ev: ActivityEvent) -> None:
    _deliverable(state, ev).comment_count += 1


# -- data entry ----------------------------------------------------------


def _time_entry(state: State, ev: ActivityEvent) -> None:
    p = ev.payload
    state.time_entries.append(
        TimeEntry(student_id=p["student_id"], date=_date(p["date"]), hours=float(p["hours"]))
    )


def _frame_of_mind(state: State, ev: ActivityEvent) -> None:
    p = ev.payload
    state.frame_of_mind[(p["student_id"], p["period"])] = int(p["score"])


def _self_report(state: State, ev: ActivityEvent) -> None:
    p = ev.payload
    key = (p["student_id"], p["period"])
    bucket = state.self_reports.setdefault(key, {})
    for item in p["items"]:
        bucket.setdefault(Dimension(item["dimension"]), []).append(int(item["response"]))


# -- sharing -------------------------------------------------------------


def _blog_post(state: State, ev: ActivityEvent) -> None:
    p = ev.payload
    blog = state.blogs.get(p["blog_owner_id"])
    if blog is None:
        raise CorruptStore(f"no blog for owner {p['blog_owner_id']}")
    action = p["action"]
    if action == "publish":
        blog.posts.append(
            BlogPost(id=p["post_id"], author_id=ev.actor_id, body=p["body"],
                     created_at=ev.timestamp, status=PostStatus.PUBLISHED,
                     published_by=ev.actor_id)
        )
    elif action == "propose":
        blog.posts.append(
            BlogPost(id=p["post_id"], author_id=ev.actor_id, body=p["body"],
                     created_at=ev.timestamp, status=PostStatus.DRAFT)
        )
    elif action == "confirm":
        post = blog.find(p["post_id"])
        if post is None:
            raise CorruptStore(f"confirm for unknown post {p['post_id']}")
        post.status = PostStatus.PUBLISHED
        post.published_by = ev.actor_id
    else:
        raise CorruptStore(f"unknown blog action {action!r}")


def _forum_message(state: State, ev: ActivityEvent) -> None:
    p = ev.payload
    message = ForumMessage(author_id=ev.actor_id, body=p["body"], at=ev.timestamp)
    if p["action"] == "open":
        state.discussions[p["discussion_id"]] = Discussion(
            id=p["discussion_id"], title=p["title"], opener_id=ev.actor_id,
            tags=set(p["tags"]), messages=[message]
        )
    else:
        discussion = state.discussions.get(p["discussion_id"])
        if discussion is None:
            raise CorruptStore(f"reply to unknown discussion {p['discussion_id']}")
        discussion.messages.append(message)


def _taxonomy_change(state: State, ev: ActivityEvent) -> None:
    p = ev.payload
    action = p["action"]
    if action in ("propose", "seed"):
        parent = state.taxonomy.get(p["parent_id"])
        if parent is None:
            raise CorruptStore(f"subject under unknown parent {p['parent_id']}")
        if p["subject_id"] in state.taxonomy:
            raise CorruptStore(f"subject id {p['subject_id']} reused")
        state.taxonomy[p["subject_id"]] = TaxonomySubject(
            id=p["subject_id"], label=p["label"], parent_id=parent.id, root=parent.root,
            status=SubjectStatus.SEED if action == "seed" else SubjectStatus.PROPOSED,
        )
        if action == "propose":
            state.proposal_count += 1
    elif action == "rename":
        state.taxonomy[p["subject_id"]].label = p["label"]
    elif action == "merge":
        source_id, target_id = p["subject_id"], p["into_id"]
        target = state.taxonomy[target_id]
        for discussion in state.discussions.values():
            if source_id in discussion.tags:
                discussion.tags.discard(source_id)
                discussion.tags.add(target_id)
        for subject in state.taxonomy.values():
            if subject.parent_id == source_id:
                subject.parent_id = target_id
        removed_root = state.taxonomy.pop(source_id).root
        if removed_root != target.root:
            _refresh_roots(state, target_id)
    else:
        raise CorruptStore(f"unknown taxonomy action {action!r}")


def _refresh_roots(state: State, start_id: str) -> None:
    # Re-derive the root marker of the moved subtree.
    target_root = state.taxonomy[start_id].root
    pending = [s.id for s in state.taxonomy.values() if s.parent_id == start_id]
    while pending:
        sid = pending.pop()
        state.taxonomy[sid].root = target_root
        pending.extend(s.id for s in state.taxonomy.values() if s.parent_id == sid)


def _contract_update(state: State, ev: ActivityEvent) -> None:
    p = ev.payload
    if p["action"] == "init":
        state.contracts[p["owner_id"]] = LearningContract(
            owner_id=p["owner_id"], answers=dict(p["answers"]),
            status=ContractStatus.ACTIVE, created_at=ev.timestamp,
        )
    else:
        contract = state.contracts.get(p["owner_id"])
        if contract is None:
            raise CorruptStore(f"revision for missing contract {p['owner_id']}")
        contract.status = ContractStatus.REVISED
        contract.revision = ContractRevision(
            answers=dict(p["answers"]),
            linked_event_seqs=list(p["linked_event_seqs"]),
            revised_at=ev.timestamp,
        )


# -- evaluation / tutor annotations ---------------------------------------


def _evaluation(state: State, ev: ActivityEvent) -> None:
    p = ev.payload
    record = state.evaluations.setdefault(p["group_id"], GroupEvaluation(group_id=p["group_id"]))
    if p["scope"] == "group":
        record.group_grade = float(p["grade"])
    else:
        record.adjustments[p["student_id"]] = float(p["adjustment"])


def _skills_change(state: State, ev: ActivityEvent) -> None:
    p = ev.payload
    checklist = state.skills.setdefault(p["group_id"], [])
    if p["action"] == "add":
        checklist.append(SkillItem(text=p["text"]))
    else:
        checklist[int(p["index"])].done = bool(p["done"])


def _tutor_note(state: State, ev: ActivityEvent) -> None:
    p = ev.payload
    state.tutor_notes.setdefault(p["tutor_id"], []).append(
        TutorNote(at=ev.timestamp, group_id=p["group_id"], text=p["text"])
    )


_HANDLERS = {
    EventKind.COURSE_CREATED: _course_created,
    EventKind.COURSE_ADVANCED: _course_advanced,
    EventKind.ACTOR_REGISTERED: _actor_registered,
    EventKind.GROUP_CREATED: _group_created,
    EventKind.TASK_UPDATE: _task_update,
    EventKind.DELIVERABLE_ADDED: _deliverable_added,
    EventKind.DELIVERABLE_SUBMIT: _deliverable_submit,
    EventKind.DELIVERABLE_ACCEPT: _deliverable_accept,
    EventKind.DELIVERABLE_COMMENT: _deliverable_comment,
    EventKind.TIME_ENTRY: _time_entry,
    EventKind.FRAME_OF_MIND: _frame_of_mind,
    EventKind.SELF_REPORT: _self_report,
    EventKind.BLOG_POST: _blog_post,
    EventKind.FORUM_MESSAGE: _forum_message,
    EventKind.TAXONOMY_CHANGE: _taxonomy_change,
    EventKind.CONTRACT_UPDATE: _contract_update,
    EventKind.EVALUATION: _evaluation,
    EventKind.SKILLS_CHANGE: _skills_change,
    EventKind.TUTOR_NOTE: _tutor_note,
}


# -- whole-state invariant audit ------------------------------------------


def validate_state(state: State) -> None:
    """Check every domain invariant; raises CorruptStore on violation.

    Run after imports and replay-prefix checks; not on the hot path.
    """
    course = state.course
    if course is not None:
        if len(course.calendar) != 4:
            raise CorruptStore("calendar must have exactly 4 phases")
        for i, window in enumerate(course.calendar):
            if window.start >= window.end:
                raise CorruptStore(f"phase {window.phase} starts after it ends")
            if window.phase != list(Phase)[i]:
                raise CorruptStore("phases out of order")
            if i and course.calendar[i - 1].end >= window.start:
                raise CorruptStore("overlapping phase windows")

    for group in state.groups.values():
        if group.leader_id not in group.member_ids:
            raise CorruptStore(f"leader outside member set in {group.id}")
        if len(group.member_ids) < 2:
            raise CorruptStore(f"group {group.id} below minimum size")
        if group.technical_tutor_id == group.management_tutor_id:
            raise CorruptStore(f"duplicate tutor in {group.id}")
        for tutor_id in group.tutor_ids:
            if tutor_id in group.member_ids:
                raise CorruptStore(f"tutor {tutor_id} is a member of {group.id}")
        for member_id in group.member_ids:
            if state.actors[member_id].group_id != group.id:
                raise CorruptStore(f"member {member_id} not bound to {group.id}")

    for task in state.tasks.values():
        if task.actual_start and task.actual_end and task.actual_start > task.actual_end:
            raise CorruptStore(f"task {task.id} ends before it starts")
    _check_acyclic(state)

    for d in state.deliverables.values():
        if d.accepted_at is not None:
            if d.submitted_at is None or d.accepted_at < d.submitted_at:
                raise CorruptStore(f"deliverable {d.id} accepted before submission")

    students = {a.id for a in state.actors.values()
                if a.role in (Role.STUDENT, Role.PROJECT_LEADER)}
    expected_blogs = students | set(state.groups)
    if set(state.blogs) != expected_blogs:
        raise CorruptStore("blog set does not match students + groups")

    for group in state.groups.values():
        blog = state.blogs[group.id]
        for post in blog.posts:
            if post.status == PostStatus.PUBLISHED and post.published_by != group.leader_id:
                raise CorruptStore(f"group post {post.id} published by non-leader")
    for owner_id in students:
        for post in state.blogs[owner_id].posts:
            if post.status != PostStatus.PUBLISHED or post.author_id != owner_id:
                raise CorruptStore(f"personal post {post.id} breaks ownership rules")

    from .model import FORUM_WRITE_ROLES

    for discussion in state.discussions.values():
        if not discussion.tags:
            raise CorruptStore(f"discussion {discussion.id} has no tags")
        for message in discussion.messages:
            author = state.actors.get(message.author_id)
            if author is None or author.role not in FORUM_WRITE_ROLES:
                raise CorruptStore(
                    f"non-tutor {message.author_id} authored in {discussion.id}")

    roots = [s for s in state.taxonomy.values() if s.parent_id is None]
    if state.course is not None and len(roots) != 3:
        raise CorruptStore(f"taxonomy has {len(roots)} roots")
    _check_taxonomy(state)

    for (_, _), score in state.frame_of_mind.items():
        if not 1 <= score <= 5:
            raise CorruptStore("frame-of-mind score out of range")
    for entry in state.time_entries:
        if not 0 <= entry.hours <= 24:
            raise CorruptStore("time entry out of range")
    for record in state.evaluations.values():
        if record.group_grade is not None and not 0 <= record.group_grade <= 20:
            raise CorruptStore("group grade out of range")
        for adj in record.adjustments.values():
            if abs(adj) > 2:
                raise CorruptStore("adjustment out of range")
    if state.course is not None and state.course.status != CourseStatus.CLOSED:
        for contract in state.contracts.values():
            if contract.status != ContractStatus.ACTIVE:
                raise CorruptStore("revised contract while course open")


def _check_acyclic(state: State) -> None:
    import graphlib

    by_group: dict[str, dict[str, set[str]]] = {}
    for task in state.tasks.values():
        by_group.setdefault(task.group_id, {})[task.id] = set(task.dependency_ids)
    for group_id, graph in by_group.items():
        sorter = graphlib.TopologicalSorter(graph)
        try:
            sorter.prepare()
        except graphlib.CycleError:
            raise CorruptStore(f"dependency cycle in group {group_id}") from None


def _check_taxonomy(state: State) -> None:
    for subject in state.taxonomy.values():
        seen = {subject.id}
        cursor = subject
        while cursor.parent_id is not None:
            if cursor.parent_id in seen:
                raise CorruptStore("taxonomy cycle")
            parent = state.taxonomy.get(cursor.parent_id)
            if parent is None:
                raise CorruptStore(f"dangling parent {cursor.parent_id}")
            seen.add(parent.id)
            cursor = parent
        if cursor.root != subject.root:
            raise CorruptStore(f"subject {subject.id} carries the wrong tree marker")
    siblings: dict[tuple[str | None, str], str] = {}
    for subject in state.taxonomy.values():
        key = (subject.parent_id, subject.label)
        if key in siblings:
            raise CorruptStore(f"duplicate sibling label {subject.label!r}")
        siblings[key] = subject.id
