"""Dashboards computed as pure functions of the event log.

All compute_* functions take a :class:`~pblhub.store.Snapshot` and are
deterministic at a fixed seq. The teamwork ratios are defined as auditable
counts over the period's events; any ratio whose measurement basis is empty
is reported as 1.0 (vacuously satisfied) and flagged in ``no_data`` so a UI
can render it distinctly.

Definitions (one ISO week per reporting period, ``as_of`` defaulting to the
period's Sunday):

  activity score   accepted deliverables due so far / deliverables due so far
                   (cumulative to as_of)
  team orientation members with at least one event in the period / group size;
                   no member event at all in the period counts as "no data"
  team leadership  tasks active in the period that have an assignee at period
                   end / tasks active in the period
  monitoring       tasks active in the period with a status change in the
                   period / tasks active in the period
  feedback         min(1, deliverable comments in period / deliverable
                   submissions in period)
  back-up          reassigned tasks now Done / tasks ever reassigned
                   (cumulative to as_of; a reassignment is a change from one
                   assignee to a different one)
  coordination     started tasks whose dependencies were all Done at their
                   first activation / started tasks that have dependencies
                   (cumulative to as_of)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from datetime import date, datetime, time, timezone
from typing import Any

from .errors import (
    AdjustmentOutOfRange,
    Forbidden,
    GradeOutOfRange,
    GroupNotGraded,
    OutOfRange,
    UnknownActor,
    UnknownGroup,
    UnknownPrompt,
)
from .events import EventKind
from .model import (
    CourseStatus,
    Dimension,
    GroupEvaluation,
    PostStatus,
    ProjectGroup,
    Task,
    TaskStatus,
    TUTOR_ROLES,
)
from .policy import Action, ResourceRef, require
from .store import Snapshot, Store
from .weeks import parse_period, period_bounds, previous_period, week_of

INDICATOR_NAMES = (
    "activity_score",
    "team_orientation",
    "team_leadership",
    "monitoring",
    "feedback",
    "backup",
    "coordination",
)


# -- result types -------------------------------------------------------------


@dataclass
class WorkingTime:
    per_member_period: dict[str, float]
    per_member_cumulative: dict[str, float]
    total_period: float
    total_cumulative: float


@dataclass
class DeliverableRow:
    id: str
    title: str
    due: date
    status: str  # Pending | Submitted | Accepted, as of the reference day
    submitted_at: datetime | None
    delay_days: int


@dataclass
class ProjectDashboard:
    group_id: str
    period: str
    frame_of_mind: float | None
    skills_checklist: list[tuple[str, bool]]
    working_time: WorkingTime
    open_tasks: dict[str, int]
    deliverables_due: list[DeliverableRow]
    total_delay_days: int

    def to_doc(self) -> dict[str, Any]:
        return {
            "group_id": self.group_id,
            "period": self.period,
            "frame_of_mind": self.frame_of_mind,
            "skills_checklist": [{"text": t, "done": d} for t, d in self.skills_checklist],
            "working_time": {
                "per_member_period": dict(sorted(self.working_time.per_member_period.items())),
                "per_member_cumulative": dict(sorted(self.working_time.per_member_cumulative.items())),
                "total_period": self.working_time.total_period,
                "total_cumulative": self.working_time.total_cumulative,
            },
            "open_tasks": self.open_tasks,
            "deliverables_due": [
                {
                    "id": r.id,
                    "title": r.title,
                    "due": r.due.isoformat(),
                    "status": r.status,
                    "submitted_at": r.submitted_at.isoformat() if r.submitted_at else None,
                    "delay_days": r.delay_days,
                }
                for r in self.deliverables_due
            ],
            "total_delay_days": self.total_delay_days,
        }


@dataclass
class TeamworkIndicators:
    group_id: str
    period: str
    activity_score: float
    team_orientation: float
    team_leadership: float
    monitoring: float
    feedback: float
    backup: float
    coordination: float
    no_data: set[str] = field(default_factory=set)

    def values(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in INDICATOR_NAMES}

    def to_doc(self) -> dict[str, Any]:
        doc: dict[str, Any] = {"group_id": self.group_id, "period": self.period}
        doc.update(self.values())
        doc["no_data"] = sorted(self.no_data)
        return doc


@dataclass
class MetacognitiveProfile:
    student_id: str
    # period -> dimension value -> mean response, present iff >=1 item answered
    periods: dict[str, dict[str, float]]
    # dimension value -> latest minus previous consecutive week, or None
    trends: dict[str, float | None]

    def to_doc(self) -> dict[str, Any]:
        return {
            "student_id": self.student_id,
            "periods": {p: dict(sorted(v.items())) for p, v in sorted(self.periods.items())},
            "trends": self.trends,
        }


@dataclass
class EvaluationView:
    group_id: str
    group_grade: float | None
    adjustments: dict[str, float]
    individual_grades: dict[str, float]

    def to_doc(self) -> dict[str, Any]:
        return {
            "group_id": self.group_id,
            "group_grade": self.group_grade,
            "adjustments": dict(sorted(self.adjustments.items())),
            "individual_grades": dict(sorted(self.individual_grades.items())),
        }


@dataclass
class LearningMonitoringView:
    tutor_id: str
    period: str
    groups: list[dict[str, Any]]

    def to_doc(self) -> dict[str, Any]:
        return {"tutor_id": self.tutor_id, "period": self.period, "groups": self.groups}


# -- helpers -------------------------------------------------------------------


def _group(snap: Snapshot, group_id: str) -> ProjectGroup:
    group = snap.state.groups.get(group_id)
    if group is None:
        raise UnknownGroup(f"no group {group_id}")
    return group


def _end_of_day(d: date) -> datetime:
    return datetime.combine(d, time.max, tzinfo=timezone.utc)


def _status_at(task: Task, instant: datetime) -> TaskStatus | None:
    """Status the task held at ``instant``; None if not yet created."""
    status = None
    for ts, st in task.status_history:
        if ts <= instant:
            status = st
        else:
            break
    return status


def _assignee_at(task: Task, instant: datetime) -> str | None:
    assignee = None
    for ts, who in task.assignee_history:
        if ts <= instant:
            assignee = who
        else:
            break
    return assignee


def _active_in(task: Task, start: datetime, end: datetime) -> bool:
    """True iff the task held Active status at any instant of [start, end]."""
    if not task.status_history or task.status_history[0][0] > end:
        return False
    entering = _status_at(task, start)
    if entering == TaskStatus.ACTIVE:
        return True
    return any(
        st == TaskStatus.ACTIVE and start <= ts <= end
        for ts, st in task.status_history
    )


def _reassignments(task: Task) -> list[datetime]:
    """Timestamps of changes from one assignee to a different one."""
    out = []
    previous: str | None = None
    for ts, who in task.assignee_history:
        if previous is not None and who is not None and who != previous:
            out.append(ts)
        if who is not None:
            previous = who
    return out


# -- project dashboard -----------------------------------------------------------


def compute_project_dashboard(snap: Snapshot, group_id: str, period: str,
                              as_of: date | None = None) -> ProjectDashboard:
    """The group's weekly monitoring dashboard.

    Work quantities are period-scoped (plus running cumulative totals up to
    the end of the period); the skills checklist and task counts reflect the
    snapshot head, which is part of the function's input.
    """
    group = _group(snap, group_id)
    parse_period(period)
    monday, sunday = period_bounds(period)
    if as_of is None:
        as_of = sunday
    as_of_ts = _end_of_day(as_of)

    scores = [
        snap.state.frame_of_mind[(m, period)]
        for m in sorted(group.member_ids)
        if (m, period) in snap.state.frame_of_mind
    ]
    frame = math.fsum(scores) / len(scores) if scores else None

    per_period: dict[str, float] = {}
    per_cumulative: dict[str, float] = {}
    for member_id in sorted(group.member_ids):
        in_period = [e.hours for e in snap.state.time_entries
                     if e.student_id == member_id and monday <= e.date <= sunday]
        cumulative = [e.hours for e in snap.state.time_entries
                      if e.student_id == member_id and e.date <= sunday]
        per_period[member_id] = math.fsum(in_period)
        per_cumulative[member_id] = math.fsum(cumulative)
    working = WorkingTime(
        per_member_period=per_period,
        per_member_cumulative=per_cumulative,
        total_period=math.fsum(per_period.values()),
        total_cumulative=math.fsum(per_cumulative.values()),
    )

    open_tasks = {status.value: 0 for status in TaskStatus}
    for task in snap.state.group_tasks(group_id):
        open_tasks[task.status.value] += 1

    rows: list[DeliverableRow] = []
    delay_total = 0
    for d in sorted(snap.state.group_deliverables(group_id), key=lambda d: d.id):
        submitted = d.submitted_at if d.submitted_at and d.submitted_at <= as_of_ts else None
        accepted = d.accepted_at if d.accepted_at and d.accepted_at <= as_of_ts else None
        status = "Accepted" if accepted else ("Submitted" if submitted else "Pending")
        reference = submitted.date() if submitted else as_of
        delay = max(0, (reference - d.due).days)
        rows.append(DeliverableRow(id=d.id, title=d.title, due=d.due, status=status,
                                   submitted_at=submitted, delay_days=delay))
        delay_total += delay

    return ProjectDashboard(
        group_id=group_id,
        period=period,
        frame_of_mind=frame,
        skills_checklist=[(s.text, s.done) for s in snap.state.skills.get(group_id, [])],
        working_time=working,
        open_tasks=open_tasks,
        deliverables_due=rows,
        total_delay_days=delay_total,
    )


# -- teamwork indicators -----------------------------------------------------------


def _ratio(numerator: int, denominator: int, flags: set[str], name: str) -> float:
    if denominator == 0:
        flags.add(name)
        return 1.0
    return numerator / denominator


def compute_teamwork_indicators(snap: Snapshot, group_id: str, period: str) -> TeamworkIndicators:
    group = _group(snap, group_id)
    monday, sunday = period_bounds(period)
    period_start = datetime.combine(monday, time.min, tzinfo=timezone.utc)
    period_end = _end_of_day(sunday)
    flags: set[str] = set()

    deliverables = snap.state.group_deliverables(group_id)
    due_so_far = [d for d in deliverables if d.due <= sunday]
    accepted = [d for d in due_so_far if d.accepted_at and d.accepted_at <= period_end]
    activity = _ratio(len(accepted), len(due_so_far), flags, "activity_score")

    active_members = {
        ev.actor_id
        for ev in snap.events
        if ev.actor_id in group.member_ids and monday <= ev.timestamp.date() <= sunday
    }
    if not active_members:
        flags.add("team_orientation")
        orientation = 1.0
    else:
        orientation = len(active_members) / len(group.member_ids)

    tasks = snap.state.group_tasks(group_id)
    active_tasks = [t for t in tasks if _active_in(t, period_start, period_end)]
    with_assignee = [t for t in active_tasks if _assignee_at(t, period_end) is not None]
    leadership = _ratio(len(with_assignee), len(active_tasks), flags, "team_leadership")

    touched = [
        t for t in active_tasks
        if any(period_start <= ts <= period_end for ts, _ in t.status_history[1:])
    ]
    monitoring = _ratio(len(touched), len(active_tasks), flags, "monitoring")

    comments = sum(
        1 for ev in snap.events
        if ev.kind == EventKind.DELIVERABLE_COMMENT
        and ev.payload.get("group_id") == group_id
        and monday <= ev.timestamp.date() <= sunday
    )
    submissions = sum(
        1 for ev in snap.events
        if ev.kind == EventKind.DELIVERABLE_SUBMIT
        and ev.payload.get("group_id") == group_id
        and monday <= ev.timestamp.date() <= sunday
    )
    if submissions == 0:
        flags.add("feedback")
        feedback = 1.0
    else:
        feedback = min(1.0, comments / submissions)

    reassigned = [t for t in tasks
                  if any(ts <= period_end for ts in _reassignments(t))]
    completed = [t for t in reassigned if _status_at(t, period_end) == TaskStatus.DONE]
    backup = _ratio(len(completed), len(reassigned), flags, "backup")

    started_with_deps = [
        t for t in tasks
        if t.dependency_ids
        and t.first_activation() is not None
        and t.first_activation() <= period_end
    ]
    coordinated = []
    for task in started_with_deps:
        started_at = task.first_activation()
        deps_done = all(
            (dep := snap.state.tasks.get(dep_id)) is not None
            and _status_at(dep, started_at) == TaskStatus.DONE
            for dep_id in task.dependency_ids
        )
        if deps_done:
            coordinated.append(task)
    coordination = _ratio(len(coordinated), len(started_with_deps), flags, "coordination")

    return TeamworkIndicators(
        group_id=group_id,
        period=period,
        activity_score=activity,
        team_orientation=orientation,
        team_leadership=leadership,
        monitoring=monitoring,
        feedback=feedback,
        backup=backup,
        coordination=coordination,
        no_data=flags,
    )


# -- metacognitive profile -----------------------------------------------------------


def compute_metacognitive_profile(snap: Snapshot, student_id: str) -> MetacognitiveProfile:
    if student_id not in snap.state.actors:
        raise UnknownActor(f"no actor {student_id}")
    periods: dict[str, dict[str, float]] = {}
    for (sid, period), by_dim in snap.state.self_reports.items():
        if sid != student_id:
            continue
        periods[period] = {
            dim.value: math.fsum(values) / len(values)
            for dim, values in by_dim.items()
            if values
        }
    trends: dict[str, float | None] = {}
    ordered = sorted(periods)
    for dim in Dimension:
        trend = None
        scored = [p for p in ordered if dim.value in periods[p]]
        if scored:
            latest = scored[-1]
            prev = previous_period(latest)
            if prev in periods and dim.value in periods[prev]:
                trend = periods[latest][dim.value] - periods[prev][dim.value]
        trends[dim.value] = trend
    return MetacognitiveProfile(student_id=student_id, periods=periods, trends=trends)


# -- data entry ops -----------------------------------------------------------


def record_frame_of_mind(store: Store, actor_id: str, student_id: str, period: str,
                         score: int, at: datetime | None = None):
    """1-5 mood self-report; the latest entry for a period wins."""
    if student_id not in store.state.actors:
        raise UnknownActor(f"no actor {student_id}")
    require(store.state, actor_id, Action.WRITE, ResourceRef.time_stream(student_id))
    parse_period(period)
    if not isinstance(score, int) or isinstance(score, bool) or not 1 <= score <= 5:
        raise OutOfRange(f"frame-of-mind score must be an integer 1..5, got {score!r}")
    return store.commit(
        EventKind.FRAME_OF_MIND,
        actor_id,
        {"student_id": student_id, "period": period, "score": score},
        at=at,
    )


def record_self_report(store: Store, actor_id: str, student_id: str, period: str,
                       items: list[dict], at: datetime | None = None):
    """Store questionnaire responses; items accumulate within the period."""
    if student_id not in store.state.actors:
        raise UnknownActor(f"no actor {student_id}")
    require(store.state, actor_id, Action.WRITE, ResourceRef.metacog(student_id))
    parse_period(period)
    if not items:
        raise OutOfRange("a self-report needs at least one item")
    payload_items = []
    for item in items:
        dim = Dimension(item["dimension"])
        prompt = str(item["prompt"])
        if not store.questionnaire.knows(dim, prompt):
            raise UnknownPrompt(f"{prompt!r} is not in the {dim.value} questionnaire")
        response = item["response"]
        if not isinstance(response, int) or isinstance(response, bool) or not 1 <= response <= 5:
            raise OutOfRange(f"responses are integers 1..5, got {response!r}")
        payload_items.append({"dimension": dim.value, "prompt": prompt, "response": response})
    return store.commit(
        EventKind.SELF_REPORT,
        actor_id,
        {"student_id": student_id, "period": period, "items": payload_items},
        at=at,
    )


# -- evaluation -----------------------------------------------------------


def _evaluation_preconditions(store: Store, actor_id: str, group_id: str) -> None:
    course = store.state.course
    if course is None or course.status == CourseStatus.SETUP:
        raise Forbidden("evaluation opens once the course is running", rule_id="R8")
    require(store.state, actor_id, Action.WRITE, ResourceRef.evaluation(group_id))
    if not store.state.is_tutor_of(actor_id, group_id):
        raise Forbidden("only the group's tutors evaluate", rule_id="R8")


def evaluate_group(store: Store, actor_id: str, group_id: str, grade: float,
                   at: datetime | None = None) -> EvaluationView:
    if group_id not in store.state.groups:
        raise UnknownGroup(f"no group {group_id}")
    _evaluation_preconditions(store, actor_id, group_id)
    if math.isnan(grade) or not 0 <= grade <= 20:
        raise GradeOutOfRange(f"group grade must be within 0..20, got {grade!r}")
    store.commit(
        EventKind.EVALUATION,
        actor_id,
        {"scope": "group", "group_id": group_id, "grade": float(grade)},
        at=at,
    )
    return evaluation_view(store.current(), group_id)


def evaluate_student(store: Store, actor_id: str, student_id: str, adjustment: float,
                     at: datetime | None = None) -> EvaluationView:
    """Individual grade = group grade + adjustment, |adjustment| <= 2,
    clamped to the 0..20 scale afterwards."""
    group = store.state.group_of_actor(student_id)
    if group is None:
        raise UnknownGroup(f"{student_id} belongs to no group")
    _evaluation_preconditions(store, actor_id, group.id)
    if math.isnan(adjustment) or abs(adjustment) > 2:
        raise AdjustmentOutOfRange(f"adjustment must stay within [-2, +2], got {adjustment!r}")
    record = store.state.evaluations.get(group.id)
    if record is None or record.group_grade is None:
        raise GroupNotGraded(f"grade group {group.id} before adjusting individuals")
    store.commit(
        EventKind.EVALUATION,
        actor_id,
        {"scope": "student", "group_id": group.id, "student_id": student_id,
         "adjustment": float(adjustment)},
        at=at,
    )
    return evaluation_view(store.current(), group.id)


def evaluation_view(snap: Snapshot, group_id: str) -> EvaluationView:
    _group(snap, group_id)
    record = snap.state.evaluations.get(group_id) or GroupEvaluation(group_id=group_id)
    individuals = {
        student_id: grade
        for student_id in record.adjustments
        if (grade := record.individual_grade(student_id)) is not None
    }
    return EvaluationView(
        group_id=group_id,
        group_grade=record.group_grade,
        adjustments=dict(record.adjustments),
        individual_grades=individuals,
    )


# -- the tutors' monitoring view -----------------------------------------------------------


def _headline(body: str, limit: int = 80) -> str:
    first = body.strip().splitlines()[0] if body.strip() else ""
    return first if len(first) <= limit else first[: limit - 1] + "…"


def compute_learning_view(snap: Snapshot, tutor_id: str,
                          period: str | None = None) -> LearningMonitoringView:
    """Everything a tutor monitors, recomputed on read: per-group teamwork
    indicators, dashboard summary, member reflective summaries and recent
    blog headlines. Both tutors of a group see the same content."""
    actor = snap.state.actors.get(tutor_id)
    if actor is None:
        raise UnknownActor(f"no actor {tutor_id}")
    if actor.role not in TUTOR_ROLES:
        raise Forbidden("the monitoring view belongs to tutors", rule_id="R8")
    if period is None:
        last = snap.events[-1].timestamp.date() if snap.events else date.today()
        period = week_of(last)
    groups = []
    for group in sorted(snap.state.groups_of_tutor(tutor_id), key=lambda g: g.id):
        indicators = compute_teamwork_indicators(snap, group.id, period)
        dashboard = compute_project_dashboard(snap, group.id, period)
        students = []
        for member_id in sorted(group.member_ids):
            profile = compute_metacognitive_profile(snap, member_id)
            latest = max(profile.periods) if profile.periods else None
            students.append(
                {
                    "student_id": member_id,
                    "name": snap.state.actors[member_id].name,
                    "latest_period": latest,
                    "scores": profile.periods.get(latest, {}) if latest else {},
                    "trends": profile.trends,
                }
            )
        posts = []
        for owner in [group.id, *sorted(group.member_ids)]:
            blog = snap.state.blogs.get(owner)
            if blog is None:
                continue
            for post in blog.posts:
                if post.status == PostStatus.PUBLISHED:
                    posts.append((post.created_at, owner, _headline(post.body)))
        posts.sort(key=lambda item: item[0], reverse=True)
        notes = [
            {"at": note.at.isoformat(), "group_id": note.group_id, "text": note.text}
            for note in snap.state.tutor_notes.get(tutor_id, [])
            if note.group_id == group.id
        ]
        groups.append(
            {
                "group_id": group.id,
                "name": group.name,
                "indicators": indicators.to_doc(),
                "dashboard": dashboard.to_doc(),
                "students": students,
                "recent_posts": [
                    {"at": at.isoformat(), "blog_owner": owner, "headline": headline}
                    for at, owner, headline in posts[:5]
                ],
                "notes": notes,
            }
        )
    return LearningMonitoringView(tutor_id=tutor_id, period=period, groups=groups)


def annotate_tutor_view(store: Store, actor_id: str, tutor_id: str, group_id: str,
                        text: str, at: datetime | None = None):
    """Free-text note a tutor pins to one of their groups on their own view."""
    if tutor_id not in store.state.actors:
        raise UnknownActor(f"no actor {tutor_id}")
    require(store.state, actor_id, Action.WRITE, ResourceRef.tutor_view(tutor_id))
    if not store.state.is_tutor_of(tutor_id, group_id):
        raise UnknownGroup(f"{tutor_id} does not monitor {group_id}")
    return store.commit(
        EventKind.TUTOR_NOTE,
        actor_id,
        {"tutor_id": tutor_id, "group_id": group_id, "text": text},
        at=at,
    )


# -- snapshot export -----------------------------------------------------------


def dashboard_snapshot(snap: Snapshot, group_id: str, period: str) -> dict[str, Any]:
    """Diff-friendly document with every dashboard and indicator field."""
    return {
        "seq": snap.seq,
        "project_dashboard": compute_project_dashboard(snap, group_id, period).to_doc(),
        "teamwork_indicators": compute_teamwork_indicators(snap, group_id, period).to_doc(),
    }
