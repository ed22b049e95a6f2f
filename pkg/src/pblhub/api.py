"""HTTP JSON API.

Every mutation funnels through the store's single append point; every
resource-scoped route consults the access policy before touching anything.
Errors come back as ``{code, rule_id?, message}`` with a status from the map
below. Clients poll; nothing is pushed.
"""

from __future__ import annotations

import secrets
from dataclasses import dataclass
from datetime import date, datetime, timedelta, timezone
from typing import Any

from fastapi import Depends, FastAPI, Query, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import core, indicators, policy, sharing
from .config import ServiceConfig
from .errors import AuthRequired, DomainError, Forbidden, UnknownActor
from .policy import Action, ResourceRef
from .store import Store
from .weeks import week_of

_STATUS = {
    "Forbidden": 403,
    "UnknownActor": 404, "UnknownGroup": 404, "UnknownTask": 404,
    "UnknownDeliverable": 404, "UnknownPost": 404, "UnknownDiscussion": 404,
    "UnknownTag": 404, "UnknownParent": 404, "UnknownResource": 404,
    "NoCourse": 404,
    "AlreadyExists": 409, "AlreadyPublished": 409, "AlreadyClosed": 409,
    "AlreadyAccepted": 409, "AlreadyGrouped": 409, "StoreNotEmpty": 409,
    "DuplicateActor": 409, "DuplicateTutor": 409, "DuplicateLabel": 409,
    "ContractLocked": 409, "CourseNotInSetup": 409, "ProtectedSubject": 409,
}
_DEFAULT_STATUS = 422  # validation-style failures


class SessionRequest(BaseModel):
    actor_id: str


class SkillRequest(BaseModel):
    action: str
    text: str | None = None
    index: int | None = None
    done: bool = True


class TaskRequest(BaseModel):
    task_id: str | None = None
    title: str | None = None
    planned_start: date | None = None
    planned_end: date | None = None
    assignee_id: str | None = None
    dependency_ids: list[str] | None = None
    status: str | None = None
    changes: dict[str, Any] | None = None


class DeliverableRequest(BaseModel):
    title: str
    due: date


class CommentRequest(BaseModel):
    body: str


class TimeRequest(BaseModel):
    date: date
    hours: float


class MoodRequest(BaseModel):
    period: str
    score: int


class SelfReportRequest(BaseModel):
    period: str
    items: list[dict]


class PostRequest(BaseModel):
    body: str


class DiscussionRequest(BaseModel):
    title: str
    body: str
    tags: list[str]


class TaxonomyRequest(BaseModel):
    action: str = "propose"
    parent_id: str | None = None
    label: str | None = None
    subject_id: str | None = None
    into_id: str | None = None


class ContractRequest(BaseModel):
    answers: dict[str, str]


class ReviseRequest(BaseModel):
    answers: dict[str, str]
    linked_event_seqs: list[int] = Field(default_factory=list)


class GradeRequest(BaseModel):
    grade: float


class AdjustmentRequest(BaseModel):
    adjustment: float


class NoteRequest(BaseModel):
    group_id: str
    text: str


@dataclass
class ApiSession:
    token: str
    actor_id: str
    expires_at: datetime


class SessionRegistry:
    """Pre-provisioned accounts only: a session binds a token to one actor."""

    def __init__(self, store: Store, ttl_s: int):
        self.store = store
        self.ttl_s = ttl_s
        self._sessions: dict[str, ApiSession] = {}

    def open(self, actor_id: str) -> ApiSession:
        if actor_id not in self.store.state.actors:
            raise UnknownActor(f"no actor {actor_id}")
        session = ApiSession(
            token=secrets.token_urlsafe(24),
            actor_id=actor_id,
            expires_at=datetime.now(timezone.utc) + timedelta(seconds=self.ttl_s),
        )
        self._sessions[session.token] = session
        return session

    def resolve(self, token: str | None) -> str:
        if not token:
            raise AuthRequired("missing bearer token")
        session = self._sessions.get(token)
        if session is None:
            raise AuthRequired("unknown session token")
        if session.expires_at <= datetime.now(timezone.utc):
            del self._sessions[session.token]
            raise AuthRequired("session expired")
        return session.actor_id


def create_app(store: Store, config: ServiceConfig | None = None) -> FastAPI:
    config = config or ServiceConfig()
    app = FastAPI(title="pblhub", version="0.1.0")
    sessions = SessionRegistry(store, config.token_ttl_s)

    @app.exception_handler(DomainError)
    async def domain_error_handler(_: Request, exc: DomainError):
        body: dict[str, Any] = {"code": exc.code, "message": exc.message}
        if isinstance(exc, Forbidden):
            body["rule_id"] = exc.rule_id
        status = 401 if isinstance(exc, AuthRequired) \
            else _STATUS.get(exc.code, _DEFAULT_STATUS)
        return JSONResponse(status_code=status, content=body)

    def caller(request: Request) -> str:
        header = request.headers.get("authorization", "")
        token = header.removeprefix("Bearer ").strip() if header else None
        return sessions.resolve(token)

    def read_gate(actor_id: str, ref: ResourceRef) -> None:
        policy.require(store.state, actor_id, Action.READ, ref)

    # -- session / course ---------------------------------------------------

    @app.get("/api/health")
    def health():
        return {"status": "ok", "seq": store.seq}

    @app.get("/api/actors")
    def actors():
        return [
            {"id": a.id, "name": a.name, "role": a.role.value, "group_id": a.group_id}
            for a in sorted(store.state.actors.values(), key=lambda a: a.id)
        ]

    @app.post("/api/session")
    def open_session(body: SessionRequest):
        session = sessions.open(body.actor_id)
        actor = store.state.actors[session.actor_id]
        return {
            "token": session.token,
            "actor_id": session.actor_id,
            "role": actor.role.value,
            "group_id": actor.group_id,
            "expires_at": session.expires_at.isoformat(),
            "poll_interval_s": config.poll_interval_s,
        }

    @app.get("/api/course")
    def course_info(actor_id: str = Depends(caller)):
        with store.lock:
            course = store.state.course
            if course is None:
                from .errors import NoCourse
                raise NoCourse("no course yet")
            return {
                "id": course.id,
                "name": course.name,
                "status": course.status.value,
                "calendar": [
                    {"phase": w.phase.value, "start": w.start.isoformat(),
                     "end": w.end.isoformat()}
                    for w in course.calendar
                ],
                "seq": store.seq,
            }

    @app.post("/api/course/advance")
    def advance(actor_id: str = Depends(caller)):
        with store.lock:
            course = core.advance_course(store, actor_id)
            return {"status": course.status.value, "seq": store.seq}

    # -- group dashboard ------------------------------------------------------

    def _period_or_latest(period: str | None) -> str:
        if period:
            return period
        events = store.events
        last = events[-1].timestamp.date() if events else date.today()
        return week_of(last)

    @app.get("/api/groups/{group_id}/dashboard")
    def group_dashboard(group_id: str, period: str | None = None,
                        actor_id: str = Depends(caller)):
        with store.lock:
            read_gate(actor_id, ResourceRef.group_dashboard(group_id))
            snap = store.current()
            return indicators.dashboard_snapshot(snap, group_id, _period_or_latest(period))

    @app.post("/api/groups/{group_id}/dashboard")
    def group_dashboard_write(group_id: str, body: SkillRequest,
                              actor_id: str = Depends(caller)):
        with store.lock:
            if body.action == "add_skill":
                core.add_skill(store, actor_id, group_id, body.text or "")
            elif body.action == "set_skill_done":
                core.set_skill_done(store, actor_id, group_id, int(body.index or 0), body.done)
            else:
                from .errors import OutOfRange
                raise OutOfRange(f"unknown dashboard action {body.action!r}")
            return {"seq": store.seq}

    # -- tasks ------------------------------------------------------------------

    def _task_doc(t) -> dict[str, Any]:
        return {
            "id": t.id, "group_id": t.group_id, "title": t.title,
            "assignee_id": t.assignee_id,
            "original_assignee_id": t.original_assignee_id,
            "dependency_ids": sorted(t.dependency_ids),
            "status": t.status.value,
            "planned_start": t.planned_start.isoformat(),
            "planned_end": t.planned_end.isoformat(),
            "actual_start": t.actual_start.isoformat() if t.actual_start else None,
            "actual_end": t.actual_end.isoformat() if t.actual_end else None,
            "status_history": [
                {"at": ts.isoformat(), "status": s.value} for ts, s in t.status_history
            ],
        }

    @app.get("/api/groups/{group_id}/tasks")
    def list_tasks(group_id: str, actor_id: str = Depends(caller)):
        with store.lock:
            read_gate(actor_id, ResourceRef.task(group_id))
            tasks = sorted(store.state.group_tasks(group_id), key=lambda t: t.id)
            return [_task_doc(t) for t in tasks]

    @app.post("/api/groups/{group_id}/tasks")
    def upsert_task(group_id: str, body: TaskRequest, actor_id: str = Depends(caller)):
        with store.lock:
            if body.task_id is None:
                if body.title is None or body.planned_start is None or body.planned_end is None:
                    from .errors import OutOfRange
                    raise OutOfRange("a new task needs title, planned_start, planned_end")
                task = core.add_task(
                    store, actor_id, group_id, body.title,
                    body.planned_start, body.planned_end,
                    assignee_id=body.assignee_id,
                    dependency_ids=set(body.dependency_ids or []),
                )
            else:
                changes: dict[str, Any] = dict(body.changes or {})
                for key in ("title", "assignee_id", "status"):
                    value = getattr(body, key)
                    if value is not None:
                        changes.setdefault(key, value)
                if body.dependency_ids is not None:
                    changes.setdefault("dependency_ids", body.dependency_ids)
                task = core.update_task(store, actor_id, group_id, body.task_id, changes)
            return _task_doc(store.state.tasks[task.id])

    # -- deliverables ---------------------------------------------------------------

    def _deliverable_doc(d) -> dict[str, Any]:
        return {
            "id": d.id, "group_id": d.group_id, "title": d.title,
            "due": d.due.isoformat(),
            "submitted_at": d.submitted_at.isoformat() if d.submitted_at else None,
            "accepted_at": d.accepted_at.isoformat() if d.accepted_at else None,
            "accepted_by": d.accepted_by,
            "comment_count": d.comment_count,
        }

    @app.get("/api/groups/{group_id}/deliverables")
    def list_deliverables(group_id: str, actor_id: str = Depends(caller)):
        with store.lock:
            read_gate(actor_id, ResourceRef.deliverable(group_id))
            rows = sorted(store.state.group_deliverables(group_id), key=lambda d: d.id)
            return [_deliverable_doc(d) for d in rows]

    @app.post("/api/groups/{group_id}/deliverables")
    def plan_deliverable(group_id: str, body: DeliverableRequest,
                         actor_id: str = Depends(caller)):
        with store.lock:
            d = core.add_deliverable(store, actor_id, group_id, body.title, body.due)
            return _deliverable_doc(d)

    @app.post("/api/groups/{group_id}/deliverables/{deliverable_id}/submit")
    def submit(group_id: str, deliverable_id: str, actor_id: str = Depends(caller)):
        with store.lock:
            core.submit_deliverable(store, actor_id, group_id, deliverable_id)
            return _deliverable_doc(store.state.deliverables[deliverable_id])

    @app.post("/api/groups/{group_id}/deliverables/{deliverable_id}/accept")
    def accept(group_id: str, deliverable_id: str, actor_id: str = Depends(caller)):
        with store.lock:
            core.accept_deliverable(store, actor_id, group_id, deliverable_id)
            return _deliverable_doc(store.state.deliverables[deliverable_id])

    @app.post("/api/groups/{group_id}/deliverables/{deliverable_id}/comment")
    def comment(group_id: str, deliverable_id: str, body: CommentRequest,
                actor_id: str = Depends(caller)):
        with store.lock:
            core.comment_deliverable(store, actor_id, group_id, deliverable_id, body.body)
            return _deliverable_doc(store.state.deliverables[deliverable_id])

    # -- student data entry -----------------------------------------------------------

    @app.post("/api/students/{student_id}/time")
    def record_time(student_id: str, body: TimeRequest, actor_id: str = Depends(caller)):
        with store.lock:
            ev = core.record_time_entry(store, actor_id, student_id, body.date, body.hours)
            return {"seq": ev.seq}

    @app.post("/api/students/{student_id}/frame-of-mind")
    def record_mood(student_id: str, body: MoodRequest, actor_id: str = Depends(caller)):
        with store.lock:
            ev = indicators.record_frame_of_mind(store, actor_id, student_id,
                                                 body.period, body.score)
            return {"seq": ev.seq}

    @app.get("/api/students/{student_id}/metacog")
    def metacog_profile(student_id: str, actor_id: str = Depends(caller)):
        with store.lock:
            read_gate(actor_id, ResourceRef.metacog(student_id))
            snap = store.current()
            doc = indicators.compute_metacognitive_profile(snap, student_id).to_doc()
            doc["seq"] = snap.seq
            doc["questionnaire"] = store.questionnaire.to_doc()
            return doc

    @app.post("/api/students/{student_id}/metacog")
    def record_report(student_id: str, body: SelfReportRequest,
                      actor_id: str = Depends(caller)):
        with store.lock:
            ev = indicators.record_self_report(store, actor_id, student_id,
                                               body.period, body.items)
            return {"seq": ev.seq}

    # -- tutor view -----------------------------------------------------------------

    @app.get("/api/tutor/view")
    def tutor_view(period: str | None = None, actor_id: str = Depends(caller)):
        with store.lock:
            read_gate(actor_id, ResourceRef.tutor_view(actor_id))
            snap = store.current()
            doc = indicators.compute_learning_view(
                snap, actor_id, _period_or_latest(period)).to_doc()
            doc["seq"] = snap.seq
            return doc

    @app.post("/api/tutor/view/notes")
    def tutor_note(body: NoteRequest, actor_id: str = Depends(caller)):
        with store.lock:
            ev = indicators.annotate_tutor_view(store, actor_id, actor_id,
                                                body.group_id, body.text)
            return {"seq": ev.seq}

    # -- blogs -----------------------------------------------------------------------

    def _post_doc(p) -> dict[str, Any]:
        return {
            "id": p.id, "author_id": p.author_id, "body": p.body,
            "created_at": p.created_at.isoformat(), "status": p.status.value,
            "published_by": p.published_by,
        }

    @app.get("/api/blogs/{owner_id}/posts")
    def blog_posts(owner_id: str, actor_id: str = Depends(caller)):
        with store.lock:
            posts = sharing.visible_posts(store.current(), actor_id, owner_id)
            return [_post_doc(p) for p in posts]

    @app.post("/api/blogs/{owner_id}/posts")
    def write_post(owner_id: str, body: PostRequest, actor_id: str = Depends(caller)):
        with store.lock:
            if owner_id in store.state.groups:
                post = sharing.propose_group_post(store, actor_id, owner_id, body.body)
            else:
                if owner_id != actor_id:
                    raise Forbidden("students write only their own blog", rule_id="R2")
                post = sharing.write_student_post(store, actor_id, body.body)
            return _post_doc(post)

    @app.post("/api/blogs/group/{group_id}/posts/{post_id}/confirm")
    def confirm_post(group_id: str, post_id: str, actor_id: str = Depends(caller)):
        with store.lock:
            post = sharing.confirm_group_post(store, actor_id, group_id, post_id)
            return _post_doc(post)

    # -- forum -----------------------------------------------------------------------

    def _discussion_doc(d) -> dict[str, Any]:
        return {
            "id": d.id, "title": d.title, "opener_id": d.opener_id,
            "tags": sorted(d.tags),
            "messages": [
                {"author_id": m.author_id, "body": m.body, "at": m.at.isoformat()}
                for m in d.messages
            ],
        }

    @app.get("/api/forum/discussions")
    def list_discussions(actor_id: str = Depends(caller)):
        with store.lock:
            read_gate(actor_id, ResourceRef.forum())
            rows = sorted(store.state.discussions.values(), key=lambda d: d.id)
            return [_discussion_doc(d) for d in rows]

    @app.post("/api/forum/discussions")
    def open_discussion(body: DiscussionRequest, actor_id: str = Depends(caller)):
        with store.lock:
            d = sharing.create_discussion(store, actor_id, body.title, body.body,
                                          set(body.tags))
            return _discussion_doc(d)

    @app.post("/api/forum/discussions/{discussion_id}/reply")
    def reply_discussion(discussion_id: str, body: CommentRequest,
                         actor_id: str = Depends(caller)):
        with store.lock:
            d = sharing.reply(store, actor_id, discussion_id, body.body)
            return _discussion_doc(d)

    @app.get("/api/forum/taxonomy")
    def taxonomy(actor_id: str = Depends(caller)):
        with store.lock:
            read_gate(actor_id, ResourceRef.taxonomy())
            return sharing.taxonomy_doc(store.current())

    @app.post("/api/forum/taxonomy")
    def change_taxonomy(body: TaxonomyRequest, actor_id: str = Depends(caller)):
        with store.lock:
            if body.action == "propose":
                subject = sharing.propose_subject(store, actor_id,
                                                  body.parent_id or "", body.label or "")
            elif body.action == "rename":
                subject = sharing.rename_subject(store, actor_id,
                                                 body.subject_id or "", body.label or "")
            elif body.action == "merge":
                subject = sharing.merge_subjects(store, actor_id,
                                                 body.subject_id or "", body.into_id or "")
            else:
                from .errors import OutOfRange
                raise OutOfRange(f"unknown taxonomy action {body.action!r}")
            return {
                "id": subject.id, "label": subject.label,
                "parent_id": subject.parent_id, "root": subject.root.value,
                "status": subject.status.value,
            }

    @app.get("/api/forum/search")
    def search(tags: str = Query(""), actor_id: str = Depends(caller)):
        with store.lock:
            read_gate(actor_id, ResourceRef.forum())
            tag_set = {t for t in tags.split(",") if t}
            found = sharing.search_discussions(store.current(), tag_set)
            return [_discussion_doc(d) for d in found]

    # -- contracts ---------------------------------------------------------------------

    @app.get("/api/contracts/{owner_id}")
    def read_contract(owner_id: str, actor_id: str = Depends(caller)):
        with store.lock:
            read_gate(actor_id, ResourceRef.contract(owner_id))
            contract = store.state.contracts.get(owner_id)
            if contract is None:
                from .errors import UnknownPost
                raise UnknownPost(f"{owner_id} holds no contract")
            return sharing.contract_doc(contract)

    @app.post("/api/contracts/{owner_id}")
    def write_contract(owner_id: str, body: ContractRequest,
                       actor_id: str = Depends(caller)):
        with store.lock:
            contract = sharing.init_learning_contract(store, actor_id, owner_id,
                                                      body.answers)
            return sharing.contract_doc(contract)

    @app.post("/api/contracts/{owner_id}/revise")
    def revise_contract(owner_id: str, body: ReviseRequest,
                        actor_id: str = Depends(caller)):
        with store.lock:
            contract = sharing.revise_learning_contract(
                store, actor_id, owner_id, body.answers, body.linked_event_seqs)
            return sharing.contract_doc(contract)

    # -- evaluations ---------------------------------------------------------------------

    @app.post("/api/evaluations/group/{group_id}")
    def grade_group(group_id: str, body: GradeRequest, actor_id: str = Depends(caller)):
        with store.lock:
            view = indicators.evaluate_group(store, actor_id, group_id, body.grade)
            return view.to_doc()

    @app.post("/api/evaluations/student/{student_id}")
    def adjust_student(student_id: str, body: AdjustmentRequest,
                       actor_id: str = Depends(caller)):
        with store.lock:
            view = indicators.evaluate_student(store, actor_id, student_id,
                                               body.adjustment)
            return view.to_doc()

    @app.get("/api/evaluations/group/{group_id}")
    def read_evaluation(group_id: str, actor_id: str = Depends(caller)):
        with store.lock:
            read_gate(actor_id, ResourceRef.evaluation(group_id))
            return indicators.evaluation_view(store.current(), group_id).to_doc()

    # -- policy surface ---------------------------------------------------------------------

    @app.get("/api/decision-table")
    def table(actor_id: str = Depends(caller)):
        with store.lock:
            return policy.decision_table(store.state)

    if config.ui_dir:
        from pathlib import Path as _Path

        ui = _Path(config.ui_dir)
        if ui.is_dir():
            from fastapi.staticfiles import StaticFiles

            app.mount("/", StaticFiles(directory=str(ui), html=True), name="ui")

    return app


def serve(store: Store, config: ServiceConfig) -> None:
    """Run the service; BindFailure when the port cannot be taken."""
    import uvicorn

    from .errors import BindFailure

    app = create_app(store, config)
    try:
        uvicorn.run(app, host=config.host, port=config.port, log_level="info")
    except OSError as exc:
        raise BindFailure(f"cannot bind {config.host}:{config.port}: {exc}") from exc
