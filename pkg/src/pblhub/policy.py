"""Visibility and update rules as one total, auditable decision function.

Every read or mutation in the system maps to exactly one (action, resource
class) pair and is gated through :func:`authorize`. The rule chain, in
precedence order:

  R5  leaders are denied, read and write, on the individual reflective
      dashboards of their own members (never on their own);
  R7  learning contracts: readable by every course actor; answer-changing
      writes on an existing contract are denied while the course is open;
  R2  students (leaders included) read and write their own blog, their own
      reflective dashboard and their own data-entry stream;
  R1  owners access their own surfaces: a tutor's monitoring view, the
      owner-side contract writes that R7 permits, and the group-owned
      surfaces (dashboard, blog, tasks, deliverables, draft proposals)
      for the group's members;
  R3  leader-only group writes: the group dashboard, publishing group blog
      posts, and reading the pending-draft queue;
  R4  tutors access all surfaces of their own groups and those groups'
      students (read), and write the tutor-action surfaces: tasks,
      deliverables, evaluations. Managers and the director get read-only
      oversight of group dashboards and evaluations;
  R6  the practice-sharing forum and its tag taxonomy: tutors, managers and
      the director read and write; the teacher reads; everyone else is
      denied by this same rule;
  R8  default deny.

Removing any allow rule strictly shrinks the allow set: no tuple is granted
by two rules.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .errors import UnknownActor, UnknownResource
from .model import (
    ContractStatus,
    CourseStatus,
    Role,
    FORUM_WRITE_ROLES,
    MEMBER_ROLES,
    TUTOR_ROLES,
)
from .state import State


class Action(str, Enum):
    READ = "Read"
    WRITE = "Write"


class ResourceClass(str, Enum):
    GROUP_DASHBOARD = "GroupDashboard"
    STUDENT_METACOG_DASHBOARD = "StudentMetacogDashboard"
    STUDENT_BLOG = "StudentBlog"
    GROUP_BLOG = "GroupBlog"
    GROUP_BLOG_DRAFT = "GroupBlogDraft"
    TUTOR_VIEW = "TutorView"
    FORUM_DISCUSSION = "ForumDiscussion"
    TAXONOMY = "Taxonomy"
    LEARNING_CONTRACT = "LearningContract"
    TASK = "Task"
    DELIVERABLE = "Deliverable"
    TIME_ENTRY_STREAM = "TimeEntryStream"
    EVALUATION = "Evaluation"


#: Classes scoped to a project group (directly or through their subject).
GROUP_SCOPED = frozenset(
    {
        ResourceClass.GROUP_DASHBOARD,
        ResourceClass.STUDENT_METACOG_DASHBOARD,
        ResourceClass.STUDENT_BLOG,
        ResourceClass.GROUP_BLOG,
        ResourceClass.GROUP_BLOG_DRAFT,
        ResourceClass.TASK,
        ResourceClass.DELIVERABLE,
        ResourceClass.TIME_ENTRY_STREAM,
        ResourceClass.EVALUATION,
    }
)

_STUDENT_SELF_CLASSES = frozenset(
    {
        ResourceClass.STUDENT_BLOG,
        ResourceClass.STUDENT_METACOG_DASHBOARD,
        ResourceClass.TIME_ENTRY_STREAM,
    }
)

_TUTOR_READ_CLASSES = GROUP_SCOPED
_TUTOR_WRITE_CLASSES = frozenset(
    {ResourceClass.TASK, ResourceClass.DELIVERABLE, ResourceClass.EVALUATION}
)
_OVERSIGHT_ROLES = frozenset(
    {Role.TECHNICAL_MANAGER, Role.MANAGEMENT_MANAGER, Role.DIRECTOR}
)
_OVERSIGHT_READ_CLASSES = frozenset(
    {ResourceClass.GROUP_DASHBOARD, ResourceClass.EVALUATION}
)
_MEMBER_READ_CLASSES = frozenset(
    {
        ResourceClass.GROUP_DASHBOARD,
        ResourceClass.GROUP_BLOG,
        ResourceClass.TASK,
        ResourceClass.DELIVERABLE,
        ResourceClass.STUDENT_BLOG,
    }
)
_MEMBER_WRITE_CLASSES = frozenset(
    {ResourceClass.TASK, ResourceClass.DELIVERABLE, ResourceClass.GROUP_BLOG_DRAFT}
)


@dataclass(frozen=True)
class ResourceRef:
    """A concrete resource instance, as much of it as policy needs.

    ``subject_id`` is the individual the resource belongs to (student for
    blogs/metacog/time streams, tutor for monitoring views, any actor for
    contracts); ``group_id`` scopes group-owned resources.
    ``contract_exists`` overrides the state lookup for contract refs; the
    decision table uses it to report the steady state (contract written).
    """

    cls: ResourceClass
    group_id: str | None = None
    subject_id: str | None = None
    contract_exists: bool | None = None

    # Constructors named for the surface they describe.
    @staticmethod
    def group_dashboard(group_id: str) -> "ResourceRef":
        return ResourceRef(ResourceClass.GROUP_DASHBOARD, group_id=group_id)

    @staticmethod
    def metacog(student_id: str) -> "ResourceRef":
        return ResourceRef(ResourceClass.STUDENT_METACOG_DASHBOARD, subject_id=student_id)

    @staticmethod
    def student_blog(student_id: str) -> "ResourceRef":
        return ResourceRef(ResourceClass.STUDENT_BLOG, subject_id=student_id)

    @staticmethod
    def group_blog(group_id: str) -> "ResourceRef":
        return ResourceRef(ResourceClass.GROUP_BLOG, group_id=group_id)

    @staticmethod
    def group_blog_draft(group_id: str) -> "ResourceRef":
        return ResourceRef(ResourceClass.GROUP_BLOG_DRAFT, group_id=group_id)

    @staticmethod
    def tutor_view(tutor_id: str) -> "ResourceRef":
        return ResourceRef(ResourceClass.TUTOR_VIEW, subject_id=tutor_id)

    @staticmethod
    def forum() -> "ResourceRef":
        return ResourceRef(ResourceClass.FORUM_DISCUSSION)

    @staticmethod
    def taxonomy() -> "ResourceRef":
        return ResourceRef(ResourceClass.TAXONOMY)

    @staticmethod
    def contract(owner_id: str) -> "ResourceRef":
        return ResourceRef(ResourceClass.LEARNING_CONTRACT, subject_id=owner_id)

    @staticmethod
    def task(group_id: str) -> "ResourceRef":
        return ResourceRef(ResourceClass.TASK, group_id=group_id)

    @staticmethod
    def deliverable(group_id: str) -> "ResourceRef":
        return ResourceRef(ResourceClass.DELIVERABLE, group_id=group_id)

    @staticmethod
    def time_stream(student_id: str) -> "ResourceRef":
        return ResourceRef(ResourceClass.TIME_ENTRY_STREAM, subject_id=student_id)

    @staticmethod
    def evaluation(group_id: str) -> "ResourceRef":
        return ResourceRef(ResourceClass.EVALUATION, group_id=group_id)


@dataclass(frozen=True)
class PolicyDecision:
    allow: bool
    rule_id: str
    explanation: str


def _resource_group(state: State, ref: ResourceRef) -> str | None:
    """Group the resource is scoped to, via subject when needed."""
    if ref.group_id is not None:
        if ref.group_id not in state.groups:
            raise UnknownResource(f"no group {ref.group_id}")
        return ref.group_id
    if ref.subject_id is not None and ref.cls != ResourceClass.LEARNING_CONTRACT \
            and ref.cls != ResourceClass.TUTOR_VIEW:
        subject = state.actors.get(ref.subject_id)
        if subject is None:
            raise UnknownResource(f"no actor {ref.subject_id}")
        return subject.group_id
    return None


def authorize(state: State, actor_id: str, action: Action, ref: ResourceRef) -> PolicyDecision:
    """Decide; total over existing actors and resources, never raises else."""
    actor = state.actors.get(actor_id)
    if actor is None:
        raise UnknownActor(f"no actor {actor_id}")
    if ref.subject_id is not None and ref.subject_id not in state.actors:
        raise UnknownResource(f"no actor {ref.subject_id}")
    resource_group = _resource_group(state, ref)

    cls = ref.cls
    role = actor.role
    is_self = ref.subject_id == actor_id
    member_of = resource_group is not None and state.is_member(actor_id, resource_group)
    tutor_of = resource_group is not None and state.is_tutor_of(actor_id, resource_group)
    leader_of = (
        resource_group is not None
        and state.groups[resource_group].leader_id == actor_id
    )

    # R5: the leader must not see members' individual reflective dashboards.
    if (
        cls == ResourceClass.STUDENT_METACOG_DASHBOARD
        and role == Role.PROJECT_LEADER
        and not is_self
        and resource_group is not None
        and actor.group_id == resource_group
    ):
        return PolicyDecision(False, "R5", "leaders have no access to members' individual dashboards")

    # R7: learning contract visibility and lock.
    if cls == ResourceClass.LEARNING_CONTRACT:
        if action == Action.READ:
            return PolicyDecision(True, "R7", "learning contracts are readable by all course actors")
        if not is_self:
            return PolicyDecision(False, "R8", "only the owner may write a learning contract")
        if ref.contract_exists is not None:
            frozen = ref.contract_exists
        else:
            contract = state.contracts.get(ref.subject_id or "")
            frozen = contract is not None and contract.status == ContractStatus.ACTIVE
        course_open = state.course is None or state.course.status != CourseStatus.CLOSED
        if frozen and course_open:
            return PolicyDecision(False, "R7", "contracts cannot be modified while the course runs")
        return PolicyDecision(True, "R1", "owner writes own contract at a permitted stage")

    # R2: student self-surfaces.
    if cls in _STUDENT_SELF_CLASSES and is_self and role in MEMBER_ROLES:
        return PolicyDecision(True, "R2", "students modify their own blog and individual data")

    # R1: a tutor's own monitoring view.
    if cls == ResourceClass.TUTOR_VIEW:
        if is_self and role in TUTOR_ROLES:
            return PolicyDecision(True, "R1", "tutors own their monitoring view")
        return PolicyDecision(False, "R8", "monitoring views are private to their tutor")

    # R6: the tutors' practice-sharing forum and taxonomy.
    if cls in (ResourceClass.FORUM_DISCUSSION, ResourceClass.TAXONOMY):
        if role in FORUM_WRITE_ROLES:
            return PolicyDecision(True, "R6", "forum access is for the tutor-side roles")
        if role == Role.TEACHER and action == Action.READ:
            return PolicyDecision(True, "R6", "the teacher may follow the forum")
        return PolicyDecision(False, "R6", "the forum is restricted to tutor-side roles")

    # R3: leader-only group writes plus the pending-draft queue.
    if leader_of:
        if action == Action.WRITE and cls in (ResourceClass.GROUP_DASHBOARD, ResourceClass.GROUP_BLOG):
            return PolicyDecision(True, "R3", "the group dashboard and blog publication belong to the leader")
        if action == Action.READ and cls == ResourceClass.GROUP_BLOG_DRAFT:
            return PolicyDecision(True, "R3", "the leader curates proposed group posts")

    # R4: tutor access to own groups; read-only oversight for managers/director.
    if tutor_of:
        if action == Action.READ and cls in _TUTOR_READ_CLASSES:
            return PolicyDecision(True, "R4", "tutors access their groups' and students' interfaces")
        if action == Action.WRITE and cls in _TUTOR_WRITE_CLASSES:
            return PolicyDecision(True, "R4", "tutors act on tasks, deliverables and evaluations")
    if role in _OVERSIGHT_ROLES and action == Action.READ and cls in _OVERSIGHT_READ_CLASSES:
        return PolicyDecision(True, "R4", "managers and the director oversee group dashboards")

    # R1: group-owned surfaces for the group's members.
    if member_of:
        if action == Action.READ and cls in _MEMBER_READ_CLASSES:
            return PolicyDecision(True, "R1", "group surfaces are readable by their owners, the members")
        if action == Action.WRITE and cls in _MEMBER_WRITE_CLASSES:
            return PolicyDecision(True, "R1", "members maintain their group's work items")

    return PolicyDecision(False, "R8", "not granted by any rule")


def require(state: State, actor_id: str, action: Action, ref: ResourceRef) -> PolicyDecision:
    """authorize() or raise Forbidden carrying the governing rule id."""
    from .errors import Forbidden

    decision = authorize(state, actor_id, action, ref)
    if not decision.allow:
        raise Forbidden(decision.explanation, rule_id=decision.rule_id)
    return decision


# -- exhaustive decision table -------------------------------------------


RELATIONSHIPS = (
    "self",
    "self_contracted",
    "leader_same_group",
    "member_same_group",
    "tutor_same_group",
    "member_other_group",
    "tutor_other_group",
    "none",
)


def _relationship(state: State, actor_id: str, ref: ResourceRef) -> str:
    actor = state.actors[actor_id]
    if ref.subject_id == actor_id:
        # Contract rows split on existence: writing a fresh contract and
        # touching a written one are different capabilities.
        if ref.cls == ResourceClass.LEARNING_CONTRACT:
            if ref.contract_exists is not None:
                frozen = ref.contract_exists
            else:
                contract = state.contracts.get(actor_id)
                frozen = contract is not None and contract.status == ContractStatus.ACTIVE
            return "self_contracted" if frozen else "self"
        return "self"
    try:
        resource_group = _resource_group(state, ref)
    except UnknownResource:
        resource_group = None
    if resource_group is None:
        return "none"
    group = state.groups[resource_group]
    if actor_id == group.leader_id:
        return "leader_same_group"
    if actor_id in group.member_ids:
        return "member_same_group"
    if actor_id in group.tutor_ids:
        return "tutor_same_group"
    if actor.role in MEMBER_ROLES and actor.group_id is not None:
        return "member_other_group"
    if actor.role in TUTOR_ROLES:
        return "tutor_other_group"
    return "none"


def _representative_resources(state: State) -> list[ResourceRef]:
    refs: list[ResourceRef] = [ResourceRef.forum(), ResourceRef.taxonomy()]
    for group in state.groups.values():
        refs.extend(
            [
                ResourceRef.group_dashboard(group.id),
                ResourceRef.group_blog(group.id),
                ResourceRef.group_blog_draft(group.id),
                ResourceRef.task(group.id),
                ResourceRef.deliverable(group.id),
                ResourceRef.evaluation(group.id),
            ]
        )
        for member_id in sorted(group.member_ids):
            refs.extend(
                [
                    ResourceRef.metacog(member_id),
                    ResourceRef.student_blog(member_id),
                    ResourceRef.time_stream(member_id),
                ]
            )
        for tutor_id in group.tutor_ids:
            refs.append(ResourceRef.tutor_view(tutor_id))
    for actor_id in sorted(state.actors):
        # Both contract states, so the table carries the create capability
        # and the post-write lock separately.
        for exists in (False, True):
            refs.append(ResourceRef(ResourceClass.LEARNING_CONTRACT,
                                    subject_id=actor_id, contract_exists=exists))
    return refs


def decision_table(state: State) -> list[dict[str, str | bool]]:
    """Enumerate every reachable (relationship, role, action, class) cell.

    Iterates all actors against representative resource instances and reduces
    to one row per distinct tuple, verifying on the way that no tuple ever
    produces two different decisions.
    """
    rows: dict[tuple[str, str, str, str], PolicyDecision] = {}
    for ref in _representative_resources(state):
        for actor_id, actor in state.actors.items():
            rel = _relationship(state, actor_id, ref)
            for action in Action:
                decision = authorize(state, actor_id, action, ref)
                key = (rel, actor.role.value, action.value, ref.cls.value)
                seen = rows.get(key)
                if seen is None:
                    rows[key] = decision
                elif (seen.allow, seen.rule_id) != (decision.allow, decision.rule_id):
                    raise AssertionError(f"non-deterministic policy cell {key}")
    out = []
    for (rel, role, action, cls), decision in sorted(rows.items()):
        out.append(
            {
                "relationship": rel,
                "role": role,
                "action": action,
                "resource_class": cls,
                "allow": decision.allow,
                "rule_id": decision.rule_id,
            }
        )
    return out


def decision_table_csv(rows: list[dict[str, str | bool]]) -> str:
    lines = ["relationship,role,action,resource_class,allow,rule_id"]
    for row in rows:
        lines.append(
            f"{row['relationship']},{row['role']},{row['action']},"
            f"{row['resource_class']},{'allow' if row['allow'] else 'deny'},{row['rule_id']}"
        )
    return "\n".join(lines) + "\n"
