"""Canonical course seeds.

``seed_paper_course`` builds the full-size desk course: one six-month course
(November to mid-April), 12 groups of 8 students with a leader each, two
tutors per group, two managers, one teacher, one director, and the forum
taxonomy pre-populated with the tutor-role, calendar and per-group subjects.
``seed_course`` is the parametric variant used by the simulator and tests.
"""

from __future__ import annotations

from datetime import date, datetime, timezone

from . import core
from .errors import StoreNotEmpty
from .events import EventKind, SYSTEM_ACTOR
from .model import Course, Phase, PhaseWindow, Role
from .state import ROOT_SUBJECT_IDS
from .model import TaxonomyRoot
from .store import Store

#: The tutor-role children of the RolesAndTasks subject tree.
TUTOR_ROLE_SUBJECTS = (
    "Social catalyst",
    "Intellectual catalyst",
    "Individualiser",
    "Autonomiser",
    "Relational coach",
    "Educationalist",
    "Content expert",
    "Evaluator",
    "Qualimetror",
    "Other",
)

PHASE_LABELS = {
    Phase.TENDER: "Tender",
    Phase.MASTER_PLAN: "Master plan",
    Phase.DEVELOPMENT: "Development",
    Phase.CLOSURE: "Closure",
}

#: Recurring practice problems seeded as discussion tags, each under the
#: tutor role that owns that ground: (parent role label, tag label).
PRACTICE_PROBLEM_SUBJECTS = (
    ("Educationalist", "Project management skills gaps"),
    ("Relational coach", "Group work difficulties"),
    ("Social catalyst", "Tutor coordination and communication"),
    ("Evaluator", "Individual evaluation and investment"),
)


def default_calendar(start_year: int = 2025) -> list[PhaseWindow]:
    """November tender, December master plan, Jan-Mar development,
    closure until mid-April."""
    return [
        PhaseWindow(Phase.TENDER, date(start_year, 11, 1), date(start_year, 11, 30)),
        PhaseWindow(Phase.MASTER_PLAN, date(start_year, 12, 1), date(start_year, 12, 31)),
        PhaseWindow(Phase.DEVELOPMENT, date(start_year + 1, 1, 1), date(start_year + 1, 3, 31)),
        PhaseWindow(Phase.CLOSURE, date(start_year + 1, 4, 1), date(start_year + 1, 4, 15)),
    ]


def seed_course(store: Store, groups: int, members_per_group: int,
                start_year: int = 2025, name: str = "Collective project course") -> Course:
    """Deterministic parametric seed; ids, names and timestamps are fixed
    functions of the parameters."""
    if not store.is_empty():
        raise StoreNotEmpty("seeding requires an empty store")
    at = datetime(start_year, 10, 15, 9, 0, tzinfo=timezone.utc)
    course = core.create_course(store, name, default_calendar(start_year), at=at)

    student_ids = [f"s{n:03d}" for n in range(1, groups * members_per_group + 1)]
    for sid, n in zip(student_ids, range(1, len(student_ids) + 1)):
        core.register_actor(store, sid, f"Student {n:03d}", Role.STUDENT, at=at)
    tutor_ids = [f"t{n:03d}" for n in range(1, groups * 2 + 1)]
    for i, tid in enumerate(tutor_ids):
        role = Role.TECHNICAL_TUTOR if i % 2 == 0 else Role.MANAGEMENT_TUTOR
        core.register_actor(store, tid, f"Tutor {i + 1:03d}", role, at=at)
    core.register_actor(store, "mgr-tech", "Technical manager", Role.TECHNICAL_MANAGER, at=at)
    core.register_actor(store, "mgr-mgmt", "Management manager", Role.MANAGEMENT_MANAGER, at=at)
    core.register_actor(store, "teacher", "Course teacher", Role.TEACHER, at=at)
    core.register_actor(store, "director", "Course director", Role.DIRECTOR, at=at)

    _seed_shared_taxonomy(store, at)

    for g in range(groups):
        members = student_ids[g * members_per_group:(g + 1) * members_per_group]
        core.create_group(
            store,
            name=f"Group {g + 1:02d}",
            member_ids=members,
            leader_id=members[0],
            technical_tutor_id=tutor_ids[2 * g],
            management_tutor_id=tutor_ids[2 * g + 1],
            subject=f"Industrial need {g + 1:02d}",
            at=at,
        )
    return course


def _seed_shared_taxonomy(store: Store, at: datetime) -> None:
    roles_root = ROOT_SUBJECT_IDS[TaxonomyRoot.ROLES_AND_TASKS]
    role_ids: dict[str, str] = {}
    for i, label in enumerate(TUTOR_ROLE_SUBJECTS, start=1):
        role_ids[label] = f"sbj-role-{i:02d}"
        store.commit(
            EventKind.TAXONOMY_CHANGE,
            SYSTEM_ACTOR,
            {"action": "seed", "subject_id": role_ids[label],
             "parent_id": roles_root, "label": label},
            at=at,
        )
    for i, (parent_label, label) in enumerate(PRACTICE_PROBLEM_SUBJECTS, start=1):
        store.commit(
            EventKind.TAXONOMY_CHANGE,
            SYSTEM_ACTOR,
            {"action": "seed", "subject_id": f"sbj-prob-{i:02d}",
             "parent_id": role_ids[parent_label], "label": label},
            at=at,
        )
    calendar_root = ROOT_SUBJECT_IDS[TaxonomyRoot.PROJECT_CALENDAR]
    for i, phase in enumerate(PHASE_LABELS.values(), start=1):
        store.commit(
            EventKind.TAXONOMY_CHANGE,
            SYSTEM_ACTOR,
            {"action": "seed", "subject_id": f"sbj-phase-{i}",
             "parent_id": calendar_root, "label": phase},
            at=at,
        )


def seed_paper_course(store: Store, start_year: int = 2025) -> Course:
    """The reference desk-scale course: 12 groups x 8 students."""
    return seed_course(store, groups=12, members_per_group=8, start_year=start_year)
