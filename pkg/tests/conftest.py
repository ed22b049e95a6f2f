from __future__ import annotations

from datetime import datetime, timezone

import pytest

from pblhub import core, seed
from pblhub.model import Role
from pblhub.store import Store


def make_mini_store(groups: int = 2, members: int = 4) -> Store:
    """Small seeded course used by most unit tests; group ids grp-0001..."""
    store = Store()
    seed.seed_course(store, groups=groups, members_per_group=members)
    return store


def advance_to_running(store: Store) -> None:
    core.advance_course(store, "director",
                        at=datetime(2025, 11, 1, 8, 0, tzinfo=timezone.utc))


def close_course(store: Store) -> None:
    if store.state.course.status.value == "Setup":
        core.advance_course(store, "director")
    core.advance_course(store, "director")


@pytest.fixture
def mini_store() -> Store:
    return make_mini_store()


@pytest.fixture
def running_store() -> Store:
    store = make_mini_store()
    advance_to_running(store)
    return store


@pytest.fixture(scope="session")
def paper_store() -> Store:
    store = Store()
    seed.seed_paper_course(store)
    return store


def group(store: Store, n: int = 1):
    return store.state.groups[f"grp-{n:04d}"]


def leader_of(store: Store, n: int = 1) -> str:
    return group(store, n).leader_id


def members_of(store: Store, n: int = 1) -> list[str]:
    return sorted(group(store, n).member_ids)


def plain_member(store: Store, n: int = 1) -> str:
    g = group(store, n)
    return next(m for m in sorted(g.member_ids) if m != g.leader_id)


def tutors_of(store: Store, n: int = 1) -> tuple[str, str]:
    g = group(store, n)
    return g.technical_tutor_id, g.management_tutor_id


def actors_by_role(store: Store, role: Role) -> list[str]:
    return sorted(a.id for a in store.state.actors.values() if a.role == role)
