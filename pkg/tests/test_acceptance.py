"""Acceptance criteria, one test per criterion, at their stated tolerances.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one line per
criterion.
"""

from __future__ import annotations

import math
import random
import time
from datetime import datetime, timedelta, timezone

import pytest

from pblhub import core, indicators, sharing, state as state_mod
from pblhub.errors import AdjustmentOutOfRange, ContractLocked, UnknownEventSeq
from pblhub.model import CONTRACT_QUESTIONS, CourseStatus, Phase, Role
from pblhub.policy import Action
from pblhub.seed import seed_paper_course
from pblhub.simulate import DEFAULT_RATES, SimulationConfig, run_simulation
from pblhub.store import Store
from pblhub.weeks import week_of

from oracles import oracle_dashboard, oracle_metacog, oracle_search, oracle_teamwork
from test_policy import all_resources, assert_zero_disagreements, derive_relationship, expected_decision

ANSWERS = {q: "committed" for q in CONTRACT_QUESTIONS}


def report(name: str) -> None:
    print(f"\nACCEPTANCE PASS: {name}")


# 1 ---------------------------------------------------------------------------


def test_paper_scale_seed():
    """1 course, 4 phases, 12 groups, 96 students, 12 leaders, 24 tutors,
    2 managers, 1 teacher, 1 director, in under 5 seconds."""
    store = Store()
    started = time.perf_counter()
    course = seed_paper_course(store)
    elapsed = time.perf_counter() - started

    state = store.state
    roles = {}
    for actor in state.actors.values():
        roles[actor.role] = roles.get(actor.role, 0) + 1
    assert state.course is course and course.status == CourseStatus.SETUP
    assert [w.phase for w in course.calendar] == list(Phase)
    assert len(state.groups) == 12
    students = roles.get(Role.STUDENT, 0) + roles.get(Role.PROJECT_LEADER, 0)
    assert students == 96
    assert roles.get(Role.PROJECT_LEADER, 0) == 12
    leaders = {g.leader_id for g in state.groups.values()}
    assert len(leaders) == 12 and all(
        state.actors[l].role == Role.PROJECT_LEADER for l in leaders)
    tutors = roles.get(Role.TECHNICAL_TUTOR, 0) + roles.get(Role.MANAGEMENT_TUTOR, 0)
    assert tutors == 24
    assert roles.get(Role.TECHNICAL_MANAGER, 0) == 1
    assert roles.get(Role.MANAGEMENT_MANAGER, 0) == 1
    assert roles.get(Role.TEACHER, 0) == 1
    assert roles.get(Role.DIRECTOR, 0) == 1
    # taxonomy: 3 roots, 10 tutor-role children, 4 phase children, 12 group children
    roots = [s for s in state.taxonomy.values() if s.parent_id is None]
    assert len(roots) == 3
    children = {r.id: 0 for r in roots}
    for s in state.taxonomy.values():
        if s.parent_id in children:
            children[s.parent_id] += 1
    assert children["root-roles"] == 10
    assert children["root-calendar"] == 4
    assert children["root-progress"] == 12
    assert elapsed < 5.0, f"seed took {elapsed:.2f}s"
    report(f"paper-scale seed ({elapsed:.2f}s)")


# 2 ---------------------------------------------------------------------------


def test_simulation_hour_target():
    """26 weeks, default knobs: each of the 12 groups accumulates 3000 h
    (+/-10%); the whole run finishes in under 30 seconds."""
    store = Store()
    started = time.perf_counter()
    run_simulation(store, SimulationConfig(seed=42, weeks=26))
    elapsed = time.perf_counter() - started
    assert elapsed < 30.0, f"simulation took {elapsed:.1f}s"

    snap = store.current()
    last_period = week_of(max(e.date for e in store.state.time_entries))
    totals = []
    for gid in sorted(store.state.groups):
        dash = indicators.compute_project_dashboard(snap, gid, last_period)
        total = dash.working_time.total_cumulative
        totals.append(total)
        assert 2700.0 <= total <= 3300.0, (gid, total)
    report(f"simulation hour target (12 groups, {min(totals):.0f}..{max(totals):.0f} h, "
           f"{elapsed:.1f}s)")


# 3 ---------------------------------------------------------------------------


def test_indicator_oracle_over_100_histories():
    """>=100 random histories (<=10k events): every dashboard field, all four
    reflective dimensions, and all seven teamwork values equal the
    brute-force oracle; counts and sums exactly, ratios within 1e-9."""
    checked_histories = 0
    checked_values = 0
    for history in range(100):
        rng = random.Random(9000 + history)
        config = SimulationConfig(
            seed=7000 + history,
            groups=rng.choice([1, 1, 2]),
            members_per_group=rng.randint(3, 6),
            weeks=rng.randint(2, 6),
            rates={
                **DEFAULT_RATES,
                "time_entries": rng.uniform(0.3, 3),  # silent member-weeks happen
                "frame_of_mind": rng.uniform(0.1, 0.9),
                "blog_posts": 0.1,
                "self_reports": rng.uniform(0.1, 0.8),
                "forum_threads": 0.2,
                "reassignments": 0.15,
            },
        )
        store = Store()
        run_simulation(store, config)
        events = store.events
        assert len(events) <= 10_000
        snap = store.current()
        course_start = store.state.course.calendar[0].start
        periods = [week_of(course_start + timedelta(days=7 * w))
                   for w in range(config.weeks)]

        for gid in sorted(store.state.groups):
            for period in periods:
                mine = indicators.compute_teamwork_indicators(snap, gid, period)
                ref = oracle_teamwork(events, gid, period)
                flags = ref.pop("no_data")
                assert mine.no_data == flags, (history, gid, period)
                for name, expected in ref.items():
                    value = getattr(mine, name)
                    assert 0.0 <= value <= 1.0
                    assert math.isclose(value, expected, abs_tol=1e-9), (
                        history, gid, period, name)
                    checked_values += 1

                dash = indicators.compute_project_dashboard(snap, gid, period)
                ref_dash = oracle_dashboard(events, gid, period)
                assert dash.frame_of_mind == ref_dash["frame_of_mind"]
                assert dash.working_time.per_member_period == ref_dash["per_member_period"]
                assert dash.working_time.per_member_cumulative == ref_dash["per_member_cumulative"]
                assert dash.working_time.total_period == ref_dash["total_period"]
                assert dash.working_time.total_cumulative == ref_dash["total_cumulative"]
                assert dash.open_tasks == ref_dash["open_tasks"]
                assert dash.total_delay_days == ref_dash["total_delay_days"]
                assert dash.skills_checklist == ref_dash["skills"]
                assert [(r.id, r.status, r.delay_days) for r in dash.deliverables_due] \
                    == [(r["id"], r["status"], r["delay_days"]) for r in ref_dash["deliverables"]]
                checked_values += 8

            group = store.state.groups[gid]
            for member in sorted(group.member_ids):
                mine_profile = indicators.compute_metacognitive_profile(snap, member)
                ref_profile = oracle_metacog(events, member)
                assert mine_profile.periods == ref_profile["periods"]
                assert mine_profile.trends == ref_profile["trends"]
                for by_dim in mine_profile.periods.values():
                    for score in by_dim.values():
                        assert 1.0 <= score <= 5.0
                checked_values += 2
        checked_histories += 1
    assert checked_histories >= 100
    report(f"indicator oracle ({checked_histories} histories, "
           f"{checked_values} comparisons)")


# 4 ---------------------------------------------------------------------------


def test_policy_matrix_reproduces_truth_table():
    """Exhaustive enumeration over the seeded paper course equals the
    hand-coded R1-R8 truth table; zero disagreements; the named cases hold."""
    store = Store()
    seed_paper_course(store)
    state = store.state

    assert_zero_disagreements(store, course_closed=False)

    from pblhub.policy import ResourceRef, authorize

    disagreements = 0
    cells = 0
    for ref in all_resources(state):
        for actor_id in sorted(state.actors):
            rel = derive_relationship(state, actor_id, ref)
            for action in Action:
                got = authorize(state, actor_id, action, ref)
                want = expected_decision(ref.cls.value, action.value,
                                         state.actors[actor_id].role.value, rel)
                cells += 1
                if (got.allow, got.rule_id) != want:
                    disagreements += 1
    assert disagreements == 0

    g = state.groups["grp-0001"]
    member = next(m for m in sorted(g.member_ids) if m != g.leader_id)
    denial = authorize(state, g.leader_id, Action.READ, ResourceRef.metacog(member))
    assert not denial.allow and denial.rule_id == "R5"
    for tutor in g.tutor_ids:
        for ref in (ResourceRef.group_dashboard(g.id), ResourceRef.metacog(member),
                    ResourceRef.student_blog(member), ResourceRef.task(g.id)):
            assert authorize(state, tutor, Action.READ, ref).allow
    for student in sorted(g.member_ids):
        cop = authorize(state, student, Action.READ, ResourceRef.forum())
        assert not cop.allow and cop.rule_id == "R6"
    foreign_tutor = state.groups["grp-0002"].technical_tutor_id
    assert not authorize(state, foreign_tutor, Action.READ,
                         ResourceRef.group_dashboard(g.id)).allow
    report(f"policy matrix ({cells} cells, 0 disagreements)")


# 5 ---------------------------------------------------------------------------


def test_contract_lifecycle():
    """Every mutation attempt on an Active contract during the four phases is
    rejected with ContractLocked; revision after closure succeeds and checks
    its linked event seqs."""
    store = Store()
    seed_paper_course(store)
    course = store.state.course
    holders = [store.state.groups["grp-0001"].leader_id,
               sorted(store.state.groups["grp-0002"].member_ids)[1],
               store.state.groups["grp-0003"].technical_tutor_id]
    t0 = datetime(2025, 10, 20, 9, 0, tzinfo=timezone.utc)
    for owner in holders:
        sharing.init_learning_contract(store, owner, owner, ANSWERS, at=t0)
    core.advance_course(store, "director", at=t0 + timedelta(hours=1))

    attempts = 0
    rejected = 0
    for window in course.calendar:
        probe_days = [window.start, window.start + (window.end - window.start) / 2,
                      window.end]
        for day in probe_days:
            when = datetime(day.year, day.month, day.day, 12, tzinfo=timezone.utc)
            for owner in holders:
                attempts += 1
                with pytest.raises(ContractLocked):
                    sharing.revise_learning_contract(store, owner, owner, ANSWERS, [],
                                                     at=when)
                rejected += 1
    assert attempts == rejected == 4 * 3 * len(holders)
    for owner, contract in store.state.contracts.items():
        assert contract.answers == ANSWERS  # untouched

    post = sharing.write_student_post(store, holders[0], "what I learned",
                                      at=datetime(2026, 4, 10, tzinfo=timezone.utc))
    post_seq = store.seq
    core.advance_course(store, "director",
                        at=datetime(2026, 4, 16, tzinfo=timezone.utc))
    with pytest.raises(UnknownEventSeq):
        sharing.revise_learning_contract(store, holders[0], holders[0], ANSWERS,
                                         [store.seq + 50])
    revised = sharing.revise_learning_contract(
        store, holders[0], holders[0],
        {q: "learned: " + q for q in CONTRACT_QUESTIONS}, [post_seq])
    assert revised.status.value == "Revised"
    assert revised.revision.linked_event_seqs == [post_seq]
    report(f"contract lifecycle ({rejected}/{attempts} locked rejections, "
           "post-closure revision linked)")


# 6 ---------------------------------------------------------------------------


def test_evaluation_bounds():
    """Accepted adjustments satisfy |adj| <= 2; clamped grades stay in
    [0, 20]; 2.0 + 0.001 is rejected."""
    store = Store()
    run_simulation(store, SimulationConfig(seed=6, groups=3, members_per_group=4,
                                           weeks=3))
    accepted = 0
    for record in store.state.evaluations.values():
        if record.group_grade is not None:
            assert 0.0 <= record.group_grade <= 20.0
        for student, adj in record.adjustments.items():
            assert abs(adj) <= 2.0
            grade = record.individual_grade(student)
            assert grade is not None and 0.0 <= grade <= 20.0
            accepted += 1
    assert accepted > 0

    g = store.state.groups["grp-0001"]
    tutor = g.technical_tutor_id
    student = sorted(g.member_ids)[0]
    epsilon = 0.001
    for bad in (2.0 + epsilon, -(2.0 + epsilon)):
        with pytest.raises(AdjustmentOutOfRange):
            indicators.evaluate_student(store, tutor, student, bad)
    indicators.evaluate_group(store, tutor, g.id, 19.5)
    view = indicators.evaluate_student(store, tutor, student, 2.0)
    assert view.individual_grades[student] == 20.0
    indicators.evaluate_group(store, tutor, g.id, 0.5)
    view = indicators.evaluate_student(store, tutor, student, -2.0)
    assert view.individual_grades[student] == 0.0
    report(f"evaluation bounds ({accepted} simulated adjustments within +/-2, "
           "2.001 rejected, clamps hold)")


# 7 ---------------------------------------------------------------------------


def test_taxonomy_integrity_and_search():
    """500 random proposals/renames/merges leave exactly 3 roots, no cycles,
    sibling-unique labels; tag search equals the brute-force scorer on a
    50-discussion corpus."""
    from pblhub.errors import DuplicateLabel, ProtectedSubject, UnknownParent, UnknownTag
    from pblhub.seed import seed_course

    store = Store()
    seed_course(store, groups=2, members_per_group=4)
    rng = random.Random(777)
    tutors = sorted(a.id for a in store.state.actors.values()
                    if a.role in (Role.TECHNICAL_TUTOR, Role.MANAGEMENT_TUTOR))
    applied = 0
    for step in range(500):
        subjects = sorted(store.state.taxonomy)
        roll = rng.random()
        try:
            if roll < 0.55:
                sharing.propose_subject(store, rng.choice(tutors), rng.choice(subjects),
                                        f"Subject {step}")
            elif roll < 0.8:
                sharing.rename_subject(store, "director", rng.choice(subjects),
                                       f"Label {step}")
            else:
                sharing.merge_subjects(store, "director", rng.choice(subjects),
                                       rng.choice(subjects))
            applied += 1
        except (DuplicateLabel, ProtectedSubject, UnknownParent, UnknownTag):
            pass
    roots = [s for s in store.state.taxonomy.values() if s.parent_id is None]
    assert len(roots) == 3
    state_mod.validate_state(store.state)  # acyclic + sibling-unique labels

    base = datetime(2026, 9, 1, 8, 0, tzinfo=timezone.utc)
    minute = 0
    for i in range(50):
        subjects = sorted(store.state.taxonomy)
        minute += rng.randint(1, 7)
        d = sharing.create_discussion(
            store, rng.choice(tutors), f"D{i}", "body",
            set(rng.sample(subjects, k=rng.randint(1, 3))),
            at=base + timedelta(minutes=minute))
        for _ in range(rng.randint(0, 2)):
            minute += rng.randint(1, 7)
            sharing.reply(store, rng.choice(tutors), d.id, "re",
                          at=base + timedelta(minutes=minute))
    assert len(store.state.discussions) == 50
    snap = store.current()
    queries = 0
    for _ in range(40):
        query = set(rng.sample(sorted(store.state.taxonomy), k=rng.randint(1, 3)))
        mine = [d.id for d in sharing.search_discussions(snap, query)]
        assert mine == oracle_search(store.events, query)
        queries += 1
    report(f"taxonomy integrity ({applied} applied ops, forest intact; "
           f"{queries} queries equal brute force)")


# 8 ---------------------------------------------------------------------------


def test_durability():
    """export -> import -> export byte-identical; every sampled log prefix
    replays to an invariant-satisfying state; same seed, same hash."""
    import tempfile
    from pathlib import Path

    store = Store()
    config = SimulationConfig(seed=88, groups=2, members_per_group=4, weeks=4)
    run_simulation(store, config)

    twin = Store()
    run_simulation(twin, SimulationConfig(seed=88, groups=2, members_per_group=4,
                                          weeks=4))
    assert twin.content_hash() == store.content_hash()

    with tempfile.TemporaryDirectory() as tmp:
        first = Path(tmp) / "a.jsonl"
        second = Path(tmp) / "b.jsonl"
        store.export_to(first)
        imported = Store()
        imported.import_from(first)
        imported.export_to(second)
        assert first.read_bytes() == second.read_bytes()
        assert imported.state == store.state

    events = store.events
    rng = random.Random(4)
    prefixes = sorted(set(rng.sample(range(1, len(events) + 1),
                                     k=min(40, len(events)))) | {1, len(events)})
    for cut in prefixes:
        prefix_state = state_mod.replay(events[:cut])
        state_mod.validate_state(prefix_state)
    report(f"durability (byte-identical round trip, {len(prefixes)} prefixes valid, "
           "hashes reproducible)")
