"""Deterministic course simulator.

Generates a plausible desk-scale history on top of a freshly seeded course:
weekly time entries, moods, questionnaire responses, task churn, deliverable
submissions with tutor feedback, blog posts, forum threads and end-of-course
evaluations. One ``random.Random(seed)`` drives every draw and events are
committed in a deterministic order with deterministic timestamps, so the same
config always produces a byte-identical event log.

The default knobs are tuned so a 26-week run accumulates about 3000 working
hours per group of 8 (the reference course's workload).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from datetime import date, datetime, time, timedelta, timezone

from . import core, indicators, seed as seeding, sharing
from .errors import InvalidConfig, NoCourse
from .model import (
    CONTRACT_QUESTIONS,
    CourseStatus,
    Dimension,
    Role,
    TaskStatus,
)
from .store import Store
from .weeks import week_of

#: Mean hours one member logs per week; 8 members x 26 weeks x this = 3000 h.
_WEEKLY_HOURS_TARGET = 3000.0 / (8 * 26)

DEFAULT_RATES: dict[str, float] = {
    "time_entries": 5.0,          # entries per member per week
    "weekly_hours": _WEEKLY_HOURS_TARGET,  # mean hours per member per week
    "frame_of_mind": 0.9,         # probability per member per week
    "self_reports": 0.6,          # probability per member per week
    "tasks": 1.5,                 # new tasks per group per week
    "task_updates": 0.7,          # advance probability per open task per week
    "reassignments": 0.06,        # probability per active task per week
    "deliverables": 1.0,          # deliverables per group per phase
    "deliverable_comments": 1.2,  # mean comments per submission
    "blog_posts": 0.25,           # personal posts per member per week
    "group_posts": 0.5,           # proposed group posts per group per week
    "forum_threads": 0.6,         # new discussions per week
    "forum_replies": 2.0,         # mean replies per discussion
    "taxonomy_proposals": 0.15,   # new subjects per week
    "contracts": 0.8,             # probability an actor opens a contract
    "evaluations": 1.0,           # end-of-run evaluation on/off
}


@dataclass
class SimulationConfig:
    seed: int = 42
    groups: int = 12
    members_per_group: int = 8
    weeks: int = 26
    start_year: int = 2025
    rates: dict[str, float] = field(default_factory=lambda: dict(DEFAULT_RATES))

    def validate(self) -> None:
        if not isinstance(self.seed, int):
            raise InvalidConfig("seed must be an integer")
        if self.groups < 1 or self.members_per_group < 2:
            raise InvalidConfig("need at least 1 group of 2 members")
        if self.weeks < 1:
            raise InvalidConfig("need at least one week")
        unknown = set(self.rates) - set(DEFAULT_RATES)
        if unknown:
            raise InvalidConfig(f"unknown rate knobs: {sorted(unknown)}")
        for key, value in self.rates.items():
            if not isinstance(value, (int, float)) or value < 0:
                raise InvalidConfig(f"rate {key} must be a non-negative number")

    def rate(self, key: str) -> float:
        return float(self.rates.get(key, 0.0))

    def all_zero(self) -> bool:
        return all(self.rate(key) == 0 for key in DEFAULT_RATES)


def run_simulation(store: Store, config: SimulationConfig) -> int:
    """Seed (if the store is empty) and simulate; returns events appended."""
    config.validate()
    if store.is_empty():
        seeding.seed_course(store, config.groups, config.members_per_group,
                            start_year=config.start_year)
    return simulate(store, config)


def simulate(store: Store, config: SimulationConfig) -> int:
    config.validate()
    course = store.state.course
    if course is None:
        raise NoCourse("seed a course before simulating")
    if config.all_zero():
        return 0
    if course.status != CourseStatus.SETUP:
        raise InvalidConfig("simulate expects a freshly seeded course")

    rng = random.Random(config.seed)
    sim = _Simulation(store, config, rng)
    before = store.seq
    sim.run()
    return store.seq - before


class _Simulation:
    def __init__(self, store: Store, config: SimulationConfig, rng: random.Random):
        self.store = store
        self.config = config
        self.rng = rng
        self.state = store.state
        course = store.state.course
        assert course is not None
        start = course.calendar[0].start
        self.monday0 = start - timedelta(days=start.weekday())
        self.director = next(a.id for a in self.state.actors.values()
                             if a.role == Role.DIRECTOR)
        # deliverable id -> (submit_day, accept_delay_days, comment_count)
        self.deliverable_plan: dict[str, tuple[date, int, int]] = {}
        self._counter = 0

    # -- scheduling helpers -------------------------------------------------

    def _at(self, day: date, start_hour: int, end_hour: int) -> datetime:
        hour = self.rng.randint(start_hour, end_hour - 1)
        minute = self.rng.randint(0, 59)
        second = self.rng.randint(0, 59)
        return datetime.combine(day, time(hour, minute, second), tzinfo=timezone.utc)

    def _count(self, rate: float) -> int:
        whole = int(rate)
        return whole + (1 if self.rng.random() < rate - whole else 0)

    def run(self) -> None:
        config = self.config

        clock = datetime.combine(self.monday0, time(8, 0), tzinfo=timezone.utc)
        core.advance_course(self.store, self.director, at=clock)
        self._plan_deliverables()
        self._open_contracts()
        events = self.store.events
        if events:
            clock = max(clock, events[-1].timestamp)

        for week in range(config.weeks):
            monday = self.monday0 + timedelta(days=7 * week)
            period = week_of(monday)
            actions: list[tuple[datetime, int, object]] = []

            def put(ts: datetime, fn) -> None:
                self._counter += 1
                actions.append((ts, self._counter, fn))

            for group in sorted(self.state.groups.values(), key=lambda g: g.id):
                self._week_time_entries(group, monday, put)
                self._week_moods(group, monday, period, put)
                self._week_self_reports(group, monday, period, put)
                self._week_tasks(group, monday, put)
                self._week_deliverables(group, monday, put)
                self._week_blogs(group, monday, put)
            self._week_forum(monday, put)
            if week == config.weeks - 1 and config.rate("evaluations") > 0:
                self._final_evaluations(monday, put)

            actions.sort(key=lambda item: (item[0], item[1]))
            # Actions run in schedule order; the clock never steps back even
            # when a slot was drawn earlier than a predecessor's.
            for ts, _, fn in actions:
                clock = max(clock, ts)
                fn(clock)  # type: ignore[operator]

    # -- planning -------------------------------------------------------------

    def _plan_deliverables(self) -> None:
        config, rng = self.config, self.rng
        per_phase = config.rate("deliverables")
        if per_phase == 0:
            return
        course = self.state.course
        assert course is not None
        created_at = datetime.combine(self.monday0, time(8, 30), tzinfo=timezone.utc)
        for group in sorted(self.state.groups.values(), key=lambda g: g.id):
            for window in course.calendar:
                for _ in range(self._count(per_phase)):
                    due = window.end - timedelta(days=rng.randint(0, 10))
                    deliverable = core.add_deliverable(
                        self.store, group.leader_id, group.id,
                        title=f"{window.phase.value} deliverable ({group.name})",
                        due=due, at=created_at,
                    )
                    submit_day = due + timedelta(days=rng.randint(-3, 4))
                    accept_delay = rng.randint(0, 4)
                    comments = self._count(config.rate("deliverable_comments"))
                    self.deliverable_plan[deliverable.id] = (submit_day, accept_delay, comments)

    def _open_contracts(self) -> None:
        prob = self.config.rate("contracts")
        if prob == 0:
            return
        at = datetime.combine(self.monday0, time(9, 0), tzinfo=timezone.utc)
        holders = [a for a in sorted(self.state.actors.values(), key=lambda a: a.id)
                   if a.role in (Role.STUDENT, Role.PROJECT_LEADER,
                                 Role.TECHNICAL_TUTOR, Role.MANAGEMENT_TUTOR)]
        for actor in holders:
            if self.rng.random() >= prob:
                continue
            answers = {q: f"{actor.name}: {q[:-1].lower()} - entry {i + 1}"
                       for i, q in enumerate(CONTRACT_QUESTIONS)}
            sharing.init_learning_contract(self.store, actor.id, actor.id, answers, at=at)

    # -- weekly generators ------------------------------------------------------

    def _week_time_entries(self, group, monday: date, put) -> None:
        rng, config = self.rng, self.config
        entries = config.rate("time_entries")
        weekly_hours = config.rate("weekly_hours")
        if entries == 0 or weekly_hours == 0:
            return
        for member_id in sorted(group.member_ids):
            k = self._count(entries)
            if k == 0:
                continue  # a silent member-week; orientation measures this
            mean_entry = weekly_hours / k
            low = min(0.5, mean_entry)
            high = 2 * mean_entry - low
            days = sorted(rng.sample(range(5), k=min(k, 5)))
            while len(days) < k:
                days.append(rng.randint(0, 4))
            for offset in sorted(days):
                day = monday + timedelta(days=offset)
                hours = min(24.0, max(0.0, rng.uniform(low, high)))
                put(self._at(day, 18, 20),
                    lambda ts, m=member_id, d=day, h=hours: core.record_time_entry(
                        self.store, m, m, d, h, at=ts))

    def _week_moods(self, group, monday: date, period: str, put) -> None:
        prob = self.config.rate("frame_of_mind")
        for member_id in sorted(group.member_ids):
            if self.rng.random() >= prob:
                continue
            score = self.rng.choices([1, 2, 3, 4, 5], weights=[1, 2, 4, 5, 3])[0]
            day = monday + timedelta(days=self.rng.randint(0, 4))
            put(self._at(day, 17, 18),
                lambda ts, m=member_id, s=score: indicators.record_frame_of_mind(
                    self.store, m, m, period, s, at=ts))

    def _week_self_reports(self, group, monday: date, period: str, put) -> None:
        prob = self.config.rate("self_reports")
        questionnaire = self.store.questionnaire
        for member_id in sorted(group.member_ids):
            if self.rng.random() >= prob:
                continue
            items = []
            for dim in Dimension:
                prompts = questionnaire.prompts[dim]
                for prompt in self.rng.sample(prompts, k=self.rng.randint(1, len(prompts))):
                    items.append({"dimension": dim.value, "prompt": prompt,
                                  "response": self.rng.randint(1, 5)})
            day = monday + timedelta(days=4)
            put(self._at(day, 16, 17),
                lambda ts, m=member_id, it=items: indicators.record_self_report(
                    self.store, m, m, period, it, at=ts))

    def _week_tasks(self, group, monday: date, put) -> None:
        rng, config = self.rng, self.config
        for _ in range(self._count(config.rate("tasks"))):
            day = monday + timedelta(days=rng.randint(0, 1))

            def create(ts, g=group, base=day):
                members = sorted(g.member_ids)
                existing = [t.id for t in self.state.group_tasks(g.id)]
                deps = set(rng.sample(existing, k=min(len(existing), rng.randint(0, 2)))) \
                    if existing and rng.random() < 0.5 else set()
                core.add_task(
                    self.store, rng.choice(members), g.id,
                    title=f"Task {len(self.state.tasks) + 1}",
                    planned_start=base, planned_end=base + timedelta(days=rng.randint(3, 21)),
                    assignee_id=rng.choice(members) if rng.random() < 0.8 else None,
                    dependency_ids=deps, at=ts,
                )

            put(self._at(day, 9, 11), create)

        advance_prob = config.rate("task_updates")
        reassign_prob = config.rate("reassignments")
        day = monday + timedelta(days=rng.randint(2, 4))

        def churn(ts, g=group):
            members = sorted(g.member_ids)
            for task in sorted(self.state.group_tasks(g.id), key=lambda t: t.id):
                actor = rng.choice(members)
                if task.status == TaskStatus.PLANNED and rng.random() < advance_prob:
                    changes: dict = {"status": TaskStatus.ACTIVE.value}
                    # sometimes work starts before anyone owns the task; the
                    # leadership indicator exists to surface exactly that
                    if task.assignee_id is None and rng.random() < 0.7:
                        changes["assignee_id"] = rng.choice(members)
                    core.update_task(self.store, actor, g.id, task.id, changes, at=ts)
                elif task.status == TaskStatus.ACTIVE:
                    if rng.random() < reassign_prob:
                        others = [m for m in members if m != task.assignee_id]
                        core.update_task(self.store, actor, g.id, task.id,
                                         {"assignee_id": rng.choice(others)}, at=ts)
                    if rng.random() < advance_prob * 0.6:
                        core.update_task(self.store, actor, g.id, task.id,
                                         {"status": TaskStatus.DONE.value}, at=ts)

        if advance_prob > 0 or reassign_prob > 0:
            put(self._at(day, 11, 13), churn)

    def _week_deliverables(self, group, monday: date, put) -> None:
        rng = self.rng
        sunday = monday + timedelta(days=6)
        for deliverable in sorted(self.state.group_deliverables(group.id), key=lambda d: d.id):
            plan = self.deliverable_plan.get(deliverable.id)
            if plan is None:
                continue
            submit_day, accept_delay, comments = plan
            if monday <= submit_day <= sunday:
                member = rng.choice(sorted(group.member_ids))
                put(self._at(submit_day, 8, 11),
                    lambda ts, m=member, d=deliverable: core.submit_deliverable(
                        self.store, m, d.group_id, d.id, at=ts))
            accept_day = submit_day + timedelta(days=accept_delay)
            if monday <= accept_day <= sunday:
                tutor = group.technical_tutor_id
                put(self._at(accept_day, 13, 15),
                    lambda ts, t=tutor, d=deliverable: core.accept_deliverable(
                        self.store, t, d.group_id, d.id, at=ts))
                for i in range(comments):
                    commenter = rng.choice([group.technical_tutor_id,
                                            group.management_tutor_id, group.leader_id])
                    put(self._at(accept_day, 15, 18),
                        lambda ts, c=commenter, d=deliverable, n=i: core.comment_deliverable(
                            self.store, c, d.group_id, d.id,
                            f"Review note {n + 1} on {d.title}", at=ts))

    def _week_blogs(self, group, monday: date, put) -> None:
        rng, config = self.rng, self.config
        post_prob = config.rate("blog_posts")
        for member_id in sorted(group.member_ids):
            if rng.random() < post_prob:
                day = monday + timedelta(days=rng.randint(0, 4))
                put(self._at(day, 19, 21),
                    lambda ts, m=member_id: sharing.write_student_post(
                        self.store, m,
                        f"Week notes from {m}: what moved and what blocked us.", at=ts))
        for _ in range(self._count(config.rate("group_posts"))):
            member = rng.choice(sorted(group.member_ids))
            day = monday + timedelta(days=rng.randint(0, 3))
            confirm = rng.random() < 0.8

            def propose(ts, m=member, g=group, do_confirm=confirm):
                post = sharing.propose_group_post(
                    self.store, m, g.id, f"Group update drafted by {m}.", at=ts)
                if do_confirm:
                    sharing.confirm_group_post(self.store, g.leader_id, g.id, post.id, at=ts)

            put(self._at(day, 18, 19), propose)

    def _week_forum(self, monday: date, put) -> None:
        rng, config = self.rng, self.config
        tutors = sorted(a.id for a in self.state.actors.values()
                        if a.role in (Role.TECHNICAL_TUTOR, Role.MANAGEMENT_TUTOR))
        if not tutors:
            return
        for _ in range(self._count(config.rate("taxonomy_proposals"))):
            day = monday + timedelta(days=rng.randint(0, 4))

            def propose_subject(ts):
                parents = sorted(self.state.taxonomy)
                parent = rng.choice(parents)
                label = f"Practice note {len(self.state.taxonomy) + 1}"
                sharing.propose_subject(self.store, rng.choice(tutors), parent, label, at=ts)

            put(self._at(day, 12, 13), propose_subject)
        for _ in range(self._count(config.rate("forum_threads"))):
            day = monday + timedelta(days=rng.randint(0, 4))
            replies = self._count(config.rate("forum_replies"))

            def open_thread(ts, n_replies=replies):
                tags = set(rng.sample(sorted(self.state.taxonomy), k=rng.randint(1, 3)))
                opener = rng.choice(tutors)
                discussion = sharing.create_discussion(
                    self.store, opener, f"How do you handle week {week_of(monday)}?",
                    "Sharing what worked with my group this week.", tags, at=ts)
                for i in range(n_replies):
                    sharing.reply(self.store, rng.choice(tutors), discussion.id,
                                  f"Reply {i + 1}: same here, with a twist.", at=ts)

            put(self._at(day, 13, 15), open_thread)

    def _final_evaluations(self, monday: date, put) -> None:
        rng = self.rng
        day = monday + timedelta(days=4)
        for group in sorted(self.state.groups.values(), key=lambda g: g.id):
            tutor = group.technical_tutor_id
            grade = round(rng.uniform(8, 18) * 2) / 2

            def evaluate(ts, g=group, t=tutor, base=grade):
                indicators.evaluate_group(self.store, t, g.id, base, at=ts)
                for member_id in sorted(g.member_ids):
                    adjustment = round(rng.uniform(-2, 2), 1)
                    indicators.evaluate_student(self.store, t, member_id, adjustment, at=ts)

            put(self._at(day, 14, 16), evaluate)
