"""Regenerate the frontend test fixtures from real API responses.

Seeds a small course, simulates a few weeks, then captures the payloads the
browser client consumes. Run from the repository root:

    python3 scripts/export_ui_fixtures.py
"""

from __future__ import annotations

import json
from pathlib import Path

from fastapi.testclient import TestClient

from pblhub import sharing
from pblhub.api import create_app
from pblhub.config import ServiceConfig
from pblhub.model import CONTRACT_QUESTIONS
from pblhub.simulate import SimulationConfig, run_simulation
from pblhub.store import Store
from pblhub.weeks import week_of

OUT = Path(__file__).resolve().parent.parent / "frontend" / "tests" / "fixtures"


def main() -> None:
    store = Store()
    run_simulation(store, SimulationConfig(seed=1301, groups=2, members_per_group=4,
                                           weeks=4))
    group = store.state.groups["grp-0001"]
    leader = group.leader_id
    student = next(m for m in sorted(group.member_ids) if m != leader)
    tutor = group.technical_tutor_id

    # extras dated just after the simulated history, inside its last week:
    # a pending draft, a contract, a submitted deliverable, a skills list
    from datetime import date, timedelta
    from pblhub import core

    clock = store.events[-1].timestamp

    def tick():
        nonlocal clock
        clock += timedelta(minutes=5)
        return clock

    sharing.propose_group_post(store, student, group.id,
                               "Pending draft for the queue", at=tick())
    answers = {q: "committed: " + q for q in CONTRACT_QUESTIONS}
    sharing.init_learning_contract(store, student, student, answers, at=tick())
    extra = core.add_deliverable(store, leader, group.id, "Interim review pack",
                                 due=date(2025, 11, 20), at=tick())
    core.submit_deliverable(store, student, group.id, extra.id, at=tick())
    core.add_skill(store, leader, group.id, "Plan with a Gantt chart", at=tick())
    core.add_skill(store, leader, group.id, "Run a steering meeting", at=tick())
    core.set_skill_done(store, leader, group.id, 0, True, at=tick())

    period = week_of(clock.date())
    app = create_app(store, ServiceConfig())
    fixtures: dict[str, object] = {}
    with TestClient(app) as client:
        def login(actor_id: str) -> dict:
            body = client.post("/api/session", json={"actor_id": actor_id}).json()
            return {"Authorization": f"Bearer {body['token']}"}, body

        student_headers, student_session = login(student)
        leader_headers, leader_session = login(leader)
        tutor_headers, tutor_session = login(tutor)
        _, manager_session = login("mgr-tech")
        _, teacher_session = login("teacher")
        _, director_session = login("director")

        def strip(session: dict) -> dict:
            return {k: v for k, v in session.items() if k != "token"}

        fixtures["sessions"] = {
            "student": strip(student_session),
            "leader": strip(leader_session),
            "tutor": strip(tutor_session),
            "manager": strip(manager_session),
            "teacher": strip(teacher_session),
            "director": strip(director_session),
        }
        fixtures["course"] = client.get("/api/course", headers=student_headers).json()
        fixtures["decision_table"] = client.get("/api/decision-table",
                                                headers=tutor_headers).json()
        fixtures["dashboard"] = client.get(
            f"/api/groups/{group.id}/dashboard?period={period}",
            headers=leader_headers).json()
        fixtures["profile"] = client.get(f"/api/students/{student}/metacog",
                                         headers=student_headers).json()
        fixtures["tutor_view"] = client.get(f"/api/tutor/view?period={period}",
                                            headers=tutor_headers).json()
        fixtures["taxonomy"] = client.get("/api/forum/taxonomy",
                                          headers=tutor_headers).json()
        fixtures["discussions"] = client.get("/api/forum/discussions",
                                             headers=tutor_headers).json()
        fixtures["student_posts"] = client.get(f"/api/blogs/{student}/posts",
                                               headers=student_headers).json()
        fixtures["group_posts_leader"] = client.get(f"/api/blogs/{group.id}/posts",
                                                    headers=leader_headers).json()
        fixtures["tasks"] = client.get(f"/api/groups/{group.id}/tasks",
                                       headers=leader_headers).json()
        fixtures["deliverables"] = client.get(f"/api/groups/{group.id}/deliverables",
                                              headers=leader_headers).json()
        fixtures["contract"] = client.get(f"/api/contracts/{student}",
                                          headers=student_headers).json()

    OUT.mkdir(parents=True, exist_ok=True)
    for name, payload in fixtures.items():
        path = OUT / f"{name}.json"
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n",
                        encoding="utf-8")
        print(f"wrote {path.relative_to(OUT.parent.parent.parent)}")


if __name__ == "__main__":
    main()
