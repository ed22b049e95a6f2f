"""Seed the reference course, simulate a semester, and print what each
role sees: group dashboard, teamwork ratios, a reflective profile, and a
slice of the tutors' forum.

    python3 scripts/run_course_demo.py [--seed N] [--weeks W]
"""

from __future__ import annotations

import argparse

from pblhub import indicators
from pblhub.simulate import SimulationConfig, run_simulation
from pblhub.store import Store
from pblhub.weeks import week_of


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--weeks", type=int, default=26)
    parser.add_argument("--groups", type=int, default=12)
    args = parser.parse_args()

    store = Store()
    config = SimulationConfig(seed=args.seed, weeks=args.weeks, groups=args.groups)
    appended = run_simulation(store, config)
    print(f"simulated {appended} events (log hash {store.content_hash()[:16]})")

    snap = store.current()
    period = week_of(max(e.date for e in store.state.time_entries))
    group = store.state.groups["grp-0001"]

    dash = indicators.compute_project_dashboard(snap, group.id, period)
    print(f"\n== {group.name} dashboard, week {period} ==")
    print(f"frame of mind: {dash.frame_of_mind}")
    wt = dash.working_time
    print(f"hours: {wt.total_period:.1f} this week, {wt.total_cumulative:.0f} total")
    print(f"tasks: {dash.open_tasks}")
    print(f"delay days: {dash.total_delay_days}")

    ti = indicators.compute_teamwork_indicators(snap, group.id, period)
    print("\n== teamwork ==")
    for name, value in ti.values().items():
        flag = "  (no data)" if name in ti.no_data else ""
        print(f"{name:>16}: {value:.2f}{flag}")

    student = sorted(group.member_ids)[1]
    profile = indicators.compute_metacognitive_profile(snap, student)
    latest = max(profile.periods) if profile.periods else None
    print(f"\n== reflective profile of {student} ({latest}) ==")
    if latest:
        for dim, score in sorted(profile.periods[latest].items()):
            trend = profile.trends.get(dim)
            arrow = "" if trend is None else f"  trend {trend:+.2f}"
            print(f"{dim:>14}: {score:.2f}{arrow}")

    view = indicators.compute_learning_view(snap, group.technical_tutor_id, period)
    print(f"\n== tutor {view.tutor_id} monitors ==")
    for g in view.groups:
        print(f"{g['group_id']}: {len(g['students'])} students, "
              f"{len(g['recent_posts'])} recent posts")

    discussions = sorted(store.state.discussions.values(), key=lambda d: d.id)[:3]
    print(f"\n== forum ({len(store.state.discussions)} discussions) ==")
    for d in discussions:
        labels = [store.state.taxonomy[t].label for t in sorted(d.tags)
                  if t in store.state.taxonomy]
        print(f"- {d.title}  [{', '.join(labels)}] ({len(d.messages)} messages)")


if __name__ == "__main__":
    main()
