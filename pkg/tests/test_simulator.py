"""Simulator determinism, knobs, and workload calibration."""

from __future__ import annotations

import pytest

from pblhub.errors import InvalidConfig
from pblhub.simulate import DEFAULT_RATES, SimulationConfig, run_simulation, simulate
from pblhub.store import Store
from pblhub import seed


def test_same_seed_twice_gives_identical_log_hash():
    a, b = Store(), Store()
    config = SimulationConfig(seed=42, groups=2, members_per_group=4, weeks=4)
    run_simulation(a, config)
    run_simulation(b, SimulationConfig(seed=42, groups=2, members_per_group=4, weeks=4))
    assert a.content_hash() == b.content_hash()


def test_different_seeds_diverge():
    a, b = Store(), Store()
    run_simulation(a, SimulationConfig(seed=1, groups=1, members_per_group=3, weeks=2))
    run_simulation(b, SimulationConfig(seed=2, groups=1, members_per_group=3, weeks=2))
    assert a.content_hash() != b.content_hash()


def test_zero_rates_produce_empty_history():
    store = Store()
    seed.seed_course(store, groups=1, members_per_group=3)
    before = store.seq
    zero = {k: 0.0 for k in DEFAULT_RATES}
    appended = simulate(store, SimulationConfig(seed=1, groups=1, members_per_group=3,
                                                weeks=4, rates=zero))
    assert appended == 0
    assert store.seq == before


def test_rate_knob_scales_kind_counts():
    quiet, busy = Store(), Store()
    base = {k: 0.0 for k in DEFAULT_RATES}
    base.update({"time_entries": 1.0, "weekly_hours": 5.0})
    run_simulation(quiet, SimulationConfig(seed=3, groups=1, members_per_group=3,
                                           weeks=3, rates=dict(base)))
    base["time_entries"] = 3.0
    run_simulation(busy, SimulationConfig(seed=3, groups=1, members_per_group=3,
                                          weeks=3, rates=dict(base)))
    assert len(busy.state.time_entries) > len(quiet.state.time_entries)


def test_invalid_configs_rejected():
    with pytest.raises(InvalidConfig):
        SimulationConfig(seed=1, groups=0).validate()
    with pytest.raises(InvalidConfig):
        SimulationConfig(seed=1, weeks=0).validate()
    with pytest.raises(InvalidConfig):
        SimulationConfig(seed=1, rates={"bogus_knob": 1.0}).validate()
    with pytest.raises(InvalidConfig):
        SimulationConfig(seed=1, rates={"time_entries": -1.0}).validate()


def test_simulate_requires_fresh_seeded_course():
    store = Store()
    with pytest.raises(Exception):
        simulate(store, SimulationConfig(seed=1))
    run_simulation(store, SimulationConfig(seed=1, groups=1, members_per_group=3, weeks=1))
    with pytest.raises(InvalidConfig):
        simulate(store, SimulationConfig(seed=1, groups=1, members_per_group=3, weeks=1))


def test_seeding_twice_rejected():
    from pblhub.errors import StoreNotEmpty
    store = Store()
    seed.seed_paper_course(store)
    with pytest.raises(StoreNotEmpty):
        seed.seed_paper_course(store)


def test_default_knobs_land_near_reference_workload():
    # Scaled-down smoke check; the full 26-week x 12-group run is in acceptance.
    store = Store()
    config = SimulationConfig(seed=8, groups=1, members_per_group=8, weeks=26)
    run_simulation(store, config)
    from pblhub import indicators
    from pblhub.weeks import week_of
    snap = store.current()
    last = week_of(max(e.date for e in store.state.time_entries))
    dash = indicators.compute_project_dashboard(snap, "grp-0001", last)
    assert 2700 <= dash.working_time.total_cumulative <= 3300
