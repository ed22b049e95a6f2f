"""Administrative command line.

    pblhub seed-paper-course       build the reference 12x8 course
    pblhub simulate --seed N --weeks W
    pblhub serve                   run the HTTP service
    pblhub export --out FILE / import --in FILE
    pblhub decision-table --out FILE
    pblhub dashboard-snapshot --group G --period YYYY-Www [--out FILE]

Storage and port come from the config file (JSON) and PBLHUB_* environment
overrides; --storage wins over both.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import indicators, policy, seed as seeding
from .api import serve as run_server
from .config import ServiceConfig
from .errors import DomainError
from .questionnaire import Questionnaire
from .simulate import DEFAULT_RATES, SimulationConfig, simulate as run_sim
from .store import Store


def _open_store(config: ServiceConfig) -> Store:
    questionnaire = (Questionnaire.from_file(config.questionnaire)
                     if config.questionnaire else None)
    return Store(path=config.storage, questionnaire=questionnaire)


def _config(ctx: click.Context) -> ServiceConfig:
    return ctx.obj


@click.group()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None,
              help="JSON config file (port, storage, questionnaire ...)")
@click.option("--storage", default=None, help="Event log path override")
@click.pass_context
def main(ctx: click.Context, config_path: str | None, storage: str | None) -> None:
    config = ServiceConfig.load(config_path)
    if storage is not None:
        config.storage = storage
    ctx.obj = config


@main.command("serve")
@click.option("--port", type=int, default=None)
@click.option("--host", default=None)
@click.pass_context
def serve_cmd(ctx: click.Context, port: int | None, host: str | None) -> None:
    """Run the HTTP JSON API on the configured port."""
    config = _config(ctx)
    if port is not None:
        config.port = port
    if host is not None:
        config.host = host
    store = _open_store(config)
    click.echo(f"serving on {config.host}:{config.port} "
               f"(storage {config.storage}, seq {store.seq})")
    run_server(store, config)


@main.command("seed-paper-course")
@click.option("--start-year", type=int, default=2025, show_default=True)
@click.pass_context
def seed_cmd(ctx: click.Context, start_year: int) -> None:
    """Create the reference course: 12 groups x 8 students, full staff."""
    store = _open_store(_config(ctx))
    seeding.seed_paper_course(store, start_year=start_year)
    state = store.state
    click.echo(
        f"course {state.course.id}: {len(state.groups)} groups, "
        f"{sum(1 for a in state.actors.values() if a.role.value in ('Student', 'ProjectLeader'))} students, "
        f"{len(state.taxonomy)} taxonomy subjects, seq {store.seq}"
    )


@main.command("simulate")
@click.option("--seed", "seed_value", type=int, default=42, show_default=True)
@click.option("--weeks", type=int, default=26, show_default=True)
@click.option("--groups", type=int, default=12, show_default=True)
@click.option("--members-per-group", type=int, default=8, show_default=True)
@click.option("--rate", "rates", multiple=True, metavar="KNOB=VALUE",
              help="Override an event-rate knob; repeatable.")
@click.pass_context
def simulate_cmd(ctx: click.Context, seed_value: int, weeks: int, groups: int,
                 members_per_group: int, rates: tuple[str, ...]) -> None:
    """Generate a deterministic history on a seeded course (seeds if empty)."""
    store = _open_store(_config(ctx))
    knobs = dict(DEFAULT_RATES)
    for pair in rates:
        key, _, value = pair.partition("=")
        knobs[key] = float(value)
    config = SimulationConfig(seed=seed_value, weeks=weeks, groups=groups,
                              members_per_group=members_per_group, rates=knobs)
    if store.is_empty():
        seeding.seed_course(store, groups, members_per_group)
    appended = run_sim(store, config)
    click.echo(f"appended {appended} events, seq {store.seq}, "
               f"log hash {store.content_hash()}")


@main.command("export")
@click.option("--out", "out_path", required=True, type=click.Path())
@click.pass_context
def export_cmd(ctx: click.Context, out_path: str) -> None:
    """Write the canonical event log, one record per line."""
    store = _open_store(_config(ctx))
    n = store.export_to(out_path)
    click.echo(f"exported {n} events to {out_path}")


@main.command("import")
@click.option("--in", "in_path", required=True, type=click.Path(exists=True))
@click.pass_context
def import_cmd(ctx: click.Context, in_path: str) -> None:
    """Load a canonical event log into an empty store."""
    store = _open_store(_config(ctx))
    n = store.import_from(in_path)
    click.echo(f"imported {n} events, log hash {store.content_hash()}")


@main.command("decision-table")
@click.option("--out", "out_path", required=True, type=click.Path())
@click.pass_context
def decision_table_cmd(ctx: click.Context, out_path: str) -> None:
    """Export the exhaustive policy decision table as CSV."""
    store = _open_store(_config(ctx))
    rows = policy.decision_table(store.state)
    Path(out_path).write_text(policy.decision_table_csv(rows), encoding="utf-8")
    click.echo(f"wrote {len(rows)} decision rows to {out_path}")


@main.command("dashboard-snapshot")
@click.option("--group", "group_id", required=True)
@click.option("--period", required=True, metavar="YYYY-Www")
@click.option("--out", "out_path", type=click.Path(), default=None)
@click.pass_context
def snapshot_cmd(ctx: click.Context, group_id: str, period: str,
                 out_path: str | None) -> None:
    """Dump every dashboard and indicator field for one (group, period)."""
    store = _open_store(_config(ctx))
    doc = indicators.dashboard_snapshot(store.current(), group_id, period)
    text = json.dumps(doc, indent=2, sort_keys=True)
    if out_path:
        Path(out_path).write_text(text + "\n", encoding="utf-8")
        click.echo(f"wrote snapshot to {out_path}")
    else:
        click.echo(text)


def entry() -> None:
    try:
        main(standalone_mode=True)
    except DomainError as exc:
        click.echo(f"error [{exc.code}]: {exc.message}", err=True)
        sys.exit(1)


if __name__ == "__main__":
    entry()
