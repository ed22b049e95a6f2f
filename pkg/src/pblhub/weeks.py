"""ISO-week reporting periods.

A reporting period is one ISO calendar week written ``YYYY-Www`` (e.g.
``2025-W45``). The four-digit year keeps the string form lexicographically
sortable across year boundaries.
"""

from __future__ import annotations

import re
from datetime import date, timedelta

from .errors import InvalidPeriod

_PERIOD_RE = re.compile(r"^(\d{4})-W(\d{2})$")


def week_of(d: date) -> str:
    """Period containing calendar date ``d``."""
    iso = d.isocalendar()
    return f"{iso[0]:04d}-W{iso[1]:02d}"


def parse_period(period: str) -> tuple[int, int]:
    m = _PERIOD_RE.match(period)
    if not m:
        raise InvalidPeriod(f"not an ISO week period: {period!r}")
    year, week = int(m.group(1)), int(m.group(2))
    try:
        date.fromisocalendar(year, week, 1)
    except ValueError as exc:
        raise InvalidPeriod(str(exc)) from None
    return year, week


def period_bounds(period: str) -> tuple[date, date]:
    """(monday, sunday) of the period."""
    year, week = parse_period(period)
    monday = date.fromisocalendar(year, week, 1)
    return monday, monday + timedelta(days=6)


def previous_period(period: str) -> str:
    monday, _ = period_bounds(period)
    return week_of(monday - timedelta(days=1))
