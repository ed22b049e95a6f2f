"""Event store: one serialized append point, durable JSONL log, snapshots.

Concurrency model: a single RLock serializes every mutation; readers either
take the same lock for short computations or replay a prefix into a private
snapshot. No caller can observe a partially applied event.
"""

from __future__ import annotations

import hashlib
import os
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Callable, Iterator

from . import state as state_mod
from .errors import CorruptStore, InvalidTimestamp, IoFailure, SchemaMismatch
from .events import ActivityEvent, EventKind, event_from_line
from .questionnaire import Questionnaire
from .state import State


def utcnow() -> datetime:
    return datetime.now(timezone.utc)


@dataclass(frozen=True)
class Snapshot:
    """A consistent view of the log as of ``seq``.

    ``state`` and ``events`` must not be mutated by callers. Snapshots taken
    at the live head share structures with the store; hold the store lock for
    the duration of any computation over them (read() does this for you).
    """

    seq: int
    state: State
    events: tuple[ActivityEvent, ...]


class Store:
    """Append-only event log plus the state folded from it."""

    def __init__(self, path: str | Path | None = None,
                 questionnaire: Questionnaire | None = None):
        self.lock = threading.RLock()
        self.questionnaire = questionnaire or Questionnaire.default()
        self._events: list[ActivityEvent] = []
        self._state = State()
        self._path = Path(path) if path is not None else None
        self._fh = None
        if self._path is not None:
            self._recover_and_open()

    # -- durability -------------------------------------------------------

    def _recover_and_open(self) -> None:
        """Replay the durable log, dropping a torn trailing record if any."""
        path = self._path
        assert path is not None
        path.parent.mkdir(parents=True, exist_ok=True)
        good_bytes = 0
        if path.exists():
            with path.open("rb") as fh:
                offset = 0
                for raw in fh:
                    if not raw.endswith(b"\n"):
                        break  # torn tail from a crash mid-append
                    line = raw.decode("utf-8").rstrip("\n")
                    try:
                        ev = event_from_line(line, seq_hint=len(self._events) + 1)
                    except SchemaMismatch:
                        if offset + len(raw) < path.stat().st_size:
                            raise CorruptStore(
                                f"undecodable record mid-log at seq {len(self._events) + 1}"
                            ) from None
                        break  # corrupt final record: treat as torn
                    if ev.seq != len(self._events) + 1:
                        raise CorruptStore(f"seq gap at {ev.seq}")
                    state_mod.apply(self._state, ev)
                    self._events.append(ev)
                    offset += len(raw)
                    good_bytes = offset
            if good_bytes < path.stat().st_size:
                with path.open("r+b") as fh:
                    fh.truncate(good_bytes)
        self._fh = path.open("a", encoding="utf-8")

    def close(self) -> None:
        with self.lock:
            if self._fh is not None:
                self._fh.close()
                self._fh = None

    # -- the single append point ------------------------------------------

    def commit(self, kind: EventKind, actor_id: str, payload: dict[str, Any],
               at: datetime | None = None) -> ActivityEvent:
        """Validate timing, assign the next seq, persist, fold into state."""
        with self.lock:
            last_ts = self._events[-1].timestamp if self._events else None
            if at is None:
                at = utcnow()
                if last_ts is not None and at < last_ts:
                    at = last_ts  # wall clock hiccup; keep the log ordered
            else:
                if at.tzinfo is None:
                    raise InvalidTimestamp("timestamps must be timezone-aware")
                if last_ts is not None and at < last_ts:
                    raise InvalidTimestamp(
                        f"timestamp {at.isoformat()} precedes log head {last_ts.isoformat()}"
                    )
            ev = ActivityEvent(
                seq=len(self._events) + 1,
                timestamp=at,
                actor_id=actor_id,
                kind=kind,
                payload=payload,
            )
            state_mod.apply(self._state, ev)
            self._events.append(ev)
            if self._fh is not None:
                self._fh.write(ev.to_line() + "\n")
                self._fh.flush()
            return ev

    # -- reads --------------------------------------------------------------

    @property
    def seq(self) -> int:
        with self.lock:
            return len(self._events)

    @property
    def state(self) -> State:
        return self._state

    @property
    def events(self) -> tuple[ActivityEvent, ...]:
        with self.lock:
            return tuple(self._events)

    def is_empty(self) -> bool:
        with self.lock:
            return not self._events

    def current(self) -> Snapshot:
        """Live snapshot; see Snapshot's locking contract."""
        with self.lock:
            return Snapshot(seq=len(self._events), state=self._state,
                            events=tuple(self._events))

    def snapshot_at(self, seq: int) -> Snapshot:
        """Private snapshot of the first ``seq`` events, rebuilt by replay."""
        with self.lock:
            prefix = tuple(self._events[:seq])
        return Snapshot(seq=len(prefix), state=state_mod.replay(prefix), events=prefix)

    def read(self, fn: Callable[[Snapshot], Any]) -> Any:
        """Run a read-only computation against a consistent live snapshot."""
        with self.lock:
            return fn(self.current())

    def event_by_seq(self, seq: int) -> ActivityEvent | None:
        with self.lock:
            if 1 <= seq <= len(self._events):
                return self._events[seq - 1]
            return None

    # -- export / import ----------------------------------------------------

    def export_lines(self) -> Iterator[str]:
        for ev in self.events:
            yield ev.to_line() + "\n"

    def export_bytes(self) -> bytes:
        return "".join(self.export_lines()).encode("utf-8")

    def export_to(self, path: str | Path) -> int:
        """Write the canonical log; returns number of records."""
        data = self.export_bytes()
        try:
            with open(path, "wb") as fh:
                fh.write(data)
                fh.flush()
                os.fsync(fh.fileno())
        except OSError as exc:
            raise IoFailure(str(exc)) from exc
        return self.seq

    def import_from(self, path: str | Path) -> int:
        """Strictly load a canonical log into this (empty) store."""
        from .errors import StoreNotEmpty

        with self.lock:
            if self._events:
                raise StoreNotEmpty("import requires an empty store")
            try:
                with open(path, "rb") as fh:
                    raw = fh.read()
            except OSError as exc:
                raise IoFailure(str(exc)) from exc
            if raw and not raw.endswith(b"\n"):
                last_seq = raw.count(b"\n") + 1
                raise SchemaMismatch(f"truncated record at seq {last_seq}", seq=last_seq)
            fresh = State()
            events: list[ActivityEvent] = []
            for idx, line in enumerate(raw.decode("utf-8").splitlines(), start=1):
                ev = event_from_line(line, seq_hint=idx)
                if ev.seq != idx:
                    raise SchemaMismatch(f"seq gap: expected {idx} found {ev.seq}", seq=idx)
                if ev.to_line() != line:
                    raise SchemaMismatch(f"non-canonical record at seq {idx}", seq=idx)
                state_mod.apply(fresh, ev)
                events.append(ev)
            state_mod.validate_state(fresh)
            self._state = fresh
            self._events = events
            if self._fh is not None:
                self._fh.write(raw.decode("utf-8"))
                self._fh.flush()
            return len(events)

    def content_hash(self) -> str:
        return hashlib.sha256(self.export_bytes()).hexdigest()

    # -- id generation (deterministic: counts are monotone) ------------------

    def next_id(self, prefix: str, count: int) -> str:
        return f"{prefix}-{count + 1:04d}"
