"""The append-only activity event log and its canonical wire form.

One event per line, canonical JSON (sorted keys, compact separators), so that
export -> import -> export is byte-identical. The course under observation is
face-to-face: nothing is tracked automatically, so every piece of state enters
through one of these explicitly recorded events and the full system state is a
fold over the log.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import datetime
from enum import Enum
from typing import Any

from .errors import SchemaMismatch

#: Actor id used for bootstrap records that no course actor authors.
SYSTEM_ACTOR = "system"


class EventKind(str, Enum):
    # Activity entered by course actors.
    TIME_ENTRY = "TimeEntry"
    FRAME_OF_MIND = "FrameOfMind"
    TASK_UPDATE = "TaskUpdate"
    DELIVERABLE_SUBMIT = "DeliverableSubmit"
    DELIVERABLE_ACCEPT = "DeliverableAccept"
    DELIVERABLE_COMMENT = "DeliverableComment"
    BLOG_POST = "BlogPost"
    FORUM_MESSAGE = "ForumMessage"
    SELF_REPORT = "SelfReport"
    EVALUATION = "Evaluation"
    CONTRACT_UPDATE = "ContractUpdate"
    # Structural records; required so that replaying the log alone
    # reconstructs courses, rosters, groups and the forum taxonomy.
    COURSE_CREATED = "CourseCreated"
    COURSE_ADVANCED = "CourseAdvanced"
    ACTOR_REGISTERED = "ActorRegistered"
    GROUP_CREATED = "GroupCreated"
    DELIVERABLE_ADDED = "DeliverableAdded"
    TAXONOMY_CHANGE = "TaxonomyChange"
    SKILLS_CHANGE = "SkillsChange"
    TUTOR_NOTE = "TutorNote"


_KINDS = {k.value: k for k in EventKind}
_FIELDS = {"seq", "timestamp", "actor_id", "kind", "payload"}


@dataclass(frozen=True)
class ActivityEvent:
    """One immutable record. ``payload`` holds only JSON-native values."""

    seq: int
    timestamp: datetime
    actor_id: str
    kind: EventKind
    payload: dict[str, Any]

    def to_record(self) -> dict[str, Any]:
        return {
            "seq": self.seq,
            "timestamp": self.timestamp.isoformat(),
            "actor_id": self.actor_id,
            "kind": self.kind.value,
            "payload": self.payload,
        }

    def to_line(self) -> str:
        return json.dumps(self.to_record(), sort_keys=True, separators=(",", ":"))


def event_from_record(record: dict[str, Any], *, seq_hint: int | None = None) -> ActivityEvent:
    """Strict decode; raises SchemaMismatch naming the offending seq."""
    at = seq_hint if seq_hint is not None else record.get("seq")
    if not isinstance(record, dict) or set(record) != _FIELDS:
        raise SchemaMismatch(f"record {at}: unexpected fields", seq=at)
    seq = record["seq"]
    if not isinstance(seq, int) or seq < 1:
        raise SchemaMismatch(f"record {at}: bad seq {seq!r}", seq=at)
    kind = record["kind"]
    if kind not in _KINDS:
        raise SchemaMismatch(f"record {seq}: unknown kind {kind!r}", seq=seq)
    if not isinstance(record["actor_id"], str) or not isinstance(record["payload"], dict):
        raise SchemaMismatch(f"record {seq}: malformed actor/payload", seq=seq)
    try:
        ts = datetime.fromisoformat(record["timestamp"])
    except (TypeError, ValueError):
        raise SchemaMismatch(f"record {seq}: bad timestamp", seq=seq) from None
    if ts.tzinfo is None:
        raise SchemaMismatch(f"record {seq}: naive timestamp", seq=seq)
    return ActivityEvent(seq=seq, timestamp=ts, actor_id=record["actor_id"],
                         kind=_KINDS[kind], payload=record["payload"])


def event_from_line(line: str, *, seq_hint: int | None = None) -> ActivityEvent:
    try:
        record = json.loads(line)
    except json.JSONDecodeError:
        raise SchemaMismatch(f"record {seq_hint}: not valid JSON", seq=seq_hint) from None
    return event_from_record(record, seq_hint=seq_hint)
