"""pblhub: monitoring and experience sharing for project-based learning.

A single append-only activity event log backs everything: role-specific
dashboards (group project monitoring, student reflective profile, tutor
monitoring view), teamwork indicators, blogs, a tag-indexed tutors' forum,
learning contracts, and the visibility policy governing who sees what.
"""

from .errors import DomainError
from .events import ActivityEvent, EventKind
from .policy import Action, PolicyDecision, ResourceClass, ResourceRef, authorize, decision_table
from .questionnaire import Questionnaire
from .store import Snapshot, Store

__version__ = "0.1.0"

__all__ = [
    "ActivityEvent",
    "Action",
    "DomainError",
    "EventKind",
    "PolicyDecision",
    "Questionnaire",
    "ResourceClass",
    "ResourceRef",
    "Snapshot",
    "Store",
    "authorize",
    "decision_table",
    "__version__",
]
