"""Domain error hierarchy.

Every error carries a stable ``code`` (the class name) that the HTTP layer
maps to the wire shape ``{code, rule_id?, message}``.
"""

from __future__ import annotations


class DomainError(Exception):
    """Base class for all domain-level failures."""

    def __init__(self, message: str = ""):
        super().__init__(message or self.__class__.__name__)
        self.message = message or self.__class__.__name__

    @property
    def code(self) -> str:
        return self.__class__.__name__


class Forbidden(DomainError):
    """Denied by the access policy; carries the governing rule id."""

    def __init__(self, message: str = "", rule_id: str = "R8"):
        super().__init__(message)
        self.rule_id = rule_id


# -- course / calendar -------------------------------------------------------

class InvalidCalendar(DomainError): pass
class AlreadyClosed(DomainError): pass
class CourseNotInSetup(DomainError): pass
class CourseNotRunning(DomainError): pass
class NoCourse(DomainError): pass
class StoreNotEmpty(DomainError): pass


# -- actors / groups ---------------------------------------------------------

class UnknownActor(DomainError): pass
class UnknownGroup(DomainError): pass
class LeaderNotMember(DomainError): pass
class TutorIsMember(DomainError): pass
class DuplicateTutor(DomainError): pass
class IncompatibleRole(DomainError): pass
class AlreadyGrouped(DomainError): pass
class DuplicateActor(DomainError): pass
class DuplicateGroupName(DomainError): pass


# -- tasks / deliverables / data entry ---------------------------------------

class UnknownTask(DomainError): pass
class CycleDetected(DomainError): pass
class UnknownDeliverable(DomainError): pass
class NotSubmitted(DomainError): pass
class AlreadyAccepted(DomainError): pass
class OutOfRange(DomainError): pass
class InvalidPeriod(DomainError): pass
class UnknownPrompt(DomainError): pass


# -- evaluation --------------------------------------------------------------

class AdjustmentOutOfRange(DomainError): pass
class GradeOutOfRange(DomainError): pass
class GroupNotGraded(DomainError): pass


# -- sharing -----------------------------------------------------------------

class UnknownPost(DomainError): pass
class AlreadyPublished(DomainError): pass
class UnknownDiscussion(DomainError): pass
class EmptyTags(DomainError): pass
class UnknownTag(DomainError): pass
class DuplicateLabel(DomainError): pass
class UnknownParent(DomainError): pass
class ProtectedSubject(DomainError): pass
class ContractLocked(DomainError): pass
class AlreadyExists(DomainError): pass
class UnknownEventSeq(DomainError): pass


# -- policy ------------------------------------------------------------------

class UnknownResource(DomainError): pass


# -- service / storage -------------------------------------------------------

class InvalidConfig(DomainError): pass
class InvalidTimestamp(DomainError): pass
class CorruptStore(DomainError): pass
class IoFailure(DomainError): pass
class BindFailure(DomainError): pass
class AuthRequired(DomainError): pass


class SchemaMismatch(DomainError):
    """Import rejected; ``seq`` points at the offending record (1-based)."""

    def __init__(self, message: str = "", seq: int | None = None):
        super().__init__(message)
        self.seq = seq
