"""Exception types shared across the package.

Every error a caller is expected to catch has its own class; the CLI and
the HTTP service map these onto exit codes / structured error bodies.
"""


class PostevalError(Exception):
    """Base class for all domain errors."""

    def payload(self) -> dict:
        """Machine-readable form used by the CLI and the service."""
        return {"error": type(self).__name__, "detail": str(self)}


# -- core model -------------------------------------------------------------

class DuplicateRevision(PostevalError):
    pass


class UnknownReference(PostevalError):
    pass


class InvalidAnnotation(PostevalError):
    pass


# -- protocol ---------------------------------------------------------------

class MismatchedSegment(PostevalError):
    pass


class WrongResponseKind(PostevalError):
    pass


class SessionComplete(PostevalError):
    pass


class SessionIncomplete(PostevalError):
    pass


class TreeInvalid(PostevalError):
    pass


# -- scoring ----------------------------------------------------------------

class NoAnnotations(PostevalError):
    pass


class MissingAnnotations(PostevalError):
    def __init__(self, message: str, uncovered: list[str] | None = None):
        super().__init__(message)
        self.uncovered = uncovered or []

    def payload(self) -> dict:
        return {"error": "MissingAnnotations", "detail": str(self), "uncovered": self.uncovered}


# -- agreement --------------------------------------------------------------

class LengthMismatch(PostevalError):
    pass


class LevelOutOfRange(PostevalError):
    pass


class EmptyMatrix(PostevalError):
    pass


class NeedExactlyTwoAnnotators(PostevalError):
    pass


class NoSharedItems(PostevalError):
    pass


# -- ingestion --------------------------------------------------------------

class BadHeader(PostevalError):
    pass


class BadSeverityCell(PostevalError):
    def __init__(self, row: int, column: str, value: str):
        super().__init__(f"row {row}: column {column} has invalid severity cell {value!r}")
        self.row = row
        self.column = column
        self.value = value


class GatingViolation(PostevalError):
    def __init__(self, message: str, row: int | None = None):
        super().__init__(message)
        self.row = row

    def payload(self) -> dict:
        out = {"error": "GatingViolation", "detail": str(self)}
        if self.row is not None:
            out["row"] = self.row
        return out


class EncodingError(PostevalError):
    pass


class VersionMismatch(PostevalError):
    pass


class CorruptFile(PostevalError):
    pass


class UnknownSystem(PostevalError):
    pass


class UnknownAnnotator(PostevalError):
    pass


# -- service ----------------------------------------------------------------

class StaleRevision(PostevalError):
    pass


class UnknownProject(PostevalError):
    pass


class DuplicateProject(PostevalError):
    pass


class UnknownSession(PostevalError):
    pass
