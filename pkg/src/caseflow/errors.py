"""Error types shared across the workbench.

Every error carries a stable ``code`` (its class name) so the HTTP service
and the CLI can map failures to wire errors / exit codes without string
matching on messages.
"""

from __future__ import annotations


class CaseflowError(Exception):
    """Base class for all domain errors."""

    @property
    def code(self) -> str:
        return type(self).__name__


# --- data ingestion -------------------------------------------------------

class EmptyInput(CaseflowError):
    pass


class NonNumericCell(CaseflowError):
    def __init__(self, row: int, column: str, value: str):
        self.row = row
        self.column = column
        self.value = value
        super().__init__(
            f"non-numeric value {value!r} at row {row}, column {column!r}"
        )


class RaggedRows(CaseflowError):
    def __init__(self, row: int, expected: int, got: int):
        self.row = row
        super().__init__(
            f"row {row} has {got} fields, expected {expected}"
        )


class DuplicateIds(CaseflowError):
    pass


class UnknownFeature(CaseflowError):
    pass


class LengthMismatch(CaseflowError):
    pass


class NonFiniteValue(CaseflowError):
    pass


# --- clustering -----------------------------------------------------------

class KTooLarge(CaseflowError):
    pass


class UndefinedMetric(CaseflowError):
    """Raised when a quality metric has no defined value (e.g. k=1)."""


# --- self-organizing map --------------------------------------------------

class ConfigInvalid(CaseflowError):
    pass


class DimensionMismatch(CaseflowError):
    pass


class SchemaMismatch(CaseflowError):
    """Feature schema of new data does not match the trained map."""

    def __init__(self, missing: list[str], extra: list[str]):
        self.missing = list(missing)
        self.extra = list(extra)
        parts = []
        if missing:
            parts.append("missing columns: " + ", ".join(missing))
        if extra:
            parts.append("unexpected columns: " + ", ".join(extra))
        super().__init__("; ".join(parts) or "schema mismatch")


class InsufficientGroups(CaseflowError):
    pass


class NotTrained(CaseflowError):
    pass


# --- scenario -------------------------------------------------------------

class DatasetMismatch(CaseflowError):
    pass


class NoEditsToPerturb(CaseflowError):
    pass


class InvalidDeviation(CaseflowError):
    pass


# --- session / report -----------------------------------------------------

class NothingToExport(CaseflowError):
    pass


class StageOrderError(CaseflowError):
    """A stage was requested before its prerequisite completed."""

    def __init__(self, stage: str, missing: str):
        self.stage = stage
        self.missing = missing
        super().__init__(f"stage {stage!r} requires {missing!r} to run first")


class UnknownSession(CaseflowError):
    pass
