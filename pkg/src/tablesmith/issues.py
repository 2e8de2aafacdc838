"""Machine-readable issue taxonomy for everything the pipeline drops or repairs.

Severity is fixed per kind: info rows need no attention, warn rows were
auto-corrected, error rows require manual work.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass


class IssueKind(enum.Enum):
    NOISE_ROW_DROPPED = "NoiseRowDropped"
    DOUBLE_NAME_SPLIT = "DoubleNameSplit"
    MISALIGNED_COLUMNS = "MisalignedColumns"
    INVALID_BUSINESS_ID = "InvalidBusinessId"
    MISSING_FIELD = "MissingField"
    AMBIGUOUS_COUNT = "AmbiguousCount"
    UNPARSEABLE_ROW = "UnparseableRow"
    MISSING_SENTINELS = "MissingSentinels"
    EMPTY_RESPONSE = "EmptyResponse"
    UNTERMINATED_BLOCK = "UnterminatedBlock"
    PAGE_SKIPPED = "PageSkipped"


class Severity(enum.Enum):
    INFO = "info"
    WARN = "warn"
    ERROR = "error"


SEVERITY_BY_KIND: dict[IssueKind, Severity] = {
    IssueKind.NOISE_ROW_DROPPED: Severity.INFO,
    IssueKind.PAGE_SKIPPED: Severity.INFO,
    IssueKind.DOUBLE_NAME_SPLIT: Severity.WARN,
    IssueKind.MISALIGNED_COLUMNS: Severity.WARN,
    IssueKind.MISSING_SENTINELS: Severity.WARN,
    IssueKind.MISSING_FIELD: Severity.WARN,
    IssueKind.AMBIGUOUS_COUNT: Severity.WARN,
    IssueKind.UNTERMINATED_BLOCK: Severity.WARN,
    IssueKind.UNPARSEABLE_ROW: Severity.ERROR,
    IssueKind.INVALID_BUSINESS_ID: Severity.ERROR,
    IssueKind.EMPTY_RESPONSE: Severity.ERROR,
}


@dataclass(frozen=True)
class ValidationIssue:
    kind: IssueKind
    severity: Severity
    file_stem: str
    source_page: int
    line_no: int | None
    message: str

    def __post_init__(self) -> None:
        expected = SEVERITY_BY_KIND[self.kind]
        if self.severity is not expected:
            raise ValueError(
                f"{self.kind.value} is fixed at severity {expected.value}")


def make_issue(kind: IssueKind, file_stem: str, source_page: int,
               message: str, line_no: int | None = None) -> ValidationIssue:
    """Build an issue with the severity the taxonomy mandates for its kind."""
    return ValidationIssue(
        kind=kind,
        severity=SEVERITY_BY_KIND[kind],
        file_stem=file_stem,
        source_page=source_page,
        line_no=line_no,
        message=message,
    )
