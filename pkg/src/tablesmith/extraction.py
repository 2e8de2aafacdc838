"""Parse raw completion text into candidate rows.

The contract with the prompt is a sentinel-delimited record block::

    #RECORDS
    name|alt_name|business_id|member_count
    ...
    #END

Cells may be empty (field unknown). Anything before or after the block is
chatter and discarded. Parsing is total: any string yields (rows, issues).
"""

from __future__ import annotations

from dataclasses import dataclass

from .issues import IssueKind, ValidationIssue, make_issue

RECORDS_SENTINEL = "#RECORDS"
END_SENTINEL = "#END"
FIELD_SEPARATOR = "|"


@dataclass(frozen=True)
class RawRow:
    """One unvalidated candidate row; cells never contain the delimiter."""

    cells: tuple[str, ...]
    source_page: int
    line_no: int

    def __post_init__(self) -> None:
        if not self.cells:
            raise ValueError("a row has at least one cell")
        if any(FIELD_SEPARATOR in c for c in self.cells):
            raise ValueError("cells must not contain the field separator")


def parse_row(line: str, source_page: int, line_no: int) -> RawRow:
    """Split a record line on the pipe delimiter, trimming each cell.

    Empty cells are preserved (they mean "field unknown"); there is no
    quoting or escaping, the prompt forbids pipes inside values.
    """
    cells = tuple(c.strip() for c in line.split(FIELD_SEPARATOR))
    return RawRow(cells=cells, source_page=source_page, line_no=line_no)


def parse_response(response_text: str, source_page: int, file_stem: str = ""
                   ) -> tuple[list[RawRow], list[ValidationIssue]]:
    """Locate the record block and turn its lines into rows.

    With both sentinels present only the block is parsed. A missing #END
    parses to end of text with a warning (truncated responses keep their
    salvageable rows). With no sentinels at all, every line containing a
    pipe is parsed in fallback mode, flagged so the effect is auditable.
    An empty response is an error-level issue and zero rows.
    """
    issues: list[ValidationIssue] = []
    if not response_text.strip():
        issues.append(make_issue(
            IssueKind.EMPTY_RESPONSE, file_stem, source_page,
            "response text is empty"))
        return [], issues

    # The grammar is newline-delimited; splitting on \n alone (CR tolerated
    # via trimming) keeps exotic unicode separators inside cells intact.
    lines = response_text.split("\n")
    start = next((i for i, ln in enumerate(lines)
                  if ln.strip() == RECORDS_SENTINEL), None)

    if start is None:
        block = [ln for ln in lines if FIELD_SEPARATOR in ln]
        issues.append(make_issue(
            IssueKind.MISSING_SENTINELS, file_stem, source_page,
            "no record sentinels; parsed pipe-delimited lines as fallback"))
    else:
        end = next((j for j in range(start + 1, len(lines))
                    if lines[j].strip() == END_SENTINEL), None)
        if end is None:
            block = lines[start + 1:]
            issues.append(make_issue(
                IssueKind.UNTERMINATED_BLOCK, file_stem, source_page,
                f"{RECORDS_SENTINEL} without {END_SENTINEL}; parsed to end of text"))
        else:
            block = lines[start + 1:end]

    rows: list[RawRow] = []
    line_no = 0
    for ln in block:
        if not ln.strip():
            continue
        line_no += 1
        rows.append(parse_row(ln, source_page, line_no))
    return rows, issues


def render_record_block(cell_rows: list[list[str]] | list[tuple[str, ...]]) -> str:
    """Render rows of cells in the record-block grammar (fixture side)."""
    out = [RECORDS_SENTINEL]
    for cells in cell_rows:
        out.append(FIELD_SEPARATOR.join(cells))
    out.append(END_SENTINEL)
    return "\n".join(out) + "\n"
