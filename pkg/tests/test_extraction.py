from __future__ import annotations

from hypothesis import given, settings, strategies as st

from tablesmith.extraction import (
    parse_response,
    parse_row,
    render_record_block,
)
from tablesmith.issues import IssueKind, Severity


def test_sentinel_block_strips_chatter():
    text = ("Here are the extracted records:\n#RECORDS\n"
            "Seura ry|0123456-2|150\n#END\nHope this helps!")
    rows, issues = parse_response(text, 3)
    assert len(rows) == 1 and issues == []
    assert rows[0].cells == ("Seura ry", "0123456-2", "150")
    assert rows[0].source_page == 3 and rows[0].line_no == 1


def test_empty_block_is_fine():
    rows, issues = parse_response("#RECORDS\n#END", 0)
    assert rows == [] and issues == []


def test_fallback_without_sentinels():
    rows, issues = parse_response("A ry|0123456-2|10\nB ry||20", 0)
    assert [r.cells for r in rows] == [("A ry", "0123456-2", "10"),
                                       ("B ry", "", "20")]
    assert [i.kind for i in issues] == [IssueKind.MISSING_SENTINELS]
    assert issues[0].severity is Severity.WARN


def test_fallback_ignores_pipeless_lines():
    rows, issues = parse_response("preamble text\nA ry|1|2\nno pipes here", 0)
    assert len(rows) == 1


def test_unterminated_block_parses_to_end():
    rows, issues = parse_response("#RECORDS\nA ry|0123456-2|10\nB ry||20", 0)
    assert len(rows) == 2
    assert [i.kind for i in issues] == [IssueKind.UNTERMINATED_BLOCK]
    assert issues[0].severity is Severity.WARN


def test_empty_response_is_error():
    rows, issues = parse_response("   \n  ", 0, "somefile")
    assert rows == []
    assert [i.kind for i in issues] == [IssueKind.EMPTY_RESPONSE]
    assert issues[0].severity is Severity.ERROR
    assert issues[0].file_stem == "somefile"


def test_blank_lines_inside_block_skipped_line_numbers_contiguous():
    text = "#RECORDS\nA|1\n\n  \nB|2\nC|3\n#END"
    rows, issues = parse_response(text, 0)
    assert [r.line_no for r in rows] == [1, 2, 3]
    assert [r.cells[0] for r in rows] == ["A", "B", "C"]


def test_sentinels_tolerate_surrounding_whitespace():
    rows, issues = parse_response("  #RECORDS  \nA|1\n #END ", 0)
    assert len(rows) == 1 and issues == []


def test_parse_row_trims_cells():
    assert parse_row("Seura ry | 0123456-2 | 150", 0, 1).cells == \
        ("Seura ry", "0123456-2", "150")


def test_parse_row_preserves_empty_cells():
    assert parse_row("Seura ry||", 0, 1).cells == ("Seura ry", "", "")


def test_parse_row_single_cell():
    assert parse_row("OKM", 0, 1).cells == ("OKM",)


_cell = st.text(
    alphabet=st.characters(blacklist_characters="|\r\n",
                           blacklist_categories=("Cs",)),
    max_size=12,
).map(str.strip)


@given(st.lists(st.lists(_cell, min_size=1, max_size=5), min_size=0,
                max_size=10))
def test_record_block_round_trip(cell_rows):
    rendered = render_record_block(cell_rows)
    rows, issues = parse_response(rendered, 5)
    assert issues == []
    # a single all-empty cell renders as a blank line, which parsing skips
    survivors = [cells for cells in cell_rows if len(cells) > 1 or any(cells)]
    assert [list(r.cells) for r in rows] == [list(c) for c in survivors]
    assert [r.source_page for r in rows] == [5] * len(rows)
    assert [r.line_no for r in rows] == list(range(1, len(rows) + 1))


@settings(max_examples=500)
@given(st.text(max_size=300))
def test_parse_response_never_raises(text):
    rows, issues = parse_response(text, 0)
    assert isinstance(rows, list) and isinstance(issues, list)
