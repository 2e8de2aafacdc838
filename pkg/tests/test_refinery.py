from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from tablesmith.errors import MalformedBase
from tablesmith.evalkit import Rng
from tablesmith.issues import IssueKind, Severity
from tablesmith.refinery import (
    CHECK_WEIGHTS,
    InvalidIdReason,
    RecordFlag,
    compute_check_digit,
    is_noise_row,
    parse_member_count,
    realign_row,
    refine_rows,
    split_double_name,
    validate_business_id,
)

from conftest import row


def oracle_check_digit(base: str) -> int | None:
    """Independent brute-force weighted-sum implementation."""
    weights = [7, 9, 10, 5, 8, 4, 2]
    total = 0
    for i in range(7):
        total += weights[i] * int(base[i])
    remainder = total - (total // 11) * 11
    if remainder == 0:
        return 0
    if remainder == 1:
        return None
    return 11 - remainder


# --- check digit --------------------------------------------------------------

def test_check_digit_zero_base():
    assert compute_check_digit("0000000") == 0


def test_check_digit_example_base():
    # oracle: S = 108, r = 9, check = 2
    assert oracle_check_digit("0123456") == 2
    assert compute_check_digit("0123456") == 2


def test_check_digit_remainder_one_has_no_digit():
    # oracle: S = 12, r = 1
    assert oracle_check_digit("1001000") is None
    assert compute_check_digit("1001000") is None


@pytest.mark.parametrize("bad", ["", "123456", "12345678", "12a4567",
                                 "１２３４５６７", "-123456"])
def test_check_digit_malformed_base(bad):
    with pytest.raises(MalformedBase):
        compute_check_digit(bad)


def test_check_digit_matches_oracle_on_sample():
    rng = Rng(3)
    for _ in range(5000):
        base = f"{rng.below(10_000_000):07d}"
        assert compute_check_digit(base) == oracle_check_digit(base)


# --- business id validation ---------------------------------------------------

def test_validate_canonical_form():
    assert validate_business_id("0123456-2") == ("0123456-2", None)


def test_validate_legacy_six_digit_pads():
    assert validate_business_id("123456-2") == ("0123456-2", None)


def test_validate_missing_hyphen_inserted():
    assert validate_business_id("01234562") == ("0123456-2", None)


def test_validate_bad_checksum():
    assert validate_business_id("0123456-3") == (None, InvalidIdReason.BAD_CHECKSUM)


def test_validate_impossible_base():
    # 1001000 has remainder 1; no check digit is ever valid for it
    assert validate_business_id("1001000-5") == (None, InvalidIdReason.IMPOSSIBLE_BASE)


@pytest.mark.parametrize("junk", ["", "*", "12345-6", "1234567", "abc",
                                  "0123456 2", "0123456--2"])
def test_validate_bad_shapes(junk):
    assert validate_business_id(junk) == (None, InvalidIdReason.BAD_SHAPE)


def test_validate_idempotent_on_canonical():
    rng = Rng(9)
    for _ in range(500):
        base = f"{rng.below(10_000_000):07d}"
        check = compute_check_digit(base)
        if check is None:
            continue
        canonical, reason = validate_business_id(f"{base}-{check}")
        assert reason is None
        assert validate_business_id(canonical) == (canonical, None)


# --- member counts ------------------------------------------------------------

@pytest.mark.parametrize("cell,expected", [
    ("1 234", (1234, False)),
    ("0", (0, False)),
    ("150 (12 kunniajäsentä)", (150, True)),
    ("1.234", (1234, False)),
    ("1 234", (1234, False)),
    ("12 345", (12345, False)),
    ("1 234 567", (1234567, False)),
    ("", (None, False)),
    ("ei tietoa", (None, False)),
    ("12 34", (12, True)),
])
def test_parse_member_count(cell, expected):
    assert parse_member_count(cell) == expected


# --- noise rows ---------------------------------------------------------------

def test_noise_stop_list_header():
    assert is_noise_row(row("OKM"))


def test_noise_totals_row():
    assert is_noise_row(row("Yhteensä||8123"))


def test_noise_valid_data_row():
    assert not is_noise_row(row("Seura ry|0123456-2|150"))


def test_noise_all_empty_cells():
    assert is_noise_row(row("||"))


def test_noise_single_cell_without_digit_or_suffix():
    assert is_noise_row(row("Jäsenluettelo"))


def test_noise_single_cell_with_suffix_kept():
    assert not is_noise_row(row("Seura ry"))


def test_noise_stop_list_case_folded():
    assert is_noise_row(row("YHTEENSÄ||99"))


def test_noise_never_true_with_valid_business_id():
    # even a stop-list first cell is kept when a checksum-valid ID is present
    rng = Rng(21)
    for _ in range(300):
        base = f"{rng.below(10_000_000):07d}"
        check = compute_check_digit(base)
        if check is None:
            continue
        assert not is_noise_row(row(f"Yhteensä|{base}-{check}|10"))
        assert not is_noise_row(row(f"OKM|{base}-{check}|"))


def test_noise_stopwords_configurable():
    assert is_noise_row(row("Hallitus|x|y"), stopwords=("hallitus",))
    # multi-cell row whose first cell left the stop-list is data again
    assert not is_noise_row(row("OKM|x|1"), stopwords=("hallitus",))


# --- double names -------------------------------------------------------------

def test_split_spaced_hyphen_with_suffixes():
    assert split_double_name("Helsingin Uimarit ry - Helsingfors Simmare rf") == \
        ("Helsingin Uimarit ry", "Helsingfors Simmare rf")


def test_split_single_name_untouched():
    assert split_double_name("Jyväskylän Kenttäurheilijat ry") == \
        ("Jyväskylän Kenttäurheilijat ry", None)


def test_split_suffix_adjacency_without_separator():
    assert split_double_name("Vasa Simsällskap rf Vaasan Uimaseura ry") == \
        ("Vasa Simsällskap rf", "Vaasan Uimaseura ry")


def test_split_slash_separator():
    assert split_double_name("Turun Melojat ry / Åbo Paddlare rf") == \
        ("Turun Melojat ry", "Åbo Paddlare rf")


def test_split_en_dash_separator():
    assert split_double_name("Porin Soutajat ry – Björneborgs Roddare rf") == \
        ("Porin Soutajat ry", "Björneborgs Roddare rf")


def test_split_multiword_without_suffixes():
    assert split_double_name("Foo Bar - Baz Qux") == ("Foo Bar", "Baz Qux")


def test_split_rejects_one_sided_separator():
    # right side is a single word with no suffix: not a credible second name
    assert split_double_name("Etelä-Pohjanmaan Kiri ry - niinimäki") == \
        ("Etelä-Pohjanmaan Kiri ry - niinimäki", None)


def test_split_character_conservation_generated():
    rng = Rng(5)
    from tablesmith.evalkit.words import make_club_name
    for _ in range(1000):
        fi, sv = make_club_name(rng, bilingual=True)
        merged = f"{fi} - {sv}"
        primary, alt = split_double_name(merged)
        assert (primary, alt) == (fi, sv)
        # non-separator characters preserved in order
        assert "".join(merged.replace(" - ", "", 1).split()) == \
            "".join((primary + alt).split())


# --- realignment --------------------------------------------------------------

def test_realign_pass_through_aligned():
    aligned, why = realign_row(row("Seura ry||0123456-2|150"))
    assert why is None and not aligned.realigned
    assert (aligned.name_cell, aligned.alt_cell, aligned.id_cell,
            aligned.count_cell) == ("Seura ry", "", "0123456-2", "150")


def test_realign_missing_fields_pass_through():
    aligned, why = realign_row(row("Seura ry|||"))
    assert why is None and not aligned.realigned


def test_realign_three_cell_double_name():
    aligned, why = realign_row(
        row("Helsingin Uimarit ry - Helsingfors Simmare rf|0123456-2|150"))
    assert why is None and aligned.realigned
    assert aligned.id_cell == "0123456-2" and aligned.count_cell == "150"


def test_realign_rejoins_spilled_name():
    aligned, why = realign_row(row("Seura|ry|0123456-2|150"))
    assert why is None and aligned.realigned
    assert aligned.name_cell == "Seura ry"


def test_realign_positional_without_id():
    aligned, why = realign_row(row("Seura ry||*"))
    assert why is None and not aligned.realigned
    assert aligned.name_cell == "Seura ry" and aligned.count_cell == ""


def test_realign_multiple_ids_unparseable():
    aligned, why = realign_row(row("Seura ry|0123456-2|1572860-0|150"))
    assert aligned is None and "multiple" in why


def test_realign_no_name_before_id_unparseable():
    aligned, why = realign_row(row("|0123456-2|150"))
    assert aligned is None


def test_realign_junk_after_id_unparseable():
    aligned, why = realign_row(row("Seura ry|0123456-2|jotain|150"))
    assert aligned is None


def test_realign_overlong_row_without_anchor_unparseable():
    aligned, why = realign_row(row("a|b|c|d|e"))
    assert aligned is None


# --- full refinement ----------------------------------------------------------

def test_refine_clean_rows_no_issues():
    rows = [row("A ry||0123456-2|10", 0, 1),
            row("B ry|Bf rf|1572860-0|20", 0, 2),
            row("C ry||2617416-4|30", 0, 3)]
    records, issues = refine_rows(rows, "f")
    assert len(records) == 3 and issues == []
    assert records[0].business_id == "0123456-2"
    assert records[1].alt_name == "Bf rf"
    assert [r.member_count for r in records] == [10, 20, 30]


def test_refine_drops_noise_keeps_rest():
    rows = [row("OKM", 0, 1),
            row("Yhteensä||8123", 0, 2),
            row("A ry||0123456-2|10", 0, 3)]
    records, issues = refine_rows(rows, "f")
    assert len(records) == 1
    kinds = [i.kind for i in issues]
    assert kinds.count(IssueKind.NOISE_ROW_DROPPED) == 2
    assert all(i.severity is Severity.INFO for i in issues)


def test_refine_missing_fields_kept_with_warnings():
    records, issues = refine_rows([row("Seura ry||*", 0, 1)], "f")
    assert len(records) == 1
    rec = records[0]
    assert rec.business_id is None and rec.member_count is None
    assert [i.kind for i in issues] == [IssueKind.MISSING_FIELD] * 2
    assert all(i.severity is Severity.WARN for i in issues)


def test_refine_invalid_id_kept_with_flag_and_error():
    records, issues = refine_rows([row("A ry||0123456-3|10", 0, 1)], "f")
    assert records[0].business_id == "0123456-3"
    assert RecordFlag.ID_INVALID in records[0].flags
    assert [i.kind for i in issues] == [IssueKind.INVALID_BUSINESS_ID]
    assert issues[0].severity is Severity.ERROR


def test_refine_ambiguous_count_flagged():
    records, issues = refine_rows(
        [row("A ry||0123456-2|150 (12 kunniajäsentä)", 0, 1)], "f")
    assert records[0].member_count == 150
    assert RecordFlag.COUNT_AMBIGUOUS in records[0].flags
    assert IssueKind.AMBIGUOUS_COUNT in [i.kind for i in issues]


def test_refine_unparseable_accounted():
    rows = [row("A ry|0123456-2|1572860-0|150", 0, 1),
            row("B ry||2617416-4|20", 0, 2)]
    records, issues = refine_rows(rows, "f")
    assert len(records) == 1
    assert [i.kind for i in issues] == [IssueKind.UNPARSEABLE_ROW]


def test_refine_row_conservation_property():
    rng = Rng(31)
    cells_pool = ["A ry", "OKM", "0123456-2", "150", "", "x|y".replace("|", "/"),
                  "Yhteensä", "B rf", "1 234"]
    for _ in range(300):
        n = rng.randint(1, 8)
        rows = []
        for ln in range(1, n + 1):
            width = rng.randint(1, 5)
            rows.append(row("|".join(rng.choice(cells_pool)
                                     for _ in range(width)), 0, ln))
        records, issues = refine_rows(rows, "f")
        dropped = sum(1 for i in issues
                      if i.kind in (IssueKind.NOISE_ROW_DROPPED,
                                    IssueKind.UNPARSEABLE_ROW))
        assert len(records) + dropped == len(rows)


def test_refine_deterministic_and_order_preserving():
    rows = [row("B ry||1572860-0|20", 0, 1), row("A ry||0123456-2|10", 0, 2)]
    first = refine_rows(rows, "f")
    second = refine_rows(rows, "f")
    assert first == second
    assert [r.club_name for r in first[0]] == ["B ry", "A ry"]


@given(st.text(alphabet="abcdefghijklmnopqrstuvwxyzåäö ry-/", min_size=1,
               max_size=60))
def test_split_double_name_total(cell):
    primary, alt = split_double_name(cell)
    joined = primary + (alt or "")
    # conservation: non-whitespace, non-separator characters survive in order
    stripped_input = "".join(cell.replace(" - ", " ", 1)
                             .replace(" / ", " ", 1)
                             .replace(" – ", " ", 1).split())
    assert "".join(joined.split()) in (stripped_input, "".join(cell.split()))
