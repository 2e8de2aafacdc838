"""Deterministic validation and normalization of parsed rows.

Turns raw pipe-delimited cells into club records: drops noise rows,
splits bilingual double names, realigns displaced columns, verifies
business-ID check digits and parses member counts. Nothing here ever
raises on malformed data; every drop or repair becomes a ValidationIssue.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass

from .errors import MalformedBase
from .extraction import RawRow
from .issues import IssueKind, ValidationIssue, make_issue

# Weighted mod-11 checksum over the seven base digits, left to right.
CHECK_WEIGHTS = (7, 9, 10, 5, 8, 4, 2)

# Header / summary tokens seen in federation reports; config-overridable.
DEFAULT_NOISE_STOPWORDS = (
    "okm", "yhteensä", "totalt", "summa", "total", "sivu", "page",
    "jäsenseurat", "seuran nimi", "y-tunnus",
)

# Registered-association suffixes (Finnish ry, Swedish rf and variants).
DEFAULT_ASSOC_SUFFIXES = ("ry", "r.y.", "rf", "r.f.", "ry.", "rf.")

# A cell that merely looks like a business ID: 7-8 digits, optional hyphen.
ID_SHAPE = re.compile(r"[0-9]{6,7}-?[0-9]")

# Thousand separators tolerated inside digit groups.
_THOUSANDS_SEP = re.compile(r"(?<=[0-9])[    .]+(?=[0-9]{3}(?![0-9]))")
_DIGIT_GROUP = re.compile(r"[0-9]+")
_COUNT_CHARS = set("0123456789    .")

# Anything above this is not a member count; the whole national database
# holds on the order of eight thousand clubs.
COUNT_UPPER_BOUND = 10_000_000

_NAME_SEPARATORS = (" - ", " / ", " – ")


class RecordFlag(enum.Enum):
    NAME_SPLIT = "NameSplit"
    REALIGNED = "Realigned"
    COUNT_AMBIGUOUS = "CountAmbiguous"
    ID_INVALID = "IdInvalid"


class InvalidIdReason(enum.Enum):
    BAD_SHAPE = "BadShape"
    BAD_CHECKSUM = "BadChecksum"
    IMPOSSIBLE_BASE = "ImpossibleBase"


@dataclass(frozen=True)
class ClubRecord:
    """One validated output row."""

    club_name: str
    alt_name: str | None
    business_id: str | None
    member_count: int | None
    source_file: str
    source_page: int
    flags: frozenset[RecordFlag] = frozenset()

    def __post_init__(self) -> None:
        if not self.club_name.strip():
            raise ValueError("club_name must be non-empty")
        if self.member_count is not None and self.member_count < 0:
            raise ValueError("member_count must be >= 0")


@dataclass(frozen=True)
class AlignedRow:
    """Row cells mapped onto the four output columns, still unvalidated."""

    name_cell: str
    alt_cell: str
    id_cell: str
    count_cell: str
    realigned: bool


def compute_check_digit(base: str) -> int | None:
    """Check digit for a 7-digit business-ID base.

    Weighted sum S over the digits with weights (7,9,10,5,8,4,2); r = S mod 11.
    r == 0 yields check digit 0, r == 1 has no valid check digit (such bases
    are never issued, returns None), otherwise the digit is 11 - r.
    """
    if len(base) != 7 or not base.isascii() or not base.isdigit():
        raise MalformedBase(f"base must be exactly 7 ASCII digits, got {base!r}")
    s = 0
    for w, ch in zip(CHECK_WEIGHTS, base):
        s += w * (ord(ch) - 48)
    r = s % 11
    if r == 0:
        return 0
    if r == 1:
        return None
    return 11 - r


_ID_FORMS = (
    re.compile(r"([0-9]{7})-([0-9])"),   # canonical NNNNNNN-C
    re.compile(r"([0-9]{7})([0-9])"),    # hyphen dropped
    re.compile(r"([0-9]{6})-([0-9])"),   # 6-digit legacy base, zero-padded
)


def validate_business_id(raw: str) -> tuple[str | None, InvalidIdReason | None]:
    """Normalize and checksum-verify a business ID.

    Returns (canonical "NNNNNNN-C", None) on success, else (None, reason).
    """
    text = raw.strip()
    base = check = None
    for form in _ID_FORMS:
        m = form.fullmatch(text)
        if m:
            base, check = m.group(1), int(m.group(2))
            break
    if base is None:
        return None, InvalidIdReason.BAD_SHAPE
    base = base.zfill(7)
    expected = compute_check_digit(base)
    if expected is None:
        return None, InvalidIdReason.IMPOSSIBLE_BASE
    if expected != check:
        return None, InvalidIdReason.BAD_CHECKSUM
    return f"{base}-{check}", None


def parse_member_count(cell: str) -> tuple[int | None, bool]:
    """Extract a member count from a cell.

    Thousand separators (regular, no-break and thin spaces, periods) inside
    digit groups are removed first. Zero digit groups yield (None, False);
    one group yields its value; several groups (parenthetical breakdowns of
    honorary or licensed members, say) yield the first value flagged
    ambiguous.
    """
    collapsed = _THOUSANDS_SEP.sub("", cell)
    groups = _DIGIT_GROUP.findall(collapsed)
    if not groups:
        return None, False
    return int(groups[0]), len(groups) > 1


def is_count_shaped(cell: str) -> bool:
    """True for cells that are a bare number with optional thousand separators."""
    text = cell.strip()
    if not text or not set(text) <= _COUNT_CHARS:
        return False
    collapsed = _THOUSANDS_SEP.sub("", text)
    return collapsed.isdigit() and int(collapsed) < COUNT_UPPER_BOUND


def is_id_shaped(cell: str) -> bool:
    return ID_SHAPE.fullmatch(cell.strip()) is not None


def _suffix_set(suffixes: tuple[str, ...] | None) -> frozenset[str]:
    return frozenset(s.casefold() for s in (suffixes or DEFAULT_ASSOC_SUFFIXES))


def _word_is_suffix(word: str, suffixes: frozenset[str]) -> bool:
    w = word.casefold()
    return w in suffixes or w.rstrip(",;:") in suffixes


def _has_suffix_token(text: str, suffixes: frozenset[str]) -> bool:
    return any(_word_is_suffix(w, suffixes) for w in text.split())


def is_noise_row(row: RawRow, stopwords: tuple[str, ...] | None = None,
                 suffixes: tuple[str, ...] | None = None) -> bool:
    """True for header, totals and other non-data rows.

    A row carrying a checksum-valid business ID is never noise, whatever
    its first cell says.
    """
    stop = frozenset(s.casefold() for s in (stopwords or DEFAULT_NOISE_STOPWORDS))
    sfx = _suffix_set(suffixes)
    nonempty = [c for c in row.cells if c.strip()]
    if not nonempty:
        return True
    for cell in nonempty:
        if is_id_shaped(cell) and validate_business_id(cell)[0] is not None:
            return False
    if nonempty[0].strip().casefold() in stop:
        return True
    if len(nonempty) == 1:
        cell = nonempty[0]
        if not any(ch.isdigit() for ch in cell) and not _has_suffix_token(cell, sfx):
            return True
    return False


def split_double_name(cell: str, suffixes: tuple[str, ...] | None = None
                      ) -> tuple[str, str | None]:
    """Split a bilingual double name into (primary, alternate).

    Tries the spaced separators " - ", " / ", " – " first; a split is taken
    only when both sides carry an association suffix or both have at least
    two words. Failing that, a cell holding two suffix tokens is split right
    after the first one. Otherwise the cell is returned whole.
    """
    sfx = _suffix_set(suffixes)
    text = cell.strip()
    for sep in _NAME_SEPARATORS:
        idx = text.find(sep)
        if idx < 0:
            continue
        left = text[:idx].strip()
        right = text[idx + len(sep):].strip()
        if not left or not right:
            continue
        both_suffixed = _has_suffix_token(left, sfx) and _has_suffix_token(right, sfx)
        both_multiword = len(left.split()) >= 2 and len(right.split()) >= 2
        if both_suffixed or both_multiword:
            return left, right
    suffix_hits = [m for m in re.finditer(r"\S+", text)
                   if _word_is_suffix(m.group(), sfx)]
    if len(suffix_hits) >= 2:
        cut = suffix_hits[0].end()
        left, right = text[:cut].strip(), text[cut:].strip()
        if left and right:
            return left, right
    return text, None


def realign_row(row: RawRow, suffixes: tuple[str, ...] | None = None
                ) -> tuple[AlignedRow | None, str | None]:
    """Map row cells onto (name, alt, id, count) columns.

    A four-cell row whose ID-shaped content sits only in column 3 and
    count-shaped content only in column 4 passes through untouched (unless
    the alt slot holds a bare association suffix — that is a name fragment
    spilled rightward, not an alternate name). Otherwise the unique
    ID-shaped cell anchors the rebuild: everything before it is re-joined
    into the name, a single trailing count-shaped cell becomes the count.
    Rows with no ID anchor are read positionally. Returns (None, reason)
    when no reconstruction is possible.
    """
    sfx = _suffix_set(suffixes)
    cells = row.cells
    id_positions = [i for i, c in enumerate(cells) if is_id_shaped(c)]
    count_positions = [i for i, c in enumerate(cells) if is_count_shaped(c)]

    if (len(cells) == 4
            and all(i == 2 for i in id_positions)
            and all(i == 3 for i in count_positions)
            and not _word_is_suffix(cells[1].strip(), sfx)):
        return AlignedRow(cells[0], cells[1], cells[2], cells[3], realigned=False), None

    if len(id_positions) > 1:
        return None, "multiple business-ID-shaped cells"

    if len(id_positions) == 1:
        anchor = id_positions[0]
        head = [c for c in cells[:anchor] if c.strip()]
        if not head:
            return None, "no name ahead of the business ID"
        tail = [c for c in cells[anchor + 1:] if c.strip()]
        counts = [c for c in tail if is_count_shaped(c)]
        extras = [c for c in tail if not is_count_shaped(c)]
        if extras:
            return None, f"unexpected trailing cells {extras!r}"
        if len(counts) > 1:
            return None, "multiple count-shaped cells after the business ID"
        return AlignedRow(
            " ".join(head), "", cells[anchor],
            counts[0] if counts else "", realigned=True), None

    # No ID anchor anywhere: short rows are read positionally so records
    # with merely-missing fields survive; overlong rows are hopeless.
    if len(cells) > 4:
        return None, "no business-ID anchor in an overlong row"
    padded = tuple(cells) + ("",) * (4 - len(cells))
    return AlignedRow(padded[0], padded[1], padded[2], padded[3], realigned=False), None


def refine_rows(rows: list[RawRow], file_stem: str,
                stopwords: tuple[str, ...] | None = None,
                suffixes: tuple[str, ...] | None = None,
                ) -> tuple[list[ClubRecord], list[ValidationIssue]]:
    """Run the full per-row pipeline: noise filter, realign, name split,
    ID validation, count parse, record assembly.

    Order-preserving and total: every dropped or mutated row is accounted
    for by at least one issue, and records + drops equals the input count.
    """
    records: list[ClubRecord] = []
    issues: list[ValidationIssue] = []

    for row in rows:
        page, line = row.source_page, row.line_no
        if is_noise_row(row, stopwords, suffixes):
            issues.append(make_issue(
                IssueKind.NOISE_ROW_DROPPED, file_stem, page,
                f"dropped noise row {row.cells[0]!r}", line))
            continue

        aligned, why = realign_row(row, suffixes)
        if aligned is None:
            issues.append(make_issue(
                IssueKind.UNPARSEABLE_ROW, file_stem, page,
                f"cannot reconstruct row {list(row.cells)!r}: {why}", line))
            continue
        flags: set[RecordFlag] = set()
        if aligned.realigned:
            flags.add(RecordFlag.REALIGNED)
            issues.append(make_issue(
                IssueKind.MISALIGNED_COLUMNS, file_stem, page,
                f"re-joined {len(row.cells)}-cell row around the business ID", line))

        name = aligned.name_cell.strip()
        if not name:
            issues.append(make_issue(
                IssueKind.UNPARSEABLE_ROW, file_stem, page,
                f"row has no club name: {list(row.cells)!r}", line))
            continue
        alt: str | None = aligned.alt_cell.strip() or None
        if alt is None:
            primary, split_alt = split_double_name(name, suffixes)
            if split_alt is not None:
                issues.append(make_issue(
                    IssueKind.DOUBLE_NAME_SPLIT, file_stem, page,
                    f"split {name!r} into {primary!r} / {split_alt!r}", line))
                flags.add(RecordFlag.NAME_SPLIT)
                name, alt = primary, split_alt

        business_id: str | None = None
        id_cell = aligned.id_cell.strip()
        if not id_cell:
            issues.append(make_issue(
                IssueKind.MISSING_FIELD, file_stem, page,
                "business_id missing", line))
        elif is_id_shaped(id_cell):
            canonical, reason = validate_business_id(id_cell)
            if canonical is not None:
                business_id = canonical
            else:
                business_id = id_cell
                flags.add(RecordFlag.ID_INVALID)
                issues.append(make_issue(
                    IssueKind.INVALID_BUSINESS_ID, file_stem, page,
                    f"business ID {id_cell!r} failed validation: {reason.value}",
                    line))
        else:
            issues.append(make_issue(
                IssueKind.MISSING_FIELD, file_stem, page,
                f"business_id missing (unusable cell {id_cell!r})", line))

        member_count: int | None = None
        count_cell = aligned.count_cell.strip()
        if not count_cell:
            issues.append(make_issue(
                IssueKind.MISSING_FIELD, file_stem, page,
                "member_count missing", line))
        else:
            value, ambiguous = parse_member_count(count_cell)
            if value is None:
                issues.append(make_issue(
                    IssueKind.MISSING_FIELD, file_stem, page,
                    f"member_count missing (unusable cell {count_cell!r})", line))
            else:
                member_count = value
                if ambiguous:
                    flags.add(RecordFlag.COUNT_AMBIGUOUS)
                    issues.append(make_issue(
                        IssueKind.AMBIGUOUS_COUNT, file_stem, page,
                        f"took first of several numbers in {count_cell!r}", line))

        records.append(ClubRecord(
            club_name=name,
            alt_name=alt,
            business_id=business_id,
            member_count=member_count,
            source_file=file_stem,
            source_page=page,
            flags=frozenset(flags),
        ))

    return records, issues
