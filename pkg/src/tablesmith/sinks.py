"""Record output sinks: canonical CSV and a compatibility spreadsheet.

CSV is the canonical, diffable sink: UTF-8, LF endings, RFC-4180 quoting,
fixed header. The workbook writer emits a minimal Office Open XML package
with one worksheet per source file and member counts stored as numbers;
it is written with the standard library because no spreadsheet package is
available, and kept just large enough to open in common spreadsheet
software.
"""

from __future__ import annotations

import csv
import io
import re
import zipfile
from pathlib import Path
from typing import Iterable, Mapping
from xml.sax.saxutils import escape

from .errors import IoFailure
from .refinery import ClubRecord

CSV_HEADER = ("club_name", "alt_name", "business_id", "member_count",
              "source_file", "source_page")


def write_records_csv(records: Iterable[ClubRecord], path: Path | str) -> int:
    """Write records in input order; returns the number of data rows."""
    out = Path(path)
    count = 0
    try:
        out.parent.mkdir(parents=True, exist_ok=True)
        with out.open("w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CSV_HEADER)
            for rec in records:
                writer.writerow(_record_cells(rec))
                count += 1
    except OSError as exc:
        raise IoFailure(f"cannot write {out}: {exc}") from exc
    return count


def _record_cells(rec: ClubRecord) -> tuple[str, str, str, str, str, str]:
    return (
        rec.club_name,
        rec.alt_name or "",
        rec.business_id or "",
        "" if rec.member_count is None else str(rec.member_count),
        rec.source_file,
        str(rec.source_page),
    )


def read_records_csv(path: Path | str) -> list[ClubRecord]:
    """Load a CSV written by write_records_csv (golden files use the same
    schema). Record flags are not serialized and come back empty."""
    p = Path(path)
    try:
        text = p.read_bytes().decode("utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot read {p}: {exc}") from exc
    reader = csv.reader(io.StringIO(text))
    rows = list(reader)
    if not rows or tuple(rows[0]) != CSV_HEADER:
        raise IoFailure(f"{p}: missing or wrong CSV header")
    records = []
    for cells in rows[1:]:
        if len(cells) != len(CSV_HEADER):
            raise IoFailure(f"{p}: row has {len(cells)} cells")
        name, alt, business_id, count, source_file, source_page = cells
        records.append(ClubRecord(
            club_name=name,
            alt_name=alt or None,
            business_id=business_id or None,
            member_count=int(count) if count else None,
            source_file=source_file,
            source_page=int(source_page),
        ))
    return records


# --- workbook ----------------------------------------------------------------

_SHEET_NAME_BAD = re.compile(r"[\[\]:*?/\\]")
_XLSX_EPOCH = (1980, 1, 1, 0, 0, 0)

_CONTENT_TYPES_HEAD = (
    '<?xml version="1.0" encoding="UTF-8" standalone="yes"?>\n'
    '<Types xmlns="http://schemas.openxmlformats.org/package/2006/content-types">'
    '<Default Extension="rels" ContentType='
    '"application/vnd.openxmlformats-package.relationships+xml"/>'
    '<Default Extension="xml" ContentType="application/xml"/>'
    '<Override PartName="/xl/workbook.xml" ContentType="application/vnd.'
    'openxmlformats-officedocument.spreadsheetml.sheet.main+xml"/>'
    '<Override PartName="/xl/styles.xml" ContentType="application/vnd.'
    'openxmlformats-officedocument.spreadsheetml.styles+xml"/>'
)

_ROOT_RELS = (
    '<?xml version="1.0" encoding="UTF-8" standalone="yes"?>\n'
    '<Relationships xmlns='
    '"http://schemas.openxmlformats.org/package/2006/relationships">'
    '<Relationship Id="rId1" Type="http://schemas.openxmlformats.org/'
    'officeDocument/2006/relationships/officeDocument" Target="xl/workbook.xml"/>'
    '</Relationships>'
)

_STYLES = (
    '<?xml version="1.0" encoding="UTF-8" standalone="yes"?>\n'
    '<styleSheet xmlns='
    '"http://schemas.openxmlformats.org/spreadsheetml/2006/main">'
    '<fonts count="1"><font><sz val="11"/><name val="Calibri"/></font></fonts>'
    '<fills count="2"><fill><patternFill patternType="none"/></fill>'
    '<fill><patternFill patternType="gray125"/></fill></fills>'
    '<borders count="1"><border><left/><right/><top/><bottom/><diagonal/>'
    '</border></borders>'
    '<cellStyleXfs count="1"><xf numFmtId="0" fontId="0" fillId="0" '
    'borderId="0"/></cellStyleXfs>'
    '<cellXfs count="1"><xf numFmtId="0" fontId="0" fillId="0" borderId="0" '
    'xfId="0"/></cellXfs>'
    '</styleSheet>'
)


def sheet_names_for(stems: list[str]) -> list[str]:
    """Sanitize and truncate stems to 31 chars, uniquified in order."""
    used: set[str] = set()
    names = []
    for stem in stems:
        base = _SHEET_NAME_BAD.sub("_", stem).strip("'") or "sheet"
        name = base[:31]
        n = 2
        while name.lower() in used:
            suffix = f"~{n}"
            name = base[:31 - len(suffix)] + suffix
            n += 1
        used.add(name.lower())
        names.append(name)
    return names


def _column_ref(index: int) -> str:
    # Single letters suffice for the six-column schema.
    return chr(ord("A") + index)


def _sheet_xml(records: list[ClubRecord]) -> str:
    rows_xml: list[str] = []
    header_cells = "".join(
        f'<c r="{_column_ref(i)}1" t="inlineStr"><is><t>{escape(h)}</t></is></c>'
        for i, h in enumerate(CSV_HEADER))
    rows_xml.append(f'<row r="1">{header_cells}</row>')
    for rownum, rec in enumerate(records, start=2):
        cells = []
        for col, value in enumerate(_record_cells(rec)):
            ref = f"{_column_ref(col)}{rownum}"
            if col in (3, 5) and value != "":  # member_count, source_page
                cells.append(f'<c r="{ref}"><v>{value}</v></c>')
            elif value != "":
                cells.append(f'<c r="{ref}" t="inlineStr"><is>'
                             f'<t xml:space="preserve">{escape(value)}</t>'
                             f'</is></c>')
        rows_xml.append(f'<row r="{rownum}">{"".join(cells)}</row>')
    return (
        '<?xml version="1.0" encoding="UTF-8" standalone="yes"?>\n'
        '<worksheet xmlns='
        '"http://schemas.openxmlformats.org/spreadsheetml/2006/main">'
        f'<sheetData>{"".join(rows_xml)}</sheetData>'
        '</worksheet>'
    )


def write_workbook(records_by_stem: Mapping[str, list[ClubRecord]],
                   path: Path | str) -> int:
    """One worksheet per source file, CSV column order; returns sheet count."""
    out = Path(path)
    stems = list(records_by_stem)
    names = sheet_names_for(stems) if stems else ["records"]
    groups = [records_by_stem[s] for s in stems] if stems else [[]]

    content_types = [_CONTENT_TYPES_HEAD]
    sheet_tags = []
    rel_tags = []
    for i, name in enumerate(names, start=1):
        content_types.append(
            f'<Override PartName="/xl/worksheets/sheet{i}.xml" ContentType='
            '"application/vnd.openxmlformats-officedocument.spreadsheetml.'
            'worksheet+xml"/>')
        sheet_tags.append(
            f'<sheet name="{escape(name)}" sheetId="{i}" r:id="rId{i}"/>')
        rel_tags.append(
            f'<Relationship Id="rId{i}" Type="http://schemas.openxmlformats.'
            'org/officeDocument/2006/relationships/worksheet" '
            f'Target="worksheets/sheet{i}.xml"/>')
    content_types.append("</Types>")
    styles_rid = len(names) + 1
    rel_tags.append(
        f'<Relationship Id="rId{styles_rid}" Type="http://schemas.'
        'openxmlformats.org/officeDocument/2006/relationships/styles" '
        'Target="styles.xml"/>')

    workbook_xml = (
        '<?xml version="1.0" encoding="UTF-8" standalone="yes"?>\n'
        '<workbook xmlns='
        '"http://schemas.openxmlformats.org/spreadsheetml/2006/main" '
        'xmlns:r="http://schemas.openxmlformats.org/officeDocument/2006/'
        'relationships">'
        f'<sheets>{"".join(sheet_tags)}</sheets>'
        '</workbook>'
    )
    workbook_rels = (
        '<?xml version="1.0" encoding="UTF-8" standalone="yes"?>\n'
        '<Relationships xmlns='
        '"http://schemas.openxmlformats.org/package/2006/relationships">'
        f'{"".join(rel_tags)}</Relationships>'
    )

    parts: list[tuple[str, str]] = [
        ("[Content_Types].xml", "".join(content_types)),
        ("_rels/.rels", _ROOT_RELS),
        ("xl/workbook.xml", workbook_xml),
        ("xl/_rels/workbook.xml.rels", workbook_rels),
        ("xl/styles.xml", _STYLES),
    ]
    for i, group in enumerate(groups, start=1):
        parts.append((f"xl/worksheets/sheet{i}.xml", _sheet_xml(group)))

    try:
        out.parent.mkdir(parents=True, exist_ok=True)
        with zipfile.ZipFile(out, "w", zipfile.ZIP_DEFLATED) as zf:
            for arcname, payload in parts:
                # Fixed timestamp keeps workbook bytes reproducible.
                info = zipfile.ZipInfo(arcname, date_time=_XLSX_EPOCH)
                info.compress_type = zipfile.ZIP_DEFLATED
                zf.writestr(info, payload.encode("utf-8"))
    except OSError as exc:
        raise IoFailure(f"cannot write {out}: {exc}") from exc
    return len(names)
