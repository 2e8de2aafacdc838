"""Minimal fixture-PDF writer for exercising the ingest adapter.

Produces small, valid, uncompressed PDFs: Helvetica, WinAnsi encoding, one
text line per drawn line. Only tests need real PDFs; production input is
expected to arrive as page-text files or externally produced documents.
"""

from __future__ import annotations

_PAGE_WIDTH = 595
_PAGE_HEIGHT = 842
_MARGIN = 50
_LEADING = 14
_FONT_SIZE = 10


def _escape_pdf_text(line: str) -> bytes:
    raw = line.encode("cp1252", errors="replace")
    out = bytearray()
    for b in raw:
        if b in b"\\()":
            out.append(0x5C)
        out.append(b)
    return bytes(out)


def _page_content(lines: list[str]) -> bytes:
    ops = [b"BT", b"/F1 %d Tf" % _FONT_SIZE]
    y = _PAGE_HEIGHT - _MARGIN
    for line in lines:
        cells = line.split("\t")
        x = _MARGIN
        for cell in cells:
            if cell:
                ops.append(b"1 0 0 1 %d %d Tm" % (x, y))
                ops.append(b"(" + _escape_pdf_text(cell) + b") Tj")
            x += 170  # fixed column pitch approximates the table layout
        y -= _LEADING
    ops.append(b"ET")
    return b"\n".join(ops) + b"\n"


def render_fixture_pdf(page_texts: list[str]) -> bytes:
    """Build a PDF with one page per text, one drawn line per text line."""
    n_pages = max(1, len(page_texts))
    # Object layout: 1 catalog, 2 page tree, 3 font, then per page the page
    # object followed by its content stream.
    objects: dict[int, bytes] = {}
    kid_refs = []
    for i in range(n_pages):
        page_num = 4 + 2 * i
        kid_refs.append(b"%d 0 R" % page_num)
    objects[1] = b"<< /Type /Catalog /Pages 2 0 R >>"
    objects[2] = (b"<< /Type /Pages /Kids [ " + b" ".join(kid_refs)
                  + b" ] /Count %d >>" % n_pages)
    objects[3] = (b"<< /Type /Font /Subtype /Type1 /BaseFont /Helvetica"
                  b" /Encoding /WinAnsiEncoding >>")
    for i in range(n_pages):
        text = page_texts[i] if i < len(page_texts) else ""
        content = _page_content(text.splitlines())
        page_num = 4 + 2 * i
        objects[page_num] = (
            b"<< /Type /Page /Parent 2 0 R"
            b" /MediaBox [0 0 %d %d]" % (_PAGE_WIDTH, _PAGE_HEIGHT)
            + b" /Resources << /Font << /F1 3 0 R >> >>"
            + b" /Contents %d 0 R >>" % (page_num + 1)
        )
        objects[page_num + 1] = (
            b"<< /Length %d >>\nstream\n" % len(content)
            + content + b"endstream"
        )

    out = bytearray(b"%PDF-1.4\n")
    offsets: dict[int, int] = {}
    for num in sorted(objects):
        offsets[num] = len(out)
        out += b"%d 0 obj\n" % num + objects[num] + b"\nendobj\n"
    xref_at = len(out)
    max_num = max(objects)
    out += b"xref\n0 %d\n" % (max_num + 1)
    out += b"0000000000 65535 f \n"
    for num in range(1, max_num + 1):
        out += b"%010d 00000 n \n" % offsets.get(num, 0)
    out += (b"trailer\n<< /Size %d /Root 1 0 R >>\n" % (max_num + 1)
            + b"startxref\n%d\n" % xref_at + b"%%EOF\n")
    return bytes(out)
