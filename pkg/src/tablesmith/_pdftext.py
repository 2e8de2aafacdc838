"""Minimal text-layer extraction for digitally generated PDFs.

This is the whole of the PDF adapter: nowhere else in the package may touch
PDF internals. Scope is deliberately narrow — classic cross-reference
layout, uncompressed or FlateDecode content streams, simple single-byte
fonts (WinAnsi/Latin). That covers the membership-report class of digital
documents and the fixture PDFs used in tests. Scanned documents have no
text layer here by definition and raise NoTextLayer upstream; anything
structurally beyond scope raises AdapterFailure rather than guessing.

Layout approximation: one output line per distinct text baseline (descending
y), tab characters between separately positioned chunks on the same
baseline.
"""

from __future__ import annotations

import base64
import re
import zlib
from typing import Any, NamedTuple

from .errors import AdapterFailure, EncryptedPdf, NotAPdf

_WHITESPACE = b"\x00\t\n\x0c\r "
_DELIMITERS = b"()<>[]{}/%"
_OBJ_RE = re.compile(rb"(\d+)\s+(\d+)\s+obj\b")
_NUMBER_RE = re.compile(rb"[+-]?(?:\d+\.?\d*|\.\d+)")


class _Ref(NamedTuple):
    num: int
    gen: int


class _Stream(NamedTuple):
    info: dict
    raw: bytes


def _is_regular(byte: int) -> bool:
    return byte not in _WHITESPACE and byte not in _DELIMITERS


def _skip_ws(data: bytes, pos: int) -> int:
    n = len(data)
    while pos < n:
        b = data[pos]
        if b in _WHITESPACE:
            pos += 1
        elif b == 0x25:  # % comment to end of line
            while pos < n and data[pos] not in b"\r\n":
                pos += 1
        else:
            break
    return pos


def _parse_name(data: bytes, pos: int) -> tuple[str, int]:
    pos += 1  # consume '/'
    out = bytearray()
    n = len(data)
    while pos < n and _is_regular(data[pos]):
        if data[pos] == 0x23 and pos + 2 < n:  # #xx hex escape
            try:
                out.append(int(data[pos + 1:pos + 3], 16))
                pos += 3
                continue
            except ValueError:
                pass
        out.append(data[pos])
        pos += 1
    return out.decode("latin-1"), pos


def _parse_literal_string(data: bytes, pos: int) -> tuple[bytes, int]:
    pos += 1  # consume '('
    out = bytearray()
    depth = 1
    n = len(data)
    while pos < n:
        b = data[pos]
        if b == 0x5C:  # backslash escape
            pos += 1
            if pos >= n:
                break
            e = data[pos]
            if e in b"nrtbf":
                out.append({0x6E: 10, 0x72: 13, 0x74: 9, 0x62: 8, 0x66: 12}[e])
                pos += 1
            elif e in b"()\\":
                out.append(e)
                pos += 1
            elif e in b"\r\n":  # line continuation
                pos += 1
                if e == 0x0D and pos < n and data[pos] == 0x0A:
                    pos += 1
            elif 0x30 <= e <= 0x37:  # up to three octal digits
                digits = bytearray()
                while pos < n and len(digits) < 3 and 0x30 <= data[pos] <= 0x37:
                    digits.append(data[pos])
                    pos += 1
                out.append(int(digits, 8) & 0xFF)
            else:
                out.append(e)
                pos += 1
        elif b == 0x28:
            depth += 1
            out.append(b)
            pos += 1
        elif b == 0x29:
            depth -= 1
            pos += 1
            if depth == 0:
                break
            out.append(b)
        else:
            out.append(b)
            pos += 1
    return bytes(out), pos


def _parse_hex_string(data: bytes, pos: int) -> tuple[bytes, int]:
    pos += 1  # consume '<'
    end = data.find(b">", pos)
    if end < 0:
        end = len(data)
    digits = bytes(ch for ch in data[pos:end] if ch not in _WHITESPACE)
    if len(digits) % 2:
        digits += b"0"
    return bytes.fromhex(digits.decode("ascii", "ignore")), end + 1


def _parse_value(data: bytes, pos: int) -> tuple[Any, int]:
    pos = _skip_ws(data, pos)
    if pos >= len(data):
        raise AdapterFailure("unexpected end of PDF data")
    b = data[pos]
    if data.startswith(b"<<", pos):
        return _parse_dict(data, pos)
    if b == 0x3C:
        return _parse_hex_string(data, pos)
    if b == 0x5B:  # array
        pos += 1
        items = []
        while True:
            pos = _skip_ws(data, pos)
            if pos >= len(data) or data[pos] == 0x5D:
                return items, pos + 1
            value, pos = _parse_value(data, pos)
            items.append(value)
    if b == 0x2F:
        return _parse_name(data, pos)
    if b == 0x28:
        return _parse_literal_string(data, pos)
    for literal, value in ((b"true", True), (b"false", False), (b"null", None)):
        if data.startswith(literal, pos):
            return value, pos + len(literal)
    m = _NUMBER_RE.match(data, pos)
    if m:
        text = m.group()
        after = _skip_ws(data, m.end())
        # "N G R" is an indirect reference
        m2 = _NUMBER_RE.match(data, after)
        if m2 and b"." not in text and not text.startswith(b"-"):
            after2 = _skip_ws(data, m2.end())
            if data.startswith(b"R", after2) and (
                    after2 + 1 >= len(data) or not _is_regular(data[after2 + 1])):
                return _Ref(int(text), int(m2.group())), after2 + 1
        return (float(text) if b"." in text else int(text)), m.end()
    raise AdapterFailure(f"cannot parse PDF value at offset {pos}")


def _parse_dict(data: bytes, pos: int) -> tuple[dict, int]:
    pos += 2  # consume '<<'
    out: dict[str, Any] = {}
    while True:
        pos = _skip_ws(data, pos)
        if data.startswith(b">>", pos):
            return out, pos + 2
        if pos >= len(data):
            raise AdapterFailure("unterminated PDF dictionary")
        key, pos = _parse_name(data, pos)
        value, pos = _parse_value(data, pos)
        out[key] = value


class _Document:
    """Object store scanned linearly from the raw bytes."""

    def __init__(self, data: bytes, label: str):
        self.label = label
        head = data[:1024]
        if b"%PDF-" not in head:
            raise NotAPdf(f"{label}: missing %PDF header")
        self.objects: dict[int, Any] = {}
        self.streams: dict[int, _Stream] = {}
        scan = 0
        while True:
            m = _OBJ_RE.search(data, scan)
            if m is None:
                break
            num = int(m.group(1))
            try:
                value, pos = _parse_value(data, m.end())
            except AdapterFailure:
                scan = m.end()
                continue
            self.objects[num] = value
            if isinstance(value, dict):
                pos = _skip_ws(data, pos)
                if data.startswith(b"stream", pos):
                    pos += len(b"stream")
                    if data.startswith(b"\r\n", pos):
                        pos += 2
                    elif data.startswith(b"\n", pos) or data.startswith(b"\r", pos):
                        pos += 1
                    length = value.get("Length")
                    if isinstance(length, int):
                        raw = data[pos:pos + length]
                        pos += length
                    else:
                        end = data.find(b"endstream", pos)
                        raw = data[pos:end if end >= 0 else len(data)]
                        raw = raw.rstrip(b"\r\n")
                        pos = end if end >= 0 else len(data)
                    self.streams[num] = _Stream(value, raw)
            # Resume scanning after the object body so binary stream bytes
            # can never masquerade as object headers.
            scan = max(pos, m.end())
        self.trailer = self._find_trailer(data)
        if "Encrypt" in self.trailer:
            raise EncryptedPdf(f"{label}: document is encrypted")

    def _find_trailer(self, data: bytes) -> dict:
        idx = data.rfind(b"trailer")
        while idx >= 0:
            try:
                value, _ = _parse_value(data, idx + len(b"trailer"))
                if isinstance(value, dict):
                    return value
            except AdapterFailure:
                pass
            idx = data.rfind(b"trailer", 0, idx)
        # No classic trailer: fall back to the catalog object, if any.
        for num, value in self.objects.items():
            if isinstance(value, dict) and value.get("Type") == "Catalog":
                return {"Root": _Ref(num, 0)}
        return {}

    def resolve(self, value: Any) -> Any:
        seen = 0
        while isinstance(value, _Ref):
            value = self.objects.get(value.num)
            seen += 1
            if seen > 32:
                raise AdapterFailure(f"{self.label}: circular reference chain")
        return value

    def stream_bytes(self, ref: Any) -> bytes:
        if not isinstance(ref, _Ref) or ref.num not in self.streams:
            return b""
        info, raw = self.streams[ref.num]
        filters = self.resolve(info.get("Filter"))
        if filters is None:
            return raw
        if isinstance(filters, str):
            filters = [filters]
        out = raw
        for f in filters:
            if f == "FlateDecode":
                try:
                    out = zlib.decompress(out)
                except zlib.error as exc:
                    raise AdapterFailure(
                        f"{self.label}: bad FlateDecode stream: {exc}") from exc
            elif f == "ASCII85Decode":
                payload = bytes(out).strip()
                if payload.startswith(b"<~"):
                    payload = payload[2:]
                if payload.endswith(b"~>"):
                    payload = payload[:-2]
                try:
                    out = base64.a85decode(payload, adobe=False,
                                           ignorechars=_WHITESPACE)
                except ValueError as exc:
                    raise AdapterFailure(
                        f"{self.label}: bad ASCII85 stream: {exc}") from exc
            elif f == "ASCIIHexDecode":
                digits = bytes(ch for ch in out
                               if ch not in _WHITESPACE and ch != 0x3E)
                if len(digits) % 2:
                    digits += b"0"
                try:
                    out = bytes.fromhex(digits.decode("ascii"))
                except (UnicodeDecodeError, ValueError) as exc:
                    raise AdapterFailure(
                        f"{self.label}: bad ASCIIHex stream: {exc}") from exc
            else:
                raise AdapterFailure(
                    f"{self.label}: unsupported stream filter /{f}")
        return out

    def page_refs(self) -> list[_Ref]:
        root = self.resolve(self.trailer.get("Root"))
        pages: list[_Ref] = []
        if isinstance(root, dict):
            self._walk(root.get("Pages"), pages, depth=0)
        if pages:
            return pages
        # Degenerate file with no page tree: take /Type /Page objects in
        # file order.
        return [_Ref(num, 0) for num, value in sorted(self.objects.items())
                if isinstance(value, dict) and value.get("Type") == "Page"]

    def _walk(self, node_ref: Any, pages: list[_Ref], depth: int) -> None:
        if depth > 64:
            raise AdapterFailure(f"{self.label}: page tree too deep")
        node = self.resolve(node_ref)
        if not isinstance(node, dict):
            return
        if node.get("Type") == "Page":
            assert isinstance(node_ref, _Ref)
            pages.append(node_ref)
            return
        for kid in self.resolve(node.get("Kids")) or []:
            self._walk(kid, pages, depth + 1)


def _decode_pdf_text(raw: bytes) -> str:
    try:
        return raw.decode("cp1252")
    except UnicodeDecodeError:
        return raw.decode("latin-1")


class _Chunk(NamedTuple):
    y: float
    x: float
    seq: int
    text: str


def _render_content(content: bytes) -> str:
    """Interpret text-showing operators into positioned chunks, then lines."""
    chunks: list[_Chunk] = []
    stack: list[Any] = []
    x = y = 0.0
    leading = 0.0
    seq = 0
    pos = 0
    n = len(content)

    def show(value: Any) -> None:
        nonlocal seq
        if isinstance(value, bytes):
            text = _decode_pdf_text(value)
        elif isinstance(value, list):
            text = "".join(_decode_pdf_text(v) for v in value
                           if isinstance(v, bytes))
        else:
            return
        if text:
            chunks.append(_Chunk(y, x, seq, text))
            seq += 1

    def num(value: Any) -> float:
        return float(value) if isinstance(value, (int, float)) else 0.0

    while pos < n:
        pos = _skip_ws(content, pos)
        if pos >= n:
            break
        b = content[pos]
        if b == 0x2F or b == 0x28 or b == 0x3C or b == 0x5B or (
                0x30 <= b <= 0x39) or b in (0x2B, 0x2D, 0x2E):
            try:
                value, pos = _parse_value(content, pos)
            except AdapterFailure:
                pos += 1
                continue
            stack.append(value)
            continue
        # operator token
        start = pos
        while pos < n and _is_regular(content[pos]):
            pos += 1
        if pos == start:
            pos += 1
            continue
        op = content[start:pos]
        if op == b"Tm" and len(stack) >= 6:
            x, y = num(stack[-2]), num(stack[-1])
        elif op in (b"Td", b"TD") and len(stack) >= 2:
            x += num(stack[-2])
            y += num(stack[-1])
            if op == b"TD":
                leading = -num(stack[-1])
        elif op == b"TL" and stack:
            leading = num(stack[-1])
        elif op == b"T*":
            y -= leading
        elif op == b"Tj" and stack:
            show(stack[-1])
        elif op == b"TJ" and stack:
            show(stack[-1])
        elif op == b"'" and stack:
            y -= leading
            show(stack[-1])
        elif op == b'"' and len(stack) >= 3:
            y -= leading
            show(stack[-1])
        elif op == b"BT":
            x = y = 0.0
        stack.clear()

    lines: dict[float, list[_Chunk]] = {}
    for chunk in chunks:
        lines.setdefault(round(chunk.y, 1), []).append(chunk)
    rendered = []
    for key in sorted(lines, reverse=True):
        parts = sorted(lines[key], key=lambda c: (c.x, c.seq))
        pieces: list[str] = []
        last_x = None
        for part in parts:
            if last_x is not None and part.x != last_x:
                pieces.append("\t")
            pieces.append(part.text)
            last_x = part.x
        rendered.append("".join(pieces))
    return "\n".join(rendered)


def count_pages(data: bytes, label: str) -> int:
    return len(_Document(data, label).page_refs())


def extract_page_texts(data: bytes, label: str) -> list[str]:
    """Per-page text strings in page order; empty string for empty pages."""
    doc = _Document(data, label)
    page_refs = doc.page_refs()
    if not page_refs:
        raise AdapterFailure(f"{label}: no pages found")
    texts = []
    for ref in page_refs:
        page = doc.resolve(ref)
        contents = page.get("Contents")
        resolved = doc.resolve(contents)
        if isinstance(resolved, list):
            body = b"\n".join(doc.stream_bytes(c) for c in resolved)
        else:
            body = doc.stream_bytes(contents)
        texts.append(_render_content(body))
    return texts
