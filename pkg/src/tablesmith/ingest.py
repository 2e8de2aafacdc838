"""Discover input documents and produce ordered per-page text.

Canonical hermetic input is plain-text page files named
``<stem>.page<NNN>.txt`` (NNN zero-padded to three digits, UTF-8). PDFs are
supported through an isolated text-layer adapter so the core pipeline never
depends on a PDF engine. All text I/O is strict UTF-8; invalid bytes are a
hard error rather than silent replacement (å/ä/ö must survive intact).
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from pathlib import Path

from .errors import (
    AdapterFailure,
    DirectoryUnreadable,
    MixedSourceConflict,
    NoTextLayer,
    PageFileMissing,
)

PAGE_FILE_RE = re.compile(r"^(?P<stem>.+)\.page(?P<num>[0-9]{3})\.txt$")


class SourceKind(enum.Enum):
    PLAIN_TEXT_PAGES = "PlainTextPages"
    PDF = "Pdf"


@dataclass(frozen=True)
class PageText:
    """One page's extracted text, the unit of provider submission."""

    file_stem: str
    page_index: int
    text: str
    char_count: int

    def __post_init__(self) -> None:
        if self.page_index < 0:
            raise ValueError("page_index must be >= 0")
        if self.char_count != len(self.text):
            raise ValueError("char_count must equal len(text)")

    @classmethod
    def make(cls, file_stem: str, page_index: int, text: str) -> "PageText":
        return cls(file_stem, page_index, text, len(text))


@dataclass(frozen=True)
class InputDocument:
    file_stem: str
    source_kind: SourceKind
    page_count: int
    page_paths: tuple[Path, ...] = field(default=(), repr=False)
    pdf_path: Path | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        if self.page_count < 1:
            raise ValueError("page_count must be >= 1")


def page_file_name(stem: str, page_index: int) -> str:
    return f"{stem}.page{page_index:03d}.txt"


def list_input_files(input_dir: Path | str) -> list[InputDocument]:
    """One InputDocument per PDF and per page-text group, sorted by stem."""
    root = Path(input_dir)
    try:
        entries = sorted(p for p in root.iterdir() if p.is_file())
    except OSError as exc:
        raise DirectoryUnreadable(f"cannot read {root}: {exc}") from exc

    page_groups: dict[str, list[tuple[int, Path]]] = {}
    pdf_paths: dict[str, Path] = {}
    for path in entries:
        m = PAGE_FILE_RE.match(path.name)
        if m:
            page_groups.setdefault(m.group("stem"), []).append(
                (int(m.group("num")), path))
        elif path.suffix.lower() == ".pdf":
            pdf_paths[path.stem] = path

    conflicts = sorted(set(page_groups) & set(pdf_paths))
    if conflicts:
        raise MixedSourceConflict(
            f"stems present both as PDF and as page text: {conflicts}")

    docs: list[InputDocument] = []
    for stem, numbered in page_groups.items():
        numbered.sort()
        docs.append(InputDocument(
            file_stem=stem,
            source_kind=SourceKind.PLAIN_TEXT_PAGES,
            page_count=len(numbered),
            page_paths=tuple(p for _, p in numbered),
        ))
    for stem, path in pdf_paths.items():
        docs.append(InputDocument(
            file_stem=stem,
            source_kind=SourceKind.PDF,
            page_count=_pdf_page_count_or_one(path),
            pdf_path=path,
        ))
    docs.sort(key=lambda d: d.file_stem)
    return docs


def _pdf_page_count_or_one(path: Path) -> int:
    # Structural count only; a broken PDF defers its failure to load_pages
    # so discovery never crashes the run over one bad file.
    from . import _pdftext

    try:
        return max(1, _pdftext.count_pages(path.read_bytes(), str(path)))
    except Exception:
        return 1


def load_pages(doc: InputDocument) -> list[PageText]:
    """Load the document's pages in page_index order.

    Page-text files are read verbatim (no newline translation, strict
    UTF-8). The PDF path delegates to the adapter; its failures surface as
    AdapterFailure so the file can be reported rather than crash the run.
    """
    if doc.source_kind is SourceKind.PLAIN_TEXT_PAGES:
        expected = [page_file_name(doc.file_stem, i) for i in range(doc.page_count)]
        actual = [p.name for p in doc.page_paths]
        if actual != expected:
            missing = sorted(set(expected) - set(actual))
            raise PageFileMissing(
                f"{doc.file_stem}: page files are not contiguous from 000; "
                f"missing {missing}")
        pages = []
        for index, path in enumerate(doc.page_paths):
            text = path.read_bytes().decode("utf-8")
            pages.append(PageText.make(doc.file_stem, index, text))
        return pages

    assert doc.pdf_path is not None
    try:
        return extract_pdf_pages(doc.pdf_path)
    except AdapterFailure:
        raise
    except Exception as exc:  # adapter bugs must not crash the batch
        raise AdapterFailure(f"{doc.pdf_path}: {exc}") from exc


def extract_pdf_pages(pdf_path: Path | str) -> list[PageText]:
    """Extract per-page text from a digital PDF via the adapter.

    One PageText per physical page in reading order; layout is approximated
    by line breaks and tab runs between columns. Exact whitespace rendering
    is adapter-defined but stable for a fixed adapter version.
    """
    from . import _pdftext

    path = Path(pdf_path)
    texts = _pdftext.extract_page_texts(path.read_bytes(), str(path))
    if not any(t.strip() for t in texts):
        raise NoTextLayer(f"{path}: no extractable text layer")
    return [PageText.make(path.stem, i, t) for i, t in enumerate(texts)]
