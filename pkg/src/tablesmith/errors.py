"""Exception hierarchy shared across the package."""

from __future__ import annotations


class TablesmithError(Exception):
    """Base class for every error raised by this package."""


# --- input discovery / page loading -----------------------------------------

class DirectoryUnreadable(TablesmithError):
    pass


class MixedSourceConflict(TablesmithError):
    """Same file stem present both as a PDF and as page-text files."""


class PageFileMissing(TablesmithError):
    """Gap in a <stem>.pageNNN.txt sequence."""


class AdapterFailure(TablesmithError):
    """The PDF text-layer adapter could not produce page text."""


class NotAPdf(AdapterFailure):
    pass


class EncryptedPdf(AdapterFailure):
    pass


class NoTextLayer(AdapterFailure):
    pass


# --- prompt assembly ---------------------------------------------------------

class EmptyPage(TablesmithError):
    """Page text is whitespace-only; the page is skipped, not submitted."""


class MalformedTemplate(TablesmithError):
    pass


class PageUnsplittable(TablesmithError):
    """A page cannot be split any further yet still exceeds the budget."""


# --- completion providers ----------------------------------------------------

class ProviderError(TablesmithError):
    pass


class MissingCredential(ProviderError):
    pass


class BudgetRejected(ProviderError):
    """A live request would exceed the provider token budget."""


class ExhaustedRetries(ProviderError):
    def __init__(self, message: str, last_status: int | None = None):
        super().__init__(message)
        self.last_status = last_status


class NonRetryableHttpError(ProviderError):
    def __init__(self, message: str, status: int):
        super().__init__(message)
        self.status = status


class MalformedProviderResponse(ProviderError):
    pass


class FixtureMissing(ProviderError):
    """Replay fixture absent; carries the identity needed to author it."""

    def __init__(self, fingerprint: str, file_stem: str, page_index: int,
                 part_index: int | None = None):
        ident = f"{file_stem} page {page_index}"
        if part_index is not None:
            ident += f" part {part_index}"
        super().__init__(f"no replay fixture {fingerprint}.resp.txt for {ident}")
        self.fingerprint = fingerprint
        self.file_stem = file_stem
        self.page_index = page_index
        self.part_index = part_index


# --- validation --------------------------------------------------------------

class MalformedBase(TablesmithError):
    """Business-ID base is not exactly seven ASCII digits."""


# --- configuration and output sinks ------------------------------------------

class ConfigError(TablesmithError):
    pass


class MissingKey(ConfigError):
    pass


class UnknownKey(ConfigError):
    pass


class UnreadableFile(ConfigError):
    pass


class IoFailure(TablesmithError):
    """Output sink could not write its destination."""


# --- evaluation kit ----------------------------------------------------------

class DuplicateGoldenKey(TablesmithError):
    """Golden table holds two records with the same normalized name."""


class SpecInvalid(TablesmithError):
    """Corpus generator parameters violate their invariants."""
