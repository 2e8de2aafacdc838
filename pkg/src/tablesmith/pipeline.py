"""End-to-end batch orchestration.

Each file is processed page by page — one provider call per page (or page
part after a budget split), never one call for a whole document. Per-file
problems degrade into issues and outcome classification; they never abort
the batch. Files may run concurrently; reports are sorted by file stem so
parallelism can never change output bytes.
"""

from __future__ import annotations

import hashlib
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Callable

from . import figures, prompting, sinks
from .config import RunConfig
from .errors import IoFailure, PageUnsplittable, ProviderError, TablesmithError
from .ingest import InputDocument, list_input_files, load_pages
from .issues import IssueKind, Severity, ValidationIssue, make_issue
from .extraction import parse_response
from .prompting import PromptTemplate, default_template, load_template
from .provider import (
    CompletionBackend,
    LiveProvider,
    ProviderProfile,
    RecordingProvider,
    ReplayProvider,
)
from .refinery import ClubRecord, refine_rows


class Outcome(Enum):
    CLEAN = "Clean"
    CORRECTED = "CorrectedAutomatically"
    MANUAL = "ManualRequired"


@dataclass(frozen=True)
class FileReport:
    file_stem: str
    pages_processed: int
    rows_emitted: int
    issues: tuple[ValidationIssue, ...]
    outcome: Outcome


@dataclass(frozen=True)
class RunReport:
    started_at: str
    config_digest: str
    file_reports: tuple[FileReport, ...]
    totals: dict[str, int]
    deterministic_digest: str


def classify_outcome(issues: list[ValidationIssue] | tuple[ValidationIssue, ...],
                     rows_emitted: int,
                     manual_error_ratio: float = 0.10) -> Outcome:
    """Bucket a file by its issues.

    ManualRequired when any response came back empty/unusable or when
    error-severity issues touch more than the configured share of the
    file's rows (emitted plus dropped); CorrectedAutomatically when any
    warn- or error-level issue remains; Clean otherwise.
    """
    if any(i.kind is IssueKind.EMPTY_RESPONSE for i in issues):
        return Outcome.MANUAL

    dropped = sum(1 for i in issues
                  if i.kind in (IssueKind.NOISE_ROW_DROPPED,
                                IssueKind.UNPARSEABLE_ROW))
    error_rows = {(i.source_page, i.line_no) for i in issues
                  if i.severity is Severity.ERROR and i.line_no is not None}
    denominator = rows_emitted + dropped
    if denominator > 0 and len(error_rows) > manual_error_ratio * denominator:
        return Outcome.MANUAL
    if any(i.severity in (Severity.WARN, Severity.ERROR) for i in issues):
        return Outcome.CORRECTED
    return Outcome.CLEAN


def build_provider(cfg: RunConfig) -> CompletionBackend:
    if cfg.mode == "replay":
        return ReplayProvider(cfg.fixture_dir)
    profile = profile_from(cfg)
    live = LiveProvider(
        profile,
        endpoint_url=cfg.endpoint_url,
        model_name=cfg.model_name,
        api_key_env=cfg.api_key_env,
        sampling_params=cfg.sampling_params,
        request_timeout_ms=cfg.request_timeout_ms,
    )
    if cfg.mode == "record":
        return RecordingProvider(live, cfg.fixture_dir)
    return live


def profile_from(cfg: RunConfig) -> ProviderProfile:
    return ProviderProfile(
        name=cfg.model_name,
        input_token_budget=cfg.input_token_budget,
        output_token_budget=cfg.output_token_budget,
        max_retries=cfg.max_retries,
        base_backoff_ms=cfg.base_backoff_ms,
        min_request_interval_ms=cfg.min_request_interval_ms,
    )


def load_run_template(cfg: RunConfig) -> PromptTemplate:
    if cfg.prompt_template is None:
        return default_template()
    return load_template(cfg.prompt_template)


def process_file(doc: InputDocument, cfg: RunConfig,
                 template: PromptTemplate | None = None,
                 provider: CompletionBackend | None = None,
                 ) -> tuple[list[ClubRecord], FileReport]:
    """Process one document page by page.

    Provider failures and unusable pages become error issues; remaining
    pages still run. Records keep page order.
    """
    template = template or load_run_template(cfg)
    provider = provider or build_provider(cfg)
    profile = profile_from(cfg)
    stem = doc.file_stem

    try:
        pages = load_pages(doc)
    except (TablesmithError, UnicodeDecodeError) as exc:
        issue = make_issue(IssueKind.EMPTY_RESPONSE, stem, 0,
                           f"could not load pages: {exc}")
        report = FileReport(stem, 0, 0, (issue,), Outcome.MANUAL)
        return [], report

    records: list[ClubRecord] = []
    issues: list[ValidationIssue] = []
    for page in pages:
        if not page.text.strip():
            issues.append(make_issue(
                IssueKind.PAGE_SKIPPED, stem, page.page_index,
                "page text is blank; not submitted"))
            continue
        try:
            bundles = prompting.plan_prompts(template, page, profile)
        except PageUnsplittable as exc:
            issues.append(make_issue(
                IssueKind.EMPTY_RESPONSE, stem, page.page_index,
                f"page cannot be split to fit the budget: {exc}"))
            continue

        page_rows = []
        page_failed = False
        for bundle in bundles:
            try:
                result = provider.complete(bundle)
            except ProviderError as exc:
                issues.append(make_issue(
                    IssueKind.EMPTY_RESPONSE, stem, page.page_index,
                    f"provider failed on {bundle.page_label}: "
                    f"{type(exc).__name__}: {exc}"))
                page_failed = True
                continue
            rows, parse_issues = parse_response(
                result.text, page.page_index, stem)
            issues.extend(parse_issues)
            page_rows.extend(rows)

        if not page_rows and not page_failed and not any(
                i.kind is IssueKind.EMPTY_RESPONSE
                and i.source_page == page.page_index for i in issues):
            issues.append(make_issue(
                IssueKind.EMPTY_RESPONSE, stem, page.page_index,
                "non-empty page produced no rows"))
        page_records, refine_issues = refine_rows(
            page_rows, stem, cfg.noise_stopwords, cfg.assoc_suffixes)
        records.extend(page_records)
        issues.extend(refine_issues)

    outcome = classify_outcome(issues, len(records), cfg.manual_error_ratio)
    report = FileReport(
        file_stem=stem,
        pages_processed=len(pages),
        rows_emitted=len(records),
        issues=tuple(issues),
        outcome=outcome,
    )
    return records, report


def _totals(reports: list[FileReport]) -> dict[str, int]:
    return {
        "files": len(reports),
        "clean": sum(1 for r in reports if r.outcome is Outcome.CLEAN),
        "corrected": sum(1 for r in reports if r.outcome is Outcome.CORRECTED),
        "manual": sum(1 for r in reports if r.outcome is Outcome.MANUAL),
        "rows": sum(r.rows_emitted for r in reports),
    }


def _issue_doc(issue: ValidationIssue) -> dict:
    return {
        "kind": issue.kind.value,
        "severity": issue.severity.value,
        "file_stem": issue.file_stem,
        "source_page": issue.source_page,
        "line_no": issue.line_no,
        "message": issue.message,
    }


def _file_report_doc(report: FileReport) -> dict:
    return {
        "file_stem": report.file_stem,
        "pages_processed": report.pages_processed,
        "rows_emitted": report.rows_emitted,
        "outcome": report.outcome.value,
        "issues": [_issue_doc(i) for i in report.issues],
    }


def run_report_doc(report: RunReport) -> dict:
    """JSON document with keys in fixed order."""
    return {
        "started_at": report.started_at,
        "config_digest": report.config_digest,
        "totals": report.totals,
        "file_reports": [_file_report_doc(r) for r in report.file_reports],
        "deterministic_digest": report.deterministic_digest,
    }


def compute_deterministic_digest(config_digest: str,
                                 reports: list[FileReport]) -> str:
    """Digest over the serialized report with started_at removed (and the
    digest field itself, which is being computed)."""
    doc = {
        "config_digest": config_digest,
        "totals": _totals(reports),
        "file_reports": [_file_report_doc(r) for r in reports],
    }
    payload = json.dumps(doc, ensure_ascii=False, separators=(",", ":"))
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def make_run_report(config_digest: str, reports: list[FileReport],
                    started_at: str) -> RunReport:
    ordered = sorted(reports, key=lambda r: r.file_stem)
    return RunReport(
        started_at=started_at,
        config_digest=config_digest,
        file_reports=tuple(ordered),
        totals=_totals(ordered),
        deterministic_digest=compute_deterministic_digest(config_digest, ordered),
    )


def write_run_report(report: RunReport, path: Path | str) -> None:
    out = Path(path)
    try:
        out.parent.mkdir(parents=True, exist_ok=True)
        payload = json.dumps(run_report_doc(report), ensure_ascii=False, indent=2)
        out.write_text(payload + "\n", encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot write {out}: {exc}") from exc


def _utc_now() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def run_batch(cfg: RunConfig,
              now: Callable[[], str] = _utc_now,
              provider: CompletionBackend | None = None) -> RunReport:
    """Discover, process, and write every output sink.

    Returns the run report; the CLI maps "any ManualRequired file" to exit
    status 2. A provider may be injected for tests; otherwise one backend
    is shared by all workers so rate limiting stays process-wide.
    """
    started_at = now()
    template = load_run_template(cfg)
    shared_provider = provider or build_provider(cfg)
    docs = list_input_files(cfg.input_dir)

    results: dict[str, tuple[list[ClubRecord], FileReport]] = {}
    if cfg.max_parallel_files > 1 and len(docs) > 1:
        with ThreadPoolExecutor(max_workers=cfg.max_parallel_files) as pool:
            futures = {
                doc.file_stem: pool.submit(
                    process_file, doc, cfg, template, shared_provider)
                for doc in docs
            }
            results = {stem: f.result() for stem, f in futures.items()}
    else:
        for doc in docs:
            results[doc.file_stem] = process_file(
                doc, cfg, template, shared_provider)

    stems = sorted(results)
    reports = [results[s][1] for s in stems]
    records_by_stem = {s: results[s][0] for s in stems}

    out_dir = Path(cfg.output_dir)
    csv_dir = out_dir / "csv"
    for stem in stems:
        sinks.write_records_csv(records_by_stem[stem], csv_dir / f"{stem}.csv")
    combined = [rec for s in stems for rec in records_by_stem[s]]
    sinks.write_records_csv(combined, out_dir / "records.csv")
    sinks.write_workbook(records_by_stem, out_dir / "records.xlsx")

    report = make_run_report(cfg.config_digest, reports, started_at)
    write_run_report(report, out_dir / "run_report.json")
    figures.render_run_summary(report, out_dir / "run_summary.png")
    return report
