"""tablesmith: membership-report pages in, validated club tables out.

A batch pipeline that feeds per-page report text to a pluggable text
completion provider, parses the sentinel-delimited responses, and refines
the rows with deterministic rules (noise filtering, bilingual name
splitting, column realignment, business-ID checksums, count parsing).
Replay fixtures make whole runs bit-deterministic; the evalkit measures
accuracy, completeness and robustness against golden tables and generates
seeded synthetic corpora with fault injection.
"""

from .config import RunConfig, load_config
from .extraction import RawRow, parse_response, parse_row, render_record_block
from .ingest import (
    InputDocument,
    PageText,
    SourceKind,
    extract_pdf_pages,
    list_input_files,
    load_pages,
)
from .issues import IssueKind, Severity, ValidationIssue
from .pipeline import (
    FileReport,
    Outcome,
    RunReport,
    classify_outcome,
    process_file,
    run_batch,
    write_run_report,
)
from .prompting import (
    PromptBundle,
    PromptTemplate,
    assert_budget,
    build_prompt,
    estimate_tokens,
)
from .provider import (
    CLAUDE3_OPUS_PROFILE,
    GPT4_PROFILE,
    CompletionResult,
    LiveProvider,
    ProviderProfile,
    RecordingProvider,
    ReplayProvider,
    prompt_fingerprint,
)
from .refinery import (
    ClubRecord,
    RecordFlag,
    compute_check_digit,
    is_noise_row,
    parse_member_count,
    realign_row,
    refine_rows,
    split_double_name,
    validate_business_id,
)
from .sinks import read_records_csv, write_records_csv, write_workbook

__version__ = "0.1.0"
