"""Per-page prompt assembly and provider token-budget enforcement.

The instruction template is data, not code: a UTF-8 file with the literal
placeholders {SCHEMA}, {RULES} and {PAGE_TEXT}, each exactly once. Priority
rules ship as a companion data file so prompt iteration never requires a
code change. Token estimation is the provider-agnostic chars/4 heuristic;
a fixed overhead reserve absorbs its error.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .errors import EmptyPage, MalformedTemplate, PageUnsplittable
from .ingest import PageText

PLACEHOLDERS = ("{SCHEMA}", "{RULES}", "{PAGE_TEXT}")
SCHEMA_VERSION = "1"
SCHEMA_FIELDS = ("club_name", "alt_name", "business_id", "member_count")

# Budget guard constants: reserve absorbs the chars/4 estimation error,
# and each record line is budgeted at 20 output tokens.
RESERVED_OVERHEAD_TOKENS = 1000
OUTPUT_TOKENS_PER_ROW = 20


def schema_text() -> str:
    lines = [
        "1. club_name      - the club's primary registered name",
        "2. alt_name       - the same club's name in its other language, if printed",
        "3. business_id    - the Finnish business ID (Y-tunnus), format 1234567-8",
        "4. member_count   - the club's member count as a plain integer",
    ]
    return "\n".join(lines)


@dataclass(frozen=True)
class PromptTemplate:
    template_id: str
    instruction_text: str
    rules_text: str
    schema_version: str = SCHEMA_VERSION

    def __post_init__(self) -> None:
        for ph in PLACEHOLDERS:
            hits = self.instruction_text.count(ph)
            if hits != 1:
                raise MalformedTemplate(
                    f"template {self.template_id!r} must contain {ph} exactly "
                    f"once, found {hits}")


@dataclass(frozen=True)
class PromptBundle:
    prompt_text: str
    file_stem: str
    page_index: int
    estimated_input_tokens: int
    template_id: str
    # Needed downstream: budget checks bound output by the page line count,
    # and split parts keep page_index while gaining a part suffix in reports.
    page_line_count: int = 0
    part_index: int | None = None

    @property
    def page_label(self) -> str:
        if self.part_index is None:
            return f"page {self.page_index}"
        return f"page {self.page_index} part {self.part_index}"


def estimate_tokens(text: str) -> int:
    """Conservative chars/4 token estimate, rounded up; 0 for empty text."""
    return (len(text) + 3) // 4


def load_template(path: Path | str, rules_path: Path | str | None = None
                  ) -> PromptTemplate:
    """Load a template file; rules come from the companion file or default."""
    p = Path(path)
    try:
        instruction = p.read_bytes().decode("utf-8")
    except OSError as exc:
        raise MalformedTemplate(f"cannot read template {p}: {exc}") from exc
    if rules_path is not None:
        rules = Path(rules_path).read_bytes().decode("utf-8")
    else:
        sibling = p.with_name("priority_rules.txt")
        rules = (sibling.read_bytes().decode("utf-8") if sibling.exists()
                 else _packaged("priority_rules.txt"))
    return PromptTemplate(template_id=p.stem, instruction_text=instruction,
                          rules_text=rules)


def _packaged(name: str) -> str:
    return (resources.files("tablesmith") / "data" / "prompt" / name
            ).read_text(encoding="utf-8")


def default_template() -> PromptTemplate:
    return PromptTemplate(
        template_id="extraction_prompt",
        instruction_text=_packaged("extraction_prompt.txt"),
        rules_text=_packaged("priority_rules.txt"),
    )


def default_template_sources() -> dict[str, str]:
    """Raw text of the packaged template files, for corpus trees to copy."""
    return {
        "prompt_template.txt": _packaged("extraction_prompt.txt"),
        "priority_rules.txt": _packaged("priority_rules.txt"),
    }


def build_prompt(template: PromptTemplate, page: PageText,
                 part_index: int | None = None) -> PromptBundle:
    """Substitute the three placeholders; pure and byte-deterministic.

    {PAGE_TEXT} is replaced last so page content that happens to contain a
    placeholder string stays literal.
    """
    if not page.text.strip():
        raise EmptyPage(f"{page.file_stem} page {page.page_index} is blank")
    text = template.instruction_text
    text = text.replace("{SCHEMA}", schema_text())
    text = text.replace("{RULES}", template.rules_text)
    text = text.replace("{PAGE_TEXT}", page.text)
    return PromptBundle(
        prompt_text=text,
        file_stem=page.file_stem,
        page_index=page.page_index,
        estimated_input_tokens=estimate_tokens(text),
        template_id=template.template_id,
        page_line_count=len(page.text.splitlines()),
        part_index=part_index,
    )


@dataclass(frozen=True)
class BudgetVerdict:
    """Pass/fail with the margin by which a budget is exceeded (0 on pass)."""

    ok: bool
    input_excess: int
    output_excess: int


def assert_budget(bundle: PromptBundle, profile) -> BudgetVerdict:
    """Check a bundle against a provider profile's token windows.

    Input fails when the estimate exceeds the budget minus the overhead
    reserve; output fails when line-count × 20 exceeds the response window,
    signalling the page must be split.
    """
    input_limit = profile.input_token_budget - RESERVED_OVERHEAD_TOKENS
    input_excess = max(0, bundle.estimated_input_tokens - input_limit)
    estimated_output = bundle.page_line_count * OUTPUT_TOKENS_PER_ROW
    output_excess = max(0, estimated_output - profile.output_token_budget)
    return BudgetVerdict(
        ok=(input_excess == 0 and output_excess == 0),
        input_excess=input_excess,
        output_excess=output_excess,
    )


def split_page_text(text: str) -> tuple[str, str]:
    """Split page text at a line boundary into two non-empty halves."""
    lines = text.splitlines(keepends=True)
    if len(lines) < 2:
        raise PageUnsplittable("single line exceeds the provider budget")
    mid = (len(lines) + 1) // 2
    return "".join(lines[:mid]), "".join(lines[mid:])


def plan_page_parts(template: PromptTemplate, page: PageText, profile
                    ) -> list[str]:
    """The page's text, split at line boundaries into budget-fitting parts.

    A page that already fits comes back whole. Halving recurses until every
    part passes assert_budget; all-blank halves are dropped.
    """
    whole = build_prompt(template, page)
    if assert_budget(whole, profile).ok:
        return [page.text]

    parts: list[str] = []

    def fit(text: str) -> None:
        if not text.strip():
            return  # an all-blank half has nothing to extract
        probe = build_prompt(template,
                             PageText.make(page.file_stem, page.page_index, text))
        if assert_budget(probe, profile).ok:
            parts.append(text)
            return
        first, second = split_page_text(text)
        fit(first)
        fit(second)

    fit(page.text)
    return parts


def plan_prompts(template: PromptTemplate, page: PageText, profile
                 ) -> list[PromptBundle]:
    """One bundle per page, or several per page part when budgets force a
    split; parts keep the page index and gain a part index for reports.
    """
    parts = plan_page_parts(template, page, profile)
    if len(parts) == 1:
        return [build_prompt(template, page)]
    return [
        build_prompt(template,
                     PageText.make(page.file_stem, page.page_index, text),
                     part_index=i)
        for i, text in enumerate(parts)
    ]
