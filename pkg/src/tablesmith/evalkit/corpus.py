"""Seeded synthetic corpus generation with the documented fault model.

A corpus is a self-contained fixture tree::

    <out>/
      pages/        <stem>.pageNNN.txt input pages, two layout styles
      fixtures/     <sha256>.resp.txt replay responses, per page (or part)
      golden/       <stem>.csv ground truth + expected_outcomes.csv
      prompt_template.txt, priority_rules.txt, replay.cfg

Clean files get perfect responses. Designated corrected files get per-row
probabilistic faults (at least one warn-level fault is forced so the
bucket holds). Designated manual files alternate between all-empty
responses and >10% corrupted business IDs. Expected outcomes are computed
by running the deterministic parse/refine/classify path on the generated
responses at build time, so the recorded truth is exactly what a replay
run will reproduce.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

from ..config import parse_flat_config
from ..errors import SpecInvalid
from ..extraction import parse_response, render_record_block
from ..ingest import PageText, page_file_name
from ..issues import IssueKind, make_issue
from ..pipeline import Outcome, classify_outcome
from ..prompting import (
    PromptTemplate,
    build_prompt,
    default_template,
    default_template_sources,
    plan_page_parts,
)
from ..provider import CLAUDE3_OPUS_PROFILE, fixture_path, prompt_fingerprint
from ..refinery import ClubRecord, compute_check_digit, refine_rows
from ..sinks import write_records_csv
from .rng import Rng
from .words import make_club_name

_BILINGUAL_SHARE = 0.35
_CORRUPT_ID_SHARE = 0.15
_PREAMBLE_CHANCE = 0.5

_NOISE_ROWS = (
    ("OKM",),
    ("Yhteensä", "", "8123"),
    ("Seuran nimi", "Y-tunnus", "Jäsenmäärä"),
    ("Totalt", "", "999"),
)

_PREAMBLES = (
    "Here are the extracted records:",
    "I located the following clubs on the page.",
    "Extraction finished; structured records follow.",
)

REPLAY_CONFIG = """\
# Replay configuration for this generated corpus.
mode = replay
input_dir = pages
output_dir = out
fixture_dir = fixtures
prompt_template = prompt_template.txt
"""


@dataclass(frozen=True)
class CorpusSpec:
    seed: int = 1
    n_files: int = 1
    rows_per_file: tuple[int, int] = (80, 160)
    page_row_capacity: int = 120
    p_double_name: float = 0.0
    p_noise_row: float = 0.0
    p_missing_field: float = 0.0
    p_hallucinated_count: float = 0.0
    n_manual_files: int = 0
    n_corrected_files: int = 0

    def __post_init__(self) -> None:
        lo, hi = self.rows_per_file
        if self.n_files < 0 or lo < 1 or hi < lo or self.page_row_capacity < 1:
            raise SpecInvalid("file/row/page counts out of range")
        for p in (self.p_double_name, self.p_noise_row,
                  self.p_missing_field, self.p_hallucinated_count):
            if not 0.0 <= p <= 1.0:
                raise SpecInvalid("fault probabilities must lie in [0, 1]")
        if self.n_manual_files < 0 or self.n_corrected_files < 0:
            raise SpecInvalid("bucket counts must be >= 0")
        if self.n_manual_files + self.n_corrected_files > self.n_files:
            raise SpecInvalid("bucket counts exceed n_files")


def load_corpus_spec(path: Path | str) -> CorpusSpec:
    """Corpus spec files use the same flat key = value syntax as run configs;
    rows_per_file is a range like ``80-160`` (or a single number)."""
    p = Path(path)
    values = parse_flat_config(p.read_bytes().decode("utf-8"), source=str(p))
    known = {
        "seed", "n_files", "rows_per_file", "page_row_capacity",
        "p_double_name", "p_noise_row", "p_missing_field",
        "p_hallucinated_count", "n_manual_files", "n_corrected_files",
    }
    unknown = sorted(set(values) - known)
    if unknown:
        raise SpecInvalid(f"{p}: unknown corpus keys {unknown}")
    kwargs: dict = {}
    for key in ("seed", "n_files", "page_row_capacity",
                "n_manual_files", "n_corrected_files"):
        if key in values:
            kwargs[key] = int(values[key])
    for key in ("p_double_name", "p_noise_row", "p_missing_field",
                "p_hallucinated_count"):
        if key in values:
            kwargs[key] = float(values[key])
    if "rows_per_file" in values:
        raw = values["rows_per_file"].replace("–", "-")
        lo, sep, hi = raw.partition("-")
        kwargs["rows_per_file"] = (int(lo), int(hi) if sep else int(lo))
    return CorpusSpec(**kwargs)


@dataclass(frozen=True)
class GoldenRow:
    name: str
    alt: str | None
    business_id: str
    count: int

    def cells(self) -> list[str]:
        return [self.name, self.alt or "", self.business_id, str(self.count)]

    def display_name(self) -> str:
        return f"{self.name} - {self.alt}" if self.alt else self.name


@dataclass
class CorpusSummary:
    out_dir: Path
    expected_outcomes: dict[str, str]
    golden_rows: int
    fixture_count: int
    buckets: dict[str, str] = field(default_factory=dict)


def _make_business_id(rng: Rng) -> str:
    while True:
        base = f"{rng.below(10_000_000):07d}"
        check = compute_check_digit(base)
        if check is not None:
            return f"{base}-{check}"


def _make_rows(rng: Rng, n_rows: int) -> list[GoldenRow]:
    rows: list[GoldenRow] = []
    used_keys: set[str] = set()
    for _ in range(n_rows):
        for _attempt in range(64):
            name, alt = make_club_name(rng, bilingual=rng.chance(_BILINGUAL_SHARE))
            if name.casefold() not in used_keys:
                break
        else:
            name = f"{name} {len(used_keys)}"  # exhausted: disambiguate
        used_keys.add(name.casefold())
        rows.append(GoldenRow(
            name=name,
            alt=alt,
            business_id=_make_business_id(rng),
            count=rng.randint(10, 4999),
        ))
    return rows


def _render_table_page(stem: str, page_no: int, rows: list[GoldenRow],
                       is_last: bool, total: int) -> str:
    lines = [
        f"OKM jäsenseuraraportti: {stem}",
        f"Sivu {page_no + 1}",
        "Seuran nimi\tY-tunnus\tJäsenmäärä",
    ]
    for row in rows:
        lines.append(f"{row.display_name()}\t{row.business_id}\t{row.count}")
    if is_last:
        lines.append(f"Yhteensä\t\t{total}")
    return "\n".join(lines) + "\n"


def _render_list_page(stem: str, page_no: int, rows: list[GoldenRow],
                      is_last: bool, total: int) -> str:
    lines = [
        f"Jäsenseurat: {stem} (sivu {page_no + 1})",
        "",
    ]
    for i, row in enumerate(rows, start=1):
        lines.append(f"{i}. {row.display_name()}. "
                     f"Y-tunnus {row.business_id}. Jäseniä {row.count}.")
    if is_last:
        lines.append("")
        lines.append(f"Yhteensä {total} jäsentä.")
    return "\n".join(lines) + "\n"


def inject_faults(clean_response: str, spec: CorpusSpec, rng: Rng) -> str:
    """Apply the per-row fault model to a clean record block.

    Faults, each drawn per row against its probability: merge name and
    alternate name into one cell ("double name"), blank the business ID or
    member count ("missing information"), replace the count with a different
    number (hallucination, detectable only against golden truth), insert a
    noise row. A chatty preamble may be prepended; the sentinel keeps it
    harmless downstream.
    """
    rows, _ = parse_response(clean_response, 0)
    out_rows: list[list[str]] = []
    for raw in rows:
        cells = list(raw.cells)
        if len(cells) == 4:
            if cells[1] and rng.chance(spec.p_double_name):
                cells = [f"{cells[0]} - {cells[1]}", cells[2], cells[3]]
            if rng.chance(spec.p_missing_field):
                slot = 2 if rng.chance(0.5) else 3  # business_id or count
                idx = slot if len(cells) == 4 else slot - 1
                cells[idx] = ""
            last = cells[-1]
            if last.isdigit() and rng.chance(spec.p_hallucinated_count):
                cells[-1] = str(int(last) + 1 + rng.below(900))
        out_rows.append(cells)
        if rng.chance(spec.p_noise_row):
            out_rows.append(list(rng.choice(_NOISE_ROWS)))
    body = render_record_block(out_rows)
    if _any_fault_possible(spec) and rng.chance(_PREAMBLE_CHANCE):
        body = rng.choice(_PREAMBLES) + "\n\n" + body
    return body


def _any_fault_possible(spec: CorpusSpec) -> bool:
    return any(p > 0 for p in (spec.p_double_name, spec.p_noise_row,
                               spec.p_missing_field, spec.p_hallucinated_count))


def _corrupt_ids(clean_response: str, rng: Rng) -> str:
    """Give >10% of rows a wrong check digit (the corrupted-manual variant)."""
    rows, _ = parse_response(clean_response, 0)
    k = max(1, math.ceil(_CORRUPT_ID_SHARE * len(rows)))
    victims = list(range(len(rows)))
    rng.shuffle(victims)
    chosen = set(victims[:k])
    out_rows = []
    for i, raw in enumerate(rows):
        cells = list(raw.cells)
        if i in chosen and len(cells) == 4 and cells[2]:
            base, _, check = cells[2].partition("-")
            wrong = (int(check) + 1 + rng.below(9)) % 10
            cells[2] = f"{base}-{wrong}"
        out_rows.append(cells)
    return render_record_block(out_rows)


def _blank_first_count(response: str) -> str:
    """Forced warn-level fault for corrected files that came out clean."""
    rows, _ = parse_response(response, 0)
    out_rows = []
    forced = False
    for raw in rows:
        cells = list(raw.cells)
        if not forced and len(cells) == 4 and cells[3]:
            cells[3] = ""
            forced = True
        out_rows.append(cells)
    return render_record_block(out_rows)


def _simulate_outcome(stem: str, page_payloads: list[tuple[int, list[str]]]
                      ) -> Outcome:
    """Run the deterministic parse/refine/classify path on generated
    responses, mirroring what process_file does in replay mode."""
    issues = []
    emitted = 0
    for page_index, responses in page_payloads:
        page_rows = []
        for response in responses:
            rows, parse_issues = parse_response(response, page_index, stem)
            issues.extend(parse_issues)
            page_rows.extend(rows)
        if not page_rows and not any(
                i.kind is IssueKind.EMPTY_RESPONSE
                and i.source_page == page_index for i in issues):
            issues.append(make_issue(
                IssueKind.EMPTY_RESPONSE, stem, page_index,
                "non-empty page produced no rows"))
        records, refine_issues = refine_rows(page_rows, stem)
        issues.extend(refine_issues)
        emitted += len(records)
    return classify_outcome(issues, emitted)


def generate_corpus(spec: CorpusSpec, out_dir: Path | str,
                    template: PromptTemplate | None = None) -> CorpusSummary:
    """Write a complete fixture tree; byte-identical for a given spec."""
    out = Path(out_dir)
    pages_dir = out / "pages"
    fixtures_dir = out / "fixtures"
    golden_dir = out / "golden"
    for d in (pages_dir, fixtures_dir, golden_dir):
        d.mkdir(parents=True, exist_ok=True)

    for name, text in default_template_sources().items():
        (out / name).write_text(text, encoding="utf-8")
    (out / "replay.cfg").write_text(REPLAY_CONFIG, encoding="utf-8")
    template = template or default_template()
    profile = CLAUDE3_OPUS_PROFILE

    rng = Rng(spec.seed)
    stems = [f"union{i:03d}" for i in range(spec.n_files)]
    shuffled = list(stems)
    rng.shuffle(shuffled)
    manual_stems = shuffled[:spec.n_manual_files]
    corrected_stems = set(
        shuffled[spec.n_manual_files:spec.n_manual_files + spec.n_corrected_files])
    manual_variant = {stem: ("empty" if i % 2 == 0 else "corrupt")
                      for i, stem in enumerate(manual_stems)}

    expected: dict[str, str] = {}
    buckets: dict[str, str] = {}
    golden_rows = 0
    fixture_count = 0

    for stem in stems:
        n_rows = rng.randint(*spec.rows_per_file)
        layout = "table" if rng.chance(0.5) else "list"
        rows = _make_rows(rng, n_rows)
        golden_rows += len(rows)
        total = sum(r.count for r in rows)

        page_chunks = [rows[i:i + spec.page_row_capacity]
                       for i in range(0, len(rows), spec.page_row_capacity)]
        render = _render_table_page if layout == "table" else _render_list_page

        golden_records: list[ClubRecord] = []
        page_payloads: list[tuple[int, list[str]]] = []
        fixture_files: list[tuple[Path, str]] = []

        for page_index, chunk in enumerate(page_chunks):
            is_last = page_index == len(page_chunks) - 1
            page_text = render(stem, page_index, chunk, is_last, total)
            (pages_dir / page_file_name(stem, page_index)).write_text(
                page_text, encoding="utf-8", newline="")

            for row in chunk:
                golden_records.append(ClubRecord(
                    club_name=row.name,
                    alt_name=row.alt,
                    business_id=row.business_id,
                    member_count=row.count,
                    source_file=stem,
                    source_page=page_index,
                ))

            page = PageText.make(stem, page_index, page_text)
            parts = plan_page_parts(template, page, profile)
            part_rows = _rows_by_part(page_text, parts, chunk, layout)
            responses: list[str] = []
            for part_text, rows_in_part in zip(parts, part_rows):
                clean = render_record_block([r.cells() for r in rows_in_part])
                if stem in manual_variant:
                    if manual_variant[stem] == "empty":
                        response = ""
                    else:
                        response = _corrupt_ids(clean, rng)
                elif stem in corrected_stems:
                    response = inject_faults(clean, spec, rng)
                else:
                    response = clean
                responses.append(response)
                part_page = page if len(parts) == 1 else PageText.make(
                    stem, page_index, part_text)
                bundle = build_prompt(template, part_page)
                fixture_files.append(
                    (fixture_path(fixtures_dir,
                                  prompt_fingerprint(bundle.prompt_text)),
                     response))
            page_payloads.append((page_index, responses))

        if stem in corrected_stems:
            outcome = _simulate_outcome(stem, page_payloads)
            if outcome is Outcome.CLEAN:
                # Probabilistic faults all missed: force one warn-level fault
                # so the designated bucket holds.
                index0, responses0 = page_payloads[0]
                responses0[0] = _blank_first_count(responses0[0])
                path0, _ = fixture_files[0]
                fixture_files[0] = (path0, responses0[0])

        for path, response in fixture_files:
            path.write_text(response, encoding="utf-8", newline="")
            fixture_count += 1

        write_records_csv(golden_records, golden_dir / f"{stem}.csv")
        outcome = _simulate_outcome(stem, page_payloads)
        expected[stem] = outcome.value
        if stem in manual_variant:
            buckets[stem] = "manual"
        elif stem in corrected_stems:
            buckets[stem] = "corrected"
        else:
            buckets[stem] = "clean"

    _check_buckets(spec, expected)
    _write_expected_outcomes(expected, golden_dir / "expected_outcomes.csv")
    return CorpusSummary(
        out_dir=out,
        expected_outcomes=expected,
        golden_rows=golden_rows,
        fixture_count=fixture_count,
        buckets=buckets,
    )


def _rows_by_part(page_text: str, parts: list[str], chunk: list[GoldenRow],
                  layout: str) -> list[list[GoldenRow]]:
    """Assign each golden row to the page part containing its rendered line."""
    if len(parts) == 1:
        return [list(chunk)]
    # Rendered pages put one row per line, so line membership decides.
    line_of_row: dict[int, int] = {}
    for line_index, line in enumerate(page_text.splitlines()):
        for row_index, row in enumerate(chunk):
            if row_index not in line_of_row and row.business_id in line:
                line_of_row[row_index] = line_index
                break
    out: list[list[GoldenRow]] = []
    start = 0
    for part in parts:
        n_lines = len(part.splitlines())
        end = start + n_lines
        out.append([row for i, row in enumerate(chunk)
                    if start <= line_of_row.get(i, -1) < end])
        start = end
    return out


def _check_buckets(spec: CorpusSpec, expected: dict[str, str]) -> None:
    manual = sum(1 for o in expected.values()
                 if o == Outcome.MANUAL.value)
    corrected = sum(1 for o in expected.values()
                    if o == Outcome.CORRECTED.value)
    if manual != spec.n_manual_files or corrected != spec.n_corrected_files:
        raise SpecInvalid(
            f"generated buckets drifted: wanted {spec.n_manual_files} manual "
            f"/ {spec.n_corrected_files} corrected, got {manual} / {corrected}")


def _write_expected_outcomes(expected: dict[str, str], path: Path) -> None:
    lines = ["file_stem,outcome"]
    for stem in sorted(expected):
        lines.append(f"{stem},{expected[stem]}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
