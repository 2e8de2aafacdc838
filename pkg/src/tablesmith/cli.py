"""Command-line entry points: extract, evaluate, gen-corpus."""

from __future__ import annotations

import csv
import dataclasses
import json
import sys
from pathlib import Path

import click

from . import figures
from .config import load_config
from .errors import TablesmithError
from .evalkit import compare_tables, generate_corpus, load_corpus_spec
from .pipeline import Outcome, run_batch
from .sinks import read_records_csv


@click.group()
def main() -> None:
    """Structured club tables out of membership-report page text."""


@main.command()
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--input-dir", type=click.Path(file_okay=False), default=None,
              help="Override the configured input directory.")
@click.option("--out-dir", type=click.Path(file_okay=False), default=None,
              help="Override the configured output directory.")
@click.option("--mode", type=click.Choice(["live", "replay", "record"]),
              default=None, help="Override the configured provider mode.")
def extract(config_path: str, input_dir: str | None, out_dir: str | None,
            mode: str | None) -> None:
    """Run the batch pipeline and write CSVs, workbook, report and figure.

    Exits 2 when any file requires manual work (everything is still
    written), 0 otherwise.
    """
    overrides: dict[str, str] = {}
    if input_dir:
        overrides["input_dir"] = str(Path(input_dir).resolve())
    if out_dir:
        overrides["output_dir"] = str(Path(out_dir).resolve())
    if mode:
        overrides["mode"] = mode
    try:
        cfg = load_config(config_path, overrides)
        report = run_batch(cfg)
    except TablesmithError as exc:
        raise click.ClickException(str(exc)) from exc

    for fr in report.file_reports:
        click.echo(f"{fr.file_stem}: {fr.outcome.value} "
                   f"({fr.rows_emitted} rows, {len(fr.issues)} issues)")
    t = report.totals
    click.echo(f"files={t['files']} clean={t['clean']} "
               f"corrected={t['corrected']} manual={t['manual']} "
               f"rows={t['rows']}")
    click.echo(f"outputs in {cfg.output_dir}")
    if t["manual"] > 0:
        sys.exit(2)


@main.command()
@click.option("--golden", "golden_dir", required=True,
              type=click.Path(exists=True, file_okay=False))
@click.option("--produced", "produced_dir", required=True,
              type=click.Path(exists=True, file_okay=False))
@click.option("--report", "report_path", required=True,
              type=click.Path(dir_okay=False))
def evaluate(golden_dir: str, produced_dir: str, report_path: str) -> None:
    """Score produced tables against golden truth; write report, metrics
    CSV, mismatch CSV and summary figure."""
    golden_root = Path(golden_dir)
    produced_root = Path(produced_dir)
    csv_root = produced_root / "csv"
    if not csv_root.is_dir():
        csv_root = produced_root

    outcomes = _load_outcomes(produced_root / "run_report.json")
    expected = _load_expected(golden_root / "expected_outcomes.csv")

    golden_files = sorted(p for p in golden_root.glob("*.csv")
                          if p.name != "expected_outcomes.csv")
    if not golden_files:
        raise click.ClickException(f"no golden CSVs in {golden_root}")

    file_docs = []
    mismatch_rows = []
    total_matched = total_points = 0
    completeness_sum = 0.0
    for golden_path in golden_files:
        stem = golden_path.stem
        golden = read_records_csv(golden_path)
        produced_path = csv_root / golden_path.name
        produced = (read_records_csv(produced_path)
                    if produced_path.exists() else [])
        try:
            metrics, mismatches = compare_tables(golden, produced)
        except TablesmithError as exc:
            raise click.ClickException(f"{stem}: {exc}") from exc
        total_matched += metrics.matched_points
        total_points += metrics.golden_points
        completeness_sum += metrics.completeness
        file_docs.append({
            "file_stem": stem,
            "accuracy": metrics.accuracy,
            "completeness": metrics.completeness,
            "matched_points": metrics.matched_points,
            "golden_points": metrics.golden_points,
            "outcome": outcomes.get(stem),
            "expected_outcome": expected.get(stem),
            "mismatch_count": len(mismatches),
        })
        for m in mismatches:
            mismatch_rows.append(
                (stem, m.name_key, m.field, m.golden or "", m.produced or ""))

    n_files = len(file_docs)
    robustness = None
    if outcomes:
        not_manual = sum(1 for d in file_docs
                         if d["outcome"] not in (None, Outcome.MANUAL.value))
        robustness = not_manual / n_files if n_files else 1.0
    outcome_mismatches = [
        d["file_stem"] for d in file_docs
        if d["expected_outcome"] is not None and d["outcome"] is not None
        and d["expected_outcome"] != d["outcome"]]

    aggregate = {
        "files": n_files,
        "accuracy": (total_matched / total_points) if total_points else 1.0,
        "completeness": (completeness_sum / n_files) if n_files else 1.0,
        "robustness": robustness,
        "matched_points": total_matched,
        "golden_points": total_points,
        "outcome_mismatches": outcome_mismatches,
    }
    doc = {"aggregate": aggregate, "files": file_docs}

    report_file = Path(report_path)
    report_file.parent.mkdir(parents=True, exist_ok=True)
    report_file.write_text(json.dumps(doc, ensure_ascii=False, indent=2) + "\n",
                           encoding="utf-8")
    _write_metrics_csv(file_docs, report_file.with_name("metrics.csv"))
    _write_mismatches_csv(mismatch_rows,
                          report_file.with_name("mismatches.csv"))
    figures.render_evaluation_summary(
        [(d["file_stem"], d["accuracy"], d["completeness"]) for d in file_docs],
        robustness,
        report_file.with_name("evaluation_summary.png"),
    )

    click.echo(f"files={n_files} accuracy={aggregate['accuracy']:.4f} "
               f"completeness={aggregate['completeness']:.4f} "
               f"robustness="
               + ("n/a" if robustness is None else f"{robustness:.4f}"))
    if outcome_mismatches:
        click.echo(f"outcome mismatches: {outcome_mismatches}")
    click.echo(f"report written to {report_file}")


def _load_outcomes(report_path: Path) -> dict[str, str]:
    if not report_path.exists():
        return {}
    doc = json.loads(report_path.read_text(encoding="utf-8"))
    return {fr["file_stem"]: fr["outcome"] for fr in doc.get("file_reports", [])}


def _load_expected(path: Path) -> dict[str, str]:
    if not path.exists():
        return {}
    out = {}
    with path.open(encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            out[row["file_stem"]] = row["outcome"]
    return out


def _write_metrics_csv(file_docs: list[dict], path: Path) -> None:
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("file_stem", "accuracy", "completeness",
                         "matched_points", "golden_points", "outcome",
                         "expected_outcome"))
        for d in file_docs:
            writer.writerow((
                d["file_stem"], f"{d['accuracy']:.6f}",
                f"{d['completeness']:.6f}", d["matched_points"],
                d["golden_points"], d["outcome"] or "",
                d["expected_outcome"] or ""))


def _write_mismatches_csv(rows: list[tuple], path: Path) -> None:
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("file_stem", "name_key", "field", "golden", "produced"))
        writer.writerows(rows)


@main.command(name="gen-corpus")
@click.option("--spec", "spec_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_dir", required=True,
              type=click.Path(file_okay=False))
@click.option("--seed", type=int, default=None,
              help="Override the seed from the spec file.")
def gen_corpus(spec_path: str, out_dir: str, seed: int | None) -> None:
    """Generate a synthetic fixture tree (pages, replay responses, golden
    CSVs, expected outcomes) from a corpus spec file."""
    try:
        spec = load_corpus_spec(spec_path)
        if seed is not None:
            spec = dataclasses.replace(spec, seed=seed)
        summary = generate_corpus(spec, out_dir)
    except TablesmithError as exc:
        raise click.ClickException(str(exc)) from exc
    buckets = summary.buckets
    click.echo(f"generated {len(summary.expected_outcomes)} files, "
               f"{summary.golden_rows} golden rows, "
               f"{summary.fixture_count} fixtures in {summary.out_dir}")
    click.echo(f"buckets: clean={sum(1 for b in buckets.values() if b == 'clean')} "
               f"corrected={sum(1 for b in buckets.values() if b == 'corrected')} "
               f"manual={sum(1 for b in buckets.values() if b == 'manual')}")
    click.echo(f"run: tablesmith extract --config {summary.out_dir}/replay.cfg")


if __name__ == "__main__":
    main()
