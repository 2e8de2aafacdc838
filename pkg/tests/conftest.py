from __future__ import annotations

import dataclasses
from pathlib import Path

import pytest

from tablesmith.config import RunConfig, load_config
from tablesmith.evalkit import CorpusSpec, generate_corpus
from tablesmith.extraction import parse_row
from tablesmith.pipeline import run_batch


class FakeClock:
    """Monotonic clock whose sleep() advances time instead of waiting."""

    def __init__(self, start: float = 1000.0):
        self.now = start
        self.sleeps: list[float] = []

    def monotonic(self) -> float:
        return self.now

    def sleep(self, seconds: float) -> None:
        self.sleeps.append(seconds)
        self.now += seconds


@pytest.fixture()
def fake_clock() -> FakeClock:
    return FakeClock()


def row(line: str, page: int = 0, line_no: int = 1):
    return parse_row(line, page, line_no)


def write_pages(directory: Path, stem: str, pages: list[str]) -> None:
    directory.mkdir(parents=True, exist_ok=True)
    for i, text in enumerate(pages):
        (directory / f"{stem}.page{i:03d}.txt").write_text(
            text, encoding="utf-8", newline="")


def make_corpus(out_dir: Path, **overrides) -> tuple:
    """Generate a corpus and return (spec, summary)."""
    params = dict(seed=7, n_files=4, rows_per_file=(12, 20),
                  page_row_capacity=10)
    params.update(overrides)
    spec = CorpusSpec(**params)
    summary = generate_corpus(spec, out_dir)
    return spec, summary


def replay_config(corpus_dir: Path, **overrides) -> RunConfig:
    cfg = load_config(corpus_dir / "replay.cfg", {
        k: str(v) for k, v in overrides.items()})
    return cfg


def run_replay(corpus_dir: Path, **overrides):
    cfg = replay_config(corpus_dir, **overrides)
    return cfg, run_batch(cfg, now=lambda: "2024-01-01T00:00:00Z")


@pytest.fixture(scope="session")
def paper_corpus(tmp_path_factory) -> tuple:
    """The paper-scale corpus used by several acceptance criteria."""
    out = tmp_path_factory.mktemp("paper_corpus")
    spec = CorpusSpec(
        seed=20240515,
        n_files=72,
        rows_per_file=(80, 160),
        page_row_capacity=120,
        p_double_name=0.25,
        p_noise_row=0.10,
        p_missing_field=0.12,
        p_hallucinated_count=0.03,
        n_manual_files=2,
        n_corrected_files=5,
    )
    summary = generate_corpus(spec, out)
    return spec, summary, out


def zero_fault_variant(spec: CorpusSpec) -> CorpusSpec:
    return dataclasses.replace(
        spec, p_double_name=0.0, p_noise_row=0.0, p_missing_field=0.0,
        p_hallucinated_count=0.0, n_manual_files=0, n_corrected_files=0)
