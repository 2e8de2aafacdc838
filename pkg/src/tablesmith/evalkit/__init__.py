"""Evaluation kit: golden-table metrics and seeded synthetic corpora."""

from .corpus import (
    CorpusSpec,
    CorpusSummary,
    generate_corpus,
    inject_faults,
    load_corpus_spec,
)
from .metrics import FieldMismatch, Metrics, compare_tables, normalize_name_key
from .pdfgen import render_fixture_pdf
from .rng import Rng

__all__ = [
    "CorpusSpec",
    "CorpusSummary",
    "FieldMismatch",
    "Metrics",
    "Rng",
    "compare_tables",
    "generate_corpus",
    "inject_faults",
    "load_corpus_spec",
    "normalize_name_key",
    "render_fixture_pdf",
]
