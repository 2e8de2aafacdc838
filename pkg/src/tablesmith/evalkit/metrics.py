"""Golden-table comparison: accuracy, completeness, mismatch audit trail.

Records match on the normalized club name (case-folded, whitespace
collapsed) — the only field that is always present. Each golden record
contributes four data points (name, alternate name, business ID, member
count); accuracy is the matched fraction of those points. Completeness is
the fraction of golden records whose produced match carries all required
fields. Robustness is a run-level statistic (fraction of files not needing
manual work) and is aggregated by the caller, not here.

A hallucinated club name breaks the match key by design: it shows up as an
unmatched golden record plus an unmatched produced record in the mismatch
list, the way a human auditor would find it.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import DuplicateGoldenKey
from ..refinery import ClubRecord

GOLDEN_POINTS_PER_RECORD = 4


@dataclass(frozen=True)
class Metrics:
    accuracy: float
    completeness: float
    robustness: float
    matched_points: int
    golden_points: int

    def __post_init__(self) -> None:
        for value in (self.accuracy, self.completeness, self.robustness):
            if not 0.0 <= value <= 1.0:
                raise ValueError("metrics must lie in [0, 1]")


@dataclass(frozen=True)
class FieldMismatch:
    name_key: str
    field: str          # one of the four fields, or "record" for a whole miss
    golden: str | None
    produced: str | None


def normalize_name_key(name: str) -> str:
    return " ".join(name.casefold().split())


def _norm_alt(alt: str | None) -> str:
    return " ".join((alt or "").casefold().split())


def _norm_id(business_id: str | None) -> str:
    return (business_id or "").strip()


def compare_tables(golden: list[ClubRecord], produced: list[ClubRecord]
                   ) -> tuple[Metrics, list[FieldMismatch]]:
    """Score one file's produced records against its golden truth."""
    golden_by_key: dict[str, ClubRecord] = {}
    for rec in golden:
        key = normalize_name_key(rec.club_name)
        if key in golden_by_key:
            raise DuplicateGoldenKey(f"golden key {key!r} appears twice")
        golden_by_key[key] = rec

    produced_by_key: dict[str, ClubRecord] = {}
    extra_produced: list[ClubRecord] = []
    for rec in produced:
        key = normalize_name_key(rec.club_name)
        if key in produced_by_key:
            extra_produced.append(rec)
        else:
            produced_by_key[key] = rec

    matched_points = 0
    complete_records = 0
    mismatches: list[FieldMismatch] = []

    for key, g in golden_by_key.items():
        p = produced_by_key.get(key)
        if p is None:
            mismatches.append(FieldMismatch(key, "record", g.club_name, None))
            continue
        matched_points += 1  # the name point, equal by construction
        if _norm_alt(g.alt_name) == _norm_alt(p.alt_name):
            matched_points += 1
        else:
            mismatches.append(FieldMismatch(key, "alt_name",
                                            g.alt_name, p.alt_name))
        if _norm_id(g.business_id) == _norm_id(p.business_id):
            matched_points += 1
        else:
            mismatches.append(FieldMismatch(key, "business_id",
                                            g.business_id, p.business_id))
        if g.member_count == p.member_count:
            matched_points += 1
        else:
            mismatches.append(FieldMismatch(
                key, "member_count",
                None if g.member_count is None else str(g.member_count),
                None if p.member_count is None else str(p.member_count)))
        if p.business_id is not None and p.member_count is not None:
            complete_records += 1

    for key, p in produced_by_key.items():
        if key not in golden_by_key:
            mismatches.append(FieldMismatch(key, "record", None, p.club_name))
    for p in extra_produced:
        mismatches.append(FieldMismatch(normalize_name_key(p.club_name),
                                        "record", None, p.club_name))

    golden_points = GOLDEN_POINTS_PER_RECORD * len(golden_by_key)
    metrics = Metrics(
        accuracy=(matched_points / golden_points) if golden_points else 1.0,
        completeness=(complete_records / len(golden_by_key))
        if golden_by_key else 1.0,
        robustness=1.0,  # run-level; aggregated by the caller
        matched_points=matched_points,
        golden_points=golden_points,
    )
    return metrics, mismatches
