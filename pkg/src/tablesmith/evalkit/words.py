"""Synthetic club-name building from the shipped bilingual word lists."""

from __future__ import annotations

from functools import lru_cache
from importlib import resources

from .rng import Rng

FI_SUFFIXES = ("ry", "ry", "ry", "r.y.", "ry.")
SV_SUFFIXES = ("rf", "rf", "r.f.", "rf.")


@lru_cache(maxsize=None)
def word_pairs(name: str) -> tuple[tuple[str, str], ...]:
    text = (resources.files("tablesmith") / "data" / "wordlists" / name
            ).read_text(encoding="utf-8")
    pairs = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        fi, _, sv = line.partition("|")
        pairs.append((fi.strip(), sv.strip()))
    return tuple(pairs)


def make_club_name(rng: Rng, bilingual: bool) -> tuple[str, str | None]:
    """A Finnish club name, optionally with its Swedish counterpart."""
    place_fi, place_sv = rng.choice(word_pairs("places.txt"))
    act_fi, act_sv = rng.choice(word_pairs("activities.txt"))
    fi = f"{place_fi} {act_fi} {rng.choice(FI_SUFFIXES)}"
    if not bilingual:
        return fi, None
    sv = f"{place_sv} {act_sv} {rng.choice(SV_SUFFIXES)}"
    return fi, sv
