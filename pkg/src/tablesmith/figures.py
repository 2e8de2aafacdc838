"""Report figures rendered next to the delimited outputs.

Every report path writes a PNG summary beside its CSV/JSON: the extract
run report gets outcome and issue breakdowns, the evaluation report gets
per-file accuracy/completeness. Figures are presentation only and take no
part in determinism digests.
"""

from __future__ import annotations

from collections import Counter
from pathlib import Path
from typing import TYPE_CHECKING, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

if TYPE_CHECKING:
    from .pipeline import RunReport

_OUTCOME_COLORS = {
    "Clean": "#4c9f70",
    "CorrectedAutomatically": "#e3b23c",
    "ManualRequired": "#c84648",
}


def render_run_summary(report: "RunReport", path: Path | str) -> Path:
    """Outcome buckets and the most frequent issue kinds, one panel each."""
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)

    fig, (ax_outcomes, ax_issues) = plt.subplots(1, 2, figsize=(11, 4.2))

    labels = ["Clean", "CorrectedAutomatically", "ManualRequired"]
    counts = [report.totals["clean"], report.totals["corrected"],
              report.totals["manual"]]
    bars = ax_outcomes.bar(range(len(labels)), counts,
                           color=[_OUTCOME_COLORS[l] for l in labels])
    ax_outcomes.set_xticks(range(len(labels)))
    ax_outcomes.set_xticklabels(["clean", "corrected", "manual"])
    ax_outcomes.set_ylabel("files")
    ax_outcomes.set_title(
        f"{report.totals['files']} files, {report.totals['rows']} rows")
    ax_outcomes.bar_label(bars)
    ax_outcomes.margins(y=0.15)

    kind_counts = Counter(i.kind.value for r in report.file_reports
                          for i in r.issues)
    top = kind_counts.most_common(8)
    if top:
        names = [k for k, _ in reversed(top)]
        values = [v for _, v in reversed(top)]
        bars = ax_issues.barh(range(len(names)), values, color="#6b7fb3")
        ax_issues.set_yticks(range(len(names)))
        ax_issues.set_yticklabels(names, fontsize=8)
        ax_issues.bar_label(bars, fontsize=8)
        ax_issues.margins(x=0.15)
    else:
        ax_issues.text(0.5, 0.5, "no issues", ha="center", va="center",
                       transform=ax_issues.transAxes)
        ax_issues.set_yticks([])
    ax_issues.set_xlabel("issues")
    ax_issues.set_title("issue kinds")

    fig.tight_layout()
    fig.savefig(out, dpi=120)
    plt.close(fig)
    return out


def render_evaluation_summary(per_file: Sequence[tuple[str, float, float]],
                              robustness: float | None,
                              path: Path | str) -> Path:
    """Per-file accuracy/completeness bars with the run-level robustness."""
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)

    stems = [s for s, _, _ in per_file]
    accuracy = [a for _, a, _ in per_file]
    completeness = [c for _, _, c in per_file]

    width = max(7.0, 0.22 * len(stems) + 3.0)
    fig, ax = plt.subplots(figsize=(width, 4.2))
    xs = range(len(stems))
    ax.bar([x - 0.2 for x in xs], accuracy, width=0.4, label="accuracy",
           color="#4c72b0")
    ax.bar([x + 0.2 for x in xs], completeness, width=0.4,
           label="completeness", color="#dd8452")
    ax.set_ylim(0, 1.05)
    ax.set_ylabel("fraction")
    shown = "n/a" if robustness is None else f"{robustness:.3f}"
    ax.set_title(f"robustness (files not requiring manual work): {shown}")
    if len(stems) <= 30:
        ax.set_xticks(list(xs))
        ax.set_xticklabels(stems, rotation=90, fontsize=7)
    else:
        ax.set_xticks([])
        ax.set_xlabel(f"{len(stems)} files")
    ax.axhline(1.0, color="grey", linewidth=0.7, linestyle=":")
    ax.legend(loc="lower left")

    fig.tight_layout()
    fig.savefig(out, dpi=120)
    plt.close(fig)
    return out
