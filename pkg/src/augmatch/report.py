"""Figure rendering for sweep and calibration outputs.

Kept apart from the harness on purpose: the harness emits delimited text
only, and the command-line report path draws from those aggregates.  All
figures are written straight to files; nothing is ever shown interactively.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .calibration import CalibrationReport
from .harness import ExperimentResult

_FIGSIZE = (6.4, 4.0)

_BRANCH_COLORS = {
    "MimicRest": "#2a7fb8",
    "BaselineRest": "#d95f02",
    "BaselineWhole": "#7570b3",
}


def render_ratio_figure(result: ExperimentResult, path: "str | Path") -> Path:
    """Mean competitive ratio along the error grid, against the guarantee."""
    path = Path(path)
    xs = [cell.summary.l1_achieved for cell in result.cells]
    means = [cell.summary.mean_ratio for cell in result.cells]
    errs = [cell.summary.std_err or 0.0 for cell in result.cells]
    bounds = [cell.summary.bound for cell in result.cells]
    base = [cell.summary.mean_baseline_ratio for cell in result.cells]

    fig, ax = plt.subplots(figsize=_FIGSIZE)
    ax.errorbar(
        xs, means, yerr=errs, marker="o", ms=4, lw=1.2, capsize=2,
        label="measured mean ratio", color="#2a7fb8",
    )
    ax.plot(
        xs, bounds, ls="--", lw=1.2, color="#555555",
        label="guarantee 1 - 2L1/(2a + L1)",
    )
    if all(b is not None for b in base):
        ax.plot(
            xs, base, ls=":", lw=1.2, color="#d95f02",
            label="baseline alone",
        )
    ax.set_xlabel("advice error (L1 distance)")
    ax.set_ylabel("competitive ratio")
    ax.set_ylim(0.0, 1.05)
    ax.grid(alpha=0.3)
    ax.legend(loc="lower left", fontsize=8)
    ax.set_title(
        f"{result.spec.family}, n={result.spec.n}, "
        f"{result.spec.trials} trials per point"
    )
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_branch_figure(result: ExperimentResult, path: "str | Path") -> Path:
    """Stacked branch frequencies per grid cell."""
    path = Path(path)
    xs = [cell.summary.l1_achieved for cell in result.cells]
    width = (
        0.8 * (max(xs) - min(xs)) / max(1, len(xs) - 1) if len(xs) > 1 else 0.05
    )
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    bottom = [0.0] * len(xs)
    for branch, color in _BRANCH_COLORS.items():
        heights = [cell.summary.freq(branch) for cell in result.cells]
        ax.bar(
            xs, heights, width=width, bottom=bottom, label=branch, color=color
        )
        bottom = [b + h for b, h in zip(bottom, heights)]
    ax.set_xlabel("advice error (L1 distance)")
    ax.set_ylabel("branch frequency")
    ax.set_ylim(0.0, 1.05)
    ax.legend(loc="center right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_sweep_figures(
    result: ExperimentResult, out_dir: "str | Path", stem: str = "summary"
) -> list[Path]:
    out = Path(out_dir)
    return [
        render_ratio_figure(result, out / f"{stem}_ratio.png"),
        render_branch_figure(result, out / f"{stem}_branches.png"),
    ]


def render_calibration_figure(
    report: CalibrationReport, path: "str | Path"
) -> Path:
    """Per-pair success frequency across the candidate constants."""
    path = Path(path)
    cs = [row.c_sample for row in report.rows]
    names: Sequence[str] = (
        list(report.rows[0].success) if report.rows else []
    )
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    for name in names:
        ax.plot(
            cs,
            [row.success[name] for row in report.rows],
            marker="o", ms=4, lw=1.2, label=name,
        )
    ax.axhline(
        1.0 - report.delta_prime, ls="--", lw=1.0, color="#555555",
        label="required frequency",
    )
    if report.selected is not None:
        ax.axvline(report.selected, ls=":", lw=1.0, color="#2a7fb8")
    ax.set_xscale("log", base=2)
    ax.set_xlabel("sample-size constant")
    ax.set_ylabel("success frequency")
    ax.set_ylim(0.0, 1.05)
    ax.grid(alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
