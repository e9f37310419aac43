"""Figure rendering produces real image files from experiment results."""

from __future__ import annotations

from pathlib import Path

from augmatch.calibration import calibrate
from augmatch.harness import ExperimentSpec, run_experiment
from augmatch.report import (
    render_branch_figure,
    render_calibration_figure,
    render_ratio_figure,
    render_sweep_figures,
)

PNG_MAGIC = b"\x89PNG"


def small_result():
    spec = ExperimentSpec(
        family="perfect",
        n=40,
        alpha=0.5,
        l1_grid=(0.0, 0.5),
        trials=3,
        seed=3,
        epsilon=0.5,
        delta_prime=0.1,
        c_sample=0.1,
    )
    return run_experiment(spec)


def test_sweep_figures(tmp_path: Path) -> None:
    paths = render_sweep_figures(small_result(), tmp_path)
    assert [p.name for p in paths] == ["summary_ratio.png", "summary_branches.png"]
    for p in paths:
        assert p.read_bytes()[:4] == PNG_MAGIC


def test_individual_renderers_overwrite_cleanly(tmp_path: Path) -> None:
    result = small_result()
    ratio = render_ratio_figure(result, tmp_path / "r.png")
    render_ratio_figure(result, tmp_path / "r.png")
    branches = render_branch_figure(result, tmp_path / "b.png")
    assert ratio.read_bytes()[:4] == PNG_MAGIC
    assert branches.read_bytes()[:4] == PNG_MAGIC


def test_calibration_figure(tmp_path: Path) -> None:
    report = calibrate(
        n=128, epsilon=0.1, delta_prime=0.1, trials=20, seed=5, c_grid=(0.5, 4.0)
    )
    path = render_calibration_figure(report, tmp_path / "cal.png")
    assert path.read_bytes()[:4] == PNG_MAGIC
