"""Calibration of the sample-size constant against reference distributions.

The sample-size schedule carries a constant the theory leaves unnamed.  The
calibration suite measures, for each candidate constant, how often the
plug-in estimate lands within epsilon of the true distance on four profile
pairs chosen to stress different shapes: near-uniform mass, geometric decay,
two-point mass, and mass concentrated on unpredicted types.  The smallest
constant meeting the accuracy contract on every pair wins.

Sampling here draws symbol counts directly from a multinomial, which is
distributed identically to drawing the sampled types one by one and
counting; the estimator core consumes counts either way.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import ValidationError
from .estimator import (
    EstimatorConfig,
    PaddedDomain,
    as_generator,
    build_padded_domain,
    estimate_l1_from_counts,
    expected_sample_size,
)
from .graph import TypeProfile, VertexType
from .predictions import l1_distribution, perturb

DEFAULT_C_GRID = (1.0, 2.0, 4.0, 8.0)


@dataclass(frozen=True)
class CalibrationPair:
    """A truth/advice profile pair with a known exact distance."""

    name: str
    truth: TypeProfile
    advice: TypeProfile

    def l1_true(self) -> float:
        return l1_distribution(self.truth, self.advice)


def _singleton(j: int) -> VertexType:
    return VertexType((j,))


def _geometric_profile(n: int, offset: int = 0) -> TypeProfile:
    """Counts halving type by type, remainder on the last type."""
    entries: dict[VertexType, int] = {}
    left = n
    j = 0
    while left > 0:
        c = max(1, left // 2)
        entries[_singleton(offset + j)] = c
        left -= c
        j += 1
    return TypeProfile(entries=entries, n=n)


def default_calibration_pairs(
    n: int, rng: np.random.Generator | int | None = None
) -> list[CalibrationPair]:
    """The four reference pairs at a given scale."""
    if n < 8:
        raise ValidationError("calibration needs n >= 8")
    gen = as_generator(rng if rng is not None else 0)

    uniform = TypeProfile(entries={_singleton(j): 1 for j in range(n)}, n=n)

    geometric = _geometric_profile(n)
    geometric_truth = perturb(geometric, counts_target_half(n), gen)

    q = n // 4
    two_point = TypeProfile(
        entries={_singleton(0): n // 2, _singleton(1): n - n // 2}, n=n
    )
    two_point_truth = TypeProfile(
        entries={_singleton(0): n - q, _singleton(1): q}, n=n
    )

    heavy_advice = TypeProfile(entries={_singleton(0): n}, n=n)
    spread = {_singleton(0): n // 4}
    left = n - n // 4
    spread[_singleton(1)] = left // 2
    spread[_singleton(2)] = left - left // 2
    heavy_truth = TypeProfile(entries=spread, n=n)

    return [
        CalibrationPair("uniform", uniform, uniform),
        CalibrationPair("geometric", geometric_truth, geometric),
        CalibrationPair("two_point", two_point_truth, two_point),
        CalibrationPair("dummy_heavy", heavy_truth, heavy_advice),
    ]


def counts_target_half(n: int) -> int:
    """Even count distance equal to about half the total, used by the
    geometric pair."""
    return 2 * (n // 4)


def _truth_symbol_probs(pair: CalibrationPair, domain: PaddedDomain) -> np.ndarray:
    probs = np.zeros_like(domain.reference)
    for t, c in pair.truth.entries.items():
        probs[domain.symbol_of(t)] += c / pair.truth.n
    return probs


def measure_pair(
    pair: CalibrationPair,
    config: EstimatorConfig,
    trials: int,
    rng: np.random.Generator | int | None,
) -> float:
    """Fraction of trials with |estimate - true| <= epsilon.

    Each trial draws its Poissonized sample size, then multinomial symbol
    counts from the truth distribution over the padded domain.  A zero-size
    draw counts as a failure (there is nothing to estimate from).
    """
    if trials < 1:
        raise ValidationError("trials must be >= 1")
    gen = as_generator(rng)
    n = pair.truth.n
    domain = build_padded_domain(pair.advice, n)
    probs = _truth_symbol_probs(pair, domain)
    truth_l1 = pair.l1_true()
    half = expected_sample_size(config) / 2.0
    good = 0
    for _ in range(trials):
        total = int(gen.poisson(half)) + int(gen.poisson(half))
        if total == 0:
            continue
        counts = gen.multinomial(total, probs)
        estimate = estimate_l1_from_counts(domain, counts.astype(float))
        if abs(estimate - truth_l1) <= config.epsilon:
            good += 1
    return good / trials


@dataclass(frozen=True)
class CalibrationRow:
    c_sample: float
    sample_size: int
    success: Mapping[str, float]
    passed: bool

    def __post_init__(self) -> None:
        object.__setattr__(self, "success", dict(self.success))


@dataclass(frozen=True)
class CalibrationReport:
    n: int
    epsilon: float
    delta_prime: float
    trials: int
    seed: int
    rows: tuple[CalibrationRow, ...]
    selected: float | None

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "epsilon": self.epsilon,
            "delta_prime": self.delta_prime,
            "trials": self.trials,
            "seed": self.seed,
            "rows": [
                {
                    "c_sample": row.c_sample,
                    "sample_size": row.sample_size,
                    "success": dict(row.success),
                    "passed": row.passed,
                }
                for row in self.rows
            ],
            "selected": self.selected,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def calibrate(
    n: int,
    epsilon: float,
    delta_prime: float,
    trials: int,
    seed: int,
    c_grid: Sequence[float] = DEFAULT_C_GRID,
) -> CalibrationReport:
    """Measure every candidate constant and select the smallest that meets
    the accuracy contract (success at least 1 - delta_prime) on all pairs."""
    if not c_grid:
        raise ValidationError("c_grid must not be empty")
    grid = sorted(float(c) for c in c_grid)
    pair_rng = np.random.default_rng(np.random.SeedSequence(entropy=(seed, 0)))
    pairs = default_calibration_pairs(n, pair_rng)
    need = 1.0 - delta_prime
    rows: list[CalibrationRow] = []
    selected: float | None = None
    for ci, c in enumerate(grid):
        config = EstimatorConfig(
            n=n, epsilon=epsilon, delta_prime=delta_prime, c_sample=c
        )
        success: dict[str, float] = {}
        for pi, pair in enumerate(pairs):
            gen = np.random.default_rng(
                np.random.SeedSequence(entropy=(seed, 1, ci, pi))
            )
            success[pair.name] = measure_pair(pair, config, trials, gen)
        passed = all(v >= need for v in success.values())
        rows.append(
            CalibrationRow(
                c_sample=c,
                sample_size=expected_sample_size(config),
                success=success,
                passed=passed,
            )
        )
        if passed and selected is None:
            selected = c
    return CalibrationReport(
        n=n,
        epsilon=epsilon,
        delta_prime=delta_prime,
        trials=trials,
        seed=seed,
        rows=tuple(rows),
        selected=selected,
    )
