"""Sample-size schedule and the plug-in L1 estimator over a padded domain.

The arrival distribution is compared against the advice distribution on a
domain padded to exactly n + 1 symbols: one symbol per predicted type, one
dummy symbol absorbing every unpredicted arrival, and enough formal filler
symbols (zero mass on both sides) to reach n + 1.  Collapsing unpredicted
types onto the dummy preserves the L1 distance, because the advice puts no
mass on any of them.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .errors import ValidationError
from .graph import TypeProfile, VertexType

RngLike = "np.random.Generator | int"


def as_generator(rng: np.random.Generator | int | None) -> np.random.Generator:
    """Accept a Generator, a seed, or None (fresh OS entropy)."""
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


@dataclass(frozen=True)
class EstimatorConfig:
    """Accuracy target for the distribution test.

    epsilon is the additive accuracy, delta_prime the failure budget of the
    estimate itself, c_sample the calibrated leading constant of the sample
    size schedule.
    """

    n: int
    epsilon: float
    delta_prime: float
    c_sample: float = 4.0

    def __post_init__(self) -> None:
        if not isinstance(self.n, int) or self.n < 1:
            raise ValidationError("config requires an integer n >= 1")
        if not self.epsilon > 0:
            raise ValidationError(f"epsilon must be positive, got {self.epsilon}")
        if not 0 < self.delta_prime < 1:
            raise ValidationError(
                f"delta_prime must lie in (0, 1), got {self.delta_prime}"
            )
        if not self.c_sample > 0:
            raise ValidationError(f"c_sample must be positive, got {self.c_sample}")


def expected_sample_size(config: EstimatorConfig) -> int:
    """Scheduled sample size: even round-up of
    c * (n + 1) * ln(1/delta') / (epsilon^2 * ln(n + 1)), never below 2.

    The domain has n + 1 symbols, and testing at accuracy epsilon over r
    symbols needs order r / log r draws, so the schedule is sublinear in the
    domain size only through the log factor.
    """
    n = config.n
    raw = (
        config.c_sample
        * (n + 1)
        * math.log(1.0 / config.delta_prime)
        / (config.epsilon**2 * math.log(n + 1))
    )
    return max(2, 2 * math.ceil(raw / 2.0))


def sample_size_limit(config: EstimatorConfig) -> float:
    """Overflow guard: s * (1 + sqrt(ln(n + 1))) for scheduled size s."""
    s = expected_sample_size(config)
    return s * (1.0 + math.sqrt(math.log(config.n + 1)))


@dataclass(frozen=True)
class SampleOutcome:
    """One draw of the randomized sample size."""

    s1: int
    s2: int
    limit: float
    overflowed: bool

    @property
    def total(self) -> int:
        return self.s1 + self.s2


def draw_sample_size(
    config: EstimatorConfig, rng: np.random.Generator | int | None
) -> SampleOutcome:
    """Draw the two halves of the sample size, each Poisson with mean s/2.

    Poissonization makes the sampled multiset exchangeable with independent
    draws, at the price of a heavy-tail event; ``overflowed`` flags the
    draws that exceed the guard and must be discarded by the caller.
    """
    gen = as_generator(rng)
    half = expected_sample_size(config) / 2.0
    s1 = int(gen.poisson(half))
    s2 = int(gen.poisson(half))
    limit = sample_size_limit(config)
    return SampleOutcome(s1=s1, s2=s2, limit=limit, overflowed=s1 + s2 > limit)


def overflow_frequency(
    config: EstimatorConfig, draws: int, rng: np.random.Generator | int | None
) -> float:
    """Empirical frequency of the overflow event over many size draws."""
    if draws < 1:
        raise ValidationError("draws must be >= 1")
    gen = as_generator(rng)
    half = expected_sample_size(config) / 2.0
    totals = gen.poisson(half, size=(draws, 2)).sum(axis=1)
    return float(np.mean(totals > sample_size_limit(config)))


@dataclass(frozen=True)
class PaddedDomain:
    """Comparison domain of exactly n + 1 symbols.

    ``predicted`` holds the advice support in sorted order; symbol i < len
    (predicted) carries reference mass advice_count / n.  The next symbol is
    the dummy with reference mass 0.  ``filler_count`` formal symbols with
    zero mass on both sides complete the domain; they never receive sample
    mass and contribute nothing to the distance, so they are represented
    only by their count.
    """

    predicted: tuple[VertexType, ...]
    reference: np.ndarray
    filler_count: int
    _index: Mapping[VertexType, int]

    @property
    def dummy_index(self) -> int:
        return len(self.predicted)

    @property
    def size(self) -> int:
        return len(self.predicted) + 1 + self.filler_count

    def symbol_of(self, t: VertexType) -> int:
        return self._index.get(t, len(self.predicted))


def build_padded_domain(advice: TypeProfile, n: int) -> PaddedDomain:
    """Pad the advice support to n + 1 symbols and attach reference masses."""
    if advice.n != n:
        raise ValidationError(f"advice has n={advice.n}, expected {n}")
    predicted = advice.support
    if len(predicted) > n:
        raise ValidationError("advice support larger than n")
    reference = np.zeros(len(predicted) + 1)
    index: dict[VertexType, int] = {}
    for i, t in enumerate(predicted):
        reference[i] = advice.count(t) / n
        index[t] = i
    reference.flags.writeable = False
    return PaddedDomain(
        predicted=predicted,
        reference=reference,
        filler_count=n - len(predicted),
        _index=index,
    )


def estimate_l1_from_counts(domain: PaddedDomain, counts: np.ndarray) -> float:
    """Plug-in L1 distance from raw symbol counts (dummy included, last)."""
    counts = np.asarray(counts, dtype=float)
    if counts.shape != domain.reference.shape:
        raise ValidationError(
            f"counts shape {counts.shape} does not match domain "
            f"({domain.reference.shape})"
        )
    if np.any(counts < 0):
        raise ValidationError("negative sample counts")
    total = counts.sum()
    if total <= 0:
        raise ValidationError("cannot estimate from an empty sample")
    return float(np.abs(counts / total - domain.reference).sum())


def estimate_l1(
    domain: PaddedDomain,
    sample: "Iterable[VertexType] | Mapping[VertexType, int]",
    config: EstimatorConfig | None = None,
) -> float:
    """Plug-in estimate sum_t |empirical(t) - reference(t)| over the domain.

    ``sample`` may be a sequence of types or a type -> count mapping; both
    describe the same multiset and give identical results.  ``config`` is
    accepted so call sites can thread their configuration through; the
    statistic itself depends only on the domain and the sample.
    """
    del config
    if isinstance(sample, Mapping):
        items = sample.items()
    else:
        items = Counter(sample).items()
    counts = np.zeros_like(domain.reference)
    for t, c in items:
        if c < 0:
            raise ValidationError("negative sample counts")
        counts[domain.symbol_of(t)] += c
    return estimate_l1_from_counts(domain, counts)


def default_delta_prime(n: int) -> float:
    """Failure budget used when the caller does not pin one.

    The asymptotic choice 1 / log log log n vanishes too slowly to matter at
    desk scale and is undefined below n around 16, so it is clamped: the
    inner value never drops below 10, making the default 0.1 wherever the
    package realistically runs.
    """
    floor = 10.0
    try:
        lll = math.log(math.log(math.log(n)))
    except ValueError:
        lll = float("-inf")
    return min(0.1, 1.0 / max(lll, floor))


def asymptotic_delta_prime(n: int) -> float:
    """Unclamped 1 / log log log n.  Only meaningful for astronomically
    large n; below that it is undefined or >= 1 and any config built from it
    will fail validation, which is the intended behavior."""
    try:
        lll = math.log(math.log(math.log(n)))
    except ValueError as exc:
        raise ValidationError(
            f"log log log is undefined at n={n}; use default_delta_prime"
        ) from exc
    if lll <= 0:
        raise ValidationError(
            f"log log log n is not positive at n={n}; use default_delta_prime"
        )
    return 1.0 / lll
