"""Online matching algorithms under random arrival order.

Four players:

* ``Mimic`` follows a precomputed matching of the advice graph and never
  matches outside it.
* ``Ranking`` is the worst-case baseline: a uniformly random priority order
  over offline vertices, each arrival matched to its highest-priority free
  neighbor.
* ``Greedy`` matches each arrival to its lowest-index free neighbor.
* ``TestAndMatch`` starts by following the advice while sampling arrivals
  with replacement; once the sample is full it estimates how far the
  arrival distribution sits from the advice distribution and either keeps
  following the advice or abandons it for a fresh ``Ranking`` over the
  still-unmatched offline vertices.

Every algorithm exposes ``step(arrival) -> offline index or None`` and makes
each decision immediately and irrevocably.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Protocol

import numpy as np

from .errors import ValidationError
from .estimator import (
    EstimatorConfig,
    PaddedDomain,
    SampleOutcome,
    as_generator,
    build_padded_domain,
    draw_sample_size,
    estimate_l1_from_counts,
)
from .graph import Instance, MatchingPlan, TypeProfile, VertexType, maximum_matching

# Competitive floor of the baseline; matching literature value for Ranking
# under random arrival order.
DEFAULT_BETA = 0.696


def switch_threshold(n_hat: int, n: int, beta: float) -> float:
    """Distance below which following the advice beats the baseline floor:
    (2 n_hat / n) * (1 - beta) / (1 + beta)."""
    if n < 1:
        raise ValidationError("n must be >= 1")
    if not 0 < beta < 1:
        raise ValidationError(f"beta must lie in (0, 1), got {beta}")
    if not 0 <= n_hat <= n:
        raise ValidationError(f"n_hat={n_hat} outside [0, {n}]")
    return (2.0 * n_hat / n) * (1.0 - beta) / (1.0 + beta)


def default_epsilon(alpha: float, beta: float = DEFAULT_BETA) -> float:
    """Default test accuracy: small enough that the switch rule stays sound
    for any advice passing the alpha screen."""
    if not 0 < alpha <= 1:
        raise ValidationError(f"alpha must lie in (0, 1], got {alpha}")
    if not 0 < beta < 1:
        raise ValidationError(f"beta must lie in (0, 1), got {beta}")
    return min(0.05, alpha * (1.0 - beta) / (1.0 + beta))


class OnlineAlgorithm(Protocol):
    def step(self, arrival: VertexType) -> int | None: ...


class Mimic:
    """Follow a matching plan for the advice graph, type by type.

    Each arrival of a predicted type consumes one unit of the advice count
    for that type; as long as the plan still holds an unused partner for the
    type, the arrival takes it.  Unpredicted arrivals, and predicted ones
    beyond their advice count, are left unmatched.  No edge outside the plan
    is ever used.
    """

    def __init__(self, advice: TypeProfile, plan: MatchingPlan) -> None:
        self._remaining = dict(advice.entries)
        self._plan = plan
        self._cursor: dict[VertexType, int] = {}
        self.used_offline: set[int] = set()
        self.matches = 0

    def step(self, arrival: VertexType) -> int | None:
        left = self._remaining.get(arrival, 0)
        if left <= 0:
            return None
        self._remaining[arrival] = left - 1
        partners = self._plan.partners(arrival)
        cur = self._cursor.get(arrival, 0)
        if cur >= len(partners):
            # predicted arrival, but every planned partner for this type is
            # already taken by an earlier copy: skip
            return None
        self._cursor[arrival] = cur + 1
        partner = partners[cur]
        self.used_offline.add(partner)
        self.matches += 1
        return partner


class Ranking:
    """Random-priority matching over a chosen set of offline vertices.

    The priority order is drawn once at construction from ``rng``;
    ``excluded`` vertices never participate.  Matched vertices drop out by
    having their priority pushed to infinity, so each step costs one numpy
    gather over the arrival's neighbor list.
    """

    def __init__(
        self,
        n: int,
        rng: np.random.Generator,
        excluded: Iterable[int] = (),
    ) -> None:
        if n < 1:
            raise ValidationError("n must be >= 1")
        self._priority = np.full(n, np.inf)
        eligible = sorted(set(range(n)) - {int(u) for u in excluded})
        order = rng.permutation(len(eligible))
        for slot, u in enumerate(eligible):
            self._priority[u] = order[slot]
        self._nbr_cache: dict[VertexType, np.ndarray] = {}
        self.matches = 0

    def _neighbors(self, t: VertexType) -> np.ndarray:
        arr = self._nbr_cache.get(t)
        if arr is None:
            arr = np.asarray(t.neighbors, dtype=np.intp)
            self._nbr_cache[t] = arr
        return arr

    def step(self, arrival: VertexType) -> int | None:
        nbr = self._neighbors(arrival)
        if nbr.size == 0:
            return None
        ranks = self._priority[nbr]
        j = int(np.argmin(ranks))
        if not np.isfinite(ranks[j]):
            return None
        u = int(nbr[j])
        self._priority[u] = np.inf
        self.matches += 1
        return u


class Greedy:
    """Match each arrival to its lowest-index free neighbor."""

    def __init__(self, n: int) -> None:
        self._free = [True] * n
        self.matches = 0

    def step(self, arrival: VertexType) -> int | None:
        for u in arrival.neighbors:
            if self._free[u]:
                self._free[u] = False
                self.matches += 1
                return u
        return None


class ReplacementSampler:
    """Streaming with-replacement sample of a random-order arrival sequence.

    Repeatedly flips a coin with heads probability i/n, where i counts the
    arrivals stored so far.  Heads re-draws a uniformly random stored
    arrival into the sample without consuming input; tails consumes the next
    arrival, storing it and adding it to the sample.  Over a uniformly
    random arrival order the sample is distributed as draws with replacement
    from the full sequence, while only a prefix of it is ever revealed.
    """

    def __init__(self, n: int, target: int, rng: np.random.Generator) -> None:
        if n < 1:
            raise ValidationError("n must be >= 1")
        if target < 0:
            raise ValidationError("target must be >= 0")
        self.n = n
        self.target = target
        self._rng = rng
        self.seen: list[VertexType] = []
        self.counts: Counter[VertexType] = Counter()
        self.drawn = 0

    @property
    def complete(self) -> bool:
        return self.drawn >= self.target

    @property
    def consumed(self) -> int:
        return len(self.seen)

    def offer(self, arrival: VertexType) -> bool:
        """Advance until the arrival is consumed (True) or the sample is
        full without consuming it (False)."""
        while not self.complete:
            i = len(self.seen)
            if self._rng.random() < i / self.n:
                pick = self.seen[int(self._rng.integers(i))]
                self.counts[pick] += 1
                self.drawn += 1
            else:
                self.seen.append(arrival)
                self.counts[arrival] += 1
                self.drawn += 1
                return True
        return False

    def fill_from_seen(self) -> None:
        """Complete the sample by uniform draws from the stored arrivals.

        Only legal once input is exhausted: at that point the store holds
        the whole sequence, so these draws are exactly with-replacement
        draws from it.
        """
        missing = self.target - self.drawn
        if missing <= 0:
            return
        if not self.seen:
            raise ValidationError("cannot fill an empty sample store")
        idx = self._rng.integers(0, len(self.seen), size=missing)
        hist = np.bincount(idx, minlength=len(self.seen))
        for j in np.nonzero(hist)[0]:
            self.counts[self.seen[int(j)]] += int(hist[j])
        self.drawn = self.target


class Phase(str, Enum):
    PRE_CHECK = "PreCheck"
    SAMPLING = "Sampling"
    MIMIC_REST = "MimicRest"
    BASELINE_REST = "BaselineRest"
    BASELINE_WHOLE = "BaselineWhole"


class TestAndMatch:
    """Advice-following with a sampled distribution test and a fallback.

    Creation resolves the pre-checks: advice whose own optimum falls below
    alpha * n is not worth testing (straight to the baseline on the whole
    input), and an overflowed sample-size draw is discarded the same way.
    Otherwise the run starts in the sampling phase, where every consumed
    arrival is still handled by the advice follower.  When the sample is
    full, the estimated distance decides the rest of the run: at most
    threshold - epsilon, keep following the advice; above, switch to a
    fresh random-priority baseline over the offline vertices the follower
    has not already used.

    Transitions are forward-only: PreCheck -> Sampling -> MimicRest |
    BaselineRest, or PreCheck -> BaselineWhole.
    """

    # not a fixture, despite the name pytest pattern-matches on
    __test__ = False

    def __init__(
        self,
        advice: TypeProfile,
        n: int,
        alpha: float,
        config: EstimatorConfig,
        beta: float = DEFAULT_BETA,
        rng: np.random.Generator | int | None = None,
    ) -> None:
        if advice.n != n:
            raise ValidationError(f"advice has n={advice.n}, expected {n}")
        if not 0 < alpha <= 1:
            raise ValidationError(f"alpha must lie in (0, 1], got {alpha}")
        if not 0 < beta < 1:
            raise ValidationError(f"beta must lie in (0, 1), got {beta}")
        if config.n != n:
            raise ValidationError(f"estimator config has n={config.n}, expected {n}")
        self.n = n
        self.alpha = alpha
        self.beta = beta
        self.config = config
        self._rng = as_generator(rng)

        self.plan = maximum_matching(advice, n)
        self.n_hat = self.plan.size
        self.tau = switch_threshold(self.n_hat, n, beta)
        self._mimic = Mimic(advice, self.plan)
        self._baseline: Ranking | None = None
        self._sampler: ReplacementSampler | None = None
        self._domain: PaddedDomain | None = None
        self.sample_outcome: SampleOutcome | None = None
        self.l1_hat: float | None = None
        self.reason: str | None = None
        self.phase = Phase.PRE_CHECK

        if self.n_hat / n < alpha:
            self._enter_baseline_whole("advice_below_alpha")
            return
        outcome = draw_sample_size(config, self._rng)
        self.sample_outcome = outcome
        if outcome.overflowed:
            self._enter_baseline_whole("sample_overflow")
            return
        if outcome.total == 0:
            # a zero-size draw leaves nothing to estimate from; treated like
            # an overflow and discarded
            self._enter_baseline_whole("empty_sample")
            return
        self._domain = build_padded_domain(advice, n)
        self._sampler = ReplacementSampler(n, outcome.total, self._rng)
        self.phase = Phase.SAMPLING

    def _enter_baseline_whole(self, reason: str) -> None:
        self.reason = reason
        self._baseline = Ranking(self.n, self._rng)
        self.phase = Phase.BASELINE_WHOLE

    def _finish_sampling(self) -> None:
        assert self._sampler is not None and self._domain is not None
        counts = np.zeros_like(self._domain.reference)
        for t, c in self._sampler.counts.items():
            counts[self._domain.symbol_of(t)] += c
        self.l1_hat = estimate_l1_from_counts(self._domain, counts)
        if self.l1_hat <= self.tau - self.config.epsilon:
            self.reason = "estimate_within_threshold"
            self.phase = Phase.MIMIC_REST
        else:
            self.reason = "estimate_above_threshold"
            self._baseline = Ranking(
                self.n, self._rng, excluded=self._mimic.used_offline
            )
            self.phase = Phase.BASELINE_REST

    def step(self, arrival: VertexType) -> int | None:
        if self.phase is Phase.SAMPLING:
            assert self._sampler is not None
            if self._sampler.offer(arrival):
                decision = self._mimic.step(arrival)
                if self._sampler.complete:
                    self._finish_sampling()
                return decision
            # sample filled by re-draws alone; this arrival belongs to the
            # phase the estimate selects
            self._finish_sampling()
        if self.phase is Phase.MIMIC_REST:
            return self._mimic.step(arrival)
        assert self._baseline is not None
        return self._baseline.step(arrival)

    def finalize(self) -> None:
        """Close out a run whose input ended during the sampling phase.

        The store then holds the entire arrival sequence, so the missing
        re-draws are taken from it directly and the estimate proceeds as
        usual; the chosen branch is recorded even though no arrivals remain.
        With an empty store (no arrival ever consumed) there is nothing to
        estimate from and the run is booked to the whole-input baseline.
        """
        if self.phase is not Phase.SAMPLING:
            return
        assert self._sampler is not None
        if not self._sampler.seen:
            self._enter_baseline_whole("no_arrivals_sampled")
            return
        self._sampler.fill_from_seen()
        self._finish_sampling()

    @property
    def branch(self) -> str:
        if self.phase in (Phase.PRE_CHECK, Phase.SAMPLING):
            raise ValidationError("branch is undefined before the run completes")
        return self.phase.value

    @property
    def matches(self) -> int:
        return self._mimic.matches + (
            self._baseline.matches if self._baseline is not None else 0
        )

    @property
    def k(self) -> int:
        """Sample size drawn (0 when the pre-check skipped the draw)."""
        return self.sample_outcome.total if self.sample_outcome is not None else 0

    @property
    def k_prime(self) -> int:
        """Arrivals consumed during the sampling phase."""
        return self._sampler.consumed if self._sampler is not None else 0

    @property
    def decision_log(self) -> dict:
        log = {
            "branch": self.branch,
            "l1_hat": self.l1_hat,
            "k": self.k,
            "k_prime": self.k_prime,
            "reason": self.reason,
        }
        if self.sample_outcome is not None:
            log["s1"] = self.sample_outcome.s1
            log["s2"] = self.sample_outcome.s2
        return log


@dataclass
class RunResult:
    """Outcome of driving one algorithm over one arrival order."""

    branch: str
    matches: int
    k: int
    k_prime: int
    l1_hat: float | None
    seed: int | None
    decisions: list[int | None]

    def to_json_dict(self) -> dict:
        return {
            "branch": self.branch,
            "matches": self.matches,
            "k": self.k,
            "k_prime": self.k_prime,
            "l1_hat": self.l1_hat,
            "seed": self.seed,
        }


def run_online(
    algorithm: OnlineAlgorithm,
    instance: Instance,
    arrival_permutation: "np.ndarray | list[int]",
    seed: int | None = None,
) -> RunResult:
    """Feed an instance to an algorithm one arrival at a time.

    ``arrival_permutation`` reorders the canonical expansion of the truth
    profile.  Decisions are validated as they are made: a match must use an
    edge of the arriving type and a previously unused offline vertex.  The
    ``seed`` is carried through to the result untouched, for reporting.
    """
    arrivals = instance.arrivals()
    perm = [int(i) for i in arrival_permutation]
    if len(perm) != len(arrivals) or sorted(perm) != list(range(len(arrivals))):
        raise ValidationError(
            f"arrival permutation must reorder 0..{len(arrivals) - 1}"
        )
    used: set[int] = set()
    matches = 0
    decisions: list[int | None] = []
    for pos in perm:
        t = arrivals[pos]
        choice = algorithm.step(t)
        if choice is not None:
            if choice not in t:
                raise ValidationError(
                    f"algorithm matched offline {choice} outside type {t}"
                )
            if choice in used:
                raise ValidationError(f"offline vertex {choice} matched twice")
            used.add(choice)
            matches += 1
        decisions.append(choice)
    finalize = getattr(algorithm, "finalize", None)
    if callable(finalize):
        finalize()
    branch = getattr(algorithm, "branch", None) or type(algorithm).__name__
    return RunResult(
        branch=branch,
        matches=matches,
        k=getattr(algorithm, "k", 0),
        k_prime=getattr(algorithm, "k_prime", 0),
        l1_hat=getattr(algorithm, "l1_hat", None),
        seed=seed,
        decisions=decisions,
    )
