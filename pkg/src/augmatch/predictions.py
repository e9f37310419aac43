"""Advice profiles and their distance to the truth.

The advice is a second type profile over the same offline universe, with the
same total count n.  Distances are measured two ways: in count units
(``l1_counts``, an even integer in [0, 2n]) and as the L1 distance between
the induced arrival distributions (``l1_counts / n``).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import ValidationError
from .graph import TypeProfile, VertexType, profile_from_dict, profile_to_dict

_FRESH_TRIES = 64
_FRESH_TRIES_WIDE = 256


def l1_counts(truth: TypeProfile, advice: TypeProfile) -> int:
    """Sum of |truth count - advice count| over the union of supports.

    Always even when both profiles share the same n, since the signed
    differences cancel.
    """
    if truth.n != advice.n:
        raise ValidationError(
            f"profiles disagree on n: {truth.n} vs {advice.n}"
        )
    keys = set(truth.entries) | set(advice.entries)
    return sum(abs(truth.count(t) - advice.count(t)) for t in keys)


def l1_distribution(truth: TypeProfile, advice: TypeProfile) -> float:
    """L1 distance between the arrival distributions induced by the profiles."""
    return l1_counts(truth, advice) / truth.n


def unpredicted_count(truth: TypeProfile, advice: TypeProfile) -> int:
    """Number of online vertices whose type the advice under-covers.

    Equals l1_counts / 2: the overshoot and undershoot halves of the count
    distance are equal because both profiles total n.
    """
    if truth.n != advice.n:
        raise ValidationError("profiles disagree on n")
    return sum(
        max(0, c - advice.count(t)) for t, c in truth.entries.items()
    )


@dataclass(frozen=True)
class PredictionPair:
    """A truth profile together with the advice given for it."""

    truth: TypeProfile
    advice: TypeProfile

    def __post_init__(self) -> None:
        if self.truth.n != self.advice.n:
            raise ValidationError("truth and advice must share the same n")

    @property
    def n(self) -> int:
        return self.truth.n

    def l1_counts(self) -> int:
        return l1_counts(self.truth, self.advice)

    def l1_distribution(self) -> float:
        return self.l1_counts() / self.n


def upper_bound_opt(pair: PredictionPair, n_hat: int) -> float:
    """Ceiling on the offline optimum implied by the advice quality.

    The true optimum can exceed the advice optimum n_hat by at most one
    match per under-covered vertex, of which there are l1_counts / 2.
    """
    return n_hat + pair.l1_counts() / 2


def _fresh_type(
    forbidden: set[VertexType],
    n: int,
    size_pool: list[int],
    rng: np.random.Generator,
) -> VertexType:
    """Draw a type outside ``forbidden`` with a size resembling the pool."""
    for attempt in range(_FRESH_TRIES + _FRESH_TRIES_WIDE):
        if attempt < _FRESH_TRIES and size_pool:
            k = size_pool[int(rng.integers(len(size_pool)))]
        else:
            # widen the size range once look-alike sizes keep colliding
            k = int(rng.integers(0, n + 1))
        if k == 0:
            cand = VertexType(())
        else:
            cand = VertexType(tuple(sorted(rng.choice(n, size=k, replace=False).tolist())))
        if cand not in forbidden:
            return cand
    raise ValidationError("could not draw a type outside the truth support")


def perturb(
    truth: TypeProfile,
    target_l1_counts: int,
    rng: np.random.Generator,
) -> TypeProfile:
    """Advice at an exact count distance from the truth.

    Moves ``target_l1_counts / 2`` whole units of count from randomly chosen
    supported types onto freshly drawn types outside the truth support.
    Each moved unit contributes one count of undershoot and one of overshoot,
    so the achieved ``l1_counts`` equals the target exactly.  Fresh types
    draw their sizes from the truth's (count-weighted) type-size pool, which
    keeps the advice graph matchable rather than collapsing it.
    """
    n = truth.n
    if not isinstance(target_l1_counts, int) or isinstance(target_l1_counts, bool):
        raise ValidationError("target_l1_counts must be an int")
    if target_l1_counts < 0 or target_l1_counts > 2 * n:
        raise ValidationError(
            f"target_l1_counts={target_l1_counts} outside [0, {2 * n}]"
        )
    if target_l1_counts % 2 != 0:
        raise ValidationError("target_l1_counts must be even")

    moves = target_l1_counts // 2
    counts: dict[VertexType, int] = dict(truth.entries)
    if moves == 0:
        return TypeProfile(entries=counts, n=n)

    units: list[VertexType] = []
    size_pool: list[int] = []
    for t, c in truth.items_sorted():
        units.extend([t] * c)
        size_pool.extend([t.degree] * c)
    order = rng.permutation(len(units))
    forbidden = set(truth.entries)

    for idx in order[:moves]:
        donor = units[int(idx)]
        left = counts[donor] - 1
        if left:
            counts[donor] = left
        else:
            del counts[donor]
        fresh = _fresh_type(forbidden, n, size_pool, rng)
        counts[fresh] = counts.get(fresh, 0) + 1
    return TypeProfile(entries=counts, n=n)


def adversarial_advice(
    truth: TypeProfile,
    tries: int,
    rng: np.random.Generator,
) -> TypeProfile:
    """Worst-of-k heuristic adversary at maximal count distance.

    Draws ``tries`` independent disjoint-support perturbations and keeps the
    one whose advice graph promises the most (largest support spread away
    from the truth makes the follower waste the most).  This is a heuristic
    stand-in for a true worst case, which is not tractable to search.
    """
    from .graph import maximum_matching

    if tries < 1:
        raise ValidationError("tries must be >= 1")
    best: TypeProfile | None = None
    best_hat = -1
    for _ in range(tries):
        cand = perturb(truth, 2 * truth.n, rng)
        hat = maximum_matching(cand, truth.n).size
        # the most damaging disjoint advice is the one the algorithm trusts
        # most readily, i.e. with the largest advice optimum
        if hat > best_hat:
            best, best_hat = cand, hat
    assert best is not None
    return best


def pair_to_dict(pair: PredictionPair) -> dict:
    return {
        "truth": profile_to_dict(pair.truth),
        "advice": profile_to_dict(pair.advice),
    }


def pair_from_dict(data: Mapping) -> PredictionPair:
    try:
        truth = profile_from_dict(data["truth"])
        advice = profile_from_dict(data["advice"])
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed prediction pair payload: {exc}") from exc
    return PredictionPair(truth=truth, advice=advice)


def pair_to_json(pair: PredictionPair) -> str:
    return json.dumps(pair_to_dict(pair), separators=(",", ":"))


def pair_from_json(text: str) -> PredictionPair:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"prediction pair JSON does not parse: {exc}") from exc
    return pair_from_dict(data)
