"""Bipartite instances encoded as vertex-type profiles, plus maximum matchings.

An online vertex is described entirely by its type: the set of offline
vertices it may be matched to.  A profile maps each distinct type to the
number of online vertices carrying it.  Offline vertices are the integers
``0 .. n-1``.  All functions here are pure and all containers in the public
types are immutable, so values can be shared freely across threads.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

from .errors import OracleSizeError, ValidationError

_INF = float("inf")

# Exhaustive search is only sane for toy sizes; the guard keeps callers honest.
ORACLE_MAX_N = 10


@dataclass(frozen=True, order=True)
class VertexType:
    """Neighborhood of an online vertex: a sorted tuple of offline indices."""

    neighbors: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        nb = self.neighbors
        if not isinstance(nb, tuple):
            raise ValidationError("neighbors must be a tuple of ints")
        for j, u in enumerate(nb):
            if not isinstance(u, int) or isinstance(u, bool) or u < 0:
                raise ValidationError(f"offline index {u!r} is not a nonnegative int")
            if j > 0 and nb[j - 1] >= u:
                raise ValidationError("neighbors must be strictly increasing")

    @classmethod
    def of(cls, indices: Iterable[int]) -> "VertexType":
        """Build a type from any iterable of offline indices, deduplicating."""
        return cls(tuple(sorted({int(u) for u in indices})))

    @property
    def degree(self) -> int:
        return len(self.neighbors)

    def __contains__(self, u: int) -> bool:
        return u in self.neighbors


@dataclass(frozen=True)
class TypeProfile:
    """Multiset of vertex types: ``entries[t]`` online vertices carry type t.

    ``n`` is the total online count; counts are positive and sum to ``n``.
    The mapping is copied on construction and must not be mutated afterwards.
    """

    entries: Mapping[VertexType, int]
    n: int

    def __post_init__(self) -> None:
        if not isinstance(self.n, int) or self.n < 1:
            raise ValidationError("profile requires an integer n >= 1")
        entries = dict(self.entries)
        total = 0
        for t, c in entries.items():
            if not isinstance(t, VertexType):
                raise ValidationError(f"profile key {t!r} is not a VertexType")
            if not isinstance(c, int) or isinstance(c, bool) or c < 1:
                raise ValidationError(f"count for {t} must be a positive int, got {c!r}")
            total += c
        if total != self.n:
            raise ValidationError(f"profile counts sum to {total}, expected n={self.n}")
        object.__setattr__(self, "entries", entries)

    def count(self, t: VertexType) -> int:
        return self.entries.get(t, 0)

    @property
    def support(self) -> tuple[VertexType, ...]:
        """Distinct types in canonical (sorted) order."""
        return tuple(sorted(self.entries))

    def max_neighbor(self) -> int:
        """Largest offline index referenced, or -1 if every type is empty."""
        best = -1
        for t in self.entries:
            if t.neighbors:
                best = max(best, t.neighbors[-1])
        return best

    def items_sorted(self) -> Iterator[tuple[VertexType, int]]:
        for t in self.support:
            yield t, self.entries[t]


def expand_profile(profile: TypeProfile) -> list[VertexType]:
    """Expand a profile into its canonical list of n online vertices.

    Types appear in sorted order, each repeated by its count.  Position in
    this list is the canonical identity of an online vertex; arrival orders
    are permutations of these positions.
    """
    out: list[VertexType] = []
    for t, c in profile.items_sorted():
        out.extend([t] * c)
    return out


@dataclass(frozen=True)
class MatchingPlan:
    """A matching of online types to offline vertices.

    ``per_type[t]`` lists the offline partners reserved for copies of type t,
    in a fixed order; each offline vertex appears at most once globally.
    """

    per_type: Mapping[VertexType, tuple[int, ...]]
    size: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "per_type", dict(self.per_type))

    def partners(self, t: VertexType) -> tuple[int, ...]:
        return self.per_type.get(t, ())


def validate_plan(plan: MatchingPlan, profile: TypeProfile, n: int) -> None:
    """Check a plan's structural invariants against a profile; raise on breach."""
    seen: set[int] = set()
    total = 0
    for t, partners in plan.per_type.items():
        if profile.count(t) == 0:
            raise ValidationError(f"plan names type {t} absent from the profile")
        if len(partners) > profile.count(t):
            raise ValidationError(f"plan reserves more partners than copies of {t}")
        for u in partners:
            if not 0 <= u < n:
                raise ValidationError(f"plan partner {u} outside [0, {n})")
            if u not in t:
                raise ValidationError(f"plan pairs {u} with non-adjacent type {t}")
            if u in seen:
                raise ValidationError(f"offline vertex {u} appears twice in the plan")
            seen.add(u)
        total += len(partners)
    if total != plan.size:
        raise ValidationError(f"plan.size={plan.size} but {total} partners are listed")


def _check_neighbor_range(profile: TypeProfile, n: int) -> None:
    if n < 1:
        raise ValidationError("offline count n must be >= 1")
    hi = profile.max_neighbor()
    if hi >= n:
        raise ValidationError(f"profile references offline index {hi} >= n={n}")


def _layer(
    adj: list[tuple[int, ...]],
    match_left: list[int],
    match_right: list[int],
    dist: list[float],
) -> bool:
    """BFS phase: layer left vertices from the free ones; True if an
    augmenting path to a free right vertex exists."""
    q: deque[int] = deque()
    for u in range(len(adj)):
        if match_left[u] < 0:
            dist[u] = 0
            q.append(u)
        else:
            dist[u] = _INF
    reach = _INF
    while q:
        u = q.popleft()
        if dist[u] >= reach:
            continue
        for v in adj[u]:
            w = match_right[v]
            if w < 0:
                if reach == _INF:
                    reach = dist[u] + 1
            elif dist[w] == _INF:
                dist[w] = dist[u] + 1
                q.append(w)
    return reach != _INF


def _augment(
    u0: int,
    adj: list[tuple[int, ...]],
    match_left: list[int],
    match_right: list[int],
    dist: list[float],
) -> bool:
    """Iterative layered DFS from a free left vertex; applies the augmenting
    path if one is found.  Explicit stack: path lengths can exceed the
    interpreter recursion limit at the sizes we run."""
    stack: list[tuple[int, Iterator[int]]] = [(u0, iter(adj[u0]))]
    chosen: list[int] = []
    while stack:
        u, neigh = stack[-1]
        advanced = False
        for v in neigh:
            w = match_right[v]
            if w < 0:
                chosen.append(v)
                for (left, _), right in zip(stack, chosen):
                    match_left[left] = right
                    match_right[right] = left
                return True
            if dist[w] == dist[u] + 1:
                chosen.append(v)
                stack.append((w, iter(adj[w])))
                advanced = True
                break
        if not advanced:
            dist[u] = _INF
            stack.pop()
            if chosen:
                chosen.pop()
    return False


def maximum_matching(profile: TypeProfile, n: int) -> MatchingPlan:
    """Maximum bipartite matching of the expanded profile against offline
    vertices ``0 .. n-1``, via Hopcroft-Karp.

    Deterministic for fixed input: online vertices are expanded in sorted
    type order and ties are broken by ascending offline index.  ``n`` need
    not equal ``profile.n``; only neighbor indices are validated against it.
    """
    _check_neighbor_range(profile, n)
    online = expand_profile(profile)
    adj = [t.neighbors for t in online]
    m = len(online)
    match_left = [-1] * m
    match_right = [-1] * n
    dist: list[float] = [0.0] * m
    while _layer(adj, match_left, match_right, dist):
        for u in range(m):
            if match_left[u] < 0:
                _augment(u, adj, match_left, match_right, dist)

    per_type: dict[VertexType, tuple[int, ...]] = {}
    size = 0
    i = 0
    for t, c in profile.items_sorted():
        partners = [match_left[j] for j in range(i, i + c) if match_left[j] >= 0]
        if partners:
            per_type[t] = tuple(partners)
            size += len(partners)
        i += c
    plan = MatchingPlan(per_type=per_type, size=size)
    validate_plan(plan, profile, n)
    return plan


def brute_force_matching(profile: TypeProfile, n: int) -> int:
    """Exhaustive maximum matching size for toy instances.

    Independent of the Hopcroft-Karp path: plain branch over every online
    vertex (match to each free neighbor, or skip), memoized on the set of
    used offline vertices.  Guarded to n <= ORACLE_MAX_N on both sides.
    """
    _check_neighbor_range(profile, n)
    if n > ORACLE_MAX_N or profile.n > ORACLE_MAX_N:
        raise OracleSizeError(
            f"exhaustive oracle limited to {ORACLE_MAX_N} vertices per side, "
            f"got n={n}, online={profile.n}"
        )
    online = expand_profile(profile)
    memo: dict[tuple[int, int], int] = {}

    def best(i: int, used: int) -> int:
        if i == len(online):
            return 0
        key = (i, used)
        got = memo.get(key)
        if got is not None:
            return got
        out = best(i + 1, used)
        for u in online[i].neighbors:
            bit = 1 << u
            if not used & bit:
                out = max(out, 1 + best(i + 1, used | bit))
        memo[key] = out
        return out

    return best(0, 0)


@dataclass
class Instance:
    """A square instance: n offline vertices and n online vertices drawn from
    ``truth``.  The optimum matching size is computed on demand and cached."""

    n: int
    truth: TypeProfile
    _opt: int | None = field(default=None, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.truth.n != self.n:
            raise ValidationError(
                f"instance n={self.n} but truth profile has n={self.truth.n}"
            )
        _check_neighbor_range(self.truth, self.n)

    @property
    def opt_size(self) -> int:
        if self._opt is None:
            self._opt = maximum_matching(self.truth, self.n).size
        return self._opt

    def arrivals(self) -> list[VertexType]:
        return expand_profile(self.truth)


def profile_to_dict(profile: TypeProfile) -> dict:
    """JSON-ready form: {"n": int, "types": [{"neighbors": [...], "count": k}]}."""
    return {
        "n": profile.n,
        "types": [
            {"neighbors": list(t.neighbors), "count": c}
            for t, c in profile.items_sorted()
        ],
    }


def profile_from_dict(data: Mapping) -> TypeProfile:
    try:
        n = data["n"]
        raw = data["types"]
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed profile payload: {exc}") from exc
    entries: dict[VertexType, int] = {}
    for item in raw:
        t = VertexType(tuple(int(u) for u in item["neighbors"]))
        c = int(item["count"])
        entries[t] = entries.get(t, 0) + c
    return TypeProfile(entries=entries, n=int(n))


def profile_to_json(profile: TypeProfile) -> str:
    return json.dumps(profile_to_dict(profile), separators=(",", ":"))


def profile_from_json(text: str) -> TypeProfile:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"profile JSON does not parse: {exc}") from exc
    return profile_from_dict(data)
