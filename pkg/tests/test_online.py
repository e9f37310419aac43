"""Online policies, the replacement sampler, and the tested-advice algorithm."""

from __future__ import annotations

import numpy as np
import pytest

import augmatch.online
from augmatch.errors import ValidationError
from augmatch.estimator import EstimatorConfig, SampleOutcome, sample_size_limit
from augmatch.graph import (
    Instance,
    TypeProfile,
    VertexType,
    expand_profile,
    maximum_matching,
)
from augmatch.online import (
    DEFAULT_BETA,
    Greedy,
    Mimic,
    Ranking,
    ReplacementSampler,
    TestAndMatch,
    default_epsilon,
    run_online,
    switch_threshold,
)


def profile(entries: dict[tuple[int, ...], int], n: int) -> TypeProfile:
    return TypeProfile(
        entries={VertexType(t): c for t, c in entries.items()}, n=n
    )


def block_profile(blocks: int, width: int) -> TypeProfile:
    """Perfectly matchable truth: block j sees exactly offline block j."""
    n = blocks * width
    return TypeProfile(
        entries={
            VertexType(tuple(range(j * width, (j + 1) * width))): width
            for j in range(blocks)
        },
        n=n,
    )


def shifted_block_profile(blocks: int, width: int) -> TypeProfile:
    """Same block structure with one extra neighbor per type: equally
    matchable, but type-disjoint from :func:`block_profile`."""
    n = blocks * width
    entries = {}
    for j in range(blocks):
        nbrs = sorted(set(range(j * width, (j + 1) * width)) | {((j + 1) * width) % n})
        entries[VertexType(tuple(nbrs))] = width
    return TypeProfile(entries=entries, n=n)


SMALL_CFG = EstimatorConfig(n=200, epsilon=0.5, delta_prime=0.1, c_sample=0.1)


class TestSwitchThreshold:
    def test_reference_value(self) -> None:
        assert switch_threshold(1000, 1000, 0.696) == pytest.approx(
            0.358490566037736, abs=1e-12
        )

    def test_scales_with_predicted_optimum(self) -> None:
        full = switch_threshold(1000, 1000, DEFAULT_BETA)
        assert switch_threshold(500, 1000, DEFAULT_BETA) == pytest.approx(full / 2)

    def test_zero_predicted_optimum(self) -> None:
        assert switch_threshold(0, 10, DEFAULT_BETA) == 0.0

    @pytest.mark.parametrize(
        "n_hat,n,beta",
        [(-1, 10, 0.5), (11, 10, 0.5), (5, 0, 0.5), (5, 10, 0.0), (5, 10, 1.0)],
    )
    def test_rejects(self, n_hat: int, n: int, beta: float) -> None:
        with pytest.raises(ValidationError):
            switch_threshold(n_hat, n, beta)


class TestDefaultEpsilon:
    def test_capped_at_five_percent(self) -> None:
        assert default_epsilon(0.5) == pytest.approx(0.05)
        assert default_epsilon(1.0) == pytest.approx(0.05)

    def test_small_alpha_shrinks(self) -> None:
        assert default_epsilon(0.1) == pytest.approx(0.1 * 0.304 / 1.696)

    def test_below_switch_margin(self) -> None:
        # the accuracy must leave the threshold test decidable
        for alpha in (0.1, 0.3, 0.5, 0.9):
            eps = default_epsilon(alpha)
            assert 0 < eps < switch_threshold(1000, 1000, DEFAULT_BETA)


class TestMimic:
    def test_follows_plan_in_type_order(self) -> None:
        advice = profile({(0, 1): 2}, n=2)
        m = Mimic(advice, maximum_matching(advice, 2))
        first = m.step(VertexType((0, 1)))
        second = m.step(VertexType((0, 1)))
        assert {first, second} == {0, 1}
        assert m.matches == 2
        assert m.used_offline == {0, 1}

    def test_extra_copies_skipped(self) -> None:
        advice = profile({(0,): 1}, n=1)
        m = Mimic(advice, maximum_matching(advice, 1))
        assert m.step(VertexType((0,))) == 0
        assert m.step(VertexType((0,))) is None
        assert m.matches == 1

    def test_unplanned_copies_skipped(self) -> None:
        # both copies share one neighbor, so the plan covers only one
        advice = profile({(0,): 2}, n=2)
        m = Mimic(advice, maximum_matching(advice, 2))
        assert m.step(VertexType((0,))) == 0
        assert m.step(VertexType((0,))) is None

    def test_unpredicted_types_skipped(self) -> None:
        advice = profile({(0, 1): 2}, n=2)
        m = Mimic(advice, maximum_matching(advice, 2))
        assert m.step(VertexType((0,))) is None
        assert m.step(VertexType(())) is None
        assert m.matches == 0


class TestRanking:
    def test_excluded_never_matched(self) -> None:
        t = VertexType((0, 1, 2, 3))
        for seed in range(20):
            r = Ranking(4, np.random.default_rng(seed), excluded={0, 1})
            picks = [r.step(t) for _ in range(4)]
            assert set(p for p in picks if p is not None) == {2, 3}

    def test_all_excluded_matches_nothing(self) -> None:
        r = Ranking(2, np.random.default_rng(0), excluded={0, 1})
        assert r.step(VertexType((0, 1))) is None

    def test_empty_type_skipped(self) -> None:
        r = Ranking(3, np.random.default_rng(0))
        assert r.step(VertexType(())) is None
        assert r.matches == 0

    def test_uses_every_seedable_choice(self) -> None:
        # over many seeds a two-neighbor arrival gets both offline vertices
        firsts = {
            Ranking(2, np.random.default_rng(s)).step(VertexType((0, 1)))
            for s in range(30)
        }
        assert firsts == {0, 1}

    def test_maximality_on_random_instances(self) -> None:
        gen = np.random.default_rng(5)
        for _ in range(30):
            n = int(gen.integers(2, 9))
            entries: dict[VertexType, int] = {}
            remaining = n
            while remaining:
                size = int(gen.integers(0, n + 1))
                t = VertexType.of(gen.choice(n, size=size, replace=False).tolist())
                take = int(gen.integers(1, remaining + 1))
                entries[t] = entries.get(t, 0) + take
                remaining -= take
            inst = Instance(n=n, truth=TypeProfile(entries=entries, n=n))
            perm = gen.permutation(n)
            result = run_online(Ranking(n, np.random.default_rng(int(gen.integers(2**32)))), inst, perm)
            arrivals = inst.arrivals()
            used = {d for d in result.decisions if d is not None}
            for pos, d in zip(perm, result.decisions):
                if d is None:
                    assert set(arrivals[int(pos)].neighbors) <= used

    def test_triangular_baseline_sanity(self) -> None:
        # random-order competitive ratio on the hardest classical structure
        n = 500
        truth = TypeProfile(
            entries={VertexType(tuple(range(j + 1))): 1 for j in range(n)}, n=n
        )
        inst = Instance(n=n, truth=truth)
        gen = np.random.default_rng(2024)
        ratios = []
        for _ in range(200):
            r = run_online(Ranking(n, gen), inst, gen.permutation(n))
            ratios.append(r.matches / n)
        mean = float(np.mean(ratios))
        assert 0.63 <= mean <= 1.0
        assert min(ratios) > 0.5


class TestGreedy:
    def test_lowest_free_neighbor(self) -> None:
        g = Greedy(3)
        assert g.step(VertexType((1, 2))) == 1
        assert g.step(VertexType((1, 2))) == 2
        assert g.step(VertexType((1, 2))) is None

    def test_at_least_half_of_optimum(self) -> None:
        gen = np.random.default_rng(9)
        for _ in range(25):
            n = int(gen.integers(2, 8))
            entries: dict[VertexType, int] = {}
            remaining = n
            while remaining:
                size = int(gen.integers(0, n + 1))
                t = VertexType.of(gen.choice(n, size=size, replace=False).tolist())
                take = int(gen.integers(1, remaining + 1))
                entries[t] = entries.get(t, 0) + take
                remaining -= take
            inst = Instance(n=n, truth=TypeProfile(entries=entries, n=n))
            result = run_online(Greedy(n), inst, gen.permutation(n))
            assert 2 * result.matches >= inst.opt_size


class TestReplacementSampler:
    def test_first_offer_always_consumes(self) -> None:
        s = ReplacementSampler(10, 5, np.random.default_rng(0))
        assert s.offer(VertexType((0,))) is True
        assert s.consumed == 1 and s.drawn == 1

    def test_every_flip_advances_the_sample(self) -> None:
        s = ReplacementSampler(20, 10, np.random.default_rng(1))
        arrivals = iter(expand_profile(profile({(0,): 12, (1,): 8}, n=20)))
        while not s.complete:
            s.offer(next(arrivals))
        assert s.drawn == 10
        assert sum(s.counts.values()) == 10
        assert s.consumed <= 10

    def test_full_sample_refuses_input(self) -> None:
        s = ReplacementSampler(10, 1, np.random.default_rng(2))
        assert s.offer(VertexType((0,))) is True
        assert s.offer(VertexType((1,))) is False
        assert s.consumed == 1

    def test_fill_from_seen_completes(self) -> None:
        s = ReplacementSampler(10, 50, np.random.default_rng(3))
        for t in [VertexType((0,)), VertexType((1,)), VertexType((2,))]:
            s.offer(t)
        s.fill_from_seen()
        assert s.drawn == 50
        assert sum(s.counts.values()) == 50
        assert set(s.counts) <= set(s.seen)

    def test_fill_with_empty_store_rejected(self) -> None:
        s = ReplacementSampler(10, 5, np.random.default_rng(4))
        with pytest.raises(ValidationError):
            s.fill_from_seen()

    def test_deterministic_per_seed(self) -> None:
        arrivals = expand_profile(profile({(0,): 12, (1,): 8}, n=20))

        def run(seed: int):
            s = ReplacementSampler(20, 10, np.random.default_rng(seed))
            it = iter(arrivals)
            while not s.complete:
                s.offer(next(it))
            return dict(s.counts), list(s.seen)

        assert run(7) == run(7)

    @pytest.mark.parametrize("n,target", [(0, 1), (5, -1)])
    def test_rejects(self, n: int, target: int) -> None:
        with pytest.raises(ValidationError):
            ReplacementSampler(n, target, np.random.default_rng(0))

    def test_marginal_frequencies(self) -> None:
        # each sample slot is marginally a uniform draw from the sequence
        truth = profile({(0,): 12, (1,): 8}, n=20)
        arrivals = expand_profile(truth)
        target, runs = 10, 2000
        gen = np.random.default_rng(0)
        freq_a = []
        for _ in range(runs):
            perm = gen.permutation(20)
            s = ReplacementSampler(20, target, gen)
            it = (arrivals[int(i)] for i in perm)
            while not s.complete:
                s.offer(next(it))
            freq_a.append(s.counts[VertexType((0,))] / target)
        q = 12 / 20
        se = (q * (1 - q) / (target * runs)) ** 0.5
        assert abs(float(np.mean(freq_a)) - q) <= 4 * se


class TestTestAndMatchConstruction:
    def test_validation(self) -> None:
        advice = block_profile(5, 40)
        cfg = SMALL_CFG
        with pytest.raises(ValidationError):
            TestAndMatch(advice, 100, 0.5, cfg)
        with pytest.raises(ValidationError):
            TestAndMatch(advice, 200, 0.0, cfg)
        with pytest.raises(ValidationError):
            TestAndMatch(advice, 200, 1.5, cfg)
        with pytest.raises(ValidationError):
            TestAndMatch(advice, 200, 0.5, cfg, beta=1.0)
        with pytest.raises(ValidationError):
            TestAndMatch(
                advice, 200, 0.5, EstimatorConfig(n=99, epsilon=0.5, delta_prime=0.1)
            )

    def test_branch_undefined_while_sampling(self) -> None:
        tam = TestAndMatch(block_profile(5, 40), 200, 0.5, SMALL_CFG, rng=0)
        with pytest.raises(ValidationError):
            tam.branch

    def test_first_arrival_is_consumed(self) -> None:
        tam = TestAndMatch(block_profile(5, 40), 200, 0.5, SMALL_CFG, rng=0)
        tam.step(VertexType(tuple(range(40))))
        assert tam.k_prime == 1


class TestTestAndMatchBranches:
    def test_weak_advice_goes_to_whole_input_baseline(self) -> None:
        truth = block_profile(5, 10)
        advice = profile({(): 49, (0,): 1}, n=50)
        cfg = EstimatorConfig(n=50, epsilon=0.5, delta_prime=0.1, c_sample=0.1)
        tam = TestAndMatch(advice, 50, 0.5, cfg, rng=1)
        result = run_online(tam, Instance(n=50, truth=truth), np.random.default_rng(2).permutation(50))
        assert result.branch == "BaselineWhole"
        assert tam.reason == "advice_below_alpha"
        assert result.matches == 50
        assert result.k == 0 and result.k_prime == 0
        assert result.l1_hat is None
        assert "s1" not in tam.decision_log

    def test_overflow_discards_the_sample(self, monkeypatch) -> None:
        def fake_draw(config, rng):
            return SampleOutcome(
                s1=10**6, s2=0, limit=sample_size_limit(config), overflowed=True
            )

        monkeypatch.setattr(augmatch.online, "draw_sample_size", fake_draw)
        truth = block_profile(5, 10)
        cfg = EstimatorConfig(n=50, epsilon=0.5, delta_prime=0.1, c_sample=0.1)
        tam = TestAndMatch(truth, 50, 0.5, cfg, rng=1)
        result = run_online(tam, Instance(n=50, truth=truth), np.random.default_rng(2).permutation(50))
        assert result.branch == "BaselineWhole"
        assert tam.reason == "sample_overflow"
        assert result.k == 10**6
        assert result.matches == 50

    def test_zero_size_draw_discarded(self, monkeypatch) -> None:
        def fake_draw(config, rng):
            return SampleOutcome(
                s1=0, s2=0, limit=sample_size_limit(config), overflowed=False
            )

        monkeypatch.setattr(augmatch.online, "draw_sample_size", fake_draw)
        truth = block_profile(5, 10)
        cfg = EstimatorConfig(n=50, epsilon=0.5, delta_prime=0.1, c_sample=0.1)
        tam = TestAndMatch(truth, 50, 0.5, cfg, rng=1)
        assert tam.phase is augmatch.online.Phase.BASELINE_WHOLE
        assert tam.reason == "empty_sample"

    def test_good_advice_switches_to_mimic_mid_input(self) -> None:
        truth = block_profile(5, 40)
        inst = Instance(n=200, truth=truth)
        tam = TestAndMatch(truth, 200, 0.5, SMALL_CFG, beta=0.2, rng=11)
        tau = switch_threshold(200, 200, 0.2)
        result = run_online(tam, inst, np.random.default_rng(12).permutation(200))
        assert result.branch == "MimicRest"
        assert tam.reason == "estimate_within_threshold"
        assert 0 < result.k_prime <= result.k < 200
        assert result.l1_hat is not None
        assert result.l1_hat <= tau - SMALL_CFG.epsilon
        # perfect advice: the follower matches every single arrival
        assert result.matches == 200
        assert all(d is not None for d in result.decisions)

    def test_bad_advice_switches_to_baseline_mid_input(self) -> None:
        truth = block_profile(5, 40)
        advice = shifted_block_profile(5, 40)
        assert set(advice.support).isdisjoint(truth.support)
        inst = Instance(n=200, truth=truth)
        tam = TestAndMatch(advice, 200, 0.5, SMALL_CFG, rng=21)
        result = run_online(tam, inst, np.random.default_rng(22).permutation(200))
        assert result.branch == "BaselineRest"
        assert tam.reason == "estimate_above_threshold"
        # every sampled arrival is unpredicted, so the estimate is exact
        assert result.l1_hat == pytest.approx(2.0)
        assert 0 < result.k_prime < 200
        # the follower matched nothing; the baseline clears each block
        assert result.matches == 200 - result.k_prime

    def test_partial_overlap_excludes_used_vertices(self) -> None:
        blocks, width = 5, 40
        truth = block_profile(blocks, width)
        shifted = shifted_block_profile(blocks, width)
        entries = dict(list(truth.entries.items())[:3] + list(shifted.entries.items())[3:])
        advice = TypeProfile(entries=entries, n=200)
        tam = TestAndMatch(advice, 200, 0.5, SMALL_CFG, rng=31)
        # the run itself validates that the fresh baseline never reuses an
        # offline vertex taken during the sampling phase
        result = run_online(
            tam, Instance(n=200, truth=truth), np.random.default_rng(32).permutation(200)
        )
        assert result.branch == "BaselineRest"
        assert 200 - result.k_prime <= result.matches <= 200
        assert 0.0 <= result.l1_hat <= 2.0

    def test_short_input_is_estimated_from_the_store(self) -> None:
        truth = block_profile(5, 10)
        advice = shifted_block_profile(5, 10)
        cfg = EstimatorConfig(n=50, epsilon=0.05, delta_prime=0.1, c_sample=4.0)
        tam = TestAndMatch(advice, 50, 0.5, cfg, rng=41)
        result = run_online(tam, Instance(n=50, truth=truth), np.random.default_rng(42).permutation(50))
        # the scheduled sample dwarfs the input: everything is consumed and
        # the estimate is computed from the completed store
        assert result.k_prime == 50
        assert result.branch == "BaselineRest"
        assert result.l1_hat == pytest.approx(2.0)
        assert result.matches == 0
        assert all(d is None for d in result.decisions)


class TestRunPlumbing:
    def test_result_json_schema(self) -> None:
        truth = block_profile(5, 40)
        tam = TestAndMatch(truth, 200, 0.5, SMALL_CFG, rng=51)
        result = run_online(
            tam, Instance(n=200, truth=truth), np.random.default_rng(52).permutation(200), seed=99
        )
        d = result.to_json_dict()
        assert list(d) == ["branch", "matches", "k", "k_prime", "l1_hat", "seed"]
        assert d["seed"] == 99

    def test_deterministic_replay(self) -> None:
        truth = block_profile(5, 40)
        inst = Instance(n=200, truth=truth)
        perm = np.random.default_rng(62).permutation(200)

        def go():
            tam = TestAndMatch(truth, 200, 0.5, SMALL_CFG, rng=np.random.default_rng(61))
            return run_online(tam, inst, perm, seed=7)

        assert go() == go()

    def test_bad_permutations_rejected(self) -> None:
        truth = block_profile(2, 2)
        inst = Instance(n=4, truth=truth)
        with pytest.raises(ValidationError):
            run_online(Greedy(4), inst, [0, 1, 2])
        with pytest.raises(ValidationError):
            run_online(Greedy(4), inst, [0, 1, 2, 2])

    def test_illegal_decisions_rejected(self) -> None:
        inst = Instance(n=2, truth=profile({(0, 1): 2}, n=2))

        class Cheater:
            def step(self, arrival: VertexType) -> int:
                return 5

        class Repeater:
            def step(self, arrival: VertexType) -> int:
                return 0

        with pytest.raises(ValidationError):
            run_online(Cheater(), inst, [0, 1])
        with pytest.raises(ValidationError):
            run_online(Repeater(), inst, [0, 1])

    def test_plain_algorithms_report_class_name(self) -> None:
        inst = Instance(n=2, truth=profile({(0, 1): 2}, n=2))
        result = run_online(Greedy(2), inst, [0, 1])
        assert result.branch == "Greedy"
        assert result.matches == 2
        assert result.k == 0 and result.l1_hat is None
