"""Experiment harness: instance families, seeded trials, and aggregation.

A trial is one full run: perturb the truth into advice at a target distance,
draw an arrival order, drive the advice-tested matcher over it, and record
what happened alongside two shadow runs (the advice follower on the whole
input, and the baseline alone) used for deterministic bound checks and
comparative reporting.

Every trial is seeded from (experiment seed, cell index, trial index), so
any row of any CSV can be replayed bit for bit.  The harness emits CSV only;
figure rendering lives in the report module, driven by the CLI.
"""

from __future__ import annotations

import csv
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .errors import InvariantViolation, ValidationError
from .estimator import EstimatorConfig, as_generator, default_delta_prime
from .graph import Instance, TypeProfile, VertexType, maximum_matching
from .online import (
    DEFAULT_BETA,
    Mimic,
    Ranking,
    TestAndMatch,
    default_epsilon,
    run_online,
    switch_threshold,
)
from .predictions import l1_counts, perturb

TRIAL_CSV_HEADER = (
    "seed,branch,matches,n_star,n_hat,l1_true,l1_hat,k,k_prime,ratio"
)
SUMMARY_CSV_HEADER = (
    "l1,mean_ratio,std_err,bound,mimic_rest_freq,baseline_rest_freq,"
    "baseline_whole_freq,trials"
)

# Seed-stream tags: the instance and the trials draw from disjoint
# SeedSequence entropy tuples under the one experiment seed.
_INSTANCE_STREAM = 1
_TRIAL_STREAM = 2


def random_small_profile(
    rng: np.random.Generator, max_n: int = 7
) -> TypeProfile:
    """A random toy profile, sized for the exhaustive matching oracle.

    Draws n in [1, max_n], a set of distinct random types over offline
    vertices [0, n), and splits the n online vertices among them with every
    type getting at least one.
    """
    if not 1 <= max_n <= 10:
        raise ValidationError("max_n must lie in [1, 10]")
    n = int(rng.integers(1, max_n + 1))
    r = int(rng.integers(1, n + 1))
    types: set[VertexType] = set()
    while len(types) < r:
        size = int(rng.integers(0, n + 1))
        picks = rng.choice(n, size=size, replace=False).tolist() if size else []
        types.add(VertexType(tuple(sorted(picks))))
    ordered = sorted(types)
    extra = rng.multinomial(n - r, [1.0 / r] * r)
    entries = {t: 1 + int(extra[i]) for i, t in enumerate(ordered)}
    return TypeProfile(entries=entries, n=n)


def generate_instance(
    family: str,
    n: int,
    params: Mapping[str, float] | None = None,
    rng: np.random.Generator | int | None = None,
) -> Instance:
    """Build a seeded instance from a named family.

    perfect    a perfect matching hidden under extra random edges; optimum n.
    isolated   round(rho * n) matched pairs plus isolated online vertices;
               optimum exactly round(rho * n).  param rho, default 0.5.
    triangular online vertex j adjacent to offline 0..j; optimum n, and a
               known hard case for priority-based baselines.
    """
    if n < 1:
        raise ValidationError("n must be >= 1")
    params = dict(params or {})
    gen = as_generator(rng)
    if family == "perfect":
        entries: dict[VertexType, int] = {}
        for j in range(n):
            extras = int(gen.integers(1, 3))
            picks = set(gen.choice(n, size=extras, replace=False).tolist())
            picks.add(j)
            t = VertexType(tuple(sorted(picks)))
            entries[t] = entries.get(t, 0) + 1
        return Instance(n=n, truth=TypeProfile(entries=entries, n=n))
    if family == "isolated":
        rho = float(params.get("rho", 0.5))
        if not 0 < rho <= 1:
            raise ValidationError(f"rho must lie in (0, 1], got {rho}")
        m = round(rho * n)
        entries = {}
        for j in range(m):
            picks = {j}
            if n > 1 and gen.random() < 0.5:
                picks.add(int(gen.integers(n)))
            t = VertexType(tuple(sorted(picks)))
            entries[t] = entries.get(t, 0) + 1
        if n - m:
            empty = VertexType(())
            entries[empty] = entries.get(empty, 0) + (n - m)
        return Instance(n=n, truth=TypeProfile(entries=entries, n=n))
    if family == "triangular":
        entries = {
            VertexType(tuple(range(j + 1))): 1 for j in range(n)
        }
        return Instance(n=n, truth=TypeProfile(entries=entries, n=n))
    raise ValidationError(f"unknown instance family {family!r}")


@dataclass(frozen=True)
class ExperimentSpec:
    """Everything needed to reproduce an experiment, JSON-serializable."""

    family: str
    n: int
    alpha: float
    l1_grid: tuple[float, ...]
    trials: int
    seed: int
    beta: float = DEFAULT_BETA
    epsilon: float | None = None
    delta_prime: float | None = None
    c_sample: float = 4.0
    family_params: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "l1_grid", tuple(float(x) for x in self.l1_grid))
        object.__setattr__(self, "family_params", dict(self.family_params))
        if self.n < 1:
            raise ValidationError("n must be >= 1")
        if self.trials < 1:
            raise ValidationError(f"trials must be >= 1, got {self.trials}")
        if not 0 < self.alpha <= 1:
            raise ValidationError(f"alpha must lie in (0, 1], got {self.alpha}")
        if not 0 < self.beta < 1:
            raise ValidationError(f"beta must lie in (0, 1), got {self.beta}")
        if not self.l1_grid:
            raise ValidationError("l1_grid must not be empty")
        for x in self.l1_grid:
            if not 0 <= x <= 2:
                raise ValidationError(f"grid value {x} outside [0, 2]")
        if self.epsilon is not None and not self.epsilon > 0:
            raise ValidationError("epsilon must be positive when given")
        if self.delta_prime is not None and not 0 < self.delta_prime < 1:
            raise ValidationError("delta_prime must lie in (0, 1) when given")
        if not self.c_sample > 0:
            raise ValidationError("c_sample must be positive")

    def resolved_epsilon(self) -> float:
        if self.epsilon is not None:
            return self.epsilon
        return default_epsilon(self.alpha, self.beta)

    def resolved_delta_prime(self) -> float:
        if self.delta_prime is not None:
            return self.delta_prime
        return default_delta_prime(self.n)

    def estimator_config(self) -> EstimatorConfig:
        return EstimatorConfig(
            n=self.n,
            epsilon=self.resolved_epsilon(),
            delta_prime=self.resolved_delta_prime(),
            c_sample=self.c_sample,
        )

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "family_params": dict(self.family_params),
            "n": self.n,
            "alpha": self.alpha,
            "beta": self.beta,
            "epsilon": self.epsilon,
            "delta_prime": self.delta_prime,
            "c_sample": self.c_sample,
            "l1_grid": list(self.l1_grid),
            "trials": self.trials,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "ExperimentSpec":
        try:
            return cls(
                family=str(data["family"]),
                n=int(data["n"]),
                alpha=float(data["alpha"]),
                l1_grid=tuple(float(x) for x in data["l1_grid"]),
                trials=int(data["trials"]),
                seed=int(data["seed"]),
                beta=float(data.get("beta", DEFAULT_BETA)),
                epsilon=(
                    None if data.get("epsilon") is None else float(data["epsilon"])
                ),
                delta_prime=(
                    None
                    if data.get("delta_prime") is None
                    else float(data["delta_prime"])
                ),
                c_sample=float(data.get("c_sample", 4.0)),
                family_params=dict(data.get("family_params", {})),
            )
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ValidationError):
                raise
            raise ValidationError(f"malformed experiment spec: {exc}") from exc

    @classmethod
    def from_json_file(cls, path: "str | Path") -> "ExperimentSpec":
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ValidationError(f"cannot read experiment spec {path}: {exc}") from exc
        return cls.from_dict(data)


@dataclass(frozen=True)
class TrialRecord:
    """One trial, with the two deterministic bound checks already applied.

    mimic_bound_ok: the advice follower, run on the whole input, matched at
    least n_hat - l1_counts / 2 vertices.  opt_bound_ok: the offline optimum
    is at most n_hat + l1_counts / 2.  Both are hard assertions upstream, so
    surviving records always carry True; the fields exist so the CSV layer
    and tests do not have to re-derive them.
    """

    seed: int
    branch: str
    matches: int
    n_star: int
    n_hat: int
    l1_true: float
    l1_hat: float | None
    k: int
    k_prime: int
    ratio: float | None
    mimic_bound_ok: bool
    opt_bound_ok: bool
    mimic_whole_matches: int
    baseline_matches: int

    def to_json_dict(self) -> dict:
        return {
            "seed": self.seed,
            "branch": self.branch,
            "matches": self.matches,
            "n_star": self.n_star,
            "n_hat": self.n_hat,
            "l1_true": self.l1_true,
            "l1_hat": self.l1_hat,
            "k": self.k,
            "k_prime": self.k_prime,
            "ratio": self.ratio,
        }


def _fmt(value: "float | int | None") -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, int):
        return str(value)
    return format(float(value), ".12g")


def counts_target(n: int, l1_value: float) -> int:
    """Nearest achievable even count distance for a requested L1 value."""
    if not 0 <= l1_value <= 2:
        raise ValidationError(f"l1 target {l1_value} outside [0, 2]")
    return min(2 * n, 2 * round(l1_value * n / 2.0))


def trial_seed_sequence(
    base_seed: int, cell_index: int, trial_index: int
) -> np.random.SeedSequence:
    return np.random.SeedSequence(
        entropy=(base_seed, _TRIAL_STREAM, cell_index, trial_index)
    )


def instance_rng(base_seed: int) -> np.random.Generator:
    return np.random.default_rng(
        np.random.SeedSequence(entropy=(base_seed, _INSTANCE_STREAM))
    )


def run_trial(
    spec: ExperimentSpec,
    instance: Instance,
    cell_index: int,
    l1_value: float,
    trial_index: int,
) -> TrialRecord:
    """Run one seeded trial of the cell at the given target distance."""
    n = spec.n
    ss = trial_seed_sequence(spec.seed, cell_index, trial_index)
    rec_seed = int(ss.generate_state(1)[0])
    advice_ss, perm_ss, algo_ss, base_ss = ss.spawn(4)

    target = counts_target(n, l1_value)
    advice = perturb(instance.truth, target, np.random.default_rng(advice_ss))
    achieved = l1_counts(instance.truth, advice)
    if achieved != target:
        raise InvariantViolation(
            f"perturb missed its target at seed {rec_seed}: "
            f"{achieved} != {target}"
        )

    perm = np.random.default_rng(perm_ss).permutation(n)
    matcher = TestAndMatch(
        advice,
        n,
        spec.alpha,
        spec.estimator_config(),
        beta=spec.beta,
        rng=np.random.default_rng(algo_ss),
    )
    result = run_online(matcher, instance, perm, seed=rec_seed)
    n_hat = matcher.n_hat
    n_star = instance.opt_size

    follower = Mimic(advice, matcher.plan)
    whole = run_online(follower, instance, perm)
    floor = n_hat - achieved // 2
    mimic_ok = whole.matches >= floor
    if not mimic_ok:
        raise InvariantViolation(
            f"advice-follower floor violated at seed {rec_seed} "
            f"(cell {cell_index}, trial {trial_index}): "
            f"{whole.matches} < {n_hat} - {achieved}/2"
        )
    opt_ok = n_star <= n_hat + achieved // 2
    if not opt_ok:
        raise InvariantViolation(
            f"optimum ceiling violated at seed {rec_seed} "
            f"(cell {cell_index}, trial {trial_index}): "
            f"{n_star} > {n_hat} + {achieved}/2"
        )

    baseline = Ranking(n, np.random.default_rng(base_ss))
    base_run = run_online(baseline, instance, perm)

    ratio = result.matches / n_star if n_star > 0 else None
    return TrialRecord(
        seed=rec_seed,
        branch=result.branch,
        matches=result.matches,
        n_star=n_star,
        n_hat=n_hat,
        l1_true=target / n,
        l1_hat=result.l1_hat,
        k=result.k,
        k_prime=result.k_prime,
        ratio=ratio,
        mimic_bound_ok=mimic_ok,
        opt_bound_ok=opt_ok,
        mimic_whole_matches=whole.matches,
        baseline_matches=base_run.matches,
    )


def smoothness_bound(alpha: float, l1: float) -> float:
    """Guaranteed fraction of the optimum when the advice is followed:
    1 - 2 L1 / (2 alpha + L1)."""
    if not 0 < alpha <= 1:
        raise ValidationError(f"alpha must lie in (0, 1], got {alpha}")
    if l1 < 0:
        raise ValidationError("l1 must be nonnegative")
    return 1.0 - 2.0 * l1 / (2.0 * alpha + l1)


@dataclass(frozen=True)
class CellSummary:
    l1_target: float
    l1_achieved: float
    trials: int
    mean_ratio: float | None
    std_err: float | None
    bound: float
    branch_freq: Mapping[str, float]
    n_star_zero_trials: int
    mean_baseline_ratio: float | None

    def __post_init__(self) -> None:
        object.__setattr__(self, "branch_freq", dict(self.branch_freq))
        total = sum(self.branch_freq.values())
        if self.trials and abs(total - 1.0) > 1e-9:
            raise ValidationError(f"branch frequencies sum to {total}, not 1")

    def freq(self, branch: str) -> float:
        return self.branch_freq.get(branch, 0.0)


def summarize_cell(
    spec: ExperimentSpec, l1_value: float, records: Sequence[TrialRecord]
) -> CellSummary:
    ratios = [r.ratio for r in records if r.ratio is not None]
    zero = sum(1 for r in records if r.ratio is None)
    mean_ratio = float(np.mean(ratios)) if ratios else None
    if len(ratios) > 1:
        std_err = float(np.std(ratios, ddof=1) / np.sqrt(len(ratios)))
    else:
        std_err = None
    freq: dict[str, float] = {}
    for r in records:
        freq[r.branch] = freq.get(r.branch, 0.0) + 1.0
    for key in freq:
        freq[key] /= len(records)
    base = [
        r.baseline_matches / r.n_star for r in records if r.n_star > 0
    ]
    achieved = records[0].l1_true if records else counts_target(
        spec.n, l1_value
    ) / spec.n
    return CellSummary(
        l1_target=l1_value,
        l1_achieved=achieved,
        trials=len(records),
        mean_ratio=mean_ratio,
        std_err=std_err,
        bound=smoothness_bound(spec.alpha, achieved),
        branch_freq=freq,
        n_star_zero_trials=zero,
        mean_baseline_ratio=float(np.mean(base)) if base else None,
    )


@dataclass(frozen=True)
class CellResult:
    l1_target: float
    summary: CellSummary
    records: tuple[TrialRecord, ...]


@dataclass(frozen=True)
class ExperimentResult:
    spec: ExperimentSpec
    cells: tuple[CellResult, ...]

    def all_records(self) -> list[TrialRecord]:
        out: list[TrialRecord] = []
        for cell in self.cells:
            out.extend(cell.records)
        return out


_WORKER_CTX: "tuple[ExperimentSpec, Instance] | None" = None


def _init_worker(spec: ExperimentSpec, instance: Instance) -> None:
    global _WORKER_CTX
    _WORKER_CTX = (spec, instance)


def _worker_trial(task: tuple[int, float, int]) -> TrialRecord:
    assert _WORKER_CTX is not None
    spec, instance = _WORKER_CTX
    cell_index, l1_value, trial_index = task
    return run_trial(spec, instance, cell_index, l1_value, trial_index)


def run_experiment(
    spec: ExperimentSpec, jobs: int = 1, instance: Instance | None = None
) -> ExperimentResult:
    """Run every cell of the grid; deterministic for a fixed spec.

    ``jobs`` > 1 fans trials out to worker processes.  Each trial derives
    its own randomness from (seed, cell, trial), so scheduling order cannot
    change any result; records are reassembled in trial order either way.
    """
    if jobs < 1:
        raise ValidationError("jobs must be >= 1")
    if instance is None:
        instance = generate_instance(
            spec.family, spec.n, spec.family_params, instance_rng(spec.seed)
        )
    instance.opt_size  # compute once, before any fan-out
    tasks = [
        (ci, l1, ti)
        for ci, l1 in enumerate(spec.l1_grid)
        for ti in range(spec.trials)
    ]
    if jobs == 1:
        records = [_run_trial_task(spec, instance, t) for t in tasks]
    else:
        chunk = max(1, len(tasks) // (4 * jobs))
        with ProcessPoolExecutor(
            max_workers=jobs, initializer=_init_worker, initargs=(spec, instance)
        ) as pool:
            records = list(pool.map(_worker_trial, tasks, chunksize=chunk))
    cells = []
    for ci, l1 in enumerate(spec.l1_grid):
        cell_records = tuple(
            records[ci * spec.trials + ti] for ti in range(spec.trials)
        )
        cells.append(
            CellResult(
                l1_target=l1,
                summary=summarize_cell(spec, l1, cell_records),
                records=cell_records,
            )
        )
    return ExperimentResult(spec=spec, cells=tuple(cells))


def _run_trial_task(
    spec: ExperimentSpec, instance: Instance, task: tuple[int, float, int]
) -> TrialRecord:
    cell_index, l1_value, trial_index = task
    return run_trial(spec, instance, cell_index, l1_value, trial_index)


def run_cell(
    spec: ExperimentSpec, cell_index: int, jobs: int = 1
) -> CellResult:
    """Run a single grid cell of the spec."""
    if not 0 <= cell_index < len(spec.l1_grid):
        raise ValidationError(f"cell index {cell_index} outside the grid")
    narrowed = replace(spec, l1_grid=(spec.l1_grid[cell_index],))
    instance = generate_instance(
        spec.family, spec.n, spec.family_params, instance_rng(spec.seed)
    )
    # preserve the cell's identity in the seed scheme
    tasks = [(cell_index, spec.l1_grid[cell_index], ti) for ti in range(spec.trials)]
    instance.opt_size
    if jobs == 1:
        records = [_run_trial_task(spec, instance, t) for t in tasks]
    else:
        chunk = max(1, len(tasks) // (4 * jobs))
        with ProcessPoolExecutor(
            max_workers=jobs, initializer=_init_worker, initargs=(spec, instance)
        ) as pool:
            records = list(pool.map(_worker_trial, tasks, chunksize=chunk))
    cell_records = tuple(records)
    return CellResult(
        l1_target=narrowed.l1_grid[0],
        summary=summarize_cell(spec, narrowed.l1_grid[0], cell_records),
        records=cell_records,
    )


def write_trials_csv(result: ExperimentResult, path: "str | Path") -> Path:
    """One row per trial, fixed ten-column header, bitwise reproducible."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TRIAL_CSV_HEADER.split(","))
        for record in result.all_records():
            writer.writerow(
                [
                    _fmt(record.seed),
                    record.branch,
                    _fmt(record.matches),
                    _fmt(record.n_star),
                    _fmt(record.n_hat),
                    _fmt(record.l1_true),
                    _fmt(record.l1_hat),
                    _fmt(record.k),
                    _fmt(record.k_prime),
                    _fmt(record.ratio),
                ]
            )
    return path


def write_summary_csv(result: ExperimentResult, path: "str | Path") -> Path:
    """One row per grid cell."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SUMMARY_CSV_HEADER.split(","))
        for cell in result.cells:
            s = cell.summary
            writer.writerow(
                [
                    _fmt(s.l1_achieved),
                    _fmt(s.mean_ratio),
                    _fmt(s.std_err),
                    _fmt(s.bound),
                    _fmt(s.freq("MimicRest")),
                    _fmt(s.freq("BaselineRest")),
                    _fmt(s.freq("BaselineWhole")),
                    _fmt(s.trials),
                ]
            )
    return path


def smoothness_curve(
    spec: ExperimentSpec, jobs: int = 1
) -> tuple[list[tuple[float, float, float]], ExperimentResult]:
    """Mean ratio against the guarantee along the error grid.

    The grid must stay below the region where the switch rule stops
    following the advice: every point must be at most
    2 (1 - beta) / (1 + beta) - 2 epsilon.
    """
    ceiling = switch_threshold(spec.n, spec.n, spec.beta) - 2 * spec.resolved_epsilon()
    for x in spec.l1_grid:
        if x > ceiling + 1e-12:
            raise ValidationError(
                f"grid value {x} above the advice-following region "
                f"(limit {ceiling:.6g})"
            )
    result = run_experiment(spec, jobs=jobs)
    rows = []
    for cell in result.cells:
        s = cell.summary
        if s.mean_ratio is None:
            raise InvariantViolation(
                f"cell at l1={s.l1_target} produced no defined ratios"
            )
        rows.append((s.l1_achieved, s.mean_ratio, s.bound))
    return rows, result


@dataclass(frozen=True)
class ConcentrationReport:
    """How much of the optimum survives the sampling phase."""

    sample_target: int
    trials: int
    n_star: int
    mean_remaining: float
    frequencies: Mapping[float, float]

    def __post_init__(self) -> None:
        object.__setattr__(self, "frequencies", dict(self.frequencies))


def remaining_opt_concentration(
    instance: Instance,
    sample_target: int,
    trials: int,
    seed: int,
    slacks: Sequence[float] = (0.02, 0.05),
) -> ConcentrationReport:
    """Measure the optimum left among arrivals the sampler never consumed.

    Fixes one maximum matching of the truth, then repeatedly: draw a random
    arrival order, run the with-replacement sampler to ``sample_target``
    draws, and count how many vertices matched under the fixed optimum lie
    in the unconsumed remainder.  Reports, for each slack, how often that
    count reaches (n - sample_target)/n * n_star - slack * n_star.
    """
    from .online import ReplacementSampler

    if sample_target < 1:
        raise ValidationError("sample_target must be >= 1")
    if trials < 1:
        raise ValidationError("trials must be >= 1")
    n = instance.n
    plan = maximum_matching(instance.truth, n)
    n_star = plan.size
    arrivals = instance.arrivals()
    flags = np.zeros(n, dtype=bool)
    i = 0
    for t, c in instance.truth.items_sorted():
        matched = len(plan.partners(t))
        flags[i : i + matched] = True
        i += c

    floor_base = (n - sample_target) / n * n_star
    hits = {float(s): 0 for s in slacks}
    remaining_total = 0.0
    for trial in range(trials):
        gen = np.random.default_rng(
            np.random.SeedSequence(entropy=(seed, _TRIAL_STREAM, trial))
        )
        perm = gen.permutation(n)
        sampler = ReplacementSampler(n, sample_target, gen)
        for pos in perm:
            if not sampler.offer(arrivals[int(pos)]):
                break
            if sampler.complete:
                break
        consumed = sampler.consumed
        taken = int(flags[perm[:consumed]].sum())
        remaining = n_star - taken
        remaining_total += remaining
        for s in hits:
            if remaining >= floor_base - s * n_star:
                hits[s] += 1
    return ConcentrationReport(
        sample_target=sample_target,
        trials=trials,
        n_star=n_star,
        mean_remaining=remaining_total / trials,
        frequencies={s: h / trials for s, h in hits.items()},
    )


def switched_cell_check(
    records: Sequence[TrialRecord], n: int, slack: float = 0.02
) -> tuple[float, float, bool]:
    """Comparative floor for cells that abandoned the advice mid-run.

    Returns (mean matches, floor, holds) where the floor is the baseline's
    mean matches on the same instances and orders scaled by the unconsumed
    fraction of input, minus ``slack`` of the optimum.  Meaningful only when
    the sample size stays below n; above it the floor is vacuously negative.
    """
    if not records:
        raise ValidationError("no records to check")
    switched = [r for r in records if r.branch == "BaselineRest"]
    if not switched:
        raise ValidationError("no trials switched to the baseline")
    mean_matches = float(np.mean([r.matches for r in switched]))
    mean_base = float(np.mean([r.baseline_matches for r in switched]))
    mean_k = float(np.mean([r.k for r in switched]))
    n_star = switched[0].n_star
    floor = mean_base * (n - mean_k) / n - slack * n_star
    return mean_matches, floor, mean_matches >= floor
