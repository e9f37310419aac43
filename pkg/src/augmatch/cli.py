"""Command-line front end.

Four subcommands:

* ``run``        one seeded trial, trial record as JSON on stdout
* ``sweep``      a full experiment from a JSON spec: CSVs plus figures
* ``calibrate``  measure sample-size constants, write a report and figure
* ``selftest``   oracle and sanity checks, JSON verdict on stdout

stdout carries machine-readable output only; diagnostics go to stderr.
Exit codes: 0 success, 1 a check or invariant failed, 2 bad input.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .calibration import DEFAULT_C_GRID, calibrate
from .errors import InvariantViolation, OracleSizeError, ValidationError
from .estimator import asymptotic_delta_prime
from .graph import brute_force_matching, expand_profile, maximum_matching
from .harness import (
    ExperimentSpec,
    generate_instance,
    instance_rng,
    random_small_profile,
    run_experiment,
    run_trial,
    write_summary_csv,
    write_trials_csv,
)
from .online import DEFAULT_BETA, ReplacementSampler, switch_threshold
from .predictions import l1_counts, perturb


def _log(message: str) -> None:
    print(message, file=sys.stderr)


def _add_run_parser(sub: "argparse._SubParsersAction") -> None:
    p = sub.add_parser("run", help="run one seeded trial and print its record")
    p.add_argument("--family", default="perfect",
                   choices=["perfect", "isolated", "triangular"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--l1", type=float, default=0.0,
                   help="target advice error as an L1 distance in [0, 2]")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--beta", type=float, default=DEFAULT_BETA)
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--delta-prime", type=float, default=None)
    p.add_argument("--delta-prime-raw", action="store_true",
                   help="use the unclamped asymptotic failure budget "
                        "(rejects desk-scale n by design)")
    p.add_argument("--c-sample", type=float, default=4.0)
    p.add_argument("--rho", type=float, default=0.5,
                   help="matched fraction for the isolated family")


def _cmd_run(args: argparse.Namespace) -> int:
    if not 0 <= args.l1 <= 2:
        raise ValidationError(f"--l1 must lie in [0, 2], got {args.l1}")
    delta = args.delta_prime
    if args.delta_prime_raw:
        if delta is not None:
            raise ValidationError(
                "--delta-prime and --delta-prime-raw are mutually exclusive"
            )
        delta = asymptotic_delta_prime(args.n)
    params = {"rho": args.rho} if args.family == "isolated" else {}
    spec = ExperimentSpec(
        family=args.family,
        n=args.n,
        alpha=args.alpha,
        l1_grid=(args.l1,),
        trials=1,
        seed=args.seed,
        beta=args.beta,
        epsilon=args.epsilon,
        delta_prime=delta,
        c_sample=args.c_sample,
        family_params=params,
    )
    instance = generate_instance(
        spec.family, spec.n, spec.family_params, instance_rng(spec.seed)
    )
    record = run_trial(spec, instance, 0, args.l1, 0)
    print(json.dumps(record.to_json_dict()))
    return 0


def _add_sweep_parser(sub: "argparse._SubParsersAction") -> None:
    p = sub.add_parser("sweep", help="run an experiment spec, write CSVs and figures")
    p.add_argument("--spec", required=True, help="path to an experiment spec JSON")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--jobs", type=int, default=1,
                   help="worker processes for trials within a cell")
    p.add_argument("--no-plots", action="store_true",
                   help="skip figure rendering, write CSVs only")


def _cmd_sweep(args: argparse.Namespace) -> int:
    spec = ExperimentSpec.from_json_file(args.spec)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _log(f"sweep: {spec.family} n={spec.n} grid={list(spec.l1_grid)} "
         f"trials={spec.trials} jobs={args.jobs}")
    result = run_experiment(spec, jobs=args.jobs)
    trials_path = write_trials_csv(result, out / "trials.csv")
    summary_path = write_summary_csv(result, out / "summary.csv")
    figures: list[str] = []
    if not args.no_plots:
        from .report import render_sweep_figures

        figures = [str(p) for p in render_sweep_figures(result, out)]
    print(json.dumps({
        "trials_csv": str(trials_path),
        "summary_csv": str(summary_path),
        "figures": figures,
    }))
    return 0


def _add_calibrate_parser(sub: "argparse._SubParsersAction") -> None:
    p = sub.add_parser("calibrate",
                       help="measure sample-size constants on reference pairs")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--delta-prime", type=float, default=0.1)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--c-grid", default=",".join(str(c) for c in DEFAULT_C_GRID),
                   help="comma-separated candidate constants")
    p.add_argument("--no-plots", action="store_true")


def _cmd_calibrate(args: argparse.Namespace) -> int:
    try:
        grid = tuple(float(x) for x in args.c_grid.split(",") if x.strip())
    except ValueError as exc:
        raise ValidationError(f"bad --c-grid: {exc}") from exc
    if args.trials < 1:
        raise ValidationError("--trials must be >= 1")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    report = calibrate(
        n=args.n,
        epsilon=args.epsilon,
        delta_prime=args.delta_prime,
        trials=args.trials,
        seed=args.seed,
        c_grid=grid,
    )
    (out / "calibration.json").write_text(report.to_json() + "\n")
    if not args.no_plots:
        from .report import render_calibration_figure

        render_calibration_figure(report, out / "calibration.png")
    print(report.to_json())
    if report.selected is None:
        _log("calibrate: no candidate constant met the accuracy contract")
        return 1
    _log(f"calibrate: selected c_sample={report.selected}")
    return 0


def _add_selftest_parser(sub: "argparse._SubParsersAction") -> None:
    p = sub.add_parser("selftest", help="oracle equivalence and sanity checks")
    p.add_argument("--quick", action="store_true",
                   help="smaller check sizes, a few seconds total")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--inject-fault", action="store_true",
                   help=argparse.SUPPRESS)


def _check_oracle(gen: np.random.Generator, cases: int, fault: bool) -> dict:
    bad = 0
    for _ in range(cases):
        profile = random_small_profile(gen)
        fast = maximum_matching(profile, profile.n).size
        if fault:
            fast += 1
        slow = brute_force_matching(profile, profile.n)
        if fast != slow:
            bad += 1
    return {
        "name": "matching_oracle_equivalence",
        "ok": bad == 0,
        "detail": f"{bad} mismatches over {cases} random profiles",
    }


def _check_distance_metric(gen: np.random.Generator, cases: int) -> dict:
    bad = 0
    for _ in range(cases):
        p = random_small_profile(gen)
        n = p.n
        q = perturb(p, 2 * int(gen.integers(0, n + 1)), gen)
        r = perturb(p, 2 * int(gen.integers(0, n + 1)), gen)
        pq, qp = l1_counts(p, q), l1_counts(q, p)
        pr, qr = l1_counts(p, r), l1_counts(q, r)
        if l1_counts(p, p) != 0 or pq != qp:
            bad += 1
        elif pq % 2 or pq > 2 * n or pr > pq + qr:
            bad += 1
    return {
        "name": "distance_metric_properties",
        "ok": bad == 0,
        "detail": f"{bad} violations over {cases} random triples",
    }


def _check_sampler_fidelity(gen: np.random.Generator, runs: int) -> dict:
    from .graph import TypeProfile, VertexType

    counts = {VertexType((0,)): 5, VertexType((1,)): 10, VertexType((2,)): 15,
              VertexType((3,)): 12, VertexType((4,)): 8}
    profile = TypeProfile(entries=counts, n=50)
    arrivals = expand_profile(profile)
    types = profile.support
    target = 40
    freqs = np.zeros((runs, len(types)))
    index = {t: i for i, t in enumerate(types)}
    for run in range(runs):
        perm = gen.permutation(profile.n)
        sampler = ReplacementSampler(profile.n, target, gen)
        for pos in perm:
            if not sampler.offer(arrivals[int(pos)]):
                break
            if sampler.complete:
                break
        for t, c in sampler.counts.items():
            freqs[run, index[t]] = c / target
    worst = 0.0
    for i, t in enumerate(types):
        expected = profile.count(t) / profile.n
        se = float(np.std(freqs[:, i], ddof=1) / np.sqrt(runs))
        z = abs(float(freqs[:, i].mean()) - expected) / se
        worst = max(worst, z)
    return {
        "name": "sampler_fidelity",
        "ok": worst <= 3.0,
        "detail": f"worst per-type deviation {worst:.2f} standard errors "
                  f"over {runs} runs",
    }


def _check_threshold_algebra() -> dict:
    beta = DEFAULT_BETA
    worst = 0.0
    for i in range(1, 101):
        h = i / 100.0
        tau = switch_threshold(i * 10, 1000, beta)
        ratio = (h - tau / 2.0) / (h + tau / 2.0)
        worst = max(worst, abs(ratio - beta))
    return {
        "name": "threshold_algebra",
        "ok": worst <= 1e-12,
        "detail": f"worst deviation at the switch point {worst:.2e}",
    }


def _cmd_selftest(args: argparse.Namespace) -> int:
    gen = np.random.default_rng(np.random.SeedSequence(entropy=(args.seed, 3)))
    cases = 200 if args.quick else 1000
    triples = 60 if args.quick else 200
    runs = 2000 if args.quick else 10000
    checks = [
        _check_oracle(gen, cases, args.inject_fault),
        _check_distance_metric(gen, triples),
        _check_sampler_fidelity(gen, runs),
        _check_threshold_algebra(),
    ]
    for check in checks:
        verdict = "ok" if check["ok"] else "FAIL"
        _log(f"selftest {verdict:4s} {check['name']}: {check['detail']}")
    ok = all(c["ok"] for c in checks)
    print(json.dumps({"ok": ok, "checks": checks}))
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="augmatch",
        description="learning-augmented online bipartite matching toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    _add_run_parser(sub)
    _add_sweep_parser(sub)
    _add_calibrate_parser(sub)
    _add_selftest_parser(sub)
    return parser


def main(argv: "list[str] | None" = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "run": _cmd_run,
        "sweep": _cmd_sweep,
        "calibrate": _cmd_calibrate,
        "selftest": _cmd_selftest,
    }
    try:
        return handlers[args.command](args)
    except (ValidationError, OracleSizeError) as exc:
        _log(f"error: {exc}")
        return 2
    except InvariantViolation as exc:
        _log(f"invariant violation: {exc}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
