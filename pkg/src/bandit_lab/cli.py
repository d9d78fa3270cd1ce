"""Command-line entry point: ``bandit-lab <subcommand> [flags]``.

Exit codes: 0 success, 1 usage error (bad flags or parameters), 2 runtime error.
"""
from __future__ import annotations

import argparse
import csv
import math
import sys

from .core import SeedSpec, format_instance
from .harness import (PAC_ALGORITHMS, REGRET_ALGORITHMS, ExperimentPlan, build_instance,
                      execute, monte_carlo)
from .instances import FAMILIES, STRUCTURED, InstanceSpec, parse_params
from .regret import run_uniform_exploration, run_ucb1, write_trace_csv
from .report import emit_report, read_trials_csv
from .schedules import (LevelCapExceeded, aggressive_schedule, no_offset_schedule,
                        king_schedule, r_round_schedule)
from .stream import StreamError, StreamOrder, begin_session

USAGE_ERROR = 1
RUNTIME_ERROR = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _count(text: str) -> int:
    """Integer that may be written as 1e4."""
    value = float(text)
    if not value.is_integer():
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer")
    return int(value)


def _list(kind):
    def parse(text: str):
        try:
            return [kind(part) for part in text.split(",") if part.strip()]
        except (ValueError, argparse.ArgumentTypeError) as exc:
            raise argparse.ArgumentTypeError(str(exc)) from exc
    return parse


def _instance_flags(p: argparse.ArgumentParser, default_family: str) -> None:
    g = p.add_argument_group("instance")
    g.add_argument("--family", default=default_family, choices=FAMILIES + STRUCTURED,
                   help=f"mean generator (default {default_family})")
    g.add_argument("--params", default="",
                   help="family parameters as key=value pairs, e.g. 'mu=0.5,var=1'")
    g.add_argument("--instance", metavar="FILE",
                   help="read a fixed instance from FILE instead of generating one")
    g.add_argument("--m", type=int, default=None,
                   help="lower-bound family: number of half-mean arms in the construction")
    g.add_argument("--fixed-instance", action="store_true",
                   help="reuse trial 0's generated instance for every trial")


def _run_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("run")
    g.add_argument("--trials", "--seeds", dest="trials", type=_count, default=1,
                   help="number of independent trials (default 1)")
    g.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    g.add_argument("--order", choices=("natural", "random"), default="natural",
                   help="arrival order of arms (default natural)")
    g.add_argument("--capacity", type=int, default=None,
                   help="override the arm-memory capacity of the session")
    g.add_argument("--workers", type=int, default=None,
                   help="worker processes (default: $BANDIT_LAB_WORKERS or 1)")
    g.add_argument("--out", metavar="CSV", help="per-trial CSV path")
    g.add_argument("--aggregate", metavar="CSV", help="aggregate CSV path")
    g.add_argument("--svg", metavar="SVG", help="gap histogram SVG path")
    g.add_argument("--no-wall-time", action="store_true",
                   help="leave wall_ms blank so reruns give byte-identical CSVs")


def _pac_flags(p: argparse.ArgumentParser, multi: bool = False) -> None:
    num = _list(float) if multi else float
    cnt = _list(_count) if multi else _count
    g = p.add_argument_group("algorithm")
    g.add_argument("--n", type=cnt, default=[1000] if multi else 1000,
                   help="number of arms (default 1000)")
    g.add_argument("--r", type=cnt, default=[1] if multi else 1,
                   help="rounds for rround (1..log* n, default 1)")
    g.add_argument("--eps", type=num, default=[0.1] if multi else 0.1,
                   help="accuracy epsilon (default 0.1)")
    g.add_argument("--delta", type=num, default=[0.1] if multi else 0.1,
                   help="failure probability delta (default 0.1)")
    g.add_argument("--C", type=num, default=[117.0] if multi else 117.0,
                   help="schedule constant for king algorithms (default 117)")
    g.add_argument("--reduction", type=num, default=[1.0] if multi else 1.0,
                   help="divide s_l and b by this factor (default 1, no scaling)")
    g.add_argument("--level-sizes", type=_list(_count), default=None,
                   help="aggressive: comma list of the first level sizes, e.g. 4,64")


def _regret_flags(p: argparse.ArgumentParser, multi: bool = False) -> None:
    g = p.add_argument_group("regret")
    g.add_argument("--T", type=_list(_count) if multi else _count, default=None,
                   help="horizon (required)")
    g.add_argument("--kappa", type=_list(float) if multi else float,
                   default=[1.0] if multi else 1.0,
                   help="scale of the per-arm exploration count (default 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bandit-lab",
                     description="Bounded-memory streaming bandit experiments.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("pac-run", help="Monte Carlo run of a best-arm algorithm")
    p.add_argument("--alg", choices=PAC_ALGORITHMS, default="rround",
                   help="algorithm (default rround)")
    _pac_flags(p)
    _instance_flags(p, "uniform")
    _run_flags(p)
    p.add_argument("--trace", action="store_true",
                   help="print the decision trace of trial 0 to stdout")

    p = sub.add_parser("regret-run", help="Monte Carlo run of a regret algorithm")
    p.add_argument("--alg", choices=REGRET_ALGORITHMS, default="uniform-explore",
                   help="algorithm (default uniform-explore)")
    p.add_argument("--n", type=_count, default=None,
                   help="number of arms (default m+1 for lb, else 10)")
    p.add_argument("--j", default="cycle",
                   help="lb member index 0..m, or 'cycle' to rotate with the trial")
    _regret_flags(p)
    _instance_flags(p, "lb")
    _run_flags(p)
    p.add_argument("--trace-csv", metavar="CSV",
                   help="write the (t, arm, cumulative_regret) trace of trial 0")

    p = sub.add_parser("gen", help="write an instance file")
    p.add_argument("--family", default="uniform", choices=FAMILIES + STRUCTURED,
                   help="mean generator (default uniform)")
    p.add_argument("--params", default="", help="family parameters as key=value pairs")
    p.add_argument("--n", type=_count, required=True, help="number of arms")
    p.add_argument("--seed", type=int, default=0, help="seed (default 0)")
    p.add_argument("--out", metavar="FILE", help="output path (default stdout)")

    p = sub.add_parser("schedule", help="print a schedule as CSV")
    p.add_argument("--kind", choices=("rround", "king", "king-no-offset", "aggressive"),
                   default="rround", help="which schedule (default rround)")
    _pac_flags(p)
    p.add_argument("--levels", type=int, default=8,
                   help="rows to print for the unbounded king schedules (default 8)")
    p.add_argument("--out", metavar="CSV", help="output path (default stdout)")

    p = sub.add_parser("sweep", help="grid over one parameter; one CSV row per value")
    p.add_argument("--alg", choices=PAC_ALGORITHMS + REGRET_ALGORITHMS, required=True,
                   help="algorithm")
    _pac_flags(p, multi=True)
    _regret_flags(p, multi=True)
    _instance_flags(p, "uniform")
    p.add_argument("--j", default="cycle", help="lb member index, or 'cycle'")
    _run_flags(p)

    p = sub.add_parser("report", help="recount aggregate CSV and SVG from a per-trial CSV")
    p.add_argument("trials_csv", help="per-trial CSV written by pac-run or regret-run")
    p.add_argument("--aggregate", metavar="CSV", help="aggregate CSV path")
    p.add_argument("--svg", metavar="SVG", help="gap histogram SVG path")
    return parser


def _instance_spec(args, n: int, T: int | None = None) -> InstanceSpec:
    params = parse_params(args.params)
    if args.family == "lb":
        if args.m is not None:
            params["m"] = args.m
        j = getattr(args, "j", "cycle")
        if j != "cycle":
            params["j"] = int(j)
    return InstanceSpec(args.family, n, params)


def _plan(args, algorithm: str, **over) -> ExperimentPlan:
    n = over.pop("n")
    T = over.get("T")
    source = {"instance_file": args.instance} if args.instance else {
        "instance": _instance_spec(args, n, T)}
    return ExperimentPlan(
        algorithm=algorithm, order=args.order, trials=args.trials, master_seed=args.seed,
        capacity=args.capacity, fixed_instance=args.fixed_instance, workers=args.workers,
        **source, **over)


def _emit(summary, args) -> None:
    emit_report(summary, args.out, args.aggregate, args.svg,
                wall_time=not args.no_wall_time, title=summary.algorithm)
    for msg in summary.error_messages:
        print(msg, file=sys.stderr)
    print(f"{summary.algorithm}: trials={summary.trials} errors={summary.errors} "
          f"success={summary.success_count} mean_pulls={summary.mean_pulls:.6g} "
          f"max_peak={summary.max_peak}"
          + (f" mean_regret={summary.mean_regret:.6g}" if summary.rows
             and summary.rows[0].regret is not None else ""))


def _cmd_pac_run(args) -> int:
    plan = _plan(args, args.alg, n=args.n, epsilon=args.eps, delta=args.delta, r=args.r,
                 C=args.C, reduction_factor=args.reduction,
                 level_sizes=tuple(args.level_sizes) if args.level_sizes else None)
    if args.trace:
        outcome, *_ = execute(plan, build_instance(plan, 0), SeedSpec(plan.master_seed, 0),
                              trace=True)
        for line in outcome.trace or []:
            print(line)
    _emit(monte_carlo(plan), args)
    return 0


def _regret_n(args) -> int:
    if args.n is not None:
        return args.n
    return (args.m if args.m is not None else 4) + 1 if args.family == "lb" else 10


def _cmd_regret_run(args) -> int:
    if args.T is None:
        raise UsageError("regret-run: error: --T is required")
    plan = _plan(args, args.alg, n=_regret_n(args), T=args.T, kappa=args.kappa)
    if args.trace_csv:
        instance = build_instance(plan, 0)
        seeds = SeedSpec(plan.master_seed, 0)
        if plan.algorithm == "ucb1":
            trace, _ = run_ucb1(instance, plan.T, seeds.seed("reward"))
        else:
            order = StreamOrder(seeds.seed("order") if plan.order == "random" else None)
            session = begin_session(instance, order, plan.capacity or 2, seeds.seed("reward"))
            trace, _ = run_uniform_exploration(session, plan.T, plan.kappa)
        write_trace_csv(trace, instance, args.trace_csv)
    _emit(monte_carlo(plan), args)
    return 0


def _cmd_gen(args) -> int:
    spec = InstanceSpec(args.family, args.n, parse_params(args.params))
    text = format_instance(spec.build(SeedSpec(args.seed, 0).rng("instance")))
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _big(value: int | None) -> str:
    """Blank for None; powers of two beyond 2^60 are written as 2^k."""
    if value is None:
        return ""
    if value > 2**60 and value & (value - 1) == 0:
        return f"2^{value.bit_length() - 1}"
    return str(value)


def _schedule_rows(args) -> tuple[list[str], list[list]]:
    if args.kind == "rround":
        sched = r_round_schedule(args.n, args.r, args.eps, args.delta)
        return (["level", "eps", "s", "c"],
                [[lv.level, repr(lv.eps), lv.s, lv.c] for lv in sched.levels])
    if args.kind == "aggressive":
        sched = aggressive_schedule(args.n, args.eps, args.delta,
                                reduction_factor=args.reduction,
                                level_sizes=tuple(args.level_sizes) if args.level_sizes else None)
        return (["level", "eps", "s", "c"],
                [[lv.level, repr(lv.eps), "" if lv.s is None else lv.s,
                  _big(lv.c)] for lv in sched.levels])
    make = king_schedule if args.kind == "king" else no_offset_schedule
    sched = make(args.eps, args.delta, args.C, args.reduction)
    rows = [[lv, repr(args.eps), sched.s(lv), "", sched.b] for lv in range(1, args.levels + 1)]
    return ["level", "eps", "s", "c", "b"], rows


def _cmd_schedule(args) -> int:
    header, rows = _schedule_rows(args)
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    finally:
        if args.out:
            fh.close()
    return 0


SWEEPABLE = {"n": "n", "r": "r", "eps": "epsilon", "delta": "delta", "C": "C",
             "reduction": "reduction_factor", "T": "T", "kappa": "kappa"}


def _cmd_sweep(args) -> int:
    regret = args.alg in REGRET_ALGORITHMS
    if regret and args.T is None:
        raise UsageError("sweep: error: --T is required for regret algorithms")
    values = {flag: getattr(args, flag) for flag in SWEEPABLE}
    if values["T"] is None:
        values["T"] = [None]
    multi = [flag for flag, vals in values.items() if len(vals) > 1]
    if len(multi) > 1:
        raise UsageError(f"sweep: error: only one parameter may take several values, got {multi}")
    axis = multi[0] if multi else "n"
    if regret and args.family == "lb" and args.n == [1000]:
        values["n"] = [(args.m if args.m is not None else 4) + 1]
    base = {SWEEPABLE[f]: vals[0] for f, vals in values.items()}
    base["level_sizes"] = tuple(args.level_sizes) if args.level_sizes else None

    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["param", "value", "algorithm", "trials", "errors", "success_rate",
                    "mean_pulls", "max_peak_residency", "mean_regret"])
        for value in values[axis]:
            over = dict(base, **{SWEEPABLE[axis]: value})
            summary = monte_carlo(_plan(args, args.alg, **over))
            w.writerow([axis, value, args.alg, summary.trials, summary.errors,
                        repr(summary.success_rate), repr(summary.mean_pulls),
                        summary.max_peak,
                        "" if math.isnan(summary.mean_regret) else repr(summary.mean_regret)])
            out.flush()
    finally:
        if args.out:
            out.close()
    return 0


def _cmd_report(args) -> int:
    summary = read_trials_csv(args.trials_csv)
    emit_report(summary, None, args.aggregate, args.svg, title=summary.algorithm)
    print(f"{summary.algorithm}: trials={summary.trials} success={summary.success_count}")
    return 0


COMMANDS = {"pac-run": _cmd_pac_run, "regret-run": _cmd_regret_run, "gen": _cmd_gen,
            "schedule": _cmd_schedule, "sweep": _cmd_sweep, "report": _cmd_report}


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return USAGE_ERROR
    except (ValueError, argparse.ArgumentTypeError) as exc:
        print(f"bandit-lab: error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except (StreamError, LevelCapExceeded, OSError, RuntimeError, KeyError) as exc:
        print(f"bandit-lab: runtime error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return RUNTIME_ERROR


if __name__ == "__main__":
    sys.exit(main())
