#!/usr/bin/env python3
"""Gap histograms of the budgeted king algorithm across the seven mean distributions.

Desk scale (default): n = 10^4 arms, 100 trials per distribution, a few
seconds each. Full scale, roughly overnight on one core per distribution:

    BANDIT_LAB_WORKERS=8 python3 scripts/king_gap_histograms.py \
        --n 1000000 --trials 1000 --out-dir runs/full

Each distribution writes <family>_trials.csv, <family>_aggregate.csv and
<family>_gaps.svg into --out-dir.
"""
from __future__ import annotations

import argparse
import time
from dataclasses import dataclass, field
from pathlib import Path

from bandit_lab.harness import ExperimentPlan, monte_carlo
from bandit_lab.instances import InstanceSpec
from bandit_lab.report import emit_report

FAMILY_PARAMS = {
    "truncnormal": {"mu": 0.5, "var": 1.0},
    "trunclognormal": {"mu": 0.0, "var": 1.5},
    "truncexp": {"lam": 2.0},
    "uniform": {},
    "beta": {"alpha": 10.0, "beta": 1.0},
    "truncgamma": {"k": 0.5, "theta": 1.0},
    "truncweibull": {"lam": 1.0, "k": 2.0},
}


@dataclass
class Config:
    n: int = 10_000
    trials: int = 100
    epsilon: float = 0.1
    delta: float = 0.1
    C: float = 117.0
    reduction: float = 40_000.0
    seed: int = 0
    order: str = "natural"
    families: list[str] = field(default_factory=lambda: list(FAMILY_PARAMS))
    out_dir: Path = Path("runs/king")


def run(cfg: Config) -> None:
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    print("family,trials,frac_gap_le_0.05,success_rate,mean_pulls,seconds")
    for family in cfg.families:
        plan = ExperimentPlan("king", InstanceSpec(family, cfg.n, FAMILY_PARAMS[family]),
                              order=cfg.order, trials=cfg.trials, master_seed=cfg.seed,
                              epsilon=cfg.epsilon, delta=cfg.delta, C=cfg.C,
                              reduction_factor=cfg.reduction)
        t0 = time.perf_counter()
        summary = monte_carlo(plan)
        secs = time.perf_counter() - t0
        emit_report(summary, cfg.out_dir / f"{family}_trials.csv",
                    cfg.out_dir / f"{family}_aggregate.csv", cfg.out_dir / f"{family}_gaps.svg",
                    title=f"king, {family}, n={cfg.n}, {cfg.trials} trials")
        print(f"{family},{summary.trials},{summary.fraction_gap_at_most(0.05):.4f},"
              f"{summary.success_rate:.4f},{summary.mean_pulls:.4g},{secs:.1f}", flush=True)


def parse_args() -> Config:
    cfg = Config()
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n", type=int, default=cfg.n)
    p.add_argument("--trials", type=int, default=cfg.trials)
    p.add_argument("--eps", dest="epsilon", type=float, default=cfg.epsilon)
    p.add_argument("--delta", type=float, default=cfg.delta)
    p.add_argument("--C", type=float, default=cfg.C)
    p.add_argument("--reduction", type=float, default=cfg.reduction)
    p.add_argument("--seed", type=int, default=cfg.seed)
    p.add_argument("--order", choices=("natural", "random"), default=cfg.order)
    p.add_argument("--families", nargs="+", choices=list(FAMILY_PARAMS), default=cfg.families)
    p.add_argument("--out-dir", type=Path, default=cfg.out_dir)
    return Config(**vars(p.parse_args()))


if __name__ == "__main__":
    run(parse_args())
