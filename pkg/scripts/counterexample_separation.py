#!/usr/bin/env python3
"""Paired failure counts on the two adversarial streams.

1. Blocks-of-equal-means stream: aggressive promotion (resamples the stored
   arm at every duel) against the r-round algorithm with r = 2.
2. Linearly decreasing means: the king without the win offset against the
   budgeted king.

Both members of a pair use the same master seed, hence the same per-trial
reward seeds. Defaults are the desk-scale settings used by the test suite.
"""
from __future__ import annotations

import argparse
from dataclasses import dataclass

from bandit_lab.harness import ExperimentPlan, monte_carlo
from bandit_lab.instances import InstanceSpec


@dataclass
class Config:
    epsilon: float = 0.1
    delta: float = 0.1
    c1: int = 4
    c2: int = 64
    block_trials: int = 200
    linear_n: int = 5001
    linear_trials: int = 50
    reduction: float = 40_000.0
    seed: int = 0


def failures(plan: ExperimentPlan) -> str:
    s = monte_carlo(plan)
    return f"{s.trials - s.success_count}/{s.trials} (errors {s.errors})"


def run(cfg: Config) -> None:
    n = cfg.c1 * cfg.c2 + 1
    blocks = InstanceSpec("blocks", n, {"eps": cfg.epsilon, "c1": cfg.c1, "c2": cfg.c2})
    common = dict(trials=cfg.block_trials, master_seed=cfg.seed, epsilon=cfg.epsilon,
                  delta=cfg.delta)
    print(f"blocks stream, n={n}")
    print("  aggressive promotion failures:",
          failures(ExperimentPlan("aggressive", blocks, reduction_factor=cfg.reduction,
                                  level_sizes=(cfg.c1, cfg.c2), **common)))
    print("  r-round (r=2) failures:       ",
          failures(ExperimentPlan("rround", blocks, r=2, **common)))

    linear = InstanceSpec("linear-gap", cfg.linear_n, {"eps": cfg.epsilon})
    common = dict(trials=cfg.linear_trials, master_seed=cfg.seed, epsilon=cfg.epsilon,
                  delta=cfg.delta, reduction_factor=cfg.reduction)
    print(f"linear-gap stream, n={cfg.linear_n}")
    print("  king without offset failures: ",
          failures(ExperimentPlan("king-no-offset", linear, **common)))
    print("  budgeted king failures:        ", failures(ExperimentPlan("king", linear, **common)))


def parse_args() -> Config:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for name, default in vars(Config()).items():
        p.add_argument(f"--{name.replace('_', '-')}", type=type(default), default=default)
    return Config(**vars(p.parse_args()))


if __name__ == "__main__":
    run(parse_args())
