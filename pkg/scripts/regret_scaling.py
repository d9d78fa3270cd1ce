#!/usr/bin/env python3
"""Regret of streaming uniform exploration on the lower-bound family as T grows.

For each horizon the family's elevated mean is tied to T, the member index
cycles with the trial, and the mean regret over the seeds is reported next to
a full-memory UCB1 baseline. The last line is the least-squares log-log slope.
"""
from __future__ import annotations

import argparse
from dataclasses import dataclass

import numpy as np

from bandit_lab.harness import ExperimentPlan, monte_carlo
from bandit_lab.instances import InstanceSpec


@dataclass
class Config:
    horizons: tuple[int, ...] = (10**4, 10**5, 10**6)
    m: int = 4
    seeds: int = 50
    kappa: float = 1.0
    seed: int = 0
    ucb_max_T: int = 10**5


def run(cfg: Config) -> float:
    spec = InstanceSpec("lb", cfg.m + 1, {"m": cfg.m})
    print("T,uniform_explore_mean_regret,ucb1_mean_regret")
    means = []
    for T in cfg.horizons:
        explore = monte_carlo(ExperimentPlan("uniform-explore", spec, trials=cfg.seeds,
                                             master_seed=cfg.seed, T=T, kappa=cfg.kappa))
        means.append(explore.mean_regret)
        ucb = ""
        if T <= cfg.ucb_max_T:
            ucb = f"{monte_carlo(ExperimentPlan('ucb1', spec, trials=cfg.seeds, master_seed=cfg.seed, T=T)).mean_regret:.2f}"
        print(f"{T},{explore.mean_regret:.2f},{ucb}", flush=True)
    slope = float(np.polyfit(np.log(cfg.horizons), np.log(means), 1)[0])
    print(f"# log-log slope of uniform exploration: {slope:.3f}")
    return slope


def parse_args() -> Config:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--T", type=lambda s: tuple(int(float(x)) for x in s.split(",")),
                   default=Config.horizons, dest="horizons")
    p.add_argument("--m", type=int, default=Config.m)
    p.add_argument("--seeds", type=int, default=Config.seeds)
    p.add_argument("--kappa", type=float, default=Config.kappa)
    p.add_argument("--seed", type=int, default=Config.seed)
    p.add_argument("--ucb-max-T", type=int, default=Config.ucb_max_T,
                   help="skip the UCB1 baseline above this horizon (it is O(T n) in Python)")
    return Config(**vars(p.parse_args()))


if __name__ == "__main__":
    run(parse_args())
