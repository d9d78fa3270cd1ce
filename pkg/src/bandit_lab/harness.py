"""Monte Carlo runner: many independent seeded trials, merged in trial order."""
from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

from .core import EPS_TOL, Instance, SeedSpec
from .instances import InstanceSpec
from .pac import run_aggressive_promotion, run_king_budget, run_king_no_offset, run_r_round
from .regret import cumulative_regret, run_uniform_exploration, run_ucb1
from .schedules import (LevelCapExceeded, aggressive_schedule, no_offset_schedule, king_schedule,
                        log_star, r_round_schedule)
from .stream import StreamError, StreamOrder, begin_session

PAC_ALGORITHMS = ("rround", "king", "aggressive", "king-no-offset")
REGRET_ALGORITHMS = ("uniform-explore", "ucb1")
ALGORITHMS = PAC_ALGORITHMS + REGRET_ALGORITHMS

BIN_WIDTH = 0.005
N_BINS = 200


@dataclass(frozen=True)
class ExperimentPlan:
    algorithm: str
    instance: InstanceSpec | None = None
    instance_file: str | None = None
    order: str = "natural"
    trials: int = 1
    master_seed: int = 0
    epsilon: float = 0.1
    delta: float = 0.1
    r: int = 1
    C: float = 117.0
    kappa: float = 1.0
    T: int | None = None
    reduction_factor: float = 1.0
    capacity: int | None = None
    fixed_instance: bool = False
    level_sizes: tuple[int, ...] | None = None
    workers: int | None = None

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}; choose from {ALGORITHMS}")
        if (self.instance is None) == (self.instance_file is None):
            raise ValueError("give exactly one of an instance generator or an instance file")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.order not in ("natural", "random"):
            raise ValueError("order must be 'natural' or 'random'")
        if self.algorithm in REGRET_ALGORITHMS and self.T is None:
            raise ValueError(f"{self.algorithm} needs a horizon T")
        if self.algorithm == "rround":
            n = self.instance.n if self.instance is not None else None
            if n is not None and not 1 <= self.r <= max(1, log_star(n)):
                raise ValueError(f"r={self.r} outside [1, log* n = {log_star(n)}]")

    @property
    def is_regret(self) -> bool:
        return self.algorithm in REGRET_ALGORITHMS

    @property
    def param_r_or_C(self) -> float:
        return self.r if self.algorithm == "rround" else self.C


@dataclass
class TrialRow:
    trial_id: int
    algorithm: str
    n: int
    param_r_or_C: float
    epsilon: float
    delta: float
    order_seed: int | str
    reward_seed: int
    returned_arm: int
    best_arm: int
    gap: float
    total_pulls: int
    peak_residency: int
    wall_ms: float
    horizon: int | None = None
    regret: float | None = None

    @property
    def success(self) -> bool:
        return self.gap <= self.epsilon + EPS_TOL


def gap_bin(gap: float) -> int:
    """Bin k covers (k w, (k+1) w]; bin 0 also takes a zero gap."""
    k = math.ceil(round(gap / BIN_WIDTH, 9)) - 1
    return min(max(k, 0), N_BINS - 1)


@dataclass
class TrialSummary:
    algorithm: str
    rows: list[TrialRow] = field(default_factory=list)
    errors: int = 0
    error_messages: list[str] = field(default_factory=list)

    @property
    def trials(self) -> int:
        return len(self.rows)

    @property
    def success_count(self) -> int:
        return sum(row.success for row in self.rows)

    @property
    def success_rate(self) -> float:
        return self.success_count / self.trials if self.rows else math.nan

    @property
    def gap_histogram(self) -> list[int]:
        hist = [0] * N_BINS
        for row in self.rows:
            hist[gap_bin(row.gap)] += 1
        return hist

    def fraction_gap_at_most(self, bound: float) -> float:
        if not self.rows:
            return math.nan
        return sum(row.gap <= bound + EPS_TOL for row in self.rows) / self.trials

    @property
    def mean_pulls(self) -> float:
        return sum(r.total_pulls for r in self.rows) / self.trials if self.rows else math.nan

    @property
    def max_pulls(self) -> int:
        return max((r.total_pulls for r in self.rows), default=0)

    @property
    def mean_peak(self) -> float:
        return sum(r.peak_residency for r in self.rows) / self.trials if self.rows else math.nan

    @property
    def max_peak(self) -> int:
        return max((r.peak_residency for r in self.rows), default=0)

    @property
    def mean_regret(self) -> float:
        vals = [r.regret for r in self.rows if r.regret is not None]
        return sum(vals) / len(vals) if vals else math.nan


def default_capacity(plan: ExperimentPlan, n: int) -> int | None:
    if plan.capacity is not None:
        return plan.capacity
    if plan.algorithm == "rround":
        return plan.r + 1
    if plan.algorithm == "aggressive":
        return math.ceil(log_star(n)) + 2
    if plan.algorithm == "ucb1":
        return None
    return 2


def _load_file_instance(plan: ExperimentPlan) -> Instance:
    return Instance.from_file(plan.instance_file)


def build_instance(plan: ExperimentPlan, trial_index: int) -> Instance:
    if plan.instance_file is not None:
        return _load_file_instance(plan)
    spec = plan.instance
    seeds = SeedSpec(plan.master_seed, 0 if plan.fixed_instance else trial_index)
    return spec.build(seeds.rng("instance"), trial_index=trial_index, horizon=plan.T)


def execute(plan: ExperimentPlan, instance: Instance, seeds: SeedSpec, trace: bool = False):
    """Run the plan's algorithm once; returns (outcome, order_seed, reward_seed, regret)."""
    n = instance.n
    order_seed = seeds.seed("order") if plan.order == "random" else None
    reward_seed = seeds.seed("reward")
    regret = None
    alg = plan.algorithm
    if alg == "ucb1":
        run, outcome = run_ucb1(instance, plan.T, reward_seed)
        return outcome, order_seed, reward_seed, cumulative_regret(run, instance)

    session = begin_session(instance, StreamOrder(order_seed), default_capacity(plan, n),
                            reward_seed)
    if alg == "rround":
        outcome = run_r_round(session, r_round_schedule(n, plan.r, plan.epsilon, plan.delta),
                              trace)
    elif alg == "king":
        outcome = run_king_budget(session, king_schedule(
            plan.epsilon, plan.delta, plan.C, plan.reduction_factor), trace)
    elif alg == "king-no-offset":
        outcome = run_king_no_offset(session, no_offset_schedule(
            plan.epsilon, plan.delta, plan.C, plan.reduction_factor), trace)
    elif alg == "aggressive":
        outcome = run_aggressive_promotion(session, aggressive_schedule(
            n, plan.epsilon, plan.delta, reduction_factor=plan.reduction_factor,
            level_sizes=plan.level_sizes), trace)
    else:
        run, outcome = run_uniform_exploration(session, plan.T, plan.kappa)
        regret = cumulative_regret(run, instance)
    return outcome, order_seed, reward_seed, regret


def run_trial(plan: ExperimentPlan, trial_index: int,
              instance: Instance | None = None) -> TrialRow:
    if instance is None:
        instance = build_instance(plan, trial_index)
    outcome, order_seed, reward_seed, regret = execute(
        plan, instance, SeedSpec(plan.master_seed, trial_index))
    return TrialRow(
        trial_id=trial_index, algorithm=plan.algorithm, n=instance.n,
        param_r_or_C=plan.param_r_or_C, epsilon=plan.epsilon, delta=plan.delta,
        order_seed="natural" if order_seed is None else order_seed,
        reward_seed=reward_seed, returned_arm=outcome.returned_arm,
        best_arm=instance.best_arm, gap=outcome.true_gap,
        total_pulls=outcome.total_pulls, peak_residency=outcome.peak_residency,
        wall_ms=outcome.wall_time_ms, horizon=plan.T if plan.is_regret else None,
        regret=regret,
    )


def _guarded_trial(plan: ExperimentPlan, trial_index: int,
                   instance: Instance | None = None) -> TrialRow | str:
    try:
        return run_trial(plan, trial_index, instance)
    except (StreamError, LevelCapExceeded) as exc:
        return f"trial {trial_index}: {type(exc).__name__}: {exc}"


def _chunk(plan: ExperimentPlan, indices: list[int]) -> list[TrialRow | str]:
    shared = build_instance(plan, 0) if _shares_instance(plan) else None
    return [_guarded_trial(plan, i, shared) for i in indices]


def _shares_instance(plan: ExperimentPlan) -> bool:
    if plan.instance_file is not None or plan.fixed_instance:
        return True
    return not plan.instance.random and plan.instance.family != "lb"


def resolve_workers(plan: ExperimentPlan) -> int:
    if plan.workers is not None:
        return max(1, plan.workers)
    env = os.environ.get("BANDIT_LAB_WORKERS")
    return max(1, int(env)) if env else 1


def monte_carlo(plan: ExperimentPlan) -> TrialSummary:
    """Run ``plan.trials`` independent trials and merge them by trial index.

    Each trial draws its instance, arrival order and rewards from seeds keyed
    on (master_seed, trial_index), so the summary does not depend on how
    trials are spread over workers.
    """
    workers = min(resolve_workers(plan), plan.trials)
    indices = list(range(plan.trials))
    if workers == 1:
        results = _chunk(plan, indices)
    else:
        chunks = [indices[w::workers] for w in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_chunk, [plan] * workers, chunks))
        by_index: dict[int, TrialRow | str] = {}
        for chunk, part in zip(chunks, parts):
            by_index.update(zip(chunk, part))
        results = [by_index[i] for i in indices]

    summary = TrialSummary(plan.algorithm)
    for res in results:
        if isinstance(res, str):
            summary.errors += 1
            summary.error_messages.append(res)
        else:
            summary.rows.append(res)
    return summary


def with_workers(plan: ExperimentPlan, workers: int) -> ExperimentPlan:
    return replace(plan, workers=workers)
