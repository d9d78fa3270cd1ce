"""Regret minimisation: streaming uniform exploration (memory 2) and a
full-memory UCB1 baseline. Regret is pseudo-regret on the true means."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import Instance, RunOutcome
from .stream import StreamSession, begin_session


@dataclass
class RegretTrace:
    """Run-length encoded pull sequence: ``segments`` holds (arm, count) pairs."""

    T: int
    segments: list[tuple[int, int]] = field(default_factory=list)

    def append(self, arm: int, count: int) -> None:
        if count <= 0:
            return
        if self.segments and self.segments[-1][0] == arm:
            self.segments[-1] = (arm, self.segments[-1][1] + count)
        else:
            self.segments.append((arm, count))

    @property
    def length(self) -> int:
        return sum(c for _, c in self.segments)

    def pulled(self) -> np.ndarray:
        arms = [a for a, _ in self.segments]
        counts = [c for _, c in self.segments]
        return np.repeat(np.asarray(arms, dtype=np.int64), counts)

    def concat(self, other: RegretTrace) -> RegretTrace:
        out = RegretTrace(self.T + other.T, list(self.segments))
        for arm, count in other.segments:
            out.append(arm, count)
        return out

    def cumulative(self, instance: Instance, at: np.ndarray | None = None) -> np.ndarray:
        """Cumulative regret after t pulls for each t in ``at`` (default 1..T)."""
        gaps = instance.gaps()
        ends = np.cumsum([c for _, c in self.segments])
        starts = ends - np.asarray([c for _, c in self.segments])
        seg_gap = np.asarray([gaps[a] for a, _ in self.segments])
        seg_regret = np.concatenate([[0.0], np.cumsum(seg_gap * (ends - starts))])
        at = np.arange(1, self.length + 1) if at is None else np.asarray(at)
        idx = np.searchsorted(ends, at, side="left")
        idx = np.minimum(idx, len(ends) - 1)
        return seg_regret[idx] + seg_gap[idx] * (at - starts[idx])


def cumulative_regret(trace: RegretTrace, instance: Instance) -> float:
    gaps = instance.gaps()
    for arm, _ in trace.segments:
        instance._check(arm)
    return math.fsum(float(gaps[arm]) * count for arm, count in trace.segments)


def exploration_pulls(n: int, T: int, kappa: float = 1.0) -> int:
    """Per-arm exploration count ceil(kappa (T/n)^(2/3) (log2 T)^(1/3))."""
    return math.ceil(kappa * (T / n) ** (2 / 3) * math.log2(T) ** (1 / 3))


def run_uniform_exploration(session: StreamSession, T: int,
                            kappa: float = 1.0) -> tuple[RegretTrace, RunOutcome]:
    n = session.instance.n
    if T < n:
        raise ValueError("horizon T must be at least n")
    e = exploration_pulls(n, T, kappa)
    trace = RegretTrace(T)
    used = 0
    king: int | None = None
    king_mean = (0, 1)

    while (arm := session.next_arm()) is not None:
        if king is not None and used + e > T:
            # not enough horizon left to explore this arm; skip the rest
            continue
        count = min(e, T - used)
        session.admit(arm)
        total, _ = session.pull(arm, count)
        trace.append(arm, count)
        used += count
        if king is None:
            king, king_mean = arm, (total, count)
        elif total * king_mean[1] > king_mean[0] * count:
            session.discard(king)
            king, king_mean = arm, (total, count)
        else:
            session.discard(arm)

    if used < T:
        session.pull(king, T - used)
        trace.append(king, T - used)
    return trace, session.outcome(king)


def run_ucb1(instance: Instance, T: int,
             seed: int | np.random.Generator | None = 0) -> tuple[RegretTrace, RunOutcome]:
    """UCB1 with every arm in memory: pull each arm once, then the largest
    mean + sqrt(2 ln t / n_i); ties to the lowest index."""
    n = instance.n
    if T < n:
        raise ValueError("horizon T must be at least n")
    session = begin_session(instance, capacity_m=None, seed=seed)
    for _ in range(n):
        session.admit(session.next_arm())
    sums = [0] * n
    counts = [0] * n
    trace = RegretTrace(T)
    pull, sqrt, log = session.pull, math.sqrt, math.log
    for arm in range(n):
        sums[arm] += pull(arm, 1)[0]
        counts[arm] += 1
        trace.append(arm, 1)
    arms = range(n)
    for t in range(n, T):
        two_log_t = 2.0 * log(t)
        arm = max(arms, key=lambda i: (sums[i] / counts[i] + sqrt(two_log_t / counts[i]), -i))
        sums[arm] += pull(arm, 1)[0]
        counts[arm] += 1
        trace.append(arm, 1)
    return trace, session.outcome(int(np.argmax(counts)))


def write_trace_csv(trace: RegretTrace, instance: Instance, path: str | Path,
                    max_rows: int = 10_000) -> None:
    """Columns t, arm, cumulative_regret, strided down to at most ``max_rows`` rows."""
    rows = min(trace.length, max_rows)
    ts = np.unique(np.round(np.linspace(1, trace.length, rows)).astype(np.int64))
    ends = np.cumsum([c for _, c in trace.segments])
    arms = [trace.segments[i][0] for i in np.searchsorted(ends, ts, side="left")]
    regret = trace.cumulative(instance, ts)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "arm", "cumulative_regret"])
        for t, a, g in zip(ts.tolist(), arms, regret.tolist()):
            w.writerow([t, a, repr(g)])
