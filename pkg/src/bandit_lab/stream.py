"""Single-pass arm stream with a hard cap on how many arms sit in memory.

The session is the only path from an algorithm to rewards: arms arrive through
:meth:`StreamSession.next_arm`, must be admitted before they can be pulled,
and once discarded they are gone for good.
"""
from __future__ import annotations

import time
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .core import Instance, RunOutcome

UNLIMITED = None


class StreamError(RuntimeError):
    """Violation of the bounded-memory single-pass model."""


class AdmitOverCapacity(StreamError):
    pass


class ReadmitAfterDiscard(StreamError):
    pass


class DiscardNonResident(StreamError):
    pass


class PullNonResident(StreamError):
    pass


class AdmitUndelivered(StreamError):
    pass


def fisher_yates(n: int, rng: np.random.Generator) -> np.ndarray:
    """Durstenfeld shuffle of ``range(n)``; swap partner for slot i is drawn from [0, i]."""
    perm = np.arange(n)
    if n < 2:
        return perm
    highs = np.arange(n, 1, -1)  # i + 1 for i = n-1 .. 1
    picks = rng.integers(0, highs)
    for i, j in zip(range(n - 1, 0, -1), picks.tolist()):
        perm[i], perm[j] = perm[j], perm[i]
    return perm


@dataclass(frozen=True)
class StreamOrder:
    """Arrival order. ``seed=None`` is the natural order 0, 1, ..., n-1."""

    seed: int | None = None

    @classmethod
    def natural(cls) -> StreamOrder:
        return cls(None)

    @classmethod
    def random(cls, seed: int) -> StreamOrder:
        return cls(int(seed))

    @property
    def kind(self) -> str:
        return "natural" if self.seed is None else "random"

    def permutation(self, n: int) -> np.ndarray:
        if self.seed is None:
            return np.arange(n)
        return fisher_yates(n, np.random.default_rng(self.seed))


class StreamSession:
    def __init__(self, instance: Instance, order: StreamOrder | None = None,
                 capacity: int | None = UNLIMITED,
                 seed: int | np.random.Generator | None = 0):
        if capacity is not None and capacity < 1:
            raise ValueError("capacity must be >= 1 or unlimited")
        self.instance = instance
        self.order = order or StreamOrder.natural()
        self.capacity = capacity
        self.rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
        self._arrivals = self.order.permutation(instance.n).tolist()
        self._means = instance.means
        self.consumed = 0
        self.resident: set[int] = set()
        self.discarded: set[int] = set()
        self._delivered: set[int] = set()
        self.ledger: Counter[int] = Counter()
        self.total_pulls = 0
        self.peak_residency = 0
        self._t0 = time.perf_counter()

    def next_arm(self) -> int | None:
        """Next arm in arrival order, or ``None`` at end of stream."""
        if self.consumed >= len(self._arrivals):
            return None
        arm = self._arrivals[self.consumed]
        self.consumed += 1
        self._delivered.add(arm)
        return arm

    @property
    def exhausted(self) -> bool:
        return self.consumed >= len(self._arrivals)

    def admit(self, arm: int) -> None:
        if arm in self.discarded:
            raise ReadmitAfterDiscard(f"arm {arm} was discarded; streams are single-pass")
        if arm not in self._delivered:
            raise AdmitUndelivered(f"arm {arm} has not arrived yet")
        if arm in self.resident:
            return
        if self.capacity is not None and len(self.resident) >= self.capacity:
            raise AdmitOverCapacity(
                f"admitting arm {arm} would exceed capacity {self.capacity}")
        self.resident.add(arm)
        if len(self.resident) > self.peak_residency:
            self.peak_residency = len(self.resident)

    def discard(self, arm: int) -> None:
        if arm not in self.resident:
            raise DiscardNonResident(f"arm {arm} is not in memory")
        self.resident.remove(arm)
        self.discarded.add(arm)

    def pull(self, arm: int, count: int = 1) -> tuple[int, float]:
        """Pull a resident arm ``count`` times; returns (reward sum, empirical mean).

        The sum of ``count`` Bernoulli(mu) rewards is drawn as one Binomial(count, mu)
        variate, which has exactly the same distribution.
        """
        if arm not in self.resident:
            raise PullNonResident(f"arm {arm} is not in memory")
        if count < 1:
            raise ValueError("count must be >= 1")
        total = int(self.rng.binomial(count, self._means[arm]))
        self.ledger[arm] += count
        self.total_pulls += count
        return total, total / count

    def outcome(self, returned_arm: int, per_level_pulls: dict[int, int] | None = None,
                trace: list[str] | None = None) -> RunOutcome:
        assert self.total_pulls == sum(self.ledger.values())
        return RunOutcome(
            returned_arm=returned_arm,
            true_gap=self.instance.gap(returned_arm),
            total_pulls=self.total_pulls,
            peak_residency=self.peak_residency,
            per_level_pulls=dict(per_level_pulls or {}),
            wall_time_ms=(time.perf_counter() - self._t0) * 1000.0,
            trace=trace,
        )

    def audit(self, per_arm: bool = False) -> dict:
        rec = {
            "consumed": self.consumed,
            "total_pulls": self.total_pulls,
            "peak_residency": self.peak_residency,
        }
        if per_arm:
            rec["pulls"] = dict(sorted(self.ledger.items()))
        return rec


def begin_session(instance: Instance, order: StreamOrder | None = None,
                  capacity_m: int | None = UNLIMITED,
                  seed: int | np.random.Generator | None = 0) -> StreamSession:
    return StreamSession(instance, order, capacity_m, seed)
