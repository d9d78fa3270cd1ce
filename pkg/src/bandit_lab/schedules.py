"""Level schedules for the streaming best-arm algorithms.

Binary logs appear in the r-round schedule and natural logs in the three
challenge-style schedules, mirroring how each algorithm is written.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

DEFAULT_S_CAP = 10**13

# Constant in total_pulls <= K (n / eps^2)(ilog^(r) n + log2(1/delta)) for the r-round
# schedule. Fitted once as the worst ratio of the level-sum bound over n = 2^6..2^20,
# r = 1..log* n, eps in {0.5, 0.25, 0.1}, delta in {0.1, 0.01} (about 940, at n = 64,
# r = 4) and rounded up. The top level's eps / 2^(r+1) accuracy is what makes it large.
SAMPLE_COMPLEXITY_K = 1000


def ilog(order: int, a: float) -> float:
    """Iterated binary logarithm, floored at 1 at every step."""
    if a < 1:
        raise ValueError("ilog is defined for a >= 1")
    if order < 0:
        raise ValueError("order must be non-negative")
    x = float(a)
    for _ in range(order):
        x = max(math.log2(x), 1.0)
    return x


def log_star(n: float) -> int:
    if n < 1:
        raise ValueError("log* is defined for n >= 1")
    r, x = 0, float(n)
    while x != 1.0:
        x = max(math.log2(x), 1.0)
        r += 1
    return r


def max_rounds(n: int) -> int:
    # log*(1) = 0 but a single arm still needs one round
    return max(1, log_star(n))


@dataclass(frozen=True)
class Level:
    level: int
    eps: float
    beta: float
    s: int
    c: int


@dataclass(frozen=True)
class LevelSchedule:
    n: int
    r: int
    epsilon: float
    delta: float
    levels: tuple[Level, ...]

    def s(self, level: int) -> int:
        return self.levels[level - 1].s

    def c(self, level: int) -> int:
        return self.levels[level - 1].c


def r_round_schedule(n: int, r: int, epsilon: float, delta: float) -> LevelSchedule:
    if n < 1:
        raise ValueError("n must be positive")
    if not 1 <= r <= max_rounds(n):
        raise ValueError(f"r={r} outside [1, log* n = {log_star(n)}]")
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    if not 0 < delta < 0.5:
        raise ValueError("delta must lie in (0, 1/2)")
    levels = []
    for ell in range(1, r + 1):
        eps_l = epsilon / 2 ** (ell + 1)
        beta = 1.0 / eps_l**2
        s = math.ceil(2 * beta * (ilog(r + 1 - ell, n) + math.log2(2 ** (ell + 2) / delta)))
        c = math.ceil(ilog(r - ell, n))
        levels.append(Level(ell, eps_l, beta, s, c))
    return LevelSchedule(n, r, epsilon, delta, tuple(levels))


def r_round_pull_count(schedule: LevelSchedule) -> int:
    """Exact pull total of the r-round algorithm.

    Promotions and the end-of-stream sweep depend only on arrival counts, never
    on rewards: level l + 1 receives floor(arrivals_l / c_l) arms, and level l
    still holds an arm at the end exactly when arrivals_l is not a multiple of c_l.
    """
    r, n = schedule.r, schedule.n
    if r == 1:
        # c_1 = n, so the n-th arrival fills the counter and triggers the return
        return n * schedule.s(1)
    total, arrived, leftovers = 0, n, 0
    for level in range(1, r + 1):
        total += arrived * schedule.s(level)
        c = schedule.c(level)
        if level == r:
            if arrived >= c:
                raise RuntimeError("level r counter filled; c_r = n makes this impossible")
            break
        leftovers += arrived % c != 0
        arrived //= c
    return total + leftovers * schedule.s(r)


def r_round_level_sum(schedule: LevelSchedule) -> float:
    """Sum over levels of (n / prod_{i<l} c_i) * s_l plus (r-1) * s_r."""
    total, prod = 0.0, 1
    for lv in schedule.levels:
        total += schedule.n / prod * lv.s
        prod *= lv.c
    return total + (schedule.r - 1) * schedule.s(schedule.r)


def r_round_order_bound(n: int, r: int, epsilon: float, delta: float) -> float:
    """(n / eps^2) * (ilog^(r)(n) + log2(1/delta)), the asymptotic sample-complexity shape."""
    return n / epsilon**2 * (ilog(r, n) + math.log2(1 / delta))


@dataclass(frozen=True)
class KingSchedule:
    """Budgeted challenge schedule with the 0.495*eps win offset.

    ``reduction_factor`` divides both the per-level sample counts and the
    per-arrival budget grant.
    """

    epsilon: float
    delta: float
    C: float
    reduction_factor: float = 1.0

    def __post_init__(self):
        if not (0 < self.epsilon < 1 and 0 < self.delta < 1):
            raise ValueError("epsilon and delta must lie in (0, 1)")
        if self.C <= 0:
            raise ValueError("C must be positive")
        if self.reduction_factor < 1:
            raise ValueError("reduction_factor must be >= 1")

    @property
    def offset(self) -> float:
        return 0.495 * self.epsilon

    @cached_property
    def _base(self) -> float:
        return 2.0 / (self.epsilon / 200) ** 2 * math.log(4 / self.delta)

    def s_unreduced(self, level: int) -> int:
        return math.ceil(self._base * 3**level)

    def s(self, level: int) -> int:
        return math.ceil(self._base * 3**level / self.reduction_factor)

    @cached_property
    def b(self) -> int:
        grant = 2.0 / (self.epsilon / 200) ** 2 * self.C * math.log(4 / self.delta)
        return math.ceil((grant + self.s_unreduced(1)) / self.reduction_factor)


def king_schedule(epsilon: float, delta: float, C: float = 117,
                  reduction_factor: float = 1.0) -> KingSchedule:
    return KingSchedule(epsilon, delta, C, reduction_factor)


@dataclass(frozen=True)
class NoOffsetSchedule:
    """Challenge schedule without a win offset: s_l = (2/eps^2) ln(1/delta) 3^l."""

    epsilon: float
    delta: float
    C: float
    reduction_factor: float = 1.0

    def __post_init__(self):
        if not (0 < self.epsilon < 1 and 0 < self.delta < 1):
            raise ValueError("epsilon and delta must lie in (0, 1)")
        if self.C <= 0:
            raise ValueError("C must be positive")
        if self.reduction_factor < 1:
            raise ValueError("reduction_factor must be >= 1")

    offset = 0.0

    @cached_property
    def _base(self) -> float:
        return 2.0 / self.epsilon**2 * math.log(1 / self.delta)

    def r(self, level: int) -> int:
        return 3**level

    def s_unreduced(self, level: int) -> int:
        return math.ceil(self._base * 3**level)

    def s(self, level: int) -> int:
        return math.ceil(self._base * 3**level / self.reduction_factor)

    @cached_property
    def b(self) -> int:
        grant = 2.0 / self.epsilon**2 * self.C * math.log(1 / self.delta)
        return math.ceil((grant + self.s_unreduced(1)) / self.reduction_factor)


def no_offset_schedule(epsilon: float, delta: float, C: float = 117,
                         reduction_factor: float = 1.0) -> NoOffsetSchedule:
    return NoOffsetSchedule(epsilon, delta, C, reduction_factor)


class LevelCapExceeded(RuntimeError):
    """A run reached a level whose sample count was truncated from the schedule."""


@dataclass(frozen=True)
class AggressiveLevel:
    level: int
    r: int | None
    eps: float
    beta: float
    s: int | None  # None once the level is truncated
    c: int | None


@dataclass(frozen=True)
class AggressiveSchedule:
    n: int
    epsilon: float
    delta: float
    t: int
    levels: tuple[AggressiveLevel, ...]
    reduction_factor: float = 1.0

    def s(self, level: int) -> int:
        lv = self.levels[level - 1]
        if lv.s is None:
            raise LevelCapExceeded(f"level {level} was truncated from the schedule")
        return lv.s

    def c(self, level: int) -> int | None:
        return self.levels[level - 1].c

    @property
    def r_tower(self) -> tuple[int | None, ...]:
        return tuple(lv.r for lv in self.levels)


def aggressive_schedule(n: int, epsilon: float, delta: float, *,
                    reduction_factor: float = 1.0,
                    level_sizes: tuple[int, ...] | None = None,
                    s_cap: int = DEFAULT_S_CAP) -> AggressiveSchedule:
    """Aggressive-promotion schedule over t = ceil(log* n) + 1 levels.

    The tower r_1 = 4, r_{l+1} = 2^{r_l} explodes after three levels; any level
    whose sample count would exceed ``s_cap`` keeps ``s=None`` and raises
    :class:`LevelCapExceeded` if a run ever gets there. ``level_sizes`` overrides
    the leading c_l values for desk-scale experiments.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if not 0 < epsilon < 1 or not 0 < delta < 1:
        raise ValueError("epsilon and delta must lie in (0, 1)")
    t = math.ceil(log_star(n)) + 1
    levels = []
    r_l: int | None = 4
    truncated = False
    for ell in range(1, t + 1):
        eps_l = epsilon / (10 * 2 ** (ell - 1))
        beta = 1.0 / eps_l**2
        s = c = None
        if not truncated and r_l is not None and r_l.bit_length() < 64:
            raw = 4 * beta * (math.log(1 / delta) + 3 * r_l) / reduction_factor
            if raw <= s_cap:
                s = math.ceil(raw)
        if s is None:
            truncated = True
        if r_l is not None and r_l < 2**20:
            c = 2**r_l if ell == 1 else 2 ** (r_l - (ell - 1))
        if level_sizes is not None and ell <= len(level_sizes):
            c = int(level_sizes[ell - 1])
        levels.append(AggressiveLevel(ell, r_l, eps_l, beta, s, c))
        r_l = 2**r_l if (r_l is not None and r_l < 2**20) else None
    return AggressiveSchedule(n, epsilon, delta, t, tuple(levels), reduction_factor)
