"""Best-arm identification over a bounded-memory stream.

* :func:`run_r_round` keeps one stored arm and its frozen empirical mean per
  level and never resamples the stored arm (memory r + 1).
* :func:`run_aggressive_promotion` resamples the stored arm at every
  comparison (memory ceil(log* n) + 2). It is here as the counterexample.
* :func:`run_king_budget` / :func:`run_king_no_offset` hold a single king with a
  pull budget that challengers drain level by level (memory 2).
"""
from __future__ import annotations

from collections import Counter

from .core import RunOutcome
from .schedules import (AggressiveSchedule, NoOffsetSchedule, KingSchedule,
                        LevelCapExceeded, LevelSchedule)
from .stream import StreamSession


def _ge(a: tuple[int, int], b: tuple[int, int]) -> bool:
    """a >= b for empirical means stored as (reward_sum, pulls)."""
    return a[0] * b[1] >= b[0] * a[1]


def _gt(a: tuple[int, int], b: tuple[int, int]) -> bool:
    return a[0] * b[1] > b[0] * a[1]


def run_r_round(session: StreamSession, schedule: LevelSchedule,
                trace: bool = False) -> RunOutcome:
    if schedule.n != session.instance.n:
        raise ValueError("schedule was built for a different n")
    r = schedule.r
    stored: list[int | None] = [None] * (r + 1)
    best: list[tuple[int, int]] = [(0, 1)] * (r + 1)
    counters = [0] * (r + 1)
    level_pulls: Counter[int] = Counter()
    log: list[str] | None = [] if trace else None

    while (arm := session.next_arm()) is not None:
        session.admit(arm)
        cand, level = arm, 1
        while True:
            s = schedule.s(level)
            total, _ = session.pull(cand, s)
            level_pulls[level] += s
            if _gt(best[level], (total, s)):
                session.discard(cand)
            else:
                if stored[level] is not None:
                    session.discard(stored[level])
                stored[level] = cand
                best[level] = (total, s)
            counters[level] += 1
            if counters[level] < schedule.c(level):
                break
            if r == 1:
                if log is not None:
                    log.append(f"return level=1 arm={stored[1]}")
                return session.outcome(stored[1], level_pulls, log)
            if level == r:
                raise RuntimeError("top-level counter filled before the stream ended")
            cand = stored[level]
            stored[level] = None
            counters[level] = 0
            best[level] = (0, 1)
            if log is not None:
                log.append(f"promote arm={cand} from={level} to={level + 1}")
            level += 1

    # end of stream: arms left below level r get s_r fresh samples each
    s_r = schedule.s(r)
    runner_up: int | None = None
    runner_mean = (0, 1)
    for level in range(1, r):
        cand = stored[level]
        if cand is None:
            continue
        total, _ = session.pull(cand, s_r)
        level_pulls[r] += s_r
        mean = (total, s_r)
        if log is not None:
            log.append(f"sweep arm={cand} from={level} mean={total}/{s_r}")
        if runner_up is None or _gt(mean, runner_mean) or (
                _ge(mean, runner_mean) and cand < runner_up):
            if runner_up is not None:
                session.discard(runner_up)
            runner_up, runner_mean = cand, mean
        else:
            session.discard(cand)

    top = stored[r]
    if runner_up is None:
        chosen = top
    elif top is None:
        chosen = runner_up
    else:
        chosen = top if _gt(best[r], runner_mean) else runner_up
    if log is not None:
        log.append(f"return arm={chosen}")
    return session.outcome(chosen, level_pulls, log)


def run_aggressive_promotion(session: StreamSession, schedule: AggressiveSchedule,
                             trace: bool = False) -> RunOutcome:
    """Selective promotion that resamples the stored arm at each comparison.

    An empty level slot is filled by the arriving arm after it is sampled once
    at that level's count. The returned arm is the one stored at the highest
    occupied level.
    """
    t = schedule.t
    stored: list[int | None] = [None] * (t + 1)
    counters = [0] * (t + 1)
    level_pulls: Counter[int] = Counter()
    log: list[str] | None = [] if trace else None

    while (arm := session.next_arm()) is not None:
        session.admit(arm)
        cand, level = arm, 1
        while True:
            if level > t:
                raise LevelCapExceeded(f"promotion past the last level t={t}")
            s = schedule.s(level)
            cand_sum, _ = session.pull(cand, s)
            level_pulls[level] += s
            incumbent = stored[level]
            if incumbent is None:
                stored[level] = cand
            else:
                inc_sum, _ = session.pull(incumbent, s)
                level_pulls[level] += s
                if cand_sum < inc_sum:
                    session.discard(cand)
                else:
                    session.discard(incumbent)
                    stored[level] = cand
            counters[level] += 1
            c = schedule.c(level)
            if c is None or counters[level] < c:
                break
            cand = stored[level]
            stored[level] = None
            counters[level] = 0
            if log is not None:
                log.append(f"promote arm={cand} from={level} to={level + 1}")
            level += 1

    chosen = next(stored[lv] for lv in range(t, 0, -1) if stored[lv] is not None)
    if log is not None:
        log.append(f"return arm={chosen}")
    return session.outcome(chosen, level_pulls, log)


def _run_king(session: StreamSession, schedule, offset: float,
              trace: bool) -> RunOutcome:
    level_pulls: Counter[int] = Counter()
    log: list[str] | None = [] if trace else None
    king = session.next_arm()
    if king is None:
        raise ValueError("empty stream")
    session.admit(king)
    budget = 0
    grant = schedule.b
    # the budget can never exceed n * b, so a level with s_l above that always defeats
    budget_ceiling = session.instance.n * grant

    while (arm := session.next_arm()) is not None:
        session.admit(arm)
        budget += grant
        level = 1
        while True:
            s = schedule.s(level)
            if budget < s:
                if log is not None:
                    log.append(f"defeat king={king} by={arm} level={level}")
                session.discard(king)
                king, budget = arm, 0
                break
            assert s <= budget_ceiling
            budget -= s
            king_sum, _ = session.pull(king, s)
            arm_sum, _ = session.pull(arm, s)
            level_pulls[level] += 2 * s
            if offset == 0.0:
                king_wins = king_sum > arm_sum
            else:
                king_wins = king_sum / s > arm_sum / s - offset
            if king_wins:
                session.discard(arm)
                break
            level += 1
    if log is not None:
        log.append(f"return king={king} budget={budget}")
    return session.outcome(king, level_pulls, log)


def run_king_budget(session: StreamSession, schedule: KingSchedule,
                    trace: bool = False) -> RunOutcome:
    """King with budget; the king survives a level when its mean beats the
    challenger's minus 0.495 * epsilon."""
    return _run_king(session, schedule, schedule.offset, trace)


def run_king_no_offset(session: StreamSession, schedule: NoOffsetSchedule,
                       trace: bool = False) -> RunOutcome:
    return _run_king(session, schedule, 0.0, trace)
