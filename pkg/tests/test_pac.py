import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bandit_lab.core import Instance
from bandit_lab.instances import block_means_stream, linear_gap_stream
from bandit_lab.pac import (run_aggressive_promotion, run_king_budget, run_king_no_offset,
                            run_r_round)
from bandit_lab.schedules import (LevelCapExceeded, aggressive_schedule, no_offset_schedule,
                                  king_schedule, log_star, r_round_schedule)
from bandit_lab.stream import StreamOrder, begin_session


def one_hot(n, pos):
    means = [0.0] * n
    means[pos] = 1.0
    return Instance(tuple(means))


def strip(outcome):
    out = vars(outcome).copy()
    out.pop("wall_time_ms")
    return out


# ---- r-round selective promotion ---------------------------------------------------------

def test_r_round_single_arm():
    out = run_r_round(begin_session(Instance((0.3,)), capacity_m=2), r_round_schedule(1, 1, 0.5, 0.1))
    assert out.returned_arm == 0
    assert out.total_pulls == r_round_schedule(1, 1, 0.5, 0.1).s(1)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 400), st.data())
def test_r_round_finds_deterministic_best(n, data):
    r = data.draw(st.integers(1, log_star(n)))
    pos = data.draw(st.integers(0, n - 1))
    order = data.draw(st.one_of(st.none(), st.integers(0, 2**32)))
    out = run_r_round(begin_session(one_hot(n, pos), StreamOrder(order), r + 1, seed=1),
                      r_round_schedule(n, r, 0.5, 0.1))
    assert out.returned_arm == pos and out.true_gap == 0.0
    assert out.peak_residency <= r + 1


def test_r_round_exact_block_fill():
    # c_1 = 10 divides n = 1000, so level 1 is empty when the stream ends
    n = 1000
    sched = r_round_schedule(n, 2, 0.5, 0.1)
    assert n % sched.c(1) == 0
    out = run_r_round(begin_session(one_hot(n, 437), capacity_m=3, seed=0), sched, trace=True)
    assert out.returned_arm == 437
    assert sum(line.startswith("promote") for line in out.trace) == n // sched.c(1)
    assert not any(line.startswith("sweep") for line in out.trace)


def test_r_round_ties_favor_incoming_arm():
    # equal deterministic means: every arrival replaces the stored arm at level 1
    n = 50
    out = run_r_round(begin_session(Instance((1.0,) * n), capacity_m=2), r_round_schedule(n, 1, 0.5, 0.1))
    assert out.returned_arm == n - 1


def test_r_round_rejects_mismatched_schedule():
    with pytest.raises(ValueError):
        run_r_round(begin_session(Instance((0.5,) * 5)), r_round_schedule(6, 1, 0.5, 0.1))


def test_r_round_capacity_is_r_plus_one():
    rng = np.random.default_rng(3)
    inst = Instance(tuple(rng.random(3000).tolist()))
    for r in range(1, log_star(3000) + 1):
        out = run_r_round(begin_session(inst, StreamOrder.random(r), r + 1, seed=r),
                          r_round_schedule(3000, r, 0.5, 0.1))
        assert out.peak_residency <= r + 1


def test_r_round_is_deterministic():
    inst = Instance(tuple(np.random.default_rng(0).random(300).tolist()))
    runs = [strip(run_r_round(begin_session(inst, StreamOrder.random(4), 3, seed=8),
                              r_round_schedule(300, 2, 0.3, 0.1))) for _ in range(2)]
    assert runs[0] == runs[1]


# ---- king with budget and its no-offset variant -----------------------------------------

@pytest.mark.parametrize("run,make", [(run_king_budget, king_schedule),
                                      (run_king_no_offset, no_offset_schedule)])
def test_king_single_arm(run, make):
    out = run(begin_session(Instance((0.4,)), capacity_m=2), make(0.1, 0.1, 117))
    assert out.returned_arm == 0 and out.total_pulls == 0


@pytest.mark.parametrize("run,make", [(run_king_budget, king_schedule),
                                      (run_king_no_offset, no_offset_schedule)])
def test_king_keeps_mean_one_arm(run, make):
    out = run(begin_session(Instance((1.0, 0.0)), capacity_m=2), make(0.1, 0.1, 117, 40000))
    assert out.returned_arm == 0
    assert out.total_pulls == 2 * make(0.1, 0.1, 117, 40000).s(1)
    assert out.peak_residency == 2


def test_king_defeated_when_budget_short():
    # a mean-0 king loses level 1 to a mean-1 arm and cannot pay for level 2
    sched = king_schedule(0.1, 0.1, 1e-6, 40000)
    out = run_king_budget(begin_session(Instance((0.0, 1.0)), capacity_m=2, seed=0), sched,
                          trace=True)
    assert out.trace[0] == "defeat king=0 by=1 level=2"
    assert out.returned_arm == 1
    assert out.total_pulls == 2 * sched.s(1)


def test_king_trace_and_level_accounting():
    inst = linear_gap_stream(200, 0.1)
    out = run_king_budget(begin_session(inst, capacity_m=2, seed=4),
                          king_schedule(0.1, 0.1, 117, 40000), trace=True)
    assert sum(out.per_level_pulls.values()) == out.total_pulls
    assert out.trace[-1].startswith("return")


def test_king_offset_rule_favours_king():
    # equal deterministic means: the king wins every duel because 1 > 1 - offset
    out = run_king_budget(begin_session(Instance((1.0,) * 20), capacity_m=2),
                          king_schedule(0.1, 0.1, 117, 40000))
    assert out.returned_arm == 0


def test_no_offset_rule_needs_strict_win():
    # equal deterministic means: the king never strictly wins, so challengers climb levels
    sched = no_offset_schedule(0.1, 0.1, 117, 40000)
    out = run_king_no_offset(begin_session(Instance((1.0,) * 20), capacity_m=2), sched, trace=True)
    assert out.returned_arm != 0


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(0, 1), min_size=1, max_size=60), st.integers(0, 2**32))
def test_king_memory_is_two(means, seed):
    inst = Instance(tuple(means))
    for run, make in ((run_king_budget, king_schedule), (run_king_no_offset, no_offset_schedule)):
        out = run(begin_session(inst, StreamOrder.random(seed), 2, seed), make(0.2, 0.1, 117, 40000))
        assert out.peak_residency == min(2, inst.n)


def test_king_linear_gap_success():
    inst = linear_gap_stream(5001, 0.1)
    sched = king_schedule(0.1, 0.1, 117, 40000)
    wins = sum(run_king_budget(begin_session(inst, capacity_m=2, seed=s), sched).true_gap <= 0.1
               for s in range(50))
    assert wins >= 40


# ---- aggressive promotion ------------------------------------------------------------------

def test_aggressive_single_arm():
    out = run_aggressive_promotion(begin_session(Instance((0.2,)), capacity_m=3),
                                   aggressive_schedule(1, 0.1, 0.1))
    assert out.returned_arm == 0


def aggressive_pull_oracle(n, sched):
    """A block of c arrivals costs (2c - 1) s: only its first arrival finds the slot empty."""
    total, arrived = 0, n
    for level in range(1, sched.t + 1):
        if arrived == 0:
            break
        s, c = sched.s(level), sched.c(level)
        if c is None or arrived < c:
            return total + (2 * arrived - 1) * s
        full, rem = divmod(arrived, c)
        total += full * (2 * c - 1) * s + (2 * rem - 1) * s * (rem > 0)
        arrived = full
    return total


@pytest.mark.parametrize("n", [1, 3, 4, 5, 16, 17, 257, 300])
def test_aggressive_pull_accounting_equal_means(n):
    sched = aggressive_schedule(n, 0.1, 0.1, reduction_factor=40000, level_sizes=(4, 64))
    out = run_aggressive_promotion(begin_session(Instance((0.5,) * n), capacity_m=log_star(n) + 2),
                                   sched)
    assert out.total_pulls == aggressive_pull_oracle(n, sched)
    assert out.peak_residency <= math.ceil(log_star(n)) + 2


def test_aggressive_hits_level_cap():
    sched = aggressive_schedule(40, 0.1, 0.1, reduction_factor=40000, level_sizes=(2, 2, 2, 2, 2))
    with pytest.raises(LevelCapExceeded):
        run_aggressive_promotion(begin_session(Instance((0.5,) * 40), capacity_m=10), sched)


def test_aggressive_fails_more_often_than_r_round():
    """Paired trials on the desk-scale counterexample stream."""
    inst = block_means_stream(0.1, 4, 64, 257)
    agg_sched = aggressive_schedule(257, 0.1, 0.1, reduction_factor=40000, level_sizes=(4, 64))
    rr_sched = r_round_schedule(257, 2, 0.1, 0.1)
    agg_fail = rr_fail = 0
    for seed in range(200):
        agg = run_aggressive_promotion(begin_session(inst, capacity_m=6, seed=seed), agg_sched)
        rr = run_r_round(begin_session(inst, capacity_m=3, seed=seed), rr_sched)
        agg_fail += agg.true_gap > 0.1
        rr_fail += rr.true_gap > 0.1
    assert agg_fail > rr_fail


# ---- comparison and challenge lemmas ------------------------------------------------------

def test_challenge_level_lemma_full_scale():
    """Gap 0.5 eps, unreduced s_1 samples each: P(king mean <= challenger mean + 0.495 eps)."""
    eps, delta, reps = 0.1, 0.1, 100_000
    s = king_schedule(eps, delta, 117).s(1)
    rng = np.random.default_rng(77)
    mu1, mu2 = 0.5, 0.5 - 0.5 * eps
    m1 = rng.binomial(s, mu1, reps) / s
    m2 = rng.binomial(s, mu2, reps) / s
    rate = np.mean(m1 <= m2 + 0.495 * eps)
    bound = 2 * math.exp(-math.log(4 / delta) * 3)
    hoeffding = math.exp(-s * (0.005 * eps) ** 2)
    assert hoeffding <= bound
    assert rate <= hoeffding + 3 * math.sqrt(hoeffding * (1 - hoeffding) / reps) + 1 / reps
