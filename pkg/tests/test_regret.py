import csv
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bandit_lab.core import Instance
from bandit_lab.instances import lb_family
from bandit_lab.regret import (RegretTrace, cumulative_regret, exploration_pulls, run_ucb1,
                               run_uniform_exploration, write_trace_csv)
from bandit_lab.stream import StreamOrder, begin_session

segments = st.lists(st.tuples(st.integers(0, 5), st.integers(1, 50)), max_size=30)
six_means = st.lists(st.floats(0, 1), min_size=6, max_size=6)


def trace_of(segs):
    tr = RegretTrace(sum(c for _, c in segs))
    for arm, count in segs:
        tr.append(arm, count)
    return tr


def explore(inst, T, kappa=1.0, seed=0, order=None):
    return run_uniform_exploration(begin_session(inst, StreamOrder(order), 2, seed), T, kappa)


def test_exploration_count_closed_form():
    assert exploration_pulls(100, 10**6) == 1259
    assert exploration_pulls(100, 10**6) == math.ceil(1e4 ** (2 / 3) * math.log2(1e6) ** (1 / 3))


def test_deterministic_best_arm_regret():
    n, T = 10, 10**5
    means = [0.0] * n
    means[6] = 1.0
    trace, out = explore(Instance(tuple(means)), T)
    e = exploration_pulls(n, T)
    assert out.returned_arm == 6
    assert cumulative_regret(trace, Instance(tuple(means))) == (n - 1) * e
    assert trace.length == T


def test_equal_means_zero_regret():
    inst = Instance((0.4,) * 7)
    trace, _ = explore(inst, 5000)
    assert cumulative_regret(trace, inst) == 0


def test_exploration_truncates_at_horizon():
    inst = Instance(tuple(np.linspace(0.1, 0.9, 10).tolist()))
    e = exploration_pulls(10, 20)
    trace, out = explore(inst, 20)
    assert trace.length == 20
    explored = 20 // e
    assert [a for a, _ in trace.segments][:explored] == list(range(explored))
    assert out.peak_residency == 2


def test_horizon_shorter_than_stream():
    with pytest.raises(ValueError):
        explore(Instance((0.5,) * 5), 4)
    with pytest.raises(ValueError):
        run_ucb1(Instance((0.5,) * 5), 4)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(0, 1), min_size=1, max_size=30), st.integers(30, 5000),
       st.floats(0.1, 3), st.integers(0, 2**32))
def test_exploration_trace_covers_horizon(means, extra, kappa, seed):
    inst = Instance(tuple(means))
    T = inst.n + extra
    trace, out = explore(inst, T, kappa, seed, seed)
    assert trace.length == T == out.total_pulls
    second_explored = inst.n > 1 and 2 * exploration_pulls(inst.n, T, kappa) <= T
    assert out.peak_residency == (2 if second_explored else 1)
    assert np.all(np.diff(trace.cumulative(inst)) >= -1e-12)


def test_ucb1_single_arm():
    trace, _ = run_ucb1(Instance((0.3,)), 1000, 0)
    assert cumulative_regret(trace, Instance((0.3,))) == 0


def test_ucb1_equal_means():
    inst = Instance((0.5,) * 4)
    trace, out = run_ucb1(inst, 2000, 1)
    assert cumulative_regret(trace, inst) == 0
    assert out.peak_residency == 4


def test_ucb1_first_pulls_each_arm_once():
    inst = Instance((0.2, 0.8, 0.5))
    trace, _ = run_ucb1(inst, 50, 3)
    assert trace.pulled()[:3].tolist() == [0, 1, 2]


def test_ucb1_regret_is_far_sublinear():
    inst = Instance((0.9, 0.1))
    T = 10**5
    regrets = [cumulative_regret(run_ucb1(inst, T, seed)[0], inst) for seed in range(100)]
    assert np.mean(regrets) <= 0.05 * T


def test_regret_best_arm_only():
    inst = Instance((0.2, 0.9))
    assert cumulative_regret(trace_of([(1, 1000)]), inst) == 0


def test_regret_fixed_gap():
    inst = Instance((0.9, 0.6))
    assert cumulative_regret(trace_of([(1, 10)]), inst) == pytest.approx(3.0, abs=1e-12)


@given(six_means, segments)
def test_regret_matches_brute_force(means, segs):
    inst = Instance(tuple(means))
    tr = trace_of(segs)
    best = max(means)
    brute = math.fsum(best - means[a] for a in tr.pulled().tolist())
    assert cumulative_regret(tr, inst) == pytest.approx(brute, abs=1e-9)
    if tr.length:
        cum = tr.cumulative(inst)
        assert cum[-1] == pytest.approx(brute, abs=1e-9)
        assert np.all(np.diff(cum) >= -1e-12)


@given(six_means, segments, segments)
def test_regret_is_additive(means, a, b):
    inst = Instance(tuple(means))
    ta, tb = trace_of(a), trace_of(b)
    joined = ta.concat(tb)
    assert joined.length == ta.length + tb.length
    assert cumulative_regret(joined, inst) == pytest.approx(
        cumulative_regret(ta, inst) + cumulative_regret(tb, inst), abs=1e-9)


def test_regret_rejects_bad_arm():
    with pytest.raises(IndexError):
        cumulative_regret(trace_of([(3, 2)]), Instance((0.1, 0.2)))


def test_trace_csv_is_downsampled(tmp_path):
    inst = lb_family(4, 10**6, 0)
    trace, _ = explore(inst, 10**6)
    path = tmp_path / "trace.csv"
    write_trace_csv(trace, inst, path)
    with open(path) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) <= 10**4
    assert int(rows[0]["t"]) == 1 and int(rows[-1]["t"]) == 10**6
    assert float(rows[-1]["cumulative_regret"]) == pytest.approx(cumulative_regret(trace, inst))
    pulled = trace.pulled()
    for row in rows[:: len(rows) // 20]:
        assert int(row["arm"]) == pulled[int(row["t"]) - 1]


def test_trace_csv_short_trace_keeps_every_step(tmp_path):
    inst = Instance((0.5, 0.7))
    tr = trace_of([(0, 3), (1, 4)])
    write_trace_csv(tr, inst, tmp_path / "t.csv")
    rows = list(csv.reader(open(tmp_path / "t.csv")))
    assert rows[0] == ["t", "arm", "cumulative_regret"]
    assert [r[1] for r in rows[1:]] == ["0"] * 3 + ["1"] * 4
