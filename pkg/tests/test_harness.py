from __future__ import annotations

import math

import pytest

from smsp import harness as hz
from smsp.errors import InvalidConfig, TrialError
from smsp.reduction import choose_p


def test_config_validation():
    with pytest.raises(InvalidConfig):
        hz.ExperimentConfig("partition-coverage", trials=0)
    with pytest.raises(InvalidConfig):
        hz.ExperimentConfig("partition-coverage", algorithm="magic")
    with pytest.raises(InvalidConfig):
        hz.ExperimentConfig("partition-coverage", linear="nope").resolve()


def test_resolve_auto_p():
    _, cfg, _ = hz.ExperimentConfig("partition-coverage").resolve()
    assert cfg.p == pytest.approx(1 / 3)
    _, cfg, _ = hz.ExperimentConfig("uniform3-coverage").resolve()
    assert cfg.p == pytest.approx(choose_p(4.0))
    _, cfg, _ = hz.ExperimentConfig("uniform3-coverage", p=0.2).resolve()
    assert cfg.p == 0.2


def test_single_trial_aggregate_equals_log():
    cfg = hz.ExperimentConfig("graphic-coverage", trials=1, seed=4)
    logs = []
    agg = hz.run_trials(cfg, on_log=lambda i, log: logs.append(log))
    (log,) = logs
    for s in hz.STATISTICS:
        assert agg.stats[s].mean == getattr(log, s)
        assert agg.stats[s].se == 0.0
    assert {u for u, fr in agg.acceptance.items() if fr == 1.0} == set(log.output)


def test_replay_is_bit_identical():
    cfg = hz.ExperimentConfig("partition-coverage", trials=300, seed=11)
    a, b = hz.run_trials(cfg), hz.run_trials(cfg)
    assert a.csv_rows() == b.csv_rows()


def test_frozen_aggregate():
    # golden values for seed 11, 500 trials (replayable bit for bit)
    agg = hz.run_trials(hz.ExperimentConfig("partition-coverage", trials=500, seed=11))
    assert agg.stats["f_output"].mean == pytest.approx(0.776, abs=1e-12)
    assert agg.stats["f_M"].mean == pytest.approx(6.478, abs=1e-12)
    assert agg.stats["w_N"].mean == pytest.approx(2.03, abs=1e-12)
    assert agg.stats["f_output"].se == pytest.approx(0.06075384810956621, rel=1e-9)


def test_pool_matches_inline():
    inline = hz.run_trials(hz.ExperimentConfig("uniform2-cut", trials=120, seed=2))
    pooled = hz.run_trials(hz.ExperimentConfig("uniform2-cut", trials=120, seed=2, workers=2))
    assert inline.csv_rows() == pooled.csv_rows()


def test_trial_errors_carry_index():
    # the monotone reduction refuses a non-monotone objective on the first trial
    cfg = hz.ExperimentConfig("uniform2-cut", trials=3, variant="monotone")
    with pytest.raises(TrialError) as info:
        hz.run_trials(cfg)
    assert info.value.trial == 0


def test_mean_se_and_fmt():
    s = hz.mean_se([1.0, 2.0, 3.0])
    assert s.mean == 2.0 and s.se == pytest.approx(1 / math.sqrt(3))
    assert hz.fmt(1 / 3) == "0.333333333333"
    assert hz.fmt(float("inf")) == "inf"
    assert hz.round12(2 / 3) == 0.666666666667
