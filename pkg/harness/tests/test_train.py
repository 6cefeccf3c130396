import csv

import numpy as np
import pytest

from rlharness import TrainConfig, TrainingDiverged, make_env, train, wrap
from rlharness.train import write_curve

from conftest import TRAIN_SPEC


def _adapter(**kw):
    kw.setdefault("reward_mode", "cau")
    kw.setdefault("beta", 10.0)
    kw.setdefault("episode_horizon", 200.0)
    return wrap(make_env("cartpole"), TRAIN_SPEC, **kw)


def test_config_validation():
    with pytest.raises(ValueError, match="gamma"):
        TrainConfig(gamma=1.0)
    with pytest.raises(ValueError, match="gamma"):
        TrainConfig(gamma=-0.1)
    with pytest.raises(ValueError, match="reward_mode"):
        TrainConfig(reward_mode="best")
    with pytest.raises(ValueError, match="positive"):
        TrainConfig(episodes=0)


def test_reward_mode_mismatch_is_rejected():
    with pytest.raises(ValueError, match="adapter provides"):
        train(_adapter(reward_mode="cls", beta=None), TrainConfig(episodes=1, reward_mode="cau"))


def test_gamma_zero_is_well_defined():
    policy, curve = train(
        _adapter(), TrainConfig(episodes=2, max_steps_per_episode=30, gamma=0.0, seed=1)
    )
    assert len(curve) == 2
    assert all(np.isfinite(c[1]) for c in curve)
    assert np.all(np.isfinite(policy.net.params_flat()))


def test_same_seed_reproduces_the_curve():
    tc = TrainConfig(episodes=8, max_steps_per_episode=60, seed=11)
    _, first = train(_adapter(), tc)
    _, second = train(_adapter(), tc)
    assert first == second


def test_divergence_guard_aborts_loudly():
    tc = TrainConfig(
        episodes=50, max_steps_per_episode=200, critic_lr=1e4, actor_lr=0.0, seed=0
    )
    with pytest.raises(TrainingDiverged, match="TD error"):
        train(_adapter(), tc)


def test_smoke_learning_improves_over_100_episodes():
    # the acceptance ordering: later episodes collect more reward than early ones
    for seed in (0, 1, 2):
        adapter = _adapter()
        tc = TrainConfig(episodes=100, max_steps_per_episode=200, seed=seed,
                         reward_mode="cau", beta=10.0)
        _, curve = train(adapter, tc)
        returns = [c[1] for c in curve]
        first10 = float(np.mean(returns[:10]))
        last10 = float(np.mean(returns[-10:]))
        assert last10 > first10, f"seed {seed}: {first10} -> {last10}"


def test_curve_csv_round_trip(tmp_path):
    _, curve = train(_adapter(), TrainConfig(episodes=3, max_steps_per_episode=20, seed=2))
    path = tmp_path / "curve.csv"
    write_curve(curve, path)
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert [int(r["episode"]) for r in rows] == [0, 1, 2]
    assert float(rows[0]["cum_reward"]) == pytest.approx(curve[0][1])
    assert float(rows[-1]["moving_avg_50"]) == pytest.approx(curve[-1][2])
