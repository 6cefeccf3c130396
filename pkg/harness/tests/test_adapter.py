import numpy as np
import pytest

from stlmon import CausationConfig, WindowEvaluator, load_spec, project_original

from rlharness import (
    BoundaryError,
    LineProtocolBoundary,
    make_env,
    wrap,
)

from conftest import CARTPOLE_SPEC, REACH_AVOID_SPEC


def _random_rollout(adapter, rng, steps):
    """Steps the adapter with random actions; returns logged data."""
    obs = adapter.reset(rng)
    observations = [obs]
    windows = [adapter.window.states.copy()]
    states = [adapter.window.states[-1].copy()]
    rewards = []
    for _ in range(steps):
        action = rng.uniform(-1, 1, size=adapter.action_dim)
        obs, reward, done, info = adapter.step(action)
        observations.append(obs)
        windows.append(adapter.window.states.copy())
        states.append(info["state"])
        rewards.append(reward)
        if done:
            break
    return observations, windows, np.array(states), rewards


def test_reset_replicates_initial_state():
    adapter = wrap(make_env("cartpole"), CARTPOLE_SPEC, episode_horizon=200.0)
    obs = adapter.reset(np.random.default_rng(3))
    stacked = obs.reshape(adapter.k, adapter.dim)
    assert adapter.k == 11
    assert np.array_equal(stacked, np.tile(stacked[0], (adapter.k, 1)))


def test_observation_is_the_last_k_states():
    adapter = wrap(make_env("cartpole"), CARTPOLE_SPEC, episode_horizon=200.0)
    rng = np.random.default_rng(4)
    observations, _, states, _ = _random_rollout(adapter, rng, 30)
    k = adapter.k
    for t, obs in enumerate(observations):
        window = obs.reshape(k, adapter.dim)
        # left-padded with the initial state until k real samples exist
        expected = np.vstack(
            [np.tile(states[0], (max(k - t - 1, 0), 1)), states[max(t - k + 1, 0) : t + 1]]
        )
        assert np.array_equal(window, expected), t


def test_projection_recovers_raw_trajectory():
    adapter = wrap(make_env("reach_avoid"), REACH_AVOID_SPEC, episode_horizon=60.0)
    rng = np.random.default_rng(5)
    _, windows, states, _ = _random_rollout(adapter, rng, 25)
    assert np.array_equal(project_original(windows), states)


def test_reward_parity_with_core_recomputation():
    # five logged rollouts across both environments and reward shapes
    cases = [
        ("cartpole", CARTPOLE_SPEC, 200.0, "cau", 10.0, 0),
        ("cartpole", CARTPOLE_SPEC, 200.0, "cau", 10.0, 1),
        ("cartpole", CARTPOLE_SPEC, 200.0, "lse", 10.0, 2),
        ("reach_avoid", REACH_AVOID_SPEC, 60.0, "cau", 10.0, 3),
        ("reach_avoid", REACH_AVOID_SPEC, 60.0, "cau", None, 4),
    ]
    for env_name, spec, horizon, mode, beta, seed in cases:
        env = make_env(env_name)
        adapter = wrap(
            env, spec, reward_mode=mode, beta=beta, episode_horizon=horizon
        )
        rng = np.random.default_rng(seed)
        _, windows, _, rewards = _random_rollout(adapter, rng, 40)
        f, decls = load_spec(spec)
        smooth = beta is not None if mode == "cau" else mode == "lse"
        cfg = (
            CausationConfig(mode="smooth", beta=beta, episode_horizon=horizon)
            if smooth
            else CausationConfig(episode_horizon=horizon)
        )
        ev = WindowEvaluator(f, decls, env.names, adapter.dt, adapter.k, cfg)
        column = "causation" if mode == "cau" else "robust_upper"
        recomputed = ev.evaluate(np.stack(windows[1:]))[column]
        assert len(rewards) == len(recomputed)
        for got, want in zip(rewards, recomputed):
            assert got == pytest.approx(want, abs=1e-9)


def test_cls_reward_equals_reachable_upper_bound():
    env = make_env("cartpole")
    adapter = wrap(env, CARTPOLE_SPEC, reward_mode="cls", beta=None, episode_horizon=200.0)
    rng = np.random.default_rng(6)
    _, windows, _, rewards = _random_rollout(adapter, rng, 25)
    f, decls = load_spec(CARTPOLE_SPEC)
    ev = WindowEvaluator(
        f, decls, env.names, adapter.dt, adapter.k, CausationConfig(episode_horizon=200.0)
    )
    uppers = ev.evaluate(np.stack(windows[1:]))["robust_upper"]
    assert rewards == pytest.approx(list(uppers), abs=1e-9)


def test_bas_mode_passes_native_reward_through():
    adapter = wrap(make_env("cartpole"), CARTPOLE_SPEC, reward_mode="bas", episode_horizon=200.0)
    rng = np.random.default_rng(7)
    adapter.reset(rng)
    for _ in range(10):
        _, reward, done, info = adapter.step(rng.uniform(-1, 1, size=1))
        assert reward == info["native"]
        if done:
            break


def test_spec_variables_must_exist_in_environment():
    with pytest.raises(ValueError, match="dist_goal"):
        wrap(make_env("cartpole"), REACH_AVOID_SPEC, episode_horizon=60.0)


def test_line_protocol_matches_in_process():
    env = make_env("cartpole")
    inproc = wrap(
        env, CARTPOLE_SPEC, reward_mode="cau", beta=10.0, episode_horizon=200.0
    )
    rng = np.random.default_rng(8)
    _, windows, _, rewards = _random_rollout(inproc, rng, 20)
    remote = LineProtocolBoundary(
        {"main": CARTPOLE_SPEC}, env.names, inproc.dt, inproc.k, 200.0
    )
    try:
        for window, want in zip(windows[1:], rewards):
            got = remote.reward(window, "main", "cau", 10.0)
            assert got == pytest.approx(want, abs=1e-9)
        with pytest.raises(BoundaryError, match="unknown spec id"):
            remote.reward(windows[1], "nope", "cau", 10.0)
    finally:
        remote.close()


def test_dead_reward_server_raises_not_zero():
    env = make_env("cartpole")
    remote = LineProtocolBoundary({"main": CARTPOLE_SPEC}, env.names, 1.0, 11, 200.0)
    window = np.zeros((11, 4))
    assert np.isfinite(remote.reward(window, "main", "cau", 10.0))
    remote.close()
    with pytest.raises(BoundaryError):
        remote.reward(window, "main", "cau", 10.0)
