"""Policy evaluation: deterministic rollouts, trace logging, core metrics.

Rollouts use the policy mean (no exploration noise).  Every episode's raw
state sequence is written as a trace CSV, and the metrics come from the
monitoring core's episode reports over exactly those files, so a re-score
through the stlmon CLI must agree to the last bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from stlmon import SampledTrace, aggregate_metrics, episode_report, load_spec

from .adapter import TauEnvAdapter


@dataclass(frozen=True)
class EvalResult:
    summary: dict
    trace_paths: tuple[Path, ...]


def rollout(
    adapter: TauEnvAdapter, policy, rng: np.random.Generator, max_steps: int
) -> tuple[np.ndarray, list[float]]:
    """One mean-action episode; returns the raw state sequence and rewards."""
    obs = adapter.reset(rng)
    states = [adapter.window.states[-1].copy()]
    rewards: list[float] = []
    for _ in range(max_steps):
        action = policy.mean(obs)
        obs, reward, done, info = adapter.step(action)
        states.append(info["state"])
        rewards.append(reward)
        if done:
            break
    return np.array(states), rewards


def evaluate(
    policy,
    adapter: TauEnvAdapter,
    n_episodes: int,
    out_dir: str | Path,
    *,
    spec_path: str | Path,
    max_steps: int = 200,
    episode_horizon: float | None = None,
    cost: float = 1.0,
    base_seed: int = 10_000,
) -> EvalResult:
    """Roll out n_episodes, log traces, and aggregate core episode reports."""
    if n_episodes < 1:
        raise ValueError("n_episodes must be at least 1")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    f, decls = load_spec(spec_path)

    reports = []
    paths = []
    for i in range(n_episodes):
        rng = np.random.default_rng(base_seed + i)
        states, _ = rollout(adapter, policy, rng, max_steps)
        trace = SampledTrace(adapter.dt, adapter.env.names, states)
        path = out / f"episode_{i:03d}.csv"
        trace.write_csv(path)
        paths.append(path)
        reports.append(
            episode_report(trace, f, decls, cost=cost, horizon=episode_horizon)
        )
    return EvalResult(aggregate_metrics(reports), tuple(paths))
