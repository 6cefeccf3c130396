"""One-step actor-critic over windowed spec rewards.

Per step: act, observe the window reward r, sample the next action, form the
TD error delta = r + gamma * Q(s', a') - Q(s, a), then move the critic along
delta * grad Q and the actor along delta * grad log pi.  Everything is
driven by one seeded generator, so a config maps to exactly one run.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .adapter import REWARD_MODES, TauEnvAdapter
from .nets import GaussianPolicy, QCritic

CURVE_FIELDS = ("episode", "cum_reward", "moving_avg_50")
DIVERGENCE_LIMIT = 1e6
DIVERGENCE_PATIENCE = 100


class TrainingDiverged(RuntimeError):
    pass


@dataclass(frozen=True)
class TrainConfig:
    episodes: int = 100
    max_steps_per_episode: int = 200
    actor_lr: float = 1e-3
    critic_lr: float = 1e-2
    gamma: float = 0.95
    seed: int = 0
    reward_mode: str = "cau"
    beta: float = 10.0

    def __post_init__(self):
        if not 0.0 <= self.gamma < 1.0:
            raise ValueError(f"gamma must be in [0, 1), got {self.gamma}")
        if self.episodes < 1 or self.max_steps_per_episode < 1:
            raise ValueError("episodes and max_steps_per_episode must be positive")
        if self.reward_mode not in REWARD_MODES:
            raise ValueError(f"reward_mode must be one of {REWARD_MODES}")


def train(
    adapter: TauEnvAdapter, tc: TrainConfig
) -> tuple[GaussianPolicy, list[tuple[int, float, float]]]:
    """Run tc.episodes episodes; return the policy and the learning curve.

    Curve rows are (episode, cum_reward, moving_avg_50).  Aborts with a
    diagnostic when the TD error stays past the divergence limit for 100
    consecutive steps.
    """
    if adapter.reward_mode != tc.reward_mode:
        raise ValueError(
            f"adapter provides {adapter.reward_mode!r} rewards but the config asks "
            f"for {tc.reward_mode!r}"
        )
    rng = np.random.default_rng(tc.seed)
    policy = GaussianPolicy(adapter.observation_dim, adapter.action_dim, rng)
    critic = QCritic(adapter.observation_dim, adapter.action_dim, rng)

    curve: list[tuple[int, float, float]] = []
    recent: list[float] = []
    bad_streak = 0

    for episode in range(tc.episodes):
        obs = adapter.reset(rng)
        action = policy.sample(obs, rng)
        cum_reward = 0.0
        for _ in range(tc.max_steps_per_episode):
            next_obs, reward, done, _ = adapter.step(action)
            cum_reward += reward
            next_action = policy.sample(next_obs, rng)
            q = critic.value(obs, action)
            target = reward if done else reward + tc.gamma * critic.value(next_obs, next_action)
            delta = target - q
            if abs(delta) > DIVERGENCE_LIMIT or not np.isfinite(delta):
                # reject the update so one blown step cannot poison the nets
                bad_streak += 1
                if bad_streak >= DIVERGENCE_PATIENCE:
                    raise TrainingDiverged(
                        f"TD error {delta:.3g} past {DIVERGENCE_LIMIT:g} for "
                        f"{DIVERGENCE_PATIENCE} consecutive steps (episode {episode})"
                    )
            else:
                bad_streak = 0
                critic.update(obs, action, tc.critic_lr * delta)
                policy.update(obs, action, tc.actor_lr * delta)
            obs, action = next_obs, next_action
            if done:
                break
        recent.append(cum_reward)
        if len(recent) > 50:
            recent.pop(0)
        curve.append((episode, cum_reward, float(np.mean(recent))))
    return policy, curve


def write_curve(curve, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CURVE_FIELDS)
        for episode, cum_reward, avg in curve:
            writer.writerow([episode, f"{cum_reward:.17g}", f"{avg:.17g}"])
