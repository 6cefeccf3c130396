"""Window-stacked environment wrapper feeding spec rewards to the agent.

The agent sees the last k raw states flattened into one observation, which
restores the Markov property for rewards computed over sampling windows.
Each step pushes the fresh state into the rolling window and asks the reward
boundary to score it; `bas` skips the boundary and passes the inner
environment's native reward through.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from stlmon import (
    aggregation_k,
    formula_variables,
    load_spec,
    sampling_window_upper,
    TauWindow,
    to_nnf,
)

from .boundary import make_boundary

REWARD_MODES = ("cau", "cls", "lse", "bas")


class TauEnvAdapter:
    """reset/step interface over windows of the wrapped environment."""

    def __init__(
        self,
        env,
        spec_id: str,
        boundary,
        k: int,
        dt: float = 1.0,
        reward_mode: str = "cau",
        beta: float | None = 10.0,
    ):
        if reward_mode not in REWARD_MODES:
            raise ValueError(f"reward_mode must be one of {REWARD_MODES}, got {reward_mode!r}")
        self.env = env
        self.spec_id = spec_id
        self.boundary = boundary
        self.k = int(k)
        self.dt = float(dt)
        self.reward_mode = reward_mode
        self.beta = beta
        self.dim = len(env.names)
        self.window = TauWindow(self.k, self.dim)

    @property
    def observation_dim(self) -> int:
        return self.k * self.dim

    @property
    def action_dim(self) -> int:
        return self.env.action_dim

    def _reward(self) -> float:
        return self.boundary.reward(self.window.states, self.spec_id, self.reward_mode, self.beta)

    def reset(self, rng: np.random.Generator) -> np.ndarray:
        state = self.env.reset(rng)
        self.window = TauWindow(self.k, self.dim)
        self.window.push(state)
        return self.window.flat()

    def step(self, action) -> tuple[np.ndarray, float, bool, dict]:
        state, native, done = self.env.step(action)
        self.window.push(state)
        reward = native if self.reward_mode == "bas" else self._reward()
        return self.window.flat(), float(reward), bool(done), {"state": state, "native": native}


def wrap(
    env,
    spec_path: str | Path,
    *,
    reward_mode: str = "cau",
    beta: float | None = 10.0,
    dt: float = 1.0,
    episode_horizon: float | None = None,
    boundary_kind: str = "inprocess",
    spec_id: str = "main",
) -> TauEnvAdapter:
    """Build the adapter for one spec file, sizing the window from the spec.

    The window length k comes from the spec body's sampling window; every
    variable the spec mentions must be produced by the environment.
    """
    f, decls = load_spec(spec_path)
    missing = sorted(set(formula_variables(f)) - set(env.names))
    if missing:
        raise ValueError(
            f"spec variables {missing} are not produced by the environment (has {list(env.names)})"
        )
    k = aggregation_k(sampling_window_upper(to_nnf(f), episode_horizon), dt)
    boundary = make_boundary(
        boundary_kind, {spec_id: spec_path}, env.names, dt, k, episode_horizon
    )
    return TauEnvAdapter(env, spec_id, boundary, k, dt, reward_mode, beta)
