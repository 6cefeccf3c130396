"""Deterministic toy environments with reset/step interfaces.

Both expose the same protocol the adapter consumes:

* ``names``        ordered tuple of state variable names,
* ``action_dim``   arity of the continuous action vector,
* ``reset(rng)``   -> initial state vector,
* ``step(action)`` -> (state, native_reward, done).

States are plain float vectors aligned with ``names``; every variable a
specification mentions must appear there.
"""

from __future__ import annotations

import numpy as np

GRAVITY = 9.8
CART_MASS = 1.0
POLE_MASS = 0.1
POLE_HALF_LENGTH = 0.5
FORCE_SCALE = 10.0
TICK = 0.02


class CartPoleEnv:
    """Cart-pole with a continuous push force and Euler integration.

    The pole starts near upright with a small seeded perturbation; an episode
    ends when the cart leaves the track or the pole falls past the declared
    angle range.  Substeps keep the physics stable while one env step spans
    several integrator ticks, so the monitored time grid stays coarse.
    """

    names = ("x", "xdot", "theta", "thetadot")
    action_dim = 1

    def __init__(self, substeps: int = 5):
        self.substeps = substeps
        self._state = np.zeros(4)

    def reset(self, rng: np.random.Generator) -> np.ndarray:
        self._state = rng.uniform(-0.05, 0.05, size=4)
        return self._state.copy()

    def step(self, action) -> tuple[np.ndarray, float, bool]:
        force = FORCE_SCALE * float(np.clip(np.asarray(action).reshape(-1)[0], -1.0, 1.0))
        x, xdot, theta, thetadot = self._state
        total = CART_MASS + POLE_MASS
        for _ in range(self.substeps):
            sin, cos = np.sin(theta), np.cos(theta)
            temp = (force + POLE_MASS * POLE_HALF_LENGTH * thetadot**2 * sin) / total
            theta_acc = (GRAVITY * sin - cos * temp) / (
                POLE_HALF_LENGTH * (4.0 / 3.0 - POLE_MASS * cos**2 / total)
            )
            x_acc = temp - POLE_MASS * POLE_HALF_LENGTH * theta_acc * cos / total
            x += TICK * xdot
            xdot += TICK * x_acc
            theta += TICK * thetadot
            thetadot += TICK * theta_acc
        self._state = np.array([x, xdot, theta, thetadot])
        done = abs(x) > 2.4 or abs(theta) > 0.21
        native = 1.0 if not done else 0.0
        return self._state.copy(), native, done


GOAL = np.array([1.5, 0.0])
GOAL_RADIUS = 0.3
HAZARDS = (np.array([0.0, 0.45]), np.array([0.0, -0.45]))
HAZARD_RADIUS = 0.2
ARENA = 2.0
SPEED = 0.15


class PointReachAvoidEnv:
    """Velocity-controlled point that must reach a goal disk while keeping
    clear of two hazard disks.  The monitored state carries the distances the
    specification talks about alongside the raw position."""

    names = ("px", "py", "dist_goal", "dist_obs")
    action_dim = 2

    def __init__(self):
        self._pos = np.zeros(2)

    def _observe(self) -> np.ndarray:
        dist_goal = float(np.linalg.norm(self._pos - GOAL))
        dist_obs = min(float(np.linalg.norm(self._pos - h)) for h in HAZARDS)
        return np.array([self._pos[0], self._pos[1], min(dist_goal, 4.0), min(dist_obs, 4.0)])

    def reset(self, rng: np.random.Generator) -> np.ndarray:
        self._pos = np.array([-1.5, 0.0]) + rng.uniform(-0.1, 0.1, size=2)
        return self._observe()

    def step(self, action) -> tuple[np.ndarray, float, bool]:
        v = np.clip(np.asarray(action, dtype=float).reshape(-1)[:2], -1.0, 1.0)
        self._pos = np.clip(self._pos + SPEED * v, -ARENA, ARENA)
        obs = self._observe()
        reached = obs[2] < GOAL_RADIUS
        native = -obs[2] + (10.0 if reached else 0.0)
        return obs, float(native), bool(reached)


ENVS = {"cartpole": CartPoleEnv, "reach_avoid": PointReachAvoidEnv}


def make_env(name: str):
    try:
        return ENVS[name]()
    except KeyError:
        raise ValueError(f"unknown environment {name!r}; choose from {sorted(ENVS)}") from None
