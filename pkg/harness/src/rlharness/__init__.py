"""Actor-critic training harness over windowed temporal-logic rewards.

Environments are wrapped so the agent observes the last k raw states and is
rewarded with the monitoring core's causation distance (or the classical
upper bound, its smoothed variant, or the native reward as a baseline).
Training follows a one-step TD actor-critic; evaluation logs raw traces and
reports the core's episode metrics over them.
"""

from .adapter import REWARD_MODES, TauEnvAdapter, wrap
from .boundary import (
    BoundaryError,
    InProcessBoundary,
    LineProtocolBoundary,
    make_boundary,
)
from .envs import CartPoleEnv, PointReachAvoidEnv, make_env
from .evaluate import EvalResult, evaluate, rollout
from .nets import GaussianPolicy, MLP, QCritic
from .train import TrainConfig, TrainingDiverged, train, write_curve

__version__ = "0.1.0"

__all__ = [
    "BoundaryError",
    "CartPoleEnv",
    "EvalResult",
    "GaussianPolicy",
    "InProcessBoundary",
    "LineProtocolBoundary",
    "MLP",
    "PointReachAvoidEnv",
    "QCritic",
    "REWARD_MODES",
    "TauEnvAdapter",
    "TrainConfig",
    "TrainingDiverged",
    "evaluate",
    "make_boundary",
    "make_env",
    "rollout",
    "train",
    "wrap",
    "write_curve",
]
