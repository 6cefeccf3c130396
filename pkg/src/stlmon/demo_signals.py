"""A small built-in episode used by the demos and tests.

A vehicle must either keep its speed above a floor or be actively
accelerating back toward it.  The episode cruises, brakes through the floor
while still decelerating (a genuine violation), then recovers: speed climbs
back while the controller accelerates.  The trace is hand shaped so that the
interesting effects are visible at a glance:

* monitoring the robustness upper bound, the verdict locks in at the first
  violation and never moves again,
* the causation distance instead tracks the recovery, increasing strictly
  once the controller starts correcting.
"""

from __future__ import annotations

import numpy as np

from .formula import Formula, VariableDeclarations
from .parser import parse_formula
from .trace import SampledTrace

BRAKING_RECOVERY_SPEC = "G[0,100] (speed > 5 || accel > 0)"

_SPEED = [15.0] * 11 + [14, 13, 12, 10.5, 9, 7.5, 6.5, 5.5, 4.5, 4, 5.5, 6.5, 8, 9, 10]
_ACCEL = [0.0] * 11 + [-1, -1, -1, -1.5, -1.5, -1.5, -1, -1, -1, -0.5, 0.5, 1, 1.5, 1, -2]


def braking_recovery_declarations() -> VariableDeclarations:
    return VariableDeclarations.of(speed=(0.0, 20.0), accel=(-5.0, 5.0))


def braking_recovery_formula() -> Formula:
    return parse_formula(BRAKING_RECOVERY_SPEC, braking_recovery_declarations())


def braking_recovery_trace(dt: float = 1.0) -> SampledTrace:
    samples = np.column_stack([_SPEED, _ACCEL])
    return SampledTrace(dt, ("speed", "accel"), samples)
