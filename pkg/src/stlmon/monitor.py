"""Step-by-step monitoring of episodes and aggregate metrics.

Every trace step yields one record holding the per-step value under the
selected reward mode plus the reachable robustness bounds:

* ``cau`` - the violation causation distance (exact, or smooth with --smooth),
* ``cls`` - the reachable robustness upper bound,
* ``lse`` - the log-sum-exp smoothed counterpart of that upper bound.

Without a window length the values are computed against the growing prefix,
anchored at time 0; with one, each step is scored from its own re-indexed
window of the last k samples, which keeps per-step cost constant on long
episodes.  The robustness bound columns follow the same regime.

The episode verdict is always the exact offline robustness of the complete
trace: exit code 0 when the episode satisfies the specification, 1 when it
violates it.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Iterator

import numpy as np

from .formula import (
    Always,
    And,
    Atom,
    Eventually,
    Formula,
    TrueNode,
    Until,
    VariableDeclarations,
    clip_unbounded,
    has_unbounded,
    to_nnf,
)
from .semantics import (
    CausationConfig,
    _PrefixEvaluator,
    grid_index,
    interval_offsets,
    offline_robustness,
    _OfflineEvaluator,
)
from .trace import SampledTrace
from .window import WindowEvaluator

REWARD_MODES = ("cau", "cls", "lse")


@dataclass(frozen=True)
class StepRecord:
    step: int
    time: float
    causation: float
    robust_lower: float
    robust_upper: float
    reward_mode: str
    smooth: bool
    beta: float | None = None

    def to_json_dict(self) -> dict:
        d = asdict(self)
        if self.beta is None:
            del d["beta"]
        return d


@dataclass(frozen=True)
class EpisodeReport:
    full_sat: int
    safety_sat: int
    cost_return: float
    episode_length: int

    def to_json_dict(self) -> dict:
        return asdict(self)


def prepare(f: Formula, trace_duration: float, horizon: float | None) -> Formula:
    """Normal form used by all evaluation paths: NNF with finite intervals."""
    nf = to_nnf(f)
    if has_unbounded(nf):
        nf = clip_unbounded(nf, trace_duration if horizon is None else horizon)
    return nf


def _flatten_conjuncts(f: Formula) -> list[Formula]:
    if isinstance(f, And):
        return _flatten_conjuncts(f.left) + _flatten_conjuncts(f.right)
    return [f]


def _has_liveness(f: Formula) -> bool:
    if isinstance(f, (TrueNode, Atom)):
        return False
    if isinstance(f, (Eventually, Until)):
        return True
    if isinstance(f, Always):
        return _has_liveness(f.operand)
    return _has_liveness(f.left) or _has_liveness(f.right)


def split_safety(f: Formula) -> Formula | None:
    """Safety portion of a specification.

    For an always-rooted formula, the body's conjuncts that contain no
    eventually/until operator form the per-instant safety condition and the
    result is the root always over their conjunction.  For a top-level
    conjunction (reach/avoid style), the liveness-free conjuncts are kept as
    they are.  Returns None when no such portion exists.
    """
    if not _has_liveness(f):
        return f
    if isinstance(f, And):
        safe = [c for c in _flatten_conjuncts(f) if not _has_liveness(c)]
    elif isinstance(f, Always):
        safe = [c for c in _flatten_conjuncts(f.operand) if not _has_liveness(c)]
        if safe:
            body = safe[0]
            for c in safe[1:]:
                body = And(body, c)
            return Always(f.interval, body)
        return None
    else:
        return None
    if not safe:
        return None
    body = safe[0]
    for c in safe[1:]:
        body = And(body, c)
    return body


def instantaneous_margins(
    trace: SampledTrace, safety: Formula, decls: VariableDeclarations | None
) -> np.ndarray:
    """Per-sample margin of the safety body inside its root window."""
    if isinstance(safety, Always):
        body = safety.operand
        li, ui = interval_offsets(safety.interval.lower, safety.interval.upper, trace.dt)
        lo, hi = max(li, 0), min(ui, len(trace) - 1)
    else:
        body = safety
        lo, hi = 0, len(trace) - 1
    vals = _OfflineEvaluator(trace, decls).values(body)
    if lo > hi:
        return np.empty(0)
    return vals[lo : hi + 1]


def episode_report(
    trace: SampledTrace,
    f: Formula,
    decls: VariableDeclarations | None,
    *,
    safety: Formula | None = None,
    cost: float = 1.0,
    horizon: float | None = None,
) -> EpisodeReport:
    nf = prepare(f, trace.duration, horizon)
    rho = offline_robustness(trace, nf, 0.0, decls)
    full_sat = int(rho >= 0.0)
    if safety is None:
        safety = split_safety(nf)
    else:
        safety = prepare(safety, trace.duration, horizon)
    if safety is None:
        safety_sat = full_sat
        violations = 0
    else:
        safety_sat = int(offline_robustness(trace, safety, 0.0, decls) >= 0.0)
        violations = int((instantaneous_margins(trace, safety, decls) < 0.0).sum())
    return EpisodeReport(full_sat, safety_sat, float(cost) * violations, len(trace))


def iter_step_records(
    trace: SampledTrace,
    f: Formula,
    decls: VariableDeclarations | None,
    *,
    reward_mode: str = "cau",
    smooth: bool = False,
    beta: float = 10.0,
    window_k: int | None = None,
    horizon: float | None = None,
    chunk: int = 4096,
) -> Iterator[StepRecord]:
    """One record per trace step, oldest first.

    The sequence is a pure function of the inputs: streaming it online and
    replaying it offline produce exactly the same records.
    """
    if reward_mode not in REWARD_MODES:
        raise ValueError(f"reward_mode must be one of {REWARD_MODES}, got {reward_mode!r}")
    nf = prepare(f, trace.duration, horizon)
    wants_smooth_value = (smooth and reward_mode == "cau") or reward_mode == "lse"
    label = reward_mode.upper()
    rec_beta = beta if wants_smooth_value else None
    if window_k is not None:
        yield from _windowed_records(
            trace, nf, decls, reward_mode, wants_smooth_value, beta, window_k, horizon, chunk, label
        )
        return
    for b in range(len(trace)):
        prefix = trace.prefix(b)
        exact = _PrefixEvaluator(prefix, nf, decls)
        lo, hi = exact.interval(nf, 0)
        if reward_mode == "cls":
            value = hi
        elif reward_mode == "lse":
            value = _PrefixEvaluator(prefix, nf, decls, beta=beta).interval(nf, 0)[1]
        elif wants_smooth_value:
            value = _PrefixEvaluator(prefix, nf, decls, beta=beta).causation(nf, 0)
        else:
            value = exact.causation(nf, 0)
        yield StepRecord(
            step=b,
            time=b * trace.dt,
            causation=float(value),
            robust_lower=float(lo),
            robust_upper=float(hi),
            reward_mode=label,
            smooth=wants_smooth_value,
            beta=rec_beta,
        )


def _windowed_records(
    trace, nf, decls, reward_mode, wants_smooth, beta, k, horizon, chunk, label
) -> Iterator[StepRecord]:
    cfg_exact = CausationConfig(mode="exact", episode_horizon=horizon)
    exact_ev = WindowEvaluator(nf, decls, trace.names, trace.dt, k, cfg_exact)
    smooth_ev = None
    if wants_smooth:
        cfg_smooth = CausationConfig(mode="smooth", beta=beta, episode_horizon=horizon)
        smooth_ev = WindowEvaluator(nf, decls, trace.names, trace.dt, k, cfg_smooth)
    n = len(trace)
    padded = np.concatenate([np.repeat(trace.samples[:1], k - 1, axis=0), trace.samples])
    view = np.lib.stride_tricks.sliding_window_view(padded, k, axis=0).transpose(0, 2, 1)
    for start in range(0, n, chunk):
        batch = view[start : min(start + chunk, n)]
        out = exact_ev.evaluate(batch)
        if reward_mode == "cau" and not wants_smooth:
            values = out["causation"]
        elif reward_mode == "cls":
            values = out["robust_upper"]
        else:
            smooth_out = smooth_ev.evaluate(batch)
            values = smooth_out["causation"] if reward_mode == "cau" else smooth_out["robust_upper"]
        for i in range(batch.shape[0]):
            b = start + i
            yield StepRecord(
                step=b,
                time=b * trace.dt,
                causation=float(values[i]),
                robust_lower=float(out["robust_lower"][i]),
                robust_upper=float(out["robust_upper"][i]),
                reward_mode=label,
                smooth=wants_smooth,
                beta=beta if wants_smooth else None,
            )


def aggregate_metrics(reports: list[EpisodeReport]) -> dict:
    """Population mean and standard deviation of each episode metric."""
    if not reports:
        raise ValueError("no episodes to aggregate")
    fields = {
        "full_sat": np.array([r.full_sat for r in reports], dtype=float),
        "safety_sat": np.array([r.safety_sat for r in reports], dtype=float),
        "cost_return": np.array([r.cost_return for r in reports], dtype=float),
    }
    out = {"episodes": len(reports)}
    for name, xs in fields.items():
        out[name] = {"mean": float(xs.mean()), "std": float(xs.std())}
    return out
