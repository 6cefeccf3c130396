"""Quantitative semantics over sampled traces.

Four evaluation questions, all sharing the same discrete-time conventions:

* `offline_robustness` - the signed satisfaction margin of a complete trace.
  Positive means satisfied, negative means violated, and the magnitude says
  how much the signal could shift before the verdict flips.

* `online_robust_interval` - against a prefix, the closed interval of
  robustness values still reachable by some continuation.  Unobserved atoms
  contribute their static value envelope; the interval shrinks as samples
  arrive and collapses to the offline value once the whole horizon is seen.

* `violation_causation` - how far the newest sample is from being a cause
  of violation.  Unlike the robust upper bound, which is a running minimum
  and therefore permanently masked by any past violation, this distance
  recovers when fresh samples satisfy the formula again.

* the smooth variants - identical recursions with every min/max/inf/sup
  replaced by its log-sum-exp softening, which makes the per-step value
  differentiable-friendly for reward shaping.

Discrete time: a formula interval [l, u] anchored at sample index i covers
the sample indices ceil(l/dt - 1e-9) + i through floor(u/dt + 1e-9) + i.
Offline evaluation intersects that range with the trace; an empty range
falls back on the subformula's static bounds (its max for an infimum, its
min for a supremum), or on +/-inf when no bounds are known.  The inner
lookback of the until operator starts empty and behaves as +inf, which the
enclosing min immediately absorbs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    EmptyInput,
    GridMismatch,
    MissingBounds,
    NonNnfInput,
)
from .formula import (
    Always,
    And,
    Atom,
    Eventually,
    Formula,
    Or,
    TrueNode,
    Until,
    VariableDeclarations,
    compile_expr,
    has_unbounded,
    is_nnf,
    predicate_bounds,
    robustness_bounds,
)
from .trace import PrefixView, SampledTrace


# ---------------------------------------------------------------------------
# smooth aggregates


def smooth_max(values, beta: float) -> float:
    """Log-sum-exp softening of max: (1/beta) * log(sum(exp(beta * x))).

    Always at least the true maximum and at most ln(n)/beta above it, so the
    softening error vanishes as beta grows.
    """
    xs = np.asarray(values, dtype=float)
    if xs.size == 0:
        raise EmptyInput("smooth_max of an empty collection")
    if beta <= 0 or not math.isfinite(beta):
        raise ValueError(f"beta must be positive and finite, got {beta}")
    m = float(xs.max())
    if not math.isfinite(m):
        # +inf dominates everything; all -inf stays -inf
        return m
    shifted = np.exp(beta * (xs - m))
    return m + math.log(float(shifted.sum())) / beta


def smooth_min(values, beta: float) -> float:
    """Dual softening of min, at most the true minimum and within ln(n)/beta."""
    xs = np.asarray(values, dtype=float)
    if xs.size == 0:
        raise EmptyInput("smooth_min of an empty collection")
    return -smooth_max(-xs, beta)


# ---------------------------------------------------------------------------
# result and configuration types


@dataclass(frozen=True)
class RobustInterval:
    lower: float
    upper: float

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValueError(f"interval [{self.lower}, {self.upper}] is inverted")

    @property
    def width(self) -> float:
        return self.upper - self.lower


@dataclass(frozen=True)
class CausationConfig:
    """Evaluation mode for causation distances.

    mode is "exact" or "smooth"; beta only matters for smooth evaluation.
    episode_horizon supplies the finite endpoint that replaces UNBOUNDED
    interval uppers before evaluation.
    """

    mode: str = "exact"
    beta: float = 10.0
    episode_horizon: float | None = None

    def __post_init__(self):
        if self.mode not in ("exact", "smooth"):
            raise ValueError(f"mode must be 'exact' or 'smooth', got {self.mode!r}")
        if self.beta <= 0 or not math.isfinite(self.beta):
            raise ValueError(f"beta must be positive and finite, got {self.beta}")
        if self.episode_horizon is not None and self.episode_horizon < 0:
            raise ValueError("episode_horizon must be >= 0")


@dataclass(frozen=True)
class CausationResult:
    value: float
    config: CausationConfig


# ---------------------------------------------------------------------------
# grid helpers


def grid_index(t: float, dt: float) -> int:
    """Map a time to its sample index, rejecting off-grid instants."""
    i = round(t / dt)
    if i < 0 or abs(t - i * dt) > 1e-9 * max(1.0, abs(t)):
        raise GridMismatch(f"time {t} is not on the sampling grid with dt={dt}")
    return int(i)


def interval_offsets(lower: float, upper: float, dt: float) -> tuple[int, int]:
    """Index offsets covered by [lower, upper] relative to an on-grid anchor."""
    li = math.ceil(lower / dt - 1e-9)
    ui = math.floor(upper / dt + 1e-9)
    return int(li), int(ui)


def _require_ready(f: Formula) -> None:
    if not is_nnf(f):
        raise NonNnfInput("formula must be in negation normal form; call to_nnf first")
    if has_unbounded(f):
        raise ValueError("formula has UNBOUNDED intervals; clip to a horizon first")


def _atom_bounds(f: Formula, decls: VariableDeclarations | None) -> dict[int, tuple[float, float]]:
    """Finite value envelope for every atom, keyed by node identity."""
    out: dict[int, tuple[float, float]] = {}

    def walk(node):
        if isinstance(node, Atom):
            lo, hi = predicate_bounds(node.predicate, decls)
            if not (math.isfinite(lo) and math.isfinite(hi)):
                raise MissingBounds("atom bounds must be finite for prefix evaluation")
            out[id(node)] = (lo, hi)
        elif isinstance(node, (Always, Eventually)):
            walk(node.operand)
        elif isinstance(node, (And, Or, Until)):
            walk(node.left)
            walk(node.right)

    walk(f)
    return out


# ---------------------------------------------------------------------------
# offline robustness


def offline_robustness(
    trace: SampledTrace,
    f: Formula,
    mu: float,
    decls: VariableDeclarations | None = None,
) -> float:
    """Signed margin of a complete trace at anchor time mu.

    When declarations are given, ranges that fall entirely outside the trace
    use the subformula's static bounds as their empty-range fallback;
    without them the fallback is +/-inf.
    """
    _require_ready(f)
    idx = grid_index(mu, trace.dt)
    if idx >= len(trace):
        raise ValueError(f"anchor {mu} is past the end of the trace")
    return float(_OfflineEvaluator(trace, decls).values(f)[idx])


class _OfflineEvaluator:
    """Computes, per node, the robustness at every anchor index at once."""

    def __init__(self, trace: SampledTrace, decls: VariableDeclarations | None):
        self.trace = trace
        self.decls = decls
        self.n = len(trace)
        self._memo: dict[int, np.ndarray] = {}

    def values(self, f: Formula) -> np.ndarray:
        key = id(f)
        if key not in self._memo:
            self._memo[key] = self._compute(f)
        return self._memo[key]

    def _bounds(self, f: Formula) -> tuple[float, float]:
        try:
            return robustness_bounds(f, self.decls)
        except MissingBounds:
            return (-math.inf, math.inf)

    def _compute(self, f: Formula) -> np.ndarray:
        n = self.n
        if isinstance(f, TrueNode):
            return np.full(n, math.inf)
        if isinstance(f, Atom):
            return compile_expr(f.predicate.expr, self.trace.names)(self.trace.samples)
        if isinstance(f, And):
            return np.minimum(self.values(f.left), self.values(f.right))
        if isinstance(f, Or):
            return np.maximum(self.values(f.left), self.values(f.right))
        if isinstance(f, Always):
            li, ui = interval_offsets(f.interval.lower, f.interval.upper, self.trace.dt)
            return _slide(self.values(f.operand), li, ui, self._bounds(f.operand)[1], kind="min")
        if isinstance(f, Eventually):
            li, ui = interval_offsets(f.interval.lower, f.interval.upper, self.trace.dt)
            return _slide(self.values(f.operand), li, ui, self._bounds(f.operand)[0], kind="max")
        if isinstance(f, Until):
            return self._until(f)
        raise NonNnfInput(f"unexpected node in normal-form formula: {type(f).__name__}")

    def _until(self, f: Until) -> np.ndarray:
        li, ui = interval_offsets(f.interval.lower, f.interval.upper, self.trace.dt)
        left = self.values(f.left)
        right = self.values(f.right)
        lo_expr = min(self._bounds(f.left)[0], self._bounds(f.right)[0])
        n = self.n
        out = np.empty(n)
        for t in range(n):
            lo, hi = t + li, min(t + ui, n - 1)
            if li > ui or lo > hi:
                out[t] = lo_expr
                continue
            # running minimum of the left child over [t, s), exclusive of s
            run = np.concatenate(([math.inf], np.minimum.accumulate(left[t:hi])))
            els = np.minimum(right[t : hi + 1], run)
            out[t] = els[lo - t :].max() if lo > t else els.max()
        return out


def _slide(vals: np.ndarray, li: int, ui: int, fallback: float, kind: str) -> np.ndarray:
    """out[t] = agg(vals[t+li : t+ui+1] clipped to the array), with empty
    ranges replaced by `fallback`."""
    n = vals.shape[0]
    if li > ui:
        return np.full(n, fallback)
    if li == 0 and ui >= n - 1:
        # every window runs to the end: plain suffix aggregate, never empty
        acc = np.minimum.accumulate if kind == "min" else np.maximum.accumulate
        return acc(vals[::-1])[::-1]
    # pad with the aggregation's neutral element so clipped windows keep only
    # their real entries; windows past the end get `fallback` afterwards
    neutral = math.inf if kind == "min" else -math.inf
    width = ui - li + 1
    padded = np.concatenate([vals, np.full(ui, neutral)])
    if width <= 4096:
        view = np.lib.stride_tricks.sliding_window_view(padded, width)
        agg = view.min(axis=1) if kind == "min" else view.max(axis=1)
        out = agg[li : li + n]
    else:
        out = np.empty(n)
        reduce = np.min if kind == "min" else np.max
        for t in range(n):
            out[t] = reduce(padded[t + li : t + ui + 1])
    if li > 0:
        out[max(n - li, 0) :] = fallback
    return out


# ---------------------------------------------------------------------------
# prefix evaluation: robust intervals and causation distances


class _PrefixEvaluator:
    """Shared recursion engine over a prefix, exact or smooth.

    Memoizes per (node, anchor index).  Anchors are never clipped to the
    prefix: instants past its end are simply unobserved, which is what lets
    the interval semantics account for every possible continuation.
    """

    def __init__(
        self,
        prefix: PrefixView,
        f: Formula,
        decls: VariableDeclarations | None,
        beta: float | None = None,
    ):
        _require_ready(f)
        self.prefix = prefix
        self.decls = decls
        self.beta = beta
        self.b = prefix.end_index
        self.dt = prefix.dt
        self.root = f
        self.atom_bounds = _atom_bounds(f, decls)
        self._atom_vals: dict[int, np.ndarray] = {}
        self._iv: dict[tuple[int, int], tuple[float, float]] = {}
        self._cau: dict[tuple[int, int], float] = {}
        self._node_bounds: dict[int, tuple[float, float]] = {}

    # -- aggregation kernels, exact or smooth -------------------------------

    def _amin(self, xs):
        return min(xs) if self.beta is None else smooth_min(xs, self.beta)

    def _amax(self, xs):
        return max(xs) if self.beta is None else smooth_max(xs, self.beta)

    # -- static node bounds ---------------------------------------------------

    def bounds(self, f: Formula) -> tuple[float, float]:
        key = id(f)
        if key not in self._node_bounds:
            if isinstance(f, Atom):
                self._node_bounds[key] = self.atom_bounds[key]
            else:
                self._node_bounds[key] = robustness_bounds(f, self.decls)
        return self._node_bounds[key]

    # -- atoms ----------------------------------------------------------------

    def atom_value(self, f: Atom, t: int) -> float | None:
        """Observed value at anchor t, or None when t is past the prefix."""
        if t > self.b:
            return None
        key = id(f)
        if key not in self._atom_vals:
            fn = compile_expr(f.predicate.expr, self.prefix.names)
            self._atom_vals[key] = fn(self.prefix.samples)
        return float(self._atom_vals[key][t])

    def _offsets(self, iv) -> tuple[int, int]:
        return interval_offsets(iv.lower, iv.upper, self.dt)

    # -- robust interval ------------------------------------------------------

    def interval(self, f: Formula, t: int) -> tuple[float, float]:
        key = (id(f), t)
        got = self._iv.get(key)
        if got is None:
            got = self._interval(f, t)
            self._iv[key] = got
        return got

    def _interval(self, f: Formula, t: int) -> tuple[float, float]:
        if isinstance(f, TrueNode):
            return (math.inf, math.inf)
        if isinstance(f, Atom):
            v = self.atom_value(f, t)
            if v is not None:
                return (v, v)
            return self.atom_bounds[id(f)]
        if isinstance(f, And):
            a = self.interval(f.left, t)
            b = self.interval(f.right, t)
            return (self._amin((a[0], b[0])), self._amin((a[1], b[1])))
        if isinstance(f, Or):
            a = self.interval(f.left, t)
            b = self.interval(f.right, t)
            return (self._amax((a[0], b[0])), self._amax((a[1], b[1])))
        if isinstance(f, Always):
            li, ui = self._offsets(f.interval)
            if li > ui:
                hi = self.bounds(f.operand)[1]
                return (hi, hi)
            parts = [self.interval(f.operand, s) for s in range(t + li, t + ui + 1)]
            return (self._amin([p[0] for p in parts]), self._amin([p[1] for p in parts]))
        if isinstance(f, Eventually):
            li, ui = self._offsets(f.interval)
            if li > ui:
                lo = self.bounds(f.operand)[0]
                return (lo, lo)
            parts = [self.interval(f.operand, s) for s in range(t + li, t + ui + 1)]
            return (self._amax([p[0] for p in parts]), self._amax([p[1] for p in parts]))
        if isinstance(f, Until):
            return self._interval_until(f, t)
        raise NonNnfInput(f"unexpected node in normal-form formula: {type(f).__name__}")

    def _interval_until(self, f: Until, t: int) -> tuple[float, float]:
        li, ui = self._offsets(f.interval)
        if li > ui:
            lo = min(self.bounds(f.left)[0], self.bounds(f.right)[0])
            return (lo, lo)
        run_lo, run_hi = math.inf, math.inf
        el_los, el_his = [], []
        for s in range(t, t + ui + 1):
            if s >= t + li:
                r = self.interval(f.right, s)
                el_los.append(self._amin((r[0], run_lo)))
                el_his.append(self._amin((r[1], run_hi)))
            l = self.interval(f.left, s)
            run_lo = self._amin((run_lo, l[0]))
            run_hi = self._amin((run_hi, l[1]))
        return (self._amax(el_los), self._amax(el_his))

    # -- causation distance -----------------------------------------------------

    def causation(self, f: Formula, t: int) -> float:
        key = (id(f), t)
        got = self._cau.get(key)
        if got is None:
            got = self._causation(f, t)
            self._cau[key] = got
        return got

    def _causation(self, f: Formula, t: int) -> float:
        if isinstance(f, TrueNode):
            return math.inf
        if isinstance(f, Atom):
            if t == self.b:
                return self.atom_value(f, t)
            return self.atom_bounds[id(f)][1]
        if isinstance(f, And):
            return self._amin((self.causation(f.left, t), self.causation(f.right, t)))
        if isinstance(f, Or):
            # charging one side only counts when the other cannot recover
            left = self._amax((self.causation(f.left, t), self.interval(f.right, t)[1]))
            right = self._amax((self.interval(f.left, t)[1], self.causation(f.right, t)))
            return self._amin((left, right))
        if isinstance(f, Always):
            li, ui = self._offsets(f.interval)
            if li > ui:
                return self.bounds(f.operand)[1]
            return self._amin([self.causation(f.operand, s) for s in range(t + li, t + ui + 1)])
        if isinstance(f, Eventually):
            li, ui = self._offsets(f.interval)
            if li > ui:
                return self.bounds(f.operand)[1]
            reachable = self.interval(f, t)[1]
            return self._amin(
                [self._amax((self.causation(f.operand, s), reachable)) for s in range(t + li, t + ui + 1)]
            )
        if isinstance(f, Until):
            return self._causation_until(f, t)
        raise NonNnfInput(f"unexpected node in normal-form formula: {type(f).__name__}")

    def _causation_until(self, f: Until, t: int) -> float:
        li, ui = self._offsets(f.interval)
        if li > ui:
            return min(self.bounds(f.left)[1], self.bounds(f.right)[1])
        reachable = self.interval(f, t)[1]
        run = math.inf
        els = []
        for s in range(t, t + ui + 1):
            if s >= t + li:
                held = self._amin((run, self.causation(f.right, s)))
                els.append(self._amax((held, reachable)))
            run = self._amin((run, self.causation(f.left, s)))
        return self._amin(els)


# ---------------------------------------------------------------------------
# public prefix operations


def online_robust_interval(
    prefix: PrefixView,
    f: Formula,
    mu: float,
    decls: VariableDeclarations | None = None,
) -> RobustInterval:
    """Reachable robustness interval of a prefix at anchor time mu.

    Each end is computed by the same recursion as offline robustness with
    unobserved atoms replaced by the matching end of their value envelope.
    """
    ev = _PrefixEvaluator(prefix, f, decls)
    lo, hi = ev.interval(f, grid_index(mu, prefix.dt))
    return RobustInterval(lo, hi)


def violation_causation(
    prefix: PrefixView,
    f: Formula,
    mu: float,
    cfg: CausationConfig = CausationConfig(),
    decls: VariableDeclarations | None = None,
) -> CausationResult:
    """Distance of the newest sample from being a cause of violation.

    Only the newest sample is charged: atoms anchored anywhere else report
    their best-case envelope, so a past violation stops dominating as soon
    as fresh samples satisfy the formula again.
    """
    if cfg.mode != "exact":
        raise ValueError("violation_causation computes the exact distance; use smooth_violation_causation")
    ev = _PrefixEvaluator(prefix, f, decls)
    value = ev.causation(f, grid_index(mu, prefix.dt))
    return CausationResult(float(value), cfg)


def smooth_violation_causation(
    prefix: PrefixView,
    f: Formula,
    mu: float,
    cfg: CausationConfig,
    decls: VariableDeclarations | None = None,
) -> CausationResult:
    """Causation distance with every aggregation softened by log-sum-exp,
    including those inside the embedded reachable-upper-bound computation."""
    if cfg.mode != "smooth":
        raise ValueError("smooth_violation_causation requires mode='smooth'")
    ev = _PrefixEvaluator(prefix, f, decls, beta=cfg.beta)
    value = ev.causation(f, grid_index(mu, prefix.dt))
    return CausationResult(float(value), cfg)
