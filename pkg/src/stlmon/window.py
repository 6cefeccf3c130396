"""Fixed-window scoring: the per-step value a running episode is charged.

For reward generation the specification is normalized to an always-rooted
shape; that root slides with the episode, so each step can be scored from a
bounded window of history instead of the whole prefix.  The window is
re-indexed to start at time 0, its newest sample plays the role of the
current instant, and every temporal interval is clipped to the window span
before evaluation.

`WindowEvaluator` compiles a specification once and then scores batches of
windows with vectorized array operations; `window_reward` is the one-shot
convenience wrapper around it.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import logsumexp

from .errors import MissingBounds, WindowTooShort
from .formula import (
    Always,
    And,
    Atom,
    Eventually,
    Formula,
    Or,
    TimeInterval,
    TrueNode,
    Until,
    VariableDeclarations,
    aggregation_k,
    clip_unbounded,
    compile_expr,
    ensure_box_root,
    has_unbounded,
    predicate_bounds,
    robustness_bounds,
    sampling_window_upper,
    to_nnf,
)
from .semantics import CausationConfig, CausationResult, interval_offsets
from .trace import WindowView


def _clip_to_span(f: Formula, span: float) -> Formula:
    if isinstance(f, (TrueNode, Atom)):
        return f
    if isinstance(f, (And, Or)):
        return type(f)(_clip_to_span(f.left, span), _clip_to_span(f.right, span))
    iv = TimeInterval(min(f.interval.lower, span), min(f.interval.upper, span))
    if isinstance(f, (Always, Eventually)):
        return type(f)(iv, _clip_to_span(f.operand, span))
    return Until(iv, _clip_to_span(f.left, span), _clip_to_span(f.right, span))


class WindowEvaluator:
    """Compiled scorer for length-k windows of one specification.

    evaluate() accepts a single (k, d) window or a batch (m, k, d) and
    returns, per window, the causation distance at the window start, plus
    the reachable robustness bounds there.  The newest row is the only
    instant charged by the causation semantics; rows past the window are
    unobserved and contribute their static envelopes.
    """

    def __init__(
        self,
        f: Formula,
        decls: VariableDeclarations | None,
        names: tuple[str, ...],
        dt: float,
        k: int,
        cfg: CausationConfig = CausationConfig(),
    ):
        if k < 1:
            raise ValueError("window length must be at least 1")
        self.cfg = cfg
        self.dt = dt
        self.k = k
        self.names = tuple(names)
        self.beta = cfg.beta if cfg.mode == "smooth" else None

        nnf = to_nnf(f)
        if has_unbounded(nnf):
            if cfg.episode_horizon is None:
                raise ValueError(
                    "formula has UNBOUNDED intervals; set episode_horizon in the config"
                )
            nnf = clip_unbounded(nnf, cfg.episode_horizon)
        span = (k - 1) * dt
        boxed = ensure_box_root(nnf, span)
        need = aggregation_k(sampling_window_upper(boxed), dt)
        if k < need:
            raise WindowTooShort(f"window has {k} samples; the formula needs at least {need}")
        self.formula = _clip_to_span(boxed, span)

        self._anchors: dict[int, int] = {}
        self._assign_anchors(self.formula, 1)
        self._bounds: dict[int, tuple[float, float]] = {}
        self._atom_fns: dict[int, object] = {}
        self._prepare(self.formula, decls)

    # -- compilation ---------------------------------------------------------

    def _offsets(self, node) -> tuple[int, int]:
        return interval_offsets(node.interval.lower, node.interval.upper, self.dt)

    def _assign_anchors(self, f: Formula, need: int) -> None:
        key = id(f)
        self._anchors[key] = max(self._anchors.get(key, 0), need)
        if isinstance(f, (TrueNode, Atom)):
            return
        if isinstance(f, (And, Or)):
            self._assign_anchors(f.left, self._anchors[key])
            self._assign_anchors(f.right, self._anchors[key])
            return
        _, ui = self._offsets(f)
        child_need = self._anchors[key] + max(ui, 0)
        if isinstance(f, (Always, Eventually)):
            self._assign_anchors(f.operand, child_need)
        else:
            self._assign_anchors(f.left, child_need)
            self._assign_anchors(f.right, child_need)

    def _prepare(self, f: Formula, decls: VariableDeclarations) -> None:
        if isinstance(f, Atom):
            lo, hi = predicate_bounds(f.predicate, decls)
            if not (math.isfinite(lo) and math.isfinite(hi)):
                raise MissingBounds("atom bounds must be finite for window scoring")
            self._bounds[id(f)] = (lo, hi)
            self._atom_fns[id(f)] = compile_expr(f.predicate.expr, self.names)
            return
        self._bounds[id(f)] = robustness_bounds(f, decls)
        if isinstance(f, TrueNode):
            return
        if isinstance(f, (And, Or, Until)):
            self._prepare(f.left, decls)
            self._prepare(f.right, decls)
        else:
            self._prepare(f.operand, decls)

    # -- aggregation kernels ---------------------------------------------------

    def _reduce_min(self, stack: np.ndarray) -> np.ndarray:
        if self.beta is None:
            return stack.min(axis=0)
        return -logsumexp(-self.beta * stack, axis=0) / self.beta

    def _reduce_max(self, stack: np.ndarray) -> np.ndarray:
        if self.beta is None:
            return stack.max(axis=0)
        return logsumexp(self.beta * stack, axis=0) / self.beta

    def _min2(self, a, b):
        if self.beta is None:
            return np.minimum(a, b)
        return -np.logaddexp(-self.beta * a, -self.beta * b) / self.beta

    def _max2(self, a, b):
        if self.beta is None:
            return np.maximum(a, b)
        return np.logaddexp(self.beta * a, self.beta * b) / self.beta

    def _shifted(self, arr: np.ndarray, li: int, ui: int, count: int) -> np.ndarray:
        """(w, m, count) stack of arr slices, one per offset in [li, ui]."""
        return np.stack([arr[:, li + off : li + off + count] for off in range(ui - li + 1)])

    # -- evaluation --------------------------------------------------------------

    def evaluate(self, windows) -> dict[str, np.ndarray]:
        w = np.asarray(windows, dtype=float)
        single = w.ndim == 2
        if single:
            w = w[None, :, :]
        if w.ndim != 3 or w.shape[1] != self.k or w.shape[2] != len(self.names):
            raise ValueError(
                f"expected windows shaped (m, {self.k}, {len(self.names)}), got {w.shape}"
            )
        memo: dict[int, tuple[np.ndarray, np.ndarray, np.ndarray]] = {}
        upper, lower, caus = self._eval(self.formula, w, memo)
        return {
            "causation": caus[:, 0].copy(),
            "robust_upper": upper[:, 0].copy(),
            "robust_lower": lower[:, 0].copy(),
        }

    def _eval(self, f: Formula, w: np.ndarray, memo) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        key = id(f)
        if key in memo:
            return memo[key]
        m = w.shape[0]
        count = self._anchors[key]
        result = self._node(f, w, m, count, memo)
        memo[key] = result
        return result

    def _node(self, f, w, m, count, memo):
        if isinstance(f, TrueNode):
            full = np.full((m, count), math.inf)
            return full, full.copy(), full.copy()
        if isinstance(f, Atom):
            lo, hi = self._bounds[id(f)]
            vals = self._atom_fns[id(f)](w.reshape(-1, w.shape[2])).reshape(m, self.k)
            upper = np.full((m, count), hi)
            lower = np.full((m, count), lo)
            seen = min(self.k, count)
            upper[:, :seen] = vals[:, :seen]
            lower[:, :seen] = vals[:, :seen]
            caus = np.full((m, count), hi)
            if count >= self.k:
                caus[:, self.k - 1] = vals[:, self.k - 1]
            return upper, lower, caus
        if isinstance(f, And):
            u1, l1, o1 = self._eval(f.left, w, memo)
            u2, l2, o2 = self._eval(f.right, w, memo)
            u1, l1, o1 = u1[:, :count], l1[:, :count], o1[:, :count]
            u2, l2, o2 = u2[:, :count], l2[:, :count], o2[:, :count]
            return self._min2(u1, u2), self._min2(l1, l2), self._min2(o1, o2)
        if isinstance(f, Or):
            u1, l1, o1 = self._eval(f.left, w, memo)
            u2, l2, o2 = self._eval(f.right, w, memo)
            u1, l1, o1 = u1[:, :count], l1[:, :count], o1[:, :count]
            u2, l2, o2 = u2[:, :count], l2[:, :count], o2[:, :count]
            caus = self._min2(self._max2(o1, u2), self._max2(u1, o2))
            return self._max2(u1, u2), self._max2(l1, l2), caus
        if isinstance(f, Always):
            return self._always(f, w, m, count, memo)
        if isinstance(f, Eventually):
            return self._eventually(f, w, m, count, memo)
        return self._until(f, w, m, count, memo)

    def _always(self, f, w, m, count, memo):
        li, ui = self._offsets(f)
        cu, cl, co = self._eval(f.operand, w, memo)
        if li > ui:
            hi = self._bounds[id(f.operand)][1]
            full = np.full((m, count), hi)
            return full, full.copy(), full.copy()
        upper = self._reduce_min(self._shifted(cu, li, ui, count))
        lower = self._reduce_min(self._shifted(cl, li, ui, count))
        caus = self._reduce_min(self._shifted(co, li, ui, count))
        return upper, lower, caus

    def _eventually(self, f, w, m, count, memo):
        li, ui = self._offsets(f)
        cu, cl, co = self._eval(f.operand, w, memo)
        if li > ui:
            lo, hi = self._bounds[id(f.operand)]
            return (
                np.full((m, count), lo),
                np.full((m, count), lo),
                np.full((m, count), hi),
            )
        upper = self._reduce_max(self._shifted(cu, li, ui, count))
        lower = self._reduce_max(self._shifted(cl, li, ui, count))
        # each candidate instant is charged only down to what the operator
        # can still reach from here
        held = self._max2(self._shifted(co, li, ui, count), upper[None, :, :])
        caus = self._reduce_min(held)
        return upper, lower, caus

    def _until(self, f, w, m, count, memo):
        li, ui = self._offsets(f)
        u1, l1, o1 = self._eval(f.left, w, memo)
        u2, l2, o2 = self._eval(f.right, w, memo)
        if li > ui:
            lo = min(self._bounds[id(f.left)][0], self._bounds[id(f.right)][0])
            hi = min(self._bounds[id(f.left)][1], self._bounds[id(f.right)][1])
            return (
                np.full((m, count), lo),
                np.full((m, count), lo),
                np.full((m, count), hi),
            )
        upper = np.empty((m, count))
        lower = np.empty((m, count))
        caus = np.empty((m, count))
        inf = np.full(m, math.inf)
        for t in range(count):
            run_u, run_l, run_o = inf, inf, inf
            els_u, els_l, held = [], [], []
            for s in range(t, t + ui + 1):
                if s >= t + li:
                    els_u.append(self._min2(u2[:, s], run_u))
                    els_l.append(self._min2(l2[:, s], run_l))
                    held.append(self._min2(run_o, o2[:, s]))
                run_u = self._min2(run_u, u1[:, s])
                run_l = self._min2(run_l, l1[:, s])
                run_o = self._min2(run_o, o1[:, s])
            upper[:, t] = self._reduce_max(np.stack(els_u))
            lower[:, t] = self._reduce_max(np.stack(els_l))
            caus[:, t] = self._reduce_min(self._max2(np.stack(held), upper[:, t][None, :]))
        return upper, lower, caus


def window_reward(
    w: WindowView,
    f: Formula,
    cfg: CausationConfig = CausationConfig(),
    decls: VariableDeclarations | None = None,
) -> CausationResult:
    """Score one window: the causation distance of its newest sample.

    The window must be at least as long as the formula's minimum sampling
    window (WindowTooShort otherwise).
    """
    ev = WindowEvaluator(f, decls, w.names, w.dt, w.k, cfg)
    value = ev.evaluate(w.samples)["causation"][0]
    return CausationResult(float(value), cfg)
