"""Plain-loop reference evaluators used to cross-check the optimized ones.

Everything here is written for clarity, not speed: explicit recursion over
Python floats, no memoization, no vectorization.  The conventions match the
library's documented choices (grid rounding, windows clipped to the trace
offline, never clipped online, empty-range fallbacks from static bounds),
but the implementations share nothing with the optimized code paths beyond
the formula and trace data types.
"""

from __future__ import annotations

import math
from itertools import product

import numpy as np

from stlmon.formula import (
    Always,
    And,
    Atom,
    BinOp,
    Const,
    Eventually,
    Implies,
    Neg,
    Not,
    Or,
    TrueNode,
    Until,
    Var,
)

EPS = 1e-9


def offsets(interval, dt):
    li = math.ceil(interval.lower / dt - EPS)
    ui = math.floor(interval.upper / dt + EPS)
    return li, ui


# -- expressions -------------------------------------------------------------


def expr_value(e, row: dict):
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Var):
        return row[e.name]
    if isinstance(e, Neg):
        return -expr_value(e.operand, row)
    a = expr_value(e.left, row)
    b = expr_value(e.right, row)
    if e.op == "+":
        return a + b
    if e.op == "-":
        return a - b
    if e.op == "*":
        return a * b
    return a / b


def expr_range(e, ranges: dict):
    if isinstance(e, Const):
        return (e.value, e.value)
    if isinstance(e, Var):
        return ranges[e.name]
    if isinstance(e, Neg):
        lo, hi = expr_range(e.operand, ranges)
        return (-hi, -lo)
    alo, ahi = expr_range(e.left, ranges)
    blo, bhi = expr_range(e.right, ranges)
    if e.op == "+":
        return (alo + blo, ahi + bhi)
    if e.op == "-":
        return (alo - bhi, ahi - blo)
    if e.op == "*":
        corners = [alo * blo, alo * bhi, ahi * blo, ahi * bhi]
        return (min(corners), max(corners))
    if blo <= 0.0 <= bhi:
        raise ValueError("division by a range containing zero")
    corners = [alo / blo, alo / bhi, ahi / blo, ahi / bhi]
    return (min(corners), max(corners))


def atom_range(f: Atom, ranges: dict | None):
    if f.predicate.bound_hint is not None:
        return f.predicate.bound_hint
    if ranges is None:
        return (-math.inf, math.inf)
    return expr_range(f.predicate.expr, ranges)


def formula_range(f, ranges: dict | None):
    if isinstance(f, TrueNode):
        return (math.inf, math.inf)
    if isinstance(f, Atom):
        return atom_range(f, ranges)
    if isinstance(f, Not):
        lo, hi = formula_range(f.operand, ranges)
        return (-hi, -lo)
    if isinstance(f, Implies):
        llo, lhi = formula_range(f.left, ranges)
        rlo, rhi = formula_range(f.right, ranges)
        return (max(-lhi, rlo), max(-llo, rhi))
    if isinstance(f, (Always, Eventually)):
        return formula_range(f.operand, ranges)
    llo, lhi = formula_range(f.left, ranges)
    rlo, rhi = formula_range(f.right, ranges)
    if isinstance(f, Or):
        return (max(llo, rlo), max(lhi, rhi))
    return (min(llo, rlo), min(lhi, rhi))  # And and Until


# -- offline robustness --------------------------------------------------------


def _row(samples, names, t) -> dict:
    return {name: float(samples[t][i]) for i, name in enumerate(names)}


def rho(samples, names, dt, f, t, ranges=None):
    """Robustness of a complete trace at anchor index t, literal recursion."""
    n = len(samples)
    if isinstance(f, TrueNode):
        return math.inf
    if isinstance(f, Atom):
        return expr_value(f.predicate.expr, _row(samples, names, t))
    if isinstance(f, Not):
        return -rho(samples, names, dt, f.operand, t, ranges)
    if isinstance(f, And):
        return min(
            rho(samples, names, dt, f.left, t, ranges),
            rho(samples, names, dt, f.right, t, ranges),
        )
    if isinstance(f, Or):
        return max(
            rho(samples, names, dt, f.left, t, ranges),
            rho(samples, names, dt, f.right, t, ranges),
        )
    if isinstance(f, Implies):
        return max(
            -rho(samples, names, dt, f.left, t, ranges),
            rho(samples, names, dt, f.right, t, ranges),
        )
    if isinstance(f, (Always, Eventually)):
        li, ui = offsets(f.interval, dt)
        anchors = [s for s in range(t + li, t + ui + 1) if s < n] if li <= ui else []
        child = [rho(samples, names, dt, f.operand, s, ranges) for s in anchors]
        if isinstance(f, Always):
            return min(child) if child else formula_range(f.operand, ranges)[1]
        return max(child) if child else formula_range(f.operand, ranges)[0]
    if isinstance(f, Until):
        li, ui = offsets(f.interval, dt)
        anchors = [s for s in range(t + li, t + ui + 1) if s < n] if li <= ui else []
        if not anchors:
            return min(
                formula_range(f.left, ranges)[0], formula_range(f.right, ranges)[0]
            )
        best = -math.inf
        for s in anchors:
            right = rho(samples, names, dt, f.right, s, ranges)
            held = math.inf
            for u in range(t, s):
                held = min(held, rho(samples, names, dt, f.left, u, ranges))
            best = max(best, min(right, held))
        return best
    raise TypeError(f"unexpected node {type(f).__name__}")


# -- online robust interval -----------------------------------------------------


def online_bounds(samples, b, names, dt, f, t, ranges=None):
    """(lower, upper) reachable robustness for a prefix observed through b.

    Anchors are never clipped; unobserved atoms contribute their envelope.
    """
    if isinstance(f, TrueNode):
        return (math.inf, math.inf)
    if isinstance(f, Atom):
        if t <= b:
            v = expr_value(f.predicate.expr, _row(samples, names, t))
            return (v, v)
        return atom_range(f, ranges)
    if isinstance(f, Not):
        lo, hi = online_bounds(samples, b, names, dt, f.operand, t, ranges)
        return (-hi, -lo)
    if isinstance(f, (And, Or)):
        a = online_bounds(samples, b, names, dt, f.left, t, ranges)
        c = online_bounds(samples, b, names, dt, f.right, t, ranges)
        agg = max if isinstance(f, Or) else min
        return (agg(a[0], c[0]), agg(a[1], c[1]))
    if isinstance(f, Implies):
        a = online_bounds(samples, b, names, dt, f.left, t, ranges)
        c = online_bounds(samples, b, names, dt, f.right, t, ranges)
        return (max(-a[1], c[0]), max(-a[0], c[1]))
    if isinstance(f, (Always, Eventually)):
        li, ui = offsets(f.interval, dt)
        if li > ui:
            lo, hi = formula_range(f.operand, ranges)
            point = hi if isinstance(f, Always) else lo
            return (point, point)
        parts = [
            online_bounds(samples, b, names, dt, f.operand, s, ranges)
            for s in range(t + li, t + ui + 1)
        ]
        agg = min if isinstance(f, Always) else max
        return (agg(p[0] for p in parts), agg(p[1] for p in parts))
    if isinstance(f, Until):
        li, ui = offsets(f.interval, dt)
        if li > ui:
            lo = min(formula_range(f.left, ranges)[0], formula_range(f.right, ranges)[0])
            return (lo, lo)
        els = []
        for s in range(t + li, t + ui + 1):
            r = online_bounds(samples, b, names, dt, f.right, s, ranges)
            held_lo, held_hi = math.inf, math.inf
            for u in range(t, s):
                l = online_bounds(samples, b, names, dt, f.left, u, ranges)
                held_lo = min(held_lo, l[0])
                held_hi = min(held_hi, l[1])
            els.append((min(r[0], held_lo), min(r[1], held_hi)))
        return (max(e[0] for e in els), max(e[1] for e in els))
    raise TypeError(f"unexpected node {type(f).__name__}")


# -- violation causation ----------------------------------------------------------


def causation(samples, b, names, dt, f, t, ranges=None):
    """Violation causation distance charging only the newest sample b.

    Defined on negation normal form only, like the optimized evaluator.
    """
    if isinstance(f, TrueNode):
        return math.inf
    if isinstance(f, Atom):
        if t == b:
            return expr_value(f.predicate.expr, _row(samples, names, t))
        return atom_range(f, ranges)[1]
    if isinstance(f, And):
        return min(
            causation(samples, b, names, dt, f.left, t, ranges),
            causation(samples, b, names, dt, f.right, t, ranges),
        )
    if isinstance(f, Or):
        cl = causation(samples, b, names, dt, f.left, t, ranges)
        cr = causation(samples, b, names, dt, f.right, t, ranges)
        ul = online_bounds(samples, b, names, dt, f.left, t, ranges)[1]
        ur = online_bounds(samples, b, names, dt, f.right, t, ranges)[1]
        return min(max(cl, ur), max(ul, cr))
    if isinstance(f, Always):
        li, ui = offsets(f.interval, dt)
        if li > ui:
            return formula_range(f.operand, ranges)[1]
        return min(
            causation(samples, b, names, dt, f.operand, s, ranges)
            for s in range(t + li, t + ui + 1)
        )
    if isinstance(f, Eventually):
        li, ui = offsets(f.interval, dt)
        if li > ui:
            return formula_range(f.operand, ranges)[1]
        reach = online_bounds(samples, b, names, dt, f, t, ranges)[1]
        return min(
            max(causation(samples, b, names, dt, f.operand, s, ranges), reach)
            for s in range(t + li, t + ui + 1)
        )
    if isinstance(f, Until):
        li, ui = offsets(f.interval, dt)
        if li > ui:
            return min(formula_range(f.left, ranges)[1], formula_range(f.right, ranges)[1])
        reach = online_bounds(samples, b, names, dt, f, t, ranges)[1]
        els = []
        for s in range(t + li, t + ui + 1):
            held = math.inf
            for u in range(t, s):
                held = min(held, causation(samples, b, names, dt, f.left, u, ranges))
            held = min(held, causation(samples, b, names, dt, f.right, s, ranges))
            els.append(max(held, reach))
        return min(els)
    raise TypeError(f"causation is defined on normal-form nodes, got {type(f).__name__}")


# -- exhaustive completions --------------------------------------------------------


def completions(observed: np.ndarray, total_len: int, dim: int, grid):
    """Every way to extend `observed` to `total_len` rows with grid values."""
    missing = total_len - len(observed)
    if missing <= 0:
        yield np.asarray(observed, dtype=float)
        return
    for tail in product(grid, repeat=missing * dim):
        rows = np.asarray(tail, dtype=float).reshape(missing, dim)
        yield np.concatenate([np.asarray(observed, dtype=float), rows])
