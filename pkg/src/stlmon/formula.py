"""Formula and expression types plus the structural operations on them.

A specification is a temporal formula over named signal variables.  Atomic
predicates are kept in the normalized shape ``f(x1..xK) > 0``: a single
arithmetic expression whose sign decides satisfaction.  Temporal operators
carry closed time intervals; an upper endpoint of ``UNBOUNDED`` stands for
"until the end of the episode" and must be clipped to a concrete horizon
before any numeric evaluation.

Structural operations provided here:

* negation normal form (`to_nnf`), which resolves negated atoms by flipping
  the sign of their expression,
* the minimum sampling window needed to score a fresh sample
  (`min_sampling_window`, `sampling_window_upper`, `aggregation_k`),
* static value bounds for predicates and whole formulas via interval
  arithmetic over the declared variable ranges (`predicate_bounds`,
  `robustness_bounds`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

from .errors import (
    DivisionByIntervalContainingZero,
    MissingBounds,
    NnfUnsupported,
    UndeclaredVariable,
)

UNBOUNDED = math.inf


# ---------------------------------------------------------------------------
# arithmetic expressions


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * /
    left: "Expr"
    right: "Expr"

    def __post_init__(self):
        if self.op not in "+-*/" or len(self.op) != 1:
            raise ValueError(f"unknown operator {self.op!r}")


Expr = Union[Var, Const, Neg, BinOp]


def eval_expr(e: Expr, env) -> float:
    """Evaluate an expression against a mapping from variable name to value."""
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Var):
        return env[e.name]
    if isinstance(e, Neg):
        return -eval_expr(e.operand, env)
    a = eval_expr(e.left, env)
    b = eval_expr(e.right, env)
    if e.op == "+":
        return a + b
    if e.op == "-":
        return a - b
    if e.op == "*":
        return a * b
    return a / b


def expr_variables(e: Expr) -> set[str]:
    if isinstance(e, Var):
        return {e.name}
    if isinstance(e, Const):
        return set()
    if isinstance(e, Neg):
        return expr_variables(e.operand)
    return expr_variables(e.left) | expr_variables(e.right)


def negate_expr(e: Expr) -> Expr:
    """Return an expression equal to -e, simplifying the obvious cases."""
    if isinstance(e, Const):
        return Const(-e.value)
    if isinstance(e, Neg):
        return e.operand
    if isinstance(e, BinOp) and e.op == "-":
        return BinOp("-", e.right, e.left)
    return Neg(e)


def subtract_exprs(lhs: Expr, rhs: Expr) -> Expr:
    """lhs - rhs with zero operands folded away (keeps parsed atoms tidy)."""
    if rhs == Const(0.0):
        return lhs
    if lhs == Const(0.0):
        return negate_expr(rhs)
    return BinOp("-", lhs, rhs)


def compile_expr(e: Expr, names: tuple[str, ...]):
    """Compile an expression to a function of a (n, d) sample matrix.

    The returned callable maps a numpy array whose columns follow `names`
    to the vector of expression values, one per row.
    """
    import numpy as np

    if isinstance(e, Const):
        v = float(e.value)
        return lambda m: np.full(m.shape[0], v)
    if isinstance(e, Var):
        col = names.index(e.name)
        return lambda m: np.asarray(m[:, col], dtype=float)
    if isinstance(e, Neg):
        f = compile_expr(e.operand, names)
        return lambda m: -f(m)
    fl = compile_expr(e.left, names)
    fr = compile_expr(e.right, names)
    if e.op == "+":
        return lambda m: fl(m) + fr(m)
    if e.op == "-":
        return lambda m: fl(m) - fr(m)
    if e.op == "*":
        return lambda m: fl(m) * fr(m)
    return lambda m: fl(m) / fr(m)


# ---------------------------------------------------------------------------
# interval arithmetic over declared variable ranges


def _iv_add(a, b):
    return (a[0] + b[0], a[1] + b[1])


def _iv_sub(a, b):
    return (a[0] - b[1], a[1] - b[0])


def _iv_mul(a, b):
    products = (a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1])
    return (min(products), max(products))


def _iv_div(a, b):
    if b[0] <= 0.0 <= b[1]:
        raise DivisionByIntervalContainingZero(
            f"divisor range [{b[0]}, {b[1]}] contains zero"
        )
    return _iv_mul(a, (1.0 / b[1], 1.0 / b[0]))


def expr_bounds(e: Expr, ranges: dict[str, tuple[float, float]]) -> tuple[float, float]:
    """Conservative (min, max) envelope of an expression over variable ranges."""
    if isinstance(e, Const):
        return (e.value, e.value)
    if isinstance(e, Var):
        if e.name not in ranges:
            raise UndeclaredVariable(f"variable {e.name!r} has no declared range")
        return ranges[e.name]
    if isinstance(e, Neg):
        lo, hi = expr_bounds(e.operand, ranges)
        return (-hi, -lo)
    a = expr_bounds(e.left, ranges)
    b = expr_bounds(e.right, ranges)
    if e.op == "+":
        return _iv_add(a, b)
    if e.op == "-":
        return _iv_sub(a, b)
    if e.op == "*":
        return _iv_mul(a, b)
    return _iv_div(a, b)


# ---------------------------------------------------------------------------
# formula types


@dataclass(frozen=True)
class TimeInterval:
    """Closed interval [lower, upper] on the non-negative time axis."""

    lower: float
    upper: float

    def __post_init__(self):
        if not (self.lower >= 0.0 and math.isfinite(self.lower)):
            raise ValueError(f"interval lower endpoint must be finite and >= 0, got {self.lower}")
        if self.upper < self.lower:
            raise ValueError(f"interval upper endpoint {self.upper} below lower {self.lower}")

    @property
    def unbounded(self) -> bool:
        return self.upper == UNBOUNDED

    def clipped(self, horizon: float) -> "TimeInterval":
        if not self.unbounded:
            return self
        if horizon < self.lower:
            raise ValueError(f"horizon {horizon} below interval lower endpoint {self.lower}")
        return TimeInterval(self.lower, horizon)


@dataclass(frozen=True)
class Predicate:
    """Atomic condition expr > 0, with an optional explicit value envelope.

    `bound_hint`, when given, overrides the envelope derived from variable
    declarations; it is the (min, max) the expression can reach over the
    signal domain.
    """

    expr: Expr
    bound_hint: tuple[float, float] | None = None

    def __post_init__(self):
        if self.bound_hint is not None:
            lo, hi = self.bound_hint
            if lo > hi:
                raise ValueError(f"bound hint ({lo}, {hi}) has min above max")


@dataclass(frozen=True)
class TrueNode:
    pass


@dataclass(frozen=True)
class Atom:
    predicate: Predicate


@dataclass(frozen=True)
class Not:
    operand: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Always:
    interval: TimeInterval
    operand: "Formula"


@dataclass(frozen=True)
class Eventually:
    interval: TimeInterval
    operand: "Formula"


@dataclass(frozen=True)
class Until:
    interval: TimeInterval
    left: "Formula"
    right: "Formula"


Formula = Union[TrueNode, Atom, Not, And, Or, Implies, Always, Eventually, Until]


@dataclass(frozen=True)
class VariableDeclarations:
    """Declared value range per signal variable."""

    ranges: tuple[tuple[str, tuple[float, float]], ...]

    def __post_init__(self):
        seen = set()
        for name, (lo, hi) in self.ranges:
            if name in seen:
                raise ValueError(f"variable {name!r} declared twice")
            if lo > hi:
                raise ValueError(f"variable {name!r} declares min {lo} above max {hi}")
            seen.add(name)

    @classmethod
    def of(cls, **ranges: tuple[float, float]) -> "VariableDeclarations":
        return cls(tuple((k, (float(v[0]), float(v[1]))) for k, v in ranges.items()))

    def as_dict(self) -> dict[str, tuple[float, float]]:
        return dict(self.ranges)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.ranges)


def formula_variables(f: Formula) -> set[str]:
    if isinstance(f, TrueNode):
        return set()
    if isinstance(f, Atom):
        return expr_variables(f.predicate.expr)
    if isinstance(f, (Not, Always, Eventually)):
        return formula_variables(f.operand)
    return formula_variables(f.left) | formula_variables(f.right)


def check_variables(f: Formula, decls: VariableDeclarations) -> None:
    missing = formula_variables(f) - set(decls.names)
    if missing:
        raise UndeclaredVariable(
            "undeclared variable(s): " + ", ".join(sorted(missing))
        )


# ---------------------------------------------------------------------------
# negation normal form


def to_nnf(f: Formula) -> Formula:
    """Push negation down to atoms and eliminate implication.

    Negated atoms are resolved by flipping the sign of their expression, so
    the result contains no Not nodes at all.  Negation cannot be pushed past
    an until operator (that dual is not part of this semantics) and a negated
    `true` has no atom form; both raise NnfUnsupported.
    """
    return _nnf(f, negated=False)


def _nnf(f: Formula, negated: bool) -> Formula:
    if isinstance(f, TrueNode):
        if negated:
            raise NnfUnsupported("negated 'true' has no atom form")
        return f
    if isinstance(f, Atom):
        if not negated:
            return f
        hint = f.predicate.bound_hint
        flipped = None if hint is None else (-hint[1], -hint[0])
        return Atom(Predicate(negate_expr(f.predicate.expr), flipped))
    if isinstance(f, Not):
        return _nnf(f.operand, not negated)
    if isinstance(f, Implies):
        return _nnf(Or(Not(f.left), f.right), negated)
    if isinstance(f, And):
        left, right = _nnf(f.left, negated), _nnf(f.right, negated)
        return Or(left, right) if negated else And(left, right)
    if isinstance(f, Or):
        left, right = _nnf(f.left, negated), _nnf(f.right, negated)
        return And(left, right) if negated else Or(left, right)
    if isinstance(f, Always):
        child = _nnf(f.operand, negated)
        return Eventually(f.interval, child) if negated else Always(f.interval, child)
    if isinstance(f, Eventually):
        child = _nnf(f.operand, negated)
        return Always(f.interval, child) if negated else Eventually(f.interval, child)
    if isinstance(f, Until):
        if negated:
            raise NnfUnsupported("negation cannot be pushed past an until operator")
        return Until(f.interval, _nnf(f.left, False), _nnf(f.right, False))
    raise TypeError(f"not a formula node: {f!r}")


def is_nnf(f: Formula) -> bool:
    """True when the formula contains no Not and no Implies nodes."""
    if isinstance(f, (TrueNode, Atom)):
        return True
    if isinstance(f, (Not, Implies)):
        return False
    if isinstance(f, (Always, Eventually)):
        return is_nnf(f.operand)
    return is_nnf(f.left) and is_nnf(f.right)


# ---------------------------------------------------------------------------
# temporal structure


def clip_unbounded(f: Formula, horizon: float) -> Formula:
    """Replace every UNBOUNDED interval endpoint with the episode horizon."""
    if horizon < 0 or not math.isfinite(horizon):
        raise ValueError(f"horizon must be finite and >= 0, got {horizon}")
    if isinstance(f, (TrueNode, Atom)):
        return f
    if isinstance(f, Not):
        return Not(clip_unbounded(f.operand, horizon))
    if isinstance(f, (And, Or, Implies)):
        return type(f)(clip_unbounded(f.left, horizon), clip_unbounded(f.right, horizon))
    if isinstance(f, (Always, Eventually)):
        return type(f)(f.interval.clipped(horizon), clip_unbounded(f.operand, horizon))
    return Until(
        f.interval.clipped(horizon),
        clip_unbounded(f.left, horizon),
        clip_unbounded(f.right, horizon),
    )


def has_unbounded(f: Formula) -> bool:
    if isinstance(f, (TrueNode, Atom)):
        return False
    if isinstance(f, Not):
        return has_unbounded(f.operand)
    if isinstance(f, (And, Or, Implies)):
        return has_unbounded(f.left) or has_unbounded(f.right)
    if isinstance(f, (Always, Eventually)):
        return f.interval.unbounded or has_unbounded(f.operand)
    return f.interval.unbounded or has_unbounded(f.left) or has_unbounded(f.right)


def horizon(f: Formula) -> float:
    """Lookahead needed to settle the formula: 0 for state formulas,
    interval upper plus child horizon for temporal operators."""
    if isinstance(f, (TrueNode, Atom)):
        return 0.0
    if isinstance(f, Not):
        return horizon(f.operand)
    if isinstance(f, (And, Or, Implies)):
        return max(horizon(f.left), horizon(f.right))
    if isinstance(f, (Always, Eventually)):
        return f.interval.upper + horizon(f.operand)
    return f.interval.upper + max(horizon(f.left), horizon(f.right))


def ensure_box_root(f: Formula, horizon_time: float) -> Formula:
    """Normalize to the always-rooted target shape used for reward scoring.

    A formula already rooted at an always operator is returned unchanged;
    anything else is wrapped in always over [0, horizon_time].
    """
    if isinstance(f, Always):
        return f
    return Always(TimeInterval(0.0, float(horizon_time)), f)


def min_sampling_window(f: Formula, b: float, horizon_time: float | None = None) -> TimeInterval:
    """Smallest [0, u] window that covers every time interval the formula can
    still discharge against a prefix observed up to time b.

    Atoms and `true` need no history.  A temporal operator contributes its
    own interval only once the prefix extends past the interval's upper
    endpoint; before that it contributes nothing.  Nested operators see the
    prefix shifted by the enclosing interval, so their reach accumulates the
    same way the formula horizon does.  UNBOUNDED endpoints are clipped to
    `horizon_time` first, which is therefore required when the formula has
    any.
    """
    if has_unbounded(f):
        if horizon_time is None:
            raise ValueError("formula has UNBOUNDED intervals; a horizon is required")
        f = clip_unbounded(f, horizon_time)
    upper = _window_upper(f, b)
    return TimeInterval(0.0, 0.0 if upper is None else upper)


def _window_upper(f: Formula, b: float) -> float | None:
    if isinstance(f, (TrueNode, Atom)):
        return None
    if isinstance(f, Not):
        return _window_upper(f.operand, b)
    if isinstance(f, (And, Or, Implies)):
        return _union_upper(_window_upper(f.left, b), _window_upper(f.right, b))
    if isinstance(f, (Always, Eventually)):
        if b <= f.interval.upper:
            return None
        child = _window_upper(f.operand, b - f.interval.upper)
        return f.interval.upper + (child or 0.0)
    if b <= f.interval.upper:
        return None
    shifted = b - f.interval.upper
    child = _union_upper(_window_upper(f.left, shifted), _window_upper(f.right, shifted))
    return f.interval.upper + (child or 0.0)


def _union_upper(a: float | None, b: float | None) -> float | None:
    if a is None:
        return b
    if b is None:
        return a
    return max(a, b)


def sampling_window_upper(f: Formula, horizon_time: float | None = None) -> float:
    """History span needed to score the newest sample of a running episode.

    The root always operator of a target specification slides with the
    episode, so the window is determined by its body: every interval nested
    in the body eventually becomes dischargeable, which is the same as the
    minimum sampling window of the body at unbounded prefix length.
    """
    body = f.operand if isinstance(f, Always) else f
    if has_unbounded(body):
        if horizon_time is None:
            raise ValueError("formula body has UNBOUNDED intervals; a horizon is required")
        body = clip_unbounded(body, horizon_time)
    return min_sampling_window(body, math.inf).upper


def aggregation_k(u: float, dt: float) -> int:
    """Number of samples covering a history span of u at sampling period dt."""
    if dt <= 0:
        raise ValueError(f"sampling period must be positive, got {dt}")
    if u < 0 or not math.isfinite(u):
        raise ValueError(f"window span must be finite and >= 0, got {u}")
    return int(math.ceil(u / dt - 1e-9)) + 1


# ---------------------------------------------------------------------------
# value bounds


def predicate_bounds(p: Predicate, decls: VariableDeclarations | None) -> tuple[float, float]:
    """(min, max) the predicate expression can reach over the signal domain.

    An explicit bound hint wins; otherwise the envelope is computed by
    interval arithmetic over the declared variable ranges.
    """
    if p.bound_hint is not None:
        return p.bound_hint
    if decls is None:
        raise MissingBounds("predicate has no bound hint and no declarations were given")
    return expr_bounds(p.expr, decls.as_dict())


def robustness_bounds(f: Formula, decls: VariableDeclarations | None) -> tuple[float, float]:
    """Static (min, max) of the robustness value, from predicate envelopes.

    `true` has robustness +inf by definition, so formulas containing it can
    report infinite bounds; everything else stays finite whenever the atom
    envelopes are finite.
    """
    if isinstance(f, TrueNode):
        return (math.inf, math.inf)
    if isinstance(f, Atom):
        return predicate_bounds(f.predicate, decls)
    if isinstance(f, Not):
        lo, hi = robustness_bounds(f.operand, decls)
        return (-hi, -lo)
    if isinstance(f, Implies):
        llo, lhi = robustness_bounds(f.left, decls)
        rlo, rhi = robustness_bounds(f.right, decls)
        return (max(-lhi, rlo), max(-llo, rhi))
    if isinstance(f, And):
        llo, lhi = robustness_bounds(f.left, decls)
        rlo, rhi = robustness_bounds(f.right, decls)
        return (min(llo, rlo), min(lhi, rhi))
    if isinstance(f, Or):
        llo, lhi = robustness_bounds(f.left, decls)
        rlo, rhi = robustness_bounds(f.right, decls)
        return (max(llo, rlo), max(lhi, rhi))
    if isinstance(f, (Always, Eventually)):
        return robustness_bounds(f.operand, decls)
    llo, lhi = robustness_bounds(f.left, decls)
    rlo, rhi = robustness_bounds(f.right, decls)
    return (min(llo, rlo), min(lhi, rhi))
