"""Signal temporal logic monitoring over sampled traces.

The package evaluates quantitative semantics of temporal specifications over
uniformly sampled numeric traces, both over complete episodes and over
growing prefixes, and turns the results into dense per-step training signals
for reinforcement learning:

* :func:`offline_robustness`   classic robustness of a complete trace,
* :func:`online_robust_interval` reachable robustness bounds of a prefix,
* :func:`violation_causation`  per-step distance charging the newest sample,
* :class:`WindowEvaluator`     the same, batched over fixed-length windows.

Specifications are written in a small text format, see :mod:`stlmon.parser`.
"""

from .errors import (
    DivisionByIntervalContainingZero,
    EmptyInput,
    EmptyTrace,
    GridMismatch,
    InconsistentTimeGrid,
    MissingBounds,
    NnfUnsupported,
    NonNnfInput,
    SpecSyntaxError,
    StlmonError,
    TraceError,
    TraceFormatError,
    UndeclaredVariable,
    WindowTooShort,
)
from .formula import (
    Always,
    And,
    Atom,
    BinOp,
    Const,
    Eventually,
    Formula,
    Implies,
    Neg,
    Not,
    Or,
    Predicate,
    TimeInterval,
    TrueNode,
    UNBOUNDED,
    Until,
    Var,
    VariableDeclarations,
    aggregation_k,
    clip_unbounded,
    ensure_box_root,
    formula_variables,
    has_unbounded,
    horizon,
    is_nnf,
    min_sampling_window,
    predicate_bounds,
    robustness_bounds,
    sampling_window_upper,
    to_nnf,
)
from .monitor import (
    EpisodeReport,
    StepRecord,
    aggregate_metrics,
    episode_report,
    iter_step_records,
    prepare,
    split_safety,
)
from .parser import format_formula, format_spec, load_spec, parse_formula, parse_spec
from .semantics import (
    CausationConfig,
    CausationResult,
    RobustInterval,
    offline_robustness,
    online_robust_interval,
    smooth_max,
    smooth_min,
    smooth_violation_causation,
    violation_causation,
)
from .trace import (
    PrefixView,
    SampledTrace,
    TauWindow,
    WindowView,
    load_csv,
    project_original,
)
from .window import WindowEvaluator, window_reward

__version__ = "0.1.0"

__all__ = [
    "Always",
    "And",
    "Atom",
    "BinOp",
    "CausationConfig",
    "CausationResult",
    "Const",
    "DivisionByIntervalContainingZero",
    "EmptyInput",
    "EmptyTrace",
    "EpisodeReport",
    "Eventually",
    "Formula",
    "GridMismatch",
    "Implies",
    "InconsistentTimeGrid",
    "MissingBounds",
    "Neg",
    "NnfUnsupported",
    "NonNnfInput",
    "Not",
    "Or",
    "Predicate",
    "PrefixView",
    "RobustInterval",
    "SampledTrace",
    "SpecSyntaxError",
    "StepRecord",
    "StlmonError",
    "TauWindow",
    "TimeInterval",
    "TraceError",
    "TraceFormatError",
    "TrueNode",
    "UNBOUNDED",
    "UndeclaredVariable",
    "Until",
    "Var",
    "VariableDeclarations",
    "WindowEvaluator",
    "WindowTooShort",
    "WindowView",
    "aggregate_metrics",
    "aggregation_k",
    "clip_unbounded",
    "ensure_box_root",
    "episode_report",
    "format_formula",
    "format_spec",
    "formula_variables",
    "has_unbounded",
    "horizon",
    "is_nnf",
    "iter_step_records",
    "load_csv",
    "load_spec",
    "min_sampling_window",
    "offline_robustness",
    "online_robust_interval",
    "parse_formula",
    "parse_spec",
    "prepare",
    "predicate_bounds",
    "project_original",
    "robustness_bounds",
    "sampling_window_upper",
    "smooth_max",
    "smooth_min",
    "smooth_violation_causation",
    "split_safety",
    "to_nnf",
    "violation_causation",
    "window_reward",
]
