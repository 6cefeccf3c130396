import math

import numpy as np
import pytest

from stlmon.errors import MissingBounds, WindowTooShort
from stlmon.formula import VariableDeclarations, to_nnf
from stlmon.parser import parse_formula
from stlmon.semantics import (
    CausationConfig,
    _PrefixEvaluator,
    smooth_violation_causation,
    violation_causation,
)
from stlmon.trace import SampledTrace, TauWindow
from stlmon.window import WindowEvaluator, window_reward

from generators import NAMES, RANGES, random_formula, random_trace


def _scalar_reference(ev: WindowEvaluator, window: np.ndarray, decls):
    """Score one window with the per-anchor scalar evaluator instead."""
    tr = SampledTrace(ev.dt, ev.names, window)
    pe = _PrefixEvaluator(tr.prefix(ev.k - 1), ev.formula, decls, beta=ev.beta)
    lo, hi = pe.interval(ev.formula, 0)
    return {
        "causation": pe.causation(ev.formula, 0),
        "robust_upper": hi,
        "robust_lower": lo,
    }


def _window_cases(rng, n_cases):
    decls = VariableDeclarations.of(**RANGES)
    for _ in range(n_cases):
        f, _ = random_formula(rng, depth=int(rng.integers(1, 3)), max_u=3.0)
        nf = to_nnf(f)
        cfg = CausationConfig(episode_horizon=6.0)
        k = int(rng.integers(1, 9))
        try:
            ev = WindowEvaluator(nf, decls, NAMES, 1.0, k, cfg)
        except WindowTooShort:
            continue
        yield ev, decls


def test_batched_evaluator_matches_scalar_evaluator():
    rng = np.random.default_rng(41)
    decls = VariableDeclarations.of(**RANGES)
    checked = 0
    for ev, _ in _window_cases(rng, 120):
        windows = rng.uniform(-8, 8, size=(5, ev.k, len(NAMES)))
        out = ev.evaluate(windows)
        for i in range(windows.shape[0]):
            ref = _scalar_reference(ev, windows[i], decls)
            for key, want in ref.items():
                assert out[key][i] == pytest.approx(want, abs=1e-9), key
            checked += 1
    assert checked >= 200


def test_smooth_window_matches_scalar_smooth():
    rng = np.random.default_rng(43)
    decls = VariableDeclarations.of(**RANGES)
    f = to_nnf(parse_formula("G[0,3] (x > 0 || F[0,2] y > 1)"))
    cfg = CausationConfig(mode="smooth", beta=10.0)
    ev = WindowEvaluator(f, decls, NAMES, 1.0, 6, cfg)
    windows = rng.uniform(-8, 8, size=(7, 6, 2))
    out = ev.evaluate(windows)
    for i in range(7):
        ref = _scalar_reference(ev, windows[i], decls)
        assert out["causation"][i] == pytest.approx(ref["causation"], abs=1e-9)


def test_single_window_and_batch_agree():
    decls = VariableDeclarations.of(**RANGES)
    f = to_nnf(parse_formula("G[0,2] (x > 0 || y > 0)"))
    ev = WindowEvaluator(f, decls, NAMES, 1.0, 3)
    rng = np.random.default_rng(3)
    batch = rng.uniform(-8, 8, size=(4, 3, 2))
    whole = ev.evaluate(batch)
    for i in range(4):
        one = ev.evaluate(batch[i])
        for key in whole:
            assert one[key][0] == whole[key][i]


def test_window_too_short():
    decls = VariableDeclarations.of(**RANGES)
    f = parse_formula("G[0,inf] (x > 0 || F[0,10] y > 0)")
    cfg = CausationConfig(episode_horizon=50.0)
    with pytest.raises(WindowTooShort):
        WindowEvaluator(f, decls, NAMES, 1.0, 10, cfg)
    WindowEvaluator(f, decls, NAMES, 1.0, 11, cfg)  # the documented minimum fits


def test_unbounded_needs_horizon():
    decls = VariableDeclarations.of(**RANGES)
    f = parse_formula("G[0,inf] (x > 0 || F[0,inf] y > 0)")
    with pytest.raises(ValueError):
        WindowEvaluator(f, decls, NAMES, 1.0, 12)


def test_window_atom_bounds_must_be_finite():
    f = parse_formula("G[0,2] x * y > 0")
    with pytest.raises(MissingBounds):
        WindowEvaluator(f, None, NAMES, 1.0, 3)


def test_window_reward_charges_only_newest_sample():
    decls = VariableDeclarations.of(**RANGES)
    f = parse_formula("G[0,inf] x > 0")
    cfg = CausationConfig(episode_horizon=100.0)
    buf = TauWindow(k=4, dim=1)
    buf.push([5.0])
    r0 = window_reward(buf.view(1.0, ("x",)), f, cfg, VariableDeclarations.of(x=(-8, 8)))
    assert r0.value == 5.0
    buf.push([-2.0])
    r1 = window_reward(buf.view(1.0, ("x",)), f, cfg, VariableDeclarations.of(x=(-8, 8)))
    assert r1.value == -2.0
    # after the violation leaves the newest slot, the reward recovers
    buf.push([1.0])
    r2 = window_reward(buf.view(1.0, ("x",)), f, cfg, VariableDeclarations.of(x=(-8, 8)))
    assert r2.value == 1.0


def test_window_reward_tracks_prefix_causation_on_long_horizon():
    """With k big enough to hold the whole episode the window score matches
    the prefix-based causation."""
    decls = VariableDeclarations.of(x=(-8, 8), y=(-8, 8))
    f = parse_formula("G[0,inf] (x > 0 || y > 2)")
    cfg = CausationConfig(episode_horizon=200.0)
    rng = np.random.default_rng(9)
    tr = random_trace(rng, n=9)
    nf_prefix = to_nnf(f)
    from stlmon.formula import clip_unbounded

    k = len(tr)
    ev = WindowEvaluator(f, decls, NAMES, 1.0, k, cfg)
    got = ev.evaluate(tr.samples)["causation"][0]
    clipped = clip_unbounded(nf_prefix, tr.duration)
    want = violation_causation(tr.prefix(k - 1), clipped, 0.0, decls=decls).value
    assert got == pytest.approx(want, abs=1e-9)


def test_window_smooth_reward_close_to_exact():
    decls = VariableDeclarations.of(**RANGES)
    f = parse_formula("G[0,4] (x > 0 || y > 1)")
    rng = np.random.default_rng(13)
    windows = rng.uniform(-8, 8, size=(20, 5, 2))
    exact = WindowEvaluator(f, decls, NAMES, 1.0, 5).evaluate(windows)["causation"]
    for beta in (10.0, 100.0):
        cfg = CausationConfig(mode="smooth", beta=beta)
        sm = WindowEvaluator(f, decls, NAMES, 1.0, 5, cfg).evaluate(windows)["causation"]
        assert np.all(np.abs(sm - exact) <= 10.0 * math.log(12) / beta)
