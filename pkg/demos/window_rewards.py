"""
Scoring fixed-length state windows during training
==================================================

An agent trained against a sliding specification never sees the whole
episode; it sees the last k states.  window-info style sizing picks k so
that one full obligation of the specification body fits in the window,
and the batched evaluator scores thousands of windows at once.
"""

import numpy as np

from stlmon import (
    CausationConfig,
    TauWindow,
    VariableDeclarations,
    WindowEvaluator,
    aggregation_k,
    parse_formula,
    sampling_window_upper,
    to_nnf,
)

decls = VariableDeclarations.of(x=(-2.4, 2.4), theta=(-0.21, 0.21))
spec = parse_formula(
    "G[0,inf] ((|x| < 0.5 && |theta| < 0.1) || F[0,10] (|x| < 0.05 && |theta| < 0.02))",
    decls,
)

dt = 1.0
upper = sampling_window_upper(to_nnf(spec), horizon_time=1000.0)
k = aggregation_k(upper, dt)
print(f"body needs {upper:.0f} time units of history -> k = {k} samples at dt = {dt}")

ev = WindowEvaluator(
    spec, decls, ("x", "theta"), dt, k, CausationConfig(episode_horizon=1000.0)
)

# -- one streamed episode ---------------------------------------------------

# pole drifts away from center, controller pulls it back
steps = 40
xs = 0.04 * np.arange(steps) * np.sin(0.3 * np.arange(steps))
thetas = 0.012 * np.sin(0.5 * np.arange(steps))

win = TauWindow(k, 2)
streamed = []
print()
print(f"{'t':>3} {'x':>7} {'theta':>7} {'reward':>8}")
for t in range(steps):
    win.push(np.array([xs[t], thetas[t]]))
    reward = float(ev.evaluate(win.states)["causation"][0])
    streamed.append(reward)
    if t % 5 == 0 or reward < 0:
        print(f"{t:>3} {xs[t]:>7.3f} {thetas[t]:>7.3f} {reward:>8.3f}")

# -- the same windows, scored as one batch ----------------------------------

padded = np.vstack([np.repeat([[xs[0], thetas[0]]], k - 1, axis=0),
                    np.column_stack([xs, thetas])])
windows = np.lib.stride_tricks.sliding_window_view(padded, k, axis=0)
batch = ev.evaluate(windows.transpose(0, 2, 1))["causation"]
print()
print(f"batched scoring of all {steps} windows matches streaming: "
      f"{bool(np.allclose(batch, streamed))}")
print(f"min reward over the episode: {batch.min():.3f} at t = {int(batch.argmin())}")
