"""
Watching the online robustness interval shrink and collapse
===========================================================

Every unseen future sample is replaced by the declared range of its
variable, so the interval brackets the robustness of every possible
completion.  Each new sample can only tighten it.  Once the trace covers
the formula horizon the two ends meet at the offline robustness.
"""

import numpy as np

from stlmon import (
    SampledTrace,
    VariableDeclarations,
    offline_robustness,
    online_robust_interval,
    parse_formula,
    to_nnf,
)

decls = VariableDeclarations.of(alt=(0.0, 12.0))
spec = to_nnf(parse_formula("F[2,6] G[0,3] alt > 4", decls))

# climb, dip, climb again
alt = np.array([[3.0], [4.5], [5.5], [6.5], [5.0], [6.0], [7.0], [7.5], [8.0], [8.0]])
trace = SampledTrace(1.0, ("alt",), alt)

print("spec: F[2,6] G[0,3] alt > 4   (horizon 9 steps)")
print()
print(f"{'b':>3} {'alt':>5} {'lower':>8} {'upper':>8} {'width':>8}")
for b in range(len(trace)):
    iv = online_robust_interval(trace.prefix(b), spec, 0.0, decls)
    print(f"{b:>3} {alt[b, 0]:>5.1f} {iv.lower:>8.2f} {iv.upper:>8.2f} {iv.upper - iv.lower:>8.2f}")

rho = offline_robustness(trace, spec, 0.0, decls)
print()
print(f"offline robustness on the full trace: {rho:.2f}")
# At b = 9 the window [2,6]+[0,3] is fully observed and the interval width
# hits zero: lower == upper == offline.
