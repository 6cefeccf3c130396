"""
Why the robustness upper bound goes blind after a violation
===========================================================

A car briefly drops below the speed floor while still decelerating.  Two
steps later it accelerates and recovers.  The classical online upper bound
latches onto the violation and never moves again; the causation distance
dips negative for exactly the two bad steps and then tracks the recovery.
"""

from stlmon import online_robust_interval, prepare, violation_causation
from stlmon.demo_signals import (
    braking_recovery_declarations,
    braking_recovery_formula,
    braking_recovery_trace,
)

decls = braking_recovery_declarations()
trace = braking_recovery_trace()
spec = prepare(braking_recovery_formula(), trace.duration, None)

print("spec: G[0,100] (speed > 5 || accel > 0)")
print()
print(f"{'step':>4} {'speed':>6} {'accel':>6} {'rob lower':>10} {'rob upper':>10} {'causation':>10}")

for b in range(len(trace)):
    prefix = trace.prefix(b)
    iv = online_robust_interval(prefix, spec, 0.0, decls)
    cau = violation_causation(prefix, spec, 0.0, decls=decls).value
    speed, accel = trace.samples[b]
    marker = "  <- violation" if cau < 0 else ""
    print(f"{b:>4} {speed:>6.1f} {accel:>6.1f} {iv.lower:>10.2f} {iv.upper:>10.2f} {cau:>10.2f}{marker}")

# The upper bound is stuck at -0.5 from step 19 on: one bad step pins the
# infimum over the whole run.  The causation column returns to +0.5 the
# moment the throttle opens and keeps growing as the car speeds up, which
# is the gradient a learner actually needs.
