# Rate allocation along a curve: computing AND of two independent
# Bernoulli bits with many tiny messages.
#
# A monotone curve from (0,0) to (1-p, 1-q) schedules who narrows down
# their "my bit may still matter" interval next. Discretizing the curve
# into 2m alternating messages gives an achievable staircase; refining
# the staircase descends to a closed-form integral.

import numpy as np

from ifcomp import (
    bernoulli_product,
    and_function,
    closed_form_infinite_rate,
    computability_residuals,
    diagonal_curve,
    integral_sum_rate,
    message_rates,
    optimal_curve,
    region_split,
    staircase_chain,
    staircase_rates,
    staircase_sum_rate,
    uniform_partition,
)

p = q = 0.5
curve = optimal_curve(p, q)
closed = closed_form_infinite_rate(p, q)

print("staircase refinement, fair bits, best curve:")
print("stairs  messages  sum rate     excess over closed form")
for m in (1, 2, 4, 8, 16, 32, 64):
    total = staircase_sum_rate(curve, uniform_partition(m))
    print(f"{m:5d} {2 * m:9d}  {total:.9f}  {total - closed:.2e}")
print(f"closed form          {closed:.9f}")
print(f"integral             {integral_sum_rate(curve):.9f}")

# every staircase is a real protocol: rebuild it as a message chain and
# check the chain reproduces the rates and computes AND exactly
pmf = bernoulli_product([p, q])
f = and_function()
part = uniform_partition(4)
chain = staircase_chain(curve, part)
got = message_rates(pmf, chain)
want = staircase_rates(curve, part)
print()
print("chain realization, 8 messages:")
print("  max |chain rate - staircase rate| =",
      f"{max(abs(a - b) for a, b in zip(got, want)):.2e}")
print("  computability residuals:", computability_residuals(pmf, chain, f, f))

# asymmetric sources: the best curve hugs one axis before turning
p, q = 0.2, 0.6
best = optimal_curve(p, q)
diag = diagonal_curve(p, q)
print()
print(f"asymmetric sources p={p}, q={q}:")
print("  best curve vertices ", best.vertices)
print("  best curve integral ", round(integral_sum_rate(best), 9))
print("  diagonal integral   ", round(integral_sum_rate(diag), 9))
print("  closed form         ", round(closed_form_infinite_rate(p, q), 9))
wx, wy = region_split(best)
print("  rate split A/B      ", round(wx, 9), "/", round(wy, 9),
      " (sums to 1 - pq)")
