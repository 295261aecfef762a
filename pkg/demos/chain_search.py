# Searching for good message chains, two ways.
#
# First the exact route: enumerate canonical deterministic chains for one
# and two messages on the uniform-4-levels-times-noisy-bit problem, where
# message order changes the cost by a factor of three.
#
# Then the heuristic route: projected-gradient descent with an increasing
# penalty on the computability residuals, for three-message AND.

import numpy as np

from ifcomp import (
    JointPmf,
    and_function,
    binary_entropy,
    constant_function,
    dsbs,
    min_sum_rate_bruteforce,
    min_sum_rate_penalty,
    product_function,
)

# ---- exact search ----------------------------------------------------------

L, pz = 4, 0.1
probs = np.outer(np.full(L, 1.0 / L), [1 - pz, pz]).reshape(-1)
pmf = JointPmf((L, 2), probs)
f_b = product_function(L)          # B wants x scaled by its bit
f_a = constant_function((L, 2))    # A wants nothing

one = min_sum_rate_bruteforce(pmf, f_a, f_b, 1, "A")
print("one message, informed side first:")
print("  sum rate", one.achieved, "certified:", one.certified,
      "via", one.lower_bound_tag)

two = min_sum_rate_bruteforce(pmf, f_a, f_b, 2, "B")
print("two messages, uninformed side first:")
print("  sum rate", round(two.achieved, 9),
      "=", f"h2({pz}) + {pz} * log2({L})")
print("  rates per message:", [round(r, 6) for r in two.rates])
print("  savings factor:", round(one.achieved / two.achieved, 3))

# ---- penalty search --------------------------------------------------------

f_and = and_function()
res = min_sum_rate_penalty(dsbs(0.5), f_and, f_and, 3, "A", seed=0)
print()
print("three-message AND at both terminals, fair bits:")
print("  best feasible sum rate", round(res.achieved, 9))
print("  residuals:", res.residuals)
print("  reference chain value:", round(1.25 * binary_entropy(0.5)
      + 0.5 * binary_entropy(0.25) - 0.25, 9))
print("  lower bound", round(res.lower_bound, 9), f"({res.lower_bound_tag})")
for i, tab in enumerate(res.chain.tables):
    print(f"  message {i + 1} table shape {tab.shape}")
