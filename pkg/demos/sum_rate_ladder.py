# Sum-rate ladder for computing AND at both terminals of a doubly
# symmetric binary source. Four levels, each strictly cheaper:
#   two messages, three messages, the infinite-message staircase limit,
#   and the converse bound no protocol can beat.

import numpy as np

from ifcomp import (
    and_three_message_rate,
    closed_form_infinite_rate,
    infinite_message_lower_bound,
    two_message_rates,
    binary_entropy,
)

print("p      2-msg     3-msg     infinite  bound")
for p in (0.1, 0.2, 1 / 3, 0.4, 0.5):
    two = 1.5 * binary_entropy(p)           # describe x, answer where x = 1
    three = and_three_message_rate(p)
    inf = closed_form_infinite_rate(p, p)   # p = q only when sources are fair
    bound = infinite_message_lower_bound(p, p)
    print(f"{p:.3f}  {two:.6f}  {three:.6f}  {inf:.6f}  {bound:.6f}")

# note: the infinite column uses independent Ber(p) x Ber(p) sources, which
# matches the dsbs columns only at p = 1/2 where the pair is independent.
print()
p = 0.5
two = float(sum(two_message_rates(p, p)))
print("fair bits, all four levels:")
print("  two messages      ", two)
print("  three messages    ", and_three_message_rate(p))
print("  infinite messages ", closed_form_infinite_rate(p, p))
print("  lower bound       ", infinite_message_lower_bound(p, p))

# where does the third message help most?
grid = np.arange(0.001, 0.5, 0.001)
gaps = 1.5 * np.vectorize(binary_entropy)(grid) \
    - np.vectorize(and_three_message_rate)(grid)
k = int(np.argmax(gaps))
print()
print(f"largest two-vs-three gap: {gaps[k]:.6f} bits at p = {grid[k]:.3f}")
