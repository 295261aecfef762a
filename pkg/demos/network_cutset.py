# Cut-set lower bounds in small networks, solved as linear programs,
# against explicit schemes that meet them.

import numpy as np

from ifcomp import (
    FunctionTable,
    JointPmf,
    NetworkSpec,
    binary_entropy,
    build_cutset_lp,
    concurrent_to_alternating,
    dsbs,
    merge_schedule_rates,
    modulo_sum_rates,
    relay_rates,
    solve_lp,
    star_and_total,
    star_fair_bit_limit,
)

# ---- two helpers, one sink wanting the parity ------------------------------

p = 0.25
joint = JointPmf((2, 2, 1), dsbs(p).table.reshape(-1))
fxor = FunctionTable((2, 2, 1), 2, [0, 1, 1, 0])
net = NetworkSpec(joint, [(0, 2), (1, 2)], [None, None, fxor])
sol = solve_lp(build_cutset_lp(net))
print(f"parity sink, crossover {p}:")
print("  LP optimum      ", round(sol.optimum, 9))
print("  2 h2(p)         ", round(2 * binary_entropy(p), 9))
print("  scheme rates    ", {k: round(v, 6)
                             for k, v in modulo_sum_rates(p).items()})

# ---- relay line: when is forwarding cheaper than answering? ----------------

f_and = FunctionTable((2, 2), 2, [0, 0, 0, 1])
print()
print("relay line computing AND, total vs two direct descriptions:")
print("p      relay      direct     winner")
for p in (0.15, 0.25, 1 / 3, 0.40, 0.48):
    total = sum(relay_rates(dsbs(p), f_and).values())
    direct = 2 * binary_entropy(p)
    tag = "tie" if abs(total - direct) < 1e-9 else (
        "relay" if total < direct else "direct")
    print(f"{p:.3f}  {total:.6f}  {direct:.6f}  {tag}")

# ---- star of AND terminals: interaction pays from six terminals on --------

print()
print("star: m terminals with fair bits, everyone wants the AND of all")
print("m    interactive  baseline m-1")
for m in (3, 4, 5, 6, 8, 16, 64):
    print(f"{m:3d}  {star_and_total([0.5] * m):.6f}     {m - 1}")
print("limit as m grows:", round(star_fair_bit_limit(), 9), "= 3 + log2(e)")

# ---- concurrent protocols serialize into alternating ones ------------------

rounds = 3
messages = concurrent_to_alternating(rounds)
ra = [0.5, 0.25, 0.125]
rb = [0.4, 0.2, 0.1]
merged = merge_schedule_rates(messages, ra, rb)
print()
print(f"{rounds} concurrent rounds serialize into {len(messages)} messages:")
for (sender, payloads), rate in zip(messages, merged):
    names = ", ".join(f"{s}{i}" for s, i in payloads)
    print(f"  {sender} sends [{names}] at rate {rate}")
print("  total", sum(merged), "= concurrent total", sum(ra) + sum(rb))
