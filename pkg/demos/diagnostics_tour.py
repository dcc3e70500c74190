"""Finite-scale normality checks on sampled words."""

import numpy as np

from dyadic_spectra import diagnostics, measure

N = 12
print(f"R({N}, 2) parts:")
for part in diagnostics.PARTS:
    s = diagnostics.r_set(N, 2, part)
    print(f"  {part:>3}: {len(s)} positions, first {s[:4].tolist()}")

w = measure.sample(measure.from_alpha(0.2), 2**N, seed=4)
table = diagnostics.x_table(w, 4)
print("\nbookkeeping identities hold:", table.relations_hold())
for num, i, lhs, rhs in table.relations()[:8]:
    print(f"  ({num}) i={i}: {lhs} = {rhs}")

gap = diagnostics.nnorm_gap(table, 0.1)
print(f"\nsmallest eps for the 11/00 balance: {gap.min_eps:.4f}")

# a 4096-bit word is too short for eps = 0.05 at small blocks, so go longer
big = measure.sample(measure.from_alpha(0.2), 2**16, seed=4)
report = diagnostics.membership_N(big, 14, 2, 0.05)
print(f"normal at scales 14..{report.truncated_at} with eps 0.05: {report.member}")
print(f"pair frequency window 0.2 +- 0.02: {diagnostics.membership_A(big, 0.2, 14, 0.02).member}")

print("\nblock deviations shrink as the word grows:")
for k in (12, 16, 20):
    w = measure.sample(measure.from_alpha(0.2), 2**k, seed=4)
    devs = [diagnostics.max_block_deviation(w, m) for m in range(1, 5)]
    print(f"  n = 2^{k}: " + " ".join(f"{d:.4f}" for d in devs))

sub = diagnostics.arithmetic_subsequence(w, 1, 3)
print(f"\nevery third bit from position 4 on, order-2 deviation {diagnostics.max_block_deviation(sub, 2):.4f}")

periodic = np.tile(np.array([0, 1], dtype=np.uint8), 1024)
print(f"0101...: normal? {diagnostics.membership_N(periodic, 8, 1, 0.1).member}")
