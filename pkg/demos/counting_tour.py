"""Exact word counts through the dyadic chain decomposition."""

import math

from dyadic_spectra import chains, counting

n = 40
dec = chains.decompose(n)
print(f"n = {n}: {dec.num_chains} chains, lengths {dict(sorted(dec.histogram.items()))}")
print(f"total length {dec.total_length()}")

print(f"\nwords avoiding w_k = w_2k = 1: {counting.count_A(n)}")
print(f"words with w_k = w_2k everywhere: {counting.count_B(n)}")

for k in (10, 20, 30):
    print(f"growth rate at n = 2^{k}: {counting.counting_growth_rate(2**k):.12f}")
print(f"limit series:            {counting.growth_rate_series():.12f}")
print("it sits above 0.562399..., the box-counting rate exceeds the Bowen entropy")

pm = counting.profile_matrix(12)
print(f"\nprofile of n = 12: {len(list(pm.cells()))} nonzero cells, total {pm.total()} = 2^12")
print(pm.to_csv().splitlines()[:6])

# big n needs log mode
n = 1024
log_pm = counting.profile_matrix(n, mode=counting.LOG, max_ones=n // 2, max_pairs=n // 16)
lo, hi = int(0.45 * n), int(0.5 * n)
c = counting.level_set_count(n, (lo, hi), (0, n // 16), mode=counting.LOG)
print(f"\nlog #words at n = {n} with ones in [{lo}, {hi}], pairs <= {n // 16}: {c:.3f}")
print(f"per symbol: {c / n:.5f} (log 2 = {math.log(2):.5f})")
try:
    counting.profile_matrix(4096)
except counting.ExactOverflowError as exc:
    print(f"\nexact mode at n = 4096 refuses: {exc}")
