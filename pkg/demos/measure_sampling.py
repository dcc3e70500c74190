"""Sample telescopic measures and watch the strong law kick in."""

from dyadic_spectra import diagnostics, measure, spectra

for name, params in [
    ("mu_0.2", measure.from_alpha(0.2)),
    ("mu_(0.4, 0.1)", measure.from_theta_alpha(0.4, 0.1)),
    ("uniform", measure.uniform()),
]:
    print(f"{name}: xi = {measure.xi(params):.4f}, pair freq = {measure.expected_pair_freq(params):.4f}, "
          f"local entropy = {measure.local_entropy(params):.6f}")
    for k in (10, 14, 18, 20):
        w = measure.sample(params, 2**k, seed=1)
        print(f"   n = 2^{k:<2d} digits {diagnostics.digit_frequency(w):.4f}  "
              f"pairs {diagnostics.pair_frequency(w):.4f}  "
              f"-log mu / n {measure.empirical_local_entropy(params, w):.6f}")

print(f"\nh_freq(0.4, 0.1) = {spectra.h_freq(0.4, 0.1).entropy:.6f}")

short = measure.sample(measure.from_alpha(0.2), 16, seed=3)
long = measure.sample(measure.from_alpha(0.2), 32, seed=3)
print("\nsame seed, longer word extends the shorter one:")
print(measure.word_to_str(short))
print(measure.word_to_str(long))
