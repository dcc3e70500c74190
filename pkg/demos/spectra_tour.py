"""Walk through the closed-form entropy spectra and the root solvers."""

import math

import numpy as np

from dyadic_spectra import spectra

p = spectra.solve_kps()
print(f"p^2 = (1-p)^3 has root p = {p:.12f}")
print(f"-log(1-p) = {-math.log1p(-p):.9f} nats")

# pair frequency alpha, all three families side by side
print("\n alpha   normal      freq(1/2)   A")
for alpha in np.linspace(0, 0.5, 11):
    row = [spectra.h_normal_alpha(alpha), spectra.h_freq(0.5, alpha), spectra.h_A_alpha(alpha)]
    print(f" {alpha:.2f}  " + "  ".join(f"{pt.entropy:.6f} " for pt in row))

theta = spectra.solve_corollary_theta(0.0)
print(f"\nbest digit frequency at alpha = 0: theta* = {theta:.12f}")
print(f"closed form:                        {spectra.theta_star_closed_form():.12f}")
print(f"h_freq(theta*, 0) = {spectra.h_freq(theta, 0.0).entropy:.12f}")
print(f"h_A(0)            = {spectra.h_A_alpha(0.0).entropy:.12f}")

roots = spectra.solve_ps(0.3)
print(f"\nalpha = 0.3: p = {roots.p:.10f}, q = {roots.q:.10f}, residuals {roots.residuals(0.3)}")

print("\nabove alpha = 1/2 no normal sequence qualifies:")
print(spectra.h_normal_alpha(0.6))
