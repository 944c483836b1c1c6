"""
Limit variances of the estimators
=================================

For fBm the variances come from Hermite expansions of |x|^beta and the
correlations of filtered increments.  For Levy motion the filtered
increments are (K-1)-dependent and the covariances come from a Monte
Carlo table.  At alpha = 2 Levy motion is Brownian motion, so both
routes must agree with fBm at H = 1/2.
"""

from stablehurst import levy_cov_table, sigma_fbm, sigma_levy, xi_fbm, xi_levy
from stablehurst.rng import SeedSpec

for H in (0.2, 0.5, 0.8, 0.95):
    xi, sig = xi_fbm(H=H), sigma_fbm(H=H)
    print(f"fBm H={H:4.2f}: Xi = {xi.value:8.3f}  Sigma = {sig.value:8.2f}  "
          f"tail bound {xi.truncation['value_tail_bound']:.1e}")

table = levy_cov_table(2.0, betas=(-0.25, -0.4, -0.1), mc_samples=400_000, seed=SeedSpec(5))
xi, sig = xi_levy(2.0, table=table), sigma_levy(2.0, table=table)
print()
print(f"Levy alpha=2:  Xi = {xi.value:.3f} +- {xi.truncation['std_error']:.3f}   "
      f"Sigma = {sig.value:.1f} +- {sig.truncation['std_error']:.1f}")
print(f"fBm H=1/2:     Xi = {xi_fbm(H=0.5).value:.3f}           Sigma = {sigma_fbm(H=0.5).value:.1f}")

for alpha in (0.8, 1.2, 1.5):
    table = levy_cov_table(alpha, betas=(-0.25, -0.4, -0.1), mc_samples=400_000, seed=SeedSpec(6))
    print(xi_levy(alpha, table=table).report(), end="")
