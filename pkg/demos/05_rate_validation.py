"""Monte-Carlo validation of the estimators' error rates.

Three checks, at desk scale:

* the mean-density estimator's MSE decays like T^(-2 beta/(2 beta + 1)),
  i.e. slope -2/3 for beta = 1 in a log-log fit against the horizon;
* the spectrum estimator under the rate-optimal bandwidth schedule decays
  like T^(-4 beta/(5 beta + 2)), slope -4/7 for beta = 1;
* counts of the stationary process deviate at the sqrt(n) scale:
  Var(count on [0, n]) / n stays bounded and approaches 2 pi gamma(0).
Everything is a deterministic function of the master seeds.
"""

import time

import numpy as np

import lshawkes as lh

model = lh.load_model("demos/models/rates.json")
horizons = [2.0**e for e in range(12, 17)]

print("=== mean-density MSE rate (target slope -2/3) ===")
t0 = time.time()
report = lh.mse_experiment(
    model, "mean-density", 0.5, horizons, replicates=100,
    bandwidths=lambda T: (T ** (-1.0 / 3.0), 1.0), master_seed=1, burn_in=40.0,
)
for rec in report.records:
    print(f"  T = {rec.horizon:>7.0f}  b1 = {rec.b1:.4f}  mse = {rec.mse:.3e}")
fit = lh.fit_rate(report)
print(f"fitted slope {fit.slope:.3f} (r^2 {fit.r_squared:.3f}) in {time.time() - t0:.0f} s")

print("\n=== Bartlett MSE rate with optimal bandwidths (target slope -4/7) ===")
t0 = time.time()
report = lh.mse_experiment(
    model, "bartlett", (0.5, 1.0), horizons, replicates=80,
    bandwidths="optimal", master_seed=2, burn_in=40.0,
)
for rec in report.records:
    print(f"  T = {rec.horizon:>7.0f}  b1 = {rec.b1:.4f}  b2 = {rec.b2:.4f}  mse = {rec.mse:.3e}")
fit = lh.fit_rate(report)
print(f"fitted slope {fit.slope:.3f} (r^2 {fit.r_squared:.3f}) in {time.time() - t0:.0f} s")
print("predicted exponents for beta = 1:", lh.predicted_mse_rate(1.0))

print("\n=== deviation bound: Var(count)/n stays bounded ===")
frozen_model = lh.load_model("demos/models/stationary_exp.json")
scan = lh.variance_growth_scan(
    frozen_model, 0.5, [100.0, 1000.0, 10_000.0], replicates=300, master_seed=3, burn_in=40.0
)
for n, ratio in zip(scan.window_lengths, scan.var_over_n):
    print(f"  n = {n:>7.0f}  Var/n = {ratio:.3f}")
print(f"limit 2 pi gamma(0) = m1/(1-zeta)^2 = {scan.theory_limit:g}; bounded: {scan.bounded}")

print("\n=== frequency-direction bias is quadratic in b2 ===")
scan_model = lh.LsHawkesModel(lh.baseline(1.0), lh.exponential_fertility(0.3, 3.0))
freq = lh.frequency_bias_scan(scan_model, 0.5, 1.0, [0.4, 0.2, 0.1, 0.05])
for b2, gap in zip(freq.bandwidths, freq.gaps):
    print(f"  b2 = {b2:4.2f}  |gamma_b2 - gamma| = {gap:.2e}")
print(f"log-log slope {freq.slope:.3f} (r^2 {freq.r_squared:.4f})")
