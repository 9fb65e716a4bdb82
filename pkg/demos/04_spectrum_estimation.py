"""Estimating the local mean density and local Bartlett spectrum.

One long realization of a locally stationary Hawkes process is enough to
read off its time-varying first and second order structure: the mean
density via a kernel sum, the spectrum via the time-frequency moment
estimator ghat = E^[|N(K)|^2; w] - |E^[N(K); w]|^2 with a modulated kernel
K and a time-localizing weight w.
"""

import numpy as np

import lshawkes as lh

model = lh.load_model("demos/models/rates.json")
T = 65_536.0
series = lh.simulate_ls_hawkes(model, T, lh.SimulationConfig(seed=11, burn_in=10.0))
print(f"simulated {series.n} events on [0, {T:g}]")

k = lh.triangle_kernel()
q = lh.epanechnikov_kernel()

print("\n=== local mean density ===")
b1 = 0.1
print(f"{'u':>5} {'mhat':>8} {'m1':>8}")
for u0 in np.linspace(0.1, 0.9, 9):
    mhat = lh.estimate_mean_density(series, u0, b1, k)
    print(f"{u0:5.2f} {mhat:8.4f} {lh.local_mean_density(model, u0):8.4f}")

print("\n=== local Bartlett spectrum at one point ===")
cfg = lh.EstimatorConfig(b1=0.1, b2=0.1)
cfg.require_admissible(T)
for w0 in (0.0, 1.0, 3.0):
    ghat = lh.estimate_bartlett(series, 0.5, w0, cfg, k, q)
    print(f"  omega = {w0}: ghat = {ghat:.4f}   gamma = {lh.local_bartlett(model, 0.5, w0):.4f}")

print("\n=== time-frequency grid ===")
times = np.linspace(0.1, 0.9, 9)
freqs = np.linspace(0.0, 3.0, 7)
grid = lh.estimate_tf_grid(series, times, freqs, cfg, k, q)
print("rows: u, columns: omega (rad/time); single realization, so expect noise")
header = "     " + "".join(f"{w:8.2f}" for w in freqs)
print(header)
for i, u0 in enumerate(times):
    print(f"{u0:4.2f} " + "".join(f"{v:8.3f}" for v in grid.values[i]))
print("\ntheory:")
print(header)
for u0 in times:
    print(f"{u0:4.2f} " + "".join(f"{lh.local_bartlett(model, u0, w):8.3f}" for w in freqs))

print("\nFeasibility: points too close to the edges of (0, 1) are rejected,")
print("because the kernel supports would stick out of the observed window:")
print(f"  u0 = 0.02 feasible? {lh.check_feasibility(0.02, cfg.b1, cfg.b2, T, k, q)}")
