"""End-to-end analysis of day-indexed event data.

Mimics a transaction-times study: many trading days of timestamped events
over an 8.5 h session, analyzed day by day with the spectrum localized in
time and frequency (bandwidths b1 = 0.15 in absolute time, b2 = 0.005 Hz),
then averaged across days and Poisson-normalized.  On the synthetic data
the generator model is known, so the heatmaps can be read against truth:
the normalized spectrum sits above 1 exactly where the branching ratio
zeta(u) is substantial.

Writes demo_days.csv plus the three heatmap artifacts under demo_output/.
The same analysis runs from the command line:

    lshawkes analyze --data demo_days.csv --session 30600 \
        --b1 0.15 --b2-hz 0.005 --times 0.15:0.85:13 --freqs-hz 0:0.1:11 \
        --out-prefix demo_output/run --format csv
"""

import os
import time

import numpy as np

import lshawkes as lh

model = lh.load_model("demos/models/transactions.json")
print("generator: U-shaped baseline (events/s), zeta(u) = 0.375 - 0.225 cos(2 pi u)")

t0 = time.time()
table = lh.make_synthetic_table(model, n_days=10, session_length=30600.0, master_seed=4242, burn_in=40.0)
lh.write_days_csv(table, "demo_days.csv")
print(f"simulated 10 days, {sum(table.counts().values())} events, in {time.time() - t0:.1f} s")
print("per-day counts:", table.counts())

t0 = time.time()
times = np.linspace(0.15, 0.85, 13)
freqs_hz = np.linspace(0.0, 0.1, 11)
density, bartlett, normalized = lh.analyze(table, times, freqs_hz, b1=0.15, b2_hz=0.005)
print(f"per-day estimation + averaging in {time.time() - t0:.1f} s")

os.makedirs("demo_output", exist_ok=True)
for name, artifact in (("mean_density", density), ("bartlett", bartlett), ("poisson_normalized", normalized)):
    lh.export_heatmap(artifact, f"demo_output/{name}.csv", format="csv")
    lh.export_heatmap(artifact, f"demo_output/{name}.json", format="json")
print("wrote demo_output/{mean_density,bartlett,poisson_normalized}.{csv,json}")

print("\naveraged mean density vs truth (events/s):")
print(f"{'u':>5} {'mhat_avg':>9} {'m1':>7} {'zeta':>6}")
for i, u in enumerate(times):
    print(
        f"{u:5.2f} {density.grid.values[i, 0]:9.4f} {lh.local_mean_density(model, u):7.4f} "
        f"{float(model.fertility.zeta(u)):6.3f}"
    )

print("\nPoisson-normalized spectrum (rows u, columns Hz); Poisson data would sit at 1:")
print("      " + "".join(f"{f:7.3f}" for f in freqs_hz))
for i, u in enumerate(times):
    print(f"{u:5.2f} " + "".join(f"{v:7.2f}" for v in normalized.grid.values[i]))

vals = normalized.grid.values
print(f"\nfraction of cells above 1: {(vals > 1).mean() * 100:.0f}%")
print("the self-excitation signature tracks zeta(u): strongest mid-session, weakest at the edges")
