"""Kernels, their scalings, and the modulation into the time-frequency plane.

Two kernels drive the estimators: a time kernel k (unit integral) and a
frequency kernel q, normalized so that the squared modulus of its Fourier
transform integrates to one.  That weight-mass convention is what makes the
frequency smoother average-preserving: a flat spectrum passes through
unchanged for any bandwidth.
"""

import numpy as np

import lshawkes as lh

k = lh.triangle_kernel()
q = lh.epanechnikov_kernel()

print("=== normalization contracts ===")
x = np.linspace(-0.5, 0.5, 200_001)
print(f"triangle:      k(0) = {k(0.0)},  int k = {np.trapezoid(k(x), x):.12f}")
print(f"epanechnikov:  q(0) = {q(0.0):.6f},  int q^2 = {np.trapezoid(q(x)**2, x):.12f}"
      f"  (1/(2 pi) = {1 / (2 * np.pi):.12f})")

om = np.linspace(-300, 300, 600_001)
w = np.abs(q.ft(om)) ** 2
print(f"Fourier weight: int |Q|^2 dw = {np.trapezoid(w, om):.8f} (unit mass)")
print(f"                int w |Q|^2 dw = {np.trapezoid(om * w, om):.2e} (even kernel, zero)")
print(f"                int w^2 |Q|^2 dw = {np.trapezoid(om**2 * w, om):.4f} (finite second moment)")

print("\n=== scaling into real time ===")
print("w(t) = k(t/(T b1)) / (T b1) localizes around an absolute time with mass 1:")
for b1, T in ((0.2, 10.0), (0.15, 30600.0)):
    wk = lh.scaled_time_kernel(k, b1, T)
    lo, hi = wk.support
    print(f"  b1 = {b1}, T = {T:g}: support [{lo:g}, {hi:g}] s, peak w(0) = {wk(0.0):g}")

print("\n=== modulation into frequency ===")
print("K(t) = sqrt(b2) e^{i w0 t} q(b2 t) concentrates its Fourier weight at w0:")
K = lh.modulated_freq_kernel(q, b2=0.05, omega0=0.6)
print(f"  support in real time: [{K.support[0]:g}, {K.support[1]:g}] s")
for w0 in (0.4, 0.6, 0.8):
    print(f"  |Khat({w0})|^2 = {K.ft_sqmod(w0):.4f}")
print("the identity |Khat(w)|^2 = |Q((w - w0)/b2)|^2 / b2 holds pointwise:")
off = 0.63
print(f"  lhs = {K.ft_sqmod(off):.10f}, rhs = {abs(q.ft((off - 0.6) / 0.05))**2 / 0.05:.10f}")

print("\n=== custom kernels from sampled tables ===")
xs = np.linspace(-1.0, 1.0, 801)
bump = lh.time_kernel_from_table(xs, np.cos(np.pi * xs / 2) ** 2, name="cosine-bump")
print(f"cosine bump renormalized: int k = {np.trapezoid(bump(xs), xs):.9f}, support {bump.support}")
