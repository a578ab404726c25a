"""
Slow divergence of a cubic integral
===================================

Truncating the half-disk log vortex at radius 1/n gives bounded data whose
cubic integral I_n grows without bound, but only like (log n)^(2 - 3 alpha).
At alpha = 0.6 that exponent is 0.2, so the growth is slow and a naive power fit
is badly biased by the next term in the expansion.
"""

import numpy as np

from enslab.experiments import cubic_divergence_experiment

ns = [10**2, 10**3, 10**4, 10**5]
res = cubic_divergence_experiment(0.6, ns)
for row in res.rows:
    print(f"n = {row.n:>7d}   I_n = {row.cubic:.6f}")

print(f"one-term fit A + c L^p:          p = {res.exponent_naive():.3f}")
print(f"fit with the subleading term:    p = {res.exponent_expansion():.3f}   (expected 0.2)")
print("log n values:", np.round(np.log(ns), 3))
