"""Tree heights: logarithmic with a fraction window, polynomial with a tail.

Fraction window: H_n / log n converges to a constant computed two
independent ways -- as the reciprocal of a first-birth constant (tilted
Laplace-transform bisection), and as a depth rate from the Legendre
transform of the attachment variable's log-moment function.  The two
pipelines must agree: kappa * alpha_max = 1.

Tail window: H_n grows like (2/(1-beta)) * n**(1-beta).
"""

import math

import numpy as np

from memtrees import grow_streaming
from memtrees.limits import height_constants
from memtrees.rng import mix64
from memtrees.schedules import Macroscopic, Mesoscopic

print("height constants along the theta grid (two routes, one identity):")
print("  theta   kappa      alpha_max  kappa*alpha_max - 1")
for theta in (0.1, 0.3, 0.5, 0.7, 0.9):
    hc = height_constants(theta, tol=1e-9)
    print(f"  {theta:.1f}   {hc.kappa:.6f}   {hc.alpha_max:9.4f}   {hc.kappa * hc.alpha_max - 1:+.2e}")

print("\nfraction window, theta=0.5: H/log n drifts up toward 1/kappa")
target = 1.0 / height_constants(0.5).kappa
for n in (10**4, 10**5, 10**6):
    hs = [grow_streaming(Macroscopic(0.5), n, mix64(3, r)).height for r in range(20)]
    print(f"  n={n:>8}: mean H/log n = {np.mean(hs) / math.log(n):.3f}   (limit {target:.3f})")

print("\ntail window, beta=0.5: H/sqrt(n) concentrates near 4")
for n in (10**4, 10**5, 10**6):
    hs = [grow_streaming(Mesoscopic(0.5), n, mix64(4, r)).height for r in range(20)]
    print(f"  n={n:>8}: mean H/sqrt(n) = {np.mean(hs) / math.sqrt(n):.3f}")

print("\ntail window, the exponent sets the growth: H ~ (2/(1-beta)) n^(1-beta)")
n = 10**6
for beta in (0.25, 0.5, 0.75):
    hs = [grow_streaming(Mesoscopic(beta), n, mix64(5, r)).height for r in range(5)]
    pred = 2.0 / (1.0 - beta) * n ** (1.0 - beta)
    print(f"  beta={beta}: mean H = {np.mean(hs):9.1f}   prediction {pred:9.1f}")
