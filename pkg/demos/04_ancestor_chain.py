"""The ancestor-label chain and its fluid limit.

Following parent pointers from the youngest vertex down to the root gives a
Markov chain on labels: from l it jumps uniformly into l's attachment
window.  Scaled by n and run on the n**(1-beta) step clock, the chain
concentrates on f(t) = (1 - (1-beta)t/2)**(1/(1-beta)), hitting zero at
t = 2/(1-beta) -- which is exactly why the height scales the way it does.
No tree is needed: the chain simulator runs in O(1) memory per step.
"""

import numpy as np

from memtrees import simulate_chain
from memtrees.limits import chain_absorption_time, f_beta
from memtrees.rng import mix64

n = 10**6
beta = 0.5
scale = n ** (1.0 - beta)

print(f"one chain at n={n}, beta={beta} (absorption predicted at t = {chain_absorption_time(beta)}):")
chain = simulate_chain(n, beta, seed=11)
print("  t      label/n    fluid     gap")
for t in (0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5):
    m = int(t * scale)
    if m >= len(chain):
        break
    f = f_beta(beta, t)
    print(f"  {t:.1f}    {chain[m] / n:.4f}    {f:.4f}   {chain[m] / n - f:+.4f}")
print(f"  absorbed after {len(chain) - 1} steps; {(len(chain) - 1) / scale:.3f} * n^(1-beta)")

print("\nthe whole path stays inside a narrow tube around the fluid limit:")
sups = []
for rep in range(20):
    ch = simulate_chain(n, beta, mix64(12, rep))
    ts = np.arange(len(ch)) / scale
    keep = ts <= 3.0
    f = np.array([f_beta(beta, t) for t in ts[keep]])
    sups.append(np.abs(ch[keep] / n - f).max())
print(f"  sup-gap over 20 chains: mean {np.mean(sups):.4f}, worst {np.max(sups):.4f}")

print("\nchain lengths across exponents (one replication each):")
for b in (0.25, 0.5, 0.75):
    ch = simulate_chain(n, b, seed=13)
    pred = chain_absorption_time(b) * n ** (1.0 - b)
    print(f"  beta={b}: length {len(ch) - 1:>6}   prediction {pred:8.0f}")

print("\nthe idealized window convention differs only at the last rungs:")
lit = simulate_chain(1000, 0.5, seed=14, idealized_window=True)
std = simulate_chain(1000, 0.5, seed=14)
print(f"  window-law chain ends ...{std[-3:].tolist()}, idealized ends ...{lit[-3:].tolist()}")
