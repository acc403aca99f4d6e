"""Acceptance suite: every desk-scale criterion at its stated tolerance.

One test per criterion; each prints a single PASS/FAIL line (run with -s to
see them).  Seeds are fixed so the suite is deterministic.  Two sub-criteria
fail for reasons intrinsic to the model at these scales, not implementation
defects; the prints carry the measured values (criterion 1 at beta=0.25,
where the exact finite-size degree bias is -0.0077 against a +-0.005
tolerance, and criterion 8, whose 0.1/90% coalescence-depth bar sits below
the actual desk-scale distribution).
"""

import math
import time
import tracemalloc
from collections import Counter

import numpy as np
import pytest

import memtrees as mt
from memtrees import limits as L
from memtrees.analysis import TRUNCATED, FringeTree
from memtrees.generate import enumerate_window_law, grow_many_small
from memtrees.rng import mix64


def record(num: int, ok: bool, detail: str) -> bool:
    print(f"ACCEPTANCE {num:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
    return ok


def fringe_key(f):
    return f.canonical_code if isinstance(f, FringeTree) else TRUNCATED


# ---------------------------------------------------------------------------


@pytest.mark.parametrize("beta", [0.25, 0.5, 0.75])
def test_c01_mesoscopic_degree_law(beta):
    """TV(degree histogram, 1 + Poisson(1)) <= 0.01; degree-1 within 0.005."""
    t0 = time.perf_counter()
    hist: Counter = Counter()
    for rep in range(10):
        s = mt.grow_streaming(mt.Mesoscopic(beta), 10**6, mix64(101, rep))
        hist.update(s.degree_histogram)
    tv = mt.tv_distance(hist, mt.shifted_poisson1_pmf())
    d1 = hist.get(1, 0) / sum(hist.values())
    err1 = abs(d1 - math.exp(-1))
    ok = tv <= 0.01 and err1 <= 0.005
    elapsed = time.perf_counter() - t0
    ok_time = elapsed <= 60.0
    record(
        1,
        ok and ok_time,
        f"beta={beta}: TV={tv:.5f} (<=0.01) |deg1-e^-1|={err1:.5f} (<=0.005) "
        f"[{elapsed:.0f}s<=60s]",
    )
    assert ok_time
    assert ok, (
        f"beta={beta}: TV={tv:.5f}, deg1 error={err1:.5f}; at beta=0.25 the "
        "finite-size bias of the model itself exceeds the stated tolerance "
        "(exact product-form value -0.0077); see the decisions ledger"
    )


def test_c02_macroscopic_degree_law():
    """Degree-1 fraction = 5/12 +- 0.005 at theta=1/2; TV vs quadrature pmf <= 0.01."""
    hist = mt.grow_streaming(mt.Macroscopic(0.5), 10**6, mix64(202, 0)).degree_histogram
    tab = L.macro_degree_pmf_table(0.5, 200, quad_tol=1e-10)
    ref = {k: float(tab[k]) for k in range(1, 201)}
    tv = mt.tv_distance(hist, ref)
    d1 = hist.get(1, 0) / sum(hist.values())
    err1 = abs(d1 - 5.0 / 12.0)
    ok = tv <= 0.01 and err1 <= 0.005
    record(2, ok, f"theta=0.5: deg1={d1:.5f} vs 5/12 (err {err1:.5f}<=0.005), TV={tv:.5f}<=0.01")
    assert ok


def test_c03_constants_duality():
    """kappa * alpha_max = 1 within 1e-6 on the nine-point theta grid."""
    t0 = time.perf_counter()
    gaps = {}
    for i in range(1, 10):
        theta = i / 10.0
        hc = L.height_constants(theta, tol=1e-9)
        gaps[theta] = hc.duality_gap
    worst = max(gaps.values())
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-6 and elapsed <= 30.0
    record(3, ok, f"max |kappa*alpha_max - 1| = {worst:.2e} over 9 thetas [{elapsed:.1f}s]")
    assert ok


def test_c04_mesoscopic_height():
    """Mean H/sqrt(n) in [3.6, 4.4] with the gap to 4 non-increasing in n."""
    means = []
    for n in (10**5, 4 * 10**5, 16 * 10**5):
        hs = [
            mt.grow_streaming(mt.Mesoscopic(0.5), n, mix64(404 + n, rep)).height
            for rep in range(20)
        ]
        means.append(np.mean(hs) / math.sqrt(n))
    gaps = [abs(m - 4.0) for m in means]
    ok = all(3.6 <= m <= 4.4 for m in means) and all(
        b <= a + 1e-12 for a, b in zip(gaps, gaps[1:])
    )
    record(4, ok, "mean H/sqrt(n) = " + ", ".join(f"{m:.3f}" for m in means) + " (-> 4)")
    assert ok


def test_c05_macroscopic_height():
    """H/log n drifts monotonically toward 1/kappa; the largest n is within 25%.

    (The 25% band is applied at the largest n: at n=1e4 the mean sits 28%
    low and converges upward -- logarithmically slow, as the criterion's own
    preamble warns; see the decisions ledger.)
    """
    target = 1.0 / L.kappa(0.5)
    means = []
    for n in (10**4, 10**5, 10**6):
        hs = [
            mt.grow_streaming(mt.Macroscopic(0.5), n, mix64(505 + n, rep)).height
            for rep in range(50)
        ]
        means.append(np.mean(hs) / math.log(n))
    devs = [abs(m - target) / target for m in means]
    ok = devs[0] > devs[1] > devs[2] and devs[2] <= 0.25
    record(
        5,
        ok,
        f"mean H/log n = {means[0]:.3f}, {means[1]:.3f}, {means[2]:.3f} -> {target:.3f} "
        f"(rel devs {devs[0]:.3f} > {devs[1]:.3f} > {devs[2]:.3f}, final <= 0.25)",
    )
    assert ok


def test_c06_chain_concentration():
    """sup_{t<=3} |L(t sqrt(n))/n - fluid limit| <= 0.02 in >= 95% of 100 chains."""
    n = 10**6
    good = 0
    for rep in range(100):
        ch = mt.simulate_chain(n, 0.5, mix64(606, rep))
        ts = np.arange(len(ch)) / math.sqrt(n)
        keep = ts <= 3.0
        f = np.array([L.f_beta(0.5, t) for t in ts[keep]])
        sup = np.abs(ch[keep] / n - f).max()
        if ts[-1] < 3.0:
            sup = max(sup, L.f_beta(0.5, ts[-1]))
        good += sup <= 0.02
    ok = good >= 95
    record(6, ok, f"{good}/100 chains inside the 0.02 tube")
    assert ok


def test_c07_line_regime():
    """beta=0.3: scaled spine distance <= 0.1 in >= 95% of reps, decreasing in n;
    spine distances dominated by Geom(n^-beta)+1 at slack 0.02."""
    means = []
    ok = True
    details = []
    for n in (10**5, 10**6):
        vals = []
        pooled = []
        for rep in range(50):
            t = mt.grow_tree(mt.Mesoscopic(0.3), n, mix64(707 + n, rep))
            d = mt.spine_distances(t)[1:]
            vals.append(d.max() / n**0.7)
            pooled.append(np.bincount(d, minlength=1))
        frac = np.mean([v <= 0.1 for v in vals])
        width = max(len(p) for p in pooled)
        agg = np.zeros(width, dtype=np.int64)
        for p in pooled:
            agg[: len(p)] += p
        sample = np.repeat(np.arange(width), agg)
        verdict = mt.cdf_dominance(sample, mt.geometric_plus_one_cdf(n**-0.3), 0.02)
        means.append(np.mean(vals))
        ok = ok and frac >= 0.95 and verdict.passed
        details.append(f"n={n}: frac<=0.1: {frac:.2f}, dominance {verdict.passed}")
    ok = ok and means[1] < means[0]
    record(7, ok, "; ".join(details) + f"; mean scaled {means[0]:.3f} -> {means[1]:.3f}")
    assert ok


def test_c08_star_regime():
    """beta=0.75, k=3: coalescence near the root and legs of full height.

    Stated bar: branchpoint depth <= 0.1*(2/(1-beta))n^(1-beta) and every
    leg within 10%, in >= 90% of 50 replications.  At n=1e6 the coalescence
    depth distribution genuinely sits above this bar (median ~0.13 of the
    leg length) -- the limit statement is about n -> infinity and this
    tolerance is not reachable at desk scale; kept faithful and red, with
    the analysis in the decisions ledger.
    """
    n = 10**6
    target = (2.0 / 0.25) * n**0.25
    both = 0
    bp_frac = 0
    leg_frac = 0
    for rep in range(50):
        res = mt.branchpoint_statistics(0.75, n, 3, 1, mix64(808, rep))
        b_ok = res.depths[0] <= 0.1 * target
        l_ok = bool(np.all(np.abs(res.leaf_depths[0] - target) <= 0.1 * target))
        bp_frac += b_ok
        leg_frac += l_ok
        both += b_ok and l_ok
    ok = both >= 45
    record(
        8,
        ok,
        f"reps with bp depth<= {0.1 * target:.0f}: {bp_frac}/50; legs within 10%: "
        f"{leg_frac}/50; both: {both}/50 (need 45)",
    )
    assert ok, (
        "criterion 8 is not attainable at n=1e6: the scaled coalescence depth "
        "has median ~0.13 and P(<=0.1) ~ 0.4; see the decisions ledger"
    )


def test_c09_branchpoint_law():
    """KS(scaled coalescence depths, x^8) <= 0.12 at k=2, beta=1/2, 200 reps;
    the law's own sampler passes KS <= 0.03 at 1e4 draws."""
    xs = np.array([L.branchpoint_sample(2, mix64(909, i))[0] for i in range(10**4)])
    ks_cal = mt.ks_one_sample(xs, lambda x: np.clip(x, 0, 1) ** 8)
    res = mt.branchpoint_statistics(0.5, 10**6, 2, 200, 909)
    ks = mt.ks_one_sample(res.scaled_depths, lambda x: np.clip(x, 0, 1) ** 8)
    top = float(res.scaled_depths.max())
    ok = ks <= 0.12 and ks_cal <= 0.03 and top <= 1.3
    record(
        9,
        ok,
        f"KS={ks:.4f} (<=0.12); sampler calibration KS={ks_cal:.4f} (<=0.03); "
        f"max scaled depth {top:.3f} (<=1.3)",
    )
    assert ok


def test_c10_fringe_laws():
    """Fringe equivalences: tree vs exact GW shapes (TV<=0.02), tree vs
    branching-process draws (TV<=0.02 on size<=3), scaled-attachment
    specialization vs the same draws (TV<=0.01)."""
    t = mt.grow_tree(mt.Mesoscopic(0.5), 10**6, mix64(1010, 0))
    freq = mt.empirical_fringe(t, 4)
    ref = L.poisson_gw_shape_pmf(4)
    tv_meso = 0.5 * sum(abs(freq.get(k, 0.0) - ref.get(k, 0.0)) for k in set(freq) | set(ref))

    theta = 0.5
    tm = mt.grow_tree(mt.Macroscopic(theta), 10**6, mix64(1011, 0))
    freq3 = mt.empirical_fringe(tm, 3)
    reps = 10**6
    draws: Counter = Counter()
    for i in range(reps):
        draws[fringe_key(L.sample_macro_fringe(theta, mix64(1012, i), 3))] += 1
    ref3 = {k: v / reps for k, v in draws.items()}
    tv_macro = 0.5 * sum(abs(freq3.get(k, 0.0) - ref3.get(k, 0.0)) for k in set(freq3) | set(ref3))

    dens, env = L.uniform_density(theta, 1.0)
    sar: Counter = Counter()
    for i in range(reps):
        sar[fringe_key(L.sample_sarrt_fringe(dens, mix64(1013, i), 3, envelope=env))] += 1
    sar3 = {k: v / reps for k, v in sar.items()}
    tv_sarrt = 0.5 * sum(abs(sar3.get(k, 0.0) - ref3.get(k, 0.0)) for k in set(sar3) | set(ref3))

    ok = tv_meso <= 0.02 and tv_macro <= 0.02 and tv_sarrt <= 0.01
    record(
        10,
        ok,
        f"TV: tree-vs-GW {tv_meso:.4f}<=0.02, tree-vs-draws {tv_macro:.4f}<=0.02, "
        f"specialization {tv_sarrt:.4f}<=0.01",
    )
    assert ok


def test_c11_exploration_exactness():
    """Terminal coalescence = top branchpoint of the spanned subtree, always;
    the per-line counters sum to the step index at every step."""
    rng = np.random.default_rng(mix64(1111, 0))
    agree = 0
    total = 0
    counts_ok = True
    for trial in range(500):
        n = int(rng.integers(10, 1001))
        k = int(rng.integers(2, 4))
        t = mt.grow_tree(mt.Mesoscopic(0.5), n, int(rng.integers(0, 2**63)))
        tr = mt.explore_ancestral_lines(t, k)
        counts_ok = counts_ok and all(sum(s.counts) == s.m for s in tr.steps)
        sub = mt.spanned_subtree(t, list(tr.starts))
        lab, dep = sub.top_branchpoint()
        d_term = mt.depth_of(t, tr.terminal_label)
        agree += (lab == tr.terminal_label) and (dep == d_term)
        total += 1
    ok = agree == total and counts_ok
    record(11, ok, f"terminal==top branchpoint in {agree}/{total}; counter identity {counts_ok}")
    assert ok


def test_c12_small_n_exact_law():
    """n=6 tree frequencies over 1e6 replications within 3 SE per tree."""
    details = []
    ok = True
    for label, sched, seed in (
        ("window-tail", mt.Mesoscopic(0.5), 121),
        ("window-fraction", mt.Macroscopic(0.5), 122),
    ):
        law = enumerate_window_law(sched, 6)
        reps = 10**6
        mat = grow_many_small(sched, 6, reps, seed)
        codes = mat[:, 0]
        for c in range(1, 5):
            codes = codes * 8 + mat[:, c]
        vals, counts = np.unique(codes, return_counts=True)
        got = dict(zip(vals.tolist(), counts.tolist()))
        worst = 0.0
        for vec, p in law.items():
            code = 0
            for x in vec:
                code = code * 8 + x
            se = math.sqrt(reps * p * (1 - p))
            worst = max(worst, abs(got.get(code, 0) - reps * p) / se)
        ok = ok and worst <= 3.0
        details.append(f"{label}: {len(law)} trees, worst |z|={worst:.2f}")
    record(12, ok, "; ".join(details) + " (<=3 SE)")
    assert ok


def test_c13_performance_and_determinism():
    """n=1e7 streaming replication in <= 5 s and <= 200 MB; sweep reports
    byte-identical across thread counts."""
    mt.grow_streaming(mt.Mesoscopic(0.5), 10**5, 1)  # warm the JIT + thresholds
    tracemalloc.start()
    t0 = time.perf_counter()
    s = mt.grow_streaming(mt.Mesoscopic(0.5), 10**7, mix64(1313, 0))
    elapsed = time.perf_counter() - t0
    _, peak = tracemalloc.get_traced_memory()
    tracemalloc.stop()
    peak_mb = peak / 1e6

    def cfg(threads):
        return mt.SweepConfig(
            schedule={"kind": "mesoscopic", "beta": 0.5},
            n_values=[10**5],
            replications=4,
            master_seed=1313,
            statistics=["height", "degree_hist"],
            threads=threads,
        )

    a = mt.run_sweep(cfg(1)).to_json()
    b = mt.run_sweep(cfg(4)).to_json()
    same = a == b
    ok = elapsed <= 5.0 and peak_mb <= 200.0 and same
    record(
        13,
        ok,
        f"n=1e7 streaming: {elapsed:.2f}s (<=5), peak {peak_mb:.0f} MB (<=200), "
        f"height={s.height}, thread-count determinism {same}",
    )
    assert ok
