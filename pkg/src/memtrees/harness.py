"""Replication sweeps and the statistical machinery behind the checks.

Distances (Kolmogorov-Smirnov, total variation, chi-square) and an empirical
CDF dominance check, plus a seeded sweep driver whose output is a function of
(config, master_seed) only: every (n, replication) cell gets the stream
``mix64(master_seed, cell_index)``, results are merged in cell order, and
floats are serialized with 17 significant digits, so reports are byte-stable
under any degree of parallelism.
"""

from __future__ import annotations

import hashlib
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping, Sequence

import numpy as np

from . import rng as _rng
from .analysis import (
    TRUNCATED,
    degree_histogram,
    empirical_fringe,
    max_dist_to_spine,
    spine_distances,
)
from .exploration import explore_ancestral_lines, simulate_chain
from .generate import grow_streaming
from .limits import macro_degree_pmf_table
from .schedules import CustomJ, Macroscopic, MemorySchedule, Mesoscopic, Sarrt, uniform_quantile

# ---------------------------------------------------------------------------
# distances


def ks_one_sample(sample: Sequence[float], cdf: Callable[[np.ndarray], np.ndarray]) -> float:
    """sup_x |empirical CDF - cdf| over the sample points, both one-sided gaps."""
    xs = np.sort(np.asarray(sample, dtype=np.float64))
    m = xs.shape[0]
    if m == 0:
        raise ValueError("sample must be non-empty")
    try:
        fx = np.asarray(cdf(xs), dtype=np.float64)
        if fx.shape != xs.shape:
            raise TypeError
    except (TypeError, ValueError):
        fx = np.array([float(cdf(x)) for x in xs])
    lower = np.arange(1, m + 1) / m - fx
    upper = fx - np.arange(0, m) / m
    return float(max(lower.max(), upper.max(), 0.0))


def dkw_bound(m: int, alpha: float) -> float:
    """Distribution-free KS quantile: P(KS > bound) <= alpha for m samples."""
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0,1)")
    return math.sqrt(math.log(2.0 / alpha) / (2.0 * m))


def _normalize_hist(hist: Mapping) -> dict:
    total = sum(hist.values())
    if total <= 0:
        raise ValueError("histogram must have positive total mass")
    return {k: v / total for k, v in hist.items()}


def tv_distance(hist_a: Mapping, pmf_b: Mapping[object, float]) -> float:
    """Total variation between a count histogram and a (possibly deficient) pmf.

    Half the L1 gap over the union of keys; mass missing from either side is
    treated as sitting on cells the other side never charges.
    """
    pa = _normalize_hist(hist_a)
    keys = set(pa) | set(pmf_b)
    l1 = sum(abs(pa.get(k, 0.0) - pmf_b.get(k, 0.0)) for k in keys)
    rem_a = max(0.0, 1.0 - sum(pa.values()))
    rem_b = max(0.0, 1.0 - sum(pmf_b.values()))
    return 0.5 * (l1 + rem_a + rem_b)


@dataclass(frozen=True)
class ChiSquareResult:
    statistic: float
    dof: int
    pvalue: float
    cells: int


def chi_square(hist: Mapping, pmf: Mapping[object, float], min_expected: float = 5.0) -> ChiSquareResult:
    """Pearson chi-square of counts against a pmf, pooling thin cells.

    Cells with expected count below ``min_expected`` are pooled into one; any
    pmf mass outside the listed keys joins the pooled cell.
    """
    total = sum(hist.values())
    if total <= 0:
        raise ValueError("histogram must have positive total mass")
    keys = sorted(set(hist) | set(pmf), key=str)
    pooled_obs = 0.0
    pooled_exp = 0.0
    terms = []
    for k in keys:
        obs = hist.get(k, 0)
        exp = total * pmf.get(k, 0.0)
        if exp < min_expected:
            pooled_obs += obs
            pooled_exp += exp
        else:
            terms.append((obs, exp))
    pooled_exp += total * max(0.0, 1.0 - sum(pmf.values()))
    if pooled_exp > 0:
        terms.append((pooled_obs, pooled_exp))
    stat = sum((o - e) ** 2 / e for o, e in terms if e > 0)
    dof = max(len(terms) - 1, 1)
    from scipy.stats import chi2

    return ChiSquareResult(float(stat), dof, float(chi2.sf(stat, dof)), len(terms))


@dataclass(frozen=True)
class DominanceResult:
    passed: bool
    witness: int | None
    worst_gap: float


def cdf_dominance(
    sample: Sequence[int], reference_cdf: Callable[[int], float], slack: float
) -> DominanceResult:
    """Check the sample is stochastically dominated by the reference law.

    Requires empirical CDF(x) >= reference CDF(x) - slack at every integer x
    across the sample range; returns the first violating x as a witness.
    """
    if slack < 0:
        raise ValueError("slack must be >= 0")
    xs = np.asarray(sample, dtype=np.int64)
    if xs.size == 0:
        raise ValueError("sample must be non-empty")
    m = xs.size
    lo, hi = min(int(xs.min()), 0), int(xs.max())
    counts = np.bincount(xs - lo, minlength=hi - lo + 1)
    ecdf = np.cumsum(counts) / m
    worst = 0.0
    witness = None
    for i, x in enumerate(range(lo, hi + 1)):
        gap = float(reference_cdf(x)) - ecdf[i]
        if gap > worst:
            worst = gap
            if gap > slack and witness is None:
                witness = x
    return DominanceResult(witness is None, witness, worst)


def geometric_plus_one_cdf(p: float) -> Callable[[int], float]:
    """CDF of G+1 where P(G > k) = (1-p)**k on {1, 2, ...}."""
    if not 0 < p < 1:
        raise ValueError("p must lie in (0,1)")

    def cdf(x: int) -> float:
        if x < 2:
            return 0.0
        return 1.0 - (1.0 - p) ** (int(x) - 1)

    return cdf


def shifted_poisson1_pmf(k_max: int = 200) -> dict[int, float]:
    """pmf of 1 + Poisson(1) on degrees 1..k_max (the small-window degree law)."""
    return {k: math.exp(-1.0 - math.lgamma(k)) for k in range(1, k_max + 1)}


# ---------------------------------------------------------------------------
# sweep driver


def schedule_from_spec(spec: Mapping) -> MemorySchedule:
    """Build a schedule from its JSON description."""
    kind = spec.get("kind")
    if kind == "macroscopic":
        return Macroscopic(float(spec["theta"]))
    if kind == "mesoscopic":
        return Mesoscopic(float(spec["beta"]))
    if kind == "sarrt_uniform":
        return Sarrt(uniform_quantile(float(spec.get("lo", 0.0)), float(spec.get("hi", 1.0))))
    if kind == "custom_j":
        table = {int(k): int(v) for k, v in spec["table"].items()}
        return CustomJ(lambda n, _t=table: _t[n])
    raise ValueError(f"unknown schedule kind: {kind!r}")


@dataclass
class SweepConfig:
    """One replication sweep: schedule x n values x replications x statistics."""

    schedule: Mapping
    n_values: Sequence[int]
    replications: int
    master_seed: int
    statistics: Sequence[Mapping | str]
    output_dir: str | None = None
    threads: int | None = None
    comparisons: Sequence[Mapping] = field(default_factory=list)

    def __post_init__(self):
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if not self.n_values or any(n < 1 for n in self.n_values):
            raise ValueError("n values must all be >= 1")
        if not self.statistics:
            raise ValueError("at least one statistic is required")
        self.statistics = [{"name": s} if isinstance(s, str) else dict(s) for s in self.statistics]

    def canonical(self) -> dict:
        return {
            "schedule": dict(self.schedule),
            "n_values": [int(n) for n in self.n_values],
            "replications": int(self.replications),
            "master_seed": int(self.master_seed),
            "statistics": [dict(s) for s in self.statistics],
            "comparisons": [dict(c) for c in self.comparisons],
        }

    def digest(self) -> str:
        return hashlib.sha256(
            json.dumps(self.canonical(), sort_keys=True).encode()
        ).hexdigest()


def fmt_float(x: float) -> str:
    """17-significant-digit decimal form; round-trips any float64 exactly."""
    return format(float(x), ".17g")


def _run_cell(config: SweepConfig, schedule, n: int, rep: int, cell_index: int):
    seed = _rng.mix64(config.master_seed, cell_index)
    metrics: dict[str, float] = {}
    dists: dict[str, object] = {}
    need_tree = any(
        s["name"] in ("fringe", "spine", "branchpoints") for s in config.statistics
    )
    grown = None

    def tree_summary():
        nonlocal grown
        if grown is None:
            collect = {"parents"} if need_tree else set()
            grown = grow_streaming(schedule, n, seed, collect=collect)
        return grown

    for stat in config.statistics:
        name = stat["name"]
        if name == "height":
            metrics["height"] = float(tree_summary().height)
        elif name == "degree_hist":
            hist = tree_summary().degree_histogram
            total = sum(hist.values())
            metrics["degree1_fraction"] = hist.get(1, 0) / total
            dists["degree_hist"] = hist
        elif name == "fringe":
            cap = int(stat.get("size_cap", 4))
            freq = empirical_fringe(tree_summary().tree(), cap)
            metrics["fringe_truncated_fraction"] = freq.get(TRUNCATED, 0.0)
            dists["fringe"] = freq
        elif name == "chain":
            if not isinstance(schedule, Mesoscopic):
                raise ValueError("chain statistic needs a mesoscopic schedule")
            labels = simulate_chain(n, schedule.beta, seed)
            metrics["chain_length"] = float(labels.shape[0] - 1)
        elif name == "spine":
            tree = tree_summary().tree()
            d = spine_distances(tree)[1:]
            metrics["max_dist_to_spine"] = float(d.max())
            dists["spine_distances"] = np.bincount(d)
        elif name == "branchpoints":
            k = int(stat.get("k", 2))
            tree = tree_summary().tree()
            trace = explore_ancestral_lines(tree, k, record_steps=False)
            lab = trace.terminal_label
            depth = 0
            v = lab
            while v != 1:
                v = int(tree.parent[v])
                depth += 1
            metrics["branchpoint_depth"] = float(depth)
            metrics["branchpoint_depth_scaled"] = depth / (4.0 * math.sqrt(n))
        else:
            raise ValueError(f"unknown statistic: {name!r}")
    return {"n": int(n), "rep": int(rep), "seed": int(seed), "metrics": metrics}, dists


def _aggregate(values: list[float]) -> dict:
    arr = np.asarray(values, dtype=np.float64)
    qs = np.quantile(arr, [0.0, 0.25, 0.5, 0.75, 1.0])
    return {
        "mean": float(arr.mean()),
        "variance": float(arr.var(ddof=1)) if arr.size > 1 else 0.0,
        "quantiles": {"min": qs[0], "q25": qs[1], "median": qs[2], "q75": qs[3], "max": qs[4]},
    }


@dataclass
class ReplicationReport:
    """Machine-readable outcome of one sweep."""

    config: dict
    config_digest: str
    generator: str
    cells: list[dict]
    aggregates: dict
    comparisons: list[dict]
    pooled: dict = field(default_factory=dict, repr=False)

    def passed(self) -> bool:
        return all(c["pass"] for c in self.comparisons)

    def to_json(self) -> str:
        def default(o):
            if isinstance(o, np.ndarray):
                return o.tolist()
            if isinstance(o, (np.integer,)):
                return int(o)
            if isinstance(o, (np.floating,)):
                return float(o)
            raise TypeError(f"unserializable: {type(o)}")

        body = {
            "config": self.config,
            "config_digest": self.config_digest,
            "generator": self.generator,
            "cells": self.cells,
            "aggregates": self.aggregates,
            "comparisons": self.comparisons,
        }
        return json.dumps(body, sort_keys=True, indent=1, default=default)

    def cells_csv(self) -> str:
        metric_names = sorted({m for c in self.cells for m in c["metrics"]})
        lines = ["n,rep,seed," + ",".join(metric_names)]
        for c in self.cells:
            vals = [fmt_float(c["metrics"].get(m, math.nan)) for m in metric_names]
            lines.append(f'{c["n"]},{c["rep"]},{c["seed"]},' + ",".join(vals))
        return "\n".join(lines) + "\n"


def _compare(config: SweepConfig, schedule, pooled: dict, aggregates: dict) -> list[dict]:
    out = []
    for comp in config.comparisons:
        comp = dict(comp)
        name = comp["name"]
        threshold = float(comp["threshold"])
        if name == "degree_tv":
            if isinstance(schedule, Mesoscopic):
                ref = shifted_poisson1_pmf()
            elif isinstance(schedule, Macroscopic):
                tab = macro_degree_pmf_table(schedule.theta, 200)
                ref = {k: tab[k] for k in range(1, 201)}
            else:
                raise ValueError("degree_tv needs a windowed regime with a limit pmf")
            dist = max(
                tv_distance(pooled["degree_hist"][n], ref) for n in pooled["degree_hist"]
            )
        elif name == "height_ratio":
            target = float(comp["target"])
            exponent = float(comp.get("exponent", 1.0))
            dist = max(
                abs(aggregates[n]["height"]["mean"] / n**exponent - target)
                for n in aggregates
            )
        else:
            raise ValueError(f"unknown comparison: {name!r}")
        out.append({"name": name, "distance": dist, "threshold": threshold, "pass": dist <= threshold})
    return out


def _flush_partial(config: SweepConfig, results: list, error: Exception) -> None:
    """On a mid-sweep failure, persist finished cells plus a resumption marker."""
    if not config.output_dir:
        return
    outdir = Path(config.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    done = [r[0] for r in results if r is not None]
    marker = {
        "config_digest": config.digest(),
        "completed_cell_indices": [i for i, r in enumerate(results) if r is not None],
        "error": f"{type(error).__name__}: {error}",
    }
    (outdir / "partial_cells.json").write_text(json.dumps(done, sort_keys=True, indent=1))
    (outdir / "resume_marker.json").write_text(json.dumps(marker, sort_keys=True, indent=1))


def run_sweep(config: SweepConfig) -> ReplicationReport:
    """Execute every (n, replication) cell and assemble the report.

    Cell seeds derive from (master_seed, cell_index); cells may run on any
    number of threads, results are merged in cell order, so the report body
    is identical whatever the parallelism.  If a cell fails, completed cells
    are flushed next to a resume_marker.json before the error propagates.
    """
    schedule = schedule_from_spec(config.schedule)
    cells_idx = [
        (n, rep, i)
        for i, (n, rep) in enumerate(
            (n, rep) for n in config.n_values for rep in range(config.replications)
        )
    ]
    threads = config.threads or 1
    results: list = [None] * len(cells_idx)
    try:
        if threads == 1:
            for n, rep, i in cells_idx:
                results[i] = _run_cell(config, schedule, n, rep, i)
        else:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                futs = {
                    pool.submit(_run_cell, config, schedule, n, rep, i): i
                    for n, rep, i in cells_idx
                }
                for fut, i in futs.items():
                    results[i] = fut.result()
    except Exception as e:
        _flush_partial(config, results, e)
        raise

    cells = [r[0] for r in results]
    pooled: dict[str, dict] = {}
    for (n, rep, i), (_, dists) in zip(cells_idx, results):
        for key, val in dists.items():
            if key in ("degree_hist", "fringe"):
                bucket = pooled.setdefault(key, {}).setdefault(n, {})
                for k, v in val.items():
                    bucket[k] = bucket.get(k, 0) + (v if key == "degree_hist" else v)
            elif key == "spine_distances":
                buckets = pooled.setdefault(key, {})
                prev = buckets.get(n)
                if prev is None:
                    buckets[n] = val.astype(np.int64)
                else:
                    if prev.shape[0] < val.shape[0]:
                        prev, val = val.astype(np.int64), prev
                    prev = prev.copy()
                    prev[: val.shape[0]] += val
                    buckets[n] = prev

    aggregates: dict[int, dict] = {}
    for n in config.n_values:
        metric_names = sorted({m for c in cells if c["n"] == n for m in c["metrics"]})
        aggregates[int(n)] = {
            m: _aggregate([c["metrics"][m] for c in cells if c["n"] == n and m in c["metrics"]])
            for m in metric_names
        }

    comparisons = _compare(config, schedule, pooled, aggregates)
    report = ReplicationReport(
        config=config.canonical(),
        config_digest=config.digest(),
        generator=_rng.GENERATOR_NAME,
        cells=cells,
        aggregates=aggregates,
        comparisons=comparisons,
        pooled=pooled,
    )
    if config.output_dir:
        outdir = Path(config.output_dir)
        outdir.mkdir(parents=True, exist_ok=True)
        (outdir / "report.json").write_text(report.to_json())
        (outdir / "cells.csv").write_text(report.cells_csv())
    return report
