"""Seeded replication sweeps with deterministic, thread-invariant reports.

A sweep config names the schedule, the n grid, the replication count, the
statistics to collect and optional pass/fail comparisons.  Every cell gets
its own stream derived from the master seed, so the report bytes do not
depend on execution order or the number of worker threads.
"""

import json

from memtrees import SweepConfig, run_sweep

config = SweepConfig(
    schedule={"kind": "mesoscopic", "beta": 0.5},
    n_values=[10_000, 40_000],
    replications=5,
    master_seed=2024,
    statistics=["height", "degree_hist", "chain"],
    comparisons=[{"name": "degree_tv", "threshold": 0.05}],
)

report = run_sweep(config)
print("config digest:", report.config_digest[:16], "...")
print("generator:", report.generator)
print("\nper-cell records (first three):")
for cell in report.cells[:3]:
    print(" ", cell)

print("\naggregates:")
for n, metrics in report.aggregates.items():
    h = metrics["height"]
    print(
        f"  n={n}: height mean {h['mean']:.1f} (var {h['variance']:.1f}), "
        f"chain length mean {metrics['chain_length']['mean']:.1f}"
    )

print("\ncomparisons:")
for comp in report.comparisons:
    print(f"  {comp['name']}: distance {comp['distance']:.4f} <= {comp['threshold']}? {comp['pass']}")

print("\nthread invariance (byte-exact):")
again = run_sweep(
    SweepConfig(
        schedule={"kind": "mesoscopic", "beta": 0.5},
        n_values=[10_000, 40_000],
        replications=5,
        master_seed=2024,
        statistics=["height", "degree_hist", "chain"],
        comparisons=[{"name": "degree_tv", "threshold": 0.05}],
        threads=4,
    )
)
print("  4-thread rerun produces identical JSON:", report.to_json() == again.to_json())

print("\nCSV head:")
print("\n".join(report.cells_csv().splitlines()[:4]))
print("\n(json body keys:", ", ".join(sorted(json.loads(report.to_json()))), ")")
