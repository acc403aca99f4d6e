"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 runtime/numeric failure, 3 an
asserted statistical comparison failed.  Every output file starts with (or
contains) the effective configuration for provenance.  Errors go to stderr
with the prefix ``error:``.
"""

from __future__ import annotations

import argparse
import json
import sys
from collections import Counter
from pathlib import Path

import numpy as np

from . import analysis, io, limits
from . import rng as _rng
from .exploration import branchpoint_statistics, explore_ancestral_lines, simulate_chain
from .generate import grow_streaming, grow_tree
from .harness import (
    SweepConfig,
    cdf_dominance,
    fmt_float,
    geometric_plus_one_cdf,
    ks_one_sample,
    run_sweep,
    schedule_from_spec,
    shifted_poisson1_pmf,
    tv_distance,
)
from .schedules import CustomJ, Macroscopic, Mesoscopic, Sarrt, uniform_quantile


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 1, not argparse's default 2
        raise UsageError(message)


def _schedule_args(p: _Parser) -> None:
    p.add_argument("--mesoscopic", type=float, metavar="BETA", help="window n - floor(n**beta)")
    p.add_argument("--macroscopic", type=float, metavar="THETA", help="window floor(theta*n)")
    p.add_argument("--custom-j", metavar="FILE", help="CSV file with columns n,j")
    p.add_argument(
        "--sarrt-uniform",
        metavar="LO,HI",
        help="scaled attachment with V uniform on [LO,HI]",
    )


def _load_custom_j(path: str) -> CustomJ:
    table: dict[int, int] = {}
    for line in Path(path).read_text(encoding="utf-8").strip().split("\n"):
        line = line.strip()
        if not line or line.startswith("#") or line.startswith("n,"):
            continue
        ns, js = line.split(",")
        table[int(ns)] = int(js)

    def j(n: int) -> int:
        if n not in table:
            raise ValueError(f"custom-j table has no entry for n={n}")
        return table[n]

    return CustomJ(j)


def _schedule_from_args(args) -> tuple[object, dict]:
    chosen = [
        name
        for name, val in (
            ("mesoscopic", args.mesoscopic),
            ("macroscopic", args.macroscopic),
            ("custom_j", args.custom_j),
            ("sarrt_uniform", args.sarrt_uniform),
        )
        if val is not None
    ]
    if len(chosen) != 1:
        raise UsageError("exactly one of --mesoscopic/--macroscopic/--custom-j/--sarrt-uniform")
    if args.mesoscopic is not None:
        if not 0.0 < args.mesoscopic < 1.0:
            raise UsageError(f"beta must lie in (0,1), got {args.mesoscopic}")
        return Mesoscopic(args.mesoscopic), {"kind": "mesoscopic", "beta": args.mesoscopic}
    if args.macroscopic is not None:
        if not 0.0 < args.macroscopic < 1.0:
            raise UsageError(f"theta must lie in (0,1), got {args.macroscopic}")
        return Macroscopic(args.macroscopic), {"kind": "macroscopic", "theta": args.macroscopic}
    if args.custom_j is not None:
        return _load_custom_j(args.custom_j), {"kind": "custom_j", "file": args.custom_j}
    try:
        lo, hi = (float(x) for x in args.sarrt_uniform.split(","))
        sched = Sarrt(uniform_quantile(lo, hi))
    except ValueError as e:
        raise UsageError(f"bad --sarrt-uniform value {args.sarrt_uniform!r}: {e}") from e
    return sched, {"kind": "sarrt_uniform", "lo": lo, "hi": hi}


def _provenance(args, spec: dict | None = None) -> str:
    eff = {k: v for k, v in vars(args).items() if v is not None and k not in ("func",)}
    if spec:
        eff["schedule"] = spec
    return json.dumps(eff, sort_keys=True, default=str)


def _emit(path: str | None, text: str, provenance: str) -> None:
    body = f"# config: {provenance}\n{text}"
    if path:
        Path(path).write_text(body, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(body)


# ---------------------------------------------------------------------------
# subcommands


def _cmd_grow(args) -> int:
    schedule, spec = _schedule_from_args(args)
    tree = grow_tree(schedule, args.n, args.seed)
    prov = _provenance(args, spec)
    _emit(args.out, io.parent_csv(tree), prov)
    if args.export_dot:
        Path(args.export_dot).write_text(io.tree_dot(tree), encoding="utf-8", newline="\n")
    return 0


def _cmd_degrees(args) -> int:
    schedule, spec = _schedule_from_args(args)
    hist: Counter = Counter()
    for rep in range(args.reps):
        seed = _rng.mix64(args.seed, rep)
        hist.update(grow_streaming(schedule, args.n, seed).degree_histogram)
    if isinstance(schedule, Mesoscopic):
        ref = shifted_poisson1_pmf()
    elif isinstance(schedule, Macroscopic):
        tab = limits.macro_degree_pmf_table(schedule.theta, 200, args.quad_tol)
        ref = {k: float(tab[k]) for k in range(1, 201)}
    else:
        ref = None
    total = sum(hist.values())
    prov = _provenance(args, spec)
    if args.format == "json":
        body = {
            "config": json.loads(prov),
            "histogram": {str(k): v for k, v in sorted(hist.items())},
            "degree1_fraction": hist.get(1, 0) / total,
        }
        if ref is not None:
            body["tv_vs_limit"] = tv_distance(hist, ref)
            body["limit_pmf"] = {str(k): ref[k] for k in sorted(ref)}
        out = json.dumps(body, sort_keys=True, indent=1) + "\n"
        if args.out:
            Path(args.out).write_text(out, encoding="utf-8", newline="\n")
        else:
            sys.stdout.write(out)
    else:
        lines = ["degree,count,frequency" + (",limit_probability" if ref else "")]
        for k in sorted(hist):
            row = f"{k},{hist[k]},{fmt_float(hist[k] / total)}"
            if ref:
                row += f",{fmt_float(ref.get(k, 0.0))}"
            lines.append(row)
        _emit(args.out, "\n".join(lines) + "\n", prov)
    if ref is not None:
        tv = tv_distance(hist, ref)
        print(f"degree1_fraction={hist.get(1, 0) / total:.6f} tv_vs_limit={tv:.6f}")
    return 0


def _cmd_height(args) -> int:
    schedule, spec = _schedule_from_args(args)
    lines = ["n,rep,seed,height"]
    for n in args.n:
        for rep in range(args.reps):
            seed = _rng.mix64(args.seed, rep + 1_000_003 * n)
            s = grow_streaming(schedule, n, seed)
            lines.append(f"{n},{rep},{seed},{s.height}")
    _emit(args.out, "\n".join(lines) + "\n", _provenance(args, spec))
    return 0


def _cmd_chain(args) -> int:
    if args.mesoscopic is None:
        raise UsageError("chain requires --mesoscopic")
    beta = args.mesoscopic
    if not 0.0 < beta < 1.0:
        raise UsageError(f"beta must lie in (0,1), got {beta}")
    labels = simulate_chain(args.n, beta, args.seed, idealized_window=args.idealized_window)
    scale = float(args.n) ** (1.0 - beta)
    lines = ["m,t,label,normalized,fluid_limit,residual"]
    for m, lab in enumerate(labels):
        t = m / scale
        f = limits.f_beta(beta, t)
        lines.append(
            f"{m},{fmt_float(t)},{int(lab)},{fmt_float(lab / args.n)},"
            f"{fmt_float(f)},{fmt_float(lab / args.n - f)}"
        )
    _emit(args.out, "\n".join(lines) + "\n", _provenance(args))
    return 0


def _cmd_fringe(args) -> int:
    schedule, spec = _schedule_from_args(args)
    tree = grow_tree(schedule, args.n, args.seed)
    counts = analysis.fringe_counts(tree, args.size_cap)
    prov = _provenance(args, spec)
    _emit(args.out, io.fringe_csv(counts, tree.n), prov)
    if isinstance(schedule, Mesoscopic):
        ref = limits.poisson_gw_shape_pmf(args.size_cap)
        tv = tv_distance(counts, ref)
        print(f"tv_vs_poisson_gw={tv:.6f}")
    elif isinstance(schedule, Macroscopic):
        draws = Counter()
        for i in range(args.reference_draws):
            r = limits.sample_macro_fringe(schedule.theta, _rng.mix64(args.seed, i + 1), args.size_cap)
            draws[r.canonical_code if isinstance(r, analysis.FringeTree) else analysis.TRUNCATED] += 1
        ref = {k: v / args.reference_draws for k, v in draws.items()}
        tv = tv_distance(counts, ref)
        print(f"tv_vs_branching_reference={tv:.6f}")
    return 0


def _cmd_explore(args) -> int:
    schedule, spec = _schedule_from_args(args)
    tree = grow_tree(schedule, args.n, args.seed)
    trace = explore_ancestral_lines(tree, args.k)
    _emit(args.out, io.trace_csv(trace), _provenance(args, spec))
    if args.export_dot:
        sub = analysis.spanned_subtree(tree, list(trace.starts))
        Path(args.export_dot).write_text(
            io.spanned_subtree_dot(sub), encoding="utf-8", newline="\n"
        )
    print(
        f"terminated_at_step={trace.termination_step} terminal_label={trace.terminal_label}"
    )
    return 0


def _cmd_spine(args) -> int:
    schedule, spec = _schedule_from_args(args)
    if not isinstance(schedule, Mesoscopic):
        raise UsageError("spine requires --mesoscopic (the line-regime check)")
    tree = grow_tree(schedule, args.n, args.seed)
    d = analysis.spine_distances(tree)[1:]
    counts = np.bincount(d)
    lines = ["distance,count"]
    lines.extend(f"{i},{int(c)}" for i, c in enumerate(counts) if c)
    _emit(args.out, "\n".join(lines) + "\n", _provenance(args, spec))
    p = float(args.n) ** (-schedule.beta)
    verdict = cdf_dominance(d, geometric_plus_one_cdf(p), args.slack)
    print(
        f"max_dist_to_spine={int(d.max())} geom_dominance_pass={verdict.passed} "
        f"worst_gap={verdict.worst_gap:.6f}"
    )
    return 0 if verdict.passed or not args.assert_ else 3


def _cmd_branchpoints(args) -> int:
    if args.mesoscopic is None:
        raise UsageError("branchpoints requires --mesoscopic")
    res = branchpoint_statistics(args.mesoscopic, args.n, args.k, args.reps, args.seed)
    _emit(
        args.out,
        io.branchpoint_csv(res.seeds, res.depths, res.scaled_depths),
        _provenance(args),
    )
    expo = 4 * args.k * (args.k - 1)
    ks = ks_one_sample(res.scaled_depths, lambda x: np.clip(x, 0.0, 1.0) ** expo)
    print(f"ks_vs_power_law={ks:.6f} exponent={expo}")
    return 0


def _cmd_constants(args) -> int:
    rows = [limits.height_constants(th, args.tol) for th in args.theta]
    _emit(args.out, io.constants_csv(rows), _provenance(args))
    worst = max(r.duality_gap for r in rows)
    print(f"max_duality_gap={worst:.3e}")
    return 0 if worst <= 1e-6 else 2


def _cmd_sweep(args) -> int:
    cfg = json.loads(Path(args.config).read_text(encoding="utf-8"))
    if args.threads is not None:
        cfg["threads"] = args.threads
    if args.out is not None:
        cfg["output_dir"] = args.out
    config = SweepConfig(
        schedule=cfg["schedule"],
        n_values=cfg["n_values"],
        replications=cfg["replications"],
        master_seed=cfg.get("master_seed", 0),
        statistics=cfg["statistics"],
        output_dir=cfg.get("output_dir"),
        threads=cfg.get("threads"),
        comparisons=cfg.get("comparisons", []),
    )
    schedule_from_spec(config.schedule)  # validate early
    report = run_sweep(config)
    for comp in report.comparisons:
        print(
            f"comparison {comp['name']}: distance={comp['distance']:.6g} "
            f"threshold={comp['threshold']:.6g} pass={comp['pass']}"
        )
    if args.assert_ and not report.passed():
        return 3
    return 0


def build_parser() -> _Parser:
    p = _Parser(prog="memtrees", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(func=fn)
        return sp

    sp = add("grow", _cmd_grow, "grow one tree and write its parent CSV")
    _schedule_args(sp)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", help="output CSV path (stdout if omitted)")
    sp.add_argument("--export-dot", help="also write DOT to this path")

    sp = add("degrees", _cmd_degrees, "degree histogram vs the limiting pmf")
    _schedule_args(sp)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--reps", type=int, default=1)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--quad-tol", type=float, default=1e-10)
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.add_argument("--out")

    sp = add("height", _cmd_height, "per-replication heights over an n grid")
    _schedule_args(sp)
    sp.add_argument("--n", type=int, nargs="+", required=True)
    sp.add_argument("--reps", type=int, default=1)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out")

    sp = add("chain", _cmd_chain, "ancestor-label chain with fluid-limit residuals")
    _schedule_args(sp)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--idealized-window", action="store_true", help="window of width exactly floor(l**beta)")
    sp.add_argument("--out")

    sp = add("fringe", _cmd_fringe, "empirical fringe distribution vs its limit law")
    _schedule_args(sp)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--size-cap", type=int, default=4)
    sp.add_argument("--reference-draws", type=int, default=100_000)
    sp.add_argument("--out")

    sp = add("explore", _cmd_explore, "joint ancestral-line exploration trace")
    _schedule_args(sp)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--k", type=int, default=2)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out")
    sp.add_argument("--export-dot", help="spanned subtree sketch with branchpoints")

    sp = add("spine", _cmd_spine, "spine-distance distribution and dominance verdict")
    _schedule_args(sp)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--slack", type=float, default=0.02)
    sp.add_argument("--assert", dest="assert_", action="store_true")
    sp.add_argument("--out")

    sp = add("branchpoints", _cmd_branchpoints, "scaled coalescence depths vs the power law")
    _schedule_args(sp)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--k", type=int, default=2)
    sp.add_argument("--reps", type=int, default=100)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out")

    sp = add("constants", _cmd_constants, "height-constant table over a theta grid")
    sp.add_argument("--theta", type=float, nargs="+", required=True)
    sp.add_argument("--tol", type=float, default=1e-9)
    sp.add_argument("--out")

    sp = add("sweep", _cmd_sweep, "run a sweep config JSON")
    sp.add_argument("--config", required=True)
    sp.add_argument("--threads", type=int)
    sp.add_argument("--assert", dest="assert_", action="store_true")
    sp.add_argument("--out", help="output directory override")

    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except (ValueError, OSError, KeyError, limits.SolverError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except KeyboardInterrupt:
        print("error: interrupted", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
