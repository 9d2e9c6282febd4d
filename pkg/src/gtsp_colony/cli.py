"""Command-line entry point: ``gtsp-colony {solve,exact,cluster,bench,report}``.

Exit codes: 0 success, 1 I/O or data error, 2 usage error.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import bench
from .errors import CapacityError, GTSPError, InputError
from .ingest import (
    default_cluster_count,
    instance_from_nodeset,
    read_instance,
    read_tsplib,
    write_gtsp_instance,
)
from .oracle import DP_MAX_CLUSTERS, exact_optimum_bruteforce, exact_optimum_dp
from .solvers import ALGORITHMS, SolverParams, run

EXIT_OK, EXIT_DATA, EXIT_USAGE = 0, 1, 2


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _positive_float(text):
    value = float(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return value


def _default_jobs():
    env = os.environ.get("GTSP_COLONY_JOBS")
    try:
        return max(1, int(env)) if env else None
    except ValueError:
        return None


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gtsp-colony", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="run one colony strategy on a .gtsp instance")
    s.add_argument("instance")
    s.add_argument("--alg", type=str.upper, choices=ALGORITHMS, default="RACS")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--iterations", type=_positive_int, default=1000)
    s.add_argument("--time-limit", type=_positive_float, default=None, help="seconds")
    s.add_argument("--ants", type=_positive_int, default=10)
    s.add_argument("--beta", type=float, default=5.0)
    s.add_argument("--rho", type=float, default=0.5)
    s.add_argument("--q0", type=float, default=0.5)
    s.add_argument("--s0", type=float, default=0.5)
    s.add_argument("--psl", type=float, default=0.01)
    s.add_argument("--srm-draw", choices=("step", "tour"), default="step")
    s.add_argument("--optimum", type=_positive_float, default=None,
                   help="reference optimum; prints the gap when given")
    s.add_argument("--output", "-o", default=None, help="also write the result here")

    e = sub.add_parser("exact", help="exact optimum of a small instance")
    e.add_argument("instance")
    e.add_argument("--max-clusters", type=_positive_int, default=DP_MAX_CLUSTERS)
    e.add_argument("--bruteforce", action="store_true", help="use full enumeration instead of DP")

    c = sub.add_parser("cluster", help="cluster a TSPLIB .tsp file into a .gtsp instance")
    c.add_argument("tsp")
    g = c.add_mutually_exclusive_group()
    g.add_argument("--clusters", type=_positive_int, default=None)
    g.add_argument("--ratio", type=_positive_float, default=5.0,
                   help="nodes per cluster; nc = ceil(n / ratio)")
    c.add_argument("--output", "-o", default=None)

    b = sub.add_parser("bench", help="run an experiment config and write reports")
    b.add_argument("config")
    b.add_argument("--output-dir", default="results")
    b.add_argument("--jobs", type=_positive_int, default=None)
    b.add_argument("--translate", type=float, default=None)
    b.add_argument("--per-run", action="store_true", default=None)

    r = sub.add_parser("report", help="tabulate a runs.jsonl log")
    r.add_argument("log")
    r.add_argument("--format", choices=("csv", "markdown"), default="markdown")
    r.add_argument("--stats", action="store_true", help="append the expected-utility table")
    r.add_argument("--translate", type=float, default=0.0)
    r.add_argument("--per-run", action="store_true")
    return ap


def _emit(text: str, output: str | None = None) -> None:
    sys.stdout.write(text)
    if output:
        Path(output).write_text(text)


def cmd_solve(args) -> int:
    try:
        params = SolverParams(
            beta=args.beta, rho=args.rho, q0=args.q0, s0=args.s0, m=args.ants, psl=args.psl,
            max_iterations=args.iterations, time_limit=args.time_limit, seed=args.seed,
            srm_draw=args.srm_draw,
        ).validate()
    except InputError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    instance = read_instance(args.instance)
    res = run(args.alg, instance, params)
    lines = [
        f"instance: {instance.name}",
        f"algorithm: {res.algorithm}",
        f"best cost: {res.best_cost:g}",
    ]
    if args.optimum is not None:
        lines.append(f"gap: {bench.gap(res.best_cost, args.optimum):.4f}%")
    lines.append(f"iterations: {res.iterations_used}")
    lines.append("tour: " + " ".join(str(v + 1) for v in res.best_tour.nodes))
    _emit("\n".join(lines) + "\n", args.output)
    return EXIT_OK


def cmd_exact(args) -> int:
    instance = read_instance(args.instance)
    if args.bruteforce:
        res = exact_optimum_bruteforce(instance)
    else:
        res = exact_optimum_dp(instance, max_clusters=args.max_clusters)
    _emit(
        f"instance: {instance.name}\n"
        f"optimum: {res.optimum_cost:g}\n"
        f"tour: {' '.join(str(v + 1) for v in res.optimum_tour.nodes)}\n"
    )
    return EXIT_OK


def cmd_cluster(args) -> int:
    nodes = read_tsplib(args.tsp)
    nc = args.clusters or default_cluster_count(nodes.dimension, args.ratio)
    instance = instance_from_nodeset(nodes, nc)
    out = Path(args.output) if args.output else Path(args.tsp).with_name(f"{instance.name}.gtsp")
    out.write_text(write_gtsp_instance(instance))
    print(f"wrote {out} ({instance.p} clusters, {instance.n} nodes)")
    return EXIT_OK


def cmd_bench(args) -> int:
    cfg = bench.load_config(args.config)
    if args.translate is not None:
        cfg.translate = args.translate
    if args.per_run:
        cfg.per_run = True
    jobs = args.jobs or _default_jobs() or cfg.jobs
    result = bench.run_experiment(cfg, jobs=jobs)
    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    bench.write_run_log(result.runs, out / "runs.jsonl")
    (out / "gaps.csv").write_text(bench.emit_report(result.records, "csv"))
    (out / "gaps.md").write_text(bench.emit_report(result.records, "markdown"))
    try:
        ranked = result.euf()
    except GTSPError as exc:
        print(f"warning: expected-utility table skipped: {exc}", file=sys.stderr)
    else:
        (out / "euf.csv").write_text(bench.emit_report(ranked, "csv"))
        (out / "euf.md").write_text(bench.emit_report(ranked, "markdown"))
    sys.stdout.write(bench.emit_report(result.records, "markdown"))
    print(f"reports written to {out}")
    return EXIT_OK


def cmd_report(args) -> int:
    runs = bench.read_run_log(args.log)
    records = bench.records_from_runs(runs)
    text = bench.emit_report(records, args.format)
    if args.stats:
        text += "\n" + bench.emit_report(
            bench.euf_table(records, args.per_run, args.translate), args.format
        )
    sys.stdout.write(text)
    return EXIT_OK


COMMANDS = {
    "solve": cmd_solve,
    "exact": cmd_exact,
    "cluster": cmd_cluster,
    "bench": cmd_bench,
    "report": cmd_report,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except CapacityError as exc:
        print(f"error: instance too large: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (GTSPError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
