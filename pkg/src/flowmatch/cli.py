"""Command-line drivers: solve, generate, and verify instance files.

Every solver run prints a single-line JSON record on stdout:
{objective, pushes, relabels, rounds, elapsed_ms, mode, workers}.
Human diagnostics go to stderr.  Exit codes: 0 success, 1 infeasible (or a
verify mismatch), 2 input error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .assign_scaling import (
    DEFAULT_ALPHA,
    DEFAULT_ASSIGN_CYCLE,
    InfeasibleInstanceError,
    solve_assignment,
)
from .dimacs import ParseError, detect_kind, generate, parse_dimacs_asn, parse_dimacs_max
from .graph import SolveReport
from .maxflow_par import DEFAULT_CYCLE_BUDGET, hybrid_solve
from .maxflow_seq import solve_maxflow_seq
from .oracles import brute_force_assignment, edmonds_karp


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="flowmatch",
        description="Max-flow and assignment solvers over DIMACS instance files.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    solver_common = argparse.ArgumentParser(add_help=False)
    solver_common.add_argument("--input", required=True, help="instance file path")
    solver_common.add_argument(
        "--mode", choices=("seq", "par"), default="seq", help="solver path"
    )
    solver_common.add_argument(
        "--workers", type=int, default=4, help="worker count for par mode"
    )

    p_max = sub.add_parser(
        "maxflow", parents=[solver_common], help="solve a max-flow instance"
    )
    p_max.add_argument(
        "--cycle",
        type=int,
        default=DEFAULT_CYCLE_BUDGET,
        help="iterations per parallel round",
    )

    p_asn = sub.add_parser(
        "assign", parents=[solver_common], help="solve an assignment instance"
    )
    p_asn.add_argument(
        "--cycle",
        type=int,
        default=DEFAULT_ASSIGN_CYCLE,
        help="iterations per parallel round",
    )
    p_asn.add_argument(
        "--alpha", type=int, default=DEFAULT_ALPHA, help="epsilon scale divisor"
    )
    p_asn.add_argument(
        "--no-heuristics",
        action="store_true",
        help="disable arc fixing and the price-update pass",
    )

    p_gen = sub.add_parser("gen", help="generate a seeded random instance")
    p_gen.add_argument(
        "--kind", choices=("maxflow", "assignment"), required=True
    )
    p_gen.add_argument("--n", type=int, required=True, help="node count per the kind")
    p_gen.add_argument("--m", type=int, help="arc count (maxflow)")
    p_gen.add_argument(
        "--density", type=float, help="edge density in (0,1] (assignment)"
    )
    p_gen.add_argument("--max-value", type=int, default=100)
    p_gen.add_argument("--seed", type=int, required=True)
    p_gen.add_argument("--output", help="output path (default: stdout)")

    p_verify = sub.add_parser(
        "verify",
        parents=[solver_common],
        help="solve and compare against the brute-force oracle",
    )
    p_verify.add_argument(
        "--against", choices=("oracle",), default="oracle", help="reference to use"
    )
    return parser


def _emit(report: SolveReport, mode: str, workers: int, extra=None) -> None:
    record = {
        "objective": report.objective,
        "pushes": report.pushes,
        "relabels": report.relabels,
        "rounds": report.rounds,
        "elapsed_ms": round(report.elapsed * 1000.0, 3),
        "mode": mode,
        "workers": workers,
    }
    if extra:
        record.update(extra)
    print(json.dumps(record))


def _solve_maxflow(net, mode: str, workers: int, cycle: int) -> SolveReport:
    if mode == "par":
        return hybrid_solve(net, worker_count=workers, cycle_budget=cycle)
    return solve_maxflow_seq(net)


def _run_maxflow(args) -> int:
    with open(args.input, encoding="utf-8") as handle:
        net = parse_dimacs_max(handle.read())
    report = _solve_maxflow(net, args.mode, args.workers, args.cycle)
    _emit(report, args.mode, args.workers if args.mode == "par" else 1)
    return 0


def _run_assign(args) -> int:
    with open(args.input, encoding="utf-8") as handle:
        inst = parse_dimacs_asn(handle.read())
    report, _ = solve_assignment(
        inst,
        mode=args.mode,
        worker_count=args.workers,
        cycle_budget=args.cycle,
        alpha=args.alpha,
        use_price_update=not args.no_heuristics,
        use_arc_fix=not args.no_heuristics,
    )
    _emit(report, args.mode, args.workers if args.mode == "par" else 1)
    return 0


def _run_gen(args) -> int:
    if args.kind == "maxflow":
        m_or_density = args.m
    else:
        m_or_density = args.density
    instance = generate(args.kind, args.n, m_or_density, args.max_value, args.seed)
    text = instance.to_text()
    if args.output:
        with open(args.output, "w", encoding="utf-8") as handle:
            handle.write(text)
        print(f"wrote {args.kind} instance to {args.output}", file=sys.stderr)
    else:
        sys.stdout.write(text)
    return 0


def _run_verify(args) -> int:
    with open(args.input, encoding="utf-8") as handle:
        text = handle.read()
    kind = detect_kind(text)
    if kind == "maxflow":
        net = parse_dimacs_max(text)
        report = _solve_maxflow(net, args.mode, args.workers, DEFAULT_CYCLE_BUDGET)
        oracle_value = edmonds_karp(net)
    else:
        inst = parse_dimacs_asn(text)
        report, _ = solve_assignment(
            inst, mode=args.mode, worker_count=args.workers
        )
        result = brute_force_assignment(inst)
        if result is None:
            print("oracle: no perfect matching exists", file=sys.stderr)
            return 1
        oracle_value = result[0]
    if report.objective != oracle_value:
        print(
            f"MISMATCH: solver objective {report.objective} "
            f"!= oracle {oracle_value}",
            file=sys.stderr,
        )
        return 1
    _emit(
        report,
        args.mode,
        args.workers if args.mode == "par" else 1,
        extra={"oracle_objective": oracle_value},
    )
    return 0


def cli_main(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    handlers = {
        "maxflow": _run_maxflow,
        "assign": _run_assign,
        "gen": _run_gen,
        "verify": _run_verify,
    }
    try:
        return handlers[args.command](args)
    except InfeasibleInstanceError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return 1
    except (ParseError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(cli_main(sys.argv[1:]))
