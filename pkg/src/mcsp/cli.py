"""Command line interface: ``mcsp {solve,min,oracle,gen,check,bench}``.

Exit status: 0 solved, 1 no CSP within k (or a failed check), 2 budget
exhausted, 3 input error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .bench import sweep, to_csv
from .csp import BlockDecomposition, SolutionFormatError, blocks_of, check_decomposition
from .generator import GenParams, Infeasible, generate
from .instance import Instance, InstanceError, build_index, parse_instance
from .oracle import OracleLimits, TooLarge, oracle_minimum
from .reduction import reduce_fixpoint
from .sample_graph import build_sample_graph
from .solver import BudgetExhausted, SearchStats, SolverOptions, decide, minimize

EXIT_OK, EXIT_NO, EXIT_BUDGET, EXIT_INPUT = 0, 1, 2, 3

TABLE2_KS = list(range(50, 131, 10))


class InputError(Exception):
    pass


def _read_instance(path: str, chars: bool) -> Instance:
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(str(exc)) from exc
    try:
        return parse_instance(text, chars=chars)
    except InstanceError as exc:
        raise InputError(f"{path}: {exc}") from exc


def _env_budget() -> float | None:
    raw = os.environ.get("MCSP_BUDGET_SECS")
    return float(raw) if raw else None


def _options(args) -> SolverOptions:
    secs = args.time_budget if args.time_budget is not None else _env_budget()
    return SolverOptions(
        use_reduction=not args.no_reduction,
        use_kprime_init=not args.no_kprime,
        node_budget=args.budget,
        time_budget=secs,
        strategy=args.strategy,
    )


def _emit_stats(args, stats: SearchStats) -> None:
    if args.stats_json is None:
        return
    text = json.dumps(stats.to_dict(), indent=2, sort_keys=True) + "\n"
    if args.stats_json == "-":
        sys.stderr.write(text)
    else:
        Path(args.stats_json).write_text(text)


def _emit_reduction_stats(args, inst: Instance) -> None:
    if not args.reduction_stats:
        return
    _, _, trace, rs = reduce_fixpoint(inst)
    sys.stderr.write(
        f"n1 {rs.n1} n2 {rs.n2} n1' {rs.n1_reduced} n2' {rs.n2_reduced} "
        f"delta {rs.removed_matches} k_decrement {trace.k_decrement}\n"
    )


def _dump_graph(args, res) -> None:
    if not args.dump_graph or res is None:
        return
    g = build_sample_graph(res.reduced, build_index(res.reduced), res.sample)
    Path(args.dump_graph).write_text(g.to_dot())


def cmd_solve(args) -> int:
    inst = _read_instance(args.file, args.chars)
    k = args.k if args.k is not None else inst.k
    if k is None:
        raise InputError("no budget: pass --k or put k on line 3 of the instance")
    _emit_reduction_stats(args, inst)
    stats = SearchStats()
    try:
        res = decide(inst, k, _options(args), stats)
    except BudgetExhausted as exc:
        _emit_stats(args, exc.stats)
        print("BUDGET")
        return EXIT_BUDGET
    _emit_stats(args, stats)
    if res is None:
        print("NO")
        return EXIT_NO
    _dump_graph(args, res)
    sys.stdout.write(res.decomposition.to_text())
    return EXIT_OK


def cmd_min(args) -> int:
    inst = _read_instance(args.file, args.chars)
    _emit_reduction_stats(args, inst)
    try:
        res = minimize(inst, _options(args))
    except BudgetExhausted as exc:
        _emit_stats(args, exc.stats)
        print(f"BUDGET minimum in [{exc.lower}, {exc.upper}]")
        return EXIT_BUDGET
    _emit_stats(args, res.stats)
    _dump_graph(args, res)
    if args.size_only:
        print(res.decomposition.size)
    else:
        sys.stdout.write(res.decomposition.to_text())
    return EXIT_OK


def cmd_oracle(args) -> int:
    inst = _read_instance(args.file, args.chars)
    try:
        size, pairs = oracle_minimum(inst, OracleLimits(args.max_assignments), prune=not args.no_prune)
    except TooLarge as exc:
        print(f"TOOLARGE {exc.estimate}")
        return EXIT_BUDGET
    if args.size_only:
        print(size)
    else:
        sys.stdout.write(blocks_of(inst, pairs).to_text())
    return EXIT_OK


def cmd_gen(args) -> int:
    params = GenParams(args.n, args.k, args.d, args.f, args.delta, args.seed)
    try:
        inst, planted = generate(params)
    except (Infeasible, ValueError) as exc:
        raise InputError(str(exc)) from exc
    text = inst.to_text()
    if args.output in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(args.output).write_text(text)
    if args.planted:
        Path(args.planted).write_text(planted.to_text())
    return EXIT_OK


def cmd_check(args) -> int:
    inst = _read_instance(args.instance, args.chars)
    try:
        dec = BlockDecomposition.from_text(Path(args.solution).read_text())
    except (OSError, SolutionFormatError) as exc:
        raise InputError(f"{args.solution}: {exc}") from exc
    violations = check_decomposition(inst, dec)
    if violations:
        for v in violations:
            print(f"VIOLATION {v}")
        return EXIT_NO
    size = blocks_of(inst, dec.matches()).size
    print(f"ok size {size}")
    return EXIT_OK


def _int_list(raw: str) -> list[int]:
    return [int(x) for x in raw.split(",") if x]


def cmd_bench(args) -> int:
    if args.table2:
        n, ks, ds, delta, reps = 1000, TABLE2_KS, [6, 8], 100, 50
    else:
        if args.n is None or args.k is None or args.d is None:
            raise InputError("bench needs --n, --k and --d (or --table2)")
        n, ks, ds, delta = args.n, _int_list(args.k), _int_list(args.d), args.delta
        reps = 1
    if args.reps is not None:
        reps = args.reps
    budget = args.budget_secs if args.budget_secs is not None else _env_budget()
    if budget is None:
        budget = 60.0
    rows = sweep(n, ks, ds, reps, delta, args.f, args.seed_base, budget, args.workers)
    text = to_csv(rows, per_instance=args.per_instance)
    if args.output in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(args.output).write_text(text)
    return EXIT_OK


def _solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("file", help="instance file, '-' for stdin")
    p.add_argument("--chars", action="store_true", help="one token per character")
    p.add_argument("--no-reduction", action="store_true")
    p.add_argument("--no-kprime", action="store_true", help="start from an empty sample")
    p.add_argument("--budget", type=int, help="maximum number of search nodes")
    p.add_argument("--time-budget", type=float, help="seconds (default $MCSP_BUDGET_SECS)")
    p.add_argument("--strategy", choices=["fewest", "first"], default="fewest")
    p.add_argument("--stats-json", nargs="?", const="-", help="write search stats ('-' = stderr)")
    p.add_argument("--dump-graph", metavar="PATH", help="write the final sample graph as DOT")
    p.add_argument("--reduction-stats", action="store_true", help="print n1', n2', delta to stderr")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mcsp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="is there a CSP of size <= k?")
    _solver_flags(p)
    p.add_argument("--k", type=int)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("min", help="minimum CSP by iterative deepening")
    _solver_flags(p)
    p.add_argument("--size-only", action="store_true")
    p.set_defaults(func=cmd_min)

    p = sub.add_parser("oracle", help="minimum CSP by exhaustive enumeration")
    p.add_argument("file")
    p.add_argument("--chars", action="store_true")
    p.add_argument("--max-assignments", type=int, default=OracleLimits().max_assignments)
    p.add_argument("--no-prune", action="store_true")
    p.add_argument("--size-only", action="store_true")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("gen", help="generate an instance with a planted partition")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--f", type=int)
    p.add_argument("--delta", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output")
    p.add_argument("--planted", metavar="PATH")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("check", help="verify a claimed decomposition")
    p.add_argument("instance")
    p.add_argument("solution")
    p.add_argument("--chars", action="store_true")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("bench", help="timing sweep over generated instances (CSV)")
    p.add_argument("--table2", action="store_true", help="n=1000, d in {6,8}, k=50..130, 50 reps")
    p.add_argument("--n", type=int)
    p.add_argument("--k", help="comma-separated block counts")
    p.add_argument("--d", help="comma-separated occurrence bounds")
    p.add_argument("--f", type=int, help="letter families (default 3n/d)")
    p.add_argument("--delta", type=int, help="noise markers per string (default n/10)")
    p.add_argument("--reps", type=int)
    p.add_argument("--seed-base", type=int, default=0)
    p.add_argument("--budget-secs", type=float, help="per instance (default $MCSP_BUDGET_SECS or 60)")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--per-instance", action="store_true", help="one row per instance")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
