"""Benchmark sweeps over generated instances, written as CSV."""

from __future__ import annotations

import csv
import io
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields

from .csp import BlockDecomposition
from .generator import GenParams, generate
from .instance import Instance, build_index
from .reduction import reduce_fixpoint
from .solver import BudgetExhausted, SearchStats, SolverOptions, decide


@dataclass
class BenchRow:
    n: int
    k: int
    d: int
    f: int
    delta: int
    seed: int
    status: str
    n1: int
    n2: int
    k_found: int | None
    k_prime: int | None
    d_max: int
    d_star: float
    n1_reduced: int
    n2_reduced: int
    removed_matches: int
    t_seconds: float


INSTANCE_COLUMNS = [f.name for f in fields(BenchRow)]
CELL_COLUMNS = [
    "n", "k", "d", "f", "delta", "reps", "solved", "timeouts",
    "mean_n1", "mean_n2", "mean_k_found", "mean_k_prime", "d_max", "mean_d_star",
    "mean_n1_reduced", "mean_n2_reduced", "mean_removed_matches",
    "mean_t", "median_t",
]
# columns that are not timings and must reproduce exactly under the same seeds
STRUCTURAL = [c for c in INSTANCE_COLUMNS if c != "t_seconds"]


def blocks_without_unique(inst: Instance, dec: BlockDecomposition) -> int:
    idx = build_index(inst)
    uniq = {a for a in set(inst.s1) if idx.count(0, a) == 1 and idx.count(1, a) == 1}
    return sum(1 for a, _, ln in dec.blocks if not uniq.intersection(inst.s1[a : a + ln]))


def run_instance(params: GenParams, budget_secs: float | None, opts: SolverOptions | None = None) -> BenchRow:
    inst, _ = generate(params)
    idx = build_index(inst)
    _, _, _, rstats = reduce_fixpoint(inst)
    opts = opts or SolverOptions()
    opts = SolverOptions(opts.use_reduction, opts.use_kprime_init, opts.node_budget, budget_secs, opts.strategy)
    k_found = k_prime = None
    stats = SearchStats()
    try:
        res = decide(inst, params.k, opts, stats)
        status = "OK" if res is not None else "NO"
        if res is not None:
            k_found = res.decomposition.size
            k_prime = blocks_without_unique(inst, res.decomposition)
    except BudgetExhausted:
        status = "TIMEOUT"
    t = stats.wall_time
    return BenchRow(
        params.n, params.k, params.d, params.families, params.noise, params.seed, status,
        len(inst.s1), len(inst.s2), k_found, k_prime, idx.d, round(idx.d_star, 4),
        rstats.n1_reduced, rstats.n2_reduced, rstats.removed_matches, round(t, 4),
    )


def _job(args):
    return run_instance(*args)


def sweep(
    n: int,
    ks: list[int],
    ds: list[int],
    reps: int,
    delta: int | None = None,
    f: int | None = None,
    seed_base: int = 0,
    budget_secs: float | None = 60.0,
    workers: int = 1,
    opts: SolverOptions | None = None,
) -> list[BenchRow]:
    jobs = [
        (GenParams(n, k, d, f, delta, seed_base + r), budget_secs, opts)
        for d in ds
        for k in ks
        for r in range(reps)
    ]
    if workers > 1:
        with ProcessPoolExecutor(workers) as ex:
            return list(ex.map(_job, jobs))
    return [_job(j) for j in jobs]


def _mean(xs):
    xs = [x for x in xs if x is not None]
    return round(statistics.fmean(xs), 4) if xs else ""


def cell_rows(rows: list[BenchRow]) -> list[dict]:
    cells: dict[tuple, list[BenchRow]] = {}
    for r in rows:
        cells.setdefault((r.n, r.k, r.d, r.f, r.delta), []).append(r)
    out = []
    for (n, k, d, f, delta), rs in cells.items():
        times = [r.t_seconds for r in rs if r.status == "OK"]
        out.append({
            "n": n, "k": k, "d": d, "f": f, "delta": delta, "reps": len(rs),
            "solved": sum(r.status == "OK" for r in rs),
            "timeouts": sum(r.status == "TIMEOUT" for r in rs),
            "mean_n1": _mean(r.n1 for r in rs),
            "mean_n2": _mean(r.n2 for r in rs),
            "mean_k_found": _mean(r.k_found for r in rs),
            "mean_k_prime": _mean(r.k_prime for r in rs),
            "d_max": max(r.d_max for r in rs),
            "mean_d_star": _mean(r.d_star for r in rs),
            "mean_n1_reduced": _mean(r.n1_reduced for r in rs),
            "mean_n2_reduced": _mean(r.n2_reduced for r in rs),
            "mean_removed_matches": _mean(r.removed_matches for r in rs),
            "mean_t": _mean(times) if times else "TIMEOUT",
            "median_t": round(statistics.median(times), 4) if times else "TIMEOUT",
        })
    return out


def to_csv(rows: list[BenchRow], per_instance: bool = False) -> str:
    buf = io.StringIO()
    if per_instance:
        w = csv.DictWriter(buf, INSTANCE_COLUMNS, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: ("" if v is None else v) for k, v in asdict(r).items()})
    else:
        w = csv.DictWriter(buf, CELL_COLUMNS, lineterminator="\n")
        w.writeheader()
        w.writerows(cell_rows(rows))
    return buf.getvalue()
