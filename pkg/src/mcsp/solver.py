"""Branching search for common string partitions of bounded size.

The search grows a sample of pairwise disjoint candidate matches, one per
block of the partition it is looking for.  At each node the sample graph
decides what to do: abort on parallel black edges, branch on a rare
isolated vertex or on a rare odd path, or read the partition off the graph.
"""

from __future__ import annotations

import sys
import time
from dataclasses import asdict, dataclass, field

from .csp import BlockDecomposition, blocks_of
from .instance import Instance, Match, OccurrenceIndex, build_index, unique_matches
from .reduction import ReductionStats, RewriteTrace, lift_solution, reduce_fixpoint
from .sample_graph import (
    RareSingleton,
    branch_children,
    build_sample_graph,
    construct_pt,
    find_branch_target,
)


class BudgetExhausted(RuntimeError):
    def __init__(self, msg: str, stats: SearchStats, lower: int | None = None, upper: int | None = None):
        super().__init__(msg)
        self.stats = stats
        self.lower = lower
        self.upper = upper


@dataclass
class SolverOptions:
    use_reduction: bool = True
    use_kprime_init: bool = True
    node_budget: int | None = None
    time_budget: float | None = None
    # which rare vertex / odd path to branch on: "fewest" children or "first" in scan order
    strategy: str = "fewest"


@dataclass
class SearchStats:
    nodes_visited: int = 0
    max_depth: int = 0
    branches_rule1: int = 0
    branches_rule2: int = 0
    aborts_budget: int = 0
    aborts_parallel_black: int = 0
    reductions_applied: int = 0
    wall_time: float = 0.0
    max_children_rule1: int = 0
    max_children_rule2: int = 0
    d: int = 0
    initial_sample: int = 0
    k_decrement: int = 0

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class SolveResult:
    decomposition: BlockDecomposition
    stats: SearchStats
    reduced: Instance
    trace: RewriteTrace | None
    sample: list[Match]
    reduction_stats: ReductionStats | None = None
    extra: dict = field(default_factory=dict)


def initial_sample_kprime(inst: Instance, idx: OccurrenceIndex | None = None) -> list[Match]:
    """The match of every unique letter, keeping one match per run of parallel
    ones (on an instance reduced by contraction every run has length one)."""
    idx = idx or build_index(inst)
    out: list[Match] = []
    prev = None
    for x2, y2 in unique_matches(inst, idx):
        if prev is not None:
            x, y = prev
            if y2 - y == x2 - x and inst.s1[x : x2 + 1] == inst.s2[y : y2 + 1]:
                prev = (x2, y2)
                continue
        out.append((x2, y2))
        prev = (x2, y2)
    return out


class _Search:
    def __init__(self, inst: Instance, idx: OccurrenceIndex, opts: SolverOptions, stats: SearchStats, deadline: float | None):
        self.inst = inst
        self.idx = idx
        self.opts = opts
        self.stats = stats
        self.deadline = deadline
        self.leaf: list[Match] = []

    def run(self, k: int, sample: list[Match]) -> set[Match] | None:
        need = k - len(sample) + 100
        if sys.getrecursionlimit() < need:
            sys.setrecursionlimit(need)
        return self._node(k, list(sample))

    def _node(self, k: int, sample: list[Match]) -> set[Match] | None:
        st = self.stats
        st.nodes_visited += 1
        if self.opts.node_budget is not None and st.nodes_visited > self.opts.node_budget:
            raise BudgetExhausted("node budget exhausted", st)
        if self.deadline is not None and time.perf_counter() > self.deadline:
            raise BudgetExhausted("time budget exhausted", st)
        if len(sample) > st.max_depth:
            st.max_depth = len(sample)
        if len(sample) > k:
            st.aborts_budget += 1
            return None
        g = build_sample_graph(self.inst, self.idx, sample)
        if g.parallel_black is not None:
            st.aborts_parallel_black += 1
            return None
        target = find_branch_target(self.inst, self.idx, g, self.opts.strategy)
        if target is None:
            self.leaf = list(sample)
            return construct_pt(self.inst, self.idx, g)
        children = branch_children(g, target)
        if isinstance(target, RareSingleton):
            st.branches_rule1 += 1
            st.max_children_rule1 = max(st.max_children_rule1, len(children))
        else:
            st.branches_rule2 += 1
            st.max_children_rule2 = max(st.max_children_rule2, len(children))
        for m in children:
            sample.append(m)
            found = self._node(k, sample)
            sample.pop()
            if found is not None:
                return found
        return None


def _prepare(inst: Instance, opts: SolverOptions, stats: SearchStats):
    trace = rstats = None
    work = inst
    if opts.use_reduction:
        work, _, trace, rstats = reduce_fixpoint(inst)
        stats.reductions_applied = rstats.total_applications
        stats.k_decrement = trace.k_decrement
    idx = build_index(work)
    stats.d = idx.d
    sample = initial_sample_kprime(work, idx) if opts.use_kprime_init else []
    stats.initial_sample = len(sample)
    return work, idx, trace, rstats, sample


def _finish(inst, work, idx, trace, rstats, stats, search, pairs) -> SolveResult:
    dec = blocks_of(work, pairs, idx)
    if trace is not None:
        dec = lift_solution(trace, dec)
    return SolveResult(dec, stats, work, trace, search.leaf, rstats)


def decide(inst: Instance, k: int, opts: SolverOptions | None = None, stats: SearchStats | None = None) -> SolveResult | None:
    """Find a CSP of size at most ``k``, with search details; None if none exists."""
    if k < 0:
        raise ValueError("k must be non-negative")
    opts = opts or SolverOptions()
    stats = stats if stats is not None else SearchStats()
    t0 = time.perf_counter()
    deadline = None if opts.time_budget is None else t0 + opts.time_budget
    try:
        work, idx, trace, rstats, sample = _prepare(inst, opts, stats)
        k_work = k - stats.k_decrement
        if k_work < 0:
            return None
        search = _Search(work, idx, opts, stats, deadline)
        pairs = search.run(k_work, sample)
        if pairs is None:
            return None
        return _finish(inst, work, idx, trace, rstats, stats, search, pairs)
    finally:
        stats.wall_time = time.perf_counter() - t0


def solve_decision(inst: Instance, k: int, opts: SolverOptions | None = None, stats: SearchStats | None = None) -> BlockDecomposition | None:
    res = decide(inst, k, opts, stats)
    return None if res is None else res.decomposition


def minimize(inst: Instance, opts: SolverOptions | None = None) -> SolveResult:
    """Iterative deepening on k starting from a lower bound."""
    opts = opts or SolverOptions()
    stats = SearchStats()
    t0 = time.perf_counter()
    deadline = None if opts.time_budget is None else t0 + opts.time_budget
    work, idx, trace, rstats, sample = _prepare(inst, opts, stats)
    any_rare = any(any(r) for r in idx.rare)
    k = max(len(sample), 1 if any_rare else 0)
    upper = sum(min(len(p), len(idx.positions[1].get(a, ()))) for a, p in idx.positions[0].items())
    search = _Search(work, idx, opts, stats, deadline)
    try:
        while True:
            try:
                pairs = search.run(k, sample)
            except BudgetExhausted as exc:
                exc.lower = k + stats.k_decrement
                exc.upper = upper + stats.k_decrement
                raise
            if pairs is not None:
                return _finish(inst, work, idx, trace, rstats, stats, search, pairs)
            if k >= upper:
                raise RuntimeError(f"no CSP of size <= {upper}; search is incomplete")
            k += 1
    finally:
        stats.wall_time = time.perf_counter() - t0


def solve_minimum(inst: Instance, opts: SolverOptions | None = None) -> tuple[int, BlockDecomposition, SearchStats]:
    res = minimize(inst, opts)
    return res.decomposition.size, res.decomposition, res.stats
