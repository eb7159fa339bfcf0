"""Acceptance gate: each test checks one criterion at its stated tolerance and
records a PASS/FAIL line, shown in the terminal summary."""

import os
import random
import statistics
import subprocess
import sys
import time

import pytest

from mcsp.bench import STRUCTURAL, BenchRow, run_instance
from mcsp.csp import blocks_of, validate_csp
from mcsp.generator import GenParams, generate
from mcsp.instance import Instance, build_index
from mcsp.oracle import oracle_minimum
from mcsp.reduction import lift_solution, reduce_fixpoint
from mcsp.sample_graph import (
    build_sample_graph,
    classify_components,
    construct_pt,
    find_branch_target,
    property_violations,
)
from mcsp.solver import SolverOptions, solve_minimum

from conftest import ACCEPTANCE_LINES, random_instance
from test_sample_graph import random_sample

TABLE2_KS = list(range(50, 131, 10))


def record(n: int, ok: bool, detail: str) -> None:
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'} ({detail})"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


@pytest.fixture(scope="module")
def oracle_runs():
    """500 small instances solved by the oracle and by all four solver configurations."""
    rng = random.Random(20240501)
    configs = [SolverOptions(use_reduction=r, use_kprime_init=p) for r in (True, False) for p in (True, False)]
    runs = []
    t0 = time.perf_counter()
    for t in range(500):
        # half of the instances use every letter at least once per string
        inst = random_instance(rng, alphabet=4, max_occ=3, min_alphabet=2, min_occ=t % 2)
        want = oracle_minimum(inst)[0]
        for opts in configs:
            size, dec, stats = solve_minimum(inst, opts)
            runs.append((inst, opts, want, size, dec, stats))
    return runs, time.perf_counter() - t0


def test_criterion_1_oracle_equivalence(oracle_runs):
    runs, secs = oracle_runs
    bad = [r for r in runs if r[2] != r[3] or validate_csp(r[0], r[4].matches())]
    assert all(len(r[0].s1) <= 12 and len(r[0].s2) <= 12 for r in runs)
    record(1, not bad and secs <= 600, f"{len(runs)} solver runs, {len(bad)} mismatches, {secs:.1f}s")


def test_criterion_2_reduction_soundness():
    rng = random.Random(7)
    checked = failures = 0
    while checked < 200:
        inst = random_instance(rng, alphabet=6, max_occ=2)
        if len(inst.s1) + len(inst.s2) > 20:
            continue
        red, _, trace, _ = reduce_fixpoint(inst)
        if not trace.records:
            continue
        checked += 1
        want = oracle_minimum(inst)[0]
        size, pairs = oracle_minimum(red)
        lifted = lift_solution(trace, blocks_of(red, pairs))
        if want != size + trace.k_decrement or validate_csp(inst, lifted.matches()) or lifted.size != want:
            failures += 1
    record(2, failures == 0, f"{checked} reduced instances, {failures} failures")


def _witness(rng: random.Random, inst: Instance):
    """One random match out of every block of an optimal partition."""
    out = []
    for a, b, ln in blocks_of(inst, oracle_minimum(inst)[1]).blocks:
        t = rng.randrange(ln)
        out.append((a + t, b + t))
    return out


def test_criterion_3_sample_graph_invariants():
    rng = random.Random(11)
    failures = constructed = 0
    for t in range(1000):
        inst = random_instance(rng, alphabet=4, max_occ=3)
        idx = build_index(inst)
        if t % 2:
            sample = random_sample(rng, inst, idx, rng.uniform(0.1, 1.0))
        else:
            sample = _witness(rng, inst)
        g = build_sample_graph(inst, idx, sample)
        comps = classify_components(inst, idx, g)
        verts = [v for c in comps for v in c.vertices]
        ok = not property_violations(g)
        ok &= len(verts) == len(set(verts)) == len(inst.s1) + len(inst.s2)
        ok &= all(g.degree(v) <= 2 for v in verts)
        if g.parallel_black is None and find_branch_target(inst, idx, g) is None:
            constructed += 1
            pt = construct_pt(inst, idx, g)
            ok &= not validate_csp(inst, pt, idx) and blocks_of(inst, pt, idx).size == len(sample)
        failures += not ok
    record(3, failures == 0, f"1000 samples, {constructed} reached construction, {failures} failures")


def test_criterion_4_branching_bounds(oracle_runs):
    runs, _ = oracle_runs
    violations = 0
    for inst, _, _, size, _, stats in runs:
        k_searched = size - stats.k_decrement
        violations += stats.max_children_rule1 > stats.d
        violations += stats.max_children_rule2 > stats.d**2
        violations += stats.max_depth > k_searched + 1
    r1 = max(r[5].max_children_rule1 for r in runs)
    r2 = max(r[5].max_children_rule2 for r in runs)
    record(4, violations == 0, f"{violations} violations; widest Rule 1 node {r1}, widest Rule 2 node {r2}")


@pytest.fixture(scope="module")
def d6_rows():
    t0 = time.perf_counter()
    rows = [
        run_instance(GenParams(1000, k, 6, 500, 100, seed), 600)
        for k in TABLE2_KS
        for seed in range(20)
    ]
    return rows, time.perf_counter() - t0


def test_criterion_5_table2_d6(d6_rows):
    rows, secs = d6_rows
    medians = {}
    ok = secs <= 3600
    for k in TABLE2_KS:
        cell = [r for r in rows if r.k == k]
        ok &= all(r.status == "OK" and r.k_found <= k for r in cell)
        medians[k] = statistics.median(r.t_seconds for r in cell)
    ok &= max(medians.values()) <= 10
    detail = ", ".join(f"k={k}: {t:.2f}s" for k, t in medians.items())
    record(5, ok, f"medians {detail}; total {secs:.0f}s")


def _median_time(rows: list[BenchRow], budget: float) -> float:
    return statistics.median(r.t_seconds if r.status == "OK" else budget for r in rows)


def test_criterion_6_table2_d8_hardest():
    budget = 900.0
    hard = [run_instance(GenParams(1000, 130, 8, 375, 100, s), budget) for s in range(10)]
    easy = [run_instance(GenParams(1000, 110, 8, 375, 100, s), budget) for s in range(10)]
    solved = sum(r.status == "OK" and r.k_found <= 130 for r in hard)
    m_hard, m_easy = _median_time(hard, budget), _median_time(easy, budget)
    ratio = m_hard / m_easy
    record(
        6,
        solved >= 8 and ratio >= 5,
        f"{solved}/10 solved at k=130; median {m_hard:.2f}s vs {m_easy:.2f}s at k=110, ratio {ratio:.1f}",
    )


def _blocks_with_unique_runs(inst: Instance, planted) -> int:
    idx = build_index(inst)
    uniq = {a for a in set(inst.s1) if idx.is_unique(a) and idx.count(1, a) == 1}
    return sum(
        1 for a, _, ln in planted.blocks if sum(x in uniq for x in inst.s1[a : a + ln]) >= 2
    )


def test_criterion_7_statistics_consistency(d6_rows):
    rows, _ = d6_rows
    ok = True
    seeded = 0
    for r in rows:
        ok &= r.k_prime is not None and r.k_prime <= r.k_found
        ok &= r.n1_reduced <= r.n1 and r.n2_reduced <= r.n2 and r.removed_matches >= 0
        ok &= r.d_star > 0 and r.d_max <= r.d
        inst, planted = generate(GenParams(r.n, r.k, r.d, r.f, r.delta, r.seed))
        if _blocks_with_unique_runs(inst, planted) >= 4:
            seeded += 1
            ok &= r.n1_reduced < r.n1 and r.n2_reduced < r.n2
    ok &= seeded > 0
    record(7, ok, f"{len(rows)} rows consistent; strict shrink on {seeded} instances with >= 4 unique-letter runs")


def _cli(args, tmp_path, seed):
    env = dict(os.environ, PYTHONHASHSEED=str(seed))
    res = subprocess.run([sys.executable, "-m", "mcsp", *args], capture_output=True, env=env, cwd=tmp_path)
    return res.returncode, res.stdout


def test_criterion_8_determinism(tmp_path):
    outputs = []
    for run_no in range(2):
        inst = f"inst{run_no}.txt"
        _cli(["gen", "--n", "400", "--k", "40", "--d", "6", "--seed", "17", "-o", inst], tmp_path, run_no)
        text = (tmp_path / inst).read_bytes()
        solve = _cli(["solve", inst, "--k", "40"], tmp_path, run_no)
        minimum = _cli(["min", "--no-kprime", inst], tmp_path, run_no)
        bench = _cli(
            ["bench", "--n", "300", "--k", "20,30", "--d", "6", "--reps", "2", "--per-instance"],
            tmp_path,
            run_no,
        )
        lines = bench[1].decode().splitlines()
        header = lines[0].split(",")
        cols = [header.index(c) for c in STRUCTURAL]
        structural = [[row.split(",")[c] for c in cols] for row in lines[1:]]
        outputs.append((text, solve, minimum, structural))
    same = outputs[0] == outputs[1]
    record(8, same and outputs[0][1][0] == 0, "two runs with different hash seeds, byte-identical outputs")
