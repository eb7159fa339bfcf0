import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mcsp.csp import blocks_of, validate_csp
from mcsp.instance import S1, S2, Instance, Marker, all_candidate_matches, build_index
from mcsp.oracle import oracle_minimum
from mcsp.sample_graph import (
    Kind,
    NotDisjoint,
    PreconditionViolated,
    RareOddPath,
    RareSingleton,
    branch_children,
    build_sample_graph,
    classify_components,
    construct_pt,
    find_branch_target,
    property_violations,
    rare_isolated,
    rare_odd_paths,
)

from conftest import instances


def graph(s1, s2, sample):
    inst = Instance.from_tokens(list(s1), list(s2))
    idx = build_index(inst)
    return inst, idx, build_sample_graph(inst, idx, sample)


def random_sample(rng: random.Random, inst: Instance, idx, keep: float = 0.5):
    ms = list(all_candidate_matches(inst, idx))
    rng.shuffle(ms)
    used1, used2, out = set(), set(), []
    for i, j in ms:
        if i not in used1 and j not in used2 and rng.random() < keep:
            used1.add(i)
            used2.add(j)
            out.append((i, j))
    return out




def test_empty_sample_has_no_edges():
    inst, idx, g = graph("abc", "cab", [])
    assert not g.edges("black") and not g.edges("green") and not g.edges("red")
    comps = classify_components(inst, idx, g)
    assert {c.kind for c in comps} == {Kind.SINGLETON} and len(comps) == 6
    assert find_branch_target(inst, idx, g) == RareSingleton(Marker(S1, 0))


def test_identity_walks_both_ways():
    inst, idx, g = graph("abc", "abc", [(1, 1)])
    assert g.edges("green") == [(2, 2)]
    assert g.edges("red") == [(0, 0)]
    # black vertices have degree one, so the black edge is a component of its own
    kinds = [c.kind for c in classify_components(inst, idx, g)]
    assert sorted(kinds, key=str) == [Kind.BLACK_PATH, Kind.GREEN_EVEN_PATH, Kind.RED_EVEN_PATH]
    assert find_branch_target(inst, idx, g) is None
    assert construct_pt(inst, idx, g) == {(0, 0), (1, 1), (2, 2)}


def test_no_extension_leaves_isolated_vertices():
    inst, idx, g = graph("ab", "ba", [(0, 1)])
    assert g.degree(Marker(S1, 1)) == 0 and g.degree(Marker(S2, 0)) == 0


def test_parallel_black_detection():
    assert graph("ab", "ab", [(0, 0), (1, 1)])[2].has_parallel_black_edges()
    assert not graph("ab", "ab", [(0, 0)])[2].has_parallel_black_edges()
    assert graph("abab", "abab", [(0, 0), (2, 2)])[2].has_parallel_black_edges()
    # same diagonal but different contents in between
    assert not graph("acab", "abab", [(0, 0), (2, 2)])[2].has_parallel_black_edges()


def test_not_disjoint():
    inst = Instance.from_strings("a a", "a")
    with pytest.raises(NotDisjoint):
        build_sample_graph(inst, build_index(inst), [(0, 0), (1, 0)])


def test_isolated_rare_vertices_come_first():
    # a configuration with two rare isolated vertices and a rare odd path
    inst, idx, g = graph("adcacadd", "addda", [(7, 3), (5, 0)])
    assert len(rare_isolated(g)) == 2
    paths = rare_odd_paths(g)
    assert [len(p) for p in paths] == [3]
    assert [c.kind for c in classify_components(inst, idx, g)].count(Kind.ODD_PATH_RARE) == 1
    assert isinstance(find_branch_target(inst, idx, g), RareSingleton)
    assert isinstance(find_branch_target(inst, idx, g, "fewest"), RareSingleton)
    with pytest.raises(PreconditionViolated):
        construct_pt(inst, idx, g)


def test_rare_odd_path_target():
    # S2[1] -red- S1[3] -green- S2[4], both ends rare copies of a
    inst, idx, g = graph("aaabca", "abaa", [(1, 2), (3, 1)])
    assert rare_isolated(g) == []
    assert rare_odd_paths(g) == [[Marker(S2, 0), Marker(S1, 2), Marker(S2, 3)]]
    target = find_branch_target(inst, idx, g)
    assert target == RareOddPath((Marker(S2, 0), Marker(S2, 3)))
    assert branch_children(g, target) == [(0, 0), (2, 0), (5, 0), (0, 3), (2, 3), (5, 3)]
    with pytest.raises(PreconditionViolated):
        construct_pt(inst, idx, g)


def _chosen_color(g, pt, comp):
    s1 = [v for v in comp.vertices if v.side == S1]
    colors = set()
    for v in s1:
        for color in ("green", "red"):
            p = g.partner(color, v)
            if p >= 0 and (v.pos, p) in pt:
                colors.add(color)
    return colors


def test_pt_colors_per_component():
    inst, idx, g = graph("babbabbabbaa", "abaababbbaab", [(0, 11), (1, 0), (4, 9), (7, 5), (10, 2)])
    assert not g.has_parallel_black_edges() and find_branch_target(inst, idx, g) is None
    pt = construct_pt(inst, idx, g)
    comps = classify_components(inst, idx, g)
    seen = set()
    for c in comps:
        if c.kind in (Kind.GREEN_EVEN_PATH, Kind.CYCLE):
            assert _chosen_color(g, pt, c) == {"green"}
        elif c.kind is Kind.RED_EVEN_PATH:
            assert _chosen_color(g, pt, c) == {"red"}
        seen.add(c.kind)
    assert {Kind.GREEN_EVEN_PATH, Kind.RED_EVEN_PATH, Kind.CYCLE} <= seen
    assert validate_csp(inst, pt) == []
    assert blocks_of(inst, pt).size == len(g.sample)


def test_pt_abundant_odd_path_keeps_green():
    inst, idx, g = graph("aabb", "abbb", [(1, 0), (3, 3)])
    comps = classify_components(inst, idx, g)
    odd = [c for c in comps if c.kind is Kind.ODD_PATH_ABUNDANT]
    assert len(odd) == 1
    pt = construct_pt(inst, idx, g)
    assert _chosen_color(g, pt, odd[0]) == {"green"}
    assert validate_csp(inst, pt) == [] and blocks_of(inst, pt).size == 2


def test_branch_children_skip_taken_partners():
    inst, idx, g = graph("aab", "aab", [(0, 1)])
    assert branch_children(g, RareSingleton(Marker(S1, 1))) == [(1, 0)]


def test_to_dot_lists_vertices_and_colors():
    inst, idx, g = graph("abc", "abc", [(1, 1)])
    dot = g.to_dot()
    assert dot.startswith("graph") and "color=green" in dot and "color=red" in dot


@settings(max_examples=150, deadline=None)
@given(instances(), st.randoms(use_true_random=False), st.floats(0.1, 1.0))
def test_graph_properties_on_random_samples(inst, rng, keep):
    idx = build_index(inst)
    g = build_sample_graph(inst, idx, random_sample(rng, inst, idx, keep))
    assert property_violations(g) == []
    comps = classify_components(inst, idx, g)
    verts = [v for c in comps for v in c.vertices]
    assert len(verts) == len(set(verts)) == len(inst.s1) + len(inst.s2)
    for c in comps:
        assert all(g.degree(v) <= 2 for v in c.vertices)
    target = find_branch_target(inst, idx, g)
    if g.parallel_black is None and target is None:
        pt = construct_pt(inst, idx, g)
        assert validate_csp(inst, pt, idx) == []
        assert blocks_of(inst, pt, idx).size == len(g.sample)
    if target is not None:
        children = branch_children(g, target)
        bound = idx.d if isinstance(target, RareSingleton) else idx.d**2
        assert len(children) <= bound


@settings(max_examples=100, deadline=None)
@given(instances(), st.randoms(use_true_random=False))
def test_witness_edges_have_positional_colors(inst, rng):
    """Every match of a witnessed CSP appears in the graph, black at its
    block's anchor, green to the right of it and red to the left."""
    _, pairs = oracle_minimum(inst)
    if not pairs:
        return
    idx = build_index(inst)
    dec = blocks_of(inst, pairs, idx)
    anchors = {}
    sample = []
    for a, b, ln in dec.blocks:
        t = rng.randrange(ln)
        sample.append((a + t, b + t))
        anchors[(a, b, ln)] = t
    g = build_sample_graph(inst, idx, sample)
    for (a, b, ln), t in anchors.items():
        for s in range(ln):
            color = "black" if s == t else ("green" if s > t else "red")
            assert g.partner(color, Marker(S1, a + s)) == b + s
