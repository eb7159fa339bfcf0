"""Data reduction rules with a rewrite trace for lifting solutions back.

Rules, applied in this order until none fires:

1. contract two parallel matches of unique letters,
2. remove a unique match whose four neighbours are unique letters,
3. give a fresh letter to a marker whose only match is forced to be a
   singleton block,
4. split a 2x2 letter whose one perfect matching is forced to singleton blocks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from .csp import BlockDecomposition, InvalidCSP, blocks_of
from .instance import (
    FRESH_BASE,
    S1,
    S2,
    Instance,
    Marker,
    Match,
    OccurrenceIndex,
    build_index,
    unique_matches,
)


class InconsistentTrace(ValueError):
    pass


@dataclass(frozen=True)
class Contract:
    """Intervals [x, x2] of S1 and [y, y2] of S2 were replaced by x and y."""

    x: int
    x2: int
    y: int
    y2: int
    letter: int


@dataclass(frozen=True)
class RemovePair:
    u: int
    v: int
    k_decrement: int


@dataclass(frozen=True)
class Relabel:
    markers: tuple[Marker, ...]
    old: int
    fresh: int


Record = Union[Contract, RemovePair, Relabel]


@dataclass
class ReductionStats:
    n1: int
    n2: int
    n1_reduced: int
    n2_reduced: int
    removed_matches: int
    applications: dict[int, int] = field(default_factory=lambda: {1: 0, 2: 0, 3: 0, 4: 0})

    @property
    def total_applications(self) -> int:
        return sum(self.applications.values())


@dataclass
class RewriteTrace:
    original: Instance
    records: list[Record] = field(default_factory=list)

    @property
    def k_decrement(self) -> int:
        return sum(r.k_decrement for r in self.records if isinstance(r, RemovePair))

    def replay(self, k: int | None = None) -> tuple[Instance, int | None]:
        inst = self.original
        for rec in self.records:
            inst, k = apply_record(inst, k, rec)
        return inst, k


def _fresh_letter(inst: Instance) -> int:
    top = max(max(inst.s1), max(inst.s2))
    return max(top + 1, FRESH_BASE)


def apply_record(inst: Instance, k: int | None, rec: Record) -> tuple[Instance, int | None]:
    s1, s2 = list(inst.s1), list(inst.s2)
    if isinstance(rec, Contract):
        if s1[rec.x] != rec.letter or s1[rec.x : rec.x2 + 1] != s2[rec.y : rec.y2 + 1]:
            raise InconsistentTrace(f"{rec} does not match the instance")
        del s1[rec.x + 1 : rec.x2 + 1]
        del s2[rec.y + 1 : rec.y2 + 1]
    elif isinstance(rec, RemovePair):
        if s1[rec.u] != s2[rec.v]:
            raise InconsistentTrace(f"{rec} does not match the instance")
        del s1[rec.u]
        del s2[rec.v]
        if k is not None:
            k -= rec.k_decrement
    else:
        for side, pos in rec.markers:
            target = s1 if side == S1 else s2
            if target[pos] != rec.old:
                raise InconsistentTrace(f"{rec} does not match the instance")
            target[pos] = rec.fresh
    return Instance(tuple(s1), tuple(s2), inst.tokens), k


def _partner_of_unique(idx: OccurrenceIndex, side: int, letter: int) -> int:
    """Position of a unique letter in the opposite string, or -1."""
    if len(idx.positions[side].get(letter, ())) != 1:
        return -1
    other = idx.positions[1 - side].get(letter, ())
    return other[0] if len(other) == 1 else -1


def rule_parallel_unique(
    inst: Instance, k: int | None = None, idx: OccurrenceIndex | None = None
) -> tuple[Instance, int | None, Contract] | None:
    idx = idx or build_index(inst)
    uniq = unique_matches(inst, idx)
    # a parallel pair of unique matches implies a parallel pair that is
    # consecutive in S1 order among unique matches
    for (x, y), (x2, y2) in zip(uniq, uniq[1:]):
        if y2 - y == x2 - x and inst.s1[x : x2 + 1] == inst.s2[y : y2 + 1]:
            rec = Contract(x, x2, y, y2, inst.s1[x])
            new, _ = apply_record(inst, k, rec)
            return new, k, rec
    return None


def rule_unique_border(
    inst: Instance, k: int | None = None, idx: OccurrenceIndex | None = None
) -> tuple[Instance, int | None, RemovePair] | None:
    idx = idx or build_index(inst)
    s1, s2 = inst.s1, inst.s2
    n1, n2 = len(s1), len(s2)
    for u, v in unique_matches(inst, idx):
        if not (0 < u < n1 - 1 and 0 < v < n2 - 1):
            continue
        lu = _partner_of_unique(idx, S1, s1[u - 1])
        ru = _partner_of_unique(idx, S1, s1[u + 1])
        lv = _partner_of_unique(idx, S2, s2[v - 1])
        rv = _partner_of_unique(idx, S2, s2[v + 1])
        if min(lu, ru, lv, rv) < 0:
            continue
        # L(u) = (u-1, lu), R(u) = (u+1, ru), L(v) = (lv, v-1), R(v) = (rv, v+1)
        if (u - 1, lu) == (lv, v - 1) or (u + 1, ru) == (rv, v + 1):
            dec = 0
        else:
            # coordinates after deleting u and v
            def sh2(j: int) -> int:
                return j - 1 if j > v else j

            def sh1(i: int) -> int:
                return i - 1 if i > u else i

            par_u = sh2(ru) == sh2(lu) + 1
            par_v = sh1(rv) == sh1(lv) + 1
            dec = 1 + par_u + par_v
        rec = RemovePair(u, v, dec)
        new, k2 = apply_record(inst, k, rec)
        return new, k2, rec
    return None


def _can_extend(inst: Instance, i: int, j: int) -> bool:
    """Whether match (i, j) is parallel to some candidate match of a neighbour."""
    s1, s2 = inst.s1, inst.s2
    if i > 0 and j > 0 and s1[i - 1] == s2[j - 1]:
        return True
    return i + 1 < len(s1) and j + 1 < len(s2) and s1[i + 1] == s2[j + 1]


def rule_star(
    inst: Instance, idx: OccurrenceIndex | None = None
) -> tuple[Instance, Relabel] | None:
    idx = idx or build_index(inst)
    for side in (S1, S2):
        s = inst.string(side)
        for pos, a in enumerate(s):
            other = idx.positions[1 - side].get(a, ())
            if len(other) != 1 or len(idx.positions[side][a]) < 2:
                continue
            i, j = (pos, other[0]) if side == S1 else (other[0], pos)
            if _can_extend(inst, i, j):
                continue
            rec = Relabel((Marker(side, pos),), a, _fresh_letter(inst))
            new, _ = apply_record(inst, None, rec)
            return new, rec
    return None


def rule_k22(
    inst: Instance, idx: OccurrenceIndex | None = None
) -> tuple[Instance, Relabel] | None:
    idx = idx or build_index(inst)
    pos1, pos2 = idx.positions
    for a in sorted(pos1, key=lambda a: pos1[a][0]):
        if len(pos1[a]) != 2 or len(pos2.get(a, ())) != 2:
            continue
        (p1, p2), (q1, q2) = pos1[a], pos2[a]
        straight = not _can_extend(inst, p1, q1) and not _can_extend(inst, p2, q2)
        crossed = not _can_extend(inst, p1, q2) and not _can_extend(inst, p2, q1)
        if straight:
            # the straight matching only ever yields singleton blocks: commit
            # to the crossed one by giving p1 and q2 their own letter
            markers = (Marker(S1, p1), Marker(S2, q2))
        elif crossed:
            markers = (Marker(S1, p1), Marker(S2, q1))
        else:
            continue
        rec = Relabel(markers, a, _fresh_letter(inst))
        new, _ = apply_record(inst, None, rec)
        return new, rec
    return None


def reduce_fixpoint(
    inst: Instance, k: int | None = None
) -> tuple[Instance, int | None, RewriteTrace, ReductionStats]:
    trace = RewriteTrace(inst)
    idx0 = build_index(inst)
    applications = {1: 0, 2: 0, 3: 0, 4: 0}
    cur = inst
    while True:
        idx = build_index(cur)
        hit = rule_parallel_unique(cur, k, idx)
        rule = 1
        if hit is None:
            hit = rule_unique_border(cur, k, idx)
            rule = 2
        if hit is None:
            hit3 = rule_star(cur, idx)
            hit = None if hit3 is None else (hit3[0], k, hit3[1])
            rule = 3
        if hit is None:
            hit4 = rule_k22(cur, idx)
            hit = None if hit4 is None else (hit4[0], k, hit4[1])
            rule = 4
        if hit is None:
            break
        cur, k, rec = hit
        trace.records.append(rec)
        applications[rule] += 1
    stats = ReductionStats(
        len(inst.s1),
        len(inst.s2),
        len(cur.s1),
        len(cur.s2),
        idx0.n_matches - build_index(cur).n_matches,
        applications,
    )
    return cur, k, trace, stats


def lift_matches(trace: RewriteTrace, pairs: set[Match] | list[Match]) -> set[Match]:
    """Map a match set of the reduced instance to the original coordinates."""
    cur = set(pairs)
    for rec in reversed(trace.records):
        if isinstance(rec, Contract):
            ln = rec.x2 - rec.x
            if (rec.x, rec.y) not in cur:
                raise InconsistentTrace(f"contracted match ({rec.x + 1},{rec.y + 1}) missing")
            cur = {
                (i + ln if i > rec.x else i, j + ln if j > rec.y else j) for i, j in cur
            }
            cur |= {(rec.x + t, rec.y + t) for t in range(1, ln + 1)}
        elif isinstance(rec, RemovePair):
            cur = {(i + 1 if i >= rec.u else i, j + 1 if j >= rec.v else j) for i, j in cur}
            cur.add((rec.u, rec.v))
    return cur


def lift_solution(trace: RewriteTrace, reduced: BlockDecomposition) -> BlockDecomposition:
    """Lift a decomposition of the reduced instance to the original instance."""
    pairs = lift_matches(trace, reduced.matches())
    try:
        return blocks_of(trace.original, pairs)
    except InvalidCSP as exc:
        raise InconsistentTrace(f"lifted solution is not a CSP: {exc}") from exc
