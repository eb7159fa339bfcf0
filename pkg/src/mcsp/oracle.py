"""Exhaustive minimum CSP search for small instances.

Every CSP matches, for each letter, all occurrences on the side with fewer
copies injectively into the other side.  Enumerating those injections letter
by letter covers the whole solution space.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations
from math import perm

from .csp import blocks_of
from .instance import Instance, Match, build_index


class TooLarge(RuntimeError):
    def __init__(self, estimate: int, limit: int):
        super().__init__(f"{estimate} assignments exceed the limit of {limit}")
        self.estimate = estimate


@dataclass(frozen=True)
class OracleLimits:
    max_assignments: int = 10**7

    def __post_init__(self) -> None:
        if self.max_assignments <= 0:
            raise ValueError("max_assignments must be positive")


def _letter_options(inst: Instance) -> list[list[list[Match]]]:
    idx = build_index(inst)
    pos1, pos2 = idx.positions
    options = []
    for a in sorted(set(pos1) & set(pos2), key=lambda a: pos1[a][0]):
        p, q = pos1[a], pos2[a]
        if len(p) <= len(q):
            opts = [list(zip(p, img)) for img in permutations(q, len(p))]
        else:
            opts = [list(zip(img, q)) for img in permutations(p, len(q))]
        options.append(opts)
    return options


def assignment_count(inst: Instance) -> int:
    idx = build_index(inst)
    pos1, pos2 = idx.positions
    total = 1
    for a in set(pos1) & set(pos2):
        c1, c2 = len(pos1[a]), len(pos2[a])
        total *= perm(max(c1, c2), min(c1, c2))
    return total


def oracle_minimum(
    inst: Instance, limits: OracleLimits = OracleLimits(), prune: bool = True
) -> tuple[int, set[Match]]:
    """Minimum CSP size and one optimal match set.

    With ``prune`` a partial assignment is abandoned once the blocks it
    already forces reach the best size found; ``prune=False`` visits every
    assignment.
    """
    estimate = assignment_count(inst)
    if estimate > limits.max_assignments:
        raise TooLarge(estimate, limits.max_assignments)
    options = _letter_options(inst)
    n1 = len(inst.s1)
    f1 = [-1] * n1
    # number of matched S1 markers is the same for every CSP
    matched = sum(len(opts[0]) for opts in options)
    best = [matched + 1, set()]

    # positions never matched by anything are deleted in every CSP
    matchable = [False] * n1
    for opts in options:
        for choice in opts:
            for i, _ in choice:
                matchable[i] = True

    def bound() -> int:
        cnt = 0
        for i in range(n1 - 1):
            if not (matchable[i] and matchable[i + 1]):
                continue
            a, b = f1[i], f1[i + 1]
            if a < 0 or b < 0 or b == a + 1:
                cnt += 1
        return matched - cnt

    def rec(depth: int) -> None:
        if depth == len(options):
            size = matched - sum(
                1 for i in range(n1 - 1) if f1[i] >= 0 and f1[i + 1] == f1[i] + 1
            )
            if size < best[0]:
                best[0], best[1] = size, _current()
            return
        for choice in options[depth]:
            for i, j in choice:
                f1[i] = j
            if not prune or bound() < best[0]:
                rec(depth + 1)
            for i, _ in choice:
                f1[i] = -1

    def _current() -> set[Match]:
        return {(i, j) for i, j in enumerate(f1) if j >= 0}

    rec(0)
    # recompute through the independent block scan as a guard
    assert blocks_of(inst, best[1]).size == best[0]
    return best[0], best[1]
