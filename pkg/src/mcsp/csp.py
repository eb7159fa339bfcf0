"""Common string partitions as match sets, and their block decompositions."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .instance import Instance, Match, OccurrenceIndex, build_index


class InvalidCSP(ValueError):
    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = violations


class SolutionFormatError(ValueError):
    pass


def partner_arrays(inst: Instance, pairs: Iterable[Match]) -> tuple[list[int], list[int]]:
    """``f1[i]`` is the S2 partner of S1 position ``i`` (or -1), and vice versa."""
    f1 = [-1] * len(inst.s1)
    f2 = [-1] * len(inst.s2)
    for i, j in pairs:
        f1[i] = j
        f2[j] = i
    return f1, f2


def validate_csp(
    inst: Instance, pairs: Iterable[Match], idx: OccurrenceIndex | None = None
) -> list[str]:
    """Return the violations that keep ``pairs`` from being a CSP; empty if ok."""
    idx = idx or build_index(inst)
    n1, n2 = len(inst.s1), len(inst.s2)
    violations = []
    seen1: dict[int, Match] = {}
    seen2: dict[int, Match] = {}
    for m in sorted(set(pairs)):
        i, j = m
        if not (0 <= i < n1 and 0 <= j < n2):
            violations.append(f"({i + 1},{j + 1}) out of range")
            continue
        if inst.s1[i] != inst.s2[j]:
            violations.append(f"({i + 1},{j + 1}) is not a candidate match")
            continue
        if i in seen1:
            violations.append(f"S1[{i + 1}] in {seen1[i]} and {m}")
        if j in seen2:
            violations.append(f"S2[{j + 1}] in {seen2[j]} and {m}")
        seen1.setdefault(i, m)
        seen2.setdefault(j, m)
    for i in range(n1):
        if idx.rare[0][i] and i not in seen1:
            violations.append(f"rare marker S1[{i + 1}] unmatched")
    for j in range(n2):
        if idx.rare[1][j] and j not in seen2:
            violations.append(f"rare marker S2[{j + 1}] unmatched")
    return violations


@dataclass
class BlockDecomposition:
    """Blocks as ``(s1_start, s2_start, length)`` triples in S1 order, plus
    the deleted positions of both strings (all 0-based)."""

    blocks: list[tuple[int, int, int]]
    deleted1: list[int] = field(default_factory=list)
    deleted2: list[int] = field(default_factory=list)

    @property
    def size(self) -> int:
        return len(self.blocks)

    def matches(self) -> set[Match]:
        return {(a + t, b + t) for a, b, ln in self.blocks for t in range(ln)}

    def to_text(self) -> str:
        lines = [f"size {self.size}"]
        lines += [f"B {a + 1} {b + 1} {ln}" for a, b, ln in self.blocks]
        lines.append(" ".join(["D1"] + [str(p + 1) for p in self.deleted1]))
        lines.append(" ".join(["D2"] + [str(p + 1) for p in self.deleted2]))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> BlockDecomposition:
        blocks = []
        d1: list[int] = []
        d2: list[int] = []
        claimed = None
        try:
            for line in text.splitlines():
                parts = line.split()
                if not parts or parts[0].startswith("#"):
                    continue
                tag, args = parts[0], [int(x) for x in parts[1:]]
                if tag == "size":
                    claimed = args[0]
                elif tag == "B":
                    a, b, ln = args
                    if a < 1 or b < 1 or ln < 1:
                        raise SolutionFormatError(f"bad block line {line!r}")
                    blocks.append((a - 1, b - 1, ln))
                elif tag == "D1":
                    d1 = [p - 1 for p in args]
                elif tag == "D2":
                    d2 = [p - 1 for p in args]
                else:
                    raise SolutionFormatError(f"unknown line {line!r}")
        except ValueError as exc:
            if isinstance(exc, SolutionFormatError):
                raise
            raise SolutionFormatError(str(exc)) from exc
        if claimed is None:
            raise SolutionFormatError("missing 'size' line")
        if claimed != len(blocks):
            raise SolutionFormatError(f"size {claimed} but {len(blocks)} blocks listed")
        return cls(blocks, d1, d2)


def blocks_of(
    inst: Instance, pairs: Iterable[Match], idx: OccurrenceIndex | None = None
) -> BlockDecomposition:
    """Block decomposition of a CSP: maximal runs of consecutive parallel matches."""
    pairs = list(pairs)
    violations = validate_csp(inst, pairs, idx)
    if violations:
        raise InvalidCSP(violations)
    f1, f2 = partner_arrays(inst, pairs)
    blocks: list[tuple[int, int, int]] = []
    prev = -2
    for i, j in enumerate(f1):
        if j < 0:
            prev = -2
            continue
        if i > 0 and f1[i - 1] >= 0 and j == prev + 1:
            a, b, ln = blocks[-1]
            blocks[-1] = (a, b, ln + 1)
        else:
            blocks.append((i, j, 1))
        prev = j
    deleted1 = [i for i, j in enumerate(f1) if j < 0]
    deleted2 = [j for j, i in enumerate(f2) if i < 0]
    return BlockDecomposition(blocks, deleted1, deleted2)


def check_decomposition(inst: Instance, dec: BlockDecomposition) -> list[str]:
    """Violations of a claimed decomposition: overlapping or unequal blocks,
    wrong deletion lists, or a match set that is not a CSP."""
    violations = []
    n1, n2 = len(inst.s1), len(inst.s2)
    used1: set[int] = set()
    used2: set[int] = set()
    for a, b, ln in dec.blocks:
        if a + ln > n1 or b + ln > n2:
            violations.append(f"block ({a + 1},{b + 1},{ln}) out of range")
            continue
        if inst.s1[a : a + ln] != inst.s2[b : b + ln]:
            violations.append(f"block ({a + 1},{b + 1},{ln}) contents differ")
        span1, span2 = set(range(a, a + ln)), set(range(b, b + ln))
        if span1 & used1 or span2 & used2:
            violations.append(f"block ({a + 1},{b + 1},{ln}) overlaps another block")
        used1 |= span1
        used2 |= span2
    if sorted(dec.deleted1) != sorted(set(range(n1)) - used1):
        violations.append("D1 does not list exactly the uncovered S1 positions")
    if sorted(dec.deleted2) != sorted(set(range(n2)) - used2):
        violations.append("D2 does not list exactly the uncovered S2 positions")
    if not violations:
        violations += validate_csp(inst, dec.matches())
    return violations
