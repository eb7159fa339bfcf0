"""Input strings, markers, occurrence statistics and candidate matches.

Positions are 0-based everywhere inside the package; the text formats use
1-based positions.  A candidate match is a pair ``(i, j)`` with ``i`` a
position in S1 and ``j`` a position in S2 holding the same letter.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

S1 = 0
S2 = 1

# Letters created by the reduction rules live above this id so they never
# collide with interned input tokens.
FRESH_BASE = 1 << 30

Match = tuple[int, int]


class InstanceError(ValueError):
    pass


class EmptyString(InstanceError):
    pass


class MalformedBudget(InstanceError):
    pass


class Marker(NamedTuple):
    side: int
    pos: int

    def __str__(self) -> str:
        return f"S{self.side + 1}[{self.pos + 1}]"


@dataclass(frozen=True)
class Instance:
    s1: tuple[int, ...]
    s2: tuple[int, ...]
    tokens: tuple[str, ...] = ()
    k: int | None = None

    def __post_init__(self) -> None:
        if not self.s1 or not self.s2:
            raise EmptyString("both strings must be non-empty")
        if self.k is not None and self.k < 0:
            raise MalformedBudget(f"negative budget {self.k}")

    @classmethod
    def from_tokens(
        cls, s1: Sequence[str], s2: Sequence[str], k: int | None = None
    ) -> Instance:
        table: dict[str, int] = {}
        ids1 = tuple(table.setdefault(t, len(table)) for t in s1)
        ids2 = tuple(table.setdefault(t, len(table)) for t in s2)
        return cls(ids1, ids2, tuple(table), k)

    @classmethod
    def from_strings(cls, s1: str, s2: str, k: int | None = None) -> Instance:
        """Whitespace-separated tokens; convenient in tests."""
        return cls.from_tokens(s1.split(), s2.split(), k)

    def string(self, side: int) -> tuple[int, ...]:
        return self.s1 if side == S1 else self.s2

    def token(self, letter: int) -> str:
        if letter >= FRESH_BASE:
            return f"#{letter - FRESH_BASE}"
        return self.tokens[letter] if letter < len(self.tokens) else str(letter)

    def letter_of(self, m: Marker) -> int:
        return self.string(m.side)[m.pos]

    def with_k(self, k: int | None) -> Instance:
        return Instance(self.s1, self.s2, self.tokens, k)

    def swapped(self) -> Instance:
        return Instance(self.s2, self.s1, self.tokens, self.k)

    def to_text(self) -> str:
        lines = [
            " ".join(self.token(a) for a in self.s1),
            " ".join(self.token(a) for a in self.s2),
        ]
        if self.k is not None:
            lines.append(str(self.k))
        return "\n".join(lines) + "\n"


def parse_instance(text: str, chars: bool = False) -> Instance:
    """Parse the instance text format.

    Line 1 holds the tokens of S1, line 2 those of S2 and an optional line 3
    the budget k.  Lines starting with ``#`` are comments.  With ``chars``
    every non-whitespace character is its own token.
    """
    lines = [ln.rstrip("\r\n") for ln in text.splitlines() if not ln.startswith("#")]
    while lines and not lines[-1].strip():
        lines.pop()
    if len(lines) > 3:
        raise InstanceError(f"expected at most 3 lines, got {len(lines)}")
    while len(lines) < 2:
        lines.append("")

    def tokenize(line: str) -> list[str]:
        if chars:
            return [c for c in line if not c.isspace()]
        return line.split()

    t1, t2 = tokenize(lines[0]), tokenize(lines[1])
    if not t1:
        raise EmptyString("S1 has no tokens")
    if not t2:
        raise EmptyString("S2 has no tokens")
    k = None
    if len(lines) == 3:
        raw = lines[2].strip()
        if not raw.isdigit():
            raise MalformedBudget(f"budget must be a non-negative integer, got {raw!r}")
        k = int(raw)
    return Instance.from_tokens(t1, t2, k)


@dataclass
class OccurrenceIndex:
    """Per-letter occurrence lists and rare/abundant flags of an instance."""

    positions: tuple[dict[int, list[int]], dict[int, list[int]]]
    rare: tuple[list[bool], list[bool]]
    d: int
    n_matches: int
    d_star: float = field(default=0.0)

    def count(self, side: int, letter: int) -> int:
        return len(self.positions[side].get(letter, ()))

    def is_rare(self, m: Marker) -> bool:
        return self.rare[m.side][m.pos]

    def is_unique(self, letter: int) -> bool:
        return self.count(S1, letter) <= 1 and self.count(S2, letter) <= 1

    def partners(self, side: int, letter: int) -> list[int]:
        """Positions of ``letter`` in the string opposite to ``side``."""
        return self.positions[1 - side].get(letter, [])

    def rare_markers(self) -> list[Marker]:
        return [
            Marker(side, pos)
            for side in (S1, S2)
            for pos, flag in enumerate(self.rare[side])
            if flag
        ]


def build_index(inst: Instance) -> OccurrenceIndex:
    pos1: dict[int, list[int]] = {}
    pos2: dict[int, list[int]] = {}
    for i, a in enumerate(inst.s1):
        pos1.setdefault(a, []).append(i)
    for j, a in enumerate(inst.s2):
        pos2.setdefault(a, []).append(j)
    rare1 = [len(pos1[a]) <= len(pos2.get(a, ())) for a in inst.s1]
    rare2 = [len(pos2[a]) <= len(pos1.get(a, ())) for a in inst.s2]
    d = max(max(map(len, pos1.values())), max(map(len, pos2.values())))
    n_matches = sum(len(p) * len(pos2.get(a, ())) for a, p in pos1.items())
    d_star = 2 * n_matches / (len(inst.s1) + len(inst.s2))
    return OccurrenceIndex((pos1, pos2), (rare1, rare2), d, n_matches, d_star)


def candidate_matches_of(inst: Instance, idx: OccurrenceIndex, u: Marker) -> list[Match]:
    """All candidate matches containing ``u``, ordered by the partner position."""
    letter = inst.letter_of(u)
    if u.side == S1:
        return [(u.pos, j) for j in idx.partners(S1, letter)]
    return [(i, u.pos) for i in idx.partners(S2, letter)]


def is_candidate(inst: Instance, m: Match) -> bool:
    i, j = m
    return 0 <= i < len(inst.s1) and 0 <= j < len(inst.s2) and inst.s1[i] == inst.s2[j]


def is_parallel(inst: Instance, m1: Match, m2: Match) -> bool:
    (x, y), (x2, y2) = sorted((m1, m2))
    if x == x2 or y2 <= y:
        return False
    if x2 - x != y2 - y:
        return False
    return inst.s1[x : x2 + 1] == inst.s2[y : y2 + 1]


def unique_matches(inst: Instance, idx: OccurrenceIndex) -> list[Match]:
    """The candidate match of every letter occurring exactly once per string,
    sorted by S1 position."""
    pos1, pos2 = idx.positions
    out = [
        (p[0], pos2[a][0])
        for a, p in pos1.items()
        if len(p) == 1 and len(pos2.get(a, ())) == 1
    ]
    out.sort()
    return out


def all_candidate_matches(inst: Instance, idx: OccurrenceIndex) -> Iterable[Match]:
    pos2 = idx.positions[S2]
    for i, a in enumerate(inst.s1):
        for j in pos2.get(a, ()):
            yield (i, j)
