"""The edge-colored sample graph of a sample, its components and the CSP read off it.

Each marker has at most one black, one green and one red partner, so the
graph is stored as six partner arrays (one per color and string) holding the
partner position or -1.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

from .instance import S1, S2, Instance, Marker, Match, OccurrenceIndex


class NotDisjoint(ValueError):
    pass


class PreconditionViolated(RuntimeError):
    pass


class Kind(Enum):
    SINGLETON = "singleton"
    BLACK_PATH = "black-path"
    GREEN_EVEN_PATH = "green-even-path"
    RED_EVEN_PATH = "red-even-path"
    ODD_PATH_RARE = "rare-odd-path"
    ODD_PATH_ABUNDANT = "abundant-odd-path"
    CYCLE = "cycle"


@dataclass
class Component:
    kind: Kind
    vertices: list[Marker]


@dataclass(frozen=True)
class RareSingleton:
    marker: Marker


@dataclass(frozen=True)
class RareOddPath:
    # the markers at odd positions (1st, 3rd, ...) along the path
    markers: tuple[Marker, ...]


class SampleGraph:
    def __init__(self, inst: Instance, idx: OccurrenceIndex, sample: Sequence[Match]):
        self.inst = inst
        self.idx = idx
        self.sample = list(sample)
        n1, n2 = len(inst.s1), len(inst.s2)
        self.black = ([-1] * n1, [-1] * n2)
        self.green = ([-1] * n1, [-1] * n2)
        self.red = ([-1] * n1, [-1] * n2)
        self.parallel_black: tuple[Match, Match] | None = None

    def partner(self, color: str, m: Marker) -> int:
        return getattr(self, color)[m.side][m.pos]

    def degree(self, m: Marker) -> int:
        s, p = m
        return (self.black[s][p] >= 0) + (self.green[s][p] >= 0) + (self.red[s][p] >= 0)

    def edges(self, color: str) -> list[Match]:
        arr = getattr(self, color)[S1]
        return [(i, j) for i, j in enumerate(arr) if j >= 0]

    def has_parallel_black_edges(self) -> bool:
        return self.parallel_black is not None

    def to_dot(self) -> str:
        inst = self.inst
        out = ["graph sample {"]
        for side, s in ((S1, inst.s1), (S2, inst.s2)):
            for p, a in enumerate(s):
                name = f"{side + 1}:{p + 1}:{inst.token(a)}"
                out.append(f'  "s{side + 1}_{p + 1}" [label="{name}"];')
        for color in ("black", "green", "red"):
            for i, j in self.edges(color):
                out.append(f'  "s1_{i + 1}" -- "s2_{j + 1}" [color={color}];')
        out.append("}")
        return "\n".join(out) + "\n"


def build_sample_graph(
    inst: Instance, idx: OccurrenceIndex, sample: Iterable[Match]
) -> SampleGraph:
    """Black edges are the sample; green (red) edges extend each black edge to
    the right (left) along its diagonal until the letters differ or a sampled
    marker is reached."""
    sample = list(sample)
    g = SampleGraph(inst, idx, sample)
    s1, s2 = inst.s1, inst.s2
    n1, n2 = len(s1), len(s2)
    b1, b2 = g.black
    g1, g2 = g.green
    r1, r2 = g.red
    for i, j in sample:
        if s1[i] != s2[j]:
            raise ValueError(f"({i + 1},{j + 1}) is not a candidate match")
        if b1[i] >= 0 or b2[j] >= 0:
            raise NotDisjoint(f"({i + 1},{j + 1}) shares a marker with another match")
        b1[i] = j
        b2[j] = i
    for i, j in sample:
        a, b = i + 1, j + 1
        while a < n1 and b < n2 and s1[a] == s2[b] and b1[a] < 0 and b2[b] < 0:
            g1[a] = b
            g2[b] = a
            a += 1
            b += 1
        a, b = i - 1, j - 1
        while a >= 0 and b >= 0 and s1[a] == s2[b] and b1[a] < 0 and b2[b] < 0:
            r1[a] = b
            r2[b] = a
            a -= 1
            b -= 1
    # Parallel black edges share a diagonal; parallelism along one diagonal is
    # transitive, so checking neighbours on each diagonal is enough.
    if len(sample) > 1:
        diag = sorted(sample, key=lambda m: (m[1] - m[0], m[0]))
        for (i, j), (i2, j2) in zip(diag, diag[1:]):
            if j2 - i2 == j - i and s1[i : i2 + 1] == s2[j : j2 + 1]:
                g.parallel_black = ((i, j), (i2, j2))
                break
    return g


def _walk(g: SampleGraph, start: Marker) -> tuple[list[Marker], list[str], bool]:
    """Follow the component of a non-black, non-isolated vertex.

    Returns the vertices in path order, the edge colors between them, and
    whether the component is a cycle.  Paths are oriented from the endpoint
    that comes first in (side, pos) order.
    """
    green, red = g.green, g.red

    def step(m: Marker, color: str) -> Marker | None:
        arr = green if color == "green" else red
        p = arr[m.side][m.pos]
        return None if p < 0 else Marker(1 - m.side, p)

    # walk away from start along green first to find one end (or close a cycle)
    end, color = start, "green"
    if step(start, "green") is None:
        color = "red"
    cur, c = start, color
    while True:
        nxt = step(cur, c)
        if nxt is None:
            end = cur
            break
        if nxt == start:
            # cycle: report it starting at start, first edge green
            verts, colors = [start], []
            cur, c = start, "green"
            while True:
                nxt = step(cur, c)
                if nxt == start:
                    colors.append(c)
                    return verts, colors, True
                verts.append(nxt)
                colors.append(c)
                cur = nxt
                c = "red" if c == "green" else "green"
        cur = nxt
        c = "red" if c == "green" else "green"
    # `end` is an endpoint; walk to the other one
    first = "green" if step(end, "green") is not None else "red"
    verts, colors = [end], []
    cur, c = end, first
    while True:
        nxt = step(cur, c)
        if nxt is None:
            break
        verts.append(nxt)
        colors.append(c)
        cur = nxt
        c = "red" if c == "green" else "green"
    if verts[-1] < verts[0]:
        verts.reverse()
        colors.reverse()
    return verts, colors, False


def _classify(g: SampleGraph, verts: list[Marker], colors: list[str], cycle: bool) -> Kind:
    if cycle:
        return Kind.CYCLE
    if len(verts) % 2 == 0:
        return Kind.GREEN_EVEN_PATH if colors[0] == "green" else Kind.RED_EVEN_PATH
    return Kind.ODD_PATH_RARE if g.idx.is_rare(verts[0]) else Kind.ODD_PATH_ABUNDANT


def classify_components(inst: Instance, idx: OccurrenceIndex, g: SampleGraph) -> list[Component]:
    n1, n2 = len(inst.s1), len(inst.s2)
    seen = (bytearray(n1), bytearray(n2))
    out = []
    for side, n in ((S1, n1), (S2, n2)):
        for p in range(n):
            if seen[side][p]:
                continue
            m = Marker(side, p)
            b = g.black[side][p]
            if b >= 0:
                verts = [m, Marker(1 - side, b)]
                out.append(Component(Kind.BLACK_PATH, verts))
            elif g.green[side][p] < 0 and g.red[side][p] < 0:
                verts = [m]
                out.append(Component(Kind.SINGLETON, verts))
            else:
                verts, colors, cycle = _walk(g, m)
                out.append(Component(_classify(g, verts, colors, cycle), verts))
            for v in verts:
                seen[v.side][v.pos] = 1
    return out


def _available_partners(g: SampleGraph, m: Marker) -> list[int]:
    letter = g.inst.letter_of(m)
    taken = g.black[1 - m.side]
    return [p for p in g.idx.partners(m.side, letter) if taken[p] < 0]


def branch_children(g: SampleGraph, target: RareSingleton | RareOddPath) -> list[Match]:
    """Candidate matches to try for a branch target, in deterministic order."""
    markers = (target.marker,) if isinstance(target, RareSingleton) else target.markers
    out = []
    for m in markers:
        for p in _available_partners(g, m):
            out.append((m.pos, p) if m.side == S1 else (p, m.pos))
    return out


def rare_isolated(g: SampleGraph) -> list[Marker]:
    out = []
    for side in (S1, S2):
        rare = g.idx.rare[side]
        b, gr, rd = g.black[side], g.green[side], g.red[side]
        for p, flag in enumerate(rare):
            if flag and b[p] < 0 and gr[p] < 0 and rd[p] < 0:
                out.append(Marker(side, p))
    return out


def rare_odd_paths(g: SampleGraph) -> list[list[Marker]]:
    """Vertex lists of all rare odd path components, ordered by first vertex."""
    out = []
    n = (len(g.inst.s1), len(g.inst.s2))
    seen = (bytearray(n[0]), bytearray(n[1]))
    for side in (S1, S2):
        gr, rd = g.green[side], g.red[side]
        for p in range(n[side]):
            # path endpoints have exactly one of green/red
            if seen[side][p] or (gr[p] >= 0) == (rd[p] >= 0):
                continue
            verts, _, _ = _walk(g, Marker(side, p))
            for v in verts:
                seen[v.side][v.pos] = 1
            if len(verts) % 2 == 1 and g.idx.is_rare(verts[0]):
                out.append(verts)
    out.sort(key=lambda vs: vs[0])
    return out


def find_branch_target(
    inst: Instance, idx: OccurrenceIndex, g: SampleGraph, strategy: str = "first"
) -> RareSingleton | RareOddPath | None:
    """Pick what to branch on: a rare isolated vertex if any, else a rare odd path.

    ``strategy="first"`` takes the leftmost candidate (S1 before S2);
    ``"fewest"`` takes the candidate with the fewest children, ties leftmost.
    """
    singles = rare_isolated(g)
    if singles:
        if strategy == "first":
            return RareSingleton(singles[0])
        return min(
            (RareSingleton(m) for m in singles),
            key=lambda t: len(_available_partners(g, t.marker)),
        )
    paths = [RareOddPath(tuple(vs[0::2])) for vs in rare_odd_paths(g)]
    if not paths:
        return None
    if strategy == "first":
        return paths[0]
    return min(paths, key=lambda t: len(branch_children(g, t)))


def construct_pt(inst: Instance, idx: OccurrenceIndex, g: SampleGraph) -> set[Match]:
    """Black edges, plus red edges of red even paths and green edges of every
    other component."""
    if g.parallel_black is not None:
        raise PreconditionViolated(f"parallel black edges {g.parallel_black}")
    singles = rare_isolated(g)
    if singles:
        raise PreconditionViolated(f"rare isolated vertex {singles[0]}")
    odd = rare_odd_paths(g)
    if odd:
        raise PreconditionViolated(f"rare odd path starting at {odd[0][0]}")
    pt = set(g.sample)
    n1 = len(inst.s1)
    seen = bytearray(n1)
    g1, r1 = g.green[S1], g.red[S1]
    for i in range(n1):
        if seen[i] or (g1[i] < 0 and r1[i] < 0):
            continue
        verts, colors, cycle = _walk(g, Marker(S1, i))
        use = "red" if _classify(g, verts, colors, cycle) is Kind.RED_EVEN_PATH else "green"
        arr = g.red[S1] if use == "red" else g.green[S1]
        for v in verts:
            if v.side == S1:
                seen[v.pos] = 1
                if arr[v.pos] >= 0:
                    pt.add((v.pos, arr[v.pos]))
    return pt


def property_violations(g: SampleGraph) -> list[str]:
    """Check the structural properties every sample graph must have."""
    out = []
    inst = g.inst
    n = (len(inst.s1), len(inst.s2))
    sample = set(g.sample)
    if set(g.edges("black")) != sample:
        out.append("black edges differ from the sample")
    for color in ("black", "green", "red"):
        a1, a2 = getattr(g, color)
        for i, j in enumerate(a1):
            if j >= 0 and a2[j] != i:
                out.append(f"{color} slot asymmetry at S1[{i + 1}]")
        for j, i in enumerate(a2):
            if i >= 0 and a1[i] != j:
                out.append(f"{color} slot asymmetry at S2[{j + 1}]")
        for i, j in enumerate(a1):
            if j >= 0 and inst.s1[i] != inst.s2[j]:
                out.append(f"{color} edge ({i + 1},{j + 1}) is not a candidate match")
    for side in (S1, S2):
        for p in range(n[side]):
            m = Marker(side, p)
            if g.black[side][p] >= 0 and g.degree(m) != 1:
                out.append(f"black vertex {m} has degree {g.degree(m)}")
            if g.degree(m) > 2:
                out.append(f"vertex {m} has degree {g.degree(m)}")
    g1, r1, b1 = g.green[S1], g.red[S1], g.black[S1]
    for i, j in enumerate(g1):
        if j < 0:
            continue
        if i == 0 or j == 0 or not (b1[i - 1] == j - 1 or g1[i - 1] == j - 1):
            out.append(f"green ({i + 1},{j + 1}) lacks a black/green left neighbour edge")
    for i, j in enumerate(r1):
        if j < 0:
            continue
        if i + 1 >= n[0] or j + 1 >= n[1] or not (b1[i + 1] == j + 1 or r1[i + 1] == j + 1):
            out.append(f"red ({i + 1},{j + 1}) lacks a black/red right neighbour edge")
    for color in ("green", "red"):
        for side in (S1, S2):
            arr = getattr(g, color)[side]
            for p in range(1, n[side]):
                if arr[p] >= 0 and arr[p - 1] >= 0 and arr[p - 1] != arr[p] - 1:
                    out.append(f"consecutive {color} edges at {Marker(side, p)} not parallel")
    return out
