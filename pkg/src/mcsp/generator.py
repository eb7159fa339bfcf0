"""Random instances with a planted partition.

k random blocks are written into both strings in two independent random
orders, and delta noise markers are scattered between the blocks of each
string.  A letter receiving noise does so in one string only, so every noise
marker is abundant and the planted blocks always form a valid partition.
Randomness comes from ``random.Random(seed)`` (Mersenne Twister).
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .csp import BlockDecomposition, blocks_of
from .instance import Instance


class Infeasible(ValueError):
    pass


@dataclass(frozen=True)
class GenParams:
    n: int
    k: int
    d: int
    f: int | None = None
    delta: int | None = None
    seed: int = 0

    @property
    def families(self) -> int:
        return self.f if self.f is not None else max(1, 3 * self.n // self.d)

    @property
    def noise(self) -> int:
        return self.delta if self.delta is not None else self.n // 10

    def validate(self) -> None:
        if self.n < 1 or self.d < 1 or self.families < 1:
            raise ValueError(f"n, d and f must be positive: {self}")
        if not 0 <= self.noise < self.n:
            raise ValueError(f"delta must lie in [0, n): {self}")
        if not 1 <= self.k <= self.n - self.noise:
            raise ValueError(f"k must lie in [1, n - delta]: {self}")


def _composition(rng: random.Random, total: int, parts: int) -> list[int]:
    """Uniform random composition of ``total`` into ``parts`` positive parts."""
    cuts = sorted(rng.sample(range(1, total), parts - 1))
    bounds = [0] + cuts + [total]
    return [b - a for a, b in zip(bounds, bounds[1:])]


def _weak_composition(rng: random.Random, total: int, parts: int) -> list[int]:
    out = [0] * parts
    for _ in range(total):
        out[rng.randrange(parts)] += 1
    return out


def generate(params: GenParams) -> tuple[Instance, BlockDecomposition]:
    params.validate()
    rng = random.Random(params.seed)
    n, k, d, f, delta = params.n, params.k, params.d, params.families, params.noise
    content = n - delta
    if d * f < content:
        raise Infeasible(f"{f} letters x {d} occurrences cannot fill {content} markers")

    counts = [[0] * f, [0] * f]
    open_letters = list(range(f))
    blocks = []
    for ln in _composition(rng, content, k):
        block = []
        for _ in range(ln):
            t = rng.randrange(len(open_letters))
            a = open_letters[t]
            block.append(a)
            counts[0][a] += 1
            counts[1][a] += 1
            if counts[0][a] == d:
                open_letters[t] = open_letters[-1]
                open_letters.pop()
        blocks.append(block)

    noise_side = [-1] * f
    noise: list[list[int]] = [[], []]
    for side in rng.sample((0, 1), 2):
        avail = [a for a in range(f) if counts[side][a] < d and noise_side[a] in (-1, side)]
        for _ in range(delta):
            if not avail:
                raise Infeasible(f"no letter left for noise in S{side + 1}")
            t = rng.randrange(len(avail))
            a = avail[t]
            noise[side].append(a)
            noise_side[a] = side
            counts[side][a] += 1
            if counts[side][a] == d:
                avail[t] = avail[-1]
                avail.pop()

    strings: list[list[int]] = [[], []]
    starts: list[list[int]] = [[0] * k, [0] * k]
    for side in (0, 1):
        order = list(range(k))
        rng.shuffle(order)
        gaps = _weak_composition(rng, delta, k + 1)
        s = strings[side]
        it = iter(noise[side])
        for slot, b in enumerate(order):
            s.extend(next(it) for _ in range(gaps[slot]))
            starts[side][b] = len(s)
            s.extend(blocks[b])
        s.extend(it)

    inst = Instance(tuple(strings[0]), tuple(strings[1]), tuple(f"f{a}" for a in range(f)))
    matches = {
        (starts[0][b] + t, starts[1][b] + t) for b in range(k) for t in range(len(blocks[b]))
    }
    return inst, blocks_of(inst, matches)
