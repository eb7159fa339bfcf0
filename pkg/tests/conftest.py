import random

import pytest
from hypothesis import strategies as st

from mcsp.instance import Instance

ALPHABET = "abcdefgh"

FIG1_S1 = "ababcd" + "cd" + "dbadcbbaa" + "babab" + "db" + "ababa"
FIG1_S2 = "ababa" + "aa" + "babab" + "dbadcbbaa" + "a" + "ababcd"


def fig1() -> Instance:
    return Instance.from_tokens(list(FIG1_S1), list(FIG1_S2))


def random_instance(
    rng: random.Random, alphabet: int = 4, max_occ: int = 3, min_alphabet: int = 1, min_occ: int = 0
) -> Instance:
    """Random instance with at most ``max_occ`` copies of each letter per string."""
    while True:
        letters = ALPHABET[: rng.randint(min_alphabet, alphabet)]
        s1 = [a for a in letters for _ in range(rng.randint(min_occ, max_occ))]
        s2 = [a for a in letters for _ in range(rng.randint(min_occ, max_occ))]
        if s1 and s2:
            rng.shuffle(s1)
            rng.shuffle(s2)
            return Instance.from_tokens(s1, s2)


@st.composite
def instances(draw, alphabet: int = 3, max_occ: int = 3, max_len: int = 8):
    letters = st.sampled_from(ALPHABET[:alphabet])
    s1 = draw(st.lists(letters, min_size=1, max_size=max_len))
    s2 = draw(st.lists(letters, min_size=1, max_size=max_len))
    return Instance.from_tokens(_cap(s1, max_occ), _cap(s2, max_occ))


def _cap(xs: list[str], limit: int) -> list[str]:
    seen: dict[str, int] = {}
    out = []
    for x in xs:
        seen[x] = seen.get(x, 0) + 1
        if seen[x] <= limit:
            out.append(x)
    return out


@pytest.fixture
def fig1_instance() -> Instance:
    return fig1()


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
