import random
from fractions import Fraction
from itertools import product

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from zonet.network.core import ReactionNetwork
from zonet.network.enumeration import network_from_indices, universe_size

settings.register_profile(
    "default",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much],
)
settings.load_profile("default")


@st.composite
def zero_one_networks(draw, s_min=1, s_max=3, m_min=1, m_max=6):
    """A random zero-one network drawn from the reaction universe."""
    s = draw(st.integers(s_min, s_max))
    size = universe_size(s)
    m = draw(st.integers(m_min, min(m_max, size)))
    idx = draw(st.lists(st.integers(0, size - 1), min_size=m, max_size=m, unique=True))
    return network_from_indices(idx, s)


def random_network(rng: random.Random, s: int, m: int):
    return network_from_indices(rng.sample(range(universe_size(s)), m), s)


def random_rational(rng: random.Random, lo: int = 1, hi: int = 20, den: int = 8) -> Fraction:
    return Fraction(rng.randint(lo * den, hi * den), den)


positive_rationals = st.builds(Fraction, st.integers(1, 400), st.integers(1, 20))


def random_rank_one_network(rng: random.Random, s: int):
    """Zero-one network whose stoichiometric columns are all +-v for one v."""
    while True:
        v = tuple(rng.randint(-1, 1) for _ in range(s))
        if any(v):
            break
    pairs = []
    for y in product((0, 1), repeat=s):
        for sign in (1, -1):
            z = tuple(a + sign * b for a, b in zip(y, v))
            if all(c in (0, 1) for c in z):
                pairs.append((y, z))
    chosen = rng.sample(pairs, rng.randint(1, min(4, len(pairs))))
    return ReactionNetwork.from_pairs(chosen, tuple(f"X{i + 1}" for i in range(s)))


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
