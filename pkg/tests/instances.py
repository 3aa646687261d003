"""Shared fixture markets and random generators for the test-suite."""
import math
import random

from hypothesis import strategies as st

from sharpdemand.market import Market

FIX_A = Market.from_lists([(10, 1), (9, 2)], [1, 1])
FIX_B = Market.from_lists([(10, 2), (1, 1)], [1, 1])
FIX_C = Market.from_lists([(20, 1), (10, 2)], [3, 2, 1])
FIX_D = Market.from_lists([("13/10", 1), (1, 2), ("9/10", 1)], [2, 1])
FIX_E = Market.from_lists([(10, 1), (1, 10)], [10, 5] + [1] * 10)
FIX_F = (1, [(0, 1, 2)])

FIXTURES = {"A": FIX_A, "B": FIX_B, "C": FIX_C, "D": FIX_D, "E": FIX_E}


def random_market(rng: random.Random, max_buyers=4, max_items=5, max_demand=2, max_value=8):
    n = rng.randint(1, max_buyers)
    m = rng.randint(1, max_items)
    buyers = [(rng.randint(1, max_value), rng.randint(1, max_demand)) for _ in range(n)]
    return Market.from_lists(buyers, [rng.randint(1, max_value) for _ in range(m)])


def corpus(seed=0, count=200, **kw):
    rng = random.Random(seed)
    return [random_market(rng, **kw) for _ in range(count)]


@st.composite
def markets(draw, max_buyers=4, max_items=5, max_demand=2, max_value=8):
    n = draw(st.integers(1, max_buyers))
    m = draw(st.integers(1, max_items))
    buyers = draw(st.lists(st.tuples(st.integers(1, max_value), st.integers(1, max_demand)),
                           min_size=n, max_size=n))
    qualities = draw(st.lists(st.integers(1, max_value), min_size=m, max_size=m))
    return Market.from_lists(buyers, qualities)


def candidate_count_bound(n, m):
    """Ceiling used for the candidate-collection size audit."""
    return n * m * max(1, math.log2(m)) if m else 0
