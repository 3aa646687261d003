import itertools
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from instances import FIX_A, FIX_B, FIX_C, FIX_D, markets
from sharpdemand.market import INF, Outcome
from sharpdemand.verify import (GeneralValuation, best_response, ce_violation, envy_witness,
                                find_envy, is_buyer_envy_free, is_competitive_equilibrium,
                                is_envy_free, is_swap_free, over_priced_items)

C_OPT = Outcome([45, 25, 5], [{0}, {1, 2}])


def test_best_response_fix_c():
    assert best_response(FIX_C, 1, C_OPT.prices, 2) == (frozenset({1, 2}), 0)


def test_best_response_errors_and_infinite():
    with pytest.raises(ValueError):
        best_response(FIX_C, 1, C_OPT.prices, 0)
    with pytest.raises(ValueError):
        best_response(FIX_C, 1, C_OPT.prices, 4)
    assert best_response(FIX_C, 1, [INF, INF, 1], 2) is None


def test_buyer_envy_examples():
    assert all(is_buyer_envy_free(FIX_C, C_OPT, i) for i in range(2))
    w = envy_witness(FIX_C, Outcome([46, 25, 5], [{0}, {1, 2}]), 0)
    assert w.envied == frozenset({1}) and w.gain == 1
    w = envy_witness(FIX_A, Outcome([0, 0], [{0}, set()]), 1)
    assert w.envied == frozenset({0, 1}) and w.gain == 18


def test_negative_utility_winner_has_empty_witness():
    w = envy_witness(FIX_C, Outcome([100, INF, INF], [{0}, set()]), 0)
    assert w.envied == frozenset() and w.gain == 40


def test_is_envy_free_examples():
    assert is_envy_free(FIX_C, C_OPT)
    assert is_envy_free(FIX_D, Outcome(["11/5", "9/10"], [{0}, set(), {1}]))
    assert is_envy_free(FIX_C, Outcome.empty(2, 3))


def test_demand_above_finite_supply_is_envy_free():
    # buyer 1 wants 2 items but only one is finitely priced
    out = Outcome([0, INF, INF], [set(), set()])
    assert envy_witness(FIX_C, out, 1) is None
    assert envy_witness(FIX_C, out, 0) is not None


def test_ce_examples():
    assert is_competitive_equilibrium(FIX_B, Outcome([19, 1], [{0, 1}, set()]))
    assert is_competitive_equilibrium(FIX_C, C_OPT)
    v = ce_violation(FIX_A, Outcome([0, 0], [{0}, set()]))
    assert v.clause == "envy" and v.witness.buyer == 1
    assert ce_violation(FIX_C, Outcome.empty(2, 3)).clause == "infinite-price"
    assert ce_violation(FIX_B, Outcome([19, 1], [set(), set()])).clause == "unsold-price"
    assert ce_violation(FIX_B, Outcome([5, 5], [set(), set()])).clause == "envy"
    assert ce_violation(FIX_A, Outcome([10, 10], [{0}, set()])).clause == "unsold-price"


def test_over_priced_items():
    assert over_priced_items(FIX_C, C_OPT) == [(1, 1)]
    assert over_priced_items(FIX_B, Outcome([19, 1], [{0, 1}, set()])) == [(0, 0)]
    assert over_priced_items(FIX_C, Outcome([0, 0, 0], [{0}, {1, 2}])) == []


def test_witness_json_uses_input_order():
    w = find_envy(FIX_C, Outcome([46, 25, 5], [{0}, {1, 2}]))
    assert w.to_json(FIX_C) == {"buyer": 0, "envied": [1], "gain": "1"}


def test_general_valuation_validation():
    with pytest.raises(ValueError):
        GeneralValuation([[1, 2]], [1, 1])
    with pytest.raises(ValueError):
        GeneralValuation([[1, -2]], [1])
    g = GeneralValuation([[1, 0], [0, 1]], [1, 1])
    assert is_competitive_equilibrium(g, Outcome([1, 1], [{0}, {1}]))


prices_st = st.lists(st.one_of(st.just(INF), st.integers(0, 12)), min_size=5, max_size=5)


@given(markets(max_items=5, max_demand=3), prices_st)
def test_best_response_matches_enumeration(mk, prices):
    prices = prices[:mk.m]
    for i in range(mk.n):
        d = mk.demand(i)
        if d > mk.m:
            continue
        finite = [j for j in range(mk.m) if prices[j] is not INF]
        br = best_response(mk, i, prices, d)
        if len(finite) < d:
            assert br is None
            continue
        best = max(sum(mk.valuation(i, j) - prices[j] for j in b)
                   for b in itertools.combinations(finite, d))
        assert br[1] == best
        assert sum(mk.valuation(i, j) - prices[j] for j in br[0]) == best


@st.composite
def market_and_outcome(draw):
    mk = draw(markets(max_items=5, max_demand=2))
    free = list(range(mk.m))
    alloc = []
    for i in range(mk.n):
        d = mk.demand(i)
        if d <= len(free) and draw(st.booleans()):
            pick = draw(st.permutations(free))[:d]
            alloc.append(frozenset(pick))
            free = [j for j in free if j not in pick]
        else:
            alloc.append(frozenset())
    sold = set().union(*alloc)
    prices = [draw(st.integers(0, 10)) if j in sold else draw(st.one_of(st.just(INF), st.integers(0, 10)))
              for j in range(mk.m)]
    return mk, Outcome(prices, alloc)


@given(market_and_outcome())
def test_pairwise_swaps_decide_winner_envy(case):
    mk, out = case
    for i in out.winners():
        assert is_swap_free(mk, out, i) == is_buyer_envy_free(mk, out, i)


@given(market_and_outcome())
def test_ce_implies_ef(case):
    mk, out = case
    if is_competitive_equilibrium(mk, out):
        assert is_envy_free(mk, out)
