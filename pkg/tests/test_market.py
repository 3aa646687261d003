from fractions import Fraction

import pytest

from instances import FIX_C, FIX_E
from sharpdemand.market import (INF, Buyer, InvalidOutcome, Item, Market, Outcome,
                                ValidationError, as_rational, canonicalize, revenue,
                                total_demand, utility, value_groups)


def test_canonicalize_sorts_and_records_origin():
    mk = canonicalize([(5, 1), (9, 2), (5, 3)], [1, 3, 2])
    assert mk.values == (9, 5, 5)
    assert mk.demands == (2, 1, 3)
    assert mk.buyer_origin == (1, 0, 2)   # ties keep input order
    assert mk.qualities == (3, 2, 1)
    assert mk.item_origin == (1, 2, 0)
    assert mk.buyer_rank() == (1, 0, 2)
    assert mk.item_rank() == (2, 0, 1)


def test_sorted_input_is_identity():
    assert FIX_C.buyer_origin == (0, 1)
    assert FIX_C.item_origin == (0, 1, 2)


@pytest.mark.parametrize("buyer", [(0, 1), (-1, 1), (3, 0), (3, "x"), (3, 1.5)])
def test_bad_buyers_rejected(buyer):
    with pytest.raises((ValidationError, TypeError, ValueError)):
        Buyer(*buyer)


def test_bad_quality_rejected():
    with pytest.raises(ValidationError):
        Item(0)


def test_constructor_requires_sorted_order():
    with pytest.raises(ValidationError):
        Market([Buyer(1, 1), Buyer(2, 1)], [Item(1)])


def test_as_rational_is_exact():
    assert as_rational("1.3") == Fraction(13, 10)
    assert as_rational("7/2") == Fraction(7, 2)
    assert as_rational(4) == 4
    with pytest.raises(TypeError):
        as_rational(0.1)
    with pytest.raises(ValidationError):
        as_rational("abc")


def test_utility_and_revenue_fix_c():
    out = Outcome([45, 25, 5], [{0}, {1, 2}])
    assert utility(FIX_C, out, 0) == 15
    assert utility(FIX_C, out, 1) == 0
    assert revenue(out) == 75


def test_revenue_fix_e():
    out = Outcome([91, INF] + [1] * 10, [{0}, set(range(2, 12))])
    assert revenue(out) == 101


def test_total_demand():
    assert total_demand(FIX_C, {0, 1}) == 3
    assert total_demand(FIX_C, set()) == 0
    assert total_demand(FIX_E, {1}) == 10


def test_value_groups():
    assert value_groups(FIX_C) == [(0,), (1,)]
    assert value_groups(Market.from_lists([(5, 1), (5, 1), (3, 1)], [1])) == [(0, 1), (2,)]
    assert value_groups(Market.from_lists([(5, 1)], [1])) == [(0,)]


def test_outcome_checks():
    with pytest.raises(InvalidOutcome):
        Outcome([-1, 0, 0], [{0}, set()])
    with pytest.raises(InvalidOutcome):
        Outcome([1, 1, 1], [{0, 1}, {1, 2}]).check(FIX_C)   # wrong size and overlap
    with pytest.raises(InvalidOutcome):
        Outcome([1, 1], [{0}, set()]).check(FIX_C)
    with pytest.raises(InvalidOutcome):
        utility(FIX_C, Outcome([INF, 1, 1], [{0}, set()]), 0)


def test_empty_outcome():
    out = Outcome.empty(2, 3)
    assert out.prices == (INF, INF, INF)
    assert out.winners() == [] and out.sold() == frozenset()
    assert str(INF) == "inf"
