import json
from fractions import Fraction

import pytest
from hypothesis import given

from instances import FIX_C, FIX_E, markets
from sharpdemand.io import (format_rational, load_json, market_from_json, market_to_json,
                            outcome_from_json, outcome_to_json, view_from_json)
from sharpdemand.market import INF, Market, Outcome, ValidationError
from sharpdemand.verify import GeneralValuation


def test_decimals_are_exact():
    obj = load_json('{"buyers": [{"value": "1.3", "demand": 1}, {"value": 0.9, "demand": 1}],'
                    ' "items": [{"quality": "7/2"}]}', is_text=True)
    mk = market_from_json(obj)
    assert mk.values == (Fraction(13, 10), Fraction(9, 10))
    assert mk.qualities == (Fraction(7, 2),)


def test_malformed_inputs():
    with pytest.raises(ValidationError):
        load_json("{not json", is_text=True)
    with pytest.raises(ValidationError):
        market_from_json({"buyers": [{"value": 1}], "items": []})


def test_format_rational():
    assert format_rational(Fraction(31, 10)) == "31/10"
    assert format_rational(Fraction(20)) == "20"
    assert format_rational(INF) == "inf"


@given(markets(max_items=5))
def test_market_round_trip(mk):
    again = market_from_json(json.loads(json.dumps(market_to_json(mk))))
    assert again == mk


def test_solution_round_trip_reorders_indices():
    mk = Market.from_lists([(10, 2), (20, 1)], [1, 3, 2])   # FIX-C shuffled
    out = Outcome([45, 25, 5], [{0}, {1, 2}])               # canonical indices
    obj = outcome_to_json(mk, out, "envy-free", 75)
    assert obj["prices"] == ["5", "45", "25"]
    assert obj["allocation"] == [[0, 2], [1]]
    assert obj["revenue"] == "75"
    assert outcome_from_json(mk, json.loads(json.dumps(obj))) == out


def test_infinite_prices_round_trip():
    out = Outcome([91, INF] + [1] * 10, [{0}, set(range(2, 12))])
    obj = outcome_to_json(FIX_E, out, "envy-free")
    assert obj["prices"][1] == "inf"
    assert outcome_from_json(FIX_E, obj) == out


def test_general_view():
    view = view_from_json({"valuations": [[1, 0], [0, 1]], "demands": [1, 1]})
    assert isinstance(view, GeneralValuation)
    with pytest.raises(ValidationError):
        outcome_from_json(FIX_C, {"prices": [1], "allocation": [[0], []]})
