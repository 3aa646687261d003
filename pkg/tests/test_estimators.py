import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from instances import FIX_A, FIX_C
from sharpdemand.estimators import (BruteForcePricer, CompetitiveEquilibriumPricer,
                                    EnvyFreePricer, check_market)
from sharpdemand.market import ValidationError


def test_check_market():
    assert check_market(FIX_C) is FIX_C
    assert check_market(([(20, 1), (10, 2)], [3, 2, 1])) == FIX_C
    assert check_market({"buyers": [{"value": 20, "demand": 1}, {"value": 10, "demand": 2}],
                         "items": [{"quality": q} for q in (3, 2, 1)]}) == FIX_C
    with pytest.raises(ValidationError):
        check_market(42)


def test_envy_free_pricer():
    est = EnvyFreePricer(max_demand=2).fit(FIX_C)
    assert est.revenue_ == 75 and est.score() == 75
    assert est.prices_ == (45, 25, 5)
    assert clone(est).get_params() == {"max_demand": 2, "budget": None, "n_jobs": None}


def test_ce_pricer_and_brute():
    est = CompetitiveEquilibriumPricer().fit(FIX_A)
    assert not est.exists_ and est.prices_ is None
    assert BruteForcePricer(mode="ce").fit(FIX_A).exists_ is False
    assert BruteForcePricer(mode="ef").fit(FIX_C).revenue_ == 75
    with pytest.raises(ValueError):
        BruteForcePricer(mode="x").fit(FIX_C)


def test_not_fitted():
    with pytest.raises(NotFittedError):
        EnvyFreePricer().score()
