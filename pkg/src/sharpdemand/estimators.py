"""scikit-learn style wrappers around the solvers.

``fit`` takes a market (a :class:`Market`, an instance dict in the JSON
layout, or a ``(buyers, qualities)`` pair) and stores the result in
trailing-underscore attributes, in canonical (sorted) index order.
"""
from __future__ import annotations

from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from . import ce, ef, oracle
from .io import market_from_json
from .market import Market, ValidationError

__all__ = [
    "BruteForcePricer",
    "CompetitiveEquilibriumPricer",
    "EnvyFreePricer",
    "check_market",
]


def check_market(X) -> Market:
    """Coerce ``X`` into a :class:`Market`, raising ``ValidationError`` otherwise."""
    if isinstance(X, Market):
        return X
    if isinstance(X, dict):
        return market_from_json(X)
    if isinstance(X, (tuple, list)) and len(X) == 2:
        buyers, qualities = X
        return Market.from_lists(buyers, qualities)
    raise ValidationError(f"cannot interpret {type(X).__name__} as a market")


class _Pricer(BaseEstimator):
    def _store(self, market, outcome, revenue):
        self.market_ = market
        self.outcome_ = outcome
        self.prices_ = None if outcome is None else outcome.prices
        self.allocation_ = None if outcome is None else outcome.allocation
        self.revenue_ = revenue
        return self

    def _check_fitted(self):
        if not hasattr(self, "market_"):
            raise NotFittedError(f"{type(self).__name__} is not fitted yet; call fit first")

    def score(self, X=None, y=None):
        """Revenue of the fitted outcome (``None`` if none exists)."""
        self._check_fitted()
        return self.revenue_


class CompetitiveEquilibriumPricer(_Pricer):
    """Revenue-maximizing competitive equilibrium.

    After ``fit``, ``exists_`` tells whether an equilibrium was found;
    ``prices_``, ``allocation_`` and ``revenue_`` are ``None`` otherwise.
    """

    def fit(self, X, y=None):
        market = check_market(X)
        res = ce.solve_ce(market)
        self.exists_ = res.exists
        self.reason_ = res.reason
        return self._store(market, res.outcome, res.revenue)


class EnvyFreePricer(_Pricer):
    """Revenue-maximizing envy-free pricing for demands up to ``max_demand``.

    Parameters
    ----------
    max_demand : int, optional
        Demand bound; defaults to the largest demand in the market.
    budget : int, optional
        Cap on item windows per winner set.
    n_jobs : int, optional
        Worker processes for the sweep.
    """

    def __init__(self, max_demand=None, budget=None, n_jobs=None):
        self.max_demand = max_demand
        self.budget = budget
        self.n_jobs = n_jobs

    def fit(self, X, y=None):
        market = check_market(X)
        res = ef.solve_ef(market, self.max_demand, budget=self.budget, jobs=self.n_jobs)
        self.solution_ = res.solution
        return self._store(market, res.outcome, res.revenue)


class BruteForcePricer(_Pricer):
    """Exhaustive reference pricing; ``mode`` is ``"ef"`` or ``"ce"``."""

    def __init__(self, mode="ef", budget=None):
        self.mode = mode
        self.budget = budget

    def fit(self, X, y=None):
        if self.mode not in ("ef", "ce"):
            raise ValueError(f"mode must be 'ef' or 'ce', got {self.mode!r}")
        market = check_market(X)
        run = oracle.brute_ef_max if self.mode == "ef" else oracle.brute_ce
        res = run(market, self.budget)
        self.exists_ = res.exists
        return self._store(market, res.outcome, res.revenue)
