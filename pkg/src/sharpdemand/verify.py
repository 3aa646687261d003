"""Certificates for envy-freeness and competitive equilibrium.

Every function takes a *valuation view*: either a :class:`~sharpdemand.market.Market`
(correlated values ``v_i * q_j``) or a :class:`GeneralValuation` holding an
explicit matrix.  Both expose ``n_buyers``, ``n_items``, ``valuation(i, j)``
and ``demand(i)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .market import INF, InvalidOutcome, Outcome, as_rational, utility

__all__ = [
    "EnvyWitness",
    "GeneralValuation",
    "Violation",
    "best_response",
    "ce_violation",
    "envy_witness",
    "find_envy",
    "is_buyer_envy_free",
    "is_competitive_equilibrium",
    "is_envy_free",
    "is_swap_free",
    "over_priced_items",
    "swap_violation",
]


@dataclass(frozen=True)
class GeneralValuation:
    """Arbitrary valuations ``matrix[i][j]`` with sharp demands."""

    matrix: tuple
    demands: tuple

    def __post_init__(self):
        rows = tuple(tuple(as_rational(v) for v in row) for row in self.matrix)
        object.__setattr__(self, "matrix", rows)
        object.__setattr__(self, "demands", tuple(int(d) for d in self.demands))
        if len(rows) != len(self.demands):
            raise ValueError(f"{len(rows)} valuation rows but {len(self.demands)} demands")
        widths = {len(r) for r in rows}
        if len(widths) > 1:
            raise ValueError("valuation matrix rows have different lengths")
        if any(d < 1 for d in self.demands):
            raise ValueError("demands must be >= 1")
        if any(v < 0 for r in rows for v in r):
            raise ValueError("valuations must be non-negative")

    @property
    def n_buyers(self) -> int:
        return len(self.matrix)

    @property
    def n_items(self) -> int:
        return len(self.matrix[0]) if self.matrix else 0

    def valuation(self, buyer: int, item: int) -> Fraction:
        return self.matrix[buyer][item]

    def demand(self, buyer: int) -> int:
        return self.demands[buyer]


@dataclass(frozen=True)
class EnvyWitness:
    """Buyer ``buyer`` gains ``gain > 0`` by switching to ``envied``.

    An empty ``envied`` set means a winner with negative utility who would
    rather buy nothing.
    """

    buyer: int
    envied: frozenset
    gain: Fraction

    def to_json(self, market=None) -> dict:
        buyer, envied = self.buyer, sorted(self.envied)
        if market is not None and hasattr(market, "buyer_origin"):
            buyer = market.buyer_origin[buyer]
            envied = sorted(market.item_origin[j] for j in self.envied)
        return {"buyer": buyer, "envied": envied, "gain": _fmt(self.gain)}


@dataclass(frozen=True)
class Violation:
    """Why an outcome is not a competitive equilibrium.

    ``clause`` is one of ``"envy"``, ``"unsold-price"`` or ``"infinite-price"``.
    """

    clause: str
    witness: Optional[EnvyWitness] = None
    item: Optional[int] = None

    def to_json(self, market=None) -> dict:
        out = {"clause": self.clause}
        if self.witness is not None:
            out["witness"] = self.witness.to_json(market)
        if self.item is not None:
            item = self.item
            if market is not None and hasattr(market, "item_origin"):
                item = market.item_origin[item]
            out["item"] = item
        return out


def _fmt(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def best_response(view, buyer: int, prices: Sequence, size: int):
    """Most profitable bundle of exactly ``size`` finite-priced items.

    Returns ``(items, value)``, or ``None`` when fewer than ``size`` items
    carry a finite price.  Ties go to lower item indices, so the returned set
    is the lexicographically least maximizer.
    """
    m = view.n_items
    if size < 1:
        raise ValueError(f"bundle size must be >= 1, got {size}")
    if size > m:
        raise ValueError(f"bundle size {size} exceeds the {m} items in the market")
    gains = [(view.valuation(buyer, j) - p, j) for j, p in enumerate(prices) if p is not INF]
    if len(gains) < size:
        return None
    gains.sort(key=lambda t: (-t[0], t[1]))
    top = gains[:size]
    return frozenset(j for _, j in top), sum((g for g, _ in top), Fraction(0))


def envy_witness(view, outcome: Outcome, buyer: int) -> Optional[EnvyWitness]:
    """``None`` if ``buyer`` is envy-free, otherwise a witness of the violation."""
    bundle = outcome.allocation[buyer]
    d = view.demand(buyer)
    u = utility(view, outcome, buyer)
    br = best_response(view, buyer, outcome.prices, d) if d <= view.n_items else None
    if br is not None and br[1] > u:
        return EnvyWitness(buyer, br[0], br[1] - u)
    if bundle and u < 0:
        return EnvyWitness(buyer, frozenset(), -u)
    return None


def is_buyer_envy_free(view, outcome: Outcome, buyer: int) -> bool:
    return envy_witness(view, outcome, buyer) is None


def find_envy(view, outcome: Outcome) -> Optional[EnvyWitness]:
    """Witness for the lowest-index envious buyer, or ``None``."""
    outcome.check(view)
    for i in range(view.n_buyers):
        w = envy_witness(view, outcome, i)
        if w is not None:
            return w
    return None


def is_envy_free(view, outcome: Outcome) -> bool:
    return find_envy(view, outcome) is None


def ce_violation(view, outcome: Outcome) -> Optional[Violation]:
    """First violated competitive-equilibrium clause, or ``None``."""
    outcome.check(view)
    for j, p in enumerate(outcome.prices):
        if p is INF:
            return Violation("infinite-price", item=j)
    w = find_envy(view, outcome)
    if w is not None:
        return Violation("envy", witness=w)
    sold = outcome.sold()
    for j, p in enumerate(outcome.prices):
        if j not in sold and p != 0:
            return Violation("unsold-price", item=j)
    return None


def is_competitive_equilibrium(view, outcome: Outcome) -> bool:
    return ce_violation(view, outcome) is None


def over_priced_items(view, outcome: Outcome) -> list:
    """``(item, winner)`` pairs where the price exceeds the winner's value for the item."""
    pairs = []
    for i, bundle in enumerate(outcome.allocation):
        for j in bundle:
            p = outcome.prices[j]
            if p is INF:
                raise InvalidOutcome(f"item {j} is allocated at infinite price")
            if p > view.valuation(i, j):
                pairs.append((j, i))
    return sorted(pairs)


def swap_violation(view, outcome: Outcome, buyer: int):
    """Pairwise form of winner envy: some ``(j, j2)`` with ``j`` held, ``j2`` not,
    and ``v(j) - p(j) < v(j2) - p(j2)``; ``None`` if no such pair exists.
    Losers never have a swap violation.
    """
    bundle = outcome.allocation[buyer]
    if not bundle:
        return None
    prices = outcome.prices
    for j in sorted(bundle):
        held = view.valuation(buyer, j) - prices[j]
        for j2 in range(view.n_items):
            if j2 in bundle or prices[j2] is INF:
                continue
            if view.valuation(buyer, j2) - prices[j2] > held:
                return (j, j2)
    return None


def is_swap_free(view, outcome: Outcome, buyer: int) -> bool:
    """Winner check by pairwise swaps plus non-negative utility."""
    if swap_violation(view, outcome, buyer) is not None:
        return False
    return not outcome.allocation[buyer] or utility(view, outcome, buyer) >= 0
