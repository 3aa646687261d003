"""Market model for sharp multi-unit demand with correlated valuations.

A buyer ``i`` values item ``j`` at ``value_i * quality_j`` and wants exactly
``demand_i`` items or nothing.  Buyers and items are kept in canonical order
(non-increasing value / quality, ties broken by input position) so that every
index used elsewhere in the package is a post-sort rank, starting at 0.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

__all__ = [
    "INF",
    "BudgetExceeded",
    "DEFAULT_BUDGET",
    "Buyer",
    "Item",
    "Market",
    "Outcome",
    "InvalidOutcome",
    "ValidationError",
    "as_rational",
    "canonicalize",
    "default_budget",
    "is_finite",
    "utility",
    "revenue",
    "total_demand",
    "value_groups",
]


class ValidationError(ValueError):
    """Raised when an instance violates the market invariants."""


class InvalidOutcome(ValueError):
    """Raised when an outcome is structurally inconsistent with its market."""


class BudgetExceeded(RuntimeError):
    """An enumeration would exceed the configured size budget."""


DEFAULT_BUDGET = 10 ** 6


def default_budget() -> int:
    """Enumeration budget, overridable through the ``MARKET_BUDGET`` variable."""
    raw = os.environ.get("MARKET_BUDGET")
    return int(raw) if raw else DEFAULT_BUDGET


class _Infinite:
    """Price of an item nobody may buy.  Use the module singleton ``INF``."""

    __slots__ = ()
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __str__(self):
        return "inf"

    def __reduce__(self):
        return (_Infinite, ())


INF = _Infinite()


def is_finite(price) -> bool:
    return price is not INF


def as_rational(x) -> Fraction:
    """Exact conversion of ints, Fractions and numeric strings ("1.3", "7/2").

    Floats are rejected: they cannot be converted without guessing intent.
    """
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValidationError(f"not a rational number: {x!r}") from exc
    if isinstance(x, float):
        raise TypeError(f"refusing lossy float {x!r}; pass a string or Fraction")
    try:
        return Fraction(x)
    except TypeError as exc:
        raise TypeError(f"cannot interpret {x!r} as a rational") from exc


@dataclass(frozen=True)
class Buyer:
    value: Fraction
    demand: int

    def __post_init__(self):
        object.__setattr__(self, "value", as_rational(self.value))
        if self.value <= 0:
            raise ValidationError(f"buyer value must be positive, got {self.value}")
        if isinstance(self.demand, bool) or int(self.demand) != self.demand:
            raise ValidationError(f"buyer demand must be an integer, got {self.demand!r}")
        object.__setattr__(self, "demand", int(self.demand))
        if self.demand < 1:
            raise ValidationError(f"buyer demand must be >= 1, got {self.demand}")


@dataclass(frozen=True)
class Item:
    quality: Fraction

    def __post_init__(self):
        object.__setattr__(self, "quality", as_rational(self.quality))
        if self.quality <= 0:
            raise ValidationError(f"item quality must be positive, got {self.quality}")


@dataclass(frozen=True)
class Market:
    """A canonically sorted market.

    Build one with :func:`canonicalize`; the constructor checks the ordering
    but does not sort.

    Attributes
    ----------
    buyers, items : tuple
        Sorted by non-increasing value / quality.
    buyer_origin, item_origin : tuple of int
        ``buyer_origin[r]`` is the input position of the buyer with rank ``r``.
    """

    buyers: tuple
    items: tuple
    buyer_origin: tuple = field(default=None)
    item_origin: tuple = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "buyers", tuple(self.buyers))
        object.__setattr__(self, "items", tuple(self.items))
        if self.buyer_origin is None:
            object.__setattr__(self, "buyer_origin", tuple(range(len(self.buyers))))
        if self.item_origin is None:
            object.__setattr__(self, "item_origin", tuple(range(len(self.items))))
        object.__setattr__(self, "buyer_origin", tuple(self.buyer_origin))
        object.__setattr__(self, "item_origin", tuple(self.item_origin))
        if sorted(self.buyer_origin) != list(range(len(self.buyers))):
            raise ValidationError("buyer_origin is not a permutation")
        if sorted(self.item_origin) != list(range(len(self.items))):
            raise ValidationError("item_origin is not a permutation")
        for a, b in zip(self.buyers, self.buyers[1:]):
            if a.value < b.value:
                raise ValidationError("buyers are not sorted by non-increasing value")
        for a, b in zip(self.items, self.items[1:]):
            if a.quality < b.quality:
                raise ValidationError("items are not sorted by non-increasing quality")

    @classmethod
    def from_lists(cls, buyers: Iterable, qualities: Iterable) -> "Market":
        """Shorthand: ``Market.from_lists([(10, 1), (9, 2)], [1, 1])``."""
        return canonicalize([Buyer(v, d) for v, d in buyers], [Item(q) for q in qualities])

    @property
    def n(self) -> int:
        return len(self.buyers)

    @property
    def m(self) -> int:
        return len(self.items)

    @property
    def values(self) -> tuple:
        return tuple(b.value for b in self.buyers)

    @property
    def demands(self) -> tuple:
        return tuple(b.demand for b in self.buyers)

    @property
    def qualities(self) -> tuple:
        return tuple(it.quality for it in self.items)

    # valuation protocol shared with verify.GeneralValuation
    @property
    def n_buyers(self) -> int:
        return len(self.buyers)

    @property
    def n_items(self) -> int:
        return len(self.items)

    def valuation(self, buyer: int, item: int) -> Fraction:
        return self.buyers[buyer].value * self.items[item].quality

    def demand(self, buyer: int) -> int:
        return self.buyers[buyer].demand

    def buyer_rank(self) -> tuple:
        """Inverse of ``buyer_origin``: input position -> rank."""
        inv = [0] * self.n
        for r, pos in enumerate(self.buyer_origin):
            inv[pos] = r
        return tuple(inv)

    def item_rank(self) -> tuple:
        inv = [0] * self.m
        for r, pos in enumerate(self.item_origin):
            inv[pos] = r
        return tuple(inv)


def canonicalize(buyers: Sequence, items: Sequence) -> Market:
    """Sort buyers and items into canonical order, remembering input positions.

    ``buyers`` may hold :class:`Buyer` objects or ``(value, demand)`` pairs,
    ``items`` :class:`Item` objects or bare qualities.
    """
    bs = [b if isinstance(b, Buyer) else Buyer(*b) for b in buyers]
    its = [it if isinstance(it, Item) else Item(it) for it in items]
    border = sorted(range(len(bs)), key=lambda i: (-bs[i].value, i))
    iorder = sorted(range(len(its)), key=lambda j: (-its[j].quality, j))
    return Market(
        buyers=tuple(bs[i] for i in border),
        items=tuple(its[j] for j in iorder),
        buyer_origin=tuple(border),
        item_origin=tuple(iorder),
    )


@dataclass(frozen=True)
class Outcome:
    """Prices (``Fraction`` or ``INF``, one per item) plus an allocation.

    ``allocation[i]`` is the frozenset of item indices buyer ``i`` wins; an
    empty set marks a loser.
    """

    prices: tuple
    allocation: tuple

    def __post_init__(self):
        prices = tuple(p if p is INF else as_rational(p) for p in self.prices)
        for p in prices:
            if p is not INF and p < 0:
                raise InvalidOutcome(f"negative price {p}")
        object.__setattr__(self, "prices", prices)
        object.__setattr__(self, "allocation", tuple(frozenset(x) for x in self.allocation))

    @classmethod
    def empty(cls, n_buyers: int, n_items: int) -> "Outcome":
        """All items unsold at infinite price; the trivially envy-free outcome."""
        return cls((INF,) * n_items, (frozenset(),) * n_buyers)

    def winners(self) -> list:
        return [i for i, x in enumerate(self.allocation) if x]

    def sold(self) -> frozenset:
        return frozenset().union(*self.allocation) if self.allocation else frozenset()

    def owner(self) -> dict:
        """Map item -> winning buyer."""
        return {j: i for i, x in enumerate(self.allocation) for j in x}

    def check(self, view) -> None:
        """Raise :class:`InvalidOutcome` unless consistent with ``view``."""
        if len(self.prices) != view.n_items:
            raise InvalidOutcome(f"expected {view.n_items} prices, got {len(self.prices)}")
        if len(self.allocation) != view.n_buyers:
            raise InvalidOutcome(
                f"expected {view.n_buyers} bundles, got {len(self.allocation)}")
        seen = set()
        for i, bundle in enumerate(self.allocation):
            if not bundle:
                continue
            if len(bundle) != view.demand(i):
                raise InvalidOutcome(
                    f"buyer {i} wins {len(bundle)} items but demands {view.demand(i)}")
            for j in bundle:
                if not 0 <= j < view.n_items:
                    raise InvalidOutcome(f"item index {j} out of range")
                if j in seen:
                    raise InvalidOutcome(f"item {j} allocated twice")
                seen.add(j)


def utility(view, outcome: Outcome, buyer: int) -> Fraction:
    """Sum of ``v_ij - p_j`` over the buyer's bundle; 0 for a loser."""
    total = Fraction(0)
    for j in outcome.allocation[buyer]:
        p = outcome.prices[j]
        if p is INF:
            raise InvalidOutcome(f"buyer {buyer} holds item {j} at infinite price")
        total += view.valuation(buyer, j) - p
    return total


def revenue(outcome: Outcome) -> Fraction:
    total = Fraction(0)
    for bundle in outcome.allocation:
        for j in bundle:
            p = outcome.prices[j]
            if p is INF:
                raise InvalidOutcome(f"item {j} is sold at infinite price")
            total += p
    return total


def total_demand(market, buyers: Iterable[int]) -> int:
    return sum(market.demand(i) for i in buyers)


def value_groups(market: Market) -> list:
    """Partition buyer ranks into runs of equal value, highest value first."""
    groups = []
    prev = None
    for i, b in enumerate(market.buyers):
        if prev is None or b.value != prev:
            groups.append([])
            prev = b.value
        groups[-1].append(i)
    return [tuple(g) for g in groups]
