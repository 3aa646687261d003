"""Pricing instances built from exact-cover-by-3-sets (X3C) inputs.

An X3C input has a ground set ``range(3n)`` and a list of triples; it is
positive when ``n`` of the triples partition the ground set.  Two encodings
are provided:

* :func:`reduce_x3c_to_ef` builds a three-buyer correlated market whose best
  envy-free revenue reaches ``(3n + 1) * L`` exactly when a cover exists.
* :func:`reduce_x3c_to_ce_general` builds a 0/1 general-valuation market in
  which a competitive equilibrium exists exactly when a cover exists.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .market import Market, Outcome, ValidationError
from .verify import GeneralValuation

__all__ = [
    "CeGadget",
    "EfGadget",
    "X3CInstance",
    "pad_x3c",
    "reduce_x3c_to_ce_general",
    "reduce_x3c_to_ef",
    "x3c_cover",
]


@dataclass(frozen=True)
class X3CInstance:
    """Ground set ``range(3 * n)`` and a list of 3-element triples (duplicates allowed)."""

    n: int
    triples: tuple

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 1:
            raise ValidationError(f"n must be a positive integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        triples = tuple(tuple(int(a) for a in t) for t in self.triples)
        for t in triples:
            if len(t) != 3 or len(set(t)) != 3:
                raise ValidationError(f"triple {list(t)} must hold 3 distinct elements")
            if not all(0 <= a < 3 * self.n for a in t):
                raise ValidationError(f"triple {list(t)} leaves the ground set 0..{3 * self.n - 1}")
        object.__setattr__(self, "triples", triples)

    @property
    def m(self) -> int:
        return len(self.triples)

    def in_bounds(self) -> bool:
        """``n <= m <= 2n - 1``, the range the envy-free encoding needs."""
        return self.n <= self.m <= 2 * self.n - 1

    def to_json(self) -> dict:
        return {"n": self.n, "triples": [list(t) for t in self.triples]}

    @classmethod
    def from_json(cls, obj) -> "X3CInstance":
        try:
            return cls(obj["n"], obj["triples"])
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed X3C instance: {exc}") from exc


def x3c_cover(instance: X3CInstance) -> Optional[tuple]:
    """Positions of ``n`` triples partitioning the ground set, or ``None``."""
    ground = frozenset(range(3 * instance.n))
    sets = [frozenset(t) for t in instance.triples]
    for pick in itertools.combinations(range(instance.m), instance.n):
        if frozenset().union(*(sets[p] for p in pick)) == ground:
            return pick
    return None


def pad_x3c(instance: X3CInstance) -> X3CInstance:
    """Bring ``m`` into ``[n, 2n - 1]`` without changing the answer.

    Too few triples: repeat existing ones (a repeated triple can never be
    used twice in a partition).  Too many: add three fresh elements together
    with the triple holding exactly them, which every cover must then use.
    """
    if instance.m == 0:
        raise ValidationError("cannot pad an instance with no triples")
    n, triples = instance.n, list(instance.triples)
    k = 0
    while len(triples) < n:
        triples.append(triples[k])
        k += 1
    while len(triples) > 2 * n - 1:
        triples.append((3 * n, 3 * n + 1, 3 * n + 2))
        n += 1
    return X3CInstance(n, tuple(triples))


@dataclass(frozen=True)
class EfGadget:
    """Envy-free encoding.  ``target`` is the revenue reached iff a cover exists."""

    market: Market
    base: int       # M = 3nm + 1
    L: int          # sum of M^i for i = 1..3n
    R: tuple        # triple weights, non-increasing

    @property
    def target(self) -> int:
        n = self.market.demands[0]
        return (3 * n + 1) * self.L


def reduce_x3c_to_ef(instance: X3CInstance) -> EfGadget:
    if not instance.in_bounds():
        raise ValidationError(
            f"need n <= m <= 2n-1, got n={instance.n}, m={instance.m}; pad first")
    n, m = instance.n, instance.m
    base = 3 * n * m + 1
    L = sum(base ** i for i in range(1, 3 * n + 1))
    # element a carries weight M^(a+1); sorted() is stable for equal triples
    R = sorted((sum(base ** (a + 1) for a in t) for t in instance.triples), reverse=True)
    buyers = [(3, n), (Fraction(3 * n + 1, n + 1), 2 * n), (2, n)]
    market = Market.from_lists(buyers, [L] * n + R)
    return EfGadget(market, base, L, tuple(R))


@dataclass(frozen=True)
class CeGadget:
    """Competitive-equilibrium encoding with 0/1 valuations and demand 3.

    Items ``0..3n-1`` are the ground set, the last three form the extra
    block.  ``witness`` is an all-prices-one equilibrium when a cover exists.
    """

    view: GeneralValuation
    n: int
    witness: Optional[Outcome] = None

    def to_json(self) -> dict:
        return {"valuations": [[int(v) for v in row] for row in self.view.matrix],
                "demands": list(self.view.demands)}


def reduce_x3c_to_ce_general(instance: X3CInstance) -> CeGadget:
    n = instance.n
    n_items = 3 * n + 3
    extra = tuple(range(3 * n, 3 * n + 3))
    bundles = [tuple(sorted(t)) for t in instance.triples]
    bundles += [(x,) + pair for x in range(3 * n) for pair in itertools.combinations(extra, 2)]
    bundles.append(extra)
    matrix = [[1 if j in b else 0 for j in range(n_items)] for b in bundles]
    view = GeneralValuation(matrix, [3] * len(bundles))

    witness = None
    cover = x3c_cover(instance)
    if cover is not None:
        alloc = [frozenset()] * len(bundles)
        for p in cover:
            alloc[p] = frozenset(bundles[p])
        alloc[-1] = frozenset(extra)
        witness = Outcome([1] * n_items, alloc)
    return CeGadget(view, n, witness)
