"""JSON encoding of instances and solutions.

Rationals are read from integers, JSON numbers and decimal strings (both
parsed exactly) and ``"p/q"`` strings.  Solution files write every rational
as a string; instance files keep integers as JSON numbers.  Infinite prices are the string ``"inf"``.  Indices in
files always refer to input order; the index maps of :class:`Market` are
applied on the way in and out.
"""
from __future__ import annotations

import json
from fractions import Fraction

from .market import INF, Buyer, Item, Market, Outcome, ValidationError, as_rational, canonicalize
from .verify import GeneralValuation

__all__ = [
    "dump_json",
    "format_rational",
    "load_json",
    "market_from_json",
    "market_to_json",
    "outcome_from_json",
    "outcome_to_json",
    "parse_rational",
    "view_from_json",
]


def load_json(path_or_text, is_text: bool = False):
    """Parse JSON with exact decimals; ``path_or_text`` is a path unless ``is_text``."""
    if is_text:
        text = path_or_text
    else:
        with open(path_or_text, encoding="utf-8") as fh:
            text = fh.read()
    try:
        return json.loads(text, parse_float=Fraction)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"invalid JSON: {exc}") from exc


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2)


def parse_rational(x) -> Fraction:
    return as_rational(x)


def format_rational(x) -> str:
    """``"7"``, ``"11/5"`` or ``"inf"``."""
    if x is INF:
        return "inf"
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _number(x):
    # instance files keep integers as JSON numbers
    return x.numerator if x.denominator == 1 else format_rational(x)


def _price_from_json(x):
    if isinstance(x, str) and x.strip().lower() == "inf":
        return INF
    return parse_rational(x)


def market_from_json(obj) -> Market:
    try:
        buyers = [Buyer(parse_rational(b["value"]), b["demand"]) for b in obj["buyers"]]
        items = [Item(parse_rational(it["quality"])) for it in obj["items"]]
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed instance: missing or bad field {exc}") from exc
    return canonicalize(buyers, items)


def market_to_json(market: Market) -> dict:
    buyers = [None] * market.n
    for r, pos in enumerate(market.buyer_origin):
        b = market.buyers[r]
        buyers[pos] = {"value": _number(b.value), "demand": b.demand}
    items = [None] * market.m
    for r, pos in enumerate(market.item_origin):
        items[pos] = {"quality": _number(market.items[r].quality)}
    return {"buyers": buyers, "items": items}


def view_from_json(obj):
    """A :class:`Market`, or a :class:`GeneralValuation` for ``{"valuations", "demands"}``."""
    if isinstance(obj, dict) and "valuations" in obj:
        try:
            return GeneralValuation(obj["valuations"], obj["demands"])
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed valuation instance: {exc}") from exc
    return market_from_json(obj)


def _maps(view):
    if isinstance(view, Market):
        return view.buyer_origin, view.item_origin
    return tuple(range(view.n_buyers)), tuple(range(view.n_items))


def outcome_to_json(view, outcome: Outcome, status: str, revenue=None) -> dict:
    borig, iorig = _maps(view)
    prices = [None] * view.n_items
    for j, p in enumerate(outcome.prices):
        prices[iorig[j]] = format_rational(p)
    alloc = [None] * view.n_buyers
    for i, bundle in enumerate(outcome.allocation):
        alloc[borig[i]] = sorted(iorig[j] for j in bundle)
    out = {"status": status, "prices": prices, "allocation": alloc}
    if revenue is not None:
        out["revenue"] = format_rational(revenue)
    return out


def outcome_from_json(view, obj) -> Outcome:
    borig, iorig = _maps(view)
    irank = {pos: r for r, pos in enumerate(iorig)}
    brank = {pos: r for r, pos in enumerate(borig)}
    try:
        raw_prices, raw_alloc = obj["prices"], obj["allocation"]
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed solution: missing field {exc}") from exc
    if len(raw_prices) != view.n_items or len(raw_alloc) != view.n_buyers:
        raise ValidationError("solution does not match the instance dimensions")
    prices = [None] * view.n_items
    for pos, p in enumerate(raw_prices):
        prices[irank[pos]] = _price_from_json(p)
    alloc = [frozenset()] * view.n_buyers
    for pos, bundle in enumerate(raw_alloc):
        try:
            alloc[brank[pos]] = frozenset(irank[int(j)] for j in bundle)
        except KeyError as exc:
            raise ValidationError(f"item index {exc} out of range") from exc
    return Outcome(prices, alloc)
