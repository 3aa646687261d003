"""Exhaustive reference solvers for tiny instances.

Every allocation of disjoint, exactly-sized bundles is enumerated (not only
the quality-monotone ones) and priced by an LP whose envy rows are written
out over all same-size bundles.  Nothing here relies on the structural
shortcuts used by the fast solvers, so disagreements point at those.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional

from .lp import GE, LE, LinearProgram, solve_lazy
from .market import INF, BudgetExceeded, Outcome, default_budget

__all__ = [
    "OracleResult",
    "allocations",
    "brute_ce",
    "brute_ef_max",
    "count_allocations",
    "x3c_brute",
]


def count_allocations(demands, m: int) -> int:
    """Number of allocations: each buyer wins nothing or ``d_i`` unused items."""
    # ways[u]: completions of the remaining buyers when u items are used
    ways = [1] * (m + 1)
    for d in reversed(list(demands)):
        ways = [ways[u] + (math.comb(m - u, d) * ways[u + d] if u + d <= m else 0)
                for u in range(m + 1)]
    return ways[0]


def allocations(demands, m: int) -> Iterator[tuple]:
    """Yield every allocation as a tuple of frozensets, losers first at each buyer."""
    n = len(demands)

    def rec(i, free, acc):
        if i == n:
            yield tuple(acc)
            return
        acc.append(frozenset())
        yield from rec(i + 1, free, acc)
        acc.pop()
        for bundle in itertools.combinations(sorted(free), demands[i]):
            acc.append(frozenset(bundle))
            yield from rec(i + 1, free - set(bundle), acc)
            acc.pop()

    yield from rec(0, frozenset(range(m)), [])


@dataclass(frozen=True)
class OracleResult:
    """``outcome`` is ``None`` when no competitive equilibrium exists."""

    outcome: Optional[Outcome]
    revenue: Optional[Fraction]
    checked: int = 0

    @property
    def exists(self) -> bool:
        return self.outcome is not None


def _guard(view, budget):
    if budget is None:
        budget = default_budget()
    demands = [view.demand(i) for i in range(view.n_buyers)]
    count = count_allocations(demands, view.n_items)
    if count > budget:
        raise BudgetExceeded(f"{count} allocations exceed the budget of {budget}")
    return demands


def _price_allocation(view, alloc, clearing: bool):
    """Max-revenue prices for ``alloc``, or ``None`` if no prices support it.

    Only sold items are variables.  Unsold items are absent (infinite price)
    unless ``clearing``, in which case they are present at price 0.
    """
    m = view.n_items
    sold = sorted(set().union(*alloc))
    col = {j: c for c, j in enumerate(sold)}
    visible = range(m) if clearing else sold
    val = view.valuation

    # one row per (coefficients, sense), keeping the tightest right-hand side
    rows = {}

    def add(coeffs, sense, rhs):
        coeffs = {c: a for c, a in coeffs.items() if a}
        if sense == GE and rhs <= 0 and all(a > 0 for a in coeffs.values()):
            return  # implied by non-negative prices
        key = (tuple(sorted(coeffs.items())), sense)
        old = rows.get(key)
        if old is None or (rhs > old[2] if sense == GE else rhs < old[2]):
            rows[key] = (coeffs, sense, rhs)

    for i, bundle in enumerate(alloc):
        d = view.demand(i)
        if bundle:
            own = sum(val(i, j) for j in bundle)
            add({col[j]: 1 for j in bundle}, LE, own)
            for other in itertools.combinations(visible, d):
                coeffs = {}
                for j in other:
                    if j in col:
                        coeffs[col[j]] = coeffs.get(col[j], 0) + 1
                for j in bundle:
                    coeffs[col[j]] = coeffs.get(col[j], 0) - 1
                add(coeffs, GE, sum(val(i, j) for j in other) - own)
        elif d <= len(visible):
            for other in itertools.combinations(visible, d):
                add({col[j]: 1 for j in other if j in col}, GE, sum(val(i, j) for j in other))

    # prices are non-negative and a winner pays at most its bundle value, so
    # each sold price is capped; a row unreachable under the caps is infeasible
    cap = [Fraction(0)] * len(sold)
    for i, bundle in enumerate(alloc):
        for j in bundle:
            cap[col[j]] = sum(val(i, k) for k in bundle)
    for coeffs, sense, rhs in rows.values():
        if sense == GE and sum(a * cap[c] for c, a in coeffs.items() if a > 0) < rhs:
            return None
        if sense == LE and rhs < 0 and all(a >= 0 for a in coeffs.values()):
            return None

    if not sold:
        prices = [Fraction(0) if clearing else INF] * m
        return Outcome(prices, alloc)
    # The budget rows bound every price, so they seed the program; the envy
    # rows all sit in a pool and enter when violated.  The final point
    # satisfies the whole pool, hence is optimal for the full program.
    lp = LinearProgram(len(sold), [1] * len(sold))
    pool = []
    for coeffs, sense, rhs in rows.values():
        if sense == LE:
            lp.add(coeffs, sense, rhs)
        elif coeffs:
            pool.append(lp.make(coeffs, sense, rhs))

    def separate(x):
        worst, gap = None, 0
        for row in pool:
            miss = row.rhs - row.lhs(x)
            if miss > gap:
                worst, gap = row, miss
        return worst

    res = solve_lazy(lp, separate)
    if not res.optimal:
        return None
    prices = [Fraction(0) if clearing else INF] * m
    for j, p in zip(sold, res.x):
        prices[j] = p
    return Outcome(prices, alloc)


def _search(view, budget, clearing):
    demands = _guard(view, budget)
    best, best_rev, checked = None, None, 0
    for alloc in allocations(demands, view.n_items):
        checked += 1
        out = _price_allocation(view, alloc, clearing)
        if out is None:
            continue
        rev = sum((out.prices[j] for b in alloc for j in b), Fraction(0))
        if best is None or rev > best_rev:
            best, best_rev = out, rev
    return best, best_rev, checked


def brute_ef_max(view, budget: Optional[int] = None) -> OracleResult:
    """Revenue-maximizing envy-free outcome by exhaustive search."""
    best, rev, checked = _search(view, budget, clearing=False)
    # the all-unsold outcome is always envy-free, so ``best`` is never None
    return OracleResult(best, rev, checked)


def brute_ce(view, budget: Optional[int] = None) -> OracleResult:
    """Revenue-maximizing competitive equilibrium, or a result with ``outcome=None``."""
    best, rev, checked = _search(view, budget, clearing=True)
    return OracleResult(best, rev, checked)


def x3c_brute(instance) -> bool:
    """Whether ``n`` of the triples partition the ground set ``range(3n)``."""
    n = instance.n
    triples = [frozenset(t) for t in instance.triples]
    ground = frozenset(range(3 * n))
    for pick in itertools.combinations(triples, n):
        if frozenset().union(*pick) == ground:
            return True
    return False
