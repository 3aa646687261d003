"""Revenue-maximizing envy-free pricing when every demand is at most ``max_demand``.

Outline:

1. :func:`enumerate_candidate_sets` lists buyer sets that may win in an
   optimal envy-free outcome.  One representative per total demand is kept
   for the lowest value group of a set; higher groups are completed by the
   demand-sorted extension lists.
2. :func:`max_revenue` prices a fixed winner set and item set.  The lowest
   winner's utility is pinned at zero, one anchor item of that winner has its
   price maximized by a small LP, and every earlier item is priced by the
   chain ``p_s = v_owner(s) * (q_s - q_{s+1}) + p_{s+1}``.
3. Only the last ``2 * max_demand`` sold items enter the LP, so for large winner
   sets :func:`solve_dlp` picks the remaining items by dynamic programming.
4. :func:`solve_ef` sweeps every candidate set and item window.
"""
from __future__ import annotations

import itertools
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

from .lp import EQ, GE, LE, LinearProgram, solve
from .market import (INF, BudgetExceeded, Market, Outcome, default_budget, revenue,
                     total_demand, value_groups)
from .verify import find_envy

__all__ = [
    "CandidateSets",
    "DlpTable",
    "EFResult",
    "Solution",
    "dlp_table",
    "enumerate_candidate_sets",
    "find_loser",
    "find_winners",
    "is_candidate_set",
    "max_revenue",
    "monotone_allocation",
    "solve_dlp",
    "solve_ef",
]

log = logging.getLogger(__name__)

def _group_of(market: Market) -> list:
    where = [0] * market.n
    for k, g in enumerate(value_groups(market)):
        for i in g:
            where[i] = k
    return where


def is_candidate_set(market: Market, S) -> bool:
    """Direct check of the candidate-winner-set definition."""
    S = set(S)
    if not S or total_demand(market, S) > market.m:
        return False
    where = _group_of(market)
    k = max(where[i] for i in S)
    for i in range(market.n):
        if i in S or where[i] >= k:
            continue
        if market.demand(i) <= sum(market.demand(s) for s in S if s > i):
            return False
    return True


def find_winners(market: Market, S) -> frozenset:
    """Smallest superset of ``S`` that can satisfy the candidate inequality.

    Compare the total demand of the result with ``market.m`` to learn
    whether any candidate set contains ``S``.
    """
    if not S:
        raise ValueError("find_winners needs a non-empty buyer set")
    where = _group_of(market)
    k = where[max(S)]
    W = set(S)
    for j in range(market.n - 1, -1, -1):
        if where[j] >= k or j in W:
            continue
        if market.demand(j) <= sum(market.demand(i) for i in W if i > j):
            W.add(j)
    return frozenset(W)


def find_loser(market: Market, S) -> frozenset:
    """Losers whose envy-freeness implies that of every other loser.

    Scans value groups from the group of the best winner downward and keeps,
    per group, the smallest-demand non-winner if it undercuts every demand
    kept so far.
    """
    S = set(S)
    groups = value_groups(market)
    where = _group_of(market)
    alpha = math.inf
    losers = []
    for group in groups[where[min(S)]:]:
        others = [i for i in group if i not in S]
        if not others:
            continue
        i0 = min(others, key=lambda i: (market.demand(i), i))
        if market.demand(i0) < alpha:
            losers.append(i0)
            alpha = market.demand(i0)
    return frozenset(losers)


@dataclass(frozen=True)
class CandidateSets:
    """Output of :func:`enumerate_candidate_sets`.

    ``audit`` holds one ``(group, d, demand_of_seed, max_extensions)`` row
    per (group, d) round, for checking the ``floor(m / demand_of_seed)`` bound.
    """

    sets: tuple
    audit: tuple = ()

    def __iter__(self):
        return iter(self.sets)

    def __len__(self):
        return len(self.sets)

    def __contains__(self, item):
        return frozenset(item) in self.sets


def _max_fill(demands, cap: int) -> int:
    """Largest subset sum of ``demands`` not exceeding ``cap``."""
    reach = 1  # bitset of reachable sums
    mask = (1 << (cap + 1)) - 1
    for d in demands:
        reach |= (reach << d) & mask
    return reach.bit_length() - 1


def enumerate_candidate_sets(market: Market) -> CandidateSets:
    from .ce import subset_sum_select

    m = market.m
    groups = value_groups(market)
    found, order, audit = set(), [], []

    def add(s):
        if s not in found:
            found.add(s)
            order.append(s)

    if not groups:
        return CandidateSets(())
    top = groups[0]
    fill = _max_fill([market.demand(i) for i in top], m)
    if fill > 0:
        pick = subset_sum_select([market.demand(i) for i in top], fill)
        add(frozenset(top[p] for p in pick))

    for k in range(1, len(groups)):
        group = groups[k]
        demands = [market.demand(i) for i in group]
        above = [i for g in groups[:k] for i in g]
        built = {}
        for d in range(1, m + 1):
            fill = _max_fill(demands, d)
            if fill == 0:
                continue
            if fill not in built:
                seed = frozenset(group[p] for p in subset_sum_select(demands, fill))
                ext = [(fill, seed)]
                widest = 1
                for b in reversed(above):
                    db = market.demand(b)
                    keep = [c for c in ext if c[0] < db]
                    grow = [(c[0] + db, c[1] | {b}) for c in ext if c[0] + db <= m]
                    ext = keep + grow
                    widest = max(widest, len(ext))
                built[fill] = (ext, widest)
                for _, s in ext:
                    add(s)
            audit.append((k, d, fill, built[fill][1]))
    return CandidateSets(tuple(order), tuple(audit))


def monotone_allocation(market: Market, S, T):
    """Buyers in rank order take the items of ``T`` in rank order.

    Returns ``(allocation, owner)`` where ``owner[s]`` is the buyer of the
    ``s``-th item of ``T``.
    """
    S, T = sorted(S), sorted(T)
    alloc = [frozenset()] * market.n
    owner = []
    pos = 0
    for i in S:
        d = market.demand(i)
        alloc[i] = frozenset(T[pos:pos + d])
        owner.extend([i] * d)
        pos += d
    return tuple(alloc), owner


@dataclass(frozen=True)
class Solution:
    outcome: Outcome
    revenue: Fraction
    anchor: Optional[int]
    winners: frozenset
    items: tuple


def _anchor_program(market, T, owner, window_start, anchor_pos, losers):
    """LP over the prices of items ``T[window_start:]`` for one anchor position."""
    q = [market.items[j].quality for j in T]
    v = [market.buyers[i].value for i in owner]
    ell = len(T)
    width = ell - window_start
    last = owner[-1]
    low_bundle = [s for s in range(window_start, ell) if owner[s] == last]

    def var(s):
        return s - window_start

    lp = LinearProgram(width, {}, names=[f"p{T[s]}" for s in range(window_start, ell)])
    low_value = v[low_bundle[0]]
    # the last winner has zero utility
    lp.add({var(s): 1 for s in low_bundle}, EQ, sum(low_value * q[s] for s in low_bundle),
           name="low-zero-utility")

    if anchor_pos is not None:
        prev = next(owner[s] for s in range(ell - 1, -1, -1) if owner[s] != last)
        prev_bundle = [s for s in range(window_start, ell) if owner[s] == prev]
        prev_value = market.buyers[prev].value
        k = anchor_pos
        lp.objective = tuple(Fraction(1) if var(s) == var(k) else Fraction(0)
                             for s in range(window_start, ell))
        for s in low_bundle:
            if s != k:
                lp.add({var(k): 1, var(s): -1}, LE, prev_value * (q[k] - q[s]), name="anchor-best")
        for s in prev_bundle:
            lp.add({var(s): 1, var(k): -1}, EQ, prev_value * (q[s] - q[k]), name="prev-chain")
        for s in prev_bundle:
            for s2 in low_bundle:
                lp.add({var(s2): 1, var(s): -1}, LE, low_value * (q[s2] - q[s]), name="low-swap")
        tail = set(low_bundle) | set(prev_bundle)
        for s in range(window_start, ell):
            if s not in tail:
                lp.add({var(s): 1, var(s + 1): -1}, EQ, v[s] * (q[s] - q[s + 1]), name="chain")
    else:
        # a single winner: revenue is already fixed, only feasibility matters
        lp.objective = tuple(Fraction(1) for _ in range(width))

    for i in sorted(losers):
        d = market.demand(i)
        if d > width:
            continue
        vi = market.buyers[i].value
        for sub in itertools.combinations(range(window_start, ell), d):
            lp.add({var(s): 1 for s in sub}, GE, sum(vi * q[s] for s in sub), name=f"loser[{i}]")
    return lp


def max_revenue(market: Market, S, T, max_demand: Optional[int] = None,
                verify: bool = True) -> Optional[Solution]:
    """Best envy-free prices when ``S`` wins exactly the items ``T``.

    Returns ``None`` when no envy-free prices support the monotone
    allocation.  Items outside ``T`` are priced at ``INF``.
    """
    S, T = sorted(S), sorted(T)
    if not S:
        raise ValueError("winner set must be non-empty")
    if len(T) != total_demand(market, S):
        raise ValueError(f"|T| = {len(T)} but the winners demand {total_demand(market, S)}")
    if len(set(T)) != len(T) or not all(0 <= j < market.m for j in T):
        raise ValueError("T must hold distinct item indices in range")
    if max_demand is None:
        max_demand = max(market.demands)
    if max(market.demand(i) for i in S) > max_demand:
        raise ValueError("a winner's demand exceeds max_demand")

    allocation, owner = monotone_allocation(market, S, T)
    ell = len(T)
    window_start = max(0, ell - 2 * max_demand)
    losers = find_loser(market, S)
    last = S[-1]
    anchors = [s for s in range(ell) if owner[s] == last] if len(S) > 1 else [None]
    q = [market.items[j].quality for j in T]

    best = None
    for k in anchors:
        res = solve(_anchor_program(market, T, owner, window_start, k, losers))
        if not res.optimal:
            continue
        p = [None] * ell
        p[window_start:] = res.x
        for s in range(window_start - 1, -1, -1):
            p[s] = market.buyers[owner[s]].value * (q[s] - q[s + 1]) + p[s + 1]
        prices = [INF] * market.m
        for s, j in enumerate(T):
            prices[j] = p[s]
        outcome = Outcome(prices, allocation)
        if verify and find_envy(market, outcome) is not None:
            log.debug("anchor %s for S=%s T=%s fails verification", k, S, T)
            continue
        rev = revenue(outcome)
        if best is None or rev > best.revenue:
            best = Solution(outcome, rev, None if k is None else T[k], frozenset(S), tuple(T))
    return best


@dataclass(frozen=True)
class DlpTable:
    """Dynamic program for the items sold below the LP window.

    ``opt[a][b]`` is the best weighted quality sum choosing ``a`` of the first
    ``b`` items (``None`` where ``b < a``), with the ``a``-th pick weighted by
    ``a * w[a] - (a - 1) * w[a - 1]``.  ``weights[a]`` is the value of the
    buyer receiving the ``a``-th sold item, ``weights[0] = 0``.  ``chosen``
    is the optimal item set.
    """

    opt: tuple
    take: tuple
    weights: tuple
    chosen: tuple


def dlp_table(market: Market, S, J, max_demand: int) -> DlpTable:
    S, J = sorted(S), sorted(J)
    ell = total_demand(market, S)
    if len(J) != 2 * max_demand:
        raise ValueError(f"the window must hold 2*max_demand = {2 * max_demand} items")
    size = ell - 2 * max_demand
    if size <= 0:
        raise ValueError("the dynamic program needs winner demand above 2*max_demand")
    j1 = J[0]
    if j1 < size:
        raise ValueError(f"only {j1} items precede J but {size} are needed")
    owners = [i for i in S for _ in range(market.demand(i))]
    w = [Fraction(0)] + [market.buyers[owners[a]].value for a in range(size)]
    coef = [None] + [a * w[a] - (a - 1) * w[a - 1] for a in range(1, size + 1)]
    q = market.qualities
    opt = [[Fraction(0)] * (j1 + 1)] + [[None] * (j1 + 1) for _ in range(size)]
    take = [[False] * (j1 + 1) for _ in range(size + 1)]
    for a in range(1, size + 1):
        for b in range(a, j1 + 1):
            skip = opt[a][b - 1]
            use = opt[a - 1][b - 1]
            use = None if use is None else use + coef[a] * q[b - 1]
            if use is not None and (skip is None or use > skip):
                opt[a][b], take[a][b] = use, True
            else:
                opt[a][b] = skip
    chosen = []
    a, b = size, j1
    while a > 0:
        if take[a][b]:
            chosen.append(b - 1)
            a -= 1
        b -= 1
    return DlpTable(tuple(map(tuple, opt)), tuple(map(tuple, take)), tuple(w),
                    tuple(sorted(chosen)))


def solve_dlp(market: Market, S, J, max_demand: int) -> Optional[Solution]:
    """Choose the items below ``J`` that maximize revenue, then price them."""
    table = dlp_table(market, S, J, max_demand)
    return max_revenue(market, S, list(table.chosen) + sorted(J), max_demand)


@dataclass(frozen=True)
class EFResult:
    outcome: Outcome
    revenue: Fraction
    solution: Optional[Solution] = None
    n_candidates: int = 0


def _sweep_one(args):
    """All item windows for one candidate set; returns (records, best)."""
    market, S, max_demand, budget = args
    m = market.m
    ell = total_demand(market, S)
    records, best = [], None
    if ell <= 2 * max_demand:
        if math.comb(m, ell) > budget:
            raise BudgetExceeded(f"C({m}, {ell}) item windows exceed budget {budget}")
        windows = itertools.combinations(range(m), ell)
    else:
        size = ell - 2 * max_demand
        if math.comb(m - size, 2 * max_demand) > budget:
            raise BudgetExceeded(f"C({m - size}, {2 * max_demand}) item windows exceed budget {budget}")
        windows = itertools.combinations(range(size, m), 2 * max_demand)
    for J in windows:
        if ell <= 2 * max_demand:
            sol = max_revenue(market, S, J, max_demand)
        else:
            size = ell - 2 * max_demand
            probe = list(range(J[0] - size, J[0])) + list(J)
            sol = max_revenue(market, S, probe, max_demand, verify=False)
            if sol is not None:
                sol = solve_dlp(market, S, J, max_demand)
        rev = sol.revenue if sol is not None else Fraction(0)
        records.append({"winners": sorted(S), "window": list(J), "revenue": rev})
        if sol is not None and (best is None or sol.revenue > best.revenue):
            best = sol
    return records, best


def solve_ef(market: Market, max_demand: Optional[int] = None, budget: Optional[int] = None,
             jobs: Optional[int] = None, on_record: Optional[Callable] = None) -> EFResult:
    """Revenue-maximizing envy-free outcome for demands bounded by ``max_demand``.

    ``on_record`` receives one dict per (winner set, item window) with the
    revenue found there.  ``jobs > 1`` spreads candidate sets over processes;
    the result does not depend on it.
    """
    if max_demand is None:
        max_demand = max(market.demands, default=1)
    if any(d > max_demand for d in market.demands):
        raise ValueError(f"some demand exceeds the bound max_demand = {max_demand}")
    if budget is None:
        budget = default_budget()

    cands = enumerate_candidate_sets(market)
    tasks = [(market, S, max_demand, budget) for S in cands]
    if jobs and jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_sweep_one, tasks))
    else:
        results = [_sweep_one(t) for t in tasks]

    best = None
    for records, sol in results:
        if on_record is not None:
            for rec in records:
                on_record(rec)
        # strict improvement keeps the earliest candidate on ties
        if sol is not None and sol.revenue > 0 and (best is None or sol.revenue > best.revenue):
            best = sol
    if best is None:
        return EFResult(Outcome.empty(market.n, market.m), Fraction(0), None, len(cands))
    return EFResult(best.outcome, best.revenue, best, len(cands))
