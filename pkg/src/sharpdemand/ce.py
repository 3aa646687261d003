"""Revenue-maximizing competitive equilibrium for correlated valuations.

Stage 1 walks the value groups from the top, admitting whole groups while
their demand fits the remaining supply and otherwise requiring a subset of
the group that uses the remaining supply exactly.  Stage 2 fixes the
quality-monotone allocation for those winners and maximizes revenue with an
LP whose loser rows are generated lazily by a best-response separation
oracle.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .lp import GE, LE, EQ, LinearProgram, solve, solve_lazy
from .market import Market, Outcome, revenue, value_groups
from .verify import best_response, ce_violation

__all__ = [
    "CEResult",
    "CandidateWinners",
    "TraceStep",
    "solve_ce",
    "stage1",
    "stage2",
    "subset_sum_select",
]

log = logging.getLogger(__name__)

STAGE1_FAILED = "stage1-subset-sum"
LP_INFEASIBLE = "stage2-lp-infeasible"


def subset_sum_select(demands, target: int):
    """Indices of a subset of ``demands`` summing exactly to ``target``.

    Returns a sorted tuple or ``None``.  Among all exact subsets the one
    that includes the earliest possible index at every step is returned.
    """
    n = len(demands)
    if target < 0:
        return None
    # reach[i][t]: some subset of demands[i:] sums to t
    reach = [[False] * (target + 1) for _ in range(n + 1)]
    reach[n][0] = True
    for i in range(n - 1, -1, -1):
        d = demands[i]
        nxt, cur = reach[i + 1], reach[i]
        for t in range(target + 1):
            cur[t] = nxt[t] or (d <= t and nxt[t - d])
    if not reach[0][target]:
        return None
    chosen, t = [], target
    for i in range(n):
        d = demands[i]
        if d <= t and reach[i + 1][t - d]:
            chosen.append(i)
            t -= d
    return tuple(chosen)


@dataclass(frozen=True)
class TraceStep:
    group: int          # 0-based value-group index
    available: int      # items still available when the group is visited
    action: str         # "skip" | "take-all" | "exact-subset" | "no-subset"
    chosen: tuple = ()

    def to_json(self) -> dict:
        return {"group": self.group, "available": self.available,
                "action": self.action, "chosen": list(self.chosen)}


@dataclass(frozen=True)
class CandidateWinners:
    """Stage-1 output.  ``winners`` is ``None`` when no equilibrium can exist."""

    winners: Optional[frozenset]
    trace: tuple = ()

    @property
    def feasible(self) -> bool:
        return self.winners is not None


@dataclass(frozen=True)
class CEResult:
    outcome: Optional[Outcome] = None
    revenue: Optional[Fraction] = None
    reason: Optional[str] = None
    candidates: Optional[CandidateWinners] = None
    cuts: int = 0

    @property
    def exists(self) -> bool:
        return self.outcome is not None


def stage1(market: Market) -> CandidateWinners:
    available = market.m
    winners = set()
    trace = []
    for k, group in enumerate(value_groups(market)):
        fits = [i for i in group if market.demand(i) <= available]
        if not fits:
            trace.append(TraceStep(k, available, "skip"))
            continue
        need = sum(market.demand(i) for i in fits)
        if need > available:
            pick = subset_sum_select([market.demand(i) for i in fits], available)
            if pick is None:
                trace.append(TraceStep(k, available, "no-subset"))
                return CandidateWinners(None, tuple(trace))
            chosen = tuple(fits[p] for p in pick)
            winners.update(chosen)
            trace.append(TraceStep(k, available, "exact-subset", chosen))
            return CandidateWinners(frozenset(winners), tuple(trace))
        winners.update(fits)
        trace.append(TraceStep(k, available, "take-all", tuple(fits)))
        available -= need
    return CandidateWinners(frozenset(winners), tuple(trace))


def greedy_allocation(market: Market, winners) -> tuple:
    """Winners in rank order take the best remaining items, ``d_i`` each."""
    alloc = [frozenset()] * market.n
    nxt = 0
    for i in sorted(winners):
        d = market.demand(i)
        alloc[i] = frozenset(range(nxt, nxt + d))
        nxt += d
    if nxt > market.m:
        raise ValueError(f"winners demand {nxt} items but only {market.m} exist")
    return tuple(alloc)


def _loser_row(market: Market, buyer: int, bundle) -> tuple:
    v = market.buyers[buyer].value
    coeffs = {j: 1 for j in bundle}
    return coeffs, GE, sum(v * market.items[j].quality for j in bundle)


def stage2_program(market: Market, allocation) -> LinearProgram:
    """Revenue LP for a fixed allocation, without the loser rows."""
    m = market.m
    sold = set().union(*allocation) if allocation else set()
    lp = LinearProgram(m, {j: 1 for j in sold}, names=[f"p{j}" for j in range(m)])
    for j in range(m):
        if j not in sold:
            lp.add({j: 1}, EQ, 0, name=f"unsold[{j}]")
    q = market.qualities
    for i, bundle in enumerate(allocation):
        if not bundle:
            continue
        v = market.buyers[i].value
        # individual rationality: the bundle is worth at least its price
        lp.add({j: 1 for j in bundle}, LE, sum(v * q[j] for j in bundle), name=f"ir[{i}]")
        for j in sorted(bundle):
            for j2 in range(m):
                if j2 not in bundle:
                    lp.add({j: 1, j2: -1}, LE, v * (q[j] - q[j2]), name=f"swap[{i}:{j}>{j2}]")
    return lp


def stage2(market: Market, winners, lazy: bool = True) -> CEResult:
    """Price the greedy allocation for ``winners``; ``lazy=False`` materializes
    every loser row up front instead of separating."""
    allocation = greedy_allocation(market, winners)
    lp = stage2_program(market, allocation)
    losers = [i for i in range(market.n) if not allocation[i]]

    if lazy:
        def separate(prices):
            for i in losers:
                d = market.demand(i)
                if d > market.m:
                    continue
                bundle, gain = best_response(market, i, prices, d)
                if gain > 0:
                    return lp.make(*_loser_row(market, i, bundle), name=f"loser[{i}]")
            return None

        res = solve_lazy(lp, separate)
    else:
        for i in losers:
            d = market.demand(i)
            if d > market.m:
                continue
            for bundle in itertools.combinations(range(market.m), d):
                lp.add(*_loser_row(market, i, bundle), name=f"loser[{i}]")
        res = solve(lp)

    if not res.optimal:
        return CEResult(reason=LP_INFEASIBLE, cuts=res.cuts)
    outcome = Outcome(res.x, allocation)
    bad = ce_violation(market, outcome)
    if bad is not None:
        raise RuntimeError(f"stage 2 produced a non-equilibrium: {bad}")
    return CEResult(outcome, revenue(outcome), cuts=res.cuts)


def solve_ce(market: Market) -> CEResult:
    """Decide whether a competitive equilibrium exists and return a
    revenue-maximizing one if it does."""
    cand = stage1(market)
    log.debug("stage 1 trace: %s", [s.to_json() for s in cand.trace])
    if not cand.feasible:
        return CEResult(reason=STAGE1_FAILED, candidates=cand)
    res = stage2(market, cand.winners)
    return CEResult(res.outcome, res.revenue, res.reason, cand, res.cuts)
