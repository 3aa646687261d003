"""Revenue-maximizing pricing for markets with sharp multi-unit demand.

Buyers value items at ``value * quality`` and buy exactly their demand or
nothing.  The package finds envy-free and competitive-equilibrium prices,
certifies outcomes, and includes exhaustive reference solvers.
"""
from .ce import CEResult, solve_ce
from .ef import EFResult, enumerate_candidate_sets, max_revenue, solve_dlp, solve_ef
from .estimators import BruteForcePricer, CompetitiveEquilibriumPricer, EnvyFreePricer, check_market
from .market import (INF, BudgetExceeded, Buyer, InvalidOutcome, Item, Market, Outcome,
                     ValidationError, canonicalize, revenue, utility)
from .oracle import brute_ce, brute_ef_max, x3c_brute
from .verify import (GeneralValuation, ce_violation, find_envy, is_competitive_equilibrium,
                     is_envy_free, over_priced_items)

__version__ = "0.1.0"

__all__ = [
    "INF", "BruteForcePricer", "BudgetExceeded", "Buyer", "CEResult",
    "CompetitiveEquilibriumPricer", "EFResult", "EnvyFreePricer", "GeneralValuation",
    "InvalidOutcome", "Item", "Market", "Outcome", "ValidationError", "brute_ce",
    "brute_ef_max", "canonicalize", "ce_violation", "check_market",
    "enumerate_candidate_sets", "find_envy", "is_competitive_equilibrium", "is_envy_free",
    "max_revenue", "over_priced_items", "revenue", "solve_ce", "solve_dlp", "solve_ef",
    "utility", "x3c_brute",
]
