"""Exact rational linear programming.

A two-phase primal simplex on a dense ``Fraction`` tableau with Bland's
pivoting rule, so it always terminates and never rounds.  ``solve_lazy``
wraps it in a cutting-plane loop: solve, ask a separation callback for one
violated row, add it, repeat.
"""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .market import as_rational

__all__ = [
    "LE", "EQ", "GE",
    "Constraint",
    "LinearProgram",
    "LazyLoopError",
    "LpResult",
    "Status",
    "solve",
    "solve_lazy",
]

log = logging.getLogger(__name__)

LE, EQ, GE = "<=", "==", ">="
_SENSES = (LE, EQ, GE)
_ZERO = Fraction(0)
_ONE = Fraction(1)


class LazyLoopError(RuntimeError):
    """The separation callback proposed a row the LP already contains."""


@dataclass(frozen=True)
class Constraint:
    coeffs: tuple
    sense: str
    rhs: Fraction
    name: Optional[str] = None

    def key(self):
        return (self.coeffs, self.sense, self.rhs)

    def lhs(self, x: Sequence) -> Fraction:
        return sum((a * v for a, v in zip(self.coeffs, x) if a), _ZERO)

    def satisfied(self, x: Sequence) -> bool:
        lhs = self.lhs(x)
        if self.sense == LE:
            return lhs <= self.rhs
        if self.sense == GE:
            return lhs >= self.rhs
        return lhs == self.rhs


class LinearProgram:
    """``max`` (or ``min``) ``objective . x`` subject to linear rows.

    Parameters
    ----------
    n_vars : int
        Number of variables.
    objective : sequence or dict, optional
        Dense coefficients or ``{index: coeff}``; zero if omitted.
    maximize : bool
        Sense of the objective.
    lower : sequence, optional
        Per-variable lower bounds; ``None`` marks a free variable.  Defaults
        to all zeros.
    """

    def __init__(self, n_vars: int, objective=None, maximize: bool = True,
                 lower=None, names=None):
        if n_vars < 0:
            raise ValueError("n_vars must be non-negative")
        self.n_vars = n_vars
        self.maximize = maximize
        self.objective = self._dense(objective if objective is not None else {})
        if lower is None:
            lower = [_ZERO] * n_vars
        if len(lower) != n_vars:
            raise ValueError(f"expected {n_vars} lower bounds, got {len(lower)}")
        self.lower = [None if b is None else as_rational(b) for b in lower]
        self.names = list(names) if names is not None else [f"x{i}" for i in range(n_vars)]
        self.constraints: list = []

    def _dense(self, coeffs) -> tuple:
        if isinstance(coeffs, dict):
            out = [_ZERO] * self.n_vars
            for i, a in coeffs.items():
                if not 0 <= i < self.n_vars:
                    raise ValueError(f"variable index {i} out of range")
                out[i] += as_rational(a)
            return tuple(out)
        coeffs = tuple(as_rational(a) for a in coeffs)
        if len(coeffs) != self.n_vars:
            raise ValueError(
                f"coefficient vector has length {len(coeffs)}, expected {self.n_vars}")
        return coeffs

    def make(self, coeffs, sense: str, rhs, name=None) -> Constraint:
        if sense not in _SENSES:
            raise ValueError(f"unknown relation {sense!r}")
        return Constraint(self._dense(coeffs), sense, as_rational(rhs), name)

    def add(self, coeffs, sense: str, rhs, name=None) -> Constraint:
        row = self.make(coeffs, sense, rhs, name)
        self.constraints.append(row)
        return row

    def copy(self) -> "LinearProgram":
        other = LinearProgram(self.n_vars, self.objective, self.maximize,
                              list(self.lower), self.names)
        other.constraints = list(self.constraints)
        return other

    def violated(self, x: Sequence) -> list:
        bad = [c for c in self.constraints if not c.satisfied(x)]
        for i, b in enumerate(self.lower):
            if b is not None and x[i] < b:
                bad.append(Constraint(tuple(_ONE if k == i else _ZERO
                                            for k in range(self.n_vars)), GE, b, "bound"))
        return bad

    def dump(self) -> str:
        """Human-readable listing, one row per line."""
        def term_list(coeffs):
            parts = [f"{a} {self.names[i]}" for i, a in enumerate(coeffs) if a]
            return " + ".join(parts) if parts else "0"

        lines = [("max: " if self.maximize else "min: ") + term_list(self.objective)]
        for k, c in enumerate(self.constraints):
            label = c.name or f"c{k}"
            lines.append(f"  {label}: {term_list(c.coeffs)} {c.sense} {c.rhs}")
        for i, b in enumerate(self.lower):
            lines.append(f"  {self.names[i]} {'free' if b is None else '>= ' + str(b)}")
        return "\n".join(lines)


class Status(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LpResult:
    status: Status
    x: Optional[tuple] = None
    objective: Optional[Fraction] = None
    cuts: int = 0

    @property
    def optimal(self) -> bool:
        return self.status is Status.OPTIMAL


class _Tableau:
    """Rows ``T[r] . y = b[r]`` with ``basis[r]`` the basic column of row r."""

    def __init__(self, rows, rhs, basis, n_cols):
        self.T = rows
        self.b = rhs
        self.basis = basis
        self.n_cols = n_cols

    def pivot(self, r: int, c: int, cost: list) -> None:
        T, b = self.T, self.b
        row = T[r]
        piv = row[c]
        if piv != 1:
            inv = 1 / piv
            row = [a * inv if a else a for a in row]
            T[r] = row
            b[r] *= inv
        nz = [k for k, a in enumerate(row) if a]
        br = b[r]
        for s in range(len(T)):
            if s == r:
                continue
            other = T[s]
            f = other[c]
            if f:
                for k in nz:
                    other[k] -= f * row[k]
                b[s] -= f * br
        f = cost[c]
        if f:
            for k in nz:
                cost[k] -= f * row[k]
            cost[-1] -= f * br
        self.basis[r] = c

    def reduced_costs(self, c: list) -> list:
        """Reduced cost row for maximizing ``c . y``; last entry is ``-z``."""
        d = list(c) + [_ZERO]
        for r, col in enumerate(self.basis):
            cb = c[col]
            if cb:
                row = self.T[r]
                for k, a in enumerate(row):
                    if a:
                        d[k] -= cb * a
                d[-1] -= cb * self.b[r]
        return d

    def run(self, cost: list, allowed: int) -> bool:
        """Bland's rule; returns False if unbounded.  Columns >= allowed never enter."""
        T, b = self.T, self.b
        while True:
            enter = -1
            for k in range(allowed):
                if cost[k] > 0:
                    enter = k
                    break
            if enter < 0:
                return True
            best_r, best_ratio = -1, None
            for r, row in enumerate(T):
                a = row[enter]
                if a > 0:
                    ratio = b[r] / a
                    if (best_ratio is None or ratio < best_ratio
                            or (ratio == best_ratio and self.basis[r] < self.basis[best_r])):
                        best_r, best_ratio = r, ratio
            if best_r < 0:
                return False
            self.pivot(best_r, enter, cost)


def solve(lp: LinearProgram) -> LpResult:
    """Solve ``lp`` exactly.

    Returns an :class:`LpResult` whose status is OPTIMAL (with the assignment
    and objective value), INFEASIBLE or UNBOUNDED.
    """
    n = lp.n_vars
    # variable substitution: x_i = lower_i + y  or  x_i = y+ - y-
    colmap = []
    n_struct = 0
    for b in lp.lower:
        if b is None:
            colmap.append((n_struct, n_struct + 1))
            n_struct += 2
        else:
            colmap.append((n_struct,))
            n_struct += 1

    prepared = []
    for con in lp.constraints:
        if len(con.coeffs) != n:
            raise ValueError("constraint dimension does not match the program")
        coeffs = [_ZERO] * n_struct
        rhs = con.rhs
        for i, a in enumerate(con.coeffs):
            if not a:
                continue
            cols = colmap[i]
            coeffs[cols[0]] += a
            if len(cols) == 2:
                coeffs[cols[1]] -= a
            else:
                rhs -= a * lp.lower[i]
        sense = con.sense
        if rhs < 0:
            coeffs = [-a for a in coeffs]
            rhs = -rhs
            sense = {LE: GE, GE: LE, EQ: EQ}[sense]
        if not any(coeffs):
            # constant row: either trivially true or the program is infeasible
            ok = (rhs == 0) if sense == EQ else (0 <= rhs if sense == LE else 0 >= rhs)
            if not ok:
                return LpResult(Status.INFEASIBLE)
            continue
        prepared.append((coeffs, sense, rhs))

    n_slack = sum(1 for _, s, _ in prepared if s != EQ)
    n_art = sum(1 for _, s, _ in prepared if s != LE)
    n_cols = n_struct + n_slack + n_art
    rows, rhs_col, basis = [], [], []
    slack_at, art_at = n_struct, n_struct + n_slack
    art_cols = []
    for coeffs, sense, rhs in prepared:
        row = coeffs + [_ZERO] * (n_slack + n_art)
        if sense == LE:
            row[slack_at] = _ONE
            basis.append(slack_at)
            slack_at += 1
        else:
            if sense == GE:
                row[slack_at] = -_ONE
                slack_at += 1
            row[art_at] = _ONE
            basis.append(art_at)
            art_cols.append(art_at)
            art_at += 1
        rows.append(row)
        rhs_col.append(rhs)

    tab = _Tableau(rows, rhs_col, basis, n_cols)
    first_art = n_struct + n_slack

    if art_cols:
        phase1 = [_ZERO] * first_art + [-_ONE] * n_art
        cost = tab.reduced_costs(phase1)
        tab.run(cost, n_cols)
        if -cost[-1] < 0:
            return LpResult(Status.INFEASIBLE)
        # drive zero-valued artificials out of the basis, dropping redundant rows
        r = 0
        while r < len(tab.T):
            if tab.basis[r] >= first_art:
                row = tab.T[r]
                col = next((k for k in range(first_art) if row[k]), -1)
                if col < 0:
                    del tab.T[r], tab.b[r], tab.basis[r]
                    continue
                tab.pivot(r, col, [_ZERO] * (n_cols + 1))
            r += 1
        tab.T = [row[:first_art] for row in tab.T]
        tab.n_cols = first_art

    c = [_ZERO] * first_art
    sign = 1 if lp.maximize else -1
    for i, a in enumerate(lp.objective):
        if a:
            cols = colmap[i]
            c[cols[0]] += sign * a
            if len(cols) == 2:
                c[cols[1]] -= sign * a
    cost = tab.reduced_costs(c)
    if not tab.run(cost, first_art):
        return LpResult(Status.UNBOUNDED)

    y = [_ZERO] * first_art
    for r, col in enumerate(tab.basis):
        y[col] = tab.b[r]
    x = []
    for i, cols in enumerate(colmap):
        if len(cols) == 2:
            x.append(y[cols[0]] - y[cols[1]])
        else:
            x.append(lp.lower[i] + y[cols[0]])
    x = tuple(x)
    bad = lp.violated(x)
    if bad:
        raise RuntimeError(f"simplex returned an infeasible point; first violated row: {bad[0]}")
    value = sum((a * v for a, v in zip(lp.objective, x) if a), _ZERO)
    return LpResult(Status.OPTIMAL, x, value)


def solve_lazy(lp: LinearProgram, separate: Callable, max_rounds: Optional[int] = None) -> LpResult:
    """Cutting-plane loop around :func:`solve`.

    ``separate(x)`` returns ``None`` when ``x`` satisfies the implicit
    constraint family, otherwise one violated row as a :class:`Constraint`
    or a ``(coeffs, sense, rhs)`` tuple.  Termination is the caller's
    obligation: the family must be finite.  The base program should be
    bounded on its own; an UNBOUNDED intermediate result is returned as is.
    """
    work = lp.copy()
    seen = {c.key() for c in work.constraints}
    cuts = 0
    while True:
        res = solve(work)
        if not res.optimal:
            return LpResult(res.status, cuts=cuts)
        cut = separate(res.x)
        if cut is None:
            return LpResult(res.status, res.x, res.objective, cuts)
        if not isinstance(cut, Constraint):
            cut = work.make(*cut)
        if cut.key() in seen:
            raise LazyLoopError(f"separation returned a row already present: {cut}")
        if cut.satisfied(res.x):
            raise LazyLoopError(f"separation returned a row the point satisfies: {cut}")
        seen.add(cut.key())
        work.constraints.append(cut)
        cuts += 1
        log.debug("lazy cut %d: %s", cuts, cut)
        if max_rounds is not None and cuts > max_rounds:
            raise LazyLoopError(f"no convergence after {max_rounds} cuts")
