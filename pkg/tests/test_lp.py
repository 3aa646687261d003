import itertools
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from sharpdemand.lp import (EQ, GE, LE, LazyLoopError, LinearProgram, Status, solve,
                            solve_lazy)


def test_textbook_maximum():
    lp = LinearProgram(2, [3, 5])
    lp.add({0: 1}, LE, 4)
    lp.add({1: 2}, LE, 12)
    lp.add({0: 3, 1: 2}, LE, 18)
    res = solve(lp)
    assert res.optimal and res.objective == 36 and res.x == (2, 6)


def test_interval_example():
    # max p s.t. p <= 25, p >= 15
    lp = LinearProgram(1, [1])
    lp.add({0: 1}, LE, 25)
    lp.add({0: 1}, GE, 15)
    res = solve(lp)
    assert res.optimal and res.x == (25,)


def test_infeasible_and_unbounded():
    lp = LinearProgram(1, [1])
    lp.add({0: 1}, GE, 3)
    lp.add({0: 1}, LE, 2)
    assert solve(lp).status is Status.INFEASIBLE
    lp = LinearProgram(2, [1, 1])
    lp.add({0: 1, 1: -1}, LE, 1)
    assert solve(lp).status is Status.UNBOUNDED


def test_free_and_shifted_variables():
    lp = LinearProgram(2, [1, 1], maximize=False, lower=[None, 2])
    lp.add({0: 1}, GE, -3)
    res = solve(lp)
    assert res.optimal and res.x == (-3, 2) and res.objective == -1


def test_equality_and_fractions():
    lp = LinearProgram(2, [1, 0])
    lp.add({0: 3, 1: 1}, EQ, 1)
    res = solve(lp)
    assert res.x == (Fraction(1, 3), 0)


def test_degenerate_redundant_rows():
    lp = LinearProgram(2, [1, 1])
    for _ in range(3):
        lp.add({0: 1, 1: 1}, EQ, 2)
    lp.add({0: 1}, LE, 2)
    res = solve(lp)
    assert res.optimal and res.objective == 2


def test_lazy_matches_eager_and_rejects_repeats():
    pool = [({0: 1, 1: 1}, LE, 5), ({0: 1}, LE, 3), ({1: 2}, LE, 7)]
    eager = LinearProgram(2, [2, 1])
    for row in pool:
        eager.add(*row)
    base = LinearProgram(2, [2, 1])
    base.add({0: 1, 1: 1}, LE, 10)

    def separate(x):
        for coeffs, sense, rhs in pool:
            if sum(a * x[i] for i, a in coeffs.items()) > rhs:
                return coeffs, sense, rhs
        return None

    lazy = solve_lazy(base, separate)
    assert lazy.objective == solve(eager).objective == 8
    assert lazy.cuts >= 1
    with pytest.raises(LazyLoopError):
        solve_lazy(base, lambda x: ({0: 1, 1: 1}, LE, 10))


def _vertex_optimum(n, rows, upper, objective):
    """Best objective over vertices: every nonsingular choice of n tight
    hyperplanes among the rows and the box faces."""
    planes = [(c, r) for c, _, r in rows]
    for i in range(n):
        e = [0] * n
        e[i] = 1
        planes += [(e, 0), (e, upper)]
    best = None
    for pick in itertools.combinations(planes, n):
        A = sympy.Matrix([list(c) for c, _ in pick])
        if A.det() == 0:
            continue
        sol = A.LUsolve(sympy.Matrix([r for _, r in pick]))
        x = [Fraction(int(v.p), int(v.q)) for v in sol]
        if any(v < 0 or v > upper for v in x):
            continue
        ok = all((sum(a * v for a, v in zip(c, x)) <= r) if s == LE else
                 (sum(a * v for a, v in zip(c, x)) >= r) if s == GE else
                 (sum(a * v for a, v in zip(c, x)) == r) for c, s, r in rows)
        if ok:
            val = sum(a * v for a, v in zip(objective, x))
            best = val if best is None else max(best, val)
    return best


coef = st.integers(-3, 3)


@given(st.integers(1, 3).flatmap(lambda n: st.tuples(
    st.just(n),
    st.lists(coef, min_size=n, max_size=n),
    st.lists(st.tuples(st.lists(coef, min_size=n, max_size=n),
                       st.sampled_from([LE, GE, EQ]), st.integers(-4, 8)),
             min_size=0, max_size=4))))
def test_simplex_matches_vertex_enumeration(case):
    n, objective, rows = case
    upper = 5
    lp = LinearProgram(n, objective)
    for c, s, r in rows:
        lp.add(c, s, r)
    for i in range(n):
        lp.add({i: 1}, LE, upper)
    res = solve(lp)
    expected = _vertex_optimum(n, rows, upper, objective)
    if expected is None:
        assert res.status is Status.INFEASIBLE
    else:
        assert res.optimal and res.objective == expected
        assert not lp.violated(res.x)
