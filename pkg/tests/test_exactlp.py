from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import linprog

from ecquery.boolfn import family
from ecquery.exactlp import LinearProgram, LPTooLarge, certify, dual_value, solve_lp
from ecquery.measures import fc_program


def test_simple_min():
    p = LinearProgram([1, 1], [([1, 0], ">=", 1), ([0, 1], ">=", 1)])
    sol = solve_lp(p)
    assert sol.optimal and sol.value == 2
    assert sol.primal == [1, 1]
    assert certify(p, sol)


def test_infeasible():
    p = LinearProgram([1], [([1], ">=", 1), ([1], "<=", 0)])
    assert solve_lp(p).status == "infeasible"


def test_unbounded():
    p = LinearProgram([1, 0], [([1, -1], "<=", 1)], sense="max")
    assert solve_lp(p).status == "unbounded"


def test_max_with_fraction():
    p = LinearProgram([1, 1], [([2, 1], "<=", 2), ([1, 2], "<=", 2)], sense="max")
    sol = solve_lp(p)
    assert sol.value == Fraction(4, 3)
    assert certify(p, sol)
    assert dual_value(p, sol.dual) == Fraction(4, 3)


def test_lower_bounds_and_equalities():
    p = LinearProgram([1, 2], [({0: 1, 1: 1}, "=", 3)], lower=[1, 1])
    sol = solve_lp(p)
    assert sol.value == 4 and sol.primal == [2, 1]
    assert certify(p, sol)


def test_negative_rhs_rows():
    p = LinearProgram([1, 1], [([-1, -1], "<=", -3), ([1, 0], "<=", 1)])
    sol = solve_lp(p)
    assert sol.value == 3 and certify(p, sol)


def test_fc_program_or2():
    sol = solve_lp(fc_program(family("OR", 2), 0))
    assert sol.value == 2 and sol.primal == [1, 1]


def test_empty_program():
    sol = solve_lp(LinearProgram([0, 0], []))
    assert sol.value == 0


def test_certify_rejects_wrong_duals():
    p = LinearProgram([1, 1], [([1, 0], ">=", 1), ([0, 1], ">=", 1)])
    sol = solve_lp(p)
    sol.dual = [Fraction(1), Fraction(0)]
    assert not certify(p, sol)


def test_too_large():
    p = LinearProgram([1] * 2001, [({j: 1 for j in range(2001)}, ">=", 1)] * 500)
    with pytest.raises(LPTooLarge):
        solve_lp(p)


def test_bad_input():
    with pytest.raises(ValueError):
        LinearProgram([1], [([1, 2], ">=", 1)])
    with pytest.raises(ValueError):
        LinearProgram([1], [([1], "<", 1)])
    with pytest.raises(ValueError):
        LinearProgram([1], sense="minimise")


small = st.integers(-3, 3)


@settings(max_examples=150)
@given(
    st.integers(1, 4),
    st.integers(1, 4),
    st.data(),
)
def test_matches_scipy_and_certifies(nv, m, data):
    c = data.draw(st.lists(st.integers(0, 4), min_size=nv, max_size=nv))
    rows = [data.draw(st.lists(small, min_size=nv, max_size=nv)) for _ in range(m)]
    rels = [data.draw(st.sampled_from(["<=", ">=", "="])) for _ in range(m)]
    rhs = [data.draw(small) for _ in range(m)]
    # box keeps the program bounded
    cons = list(zip(rows, rels, rhs)) + [([1 if j == k else 0 for j in range(nv)], "<=", 5) for k in range(nv)]
    sense = data.draw(st.sampled_from(["min", "max"]))
    p = LinearProgram(c, cons, sense=sense)
    sol = solve_lp(p)

    A_ub, b_ub, A_eq, b_eq = [], [], [], []
    for row, rel, b in cons:
        if rel == "<=":
            A_ub.append(row), b_ub.append(b)
        elif rel == ">=":
            A_ub.append([-a for a in row]), b_ub.append(-b)
        else:
            A_eq.append(row), b_eq.append(b)
    sign = 1 if sense == "min" else -1
    ref = linprog(
        sign * np.array(c, dtype=float),
        A_ub=A_ub or None,
        b_ub=b_ub or None,
        A_eq=A_eq or None,
        b_eq=b_eq or None,
        bounds=(0, None),
        method="highs",
    )
    if ref.status == 2:
        assert sol.status == "infeasible"
    else:
        assert ref.status == 0
        assert sol.optimal
        assert abs(float(sol.value) - sign * ref.fun) < 1e-7
        assert certify(p, sol)
