from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from delegation.solvers import EQ, GE, LE, LinearProgram, LpStatus, intersect_hyperplanes, solve_lp


def test_bounded_one_dimensional():
    lp = LinearProgram([1])
    lp.add([1], LE, 3)
    out = solve_lp(lp)
    assert out.status is LpStatus.OPTIMAL and out.value == 3 and out.x == [3]


def test_unbounded():
    assert solve_lp(LinearProgram([1])).status is LpStatus.UNBOUNDED


def test_infeasible():
    lp = LinearProgram([1])
    lp.add([1], LE, 1)
    lp.add([1], GE, 2)
    assert solve_lp(lp).status is LpStatus.INFEASIBLE


def test_free_and_shifted_variables():
    # max -|x - 2| style: max -t s.t. t >= x - 2, t >= 2 - x, x free, x >= ... via lower None
    lp = LinearProgram([0, -1], lower=[None, None])
    lp.add([1, -1], LE, 2)
    lp.add([-1, -1], LE, -2)
    out = solve_lp(lp)
    assert out.value == 0 and out.x[0] == 2
    lp = LinearProgram([-1], lower=[Fraction(5, 2)])
    assert solve_lp(lp).x == [Fraction(5, 2)]


def test_equality_and_redundant_rows():
    lp = LinearProgram([1, 1])
    lp.add([1, 1], EQ, 1)
    lp.add([2, 2], EQ, 2)
    lp.add({0: 1}, LE, Fraction(1, 3))
    out = solve_lp(lp)
    assert out.value == 1 and lp.is_feasible(out.x)


def test_dimension_mismatch():
    lp = LinearProgram([1, 1])
    lp.add([1], LE, 1)
    with pytest.raises(ValueError):
        solve_lp(lp)


def test_deterministic_vertex():
    lp = LinearProgram([1, 1])
    lp.add([1, 1], LE, 1)
    assert solve_lp(lp).x == solve_lp(lp).x


def test_intersections():
    assert intersect_hyperplanes([([1], 1)]) == [1]
    assert intersect_hyperplanes([([1, -1], 0), ([1, 1], 2)]) == [1, 1]
    assert intersect_hyperplanes([([1, 0], 0), ([1, 0], 1)]) is None
    with pytest.raises(ValueError):
        intersect_hyperplanes([([1], 0), ([1], 1)])


small = st.fractions(min_value=-3, max_value=3, max_denominator=4)


@st.composite
def random_lp(draw):
    n = draw(st.integers(1, 4))
    m = draw(st.integers(1, 4))
    A = [[draw(small) for _ in range(n)] for _ in range(m)]
    b = [draw(st.fractions(min_value=0, max_value=3, max_denominator=4)) for _ in range(m)]
    c = [draw(small) for _ in range(n)]
    return A, b, c


@given(random_lp())
def test_strong_duality(data):
    # primal: max c.x, Ax <= b, x >= 0 (feasible at 0); dual: min b.y, A^T y >= c, y >= 0
    A, b, c = data
    primal = LinearProgram(c)
    for row, bi in zip(A, b):
        primal.add(row, LE, bi)
    p = solve_lp(primal)
    dual = LinearProgram([-v for v in b])
    for j in range(len(c)):
        dual.add([A[i][j] for i in range(len(A))], GE, c[j])
    d = solve_lp(dual)
    if p.status is LpStatus.UNBOUNDED:
        assert d.status is LpStatus.INFEASIBLE
    else:
        assert p.status is LpStatus.OPTIMAL and d.status is LpStatus.OPTIMAL
        assert p.value == -d.value
        assert primal.is_feasible(p.x) and dual.is_feasible(d.x)


@given(st.integers(1, 4).flatmap(lambda k: st.lists(
    st.tuples(st.lists(st.integers(-3, 3), min_size=k, max_size=k), st.integers(-5, 5)), min_size=k, max_size=k)))
def test_intersection_satisfies_equations(planes):
    q = intersect_hyperplanes(planes)
    if q is not None:
        for coeffs, rhs in planes:
            assert sum(a * x for a, x in zip(coeffs, q)) == rhs
