from fractions import Fraction

import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from cartan_eds.linalg import determinant, in_span, left_nullspace, nullspace, rank, rref, solve


@st.composite
def matrices(draw, max_rows=5, max_cols=5):
    r = draw(st.integers(1, max_rows))
    c = draw(st.integers(1, max_cols))
    return [[Fraction(draw(st.integers(-3, 3))) for _ in range(c)] for _ in range(r)], c


def test_rref_known():
    rows, piv = rref([[2, 4, 0], [1, 2, 1]])
    assert piv == [0, 2] or tuple(piv) == (0, 2)
    assert rows[0] == [1, 2, 0]


def test_solve_inconsistent():
    assert solve([[1, 1], [2, 2]], [1, 3], 2) is None
    assert solve([[1, 1], [1, -1]], [2, 0], 2) == [1, 1]


@settings(max_examples=200)
@given(matrices())
def test_rank_nullspace_against_sympy(mc):
    m, c = mc
    M = sympy.Matrix(m)
    assert rank(m, c) == M.rank()
    ns = nullspace(m, c)
    assert len(ns) == c - M.rank()
    for v in ns:
        assert all(sum(a * b for a, b in zip(row, v)) == 0 for row in m)
    for v in left_nullspace(m, c):
        assert all(sum(v[i] * m[i][j] for i in range(len(m))) == 0 for j in range(c))


@settings(max_examples=200)
@given(matrices(4, 4))
def test_determinant_and_span(mc):
    m, c = mc
    if len(m) == c:
        assert determinant(m) == sympy.Matrix(m).det()
    assert all(in_span(row, m, c) for row in m)
