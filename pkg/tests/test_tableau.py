import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from cartan_eds.errors import GenericityFailure
from cartan_eds.tableau import (Tableau, cartan_test, characters, msubset_check, prolong,
                                random_invertible)

from helpers import tableaux


def brute_force_prolongation_dim(n, s, basis):
    """dim of {X in W (x) S^2 V* : X(., ., v) in A for all v}, by a direct kernel computation.

    Unknowns: X[a][i][j] (all n*n*s entries, not yet symmetric) and
    coefficients c[j][k] expressing the slice X[.][.][j] in the spanning set.
    """
    k = len(basis)
    nx = s * n * n
    ncols = nx + n * k

    def xi(a, i, j):
        return (a * n + i) * n + j

    rows = []
    for a in range(s):
        for i in range(n):
            for j in range(n):
                if i < j:
                    r = [0] * ncols
                    r[xi(a, i, j)] = 1
                    r[xi(a, j, i)] = -1
                    rows.append(r)
                r = [0] * ncols
                r[xi(a, i, j)] = 1
                for m in range(k):
                    r[nx + j * k + m] = -basis[m][a][i]
                rows.append(r)
    M = sympy.Matrix(rows)
    kernel = M.nullspace()
    if not kernel:
        return 0
    proj = sympy.Matrix.hstack(*[v[:nx, 0] for v in kernel])
    return proj.rank()


def cauchy_riemann():
    return Tableau(2, 2, [[[1, 0], [0, 1]], [[0, -1], [1, 0]]])


def test_cauchy_riemann_tableau():
    A = cauchy_riemann()
    res = cartan_test(A)
    assert tuple(res.characters) == (2, 0)
    assert res.dim_prolongation == 2
    assert res.involutive


def test_full_tableau_characters():
    for n in range(1, 5):
        for s in range(1, 4):
            res = cartan_test(Tableau.full(n, s))
            assert tuple(res.characters) == (s,) * n
            assert res.dim_prolongation == s * n * (n + 1) // 2
            assert res.involutive


def test_diagonal_tableau():
    B = Tableau(2, 2, [[[1, 0], [0, 0]], [[0, 0], [0, 1]]])
    res = cartan_test(B)
    assert tuple(res.characters) == (2, 0)
    assert res.dim_prolongation == 2 and res.involutive


def test_non_involutive_identity_span():
    res = cartan_test(Tableau(2, 2, [[[1, 0], [0, 1]]]))
    assert tuple(res.characters) == (1, 0)
    assert res.dim_prolongation == 0
    assert not res.involutive


def test_msubset_on_small_tableaux():
    assert not msubset_check(Tableau.full(2, 1))
    # each W slot of the Cauchy-Riemann prolongation is trace-free
    assert msubset_check(cauchy_riemann())


def test_json_round_trip():
    A = cauchy_riemann()
    B = Tableau.from_json(A.to_json())
    assert B.flat_rows() == A.flat_rows()


def test_span_drops_dependent():
    A = Tableau.span(2, 1, [[[1, 1]], [[2, 2]], [[0, 0]]])
    assert A.dim == 1
    with pytest.raises(ValueError):
        Tableau(2, 1, [[[1, 1]], [[2, 2]]])


def test_characters_deterministic_in_seed():
    A = cauchy_riemann()
    assert characters(A, 5, 3) == characters(A, 5, 3)


@settings(max_examples=200)
@given(tableaux())
def test_cartan_inequality_against_brute_force(t):
    n, s, basis = t
    A = Tableau.span(n, s, basis)
    res = cartan_test(A)
    assert res.dim_prolongation == brute_force_prolongation_dim(n, s, A.basis)
    assert res.dim_prolongation <= res.bound
    assert sum(res.characters) == A.dim
    assert list(res.characters) == sorted(res.characters, reverse=True)


@settings(max_examples=200)
@given(tableaux(), st.integers(0, 10**6))
def test_basis_change_invariance(t, seed):
    n, s, basis = t
    A = Tableau.span(n, s, basis)
    rng = random.Random(seed)
    B = A.change_basis(random_invertible(n, rng), random_invertible(s, rng))
    ra, rb = cartan_test(A), cartan_test(B)
    assert rb.dim_tableau == ra.dim_tableau
    assert rb.dim_prolongation == ra.dim_prolongation
    assert rb.involutive == ra.involutive
    assert tuple(rb.characters) == tuple(ra.characters)
