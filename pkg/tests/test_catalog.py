import pytest

from cartan_eds import catalog
from cartan_eds.cartan import STATUS_INVOLUTIVE, analyze
from cartan_eds.forms import mc_check
from cartan_eds.pfaffian import check_linear, extract_tableau_torsion, sample_point
from cartan_eds.tableau import Tableau, cartan_test, msubset_check, prolong

ALL = [("frobenius", {}), ("frobenius", {"A_expr": "u", "B_expr": "0"}),
       ("contact", {"n": 1, "s": 1}), ("contact", {"n": 3, "s": 2}),
       ("cauchy-riemann", {}), ("submanifold", {"n": 2, "s": 1}),
       ("submanifold", {"n": 3, "s": 1}), ("minimal-surface", {"s": 1}),
       ("minimal-surface", {"s": 2}),
       ("isometric-embedding", {"n": 2, "r": 1}),
       ("isometric-embedding", {"n": 2, "r": 1, "curvature_mode": "flat"}),
       ("isometric-embedding", {"n": 3, "r": 3, "curvature_mode": "flat"})]


def tableau_of(s):
    return extract_tableau_torsion(s, s.point or sample_point(s)).tableau


@pytest.mark.parametrize("name,params", ALL)
def test_catalog_systems_are_consistent_and_linear(name, params):
    s = catalog.build(name, **params)
    assert mc_check(s.rules) == []
    assert check_linear(s)[0]


def test_curved_three_fold_only_flags_curvature_variables():
    # dR keeps only the rotation terms, so d(dR) = 0 fails at order R^2
    s = catalog.build("isometric-embedding", n=3, r=3)
    bad = mc_check(s.rules)
    assert bad and all(b.startswith("R") for b in bad)
    assert check_linear(s)[0]


def test_unknown_entry():
    with pytest.raises(KeyError):
        catalog.build("nope")


def test_frobenius_builder_shape():
    s = catalog.build_frobenius_example("y", "x")
    assert len(s.decl.variables) == 3
    assert (len(s.thetas), len(s.omegas), len(s.pis)) == (1, 2, 0)


def test_contact_fixtures():
    rep = analyze(catalog.build_contact_j1(1, 1))
    assert rep.final.characters == (1,)
    assert rep.generality_text == "1 function of 1 variable"
    res = cartan_test(tableau_of(catalog.build_contact_j1(2, 1)))
    assert tuple(res.characters) == (1, 1) and res.dim_prolongation == 3
    assert prolong(tableau_of(catalog.build_contact_j1(3, 2))).dim == 12


def test_cauchy_riemann_fixture():
    s = catalog.build_cauchy_riemann()
    rep = analyze(s)
    assert rep.status == STATUS_INVOLUTIVE
    assert rep.final.characters == (2, 0)
    assert msubset_check(tableau_of(s))


def test_submanifold_fixtures():
    rep = analyze(catalog.build("submanifold", n=2, s=1))
    assert rep.status == STATUS_INVOLUTIVE
    assert rep.final.characters == (2, 1)
    assert rep.final.dim_prolongation == 4
    assert rep.generality_text == "1 function of 2 variables"


def test_minimal_surface_blocks_match_cauchy_riemann():
    s = catalog.build_minimal_surface_system(1)
    A = tableau_of(s)
    rows = [i for i in range(A.s) if any(m[i][j] for m in A.basis for j in range(A.n))]
    assert len(rows) == 2
    # flip the sign of the second row to match the Cauchy-Riemann display
    block = Tableau.span(2, 2, [[m[rows[0]], [-x for x in m[rows[1]]]] for m in A.basis])
    cr = tableau_of(catalog.build_cauchy_riemann())
    assert all(block.contains(m) for m in cr.basis) and block.dim == cr.dim
    for k, chars in [(1, (2, 0)), (2, (4, 0))]:
        res = cartan_test(tableau_of(catalog.build_minimal_surface_system(k)))
        assert tuple(res.characters) == chars
        assert res.dim_prolongation == 2 * k


def test_curvature_parameters():
    for n, count in [(2, 1), (3, 6), (4, 20)]:
        names, _ = catalog.curvature_parameters(n)
        assert len(names) == n * n * (n * n - 1) // 12 == count


def test_isometric_stage_one():
    for n, r, chars in [(2, 1, (2, 1)), (3, 3, (5, 4, 3))]:
        res = cartan_test(tableau_of(catalog.build_isometric_embedding(n, r)))
        assert res.dim_tableau == n * r + n * (n - 1) // 2
        assert res.dim_prolongation == r * n * (n + 1) // 2
        assert tuple(res.characters) == chars
        assert not res.involutive
