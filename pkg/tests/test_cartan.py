import json

import pytest

from cartan_eds import catalog, dsl
from cartan_eds.cartan import (STATUS_CAP, STATUS_EMPTY, STATUS_INVOLUTIVE, analyze,
                               generality_text, prolong_system, report_from_json,
                               restrict_by_torsion, vanishing_coefficient_lemma)
from cartan_eds.errors import InvalidRestriction, MustRestrictFirst
from cartan_eds.pfaffian import extract_tableau_torsion, sample_point, torsion_class

SKEW_PAIR = """version 1
coframe
  t1:theta t2:theta w1:omega w2:omega p:pi
structure
  d t1 = p ^ w2
  d t2 = -p ^ w1
  d w1 = 0
  d w2 = 0
  d p = 0
independence
  w1 ^ w2
"""


def summary(rec):
    return (rec.dim_tableau, tuple(rec.characters), rec.cartan_bound, rec.dim_prolongation,
            rec.involutive)


def test_generality_text():
    assert generality_text(0, 0) == "constants (Frobenius)"
    assert generality_text(1, 1) == "1 function of 1 variable"
    assert generality_text(3, 2) == "3 functions of 2 variables"


def test_frobenius_trichotomy():
    for a, b, status in [("y", "x", STATUS_INVOLUTIVE), ("u", "0", STATUS_INVOLUTIVE),
                         ("y", "0", STATUS_EMPTY)]:
        rep = analyze(catalog.build_frobenius_example(a, b))
        assert rep.status == status
        if status == STATUS_INVOLUTIVE:
            assert rep.generality_text == "constants (Frobenius)"
            assert rep.final.characters == (0, 0)


def test_contact_terminates_at_iteration_zero():
    rep = analyze(catalog.build_contact_j1(1, 1))
    assert rep.status == STATUS_INVOLUTIVE
    assert len(rep.iterations) == 1
    assert rep.generality_text == "1 function of 1 variable"


def test_isometric_surface_in_space():
    rep = analyze(catalog.build("isometric-embedding", n=2, r=1))
    assert rep.status == STATUS_INVOLUTIVE
    assert [summary(r) for r in rep.iterations] == [(3, (2, 1), 4, 3, False),
                                                  (2, (2, 0), 2, 2, True)]
    assert rep.iterations[1].restricted
    assert rep.iterations[1].torsion_residuals == [
        "-p_w3_e1_e1*p_w3_e2_e2 + p_w3_e1_e2**2 + R1212"]
    assert rep.generality_text == "2 functions of 1 variable"


def test_cartan_equality_on_involutive_verdicts():
    for name, kw in [("contact", {"n": 3, "s": 2}), ("cauchy-riemann", {}),
                     ("submanifold", {"n": 2, "s": 1}), ("minimal-surface", {"s": 2})]:
        rep = analyze(catalog.build(name, **kw))
        last = rep.final
        assert rep.status == STATUS_INVOLUTIVE
        assert last.dim_prolongation == sum((j + 1) * s for j, s in enumerate(last.characters))
        s_p, p = rep.generality
        assert s_p == last.characters[p - 1] if p else s_p == 0
        assert all(c == 0 for c in last.characters[p:])


def test_iteration_cap():
    rep = analyze(catalog.build("isometric-embedding", n=2, r=1), max_prolongations=0)
    assert rep.status == STATUS_CAP
    assert rep.generality is None


def test_report_is_deterministic_and_round_trips():
    s = catalog.build("cauchy-riemann")
    a, b = analyze(s, seed=7).dumps(), analyze(s, seed=7).dumps()
    assert a == b
    data = json.loads(a)
    assert data["version"] == 1
    back = report_from_json(data)
    assert back.dumps() == a


def test_prolongation_of_contact_and_submanifold():
    c = catalog.build_contact_j1(2, 1)
    p = prolong_system(c)
    assert len(p.decl.variables) - len(c.decl.variables) == 3
    c = catalog.build_contact_j1(3, 2)
    assert len(prolong_system(c).decl.variables) - len(c.decl.variables) == 12
    s = catalog.build_canonical_submanifold(2, 1)
    p = prolong_system(s)
    assert p.decl.variables[-3:] == ("p_w3_w1_w1", "p_w3_w1_w2", "p_w3_w2_w2")
    assert {p.decl.names[i] for i in p.thetas} == {"w3", "w3_w1", "w3_w2"}
    ex = extract_tableau_torsion(p, sample_point(p))
    assert torsion_class(ex).zero


def test_prolongation_of_frobenius_adds_nothing():
    s = catalog.build_frobenius_example("y", "x")
    p = prolong_system(s)
    assert p.decl.variables == s.decl.variables


def test_prolong_requires_zero_torsion():
    s = catalog.build_frobenius_example("y", "0")
    with pytest.raises(MustRestrictFirst):
        prolong_system(s, values={"x": 0, "y": 0, "u": 0})


def test_restriction():
    s = catalog.build_frobenius_example("y", "0")
    pt = {"x": 0, "y": 0, "u": 0}
    res = torsion_class(extract_tableau_torsion(s, pt)).residuals
    assert restrict_by_torsion(s, res, pt).status == STATUS_EMPTY
    s = catalog.build_frobenius_example("x*u", "y")
    pt = {"x": 0, "y": 1, "u": 0}
    res = torsion_class(extract_tableau_torsion(s, pt)).residuals
    r = restrict_by_torsion(s, res, pt)
    assert r.status == STATUS_EMPTY
    assert [f.format() for f in r.relations] == ["dx"]
    with pytest.raises(InvalidRestriction):
        restrict_by_torsion(s, res, {"x": 1, "y": 1, "u": 0})


def test_vanishing_coefficient_lemma():
    assert vanishing_coefficient_lemma(catalog.build("contact", n=2, s=1)).count == 0
    iso = catalog.build("isometric-embedding", n=2, r=1)
    assert vanishing_coefficient_lemma(iso).count == 1
    skew = dsl.load_system(SKEW_PAIR)
    rep = vanishing_coefficient_lemma(skew)
    assert [f.format() for f in rep.forced] == ["p"]
    assert rep.effective.dim == 0
