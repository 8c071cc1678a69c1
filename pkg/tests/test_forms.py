from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cartan_eds.errors import DeclarationMismatch, DegenerateIdeal, IncompleteRules
from cartan_eds.forms import (CoframeDecl, Form, StructureRules, change_coframe, evaluate,
                              ext_d, interior_product, mc_check, reduce_mod)

from helpers import consistent_rules, flat_rules, forms, polys, small

RULES = consistent_rules()


def test_wedge_signs():
    r = flat_rules(3)
    a, b, c = (Form.symbol(r.decl, n) for n in ("dx0", "dx1", "dx2"))
    assert a ^ b == -(b ^ a)
    assert not (a ^ a)
    assert (c ^ a ^ b).coefficient("dx0", "dx1", "dx2") == 1
    assert (b ^ a ^ c).coefficient("dx0", "dx1", "dx2") == -1


def test_exterior_derivative_of_coordinates():
    r = flat_rules(2)
    x0 = Form.scalar(r.decl, r.decl.var("x0"))
    x1 = Form.scalar(r.decl, r.decl.var("x1"))
    f = x0 * x0 * x1
    df = ext_d(f, r)
    assert df.coefficient("dx0") == r.decl.poly(2) * r.decl.var("x0") * r.decl.var("x1")
    assert not ext_d(df, r)


def test_missing_rule_and_mismatch():
    decl = CoframeDecl(("a", "b"), ("theta", "omega"))
    r = StructureRules(decl, {"a": Form.zero(decl)}, {})
    with pytest.raises(IncompleteRules):
        ext_d(Form.symbol(decl, "b"), r)
    other = flat_rules(2).decl
    with pytest.raises(DeclarationMismatch):
        Form.symbol(decl, "a") + Form.symbol(other, "dx0")


def test_rule_degree_validation():
    decl = CoframeDecl(("a",), ("omega",))
    with pytest.raises(ValueError):
        StructureRules(decl, {"a": Form.symbol(decl, "a")}, {})


def test_mc_check_flags_inconsistent_rules():
    decl = CoframeDecl(("w1", "w2", "w3"), ("omega",) * 3)
    w1, w2, w3 = (Form.symbol(decl, n) for n in decl.names)
    r = StructureRules(decl, {"w1": w1 ^ w2, "w2": w2 ^ w3, "w3": Form.zero(decl)}, {})
    assert mc_check(r) == ["w1"]
    good = StructureRules(decl, {"w1": w2 ^ w3, "w2": w3 ^ w1, "w3": w1 ^ w2}, {})
    assert mc_check(good) == []
    for rules in RULES:
        assert mc_check(rules) == []


def test_reduce_mod_and_degenerate_ideal():
    r = flat_rules(3)
    d0, d1, d2 = (Form.symbol(r.decl, n) for n in r.decl.names)
    g = d0 - d1
    assert reduce_mod(d0 ^ d2, [g]) == reduce_mod(d1 ^ d2, [g])
    with pytest.raises(DegenerateIdeal):
        reduce_mod(d2, [g, g * 2])
    x = r.decl.var("x0")
    with pytest.raises(DegenerateIdeal):
        reduce_mod(d2, [d0 * x + d1, d1], point={"x0": 0, "x1": 0, "x2": 0})


def test_change_coframe_keeps_d_squared_zero():
    r = RULES[1]
    decl = r.decl
    theta = decl.names[decl.block("theta")[0]]
    omega = decl.names[decl.block("omega")[0]]
    rest = Form.symbol(decl, omega) * decl.var(decl.variables[0])
    new = change_coframe(r, {theta: ("th", "theta", rest)})
    assert "th" in new.decl.names
    assert mc_check(new) == []


@st.composite
def rules_and_forms(draw, k=1):
    rules = draw(st.sampled_from(RULES))
    return (rules,) + tuple(draw(forms(rules.decl)) for _ in range(k))


@settings(max_examples=200)
@given(rules_and_forms(2))
def test_graded_anticommutativity(data):
    _, a, b = data
    for p in a.degrees:
        for q in b.degrees:
            ap = Form._raw(a.decl, {m: c for m, c in a.terms.items() if len(m) == p})
            bq = Form._raw(b.decl, {m: c for m, c in b.terms.items() if len(m) == q})
            assert (ap ^ bq) == (bq ^ ap) * (-1) ** (p * q)


@settings(max_examples=200)
@given(rules_and_forms(1))
def test_d_squared_is_zero(data):
    rules, a = data
    assert not ext_d(ext_d(a, rules), rules)


@settings(max_examples=200)
@given(st.sampled_from(RULES).flatmap(
    lambda r: st.tuples(st.just(r), st.integers(0, 2), st.integers(0, 2)).flatmap(
        lambda t: st.tuples(st.just(t[0]), forms(t[0].decl, t[1]), forms(t[0].decl, t[2])))))
def test_leibniz(data):
    rules, a, b = data
    p = a.degrees[0] if a.degrees else 0
    lhs = ext_d(a ^ b, rules)
    rhs = (ext_d(a, rules) ^ b) + (a ^ ext_d(b, rules)) * (-1) ** p
    assert lhs == rhs


@settings(max_examples=200)
@given(st.sampled_from(RULES).flatmap(
    lambda r: st.tuples(st.just(r), forms(r.decl), forms(r.decl), st.sampled_from(
        [n for n, t in zip(r.decl.names, r.decl.tags) if t == "theta" or t == "omega"]))))
def test_reduce_mod_idempotent_and_absorbing(data):
    rules, a, c, name = data
    g = [Form.symbol(rules.decl, name)]
    red = reduce_mod(a, g)
    assert reduce_mod(red, g) == red
    assert reduce_mod(a + (g[0] ^ c), g) == red


@settings(max_examples=200)
@given(st.sampled_from(RULES).flatmap(
    lambda r: st.tuples(st.just(r), forms(r.decl, 2), forms(r.decl, 1),
                        st.lists(small, min_size=r.decl.size, max_size=r.decl.size))))
def test_interior_product_antiderivation(data):
    rules, a, b, v = data
    lhs = interior_product(v, a ^ b)
    rhs = (interior_product(v, a) ^ b) + (a ^ interior_product(v, b))
    assert lhs == rhs
    assert not interior_product(v, interior_product(v, a ^ b))


@settings(max_examples=200)
@given(rules_and_forms(2), st.lists(st.integers(-3, 3), min_size=9, max_size=9))
def test_evaluation_is_a_homomorphism(data, vals):
    rules, a, b = data
    pt = dict(zip(rules.decl.variables, vals))
    assert evaluate(a ^ b, pt) == evaluate(a, pt) ^ evaluate(b, pt)


@settings(max_examples=200)
@given(rules_and_forms(1))
def test_format_parses_back(data):
    from cartan_eds.dsl import _FormEval, parse_expr
    rules, a = data
    assert _FormEval(rules.decl)(parse_expr(a.format())) == a
