"""Shared builders and hypothesis strategies for the test suite."""

from fractions import Fraction
from itertools import combinations

from hypothesis import strategies as st

from cartan_eds import catalog
from cartan_eds.forms import CoframeDecl, Form, StructureRules
from cartan_eds.poly import ScalarPoly

small = st.fractions(min_value=-3, max_value=3, max_denominator=3)


def flat_rules(n=3):
    """Coordinates x_i with coframe dx_i on R^n."""
    names = tuple(f"dx{i}" for i in range(n))
    xs = tuple(f"x{i}" for i in range(n))
    decl = CoframeDecl(names, ("omega",) * n, xs)
    return StructureRules(decl, {m: Form.zero(decl) for m in names},
                          {x: Form.symbol(decl, m) for x, m in zip(xs, names)})


def consistent_rules():
    """A few rule sets with d(d xi) = 0 identically."""
    return [flat_rules(3), catalog.build("contact", n=2, s=1).rules,
            catalog.build("submanifold", n=2, s=1).rules]


@st.composite
def polys(draw, nvars, max_terms=3, max_deg=2):
    terms = {}
    for _ in range(draw(st.integers(0, max_terms))):
        e = tuple(draw(st.integers(0, max_deg)) if nvars else 0 for _ in range(nvars))
        terms[e] = draw(small)
    return ScalarPoly(nvars, terms)


@st.composite
def forms(draw, decl, degree=None, max_terms=3):
    p = draw(st.integers(0, min(decl.size, 3))) if degree is None else degree
    monos = list(combinations(range(decl.size), p))
    out = {}
    for _ in range(draw(st.integers(0, max_terms))):
        m = draw(st.sampled_from(monos))
        out[m] = draw(polys(decl.nvars))
    return Form(decl, out)


@st.composite
def tableaux(draw, max_n=4, max_s=4):
    """Random tableau: a span of small integer s x n matrices."""
    n = draw(st.integers(1, max_n))
    s = draw(st.integers(1, max_s))
    k = draw(st.integers(1, min(6, n * s)))
    entry = st.integers(-2, 2)
    basis = [[[Fraction(draw(entry)) for _ in range(n)] for _ in range(s)] for _ in range(k)]
    return n, s, basis


ACCEPTANCE_LINES = []


def record(number, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok
