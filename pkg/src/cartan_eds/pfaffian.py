"""Linear Pfaffian systems: linearity, tableau and torsion at a point, Cauchy data.

Convention: after reducing modulo the theta's,

    d theta^a = sum A^a_{e i} pi^e ^ omega^i + sum_{i<j} T^a_{ij} omega^i ^ omega^j

where pi runs over every coframe symbol that is neither theta nor omega.
"""

import random
from dataclasses import dataclass, field, replace
from fractions import Fraction

from .errors import MissingAssignment, NoIntegralElement
from .forms import Form, ext_d, evaluate, interior_product, point_values
from .linalg import left_nullspace, nullspace, rank, solve
from .poly import ScalarPoly, as_fraction
from .tableau import Tableau, delta_generators, prolong

SIGN_CONVENTION = "d theta = +A pi^omega + T omega^omega (mod theta)"


@dataclass(frozen=True)
class PfaffianSystem:
    """Ideal generated by the theta-block, independence form from the omega-block.

    ``relations`` holds extra evaluated 1-forms that vanish on integral
    elements (added by restriction); ``hints`` suggests values for
    variables a later prolongation introduces.
    """

    rules: object
    point: dict = None
    name: str = ""
    relations: tuple = ()
    hints: dict = field(default=None, compare=False)

    @property
    def decl(self):
        return self.rules.decl

    @property
    def thetas(self):
        return self.decl.block("theta")

    @property
    def omegas(self):
        return self.decl.block("omega")

    @property
    def pis(self):
        return [i for i, t in enumerate(self.decl.tags) if t not in ("theta", "omega")]

    def generators(self):
        return [Form.symbol(self.decl, self.decl.names[i]) for i in self.thetas]

    def independence(self):
        return Form.basis(self.decl, *(self.decl.names[i] for i in self.omegas))

    def with_point(self, point):
        return replace(self, point=dict(point) if point is not None else None)

    def resolve_point(self, point=None):
        p = point if point is not None else self.point
        if p is None:
            return None
        return {k: as_fraction(v) for k, v in p.items()}


def sample_point(sys, seed=0, lo=-3, hi=3):
    """Random small-integer point, keeping any values the system already fixes."""
    rng = random.Random(seed)
    base = sys.resolve_point() or {}
    return {v: base.get(v, Fraction(rng.randint(lo, hi))) for v in sys.decl.variables}


def _reduced_differentials(sys):
    drop = set(sys.thetas)
    out = []
    for a in sys.thetas:
        d = ext_d(Form.symbol(sys.decl, sys.decl.names[a]), sys.rules)
        out.append({m: c for m, c in d.terms.items() if not drop.intersection(m)})
    return out


def check_linear(sys):
    """(is_linear, offending) where offending lists (theta, pi_a, pi_b, coefficient)."""
    pis = set(sys.pis)
    names = sys.decl.names
    bad = []
    for a, terms in zip(sys.thetas, _reduced_differentials(sys)):
        for m, c in terms.items():
            if len(m) == 2 and m[0] in pis and m[1] in pis:
                bad.append((names[a], names[m[0]], names[m[1]], c))
    return not bad, bad


def frobenius_check(sys):
    """True when every d theta vanishes modulo the theta's alone."""
    return all(not terms for terms in _reduced_differentials(sys))


@dataclass
class TableauExtract:
    """Tableau and torsion of a linear Pfaffian system.

    ``A_sym[e][a][i]`` and ``T_sym[a][(i, j)]`` are polynomials (positions
    refer to the theta/omega/pi blocks of ``system``); the evaluated
    counterparts at ``point`` feed all rank decisions.
    """

    system: object
    A_sym: list
    T_sym: list
    point: dict = None
    A_val: list = None
    T_val: list = None
    tableau: Tableau = None
    relations_L: list = None
    relations_c: list = None
    torsion_shift: list = None

    @property
    def n(self):
        return len(self.system.omegas)

    @property
    def s(self):
        return len(self.system.thetas)

    def pi_matrix(self, e):
        return self.A_val[e]

    def reconstruct(self):
        """Rebuild each d theta^a (mod theta) from A and T as Forms."""
        sys = self.system
        decl = sys.decl
        names = decl.names
        out = []
        for a in range(self.s):
            f = Form.zero(decl)
            for e, pe in enumerate(sys.pis):
                for i, oi in enumerate(sys.omegas):
                    c = self.A_sym[e][a][i]
                    if c:
                        f = f + Form.basis(decl, names[pe], names[oi]) * c
            for (i, j), c in self.T_sym[a].items():
                f = f + Form.basis(decl, names[sys.omegas[i]], names[sys.omegas[j]]) * c
            out.append(f)
        return out


def extract_tableau_torsion(sys, point=None, symbolic_only=False):
    """Split each reduced d theta^a into its pi^omega and omega^omega parts.

    Raises ``UnsupportedSystem`` when pi^pi terms are present.
    """
    from .errors import UnsupportedSystem

    ok, bad = check_linear(sys)
    if not ok:
        raise UnsupportedSystem(f"system is not linear Pfaffian: {len(bad)} pi^pi terms")
    decl = sys.decl
    nv = decl.nvars
    zero = ScalarPoly(nv)
    pos_o = {x: i for i, x in enumerate(sys.omegas)}
    pos_p = {x: e for e, x in enumerate(sys.pis)}
    s, n, r = len(sys.thetas), len(sys.omegas), len(sys.pis)
    A = [[[zero] * n for _ in range(s)] for _ in range(r)]
    T = [dict() for _ in range(s)]
    for a, terms in enumerate(_reduced_differentials(sys)):
        for (x, y), c in terms.items():
            if x in pos_o and y in pos_o:
                T[a][(pos_o[x], pos_o[y])] = c
            elif x in pos_p:
                A[pos_p[x]][a][pos_o[y]] = c
            else:
                A[pos_p[y]][a][pos_o[x]] = -c
    ex = TableauExtract(sys, A, T)
    if symbolic_only:
        return ex
    pt = sys.resolve_point(point)
    if pt is None:
        needed = set()
        for mats in A:
            for row in mats:
                for c in row:
                    needed.update(c.variables())
        for row in T:
            for c in row.values():
                needed.update(c.variables())
        if needed:
            raise MissingAssignment(decl.variables[min(needed)])
        pt = {}
    vals = point_values(decl, pt, [])
    used = set()
    for mats in A:
        for row in mats:
            for c in row:
                used.update(c.variables())
    for row in T:
        for c in row.values():
            used.update(c.variables())
    for i in used:
        if vals[i] is None:
            raise MissingAssignment(decl.variables[i])
    ex.point = pt
    ex.A_val = [[[c.evaluate(vals) for c in row] for row in mats] for mats in A]
    ex.T_val = [{k: c.evaluate(vals) for k, c in row.items()} for row in T]
    _apply_relations(ex)
    return ex


def _apply_relations(ex):
    """Cut the tableau by the evaluated relations and shift the torsion."""
    sys = ex.system
    n, s, r = ex.n, ex.s, len(sys.pis)
    if not sys.relations:
        ex.tableau = Tableau.span(n, s, ex.A_val)
        ex.torsion_shift = None
        return
    pos_o = {x: i for i, x in enumerate(sys.omegas)}
    pos_p = {x: e for e, x in enumerate(sys.pis)}
    L, C = [], []
    for rel in sys.relations:
        lrow, crow = [Fraction(0)] * r, [Fraction(0)] * n
        for (x,), c in rel.terms.items():
            v = c.constant_value()
            if x in pos_p:
                lrow[pos_p[x]] = v
            elif x in pos_o:
                crow[pos_o[x]] = v
        L.append(lrow)
        C.append(crow)
    ex.relations_L, ex.relations_c = L, C
    ker = nullspace(L, r)
    mats = [_phi(ex.A_val, v, n, s) for v in ker]
    ex.tableau = Tableau.span(n, s, mats)
    # particular pi-values: pi^e = P0[e][j] omega^j with L P0 + C = 0
    P0 = [[Fraction(0)] * n for _ in range(r)]
    for j in range(n):
        x = solve(L, [-row[j] for row in C], r)
        if x is None:
            ex.torsion_shift = "dead"
            return
        for e in range(r):
            P0[e][j] = x[e]
    # contribution of sum_e A^a_{ei} P0^e_j omega^j ^ omega^i to T^a_{ij}
    shift = [dict() for _ in range(s)]
    for a in range(s):
        for i in range(n):
            for j in range(i + 1, n):
                v = sum((ex.A_val[e][a][j] * P0[e][i] - ex.A_val[e][a][i] * P0[e][j]
                         for e in range(r)), Fraction(0))
                if v:
                    shift[a][(i, j)] = v
    ex.torsion_shift = shift


def _phi(A_val, v, n, s):
    return [[sum((v[e] * A_val[e][a][i] for e in range(len(v))), Fraction(0))
             for i in range(n)] for a in range(s)]


def independence_survives(ex):
    return ex.torsion_shift != "dead"


@dataclass
class TorsionClass:
    representative: list
    components: list
    image_basis: list
    zero: bool
    residuals: list = field(default_factory=list)
    residual_keys: list = field(default_factory=list)


def torsion_class(ex, symbolic=True):
    """Class of T in W (x) Lambda^2 V* modulo delta(A (x) V*).

    ``residuals`` are the polynomial equations [T] = 0 obtained by pairing
    T with a reduced basis of the annihilator of the image at the point;
    zero residuals are dropped and the rest ordered by (a, i<j).
    """
    if ex.torsion_shift == "dead":
        raise NoIntegralElement("independence condition is violated by the relations")
    comps, gens = delta_generators(ex.tableau)
    rep = []
    for (a, i, j) in comps:
        v = ex.T_val[a].get((i, j), Fraction(0))
        if ex.torsion_shift:
            v += ex.torsion_shift[a].get((i, j), Fraction(0))
        rep.append(v)
    image = [g for g in gens if any(g)]
    ncomp = len(comps)
    if image:
        zero = rank(image + [rep], ncomp) == rank(image, ncomp)
    else:
        zero = not any(rep)
    tc = TorsionClass(rep, comps, image, zero)
    if not symbolic:
        return tc
    if ex.system.relations:
        return tc
    cols = [[g[k] for g in image] for k in range(ncomp)] if image else [[Fraction(0)]] * ncomp
    lam = left_nullspace(cols, len(cols[0])) if ncomp else []
    nv = ex.system.decl.nvars
    found = []
    for row in lam:
        p = ScalarPoly(nv)
        for k, (a, i, j) in enumerate(comps):
            if row[k]:
                p = p + ex.T_sym[a].get((i, j), ScalarPoly(nv)) * row[k]
        if p:
            lead = next(k for k, x in enumerate(row) if x)
            found.append((lead, p))
    found.sort(key=lambda t: t[0])
    tc.residuals = [p for _, p in found]
    tc.residual_keys = [comps[k] for k, _ in found]
    return tc


def integral_element_dim(sys, point=None):
    """dim A^(1) at the point; raises when the torsion class is nonzero."""
    ex = extract_tableau_torsion(sys, point)
    tc = torsion_class(ex, symbolic=False)
    if not tc.zero:
        raise NoIntegralElement(tc.representative)
    return prolong(ex.tableau).dim


def cauchy_characteristics(sys, point=None):
    """Vectors xi with theta(xi) = 0 and xi _| d theta = 0 mod the theta's, at the point.

    Returns ``(dimension, basis)`` with basis vectors over the dual coframe.
    """
    decl = sys.decl
    N = decl.size
    pt = sys.resolve_point(point) or {}
    thetas = set(sys.thetas)
    rows = []
    for a in sys.thetas:
        row = [Fraction(0)] * N
        row[a] = Fraction(1)
        rows.append(row)
    for terms in _reduced_differentials(sys):
        f = evaluate(Form._raw(decl, terms), pt)
        # xi _| f is linear in xi; collect the coefficient of each non-theta symbol
        per_symbol = {}
        for (x, y), c in f.terms.items():
            v = c.constant_value()
            per_symbol.setdefault(y, [Fraction(0)] * N)[x] += v
            per_symbol.setdefault(x, [Fraction(0)] * N)[y] -= v
        for k, row in sorted(per_symbol.items()):
            if k not in thetas and any(row):
                rows.append(row)
    basis = nullspace(rows, N)
    return len(basis), basis


def verify_cauchy_vector(sys, xi, point=None):
    """Check xi _| theta and xi _| d theta vanish modulo the theta's at the point."""
    pt = sys.resolve_point(point) or {}
    drop = set(sys.thetas)
    for g in sys.generators():
        for f in (g, ext_d(g, sys.rules)):
            h = evaluate(interior_product(xi, f), pt)
            if any(not drop.intersection(m) for m in h.terms):
                return False
    return True
