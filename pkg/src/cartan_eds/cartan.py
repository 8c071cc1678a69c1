"""The involutivity loop: torsion, restriction, Cartan's test, prolongation."""

import json
import random
from dataclasses import dataclass, field, replace
from fractions import Fraction

from .errors import (
    EDSError,
    InvalidRestriction,
    MustRestrictFirst,
    NonUnitPivot,
    UnsupportedSystem,
)
from .forms import (
    Form,
    change_coframe,
    evaluate,
    ext_d,
    extend_rules,
    point_values,
    row_reduce_one_forms,
)
from .linalg import nullspace, rank, rref, solve, span_basis
from .pfaffian import (
    SIGN_CONVENTION,
    PfaffianSystem,
    check_linear,
    extract_tableau_torsion,
    independence_survives,
    torsion_class,
)
from .poly import ScalarPoly
from .tableau import Tableau, annihilator, cartan_test, delta_generators, prolong, sym_pairs

REPORT_VERSION = 1

STATUS_INVOLUTIVE = "involutive"
STATUS_EMPTY = "no-integral-manifolds"
STATUS_CAP = "iteration-cap-reached"


def _frac_str(x):
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def generality_text(s_p, p):
    if not s_p:
        return "constants (Frobenius)"
    fn = "function" if s_p == 1 else "functions"
    var = "variable" if p == 1 else "variables"
    return f"{s_p} {fn} of {p} {var}"


@dataclass
class IterationRecord:
    dim_tableau: int
    characters: tuple
    cartan_bound: int
    dim_prolongation: int
    torsion_residuals: list
    involutive: bool
    restricted: bool = False
    note: str = ""

    def to_json(self):
        return {
            "dim_tableau": self.dim_tableau,
            "characters": list(self.characters),
            "cartan_bound": self.cartan_bound,
            "dim_prolongation": self.dim_prolongation,
            "torsion_residuals": list(self.torsion_residuals),
            "involutive": self.involutive,
            "restricted": self.restricted,
            "note": self.note,
        }


@dataclass
class AnalysisReport:
    iterations: list
    status: str
    generality: tuple = None
    seed: int = 0
    point: dict = None
    system: object = field(default=None, repr=False)

    @property
    def final(self):
        return self.iterations[-1] if self.iterations else None

    @property
    def generality_text(self):
        if self.generality is None:
            return None
        return generality_text(*self.generality)

    def to_json(self):
        gen = None
        if self.generality is not None:
            gen = {"s_p": self.generality[0], "p": self.generality[1],
                   "text": self.generality_text}
        return {
            "version": REPORT_VERSION,
            "iterations": [r.to_json() for r in self.iterations],
            "status": self.status,
            "generality": gen,
            "seed": self.seed,
            "point": {k: _frac_str(v) for k, v in sorted((self.point or {}).items())},
            "sign_convention": SIGN_CONVENTION,
        }

    def dumps(self):
        return json.dumps(self.to_json(), sort_keys=True, indent=2)


def report_from_json(data):
    if data.get("version") != REPORT_VERSION:
        raise ValueError(f"unsupported report version {data.get('version')!r}")
    its = [IterationRecord(r["dim_tableau"], tuple(r["characters"]), r["cartan_bound"],
                           r["dim_prolongation"], list(r["torsion_residuals"]), r["involutive"],
                           r.get("restricted", False), r.get("note", ""))
           for r in data["iterations"]]
    gen = data.get("generality")
    return AnalysisReport(its, data["status"], (gen["s_p"], gen["p"]) if gen else None,
                          data.get("seed", 0),
                          {k: Fraction(v) for k, v in data.get("point", {}).items()})


# prolongation


def _fresh(name, used):
    out, k = name, 2
    while out in used:
        out = f"{name}_{k}"
        k += 1
    used.add(out)
    return out


def _absorbing_solution(ex):
    """Polynomial Y0[a][i][j] with Y0_ji - Y0_ij + T_ij = 0 and slices in A.

    Only possible in closed form when the tableau is constant; returns
    ``None`` when the torsion vanishes identically.
    """
    if all(not row for row in ex.T_sym):
        return None
    for mats in ex.A_sym:
        for row in mats:
            for c in row:
                if not c.is_constant():
                    raise UnsupportedSystem(
                        "absorbing torsion with a non-constant tableau is unsupported")
    A = ex.tableau
    comps, gens = delta_generators(A)
    n, s = A.n, A.s
    # generator (m, j) realizes Y = B_m (x) v^j; its delta has entries B[a][i] d_jk - B[a][k] d_ji,
    # which equals Y_ik - Y_ki, so the absorbing combination solves delta(Y) = T
    ncols = len(gens)
    G = [[gens[c][k] for c in range(ncols)] for k in range(len(comps))]
    _, colpiv = rref(G, ncols) if G else ([], [])
    GC = [[row[c] for c in colpiv] for row in G]
    _, rowpiv = rref([[GC[k][q] for k in range(len(comps))] for q in range(len(colpiv))],
                     len(comps)) if colpiv else ([], [])
    sub = [GC[k] for k in rowpiv]
    kk = len(colpiv)
    inv = []
    for q in range(kk):
        x = solve(sub, [Fraction(int(q == k)) for k in range(kk)], kk)
        inv.append(x)
    nv = ex.system.decl.nvars
    zero = ScalarPoly(nv)
    T_vec = [ex.T_sym[a].get((i, j), zero) for (a, i, j) in comps]
    coeff = {}
    for idx, c in enumerate(colpiv):
        p = zero
        for q, k in enumerate(rowpiv):
            w = inv[q][idx]
            if w:
                p = p + T_vec[k] * w
        coeff[c] = p
    # check exactness of the solution map
    for k in range(len(comps)):
        acc = zero
        for c, p in coeff.items():
            if G[k][c]:
                acc = acc + p * G[k][c]
        if acc != T_vec[k]:
            raise UnsupportedSystem("torsion cannot be absorbed identically")
    Y0 = [[[zero] * n for _ in range(n)] for _ in range(s)]
    for c, p in coeff.items():
        m, j = divmod(c, n)
        B = A.basis[m]
        for a in range(s):
            for i in range(n):
                if B[a][i]:
                    Y0[a][i][j] = Y0[a][i][j] + p * B[a][i]
    return Y0


def prolong_system(sys, ex=None, values=None, seed=0):
    """Add the integral-element coordinates as new variables and new theta's.

    The new 1-forms are theta^a_i = sum_e A^a_{ei} pi^e - (p + Y0)^a_{ij} omega^j
    with p ranging over A^(1) and Y0 absorbing the torsion.  ``values``
    assigns the new variables at the point; missing ones come from the
    system hints, else from seeded small integers.
    """
    if ex is None:
        ex = extract_tableau_torsion(sys)
    if sys.relations:
        raise UnsupportedSystem("prolongation of a restricted system is not supported")
    tc = torsion_class(ex, symbolic=False)
    if not tc.zero:
        raise MustRestrictFirst("torsion class is nonzero at the point")
    decl = sys.decl
    names = decl.names
    P = prolong(ex.tableau)
    Y0 = _absorbing_solution(ex)
    s, n = ex.s, ex.n
    used = set(decl.names) | set(decl.variables)
    coords = P.coords
    new_vars = []
    for f in P.free:
        a, i, j = coords[f]
        new_vars.append(_fresh(f"p_{names[sys.thetas[a]]}_{names[sys.omegas[i]]}_{names[sys.omegas[j]]}", used))
    new_syms = [_fresh("d" + v, used) for v in new_vars]

    def dcoframe(D):
        return {d: Form.zero(D) for d in new_syms}

    def dscalar(D):
        return {v: Form.symbol(D, d) for v, d in zip(new_vars, new_syms)}

    rules = extend_rules(sys.rules, [(d, "pi") for d in new_syms], new_vars, dcoframe, dscalar)
    D = rules.decl
    nv = D.nvars
    tvars = [D.var(v) for v in new_vars]
    tensors = P.tensors()
    forms, labels = [], []
    for a in range(s):
        for i in range(n):
            f = Form.zero(D)
            for e, pe in enumerate(sys.pis):
                c = ex.A_sym[e][a][i]
                if c:
                    f = f + Form.symbol(D, names[pe]) * c.extend(nv)
            for j in range(n):
                coef = ScalarPoly(nv)
                for k, X in enumerate(tensors):
                    if X[a][i][j]:
                        coef = coef + tvars[k] * X[a][i][j]
                if Y0 is not None and Y0[a][i][j]:
                    coef = coef + Y0[a][i][j].extend(nv)
                if coef:
                    f = f - Form.symbol(D, names[sys.omegas[j]]) * coef
            forms.append(f)
            labels.append(f"{names[sys.thetas[a]]}_{names[sys.omegas[i]]}")
    candidates = ([x for x in sys.pis if decl.tags[x] == "pi"]
                  + [x for x in sys.pis if decl.tags[x] != "pi"])
    try:
        reduced = row_reduce_one_forms(forms, candidates, with_origin=True)
    except NonUnitPivot as err:
        left = err.leftover
        if all(m[0] in set(sys.omegas) for m in left.terms):
            raise UnsupportedSystem(
                "prolongation forces a relation among the independence forms") from None
        raise UnsupportedSystem("non-constant prolongation unsupported") from None
    one = ScalarPoly.const(nv, 1)
    repl = {}
    for lead, g, origin in reduced:
        rest = Form._raw(D, {m: -c for m, c in g.terms.items() if m != (lead,)})
        repl[D.names[lead]] = (_fresh(labels[origin], used), "theta", rest)
    new_rules = change_coframe(rules, repl)
    # point for the new variables
    rng = random.Random(seed)
    hints = dict(sys.hints or {})
    if values:
        hints.update(values)
    point = dict(sys.resolve_point() or {})
    for v in new_vars:
        point[v] = Fraction(hints[v]) if v in hints else Fraction(rng.randint(-3, 3))
    out = PfaffianSystem(new_rules, point, sys.name, (), sys.hints)
    _assert_old_thetas_closed(sys, out)
    return out


def _assert_old_thetas_closed(old, new):
    D = new.decl
    drop = set(new.thetas)
    for a in old.thetas:
        d = ext_d(Form.symbol(D, D.names[a]), new.rules)
        rest = Form._raw(D, {m: c for m, c in d.terms.items() if not drop.intersection(m)})
        if rest and evaluate(rest, new.point):
            raise EDSError(f"d{D.names[a]} does not vanish modulo the prolonged ideal")


# restriction


@dataclass
class Restriction:
    system: object
    relations: list
    status: str = "ok"
    note: str = ""


def restrict_by_torsion(sys, residuals, point=None):
    """Restrict to the zero locus of the torsion residuals at a point on it.

    Each residual is differentiated; the resulting 1-forms, reduced modulo
    the theta's and evaluated, become linear relations that cut the
    tableau.  Reports an empty locus or a dead independence condition.
    """
    decl = sys.decl
    pt = sys.resolve_point(point) or {}
    for r in residuals:
        if r.is_constant() and r:
            return Restriction(sys, [], STATUS_EMPTY, "constant nonzero torsion residual")
    vals = None
    for r in residuals:
        used = r.variables()
        vals = point_values(decl, pt, used)
        if r.evaluate(vals):
            raise InvalidRestriction("point is not on the torsion zero locus")
    drop = set(sys.thetas)
    rels = []
    for r in residuals:
        d = ext_d(Form.scalar(decl, r), sys.rules)
        d = Form._raw(decl, {m: c for m, c in d.terms.items() if not drop.intersection(m)})
        d = evaluate(d, pt)
        if d:
            rels.append(d)
    new = replace(sys, relations=tuple(sys.relations) + tuple(rels), point=pt)
    ex = extract_tableau_torsion(new)
    if not independence_survives(ex):
        return Restriction(new, rels, STATUS_EMPTY, "independence condition dies on the locus")
    return Restriction(new, rels)


def project_point(sys, residuals, point=None):
    """Move the point onto the residual zero locus by a linear solve.

    One variable is chosen per residual among those appearing linearly,
    preferring constant coefficients and then the most recently declared
    variables; all other variables keep their values.
    """
    decl = sys.decl
    pt = dict(sys.resolve_point(point) or {})
    chosen = []
    for r in residuals:
        best = None
        for v in sorted(r.variables(), reverse=True):
            if v in chosen or r.degree_in(v) != 1:
                continue
            if any(e[v] and any(e[c] for c in chosen) for e in r.terms):
                continue
            score = (r.diff(v).is_constant(), v)
            if best is None or score > best[0]:
                best = (score, v)
        if best is None:
            raise InvalidRestriction("residual is not linear in any free variable")
        chosen.append(best[1])
    fixed = {i: pt[decl.variables[i]] for i in range(decl.nvars)
             if i not in chosen and decl.variables[i] in pt}
    rows, rhs = [], []
    for r in residuals:
        q = r.subs(fixed)
        row = [Fraction(0)] * len(chosen)
        const = Fraction(0)
        for e, c in q.terms.items():
            deg = [k for k, x in enumerate(e) if x]
            if not deg:
                const += c
            elif len(deg) == 1 and e[deg[0]] == 1 and deg[0] in chosen:
                row[chosen.index(deg[0])] += c
            else:
                raise InvalidRestriction("residuals are not jointly linear in the solved variables")
        rows.append(row)
        rhs.append(-const)
    x = solve(rows, rhs, len(chosen))
    if x is None:
        raise InvalidRestriction("torsion locus has no point over the fixed values")
    for v, val in zip(chosen, x):
        pt[decl.variables[v]] = val
    return pt


# vanishing coefficients


@dataclass
class VanishingReport:
    forced: list
    effective: Tableau
    dim_tableau: int

    @property
    def count(self):
        return len(self.forced)


def vanishing_coefficient_lemma(sys, point=None):
    """pi-combinations that vanish on every integral element.

    The slices of A^(1) span a subspace of A; tableau directions outside it
    are forced to zero, and the corresponding pi-combinations can join the
    ideal.  The effective tableau is the span of the slices.
    """
    ex = extract_tableau_torsion(sys, point)
    A = ex.tableau
    P = prolong(A)
    n, s = A.n, A.s
    slices = []
    for X in P.tensors():
        for i in range(n):
            slices.append([[X[a][i][j] for j in range(n)] for a in range(s)])
    eff = Tableau.span(n, s, slices)
    decl = sys.decl
    pis = sys.pis
    ann = annihilator(eff)
    vecs = []
    for ell in ann:
        w = [sum((ell[a * n + i] * ex.A_val[e][a][i] for a in range(s) for i in range(n)),
                 Fraction(0)) for e in range(len(pis))]
        if any(w):
            vecs.append(w)
    forced = []
    for w in span_basis(vecs, len(pis)):
        f = Form.zero(decl)
        for e, c in enumerate(w):
            if c:
                f = f + Form.symbol(decl, decl.names[pis[e]]) * c
        forced.append(f)
    return VanishingReport(forced, eff, A.dim)


# driver


def analyze(sys, point=None, max_prolongations=3, seed=0, trials=5):
    """Run the torsion / restriction / Cartan test / prolongation loop."""
    if point is not None:
        sys = sys.with_point(point)
    if sys.point is None:
        from .pfaffian import sample_point
        sys = sys.with_point(sample_point(sys, seed))
    records = []
    it = 0
    while True:
        ok, bad = check_linear(sys)
        if not ok:
            raise UnsupportedSystem(f"system is not linear Pfaffian ({len(bad)} pi^pi terms)")
        ex = extract_tableau_torsion(sys)
        tc = torsion_class(ex)
        residual_text = [r.format(sys.decl.variables) for r in tc.residuals]
        restricted, note = False, ""
        if tc.residuals:
            if any(r.is_constant() for r in tc.residuals):
                records.append(IterationRecord(ex.tableau.dim, (), 0, 0, residual_text, False,
                                               False, "constant nonzero torsion"))
                return AnalysisReport(records, STATUS_EMPTY, None, seed, sys.point, sys)
            vals = point_values(sys.decl, sys.point, [])
            if any(r.evaluate([v if v is not None else 0 for v in vals]) for r in tc.residuals):
                sys = sys.with_point(project_point(sys, tc.residuals))
            res = restrict_by_torsion(sys, tc.residuals)
            if res.status != "ok":
                records.append(IterationRecord(ex.tableau.dim, (), 0, 0, residual_text, False,
                                               True, res.note))
                return AnalysisReport(records, STATUS_EMPTY, None, seed, res.system.point,
                                      res.system)
            sys = res.system
            restricted = True
            ex = extract_tableau_torsion(sys)
            tc2 = torsion_class(ex, symbolic=False)
            if not tc2.zero:
                records.append(IterationRecord(ex.tableau.dim, (), 0, 0, residual_text, False,
                                               True, "torsion persists after restriction"))
                return AnalysisReport(records, STATUS_EMPTY, None, seed, sys.point, sys)
        ct = cartan_test(ex.tableau, trials, seed)
        if ct.involutive and prolong(ex.tableau).dim != ct.bound:
            raise EDSError("Cartan equality failed on re-check")
        records.append(IterationRecord(ct.dim_tableau, ct.characters.values, ct.bound,
                                       ct.dim_prolongation, residual_text, ct.involutive,
                                       restricted, note))
        if ct.involutive:
            return AnalysisReport(records, STATUS_INVOLUTIVE, ct.characters.last_nonzero(),
                                  seed, sys.point, sys)
        if it >= max_prolongations:
            return AnalysisReport(records, STATUS_CAP, None, seed, sys.point, sys)
        sys = prolong_system(sys, ex, seed=seed + it)
        it += 1
