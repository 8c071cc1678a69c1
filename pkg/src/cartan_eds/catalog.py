"""Ready-made linear Pfaffian systems with known answers.

Frame-bundle systems use the Euclidean structure equations

    d w^A = -w^A_B ^ w^B,    d w^A_B = -w^A_C ^ w^C_B

with w^A_B stored for A > B and w^B_A = -w^A_B.  Symbol names are 1-based.
"""

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from .forms import CoframeDecl, Form, StructureRules, change_coframe, extend_rules
from .linalg import nullspace, rref
from .pfaffian import PfaffianSystem
from .poly import ScalarPoly


def _flat_rules(decl, differentials):
    """Rules with d(var) = symbol for each (var, symbol) pair and d(symbol) = 0."""
    zero = Form.zero(decl)
    return StructureRules(
        decl,
        {n: zero for n in decl.names},
        {v: Form.symbol(decl, d) for v, d in differentials},
    )


def _as_poly(decl, expr):
    if isinstance(expr, ScalarPoly):
        return expr
    if isinstance(expr, str):
        from .dsl import parse_scalar
        return parse_scalar(expr, decl.variables)
    return decl.poly(expr)


def build_frobenius_example(A_expr="y", B_expr="x"):
    """theta = du - A dx - B dy on (x, y, u), independence dx ^ dy."""
    decl = CoframeDecl(("du", "dx", "dy"), ("theta", "omega", "omega"), ("x", "y", "u"))
    rules = _flat_rules(decl, [("x", "dx"), ("y", "dy"), ("u", "du")])
    A, B = _as_poly(decl, A_expr), _as_poly(decl, B_expr)
    rest = Form.symbol(decl, "dx") * A + Form.symbol(decl, "dy") * B
    rules = change_coframe(rules, {"du": ("theta", "theta", rest)})
    return PfaffianSystem(rules, None, f"frobenius(A={A.format(decl.variables)}, "
                                       f"B={B.format(decl.variables)})")


def build_contact_j1(n, s):
    """Contact system theta^a = du^a - p^a_i dx^i on one-jets of maps R^n -> R^s."""
    if n < 1 or s < 1:
        raise ValueError("n and s must be positive")
    xs = [f"x{i}" for i in range(1, n + 1)]
    us = [f"u{a}" for a in range(1, s + 1)]
    ps = [f"p{a}_{i}" for a in range(1, s + 1) for i in range(1, n + 1)]
    names = ["d" + u for u in us] + ["d" + x for x in xs] + ["d" + p for p in ps]
    tags = ["theta"] * s + ["omega"] * n + ["pi"] * (n * s)
    decl = CoframeDecl(names, tags, xs + us + ps)
    rules = _flat_rules(decl, [(v, "d" + v) for v in decl.variables])
    repl = {}
    for a in range(1, s + 1):
        rest = Form.zero(decl)
        for i in range(1, n + 1):
            rest = rest + Form.symbol(decl, f"dx{i}") * decl.var(f"p{a}_{i}")
        repl[f"du{a}"] = (f"th{a}", "theta", rest)
    return PfaffianSystem(change_coframe(rules, repl), None, f"contact(n={n}, s={s})")


def build_cauchy_riemann():
    """One-jets of (u1, u2) over (x1, x2) restricted by u1_x = u2_y, u1_y = -u2_x."""
    vs = ["x1", "x2", "u1", "u2", "p", "q"]
    names = ["du1", "du2", "dx1", "dx2", "dp", "dq"]
    tags = ["theta", "theta", "omega", "omega", "pi", "pi"]
    decl = CoframeDecl(names, tags, vs)
    rules = _flat_rules(decl, [(v, "d" + v) for v in vs])
    F = lambda n: Form.symbol(decl, n)
    p, q = decl.var("p"), decl.var("q")
    rules = change_coframe(rules, {
        "du1": ("th1", "theta", F("dx1") * p + F("dx2") * q),
        "du2": ("th2", "theta", F("dx1") * (-q) + F("dx2") * p),
    })
    return PfaffianSystem(rules, None, "cauchy-riemann")


def build_linear_first_order(coefficients, n=None):
    """Scalar first-order PDE system sum_i c_i u_{x_i} = 0, one row per equation.

    The first derivatives are parametrized by a basis of the solution space
    of the coefficient matrix, with variables q1, q2, ...
    """
    rows = [[Fraction(c) for c in row] for row in coefficients]
    n = n or (len(rows[0]) if rows else 1)
    basis = nullspace(rows, n) if rows else [[Fraction(int(i == j)) for j in range(n)]
                                            for i in range(n)]
    xs = [f"x{i}" for i in range(1, n + 1)]
    qs = [f"q{k}" for k in range(1, len(basis) + 1)]
    names = ["du"] + ["d" + x for x in xs] + ["d" + q for q in qs]
    tags = ["theta"] + ["omega"] * n + ["pi"] * len(qs)
    decl = CoframeDecl(names, tags, xs + ["u"] + qs)
    rules = _flat_rules(decl, [(v, "d" + v) for v in decl.variables])
    rest = Form.zero(decl)
    for i in range(n):
        c = ScalarPoly(decl.nvars)
        for k, v in enumerate(basis):
            if v[i]:
                c = c + decl.var(qs[k]) * v[i]
        rest = rest + Form.symbol(decl, f"dx{i + 1}") * c
    rules = change_coframe(rules, {"du": ("theta", "theta", rest)})
    return PfaffianSystem(rules, None, "linear-first-order")


# Euclidean frames


def _rot_name(A, B, prefix="w"):
    return f"{prefix}{A}_{B}"


class _Frame:
    """Index bookkeeping for w^A and w^A_B (A > B) over 1..N."""

    def __init__(self, N, prefix="w"):
        self.N = N
        self.prefix = prefix

    def point_names(self):
        return [f"{self.prefix}{A}" for A in range(1, self.N + 1)]

    def rot_names(self):
        return [_rot_name(A, B, self.prefix) for A in range(2, self.N + 1) for B in range(1, A)]

    def w(self, decl, A):
        return Form.symbol(decl, f"{self.prefix}{A}")

    def rot(self, decl, A, B):
        if A == B:
            return Form.zero(decl)
        if A > B:
            return Form.symbol(decl, _rot_name(A, B, self.prefix))
        return -Form.symbol(decl, _rot_name(B, A, self.prefix))

    def rules(self, decl):
        out = {}
        rng = range(1, self.N + 1)
        for A in rng:
            f = Form.zero(decl)
            for B in rng:
                if B != A:
                    f = f - self.rot(decl, A, B).wedge(self.w(decl, B))
            out[f"{self.prefix}{A}"] = f
        for A in rng:
            for B in range(1, A):
                f = Form.zero(decl)
                for C in rng:
                    if C != A and C != B:
                        f = f - self.rot(decl, A, C).wedge(self.rot(decl, C, B))
                out[_rot_name(A, B, self.prefix)] = f
        return out


def _frame_system(n, s, h_names, h_of, name):
    """Submanifold-type system on the frame bundle of E^{n+s} times h-space.

    ``h_of(a, i, j)`` returns the polynomial h^a_{ij} in terms of the
    declared ``h_names``; theta^a_i = w^a_i - h^a_{ij} w^j.
    """
    N = n + s
    fr = _Frame(N)
    names = fr.point_names() + fr.rot_names()
    tags = []
    for A in range(1, N + 1):
        tags.append("omega" if A <= n else "theta")
    for A in range(2, N + 1):
        for B in range(1, A):
            tags.append("other")
    base = CoframeDecl(names, tags, ())
    rules = StructureRules(base, fr.rules(base), {})
    dh = ["d" + h for h in h_names]
    rules = extend_rules(
        rules, [(d, "pi") for d in dh], h_names,
        lambda D: {d: Form.zero(D) for d in dh},
        lambda D: {h: Form.symbol(D, d) for h, d in zip(h_names, dh)},
    )
    D = rules.decl
    repl = {}
    for a in range(n + 1, N + 1):
        for i in range(1, n + 1):
            rest = Form.zero(D)
            for j in range(1, n + 1):
                c = h_of(D, a, i, j)
                if c:
                    rest = rest + fr.w(D, j) * c
            repl[_rot_name(a, i)] = (f"th{a}_{i}", "theta", rest)
    return PfaffianSystem(change_coframe(rules, repl), None, name)


def _sym_h_names(n, s):
    return [f"h{a}_{i}_{j}" for a in range(n + 1, n + s + 1)
            for i in range(1, n + 1) for j in range(i, n + 1)]


def build_submanifold_system(n, s):
    """theta^a_i = w^a_i - h^a_{ij} w^j with symmetric h as fiber variables."""
    def h_of(D, a, i, j):
        i, j = min(i, j), max(i, j)
        return D.var(f"h{a}_{i}_{j}")
    return _frame_system(n, s, _sym_h_names(n, s), h_of, f"submanifold(n={n}, s={s})")


def build_canonical_submanifold(n, s):
    """Ideal {w^a} with independence w^1 ^ ... ^ w^n; w^a_i are the free directions."""
    N = n + s
    fr = _Frame(N)
    names = fr.point_names() + fr.rot_names()
    tags = ["omega" if A <= n else "theta" for A in range(1, N + 1)]
    for A in range(2, N + 1):
        for B in range(1, A):
            tags.append("pi" if A > n >= B else "other")
    decl = CoframeDecl(names, tags, ())
    return PfaffianSystem(StructureRules(decl, fr.rules(decl), {}), {},
                          f"canonical-submanifold(n={n}, s={s})")


def build_minimal_surface_system(s):
    """Surfaces in E^{2+s} with trace-free second fundamental form (h^a_22 = -h^a_11)."""
    names = [f"h{a}_{i}_{j}" for a in range(3, s + 3) for (i, j) in ((1, 1), (1, 2))]

    def h_of(D, a, i, j):
        if i == j == 2:
            return -D.var(f"h{a}_1_1")
        i, j = min(i, j), max(i, j)
        return D.var(f"h{a}_{i}_{j}")
    return _frame_system(2, s, names, h_of, f"minimal-surface(s={s})")


# isometric embedding


def curvature_parameters(n):
    """Independent components of an algebraic curvature tensor.

    Returns ``(names, table)`` where ``table[(P, Q)]`` for index pairs
    P = (i, j), Q = (k, l) with i < j, k < l, P <= Q, is a list of
    (variable position, coefficient) pairs.
    """
    pairs = list(combinations(range(1, n + 1), 2))
    entries = [(P, Q) for x, P in enumerate(pairs) for Q in pairs[x:]]
    pos = {e: k for k, e in enumerate(entries)}

    def entry(P, Q):
        return pos[(P, Q)] if (P, Q) in pos else pos[(Q, P)]

    rows = []
    for i, j, k, l in combinations(range(1, n + 1), 4):
        row = [Fraction(0)] * len(entries)
        row[entry((i, j), (k, l))] += 1
        row[entry((i, k), (j, l))] -= 1
        row[entry((i, l), (j, k))] += 1
        rows.append(row)
    if rows:
        red, piv = rref(rows, len(entries))
    else:
        red, piv = [], []
    free = [c for c in range(len(entries)) if c not in set(piv)]
    names = []
    for c in free:
        (i, j), (k, l) = entries[c]
        names.append(f"R{i}{j}{k}{l}")
    table = {}
    for c, e in enumerate(entries):
        if c in free:
            table[e] = [(free.index(c), Fraction(1))]
        else:
            row = red[piv.index(c)]
            table[e] = [(free.index(f), -row[f]) for f in free if row[f]]
    return names, table


def _curvature(D, names, table, i, j, k, l):
    """Polynomial R_{ijkl} with all algebraic symmetries."""
    zero = ScalarPoly(D.nvars)
    if i == j or k == l:
        return zero
    sign = 1
    if i > j:
        i, j, sign = j, i, -sign
    if k > l:
        k, l, sign = l, k, -sign
    P, Q = (i, j), (k, l)
    lin = table.get((P, Q)) or table.get((Q, P))
    out = zero
    for v, c in lin:
        out = out + D.var(names[v]) * c
    return out if sign > 0 else -out


def gauss_curvature(h, n):
    """Components G_{ijkl} = sum_mu (h_ik h_jl - h_il h_jk) for a list of symmetric matrices."""
    out = {}
    for i in range(n):
        for j in range(n):
            for k in range(n):
                for l in range(n):
                    out[(i + 1, j + 1, k + 1, l + 1)] = sum(
                        (H[i][k] * H[j][l] - H[i][l] * H[j][k] for H in h), Fraction(0))
    return out


def build_isometric_embedding(n, r, curvature_mode="generic_from_h", seed=0):
    """Stage-1 system for isometric embeddings of an n-manifold into E^{n+r}.

    Coframe: e^i (independence), th^i = w^i - e^i and w^mu (ideal), the
    connection forms w^A_B of E^{n+r} and e^i_j of the manifold.  In
    ``generic_from_h`` mode the curvature R is a set of scalar variables
    whose derivative keeps only the rotation terms (covariant derivative
    truncated to zero), and the point sets R from the Gauss equation of a
    random rational second fundamental form; prolongation hints place the
    new variables at that form.  ``flat`` mode has no curvature and uses a
    rank-one form so the Gauss equation holds.
    """
    if n < 2 or r < 1:
        raise ValueError("need n >= 2 and r >= 1")
    if curvature_mode not in ("flat", "generic_from_h"):
        raise ValueError(f"unknown curvature mode {curvature_mode!r}")
    N = n + r
    fr = _Frame(N)
    eta = _Frame(n, "e")
    names = fr.point_names() + fr.rot_names() + eta.point_names() + eta.rot_names()
    tags = ["theta"] * N
    for A in range(2, N + 1):
        for B in range(1, A):
            tags.append("other" if B > n else "pi")
    tags += ["omega"] * n + ["pi"] * (n * (n - 1) // 2)
    generic = curvature_mode == "generic_from_h"
    rnames, table = curvature_parameters(n) if generic else ([], {})
    decl = CoframeDecl(names, tags, rnames)
    dco = fr.rules(decl)
    erules = eta.rules(decl)
    for i in range(2, n + 1):
        for j in range(1, i):
            f = erules[_rot_name(i, j, "e")]
            if generic:
                for k in range(1, n + 1):
                    for l in range(k + 1, n + 1):
                        c = _curvature(decl, rnames, table, i, j, k, l)
                        if c:
                            f = f + eta.w(decl, k).wedge(eta.w(decl, l)) * c
            erules[_rot_name(i, j, "e")] = f
    dco.update(erules)
    dsc = {}
    if generic:
        for v in rnames:
            i, j, k, l = (int(c) for c in v[1:])
            f = Form.zero(decl)
            for m in range(1, n + 1):
                for slot in range(4):
                    idx = [i, j, k, l]
                    old = idx[slot]
                    if m == old:
                        continue
                    idx[slot] = m
                    c = _curvature(decl, rnames, table, *idx)
                    if c:
                        f = f + eta.rot(decl, m, old) * c
            dsc[v] = f
    rules = StructureRules(decl, dco, dsc)
    repl = {f"w{i}": (f"th{i}", "theta", eta.w(decl, i)) for i in range(1, n + 1)}
    rules = change_coframe(rules, repl)
    rng = random.Random(seed)
    h0 = []
    for _ in range(r):
        if generic:
            H = [[Fraction(0)] * n for _ in range(n)]
            for i in range(n):
                for j in range(i, n):
                    H[i][j] = H[j][i] = Fraction(rng.randint(-4, 4))
        else:
            v = [Fraction(rng.randint(1, 3)) for _ in range(n)]
            H = [[v[i] * v[j] for j in range(n)] for i in range(n)]
        h0.append(H)
    point = {}
    if generic:
        G = gauss_curvature(h0, n)
        for v in rnames:
            i, j, k, l = (int(c) for c in v[1:])
            point[v] = G[(i, j, k, l)]
    hints = {}
    for mu in range(r):
        for i in range(n):
            for j in range(i, n):
                hints[f"p_w{n + mu + 1}_e{i + 1}_e{j + 1}"] = -h0[mu][i][j]
    sys = PfaffianSystem(rules, point, f"isometric-embedding(n={n}, r={r}, {curvature_mode})",
                         (), hints)
    return sys


@dataclass
class CatalogEntry:
    name: str
    params: dict
    builder: object
    expected: dict = field(default_factory=dict)
    point: dict = None

    def build(self, **overrides):
        kw = dict(self.params)
        kw.update(overrides)
        return self.builder(**kw)


CATALOG = {
    "frobenius": CatalogEntry("frobenius", {"A_expr": "y", "B_expr": "x"},
                              build_frobenius_example, {"status": "involutive"}),
    "contact": CatalogEntry("contact", {"n": 2, "s": 1}, build_contact_j1,
                            {"characters": (1, 1), "dim_prolongation": 3}),
    "cauchy-riemann": CatalogEntry("cauchy-riemann", {}, build_cauchy_riemann,
                                   {"characters": (2, 0), "dim_prolongation": 2}),
    "submanifold": CatalogEntry("submanifold", {"n": 2, "s": 1}, build_submanifold_system,
                                {"status": "involutive"}),
    "minimal-surface": CatalogEntry("minimal-surface", {"s": 1}, build_minimal_surface_system,
                                    {"characters": (2, 0)}),
    "isometric-embedding": CatalogEntry("isometric-embedding",
                                        {"n": 2, "r": 1, "curvature_mode": "generic_from_h"},
                                        build_isometric_embedding,
                                        {"status": "involutive", "prolongations": 1}),
}


def build(name, **params):
    try:
        entry = CATALOG[name]
    except KeyError:
        raise KeyError(f"unknown catalog system {name!r}; known: {', '.join(CATALOG)}") from None
    return entry.build(**params)
