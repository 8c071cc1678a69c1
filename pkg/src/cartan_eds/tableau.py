"""Linear algebra of tableaux A inside W (x) V*.

A tableau is stored as a basis of s x n rational matrices: rows index W
(one per ideal generator), columns index V (one per independence form).
"""

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import GenericityFailure
from .linalg import determinant, nullspace, rank, rref


def _flatten(m):
    return [x for row in m for x in row]


class Tableau:
    """Subspace of s x n matrices given by an independent basis."""

    def __init__(self, n, s, basis=()):
        self.n = n
        self.s = s
        basis = [[[Fraction(x) for x in row] for row in m] for m in basis]
        for m in basis:
            if len(m) != s or any(len(row) != n for row in m):
                raise ValueError(f"tableau basis element is not {s}x{n}")
        if basis and rank([_flatten(m) for m in basis], s * n) != len(basis):
            raise ValueError("tableau basis is linearly dependent")
        self.basis = basis

    @classmethod
    def span(cls, n, s, matrices):
        """Tableau spanned by ``matrices`` (dependent or zero ones allowed)."""
        rows = [_flatten([[Fraction(x) for x in row] for row in m]) for m in matrices]
        rows = [r for r in rows if any(r)]
        if not rows:
            return cls(n, s, [])
        red, _ = rref(rows, s * n)
        return cls(n, s, [[r[a * n:(a + 1) * n] for a in range(s)] for r in red])

    @classmethod
    def full(cls, n, s):
        out = []
        for a in range(s):
            for i in range(n):
                m = [[0] * n for _ in range(s)]
                m[a][i] = 1
                out.append(m)
        return cls(n, s, out)

    @property
    def dim(self):
        return len(self.basis)

    def flat_rows(self):
        return [_flatten(m) for m in self.basis]

    def contains(self, m):
        v = _flatten(m)
        if not any(v):
            return True
        rows = self.flat_rows()
        return rank(rows + [v], self.s * self.n) == len(rows)

    def change_basis(self, gv=None, gw=None):
        """Apply column change ``m -> m gv`` and row change ``m -> gw m``."""
        out = []
        for m in self.basis:
            if gw is not None:
                m = [[sum((gw[a][b] * m[b][i] for b in range(self.s)), Fraction(0))
                      for i in range(self.n)] for a in range(self.s)]
            if gv is not None:
                m = [[sum((row[k] * gv[k][i] for k in range(self.n)), Fraction(0))
                      for i in range(self.n)] for row in m]
            out.append(m)
        return Tableau.span(self.n, self.s, out)

    def to_json(self):
        return {"n": self.n, "s": self.s,
                "basis": [[[str(x) for x in row] for row in m] for m in self.basis]}

    @classmethod
    def from_json(cls, data):
        return cls(data["n"], data["s"],
                   [[[Fraction(x) for x in row] for row in m] for m in data["basis"]])

    def __repr__(self):
        return f"Tableau(n={self.n}, s={self.s}, dim={self.dim})"


@dataclass(frozen=True)
class CharacterVector:
    values: tuple
    trials: int
    seed: int

    def __iter__(self):
        return iter(self.values)

    def __getitem__(self, k):
        return self.values[k]

    def __len__(self):
        return len(self.values)

    @property
    def bound(self):
        return sum((j + 1) * s for j, s in enumerate(self.values))

    def last_nonzero(self):
        """(s_p, p) for the last nonzero character, or (0, 0) if all vanish."""
        for j in range(len(self.values) - 1, -1, -1):
            if self.values[j]:
                return self.values[j], j + 1
        return 0, 0


def random_invertible(n, rng, lo=-3, hi=3):
    while True:
        g = [[Fraction(rng.randint(lo, hi)) for _ in range(n)] for _ in range(n)]
        if determinant(g):
            return g


def column_ranks(A, g=None):
    """Ranks of the projections of A onto its first j columns, j = 1..n."""
    mats = A.basis
    if g is not None:
        mats = [[[sum((row[k] * g[k][i] for k in range(A.n)), Fraction(0))
                  for i in range(A.n)] for row in m] for m in mats]
    out = []
    for j in range(1, A.n + 1):
        rows = [[x for row in m for x in row[:j]] for m in mats]
        out.append(rank(rows, A.s * j) if rows else 0)
    return out


def characters(A, trials=5, seed=0):
    """Cartan characters from the generic column-rank filtration.

    Each trial applies a random invertible integer change of basis to V;
    the partial sums s_1 + ... + s_j are the largest rank seen for the
    first j columns.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    rng = random.Random(seed)
    best = [0] * A.n
    if A.dim:
        for _ in range(trials):
            g = random_invertible(A.n, rng)
            best = [max(a, b) for a, b in zip(best, column_ranks(A, g))]
    s = [best[0]] + [best[j] - best[j - 1] for j in range(1, A.n)] if A.n else []
    if any(s[j] < s[j + 1] for j in range(len(s) - 1)) or sum(s) != A.dim:
        raise GenericityFailure(f"non-generic flag produced characters {s}")
    return CharacterVector(tuple(s), trials, seed)


def sym_pairs(n):
    return [(i, j) for i in range(n) for j in range(i, n)]


@dataclass(frozen=True)
class Prolongation:
    """Basis of A^(1) as coefficient vectors over (a, i<=j) and as full tensors."""

    n: int
    s: int
    basis: tuple
    free: tuple = field(default=())

    @property
    def dim(self):
        return len(self.basis)

    @property
    def coords(self):
        return [(a, i, j) for a in range(self.s) for (i, j) in sym_pairs(self.n)]

    def tensor(self, vec):
        """X[a][i][j] for a coefficient vector over ``coords``."""
        X = [[[Fraction(0)] * self.n for _ in range(self.n)] for _ in range(self.s)]
        for (a, i, j), v in zip(self.coords, vec):
            X[a][i][j] = v
            X[a][j][i] = v
        return X

    def tensors(self):
        return [self.tensor(v) for v in self.basis]


def annihilator(A):
    """Linear functionals on s x n matrices (flattened) vanishing on A."""
    rows = A.flat_rows()
    if not rows:
        return [[Fraction(int(k == m)) for m in range(A.s * A.n)] for k in range(A.s * A.n)]
    return nullspace(rows, A.s * A.n)


def prolong(A):
    """A^(1) = (A (x) V*) meet (W (x) S^2 V*), by an exact kernel computation."""
    n, s = A.n, A.s
    pairs = sym_pairs(n)
    pos = {}
    for k, (a, i, j) in enumerate((a, i, j) for a in range(s) for (i, j) in pairs):
        pos[(a, i, j)] = k
        pos[(a, j, i)] = k
    ncols = s * len(pairs)
    ann = annihilator(A)
    rows = []
    for i in range(n):
        for ell in ann:
            row = [Fraction(0)] * ncols
            for a in range(s):
                for j in range(n):
                    c = ell[a * n + j]
                    if c:
                        row[pos[(a, i, j)]] += c
            if any(row):
                rows.append(row)
    # nullspace returns one vector per non-pivot column, in column order
    pivots = set(rref(rows, ncols)[1]) if rows else set()
    free = tuple(c for c in range(ncols) if c not in pivots)
    basis = nullspace(rows, ncols)
    return Prolongation(n, s, tuple(tuple(v) for v in basis), free)


@dataclass(frozen=True)
class CartanResult:
    dim_tableau: int
    characters: CharacterVector
    bound: int
    dim_prolongation: int
    involutive: bool


def cartan_test(A, trials=5, seed=0, max_trials=80):
    """Compare dim A^(1) with s_1 + 2 s_2 + ... + n s_n.

    The inequality dim A^(1) <= bound must hold; a violation means the
    sampled flags were not generic, so the test is retried with more
    trials before giving up.
    """
    dim1 = prolong(A).dim
    k = trials
    while True:
        try:
            chars = characters(A, k, seed)
        except GenericityFailure:
            chars = None
        if chars is not None and dim1 <= chars.bound:
            return CartanResult(A.dim, chars, chars.bound, dim1, dim1 == chars.bound)
        if k >= max_trials:
            raise GenericityFailure(
                f"dim A(1) = {dim1} exceeds the character bound after {k} trials")
        k *= 2


def msubset_check(A):
    """True when every element of A^(1) is trace-free in its V indices, per W slot."""
    P = prolong(A)
    for X in P.tensors():
        for a in range(A.s):
            if sum(X[a][i][i] for i in range(A.n)):
                return False
    return True


def delta_generators(A):
    """Spanning vectors of delta(A (x) V*) inside W (x) Lambda^2 V*.

    Components are ordered (a, i<j); the generator for basis matrix B and
    covector v^j has entries B[a][i] delta_jk - B[a][k] delta_ji.
    """
    n, s = A.n, A.s
    comps = [(a, i, k) for a in range(s) for i in range(n) for k in range(i + 1, n)]
    gens = []
    for B in A.basis:
        for j in range(n):
            gens.append([(B[a][i] if j == k else 0) - (B[a][k] if j == i else 0)
                         for (a, i, k) in comps])
    return comps, [[Fraction(x) for x in g] for g in gens]
