"""Exact linear algebra over the rationals.

Elimination is fraction-free: every row is scaled to a primitive integer
vector and rows are combined by integer cross-multiplication, so no
intermediate rational ever appears.  Results are converted back to
``Fraction`` only when a reduced echelon form or a kernel is returned.
"""

from fractions import Fraction
from functools import reduce
from math import gcd, lcm


def _primitive(row):
    den = reduce(lcm, (Fraction(x).denominator for x in row), 1)
    ints = [int(Fraction(x) * den) for x in row]
    g = reduce(gcd, ints, 0)
    if g > 1:
        ints = [x // g for x in ints]
    return ints


def echelon(rows, ncols=None):
    """Integer row echelon form.

    Returns ``(ech, pivots)`` where ``ech`` holds the nonzero rows (primitive
    integer vectors) and ``pivots`` their pivot columns, strictly increasing.
    """
    rows = [_primitive(r) for r in rows]
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    ech, pivots = [], []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        piv = rows[r]
        a = piv[c]
        for i in range(r + 1, len(rows)):
            b = rows[i][c]
            if b:
                new = [a * x - b * y for x, y in zip(rows[i], piv)]
                g = reduce(gcd, new, 0)
                if g > 1:
                    new = [x // g for x in new]
                rows[i] = new
        pivots.append(c)
        r += 1
    ech = rows[:r]
    return ech, pivots


def rank(rows, ncols=None):
    if not rows:
        return 0
    return len(echelon(rows, ncols)[1])


def rref(rows, ncols=None):
    """Reduced row echelon form with ``Fraction`` entries."""
    ech, pivots = echelon(rows, ncols)
    out = [[Fraction(x) for x in row] for row in ech]
    for k in range(len(out) - 1, -1, -1):
        c = pivots[k]
        lead = out[k][c]
        out[k] = [x / lead for x in out[k]]
        for i in range(k):
            f = out[i][c]
            if f:
                out[i] = [x - f * y for x, y in zip(out[i], out[k])]
    return out, pivots


def nullspace(rows, ncols):
    """Basis of ``{x : M x = 0}``, one vector per free column (that entry is 1)."""
    if not rows:
        return [[Fraction(int(i == j)) for j in range(ncols)] for i in range(ncols)]
    red, pivots = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for k, c in enumerate(pivots):
            v[c] = -red[k][f]
        basis.append(v)
    return basis


def left_nullspace(rows, ncols):
    """Basis of ``{y : y^T M = 0}`` in reduced form."""
    if not rows:
        return []
    nrows = len(rows)
    transposed = [[rows[i][j] for i in range(nrows)] for j in range(ncols)]
    basis = nullspace(transposed, nrows)
    if not basis:
        return []
    red, _ = rref(basis, nrows)
    return red


def span_basis(vectors, ncols):
    """Reduced basis of the span of ``vectors``."""
    if not vectors:
        return []
    return rref(vectors, ncols)[0]


def in_span(vector, vectors, ncols):
    if not any(vector):
        return True
    return rank(list(vectors) + [list(vector)], ncols) == rank(list(vectors), ncols)


def solve(rows, rhs, ncols):
    """One solution of ``M x = rhs`` (free variables set to 0), or ``None``."""
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    if not aug:
        return [Fraction(0)] * ncols
    red, pivots = rref(aug, ncols + 1)
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for k, c in enumerate(pivots):
        x[c] = red[k][ncols]
    return x


def matmul(a, b):
    return [[sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in zip(*b)] for row in a]


def determinant(m):
    """Bareiss determinant of a square integer/rational matrix."""
    n = len(m)
    den = reduce(lcm, (Fraction(x).denominator for row in m for x in row), 1)
    a = [[int(Fraction(x) * den) for x in row] for row in m]
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            p = next((i for i in range(k + 1, n) if a[i][k]), None)
            if p is None:
                return Fraction(0)
            a[k], a[p] = a[p], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    det = a[n - 1][n - 1] if n else 1
    return Fraction(sign * det, den ** n)
