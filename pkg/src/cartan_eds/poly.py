"""Sparse multivariate polynomials with exact rational coefficients.

A ``ScalarPoly`` knows only how many variables it ranges over; names live
in the coframe declaration that owns it.  Monomials are dense exponent
tuples of that fixed arity.
"""

from fractions import Fraction
from numbers import Rational


def as_fraction(c):
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, Rational)):
        return Fraction(c)
    if isinstance(c, str):
        return Fraction(c)
    raise TypeError(f"not an exact rational: {c!r}")


class ScalarPoly:
    __slots__ = ("nvars", "terms", "_hash")

    def __init__(self, nvars, terms=None):
        self.nvars = nvars
        clean = {}
        if terms:
            for exps, c in terms.items():
                if len(exps) != nvars:
                    raise ValueError(f"exponent arity {len(exps)} != {nvars}")
                c = as_fraction(c)
                if c:
                    clean[tuple(exps)] = c
        self.terms = clean
        self._hash = None

    @classmethod
    def const(cls, nvars, c):
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def var(cls, nvars, i, power=1):
        e = [0] * nvars
        e[i] = power
        return cls(nvars, {tuple(e): 1})

    @classmethod
    def _raw(cls, nvars, terms):
        p = cls.__new__(cls)
        p.nvars = nvars
        p.terms = terms
        p._hash = None
        return p

    def _coerce(self, other):
        if isinstance(other, ScalarPoly):
            if other.nvars != self.nvars:
                raise ValueError(f"arity mismatch {self.nvars} vs {other.nvars}")
            return other
        return ScalarPoly.const(self.nvars, other)

    # ring structure

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return ScalarPoly._raw(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return ScalarPoly._raw(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, ScalarPoly):
            c = as_fraction(other)
            if not c:
                return ScalarPoly._raw(self.nvars, {})
            return ScalarPoly._raw(self.nvars, {e: v * c for e, v in self.terms.items()})
        other = self._coerce(other)
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = out.get(e, 0) + c1 * c2
                if v:
                    out[e] = v
                else:
                    out.pop(e, None)
        return ScalarPoly._raw(self.nvars, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        c = as_fraction(other)
        if not c:
            raise ZeroDivisionError("polynomial division by zero")
        return self * (1 / c)

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise ValueError("only nonnegative integer powers")
        out = ScalarPoly.const(self.nvars, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, ScalarPoly):
            return self.nvars == other.nvars and self.terms == other.terms
        try:
            c = as_fraction(other)
        except TypeError:
            return NotImplemented
        return self.terms == ({(0,) * self.nvars: c} if c else {})

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    # queries

    def is_zero(self):
        return not self.terms

    def is_constant(self):
        return all(not any(e) for e in self.terms)

    def constant_value(self):
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return self.terms.get((0,) * self.nvars, Fraction(0))

    def variables(self):
        used = set()
        for e in self.terms:
            used.update(i for i, k in enumerate(e) if k)
        return sorted(used)

    def degree_in(self, i):
        return max((e[i] for e in self.terms), default=0)

    def total_degree(self):
        return max((sum(e) for e in self.terms), default=0)

    # calculus and substitution

    def diff(self, i):
        out = {}
        for e, c in self.terms.items():
            k = e[i]
            if k:
                e2 = list(e)
                e2[i] = k - 1
                out[tuple(e2)] = c * k
        return ScalarPoly._raw(self.nvars, out)

    def subs(self, values):
        """Substitute rationals for some variables; ``values`` maps index -> value."""
        out = {}
        for e, c in self.terms.items():
            e2 = list(e)
            for i, v in values.items():
                k = e2[i]
                if k:
                    c = c * as_fraction(v) ** k
                    e2[i] = 0
            if c:
                e2 = tuple(e2)
                v = out.get(e2, 0) + c
                if v:
                    out[e2] = v
                else:
                    out.pop(e2, None)
        return ScalarPoly._raw(self.nvars, out)

    def evaluate(self, values):
        """Full evaluation; ``values`` is a sequence indexed by variable."""
        total = Fraction(0)
        for e, c in self.terms.items():
            term = c
            for i, k in enumerate(e):
                if k:
                    term *= as_fraction(values[i]) ** k
            total += term
        return total

    def compose(self, images, nvars):
        """Replace variable i by the polynomial ``images[i]`` (arity ``nvars``)."""
        out = ScalarPoly(nvars)
        for e, c in self.terms.items():
            term = ScalarPoly.const(nvars, c)
            for i, k in enumerate(e):
                if k:
                    term = term * images[i] ** k
            out = out + term
        return out

    def extend(self, nvars):
        """Re-embed into a ring with extra trailing variables."""
        if nvars == self.nvars:
            return self
        pad = (0,) * (nvars - self.nvars)
        return ScalarPoly._raw(nvars, {e + pad: c for e, c in self.terms.items()})

    def format(self, names):
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, key=lambda e: (-sum(e), tuple(-k for k in e))):
            c = self.terms[e]
            mono = "*".join(
                names[i] if k == 1 else f"{names[i]}**{k}" for i, k in enumerate(e) if k
            )
            sign = "-" if c < 0 else "+"
            a = abs(c)
            if a.denominator != 1:
                a = f"({a})"
            if mono:
                body = mono if a == 1 else f"{a}*{mono}"
            else:
                body = str(a)
            parts.append((sign, body))
        out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self):
        return f"ScalarPoly({self.format([f'x{i}' for i in range(self.nvars)])})"
