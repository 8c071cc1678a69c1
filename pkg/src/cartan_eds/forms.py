"""Exterior algebra over a declared coframe with polynomial coefficients.

Forms are sparse maps from strictly increasing coframe-index tuples to
``ScalarPoly`` coefficients.  Exterior differentiation is driven entirely
by user-declared structure rules: ``d`` of every coframe symbol is a
2-form and ``d`` of every scalar variable is a 1-form, both written in
the same coframe.
"""

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import (
    DeclarationMismatch,
    DegenerateIdeal,
    IncompleteRules,
    MissingAssignment,
    NonUnitPivot,
)
from .linalg import rank
from .poly import ScalarPoly, as_fraction

TAGS = ("theta", "omega", "pi", "other")


@dataclass(frozen=True)
class CoframeDecl:
    names: tuple
    tags: tuple
    variables: tuple = ()
    _index: dict = field(default=None, compare=False, repr=False, hash=False)
    _vindex: dict = field(default=None, compare=False, repr=False, hash=False)

    def __post_init__(self):
        names, tags, variables = tuple(self.names), tuple(self.tags), tuple(self.variables)
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "tags", tags)
        object.__setattr__(self, "variables", variables)
        if len(names) != len(tags):
            raise ValueError("every coframe symbol needs a block tag")
        for t in tags:
            if t not in TAGS:
                raise ValueError(f"unknown block tag {t!r}")
        seen = set()
        for n in names + variables:
            if n in seen:
                raise ValueError(f"duplicate declaration {n!r}")
            seen.add(n)
        object.__setattr__(self, "_index", {n: i for i, n in enumerate(names)})
        object.__setattr__(self, "_vindex", {n: i for i, n in enumerate(variables)})

    @property
    def size(self):
        return len(self.names)

    @property
    def nvars(self):
        return len(self.variables)

    def index(self, name):
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"unknown coframe symbol {name!r}") from None

    def var_index(self, name):
        try:
            return self._vindex[name]
        except KeyError:
            raise KeyError(f"unknown scalar variable {name!r}") from None

    def block(self, tag):
        return [i for i, t in enumerate(self.tags) if t == tag]

    def same(self, other):
        return self is other or self == other

    def poly(self, value):
        """Coerce a rational, a variable name or a ScalarPoly into this ring."""
        if isinstance(value, ScalarPoly):
            if value.nvars != self.nvars:
                raise DeclarationMismatch("polynomial arity does not match declaration")
            return value
        if isinstance(value, str) and value in self._vindex:
            return ScalarPoly.var(self.nvars, self._vindex[value])
        return ScalarPoly.const(self.nvars, value)

    def var(self, name):
        return ScalarPoly.var(self.nvars, self.var_index(name))


def _merge_sign(a, b):
    """Sign and sorted tuple of e_a ^ e_b, or (0, None) when an index repeats."""
    if set(a) & set(b):
        return 0, None
    inversions = 0
    for y in b:
        for x in a:
            if x > y:
                inversions += 1
    merged = tuple(sorted(a + b))
    return (-1 if inversions & 1 else 1), merged


class Form:
    """Element of the exterior algebra over ``decl``; possibly of mixed degree."""

    __slots__ = ("decl", "terms")

    def __init__(self, decl, terms=None):
        self.decl = decl
        clean = {}
        if terms:
            for mono, c in terms.items():
                c = decl.poly(c)
                mono = tuple(mono)
                if list(mono) != sorted(set(mono)):
                    raise ValueError(f"monomial {mono} is not strictly increasing")
                if c:
                    clean[mono] = c
        self.terms = clean

    @classmethod
    def _raw(cls, decl, terms):
        f = cls.__new__(cls)
        f.decl = decl
        f.terms = terms
        return f

    @classmethod
    def zero(cls, decl):
        return cls._raw(decl, {})

    @classmethod
    def scalar(cls, decl, value):
        p = decl.poly(value)
        return cls._raw(decl, {(): p} if p else {})

    @classmethod
    def symbol(cls, decl, name):
        return cls._raw(decl, {(decl.index(name),): ScalarPoly.const(decl.nvars, 1)})

    @classmethod
    def basis(cls, decl, *names):
        """Wedge monomial of the named symbols, in the given order."""
        out = cls.scalar(decl, 1)
        for n in names:
            out = out.wedge(cls.symbol(decl, n))
        return out

    def _check(self, other):
        if not self.decl.same(other.decl):
            raise DeclarationMismatch("forms live over different coframe declarations")

    def __add__(self, other):
        if not isinstance(other, Form):
            other = Form.scalar(self.decl, other)
        self._check(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out[m] + c if m in out else c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return Form._raw(self.decl, out)

    __radd__ = __add__

    def __neg__(self):
        return Form._raw(self.decl, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, Form):
            other = Form.scalar(self.decl, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        """Multiplication by a scalar (rational or polynomial), or by a 0-form."""
        if isinstance(other, Form):
            return self.wedge(other)
        p = self.decl.poly(other)
        if not p:
            return Form.zero(self.decl)
        out = {}
        for m, c in self.terms.items():
            v = c * p
            if v:
                out[m] = v
        return Form._raw(self.decl, out)

    __rmul__ = __mul__

    def __xor__(self, other):
        return self.wedge(other)

    def wedge(self, other):
        self._check(other)
        out = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                sign, m = _merge_sign(m1, m2)
                if not sign:
                    continue
                v = c1 * c2
                if sign < 0:
                    v = -v
                if m in out:
                    v = out[m] + v
                if v:
                    out[m] = v
                else:
                    out.pop(m, None)
        return Form._raw(self.decl, out)

    def __eq__(self, other):
        if isinstance(other, Form):
            return self.decl.same(other.decl) and self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    @property
    def degrees(self):
        return sorted({len(m) for m in self.terms})

    @property
    def degree(self):
        degs = self.degrees
        if not degs:
            return 0
        if len(degs) > 1:
            raise ValueError(f"form is not homogeneous (degrees {degs})")
        return degs[0]

    def coefficient(self, *names):
        """Coefficient of the wedge monomial of ``names`` (any order, sign-corrected)."""
        idx = [self.decl.index(n) for n in names]
        if len(set(idx)) != len(idx):
            return ScalarPoly(self.decl.nvars)
        sign = 1
        for i in range(len(idx)):
            for j in range(i + 1, len(idx)):
                if idx[i] > idx[j]:
                    sign = -sign
        c = self.terms.get(tuple(sorted(idx)), ScalarPoly(self.decl.nvars))
        return c if sign > 0 else -c

    def symbols(self):
        used = set()
        for m in self.terms:
            used.update(m)
        return sorted(used)

    def variables(self):
        used = set()
        for c in self.terms.values():
            used.update(c.variables())
        return sorted(used)

    def map_coefficients(self, fn):
        out = {}
        for m, c in self.terms.items():
            v = fn(c)
            if v:
                out[m] = v
        return Form._raw(self.decl, out)

    def evaluate(self, point):
        return evaluate(self, point)

    def format(self):
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms, key=lambda m: (len(m), m)):
            c = self.terms[m]
            mono = " ^ ".join(self.decl.names[i] for i in m)
            if c.is_constant():
                v = c.constant_value()
                sign = "-" if v < 0 else "+"
                a = abs(v)
                if not mono:
                    body = f"({a})" if a.denominator != 1 else str(a)
                elif a == 1:
                    body = mono
                elif a.denominator != 1:
                    body = f"({a})*{mono}"
                else:
                    body = f"{a}*{mono}"
            else:
                sign = "+"
                text = c.format(self.decl.variables)
                body = f"({text})" + (f"*{mono}" if mono else "")
            parts.append((sign, body))
        out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self):
        return f"Form({self.format()})"


def wedge(a, b):
    return a.wedge(b)


@dataclass(frozen=True)
class StructureRules:
    """``d`` of each coframe symbol (2-forms) and of each scalar variable (1-forms)."""

    decl: CoframeDecl
    dcoframe: dict
    dscalar: dict

    def __post_init__(self):
        for table in (self.dcoframe, self.dscalar):
            for name, f in table.items():
                if not f.decl.same(self.decl):
                    raise DeclarationMismatch(f"rule for {name!r} uses another declaration")
        for name, f in self.dcoframe.items():
            if f and f.degrees != [2]:
                raise ValueError(f"d{name} must be a 2-form")
        for name, f in self.dscalar.items():
            if f and f.degrees != [1]:
                raise ValueError(f"d({name}) must be a 1-form")


def _d_poly(p, rules):
    decl = rules.decl
    out = Form.zero(decl)
    for i in p.variables():
        name = decl.variables[i]
        rule = rules.dscalar.get(name)
        if rule is None:
            raise IncompleteRules(name)
        out = out + rule * p.diff(i)
    return out


def ext_d(a, rules):
    """Exterior derivative computed from the structure rules."""
    if not a.decl.same(rules.decl):
        raise DeclarationMismatch("form and rules use different declarations")
    decl = rules.decl
    one = ScalarPoly.const(decl.nvars, 1)
    out = Form.zero(decl)
    for mono, c in a.terms.items():
        if not c.is_constant():
            out = out + _d_poly(c, rules).wedge(Form._raw(decl, {mono: one}))
        for k, idx in enumerate(mono):
            name = decl.names[idx]
            rule = rules.dcoframe.get(name)
            if rule is None:
                raise IncompleteRules(name)
            if not rule:
                continue
            left = Form._raw(decl, {mono[:k]: one})
            right = Form._raw(decl, {mono[k + 1:]: one})
            piece = left.wedge(rule).wedge(right)
            out = out + (piece * c if k % 2 == 0 else piece * (-c))
    return out


def pullback(a, images, target):
    """Substitute coframe symbol ``i`` by the 1-form ``images[i]`` over ``target``.

    ``images`` maps source indices to forms; unmapped indices keep their
    index in the target declaration.  Coefficients are re-embedded by
    padding, so the target may only append variables.
    """
    nv = target.nvars
    one = ScalarPoly.const(nv, 1)
    cache = {}
    out = Form.zero(target)
    for mono, c in a.terms.items():
        piece = Form._raw(target, {(): c.extend(nv)})
        for idx in mono:
            img = images.get(idx)
            if img is None:
                img = cache.get(idx)
                if img is None:
                    img = cache[idx] = Form._raw(target, {(idx,): one})
            piece = piece.wedge(img)
        out = out + piece
    return out


def reembed(a, target):
    """Move a form into a declaration that only appended symbols/variables."""
    nv = target.nvars
    return Form._raw(target, {m: c.extend(nv) for m, c in a.terms.items()})


def row_reduce_one_forms(forms, candidates, with_origin=False):
    """Row-reduce 1-forms so each has a distinct leading symbol with coefficient 1.

    ``candidates`` lists symbol indices allowed as leaders, in priority
    order.  Leaders are never present in the other reduced forms.  Forms
    that reduce to zero are dropped; a nonzero form with no unit-coefficient
    candidate raises ``NonUnitPivot`` and carries the leftover form.  With
    ``with_origin`` each entry also records the input position it came from.
    """
    reduced = []  # list of (leader, form)
    origin = []
    for pos, f in enumerate(forms):
        for lead, g in reduced:
            c = f.terms.get((lead,))
            if c:
                f = f - g * c
        if not f:
            continue
        lead = None
        for idx in candidates:
            c = f.terms.get((idx,))
            if c and c.is_constant():
                lead = idx
                break
        if lead is None:
            err = NonUnitPivot("no constant-coefficient leading symbol available")
            err.leftover = f
            raise err
        f = f * (1 / f.terms[(lead,)].constant_value())
        new = []
        for l2, g in reduced:
            c = g.terms.get((lead,))
            if c:
                g = g - f * c
            new.append((l2, g))
        reduced = new + [(lead, f)]
        origin.append(pos)
    if with_origin:
        return [(lead, g, o) for (lead, g), o in zip(reduced, origin)]
    return reduced


def one_form_row(a):
    """Constant coefficients of an evaluated 1-form as a list over the coframe."""
    row = [Fraction(0)] * a.decl.size
    for m, c in a.terms.items():
        if len(m) != 1:
            raise ValueError("expected a 1-form")
        row[m[0]] = c.constant_value()
    return row


def _leader_order(decl):
    return decl.block("theta") + [i for i, t in enumerate(decl.tags) if t != "theta"]


def reduce_mod(a, gens, point=None):
    """Canonical normal form of ``a`` modulo the algebraic ideal of 1-forms ``gens``.

    Generators are row-reduced with leaders chosen from the theta block
    first, then by coframe order; every leader is then eliminated by
    substitution.  When ``point`` is given the generators must be
    independent there.
    """
    decl = a.decl
    for g in gens:
        if not g.decl.same(decl):
            raise DeclarationMismatch("generator uses another declaration")
        if g and g.degrees != [1]:
            raise ValueError("ideal generators must be 1-forms")
    if point is not None and gens:
        rows = [one_form_row(evaluate(g, point)) for g in gens]
        if rank(rows, decl.size) < len(gens):
            raise DegenerateIdeal("generators are dependent at the supplied point")
    reduced = row_reduce_one_forms(list(gens), _leader_order(decl))
    if len(reduced) < len([g for g in gens if g]):
        raise DegenerateIdeal("generators are linearly dependent")
    if all(g.terms.keys() == {(lead,)} for lead, g in reduced):
        drop = {lead for lead, _ in reduced}
        return Form._raw(decl, {m: c for m, c in a.terms.items() if not drop.intersection(m)})
    images = {lead: Form._raw(decl, {(lead,): ScalarPoly.const(decl.nvars, 1)}) - g
              for lead, g in reduced}
    return pullback(a, images, decl)


def interior_product(v, a):
    """Contract the vector with components ``v`` (dual-coframe basis) into ``a``."""
    decl = a.decl
    if len(v) != decl.size:
        raise ValueError(f"vector has {len(v)} components, coframe has {decl.size}")
    comps = [decl.poly(x) for x in v]
    out = {}
    for mono, c in a.terms.items():
        for k, idx in enumerate(mono):
            w = comps[idx]
            if not w:
                continue
            rest = mono[:k] + mono[k + 1:]
            val = c * w
            if k % 2:
                val = -val
            if rest in out:
                val = out[rest] + val
            if val:
                out[rest] = val
            else:
                out.pop(rest, None)
    return Form._raw(decl, out)


def point_values(decl, point, needed=None):
    """Positional list of values for the declaration's variables."""
    vals = [None] * decl.nvars
    for name, value in (point or {}).items():
        if name in decl._vindex:
            vals[decl._vindex[name]] = as_fraction(value)
    for i in (needed if needed is not None else range(decl.nvars)):
        if vals[i] is None:
            raise MissingAssignment(decl.variables[i])
    return vals


def evaluate_poly(p, decl, point):
    used = p.variables()
    vals = point_values(decl, point, used)
    return p.evaluate(vals)


def evaluate(a, point):
    """Substitute the rational ``point`` (name -> value) into every coefficient."""
    decl = a.decl
    vals = point_values(decl, point, a.variables())
    nv = decl.nvars
    out = {}
    for m, c in a.terms.items():
        v = c.evaluate(vals)
        if v:
            out[m] = ScalarPoly.const(nv, v)
    return Form._raw(decl, out)


def mc_check(rules):
    """Names whose ``d(d xi)`` is not identically zero; empty means consistent."""
    bad = []
    for name in rules.decl.names:
        rule = rules.dcoframe.get(name)
        if rule is None:
            raise IncompleteRules(name)
        if ext_d(rule, rules):
            bad.append(name)
    for name in rules.decl.variables:
        rule = rules.dscalar.get(name)
        if rule is None:
            continue
        if ext_d(rule, rules):
            bad.append(name)
    return bad


def change_coframe(rules, replacements):
    """Replace coframe symbols by new ones defined as ``new = old - rest``.

    ``replacements`` maps an old symbol name to ``(new_name, new_tag, rest)``
    where ``rest`` is a 1-form over the old declaration containing no
    replaced symbol.  Returns rules over the new declaration; the new
    symbol occupies the old symbol's slot.
    """
    decl = rules.decl
    names, tags = list(decl.names), list(decl.tags)
    replaced = {decl.index(o) for o in replacements}
    for old, (new, tag, rest) in replacements.items():
        if replaced.intersection(rest.symbols()):
            raise ValueError(f"definition of {new!r} involves a replaced symbol")
        i = decl.index(old)
        names[i], tags[i] = new, tag
    new_decl = CoframeDecl(tuple(names), tuple(tags), decl.variables)
    one = ScalarPoly.const(decl.nvars, 1)
    images = {}
    for old, (new, tag, rest) in replacements.items():
        i = decl.index(old)
        images[i] = Form._raw(new_decl, {(i,): one}) + Form._raw(new_decl, dict(rest.terms))
    dcoframe = {}
    for i, old in enumerate(decl.names):
        rule = rules.dcoframe[old]
        if old in replacements:
            rule = rule - ext_d(replacements[old][2], rules)
        dcoframe[names[i]] = pullback(rule, images, new_decl)
    dscalar = {v: pullback(f, images, new_decl) for v, f in rules.dscalar.items()}
    return StructureRules(new_decl, dcoframe, dscalar)


def extend_rules(rules, symbols=(), variables=(), dcoframe=None, dscalar=None):
    """Append coframe symbols ``[(name, tag)]`` and scalar variables.

    ``dcoframe``/``dscalar`` are callables taking the new declaration and
    returning the rules for the appended names.
    """
    decl = rules.decl
    new_decl = CoframeDecl(
        decl.names + tuple(n for n, _ in symbols),
        decl.tags + tuple(t for _, t in symbols),
        decl.variables + tuple(variables),
    )
    dc = {n: reembed(f, new_decl) for n, f in rules.dcoframe.items()}
    ds = {n: reembed(f, new_decl) for n, f in rules.dscalar.items()}
    if dcoframe:
        dc.update(dcoframe(new_decl))
    if dscalar:
        ds.update(dscalar(new_decl))
    return StructureRules(new_decl, dc, ds)
