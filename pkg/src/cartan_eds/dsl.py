"""Plain-text format for Pfaffian systems, and the expression parser behind it.

A document looks like::

    version 1
    coframe
      du:theta dx:omega dy:omega
    vars
      x y u
    structure
      d du = 0
      d dx = 0
      d dy = 0
      d x = dx
      d y = dy
      d u = du
    ideal
      theta := du - y*dx - x*dy
    independence
      dx ^ dy
    point
      x = 1
      y = 1/2

Operator precedence, tightest first: ``**``, unary minus, ``^`` (wedge),
``*``, ``/``, then ``+`` and ``-``.  Division is only by constants and
``d(expr)`` only applies to 0-forms.
"""

import re
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import EDSError, ParseError
from .forms import TAGS, CoframeDecl, Form, StructureRules, change_coframe, ext_d
from .pfaffian import PfaffianSystem
from .poly import ScalarPoly

SECTIONS = ("coframe", "vars", "structure", "ideal", "independence", "point")
RESERVED = set(SECTIONS) | {"d", "exp", "version"}

_TOKEN = re.compile(r"\s*(?:(\d+(?:\.\d+)?)|([A-Za-z_][A-Za-z0-9_]*)|(\*\*|:=|[-+*/^()=:,]))")


@dataclass(frozen=True)
class Token:
    kind: str  # num, name, op, end
    text: str
    line: int
    col: int


def tokenize(text, line=1, col0=1):
    out = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            bad = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ParseError("syntax", f"unexpected character {text[bad]!r}", line, col0 + bad)
        start = m.start(m.lastindex)
        kind = ("num", "name", "op")[m.lastindex - 1]
        out.append(Token(kind, m.group(m.lastindex), line, col0 + start))
        pos = m.end()
    out.append(Token("end", "", line, col0 + len(text.rstrip())))
    return out


@dataclass
class Node:
    """Expression tree node: op is one of num, name, neg, add, sub, mul, div, wedge, pow, d, exp."""

    op: str
    args: tuple
    line: int
    col: int


class _Parser:
    def __init__(self, tokens, mode):
        self.toks = tokens
        self.i = 0
        self.mode = mode

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        if t.kind != "end":
            self.i += 1
        return t

    def expect(self, text):
        t = self.take()
        if t.text != text:
            raise ParseError("syntax", f"expected {text!r}, found {t.text or 'end of line'!r}",
                             t.line, t.col)
        return t

    def parse(self):
        node = self.sum()
        t = self.peek()
        if t.kind != "end":
            raise ParseError("syntax", f"unexpected {t.text!r}", t.line, t.col)
        return node

    def sum(self):
        node = self.quot()
        while self.peek().text in ("+", "-") and self.peek().kind == "op":
            t = self.take()
            node = Node("add" if t.text == "+" else "sub", (node, self.quot()), t.line, t.col)
        return node

    def quot(self):
        node = self.prod()
        while self.peek().text == "/":
            t = self.take()
            node = Node("div", (node, self.prod()), t.line, t.col)
        return node

    def prod(self):
        node = self.wedge()
        while self.peek().text == "*":
            t = self.take()
            node = Node("mul", (node, self.wedge()), t.line, t.col)
        return node

    def wedge(self):
        node = self.unary()
        while self.peek().text == "^":
            t = self.take()
            if self.mode != "form":
                raise ParseError("syntax", "wedge is only allowed in form expressions", t.line, t.col)
            node = Node("wedge", (node, self.unary()), t.line, t.col)
        return node

    def unary(self):
        t = self.peek()
        if t.kind == "op" and t.text == "-":
            self.take()
            return Node("neg", (self.unary(),), t.line, t.col)
        if t.kind == "op" and t.text == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        node = self.atom()
        if self.peek().text == "**":
            t = self.take()
            node = Node("pow", (node, self.exponent()), t.line, t.col)
        return node

    def exponent(self):
        t = self.peek()
        paren = t.text == "("
        if paren:
            self.take()
        sign = 1
        if self.peek().text == "-":
            self.take()
            sign = -1
        num = self.take()
        if num.kind != "num" or "." in num.text:
            raise ParseError("syntax", "exponent must be an integer", num.line, num.col)
        if paren:
            self.expect(")")
        return sign * int(num.text)

    def atom(self):
        t = self.take()
        if t.kind == "num":
            return Node("num", (Fraction(t.text),), t.line, t.col)
        if t.kind == "name":
            if t.text in ("d", "exp") and self.peek().text == "(":
                if t.text == "d" and self.mode != "form":
                    raise ParseError("degree-mismatch", "d(...) is only allowed in form expressions",
                                     t.line, t.col)
                if t.text == "exp" and self.mode != "holo":
                    raise ParseError("syntax", "exp is only available in holomorphic expressions",
                                     t.line, t.col)
                self.take()
                inner = self.sum()
                self.expect(")")
                return Node(t.text, (inner,), t.line, t.col)
            return Node("name", (t.text,), t.line, t.col)
        if t.text == "(":
            inner = self.sum()
            self.expect(")")
            return inner
        raise ParseError("syntax", f"unexpected {t.text or 'end of line'!r}", t.line, t.col)


def parse_expr(text, mode="form", line=1, col=1):
    """Parse one expression into a Node tree."""
    try:
        return _Parser(tokenize(text, line, col), mode).parse()
    except RecursionError:
        raise ParseError("syntax", "expression nested too deeply", line, col) from None


# evaluation


class _FormEval:
    def __init__(self, decl, dscalar=None):
        self.decl = decl
        self.dscalar = dscalar if dscalar is not None else {}
        self.cofr = set(decl.names)
        self.vars = set(decl.variables)

    def scalar_of(self, f, node, what):
        if not f.terms:
            return ScalarPoly(self.decl.nvars)
        if set(f.terms) != {()}:
            raise ParseError("degree-mismatch", f"{what} needs a 0-form operand", node.line, node.col)
        return f.terms[()]

    def __call__(self, node):
        op, a = node.op, node.args
        decl = self.decl
        if op == "num":
            return Form.scalar(decl, a[0])
        if op == "name":
            name = a[0]
            if name in self.cofr:
                return Form.symbol(decl, name)
            if name in self.vars:
                return Form.scalar(decl, decl.var(name))
            raise ParseError("unknown-symbol", f"{name!r} is not declared", node.line, node.col)
        if op == "neg":
            return -self(a[0])
        if op in ("add", "sub"):
            x, y = self(a[0]), self(a[1])
            return x + y if op == "add" else x - y
        if op == "wedge":
            return self(a[0]).wedge(self(a[1]))
        if op == "mul":
            x, y = self(a[0]), self(a[1])
            if _is_scalar(x):
                return y * self.scalar_of(x, a[0], "*")
            if _is_scalar(y):
                return x * self.scalar_of(y, a[1], "*")
            raise ParseError("degree-mismatch", "product of two forms; use ^ for wedge",
                             node.line, node.col)
        if op == "div":
            x, y = self(a[0]), self(a[1])
            c = self.scalar_of(y, a[1], "/")
            if not c.is_constant() or not c:
                raise ParseError("syntax", "division only by nonzero constants", node.line, node.col)
            return x * (1 / c.constant_value())
        if op == "pow":
            x = self(a[0])
            p = self.scalar_of(x, a[0], "**")
            if a[1] < 0:
                raise ParseError("syntax", "negative powers are not polynomial", node.line, node.col)
            return Form.scalar(decl, p ** a[1])
        if op == "d":
            x = self(a[0])
            p = self.scalar_of(x, node, "d(...)")
            for i in p.variables():
                name = decl.variables[i]
                if name not in self.dscalar:
                    raise ParseError("incomplete-rules", f"no rule for d {name}", node.line, node.col)
            rules = StructureRules(decl, {}, self.dscalar)
            return ext_d(Form.scalar(decl, p), rules)
        raise ParseError("syntax", f"unsupported operation {op}", node.line, node.col)


def _is_scalar(f):
    return not f.terms or set(f.terms) == {()}


def parse_scalar(text, variables):
    """Polynomial in the named variables, e.g. ``"x*y - (3/2)*u**2"``.

    Division binds more loosely than multiplication, so ``3/2*u`` reads as
    ``3/(2*u)`` and is rejected; parenthesize rational coefficients.
    """
    decl = CoframeDecl((), (), tuple(variables))
    node = parse_expr(text, "scalar")
    f = _FormEval(decl)(node)
    return f.terms.get((), ScalarPoly(decl.nvars))


def parse_holomorphic(text, var="w"):
    """HolomorphicExpr in one complex variable; ``i`` is the imaginary unit."""
    from . import weierstrass as W

    node = parse_expr(text, "holo")

    def ev(n):
        op, a = n.op, n.args
        if op == "num":
            v = a[0]
            return W.Const(int(v) if v.denominator == 1 else v)
        if op == "name":
            if a[0] == var:
                return W.Var(var)
            if a[0] == "i":
                return W.Const(1j)
            raise ParseError("unknown-symbol", f"{a[0]!r} is not {var!r} or i", n.line, n.col)
        if op == "neg":
            return W.Neg(ev(a[0]))
        if op == "add":
            return W.Add(ev(a[0]), ev(a[1]))
        if op == "sub":
            return W.Sub(ev(a[0]), ev(a[1]))
        if op == "mul":
            return W.Mul(ev(a[0]), ev(a[1]))
        if op == "div":
            return W.Div(ev(a[0]), ev(a[1]))
        if op == "pow":
            return W.Pow(ev(a[0]), a[1])
        if op == "exp":
            return W.Exp(ev(a[0]))
        raise ParseError("syntax", f"unsupported operation {op}", n.line, n.col)

    return ev(node)


# documents


@dataclass
class SystemDocument:
    coframe: tuple
    variables: tuple
    rules: dict
    ideal: tuple
    independence: object = None
    point: dict = None
    positions: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def decl(self):
        return CoframeDecl(tuple(n for n, _ in self.coframe), tuple(t for _, t in self.coframe),
                           self.variables)


def _fmt_rational(x):
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def print_document(doc):
    lines = ["version 1", "coframe"]
    for name, tag in doc.coframe:
        lines.append(f"  {name}:{tag}")
    if doc.variables:
        lines.append("vars")
        lines.append("  " + " ".join(doc.variables))
    lines.append("structure")
    for name in [n for n, _ in doc.coframe] + list(doc.variables):
        if name in doc.rules:
            lines.append(f"  d {name} = {doc.rules[name].format()}")
    if doc.ideal:
        lines.append("ideal")
        for name, f in doc.ideal:
            lines.append(f"  {name} := {f.format()}" if name else f"  {f.format()}")
    if doc.independence is not None:
        lines.append("independence")
        lines.append(f"  {doc.independence.format()}")
    if doc.point:
        lines.append("point")
        for k in doc.variables:
            if k in doc.point:
                lines.append(f"  {k} = {_fmt_rational(doc.point[k])}")
    return "\n".join(lines) + "\n"


def _strip(raw):
    k = raw.find("#")
    return raw if k < 0 else raw[:k]


def parse_system(text):
    """Parse a document; every failure is a ParseError with a location."""
    try:
        return _parse_system(text)
    except ParseError:
        raise
    except RecursionError:
        raise ParseError("syntax", "input nested too deeply") from None
    except (EDSError, ValueError, KeyError, ZeroDivisionError, OverflowError, TypeError) as err:
        raise ParseError("syntax", str(err)) from None


def _parse_system(text):
    if not isinstance(text, str):
        raise ParseError("syntax", "document must be text")
    body = []
    for k, raw in enumerate(text.splitlines(), 1):
        s = _strip(raw)
        if s.strip():
            body.append((k, s))
    if not body:
        raise ParseError("syntax", "empty document; expected 'version 1'", 1, 1)
    k, first = body[0]
    toks = first.split()
    if toks[0] != "version":
        raise ParseError("syntax", "first line must be 'version 1'", k, 1)
    if len(toks) != 2 or toks[1] != "1":
        col = first.index(toks[1]) + 1 if len(toks) > 1 else len(first.rstrip()) + 1
        raise ParseError("syntax", "unsupported version; expected 'version 1'", k, col)
    sections = {}
    current = None
    for k, s in body[1:]:
        stripped = s.strip()
        head = stripped.split(None, 1)[0]
        col = s.index(head) + 1
        if head in SECTIONS and (len(stripped) == len(head) or head != "d"):
            if head in sections:
                raise ParseError("duplicate-declaration", f"section {head!r} appears twice", k, col)
            sections[head] = []
            current = head
            rest = stripped[len(head):]
            if rest.strip():
                sections[head].append((k, s[col - 1 + len(head):], col + len(head)))
            continue
        if current is None:
            raise ParseError("syntax", f"expected a section keyword, found {head!r}", k, col)
        sections[current].append((k, s, 1))

    # declarations
    names, tags, variables = [], [], []
    where = {}
    for k, s, c0 in sections.get("coframe", []):
        toks = tokenize(s, k, c0)
        i = 0
        while toks[i].kind != "end":
            t = toks[i]
            if t.text == ",":
                i += 1
                continue
            if t.kind != "name" or toks[i + 1].text != ":" or toks[i + 2].kind != "name":
                raise ParseError("syntax", "coframe entries look like name:tag", t.line, t.col)
            tag = toks[i + 2]
            if tag.text not in TAGS:
                raise ParseError("syntax", f"unknown block tag {tag.text!r}", tag.line, tag.col)
            _declare(t, where)
            names.append(t.text)
            tags.append(tag.text)
            i += 3
    for k, s, c0 in sections.get("vars", []):
        for t in tokenize(s, k, c0):
            if t.kind == "end" or t.text == ",":
                continue
            if t.kind != "name":
                raise ParseError("syntax", "vars lists names", t.line, t.col)
            _declare(t, where)
            variables.append(t.text)
    if not names:
        raise ParseError("syntax", "no coframe declared", body[0][0], 1)
    decl = CoframeDecl(tuple(names), tuple(tags), tuple(variables))

    # structure rules, parsed first and evaluated scalars-first
    parsed = {}
    for k, s, c0 in sections.get("structure", []):
        toks = tokenize(s, k, c0)
        if toks[0].text != "d" or toks[1].kind != "name" or toks[2].text != "=":
            raise ParseError("syntax", "rules look like 'd name = expression'", toks[0].line,
                             toks[0].col)
        target = toks[1]
        if target.text not in where:
            raise ParseError("unknown-symbol", f"{target.text!r} is not declared", target.line,
                             target.col)
        if target.text in parsed:
            raise ParseError("duplicate-declaration", f"second rule for {target.text!r}",
                             target.line, target.col)
        start = toks[3]
        node = parse_expr(s[start.col - c0:], "form", k, start.col) if start.kind != "end" else None
        if node is None:
            raise ParseError("syntax", "missing right-hand side", start.line, start.col)
        parsed[target.text] = node
    dscalar, dcoframe = {}, {}
    ev = _FormEval(decl, dscalar)
    for v in variables:
        if v in parsed:
            f = ev(parsed[v])
            _check_degree(f, 1, parsed[v], f"d {v}")
            dscalar[v] = f
    for n in names:
        if n in parsed:
            f = ev(parsed[n])
            _check_degree(f, 2, parsed[n], f"d {n}")
            dcoframe[n] = f

    ideal, ideal_nodes, defined = [], [], set()
    for k, s, c0 in sections.get("ideal", []):
        toks = tokenize(s, k, c0)
        label = None
        if toks[0].kind == "name" and toks[1].text == ":=":
            label = toks[0]
            if label.text in where or label.text in defined or label.text in RESERVED:
                raise ParseError("duplicate-declaration", f"{label.text!r} is already declared",
                                 label.line, label.col)
            defined.add(label.text)
            start = toks[2]
        else:
            start = toks[0]
        if start.kind == "end":
            raise ParseError("syntax", "missing ideal generator", start.line, start.col)
        node = parse_expr(s[start.col - c0:], "form", k, start.col)
        f = ev(node)
        _check_degree(f, 1, node, "ideal generator")
        ideal.append((label.text if label else None, f))
        ideal_nodes.append(node)

    independence, ind_node = None, None
    ind_lines = sections.get("independence", [])
    if len(ind_lines) > 1:
        k = ind_lines[1][0]
        raise ParseError("syntax", "independence takes a single expression", k, 1)
    for k, s, c0 in ind_lines:
        ind_node = parse_expr(s, "form", k, c0)
        independence = ev(ind_node)
        degs = independence.degrees
        if len(degs) > 1 or not independence:
            raise ParseError("degree-mismatch", "independence must be a nonzero decomposable form",
                             ind_node.line, ind_node.col)

    point = None
    for k, s, c0 in sections.get("point", []):
        toks = tokenize(s, k, c0)
        t = toks[0]
        if t.kind != "name" or toks[1].text != "=":
            raise ParseError("syntax", "point entries look like 'name = value'", t.line, t.col)
        if t.text not in variables:
            raise ParseError("unknown-symbol", f"{t.text!r} is not a declared variable", t.line, t.col)
        point = point if point is not None else {}
        if t.text in point:
            raise ParseError("duplicate-declaration", f"{t.text!r} assigned twice", t.line, t.col)
        start = toks[2]
        if start.kind == "end":
            raise ParseError("syntax", "missing value", start.line, start.col)
        node = parse_expr(s[start.col - c0:], "scalar", k, start.col)
        val = _FormEval(CoframeDecl((), (), ()))(node)
        point[t.text] = val.terms[()].constant_value() if val.terms else Fraction(0)

    # every symbol in use needs a rule; report at the first use site
    uses = []
    for node in list(parsed.values()) + ideal_nodes + ([ind_node] if ind_node else []):
        _collect_names(node, uses)
    for n in names:
        if n not in dcoframe:
            site = next(((u.line, u.col) for u in uses if u.args[0] == n), where[n])
            raise ParseError("incomplete-rules", f"no rule for d {n}", *site)
    for v in variables:
        if v not in dscalar:
            site = next(((u.line, u.col) for u in uses if u.args[0] == v), None)
            if site is not None:
                raise ParseError("incomplete-rules", f"no rule for d {v}", *site)

    doc = SystemDocument(tuple(zip(names, tags)), tuple(variables),
                         {**dcoframe, **dscalar}, tuple(ideal), independence, point)
    doc.positions = {"ideal": [(n.line, n.col) for n in ideal_nodes],
                     "independence": (ind_node.line, ind_node.col) if ind_node else None}
    return doc


def _declare(tok, where):
    if tok.text in RESERVED:
        raise ParseError("syntax", f"{tok.text!r} is a reserved word", tok.line, tok.col)
    if tok.text in where:
        raise ParseError("duplicate-declaration", f"{tok.text!r} declared twice", tok.line, tok.col)
    where[tok.text] = (tok.line, tok.col)


def _start(node):
    """Leftmost source position of an expression."""
    best = (node.line, node.col)
    for a in node.args:
        if isinstance(a, Node):
            best = min(best, _start(a))
    return best


def _check_degree(f, deg, node, what):
    if f and f.degrees != [deg]:
        raise ParseError("degree-mismatch", f"{what} must have degree {deg}, got {f.degrees}",
                         *_start(node))


def _collect_names(node, out):
    if node.op == "name":
        out.append(node)
        return
    for a in node.args:
        if isinstance(a, Node):
            _collect_names(a, out)


# documents <-> systems


def system_from_document(doc):
    """Build a PfaffianSystem; ``name := expr`` ideal entries become new theta symbols."""
    decl = doc.decl
    rules = StructureRules(decl, {n: doc.rules[n] for n in decl.names},
                           {v: doc.rules[v] for v in decl.variables if v in doc.rules})
    pos = doc.positions.get("ideal") or [(1, 1)] * len(doc.ideal)
    repl, theta_names = {}, []
    for k, (label, f) in enumerate(doc.ideal):
        if len(f.terms) == 1 and label is None:
            (m, c), = f.terms.items()
            if c == 1:
                theta_names.append(decl.names[m[0]])
                continue
        lead = None
        for pref in ("theta", "pi", "other"):
            for (i,), c in sorted(f.terms.items()):
                if decl.tags[i] == pref and c.is_constant():
                    lead = i
                    break
            if lead is not None:
                break
        if lead is None:
            raise ParseError("tag-mismatch", "ideal generator has no constant-coefficient "
                             "non-independence symbol to replace", *pos[k])
        c = f.terms[(lead,)].constant_value()
        g = f * (1 / c)
        rest = Form._raw(decl, {m: -v for m, v in g.terms.items() if m != (lead,)})
        name = label or f"theta{k + 1}"
        if decl.names[lead] in repl:
            raise ParseError("tag-mismatch", "two ideal generators replace the same symbol", *pos[k])
        repl[decl.names[lead]] = (name, "theta", rest)
        theta_names.append(name)
    replaced = {decl.index(o) for o in repl}
    for _, _, rest in repl.values():
        if replaced.intersection(rest.symbols()):
            raise ParseError("tag-mismatch", "ideal generators must be in solved form "
                             "(each replaced symbol appears in one generator only)", *pos[0])
    if repl:
        rules = change_coframe(rules, repl)
    new = rules.decl
    thetas = {new.names[i] for i in new.block("theta")}
    if not doc.ideal:
        theta_names = sorted(thetas)
    if thetas != set(theta_names):
        raise ParseError("tag-mismatch", "ideal must consist of exactly the theta-tagged symbols",
                         *(pos[0] if pos else (1, 1)))
    omegas = [new.names[i] for i in new.block("omega")]
    if doc.independence is not None:
        ind = doc.independence
        site = doc.positions.get("independence") or (1, 1)
        ok = len(ind.terms) == 1
        if ok:
            (m, c), = ind.terms.items()
            ok = c in (1, -1) and sorted(decl.names[i] for i in m) == sorted(omegas)
        if not ok:
            raise ParseError("tag-mismatch",
                             "independence must be the wedge of all omega-tagged symbols", *site)
    return PfaffianSystem(rules, dict(doc.point) if doc.point is not None else None)


def document_from_system(sys):
    decl = sys.decl
    rules = dict(sys.rules.dcoframe)
    rules.update(sys.rules.dscalar)
    ideal = tuple((None, Form.symbol(decl, decl.names[i])) for i in sys.thetas)
    ind = sys.independence() if sys.omegas else None
    return SystemDocument(tuple(zip(decl.names, decl.tags)), decl.variables, rules, ideal, ind,
                          dict(sys.point) if sys.point is not None else None)


def parse_point(text, variables=None):
    """``name = rational`` lines (an optional ``point`` header is allowed)."""
    out = {}
    for k, raw in enumerate(text.splitlines(), 1):
        s = _strip(raw)
        if not s.strip() or s.strip() == "point":
            continue
        toks = tokenize(s, k, 1)
        t = toks[0]
        if t.kind != "name" or toks[1].text != "=" or toks[2].kind == "end":
            raise ParseError("syntax", "point entries look like 'name = value'", t.line, t.col)
        if variables is not None and t.text not in variables:
            raise ParseError("unknown-symbol", f"{t.text!r} is not a declared variable", t.line, t.col)
        if t.text in out:
            raise ParseError("duplicate-declaration", f"{t.text!r} assigned twice", t.line, t.col)
        start = toks[2]
        val = _FormEval(CoframeDecl((), (), ()))(parse_expr(s[start.col - 1:], "scalar", k, start.col))
        out[t.text] = val.terms[()].constant_value() if val.terms else Fraction(0)
    return out


def load_system(text):
    return system_from_document(parse_system(text))


def dump_system(sys):
    return print_document(document_from_system(sys))
