"""Command-line front end.

Exit codes: 0 success, 1 no integral manifolds or failed verification,
2 usage, parse or input errors.  Diagnostics go to stderr.
"""

import argparse
import json
import os
import sys
from fractions import Fraction

from . import catalog, dsl
from .cartan import STATUS_EMPTY, analyze
from .errors import DegenerateMetric, EDSError, NoIntegralElement, ParseError
from .linalg import in_span
from .pfaffian import cauchy_characteristics, extract_tableau_torsion, sample_point, torsion_class
from .tableau import Tableau, cartan_test, delta_generators, msubset_check, prolong

OK, FAIL, USAGE = 0, 1, 2


class _Usage(Exception):
    pass


def _read(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as err:
        raise _Usage(f"cannot read {path}: {err.strerror}") from None


def _frac(x):
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _emit(data, path=None):
    text = json.dumps(data, sort_keys=True, indent=2)
    print(text)
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")


def _load_system(path, point_path=None, seed=0):
    text = _read(path)
    s = dsl.load_system(text)
    if point_path:
        pt = dsl.parse_point(_read(point_path), s.decl.variables)
        s = s.with_point({**(s.point or {}), **pt})
    if s.decl.variables and set(s.point or {}) != set(s.decl.variables):
        s = s.with_point(sample_point(s, seed))
    return s


def _load_tableau(args):
    """(tableau, torsion matrices or None) from --tableau or FILE at --point."""
    if args.tableau:
        raw = args.tableau
        if not raw.lstrip().startswith("{"):
            raw = _read(raw)
        try:
            data = json.loads(raw)
            A = Tableau.from_json(data)
        except (ValueError, KeyError, TypeError) as err:
            raise _Usage(f"bad tableau JSON: {err}") from None
        T = data.get("torsion")
        return A, ([[[Fraction(x) for x in row] for row in m] for m in T] if T else None), None
    if not args.file:
        raise _Usage("give a system FILE or --tableau JSON")
    s = _load_system(args.file, args.point, args.seed)
    ex = extract_tableau_torsion(s)
    return ex.tableau, None, ex


def _tableau_summary(A, trials, seed):
    res = cartan_test(A, trials, seed)
    return {"dim_tableau": res.dim_tableau, "characters": list(res.characters.values),
            "cartan_bound": res.bound, "dim_prolongation": res.dim_prolongation,
            "involutive": res.involutive}


def cmd_analyze(args):
    s = _load_system(args.file, args.point, args.seed)
    rep = analyze(s, max_prolongations=args.max_prolong, seed=args.seed)
    text = rep.dumps()
    print(text)
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    if rep.status == STATUS_EMPTY:
        print("no integral manifolds: torsion does not vanish", file=sys.stderr)
        return FAIL
    return OK


def cmd_characters(args):
    A, _, _ = _load_tableau(args)
    _emit(_tableau_summary(A, args.trials, args.seed), args.json)
    return OK


def cmd_prolong(args):
    A, _, _ = _load_tableau(args)
    P = prolong(A)
    _emit({"n": A.n, "s": A.s, "dim_prolongation": P.dim,
           "basis": [[[[_frac(x) for x in row] for row in m] for m in X] for X in P.tensors()]},
          args.json)
    return OK


def cmd_torsion(args):
    A, T, ex = _load_tableau(args)
    if ex is not None:
        tc = torsion_class(ex, symbolic=False)
        out = {"zero": tc.zero, "representative": [_frac(x) for x in tc.representative],
               "residuals": [_frac(x) for x in tc.residuals]}
    else:
        if T is None:
            raise _Usage("tableau JSON needs a 'torsion' entry (s matrices n x n)")
        comps, gens = delta_generators(A)
        rep = [T[a][i][j] for (a, i, j) in comps]
        zero = in_span(rep, gens, len(comps))
        out = {"zero": zero, "representative": [_frac(x) for x in rep]}
    _emit(out, args.json)
    return OK if out["zero"] else FAIL


def cmd_cauchy(args):
    s = _load_system(args.file, args.point, args.seed)
    dim, basis = cauchy_characteristics(s)
    names = s.decl.names
    _emit({"dimension": dim, "coframe": list(names),
           "basis": [[_frac(x) for x in v] for v in basis]}, args.json)
    return OK


def _param_value(text):
    try:
        return int(text)
    except ValueError:
        return text


def cmd_catalog(args):
    params = {}
    for item in args.params or []:
        if "=" not in item:
            raise _Usage(f"parameter {item!r} must look like key=value")
        k, v = item.split("=", 1)
        params[k.strip()] = _param_value(v.strip())
    if args.name not in catalog.CATALOG:
        raise _Usage(f"unknown catalog system {args.name!r}; known: {', '.join(catalog.CATALOG)}")
    try:
        s = catalog.build(args.name, **params)
    except TypeError as err:
        raise _Usage(f"bad parameters for {args.name}: {err}") from None
    if args.dump:
        with open(args.dump, "w", encoding="utf-8") as fh:
            fh.write(dsl.dump_system(s))
    rep = analyze(s, max_prolongations=args.max_prolong, seed=args.seed)
    text = rep.dumps()
    print(text)
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    return FAIL if rep.status == STATUS_EMPTY else OK


def cmd_weierstrass(args):
    from . import weierstrass as W

    if args.kind == "classical":
        if args.f is None or args.g is None:
            raise _Usage("classical needs --f and --g")
        f, g = W.holomorphic(args.f), W.holomorphic(args.g)
        mesh = W.classical_weierstrass(f, g, grid=args.grid or "-1:1:11,-1:1:11")
    else:
        if args.h is None:
            raise _Usage("so3 needs --h")
        f = g = None
        mesh = W.so3_orbit_threefold(W.holomorphic(args.h, "z"),
                                     grid=args.grid or "0.5:2:6,-1:1:9,-1:1:9")
    if args.out:
        fmt = args.format or os.path.splitext(args.out)[1].lstrip(".") or "csv"
        W.export_mesh(mesh, fmt, args.out)
        print(f"wrote {mesh.points.size // mesh.dim} points to {args.out}")
    if args.verify is not None:
        try:
            ver = W.verify_mesh(mesh, args.verify, args.step, f, g)
        except DegenerateMetric as err:
            print(f"verification failed: {err}", file=sys.stderr)
            return FAIL
        for line in ver.lines():
            print(line)
        return OK if ver.ok else FAIL
    return OK


def cmd_msubset(args):
    A, _, _ = _load_tableau(args)
    ok = msubset_check(A)
    _emit({"msubset": ok, "dim_tableau": A.dim, "dim_prolongation": prolong(A).dim}, args.json)
    return OK


def build_parser():
    p = argparse.ArgumentParser(prog="cartan-eds",
                                description="Exterior differential systems workbench")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, tableau=False):
        if tableau:
            sp.add_argument("file", nargs="?", help="system document")
            sp.add_argument("--tableau", help="tableau JSON (inline or a path)")
        else:
            sp.add_argument("file", help="system document")
        sp.add_argument("--point", help="file of 'name = value' lines")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--json", help="also write the JSON output here")

    sp = sub.add_parser("analyze", help="run the Cartan-Kahler loop on a system")
    common(sp)
    sp.add_argument("--max-prolong", type=int, default=3)
    sp.set_defaults(func=cmd_analyze)

    for name, fn, hlp in (("characters", cmd_characters, "Cartan characters of a tableau"),
                          ("prolong", cmd_prolong, "first prolongation of a tableau"),
                          ("torsion", cmd_torsion, "torsion class at a point"),
                          ("msubset", cmd_msubset, "trace-free prolongation criterion")):
        sp = sub.add_parser(name, help=hlp)
        common(sp, tableau=True)
        if name == "characters":
            sp.add_argument("--trials", type=int, default=5)
        sp.set_defaults(func=fn)

    sp = sub.add_parser("cauchy", help="Cauchy characteristics at a point")
    common(sp)
    sp.set_defaults(func=cmd_cauchy)

    sp = sub.add_parser("catalog", help="materialize and analyze a catalog system")
    sp.add_argument("name")
    sp.add_argument("--params", nargs="*", default=[], metavar="KEY=VALUE")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--max-prolong", type=int, default=3)
    sp.add_argument("--json", help="also write the report here")
    sp.add_argument("--dump", help="write the system document here")
    sp.set_defaults(func=cmd_catalog)

    sp = sub.add_parser("weierstrass", help="minimal submanifold meshes")
    sp.add_argument("kind", choices=("classical", "so3"))
    sp.add_argument("--f")
    sp.add_argument("--g")
    sp.add_argument("--h")
    sp.add_argument("--grid")
    sp.add_argument("--out")
    sp.add_argument("--format", choices=("obj", "csv"))
    sp.add_argument("--verify", type=float, metavar="TOL")
    sp.add_argument("--step", type=float, default=1e-4)
    sp.set_defaults(func=cmd_weierstrass)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else OK
    try:
        return args.func(args)
    except ParseError as err:
        where = getattr(args, "file", None)
        print(f"{where + ':' if where else ''}{err}", file=sys.stderr)
        return USAGE
    except NoIntegralElement as err:
        print(f"no integral manifolds: {err}", file=sys.stderr)
        return FAIL
    except (_Usage, EDSError, ValueError, KeyError) as err:
        print(f"error: {err}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
