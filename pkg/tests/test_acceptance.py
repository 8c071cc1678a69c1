"""One check per acceptance criterion; each prints a PASS/FAIL line."""

import random
import time
from fractions import Fraction

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from cartan_eds import catalog
from cartan_eds.cartan import STATUS_EMPTY, STATUS_INVOLUTIVE, analyze
from cartan_eds.forms import Form, ext_d
from cartan_eds.pfaffian import extract_tableau_torsion, frobenius_check, sample_point
from cartan_eds.tableau import Tableau, cartan_test, msubset_check, random_invertible
from cartan_eds.weierstrass import (SO3_CONE_RADIUS2, classical_weierstrass, holomorphic,
                                    isothermal_defect, mean_curvature_fd, so3_orbit_threefold,
                                    so3_point, verify_mesh)

from helpers import consistent_rules, forms, record, tableaux
from test_tableau import brute_force_prolongation_dim


def tableau_of(s):
    return extract_tableau_torsion(s, s.point or sample_point(s)).tableau


def test_criterion_1_cauchy_riemann():
    t0 = time.perf_counter()
    rep = analyze(catalog.build("cauchy-riemann"))
    dt = time.perf_counter() - t0
    last = rep.final
    ok = (last.characters == (2, 0) and last.dim_prolongation == 2
          and rep.status == STATUS_INVOLUTIVE and rep.generality_text == "2 functions of 1 variable"
          and dt < 1.0)
    assert record(1, ok, f"Cauchy-Riemann characters {last.characters}, dim A1 "
                         f"{last.dim_prolongation}, {rep.status}, '{rep.generality_text}', "
                         f"{dt:.3f}s (< 1s)")


def test_criterion_2_contact_systems():
    t0 = time.perf_counter()
    bad = []
    for n in range(1, 5):
        for s in range(1, 4):
            rep = analyze(catalog.build_contact_j1(n, s))
            last = rep.final
            if not (len(rep.iterations) == 1 and rep.status == STATUS_INVOLUTIVE
                    and last.characters == (s,) * n
                    and last.dim_prolongation == s * n * (n + 1) // 2
                    and rep.generality == (s, n)):
                bad.append((n, s))
    dt = time.perf_counter() - t0
    ok = not bad and dt < 5.0
    assert record(2, ok, f"J1(n,s) for n<=4, s<=3 involutive at iteration 0 with s_j = s "
                         f"(failures: {bad}), {dt:.2f}s (< 5s)")


def test_criterion_3_isometric_stage_one():
    details, ok = [], True
    for n, r in [(2, 1), (3, 3)]:
        res = cartan_test(tableau_of(catalog.build_isometric_embedding(n, r)))
        sums = [sum(res.characters[:k]) for k in range(1, n + 1)]
        want = [r * k + sum(n - j for j in range(1, k + 1)) for k in range(1, n + 1)]
        good = (res.dim_tableau == n * r + n * (n - 1) // 2
                and res.dim_prolongation == r * n * (n + 1) // 2
                and sums == want and not res.involutive)
        ok &= good
        details.append(f"(n,r)=({n},{r}) dim A {res.dim_tableau}, dim A1 {res.dim_prolongation}, "
                       f"s {tuple(res.characters)}, not involutive: {not res.involutive}")
    assert record(3, ok, "; ".join(details))


def test_criterion_4_isometric_after_prolongation():
    t0 = time.perf_counter()
    details, ok = [], True
    for n, r in [(2, 1), (3, 3)]:
        rep = analyze(catalog.build_isometric_embedding(n, r, "generic_from_h"))
        last = rep.final
        good = (rep.status == STATUS_INVOLUTIVE and len(rep.iterations) == 2
                and rep.generality == (n, n - 1)
                and rep.generality_text == f"{n} functions of {n - 1} variable"
                + ("s" if n - 1 != 1 else ""))
        ok &= good
        details.append(f"(n,r)=({n},{r}) {rep.status} after {len(rep.iterations) - 1} "
                       f"prolongation, s {last.characters}, '{rep.generality_text}'")
    dt = time.perf_counter() - t0
    ok &= dt < 60
    assert record(4, ok, "; ".join(details) + f", {dt:.2f}s (< 60s)")


def test_criterion_5_frobenius_trichotomy():
    got = {}
    for a, b in [("y", "x"), ("u", "0"), ("y", "0")]:
        s = catalog.build_frobenius_example(a, b)
        rep = analyze(s)
        got[(a, b)] = ("Frobenius" if frobenius_check(s) and rep.status == STATUS_INVOLUTIVE
                       else rep.status)
    ok = got == {("y", "x"): "Frobenius", ("u", "0"): "Frobenius", ("y", "0"): STATUS_EMPTY}
    assert record(5, ok, f"du - A dx - B dy verdicts for (A, B): {got}")


RULES = consistent_rules()


def test_criterion_6_property_suites():
    t0 = time.perf_counter()
    counts = {"anticommute": 0, "d2": 0, "cartan": 0, "basis": 0}

    @settings(max_examples=200, database=None, deadline=None)
    @given(st.sampled_from(RULES).flatmap(
        lambda r: st.tuples(st.just(r), forms(r.decl), forms(r.decl))))
    def forms_suite(data):
        rules, a, b = data
        p = a.degrees[0] if a.degrees else 0
        q = b.degrees[0] if b.degrees else 0
        assert (a ^ b) == (b ^ a) * (-1) ** (p * q)
        counts["anticommute"] += 1
        assert not ext_d(ext_d(a, rules), rules)
        counts["d2"] += 1

    @settings(max_examples=200, database=None, deadline=None)
    @given(tableaux(), st.integers(0, 10 ** 6))
    def tableau_suite(t, seed):
        n, s, basis = t
        A = Tableau.span(n, s, basis)
        res = cartan_test(A)
        assert res.dim_prolongation <= res.bound
        assert res.dim_prolongation == brute_force_prolongation_dim(n, s, A.basis)
        counts["cartan"] += 1
        rng = random.Random(seed)
        B = A.change_basis(random_invertible(n, rng), random_invertible(s, rng))
        rb = cartan_test(B)
        assert (rb.dim_prolongation, rb.involutive) == (res.dim_prolongation, res.involutive)
        counts["basis"] += 1

    failure = None
    try:
        forms_suite()
        tableau_suite()
    except AssertionError as err:
        failure = err
    dt = time.perf_counter() - t0
    ok = failure is None and min(counts.values()) >= 200 and dt < 60
    assert record(6, ok, f"property cases {counts}, {dt:.1f}s (< 60s)"
                         + (f", failure: {failure}" if failure else ""))


def test_criterion_7_weierstrass():
    t0 = time.perf_counter()
    f, g = holomorphic("1"), holomorphic("w")
    mesh = classical_weierstrass(f, g)
    ver = verify_mesh(mesh, 1e-6, 1e-4)
    worst_h = ver.checks[0][1]
    rng = np.random.default_rng(7)
    w = rng.uniform(-1, 1, 100) + 1j * rng.uniform(-1, 1, 100)
    iso = float(np.max(isothermal_defect(f, g, w)))

    def sphere(u, v):
        return np.array([u, v, np.sqrt(1 - u * u - v * v)])

    hs = abs(mean_curvature_fd(sphere, (0.0, 0.0), 1e-4))
    dt = time.perf_counter() - t0
    ok = worst_h < 1e-6 and iso < 1e-12 and abs(hs - 1) < 1e-4 and dt < 10
    assert record(7, ok, f"Enneper |H| {worst_h:.2e} (< 1e-6), Phi.Phi {iso:.2e} (< 1e-12), "
                         f"sphere |H| {hs:.8f} (within 1e-4 of 1), {dt:.2f}s (< 10s)")


def test_criterion_8_so3_orbits():
    t0 = time.perf_counter()
    h0 = holomorphic("0", "z")
    rng = np.random.default_rng(8)
    u, v = rng.uniform(-2, 2, 100), rng.uniform(-2, 2, 100)
    t = rng.uniform(0.5, 2, 100)
    x = so3_point(h0, t, u, v)
    cone = max(float(np.max(np.abs(so3_point(h0, lam * t, u, v) - lam * x)))
               for lam in (0.5, 2.0, 3.0))
    radius = float(np.max(np.abs(np.sum(x * x, axis=-1) / t ** 2 - SO3_CONE_RADIUS2)))
    ver = verify_mesh(so3_orbit_threefold(holomorphic("z**2", "z")), 1e-5)
    trace = ver.checks[0][1]
    dt = time.perf_counter() - t0
    ok = cone < 1e-12 and radius < 1e-12 and trace < 1e-5 and dt < 10
    assert record(8, ok, f"cone homogeneity {cone:.2e}, |x|^2/t^2 - 1/12 {radius:.2e}, "
                         f"h=z^2 |trace_g II| {trace:.2e} (< 1e-5), {dt:.2f}s (< 10s)")


def test_criterion_9_msubset():
    A = tableau_of(catalog.build_minimal_surface_system(1))
    rows = [i for i in range(A.s) if any(m[i][j] for m in A.basis for j in range(A.n))]
    block = Tableau(A.n, len(rows), [[m[i] for i in rows] for m in A.basis])
    full = Tableau.full(block.n, block.s)
    ok = msubset_check(A) and msubset_check(block) and not msubset_check(full)
    assert record(9, ok, f"minimal-surface tableau passes: {msubset_check(A)}, block passes: "
                         f"{msubset_check(block)}, full {block.s}x{block.n} tableau fails: "
                         f"{not msubset_check(full)}")


if __name__ == "__main__":
    import sys

    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except Exception:
                failed += 1
    sys.exit(1 if failed else 0)
