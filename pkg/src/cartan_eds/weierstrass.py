"""Minimal-surface representation formulas, evaluated numerically.

Two parametrizations are provided: the classical Weierstrass integrals for
surfaces in E^3 and a closed-form family of SO(3)-orbit minimal 3-folds in
E^5 built from one holomorphic function h(z).  Minimality is checked by
finite differences.
"""

import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import DegenerateMetric, EmptyGrid, SingularIntegrand, UnsupportedFormat

SQRT3 = math.sqrt(3.0)


# holomorphic expressions


class HolomorphicExpr:
    """Expression tree in one complex variable."""

    def __call__(self, w):
        return self.eval(w)

    def __add__(self, other):
        return Add(self, _lift(other))

    def __radd__(self, other):
        return Add(_lift(other), self)

    def __sub__(self, other):
        return Sub(self, _lift(other))

    def __rsub__(self, other):
        return Sub(_lift(other), self)

    def __mul__(self, other):
        return Mul(self, _lift(other))

    def __rmul__(self, other):
        return Mul(_lift(other), self)

    def __truediv__(self, other):
        return Div(self, _lift(other))

    def __neg__(self):
        return Neg(self)

    def __pow__(self, k):
        return Pow(self, k)

    def __repr__(self):
        return f"HolomorphicExpr({self})"


def _lift(x):
    return x if isinstance(x, HolomorphicExpr) else Const(x)


@dataclass(frozen=True, repr=False)
class Const(HolomorphicExpr):
    value: object

    def eval(self, w):
        v = self.value
        v = complex(v) if isinstance(v, complex) else float(Fraction(v)) if not isinstance(v, float) else v
        return v + 0 * np.asarray(w, dtype=complex)

    def derivative(self):
        return Const(0)

    def is_zero(self):
        return self.value == 0

    def __str__(self):
        v = self.value
        if isinstance(v, complex):
            if v == 1j:
                return "i"
            return f"({v.real}+{v.imag}*i)"
        return str(v) if Fraction(v) >= 0 else f"({v})"


@dataclass(frozen=True, repr=False)
class Var(HolomorphicExpr):
    name: str = "w"

    def eval(self, w):
        return np.asarray(w, dtype=complex)

    def derivative(self):
        return Const(1)

    def __str__(self):
        return self.name


@dataclass(frozen=True, repr=False)
class Add(HolomorphicExpr):
    a: HolomorphicExpr
    b: HolomorphicExpr

    def eval(self, w):
        return self.a.eval(w) + self.b.eval(w)

    def derivative(self):
        return _simplify_add(self.a.derivative(), self.b.derivative())

    def __str__(self):
        return f"{self.a} + {self.b}"


@dataclass(frozen=True, repr=False)
class Sub(HolomorphicExpr):
    a: HolomorphicExpr
    b: HolomorphicExpr

    def eval(self, w):
        return self.a.eval(w) - self.b.eval(w)

    def derivative(self):
        da, db = self.a.derivative(), self.b.derivative()
        if _zero(db):
            return da
        return Sub(da, db)

    def __str__(self):
        return f"{self.a} - ({self.b})"


@dataclass(frozen=True, repr=False)
class Neg(HolomorphicExpr):
    a: HolomorphicExpr

    def eval(self, w):
        return -self.a.eval(w)

    def derivative(self):
        return Neg(self.a.derivative())

    def __str__(self):
        return f"-({self.a})"


@dataclass(frozen=True, repr=False)
class Mul(HolomorphicExpr):
    a: HolomorphicExpr
    b: HolomorphicExpr

    def eval(self, w):
        return self.a.eval(w) * self.b.eval(w)

    def derivative(self):
        return _simplify_add(_simplify_mul(self.a.derivative(), self.b),
                             _simplify_mul(self.a, self.b.derivative()))

    def __str__(self):
        return f"({self.a})*({self.b})"


@dataclass(frozen=True, repr=False)
class Div(HolomorphicExpr):
    a: HolomorphicExpr
    b: HolomorphicExpr

    def eval(self, w):
        with np.errstate(divide="ignore", invalid="ignore"):
            return self.a.eval(w) / self.b.eval(w)

    def derivative(self):
        num = Sub(_simplify_mul(self.a.derivative(), self.b),
                  _simplify_mul(self.a, self.b.derivative()))
        return Div(num, Pow(self.b, 2))

    def __str__(self):
        return f"({self.a})/({self.b})"


@dataclass(frozen=True, repr=False)
class Pow(HolomorphicExpr):
    a: HolomorphicExpr
    k: int

    def __post_init__(self):
        if not isinstance(self.k, int):
            raise ValueError("only integer powers are supported")

    def eval(self, w):
        base = self.a.eval(w)
        if self.k >= 0:
            return base ** self.k
        with np.errstate(divide="ignore", invalid="ignore"):
            return 1.0 / base ** (-self.k)

    def derivative(self):
        if self.k == 0:
            return Const(0)
        inner = self.a.derivative()
        outer = Const(self.k) if self.k == 1 else Mul(Const(self.k), Pow(self.a, self.k - 1))
        return _simplify_mul(outer, inner)

    def __str__(self):
        return f"({self.a})**{self.k}" if self.k >= 0 else f"({self.a})**({self.k})"


@dataclass(frozen=True, repr=False)
class Exp(HolomorphicExpr):
    a: HolomorphicExpr

    def eval(self, w):
        return np.exp(self.a.eval(w))

    def derivative(self):
        return _simplify_mul(self, self.a.derivative())

    def __str__(self):
        return f"exp({self.a})"


def _zero(e):
    return isinstance(e, Const) and e.value == 0


def _one(e):
    return isinstance(e, Const) and e.value == 1


def _simplify_add(a, b):
    if _zero(a):
        return b
    if _zero(b):
        return a
    return Add(a, b)


def _simplify_mul(a, b):
    if _zero(a) or _zero(b):
        return Const(0)
    if _one(a):
        return b
    if _one(b):
        return a
    return Mul(a, b)


def holomorphic(text, var="w"):
    """Parse an expression such as ``"w**2 + exp(i*w)/3"``."""
    from .dsl import parse_holomorphic
    return parse_holomorphic(text, var)


# meshes


@dataclass
class ParamMesh:
    axes: list
    axis_names: tuple
    points: np.ndarray
    func: object = field(default=None, repr=False)

    @property
    def dim(self):
        return self.points.shape[-1]

    @property
    def shape(self):
        return self.points.shape[:-1]

    def params(self):
        """Array of parameter tuples in row-major grid order."""
        grids = np.meshgrid(*self.axes, indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=-1)


def parse_grid(spec, naxes=None):
    """``"a:b:n,c:d:m"`` -> list of numpy axes (n evenly spaced samples each)."""
    axes = []
    for part in spec.split(","):
        bits = part.strip().split(":")
        if len(bits) != 3:
            raise ValueError(f"grid axis {part!r} is not of the form start:stop:count")
        lo, hi, cnt = float(bits[0]), float(bits[1]), int(bits[2])
        if cnt < 0:
            raise ValueError("grid counts must be nonnegative")
        axes.append(np.linspace(lo, hi, cnt))
    if naxes is not None and len(axes) != naxes:
        raise ValueError(f"expected {naxes} grid axes, got {len(axes)}")
    return axes


def _check_grid(axes):
    if not axes or any(len(a) == 0 for a in axes):
        raise EmptyGrid("grid has no points")


# classical formula


def weierstrass_integrand(f, g, w):
    """Phi = (f(1 - g^2)/2, i f (1 + g^2)/2, f g)."""
    fw, gw = f.eval(w), g.eval(w)
    return np.stack([0.5 * fw * (1 - gw ** 2), 0.5j * fw * (1 + gw ** 2), fw * gw], axis=-1)


def isothermal_defect(f, g, w):
    """|Phi . Phi| relative to |Phi|^2; vanishes identically for the Weierstrass data."""
    phi = weierstrass_integrand(f, g, w)
    num = np.abs(np.sum(phi * phi, axis=-1))
    den = np.sum(np.abs(phi) ** 2, axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(den > 0, num / np.where(den > 0, den, 1), num)


class WeierstrassIntegrator:
    """Composite Gauss-Legendre integration of Phi along straight segments."""

    def __init__(self, f, g, w0=0j, panels=8, order=16, blowup=1e12):
        self.f, self.g, self.w0 = f, g, complex(w0)
        x, wts = np.polynomial.legendre.leggauss(order)
        # nodes and weights on [0, 1] split into panels
        nodes, weights = [], []
        for k in range(panels):
            a, b = k / panels, (k + 1) / panels
            nodes.append(a + (b - a) * (x + 1) / 2)
            weights.append((b - a) / 2 * wts)
        self.s = np.concatenate(nodes)
        self.ws = np.concatenate(weights)
        self.blowup = blowup

    def segment(self, a, b):
        a = np.asarray(a, dtype=complex)
        b = np.asarray(b, dtype=complex)
        w = a[..., None] + (b - a)[..., None] * self.s
        phi = weierstrass_integrand(self.f, self.g, w)
        if not np.all(np.isfinite(phi)) or np.max(np.abs(phi), initial=0) > self.blowup:
            raise SingularIntegrand("integrand blows up on the integration path")
        return (b - a)[..., None] * np.einsum("...kc,k->...c", phi, self.ws)

    def path(self, vertices):
        """Complex integral of Phi along a polyline starting at w0."""
        total = 0
        prev = self.w0
        for v in vertices:
            total = total + self.segment(prev, v)
            prev = v
        return total

    def coords(self, w):
        return np.real(self.segment(self.w0, w))


def classical_weierstrass(f, g, w0=0j, grid="-1:1:11,-1:1:11", panels=8, order=16):
    """Mesh of x + i y... = Re of the Weierstrass integrals over a grid in w."""
    axes = parse_grid(grid, 2) if isinstance(grid, str) else [np.asarray(a, float) for a in grid]
    _check_grid(axes)
    integ = WeierstrassIntegrator(f, g, w0, panels, order)
    U, V = np.meshgrid(axes[0], axes[1], indexing="ij")
    pts = integ.coords(U + 1j * V)

    def func(u, v):
        return integ.coords(np.asarray(u + 1j * v))

    return ParamMesh(axes, ("u", "v"), pts, func)


# SO(3)-orbit 3-folds in E^5


def so3_point(h, t, u, v, dh=None):
    """Closed-form point of the 3-fold attached to h at (t, z = u + i v)."""
    dh = dh or h.derivative()
    z = np.asarray(u, dtype=float) + 1j * np.asarray(v, dtype=float)
    t = np.asarray(t, dtype=float)
    w, y = h.eval(z), dh.eval(z)
    r = np.abs(z) ** 2
    q = 1 + r
    zb, wb, yb = np.conj(z), np.conj(w), np.conj(y)
    x0 = ((1 - 4 * r + r * r) / (2 * SQRT3 * q ** 2) * t
          + 2 * (-2 + 2 * r + r * r) / (SQRT3 * q ** 4) * np.real(zb ** 2 * w)
          - (-5 + 2 * r + r * r) / (2 * SQRT3 * q ** 3) * np.real(zb * y))
    a = (z * (1 - r) / q ** 2 * t
         - 2 * zb * r * (2 + r) / q ** 4 * w
         - 2 * z ** 3 / q ** 4 * wb
         - (1 - 2 * r - r * r) / (2 * q ** 3) * y
         + z ** 2 / q ** 3 * yb)
    b = (z ** 2 / q ** 2 * t
         + (1 + 4 * r + 2 * r * r) / q ** 4 * w
         - z ** 4 / q ** 4 * wb
         - z * (r + 2) / (2 * q ** 3) * y
         + z ** 3 / (2 * q ** 3) * yb)
    return np.stack([np.real(x0), a.real, a.imag, b.real, b.imag], axis=-1)


# sum of squared coordinates over t^2 on the h = 0 cone
SO3_CONE_RADIUS2 = 1.0 / 12.0


def so3_orbit_threefold(h, grid="0.5:2:6,-1:1:9,-1:1:9"):
    axes = parse_grid(grid, 3) if isinstance(grid, str) else [np.asarray(a, float) for a in grid]
    _check_grid(axes)
    dh = h.derivative()
    T, U, V = np.meshgrid(*axes, indexing="ij")
    pts = so3_point(h, T, U, V, dh)

    def func(t, u, v):
        return so3_point(h, t, u, v, dh)

    return ParamMesh(axes, ("t", "u", "v"), pts, func)


# finite-difference curvature


def _derivatives(func, p, step):
    p = np.asarray(p, dtype=float)
    k = len(p)
    I = np.eye(k)
    x0 = np.asarray(func(*p), dtype=float)
    d1 = [(np.asarray(func(*(p + step * I[i])), float)
           - np.asarray(func(*(p - step * I[i])), float)) / (2 * step) for i in range(k)]
    d2 = [[None] * k for _ in range(k)]
    for i in range(k):
        fp = np.asarray(func(*(p + step * I[i])), float)
        fm = np.asarray(func(*(p - step * I[i])), float)
        d2[i][i] = (fp - 2 * x0 + fm) / step ** 2
        for j in range(i + 1, k):
            e = step * (I[i] + I[j])
            f = step * (I[i] - I[j])
            val = (np.asarray(func(*(p + e)), float) - np.asarray(func(*(p + f)), float)
                   - np.asarray(func(*(p - f)), float) + np.asarray(func(*(p - e)), float)) / (4 * step ** 2)
            d2[i][j] = d2[j][i] = val
    return x0, np.array(d1), np.array(d2)


def _metric(D):
    g = D @ D.T
    scale = max(float(np.max(np.abs(g))), 1e-300)
    if abs(np.linalg.det(g)) < 1e-12 * scale ** len(g):
        raise DegenerateMetric("first fundamental form is degenerate at the point")
    return g


def graph_mean_curvature(zx, zy, zxx, zxy, zyy):
    """Mean curvature of a graph z(x, y) from its first and second derivatives."""
    num = (1 + zy ** 2) * zxx - 2 * zx * zy * zxy + (1 + zx ** 2) * zyy
    return 0.5 * num / (1 + zx ** 2 + zy ** 2) ** 1.5


def mean_curvature_fd(param, point, step=1e-4):
    """H for surfaces in E^3, else |trace_g II|, by central differences.

    ``param`` is a ParamMesh (its parametrization is used) or a callable of
    the parameters.  For surfaces in E^3 the surface is written locally as
    a graph over its tangent plane and the graph formula is applied.
    """
    if not (1e-6 <= step <= 1e-2):
        raise ValueError("step must lie in [1e-6, 1e-2]")
    func = param.func if isinstance(param, ParamMesh) else param
    x0, D, D2 = _derivatives(func, point, step)
    k, m = D.shape
    g = _metric(D)
    if k == 2 and m == 3:
        n = np.cross(D[0], D[1])
        n /= np.linalg.norm(n)
        e1 = D[0] / np.linalg.norm(D[0])
        e2 = np.cross(n, e1)
        F = np.array([e1, e2, n])
        # local coordinates (X, Y, Z) and their parameter derivatives
        J = D @ F[:2].T            # d(X, Y)/d(u, v), rows u, v
        Zd = D @ F[2]
        Jinv = np.linalg.inv(J)
        zgrad = Jinv @ Zd          # (z_X, z_Y)
        HX = np.einsum("ija,a->ij", D2, F[0])
        HY = np.einsum("ija,a->ij", D2, F[1])
        HZ = np.einsum("ija,a->ij", D2, F[2])
        hess = Jinv @ (HZ - zgrad[0] * HX - zgrad[1] * HY) @ Jinv.T
        return float(graph_mean_curvature(zgrad[0], zgrad[1], hess[0, 0], hess[0, 1], hess[1, 1]))
    ginv = np.linalg.inv(g)
    Q, _ = np.linalg.qr(D.T)
    trace = np.einsum("ij,ija->a", ginv, D2)
    normal = trace - Q @ (Q.T @ trace)
    return float(np.linalg.norm(normal))


def interior_points(mesh, count=20, margin=1):
    """Up to ``count`` parameter tuples away from the grid boundary."""
    idx = [np.arange(margin, len(a) - margin) for a in mesh.axes]
    if any(len(i) == 0 for i in idx):
        idx = [np.arange(len(a)) for a in mesh.axes]
    grids = np.meshgrid(*idx, indexing="ij")
    flat = np.stack([g.ravel() for g in grids], axis=-1)
    if len(flat) > count:
        sel = np.linspace(0, len(flat) - 1, count).round().astype(int)
        flat = flat[sel]
    return [tuple(float(mesh.axes[d][i]) for d, i in enumerate(row)) for row in flat]


def metric_ratio(func, point, step=1e-4):
    """Smallest over largest eigenvalue of the first fundamental form."""
    _, D, _ = _derivatives(func, point, step)
    ev = np.linalg.eigvalsh(D @ D.T)
    return float(ev[0] / ev[-1]) if ev[-1] > 0 else 0.0


def regular_points(mesh, count=20, min_ratio=1e-2, step=1e-4):
    """Interior grid points whose metric is well conditioned (away from singular parameters)."""
    pts = interior_points(mesh, 10 * count)
    good = [p for p in pts if metric_ratio(mesh.func, p, step) >= min_ratio]
    if len(good) > count:
        sel = np.linspace(0, len(good) - 1, count).round().astype(int)
        good = [good[i] for i in sel]
    return good


@dataclass
class Verification:
    checks: list

    @property
    def ok(self):
        return all(c[2] for c in self.checks)

    def lines(self):
        return [f"{'PASS' if ok else 'FAIL'} {name}: {value:.3e}" for name, value, ok in self.checks]


def verify_mesh(mesh, tol, step=1e-4, f=None, g=None, count=20):
    """Finite-difference minimality at regular interior points, plus Phi.Phi = 0 when (f, g) given."""
    pts = regular_points(mesh, count, step=step)
    if not pts:
        raise DegenerateMetric("no well-conditioned interior points to verify")
    worst = max(abs(mean_curvature_fd(mesh, p, step)) for p in pts)
    label = "mean curvature |H|" if mesh.dim == 3 else "|trace_g II|"
    checks = [(f"{label} over {len(pts)} points", worst, worst < tol)]
    if f is not None and g is not None:
        U, V = np.meshgrid(mesh.axes[0], mesh.axes[1], indexing="ij")
        iso = float(np.max(isothermal_defect(f, g, U + 1j * V)))
        checks.append(("isothermal defect |Phi.Phi|/|Phi|^2", iso, iso < 1e-12))
    return Verification(checks)


# export


def export_mesh(mesh, fmt, path):
    """Write the mesh as OBJ (surfaces in E^3) or CSV (any dimension)."""
    fmt = fmt.lower()
    if mesh.points.size == 0:
        raise EmptyGrid("mesh has no points")
    if fmt == "obj":
        if mesh.dim != 3 or len(mesh.axes) != 2:
            raise UnsupportedFormat("OBJ export needs a 2-parameter mesh in E^3")
        nu, nv = mesh.shape
        with open(path, "w") as fh:
            for p in mesh.points.reshape(-1, 3):
                fh.write("v {!r} {!r} {!r}\n".format(*(float(c) for c in p)))
            for i in range(nu - 1):
                for j in range(nv - 1):
                    a = i * nv + j + 1
                    fh.write(f"f {a} {a + nv} {a + nv + 1} {a + 1}\n")
        return path
    if fmt == "csv":
        params = mesh.params()
        coords = mesh.points.reshape(-1, mesh.dim)
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(list(mesh.axis_names) + [f"x{k}" for k in range(mesh.dim)])
            for pr, c in zip(params, coords):
                wr.writerow([repr(float(x)) for x in pr] + [repr(float(x)) for x in c])
        return path
    raise UnsupportedFormat(f"unknown mesh format {fmt!r}")
