"""Metric families and exact point evaluation of their curvature.

Every family has polynomial or rational metric components, so first to third
partial derivatives of the metric at a point are computed exactly (up to
round-off) by propagating Taylor jets.  The Levi-Civita curvature and its
covariant derivative follow from closed formulas in those jets.  A
central-difference pipeline that only calls ``metric_value`` serves as an
independent oracle.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .polynomial import PolySpec
from .tensor_core import BilinearForm, CurvatureTensor, InnerProduct, kulkarni_nomizu_gg

DOMAIN_EPS = 1e-9


class DomainError(ValueError):
    """Point outside the domain where the family's metric is nondegenerate."""


class FamilyError(ValueError):
    """Invalid family parameters or an operation applied to the wrong variant."""


# -- jets -------------------------------------------------------------------------


class Jet:
    """Value and first three derivative tensors of a scalar field at a point."""

    __slots__ = ("d",)

    def __init__(self, d0, d1, d2, d3):
        self.d = (float(d0), np.asarray(d1, float), np.asarray(d2, float), np.asarray(d3, float))

    @property
    def n(self) -> int:
        return self.d[1].shape[0]

    @classmethod
    def const(cls, value: float, n: int) -> "Jet":
        return cls(value, np.zeros(n), np.zeros((n, n)), np.zeros((n, n, n)))

    @classmethod
    def of_poly(cls, poly: PolySpec, point) -> "Jet":
        return cls(*poly.derivatives(point, 3))

    def __add__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.d[0] + other, *self.d[1:])
        return Jet(*(a + b for a, b in zip(self.d, other.d)))

    __radd__ = __add__

    def __neg__(self):
        return Jet(*(-a for a in self.d))

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet(*(a * other for a in self.d))
        f0, f1, f2, f3 = self.d
        g0, g1, g2, g3 = other.d
        h1 = f1 * g0 + f0 * g1
        h2 = f2 * g0 + np.outer(f1, g1) + np.outer(g1, f1) + f0 * g2
        h3 = (
            f3 * g0
            + np.einsum("ab,c->abc", f2, g1) + np.einsum("ac,b->abc", f2, g1) + np.einsum("bc,a->abc", f2, g1)
            + np.einsum("ab,c->abc", g2, f1) + np.einsum("ac,b->abc", g2, f1) + np.einsum("bc,a->abc", g2, f1)
            + f0 * g3
        )
        return Jet(f0 * g0, h1, h2, h3)

    __rmul__ = __mul__

    def compose(self, h0, h1, h2, h3) -> "Jet":
        """Jet of ``phi(self)`` given ``phi`` and its derivatives at ``self``'s value."""
        s0, s1, s2, s3 = self.d
        d1 = h1 * s1
        d2 = h2 * np.outer(s1, s1) + h1 * s2
        d3 = (
            h3 * np.einsum("a,b,c->abc", s1, s1, s1)
            + h2 * (np.einsum("ab,c->abc", s2, s1) + np.einsum("ac,b->abc", s2, s1) + np.einsum("bc,a->abc", s2, s1))
            + h1 * s3
        )
        return Jet(h0, d1, d2, d3)

    def embed(self, index: list[int], n: int) -> "Jet":
        """Re-express over ``n`` coordinates; own coordinate ``k`` becomes ``index[k]``."""
        ix = np.asarray(index)
        d1 = np.zeros(n)
        d1[ix] = self.d[1]
        d2 = np.zeros((n, n))
        d2[np.ix_(ix, ix)] = self.d[2]
        d3 = np.zeros((n, n, n))
        d3[np.ix_(ix, ix, ix)] = self.d[3]
        return Jet(self.d[0], d1, d2, d3)


def stack_jets(entries: list[list[Jet]]) -> tuple[np.ndarray, ...]:
    """Matrix of jets to arrays ``g[i,j]``, ``dg[i,j,a]``, ``ddg[i,j,a,b]``, ``dddg[i,j,a,b,c]``."""
    return tuple(np.array([[e.d[k] for e in row] for row in entries]) for k in range(4))


@dataclass(frozen=True, eq=False)
class MetricJet:
    point: np.ndarray
    g: InnerProduct
    dg: np.ndarray
    ddg: np.ndarray
    dddg: np.ndarray | None = None

    @property
    def order(self) -> int:
        return 2 if self.dddg is None else 3


# -- families --------------------------------------------------------------------


def _default_coords(n: int, j: int, scale: float = 1.0) -> np.ndarray:
    # avoid coordinate hyperplanes and accidental symmetry
    return scale * 0.1 * np.arange(1, n + 1) * (1.0 + 0.25 * j) * np.array([(-1) ** i for i in range(n)], float) ** j


class MetricFamily:
    """Base class.  Subclasses supply coordinates, signature and metric jets."""

    name: str = ""

    @property
    def coordinates(self) -> tuple[str, ...]:
        raise NotImplementedError

    @property
    def dim(self) -> int:
        return len(self.coordinates)

    def signature_at(self, point) -> tuple[int, int]:
        raise NotImplementedError

    def check_domain(self, point) -> np.ndarray:
        x = np.asarray(point, dtype=float)
        if x.shape != (self.dim,):
            raise DomainError(f"{self.name}: point must have {self.dim} coordinates, got {x.shape}")
        return x

    def metric_value(self, point) -> np.ndarray:
        """Metric components at ``point`` by direct evaluation (no jets)."""
        raise NotImplementedError

    def metric_jet_arrays(self, point) -> tuple[np.ndarray, ...]:
        raise NotImplementedError

    def default_points(self, n: int = 5) -> list[np.ndarray]:
        return [_default_coords(self.dim, j) for j in range(n)]

    # curvature of the family (not of its Weyl tensor) known nilpotent
    nilpotent_curvature: bool = False
    nilpotent_weyl: bool = False

    def params(self) -> dict:
        return {}

    def describe(self) -> dict:
        return {"family": self.name, **self.params()}


@dataclass(frozen=True, eq=False)
class ConstantCurvature(MetricFamily):
    """``eta / sigma^2`` with ``sigma = 1 + (c/4) eta(x, x)``: curvature ``c``."""

    c: float
    p: int
    q: int
    name = "const"

    def __post_init__(self):
        if self.p < 0 or self.q < 0 or self.p + self.q < 1:
            raise FamilyError("constant curvature family needs p, q >= 0 and p + q >= 1")

    @cached_property
    def coordinates(self):
        return tuple(f"x{i + 1}" for i in range(self.p + self.q))

    @cached_property
    def eta(self) -> np.ndarray:
        return np.array([-1.0] * self.p + [1.0] * self.q)

    @cached_property
    def sigma_poly(self) -> PolySpec:
        v = self.coordinates
        terms = [((0,) * len(v), 1.0)]
        for i, e in enumerate(self.eta):
            exps = [0] * len(v)
            exps[i] = 2
            terms.append((tuple(exps), self.c / 4.0 * e))
        return PolySpec(v, tuple(terms))

    def _sigma(self, x) -> float:
        s = self.sigma_poly(x)
        if abs(s) < DOMAIN_EPS:
            raise DomainError(f"conformal factor vanishes at {x}")
        return s

    def signature_at(self, point):
        self._sigma(self.check_domain(point))
        return (self.p, self.q)

    def metric_value(self, point):
        x = self.check_domain(point)
        return np.diag(self.eta) / self._sigma(x) ** 2

    def factor_jet(self, point) -> Jet:
        x = self.check_domain(point)
        s = self._sigma(x)
        return Jet.of_poly(self.sigma_poly, x).compose(s**-2, -2 * s**-3, 6 * s**-4, -24 * s**-5)

    def metric_jet_arrays(self, point):
        h = self.factor_jet(point)
        m = self.dim
        zero = Jet.const(0.0, m)
        return stack_jets([[h * e if i == j else zero for j in range(m)] for i, e in enumerate(self.eta)])

    def default_points(self, n=5):
        return [_default_coords(self.dim, j, scale=1.0 / self.dim) for j in range(n)]

    def params(self):
        return {"c": self.c, "p": self.p, "q": self.q}


@dataclass(frozen=True, eq=False)
class WarpedProduct(MetricFamily):
    """``eps dt^2 + (eps kappa t^2 + A t + B) g_N`` over a constant curvature base.

    The base ``g_N`` is ``ConstantCurvature(kappa, base_p, base_q)``.  The
    metric is flat exactly when ``A^2 - 4 eps kappa B = 0``; such parameters are
    rejected.
    """

    eps: int
    kappa: float
    A: float
    B: float
    base_p: int = 0
    base_q: int = 2
    name = "warped"

    def __post_init__(self):
        if self.eps not in (1, -1):
            raise FamilyError("eps must be +1 or -1")
        if abs(self.A**2 - 4 * self.eps * self.kappa * self.B) < 1e-12:
            raise FamilyError("A^2 - 4*eps*kappa*B = 0 gives a flat metric")
        if self.base_p + self.base_q < 1:
            raise FamilyError("base must have positive dimension")

    @cached_property
    def base(self) -> ConstantCurvature:
        return ConstantCurvature(self.kappa, self.base_p, self.base_q)

    @cached_property
    def coordinates(self):
        return ("t",) + self.base.coordinates

    @cached_property
    def warp_poly(self) -> PolySpec:
        return PolySpec(("t",), (((2,), self.eps * self.kappa), ((1,), self.A), ((0,), self.B)))

    def _warp(self, t: float) -> float:
        w = self.warp_poly([t])
        if abs(w) < DOMAIN_EPS:
            raise DomainError(f"warping function vanishes at t={t}")
        return w

    def signature_at(self, point):
        x = self.check_domain(point)
        w = self._warp(x[0])
        bp, bq = self.base.signature_at(x[1:])
        p, q = (bp, bq) if w > 0 else (bq, bp)
        return (p + 1, q) if self.eps < 0 else (p, q + 1)

    def metric_value(self, point):
        x = self.check_domain(point)
        out = np.zeros((self.dim, self.dim))
        out[0, 0] = self.eps
        out[1:, 1:] = self._warp(x[0]) * self.base.metric_value(x[1:])
        return out

    def metric_jet_arrays(self, point):
        x = self.check_domain(point)
        m = self.dim
        self._warp(x[0])
        w = Jet.of_poly(self.warp_poly, x[:1]).embed([0], m)
        h = self.base.factor_jet(x[1:]).embed(list(range(1, m)), m) * w
        zero = Jet.const(0.0, m)
        rows = [[Jet.const(float(self.eps), m)] + [zero] * (m - 1)]
        for i, e in enumerate(self.base.eta):
            rows.append([zero] * (i + 1) + [h * e] + [zero] * (m - i - 2))
        return stack_jets(rows)

    def default_points(self, n=5):
        pts = []
        for j in range(n):
            t = 0.1 * (1.0 + 0.25 * j)
            pts.append(np.concatenate([[t], _default_coords(self.dim - 1, j, scale=1.0 / self.dim)]))
        return pts

    def params(self):
        return {"eps": self.eps, "kappa": self.kappa, "A": self.A, "B": self.B,
                "base_p": self.base_p, "base_q": self.base_q}


@dataclass(frozen=True, eq=False)
class HypersurfaceGf(MetricFamily):
    """Neutral metric on ``O x R^p`` with coordinates ``(x_1..x_p, y_1..y_p)``.

    ``g(dx_i, dx_j) = f_i f_j``, ``g(dx_i, dy_j) = delta_ij``, ``g(dy, dy) = 0``
    where ``f_i`` is the partial derivative of ``f(x)``.
    """

    p: int
    f: PolySpec
    name = "gf"
    nilpotent_curvature = True
    nilpotent_weyl = True

    def __post_init__(self):
        if self.p < 2:
            raise FamilyError("gf family needs p >= 2")
        want = tuple(f"x{i + 1}" for i in range(self.p))
        if not set(self.f.variables) <= set(want):
            raise FamilyError(f"f must be a polynomial in {want}, got variables {self.f.variables}")
        if self.f.variables != want:
            object.__setattr__(self, "f", self.f.embed(want))

    @classmethod
    def definite_default(cls, p: int) -> "HypersurfaceGf":
        v = tuple(f"x{i + 1}" for i in range(p))
        terms = []
        for i in range(p):
            e2 = [0] * p
            e2[i] = 2
            e4 = [0] * p
            e4[i] = 4
            terms += [(tuple(e2), 1.0), (tuple(e4), 0.1)]
        return cls(p, PolySpec(v, tuple(terms)))

    @classmethod
    def indefinite_default(cls, p: int) -> "HypersurfaceGf":
        v = tuple(f"x{i + 1}" for i in range(p))
        terms = []
        for i in range(p):
            e2 = [0] * p
            e2[i] = 2
            terms.append((tuple(e2), -1.0 if i == p - 1 else 1.0))
        return cls(p, PolySpec(v, tuple(terms)))

    @classmethod
    def quadratic(cls, p: int) -> "HypersurfaceGf":
        """``f = x_1^2 + ... + x_p^2``: the locally symmetric member."""
        v = tuple(f"x{i + 1}" for i in range(p))
        return cls(p, PolySpec(v, tuple((tuple(2 if k == i else 0 for k in range(p)), 1.0) for i in range(p))))

    @cached_property
    def coordinates(self):
        return tuple(f"x{i + 1}" for i in range(self.p)) + tuple(f"y{i + 1}" for i in range(self.p))

    @cached_property
    def gradient_polys(self) -> list[PolySpec]:
        return [self.f.diff(i).embed(self.coordinates) for i in range(self.p)]

    def signature_at(self, point):
        self.check_domain(point)
        return (self.p, self.p)

    def metric_value(self, point):
        x = self.check_domain(point)
        p = self.p
        df = np.array([d(x) for d in self.gradient_polys])
        out = np.zeros((2 * p, 2 * p))
        out[:p, :p] = np.outer(df, df)
        out[:p, p:] = np.eye(p)
        out[p:, :p] = np.eye(p)
        return out

    def metric_jet_arrays(self, point):
        x = self.check_domain(point)
        p, m = self.p, 2 * self.p
        df = [Jet.of_poly(d, x) for d in self.gradient_polys]
        zero, one = Jet.const(0.0, m), Jet.const(1.0, m)
        rows = []
        for i in range(m):
            row = []
            for j in range(m):
                if i < p and j < p:
                    row.append(df[i] * df[j])
                elif (i < p) != (j < p) and i % p == j % p:
                    row.append(one)
                else:
                    row.append(zero)
            rows.append(row)
        return stack_jets(rows)

    def hessian(self, point) -> np.ndarray:
        x = self.check_domain(point)
        return self.f.derivatives(x[: self.p], 2)[2]

    def params(self):
        return {"p": self.p, "f": str(self.f)}


@dataclass(frozen=True, eq=False)
class FamilyGF(MetricFamily):
    """Signature ``(2s, s)`` metric on coordinates ``(u_1..u_s, t_1..t_s, v_1..v_s)``.

    ``g(du_i, du_i) = -2F(u) - 2 sum_j u_j t_j`` with ``F = f_1(u_1) + ... + f_s(u_s)``,
    ``g(du_i, dv_i) = 1`` and ``g(dt_i, dt_i) = -1``.  Each ``f_i`` is a
    univariate polynomial in the variable ``u``.
    """

    s: int
    fs: tuple[PolySpec, ...]
    name = "gF"
    nilpotent_curvature = True
    nilpotent_weyl = True

    def __post_init__(self):
        if self.s < 2:
            raise FamilyError("gF family needs s >= 2")
        if len(self.fs) != self.s:
            raise FamilyError(f"need {self.s} functions f_i, got {len(self.fs)}")
        for f in self.fs:
            if f.variables != ("u",):
                raise FamilyError(f"each f_i must be univariate in 'u', got {f.variables}")
        object.__setattr__(self, "fs", tuple(self.fs))

    @classmethod
    def default(cls, s: int) -> "FamilyGF":
        return cls(s, tuple(PolySpec(("u",), (((3,), 1.0), ((4,), (i + 1) / 10.0))) for i in range(s)))

    @cached_property
    def coordinates(self):
        s = self.s
        return (tuple(f"u{i + 1}" for i in range(s)) + tuple(f"t{i + 1}" for i in range(s))
                + tuple(f"v{i + 1}" for i in range(s)))

    @cached_property
    def uu_poly(self) -> PolySpec:
        coords = self.coordinates
        out = PolySpec.constant(coords, 0.0)
        for i, f in enumerate(self.fs):
            # f_i(u) re-expressed in u_i
            terms = tuple((tuple(e[0] if k == i else 0 for k in range(len(coords))), c) for e, c in f.terms)
            out = out + PolySpec(coords, terms)
            out = out + PolySpec.variable(coords, f"u{i + 1}") * PolySpec.variable(coords, f"t{i + 1}")
        return -2.0 * out

    def signature_at(self, point):
        self.check_domain(point)
        return (2 * self.s, self.s)

    def metric_value(self, point):
        x = self.check_domain(point)
        s = self.s
        out = np.zeros((3 * s, 3 * s))
        a = self.uu_poly(x)
        for i in range(s):
            out[i, i] = a
            out[i, 2 * s + i] = out[2 * s + i, i] = 1.0
            out[s + i, s + i] = -1.0
        return out

    def metric_jet_arrays(self, point):
        x = self.check_domain(point)
        s, m = self.s, 3 * self.s
        a = Jet.of_poly(self.uu_poly, x)
        zero, one, mone = Jet.const(0.0, m), Jet.const(1.0, m), Jet.const(-1.0, m)
        rows = [[zero] * m for _ in range(m)]
        for i in range(s):
            rows[i][i] = a
            rows[i][2 * s + i] = rows[2 * s + i][i] = one
            rows[s + i][s + i] = mone
        return stack_jets(rows)

    def params(self):
        return {"s": self.s, "f": [str(f) for f in self.fs]}


@dataclass(frozen=True, eq=False)
class ProductWithFlat(MetricFamily):
    """``M x R^(a,b)``: appends ``a`` timelike and ``b`` spacelike flat coordinates."""

    inner: MetricFamily
    a: int
    b: int
    name = "product"

    def __post_init__(self):
        if self.a < 0 or self.b < 0:
            raise FamilyError("a, b must be non-negative")

    @property
    def nilpotent_curvature(self):
        return self.inner.nilpotent_curvature

    @property
    def nilpotent_weyl(self):
        # Weyl of a product is not the product of Weyl tensors
        return self.inner.nilpotent_curvature and bool(self.inner.nilpotent_weyl)

    @cached_property
    def coordinates(self):
        return self.inner.coordinates + tuple(f"z{i + 1}" for i in range(self.a + self.b))

    @cached_property
    def flat_signs(self) -> np.ndarray:
        return np.array([-1.0] * self.a + [1.0] * self.b)

    def signature_at(self, point):
        x = self.check_domain(point)
        p, q = self.inner.signature_at(x[: self.inner.dim])
        return (p + self.a, q + self.b)

    def metric_value(self, point):
        x = self.check_domain(point)
        n = self.inner.dim
        out = np.zeros((self.dim, self.dim))
        out[:n, :n] = self.inner.metric_value(x[:n])
        out[n:, n:] = np.diag(self.flat_signs)
        return out

    def metric_jet_arrays(self, point):
        x = self.check_domain(point)
        n, m = self.inner.dim, self.dim
        inner = self.inner.metric_jet_arrays(x[:n])
        out = []
        for k, arr in enumerate(inner):
            full = np.zeros((m, m) + (m,) * k)
            full[(slice(0, n), slice(0, n)) + (slice(0, n),) * k] = arr
            if k == 0:
                full[n:, n:] = np.diag(self.flat_signs)
            out.append(full)
        return tuple(out)

    def default_points(self, n=5):
        pts = self.inner.default_points(n)
        k = self.a + self.b
        return [np.concatenate([pt, 0.1 * np.arange(1, k + 1) * (1 + 0.25 * j)]) for j, pt in enumerate(pts)]

    def params(self):
        return {"inner": self.inner.describe(), "a": self.a, "b": self.b}


@dataclass(frozen=True, eq=False)
class ConformalScaling(MetricFamily):
    """``alpha * g`` for a polynomial conformal factor ``alpha > 0``."""

    inner: MetricFamily
    alpha: PolySpec
    name = "conformal"

    def __post_init__(self):
        if not set(self.alpha.variables) <= set(self.inner.coordinates):
            raise FamilyError(f"alpha must use coordinates of the family {self.inner.coordinates}")
        if self.alpha.variables != self.inner.coordinates:
            object.__setattr__(self, "alpha", self.alpha.embed(self.inner.coordinates))

    @property
    def nilpotent_weyl(self):
        return self.inner.nilpotent_weyl

    @property
    def coordinates(self):
        return self.inner.coordinates

    def _alpha(self, x) -> float:
        a = self.alpha(x)
        if a <= DOMAIN_EPS:
            raise DomainError(f"conformal factor alpha={a} is not positive at {x}")
        return a

    def signature_at(self, point):
        x = self.check_domain(point)
        self._alpha(x)
        return self.inner.signature_at(x)

    def metric_value(self, point):
        x = self.check_domain(point)
        return self._alpha(x) * self.inner.metric_value(x)

    def metric_jet_arrays(self, point):
        x = self.check_domain(point)
        self._alpha(x)
        a0, a1, a2, a3 = self.alpha.derivatives(x, 3)
        g0, g1, g2, g3 = self.inner.metric_jet_arrays(x)
        h1 = g1 * a0 + np.einsum("ij,a->ija", g0, a1)
        h2 = (g2 * a0 + np.einsum("ija,b->ijab", g1, a1) + np.einsum("ijb,a->ijab", g1, a1)
              + np.einsum("ij,ab->ijab", g0, a2))
        h3 = (g3 * a0
              + np.einsum("ijab,c->ijabc", g2, a1) + np.einsum("ijac,b->ijabc", g2, a1)
              + np.einsum("ijbc,a->ijabc", g2, a1)
              + np.einsum("ija,bc->ijabc", g1, a2) + np.einsum("ijb,ac->ijabc", g1, a2)
              + np.einsum("ijc,ab->ijabc", g1, a2)
              + np.einsum("ij,abc->ijabc", g0, a3))
        return (g0 * a0, h1, h2, h3)

    def default_points(self, n=5):
        return self.inner.default_points(n)

    def params(self):
        return {"inner": self.inner.describe(), "alpha": str(self.alpha)}


# -- point evaluation ---------------------------------------------------------------


def metric_at(fam: MetricFamily, point) -> InnerProduct:
    x = fam.check_domain(point)
    return InnerProduct(fam.metric_value(x), fam.signature_at(x))


def jets_at(fam: MetricFamily, point, order: int = 2) -> MetricJet:
    if order not in (2, 3):
        raise ValueError("jet order must be 2 or 3")
    x = fam.check_domain(point)
    g0, g1, g2, g3 = fam.metric_jet_arrays(x)
    g = InnerProduct(g0, fam.signature_at(x))
    return MetricJet(x, g, g1, g2, g3 if order == 3 else None)


def christoffel_lower(dg: np.ndarray) -> np.ndarray:
    """``G[l, j, k] = Gamma_{l, jk} = (d_j g_lk + d_k g_lj - d_l g_jk) / 2``."""
    return 0.5 * (np.einsum("lkj->ljk", dg) + dg - np.einsum("jkl->ljk", dg))


def _curvature_from_jet(ginv, dg, ddg):
    G = christoffel_lower(dg)
    # (d_i d_k g_jl + d_j d_l g_ik - d_i d_l g_jk - d_j d_k g_il) / 2
    second = 0.5 * (
        np.einsum("jlik->ijkl", ddg) + np.einsum("ikjl->ijkl", ddg)
        - np.einsum("jkil->ijkl", ddg) - np.einsum("iljk->ijkl", ddg)
    )
    quad = np.einsum("pq,pjl,qik->ijkl", ginv, G, G) - np.einsum("pq,pil,qjk->ijkl", ginv, G, G)
    return second + quad, G


def curvature_from_jet(jet: MetricJet) -> CurvatureTensor:
    r, _ = _curvature_from_jet(jet.g.inverse, jet.dg, jet.ddg)
    return CurvatureTensor(r)


def curvature_at(fam: MetricFamily, point) -> CurvatureTensor:
    """Riemann tensor ``R(e_i, e_j, e_k, e_l)`` of the coordinate frame at ``point``."""
    return curvature_from_jet(jets_at(fam, point, 2))


def nabla_R_at(fam: MetricFamily, point) -> np.ndarray:
    """``out[a, i, j, k, l] = (nabla_a R)_{ijkl}``."""
    jet = jets_at(fam, point, 3)
    ginv, dg, ddg, dddg = jet.g.inverse, jet.dg, jet.ddg, jet.dddg
    R, G = _curvature_from_jet(ginv, dg, ddg)
    dG = 0.5 * (np.einsum("lkja->ljka", ddg) + ddg - np.einsum("jkla->ljka", ddg))  # [l,j,k,a]
    # tensors below are indexed [i,j,k,l,a]
    third = 0.5 * (
        np.einsum("jlika->ijkla", dddg) + np.einsum("ikjla->ijkla", dddg)
        - np.einsum("jkila->ijkla", dddg) - np.einsum("iljka->ijkla", dddg)
    )
    dginv = -np.einsum("pr,rsa,sq->pqa", ginv, dg, ginv)
    dquad = (
        np.einsum("pqa,pjl,qik->ijkla", dginv, G, G) - np.einsum("pqa,pil,qjk->ijkla", dginv, G, G)
        + np.einsum("pq,pjla,qik->ijkla", ginv, dG, G) + np.einsum("pq,pjl,qika->ijkla", ginv, G, dG)
        - np.einsum("pq,pila,qjk->ijkla", ginv, dG, G) - np.einsum("pq,pil,qjka->ijkla", ginv, G, dG)
    )
    dR = (third + dquad).transpose(4, 0, 1, 2, 3)
    Gam = np.einsum("pq,qai->pai", ginv, G)  # Gamma^p_{ai}
    return (
        dR
        - np.einsum("pai,pjkl->aijkl", Gam, R)
        - np.einsum("paj,ipkl->aijkl", Gam, R)
        - np.einsum("pak,ijpl->aijkl", Gam, R)
        - np.einsum("pal,ijkp->aijkl", Gam, R)
    )


# -- finite-difference oracle ----------------------------------------------------------


def _fd_christoffel(fam: MetricFamily, x: np.ndarray, h: float) -> np.ndarray:
    """``Gamma^l_{jk}`` at ``x`` from central differences of ``metric_value``."""
    m = fam.dim
    dg = np.empty((m, m, m))
    for a in range(m):
        e = np.zeros(m)
        e[a] = h
        dg[:, :, a] = (fam.metric_value(x + e) - fam.metric_value(x - e)) / (2 * h)
    ginv = np.linalg.inv(fam.metric_value(x))
    # Gamma_{l,jk} = (d_j g_lk + d_k g_lj - d_l g_jk)/2 with dg[i,j,a] = d_a g_ij
    lower = 0.5 * (np.einsum("lkj->ljk", dg) + dg - np.einsum("jkl->ljk", dg))
    return np.einsum("ml,ljk->mjk", ginv, lower)


def _fd_curvature(fam: MetricFamily, x: np.ndarray, h: float) -> np.ndarray:
    m = fam.dim
    gam = _fd_christoffel(fam, x, h)
    dgam = np.empty((m, m, m, m))  # [i, l, j, k] = d_i Gamma^l_{jk}
    for i in range(m):
        e = np.zeros(m)
        e[i] = h
        dgam[i] = (_fd_christoffel(fam, x + e, h) - _fd_christoffel(fam, x - e, h)) / (2 * h)
    # R^l_{ijk} = d_i G^l_jk - d_j G^l_ik + G^l_im G^m_jk - G^l_jm G^m_ik
    rup = (
        np.einsum("iljk->ijkl", dgam) - np.einsum("jlik->ijkl", dgam)
        + np.einsum("lim,mjk->ijkl", gam, gam) - np.einsum("ljm,mik->ijkl", gam, gam)
    )
    return np.einsum("ijkp,pl->ijkl", rup, fam.metric_value(x))


def curvature_fd_oracle(fam: MetricFamily, point, h: float = 1e-4) -> CurvatureTensor:
    """Curvature by nested central differences of the metric, one Richardson level."""
    x = fam.check_domain(point)
    try:
        for a in range(fam.dim):
            for sgn in (-4, 4):
                e = np.zeros(fam.dim)
                e[a] = sgn * h
                fam.signature_at(x + e)
    except DomainError as exc:
        raise DomainError(f"finite-difference step {h} too large for the domain: {exc}") from exc
    r1 = _fd_curvature(fam, x, h)
    r2 = _fd_curvature(fam, x, 2 * h)
    return CurvatureTensor((4 * r1 - r2) / 3)


# -- the neutral-signature hypersurface family ---------------------------------------


def _require_gf(fam) -> HypersurfaceGf:
    if not isinstance(fam, HypersurfaceGf):
        raise FamilyError(f"operation needs the gf family, got {getattr(fam, 'name', fam)!r}")
    return fam


def second_fundamental_form_gf(fam: HypersurfaceGf, point) -> BilinearForm:
    """``L(dx_i, dx_j) = H_ij`` (Hessian of ``f``); every component with a ``y`` index is 0."""
    fam = _require_gf(fam)
    p = fam.p
    L = np.zeros((2 * p, 2 * p))
    L[:p, :p] = fam.hessian(point)
    return BilinearForm(L)


def curvature_closed_form_gf(fam: HypersurfaceGf, point) -> CurvatureTensor:
    """Gauss equation with unit normal: ``R(x,y,z,w) = L(x,w)L(y,z) - L(x,z)L(y,w)``."""
    L = second_fundamental_form_gf(fam, point).matrix
    return CurvatureTensor(kulkarni_nomizu_gg(L))


@dataclass
class EmbeddingReport:
    pullback_residual: float
    normal_tangent_residual: float
    normal_norm: float
    tol: float
    ok: bool = field(init=False)

    def __post_init__(self):
        self.ok = self.pullback_residual <= self.tol and self.normal_tangent_residual <= self.tol


def embedding_check_gf(fam: HypersurfaceGf, point, tol: float = 1e-12) -> EmbeddingReport:
    """Pull back the ambient inner product through the graph embedding and compare.

    Ambient basis ``(alpha_1..alpha_p, beta_1..beta_p, gamma)`` with
    ``<alpha_i, beta_j> = delta_ij`` and ``<gamma, gamma> = 1``; the embedding is
    ``x.alpha + y.beta + f(x) gamma`` and the normal ``-grad f . beta + gamma``.
    """
    fam = _require_gf(fam)
    x = fam.check_domain(point)
    p = fam.p
    n = 2 * p + 1
    amb = np.zeros((n, n))
    amb[:p, p:2 * p] = np.eye(p)
    amb[p:2 * p, :p] = np.eye(p)
    amb[-1, -1] = 1.0
    grad = fam.f.derivatives(x[:p], 1)[1]
    dpsi = np.zeros((n, 2 * p))  # columns: d Psi / d coordinate
    dpsi[:p, :p] = np.eye(p)
    dpsi[-1, :p] = grad
    dpsi[p:2 * p, p:] = np.eye(p)
    nu = np.zeros(n)
    nu[p:2 * p] = -grad
    nu[-1] = 1.0
    pull = dpsi.T @ amb @ dpsi
    g = fam.metric_value(x)
    return EmbeddingReport(
        pullback_residual=float(np.max(np.abs(pull - g))),
        normal_tangent_residual=float(np.max(np.abs(nu @ amb @ dpsi))),
        normal_norm=float(nu @ amb @ nu),
        tol=tol,
    )
