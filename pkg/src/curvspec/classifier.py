"""Seeded decision procedures for constancy of Jordan normal forms.

A check samples operator arguments (unit vectors or orthonormal frames) at a
list of points, computes the Jordan type of each operator and compares against
a reference type: globally across points for the Osserman conditions and per
point for the Ivanov-Petrova, Stanilov and conformal conditions.

Random sampling alone almost never lands on the lower-dimensional strata where
a Jordan type changes (e.g. unit vectors whose x-part is null for the Hessian).
After the random stage the checker therefore runs a short least-squares search
per point which drives the singular value deciding a reference rank towards
zero.  A search result becomes a witness only if its complete Jordan type,
recomputed from the stored frame, differs from the reference without being
flagged uncertain.  ``consistent`` remains Monte-Carlo evidence, not proof.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from itertools import combinations

import numpy as np
from scipy.optimize import least_squares

from . import operators as ops
from .geometry import (
    ConformalScaling,
    FamilyGF,
    HypersurfaceGf,
    MetricFamily,
    ProductWithFlat,
    curvature_at,
    metric_at,
)
from .grassmann import (
    PIVOT_MIN,
    DegeneratePlaneError,
    Frame,
    PlaneRequest,
    PlaneSampler,
    SamplingError,
    orthonormalize,
    rng_for,
)
from .jordan import (
    TOL_EIG,
    TOL_RANK,
    JordanType,
    jordan_type,
    nilpotency_index,
    numerical_rank,
    same_type,
)
from .tensor_core import AlgebraicModel, CurvatureTensor, InnerProduct, pullback_metric, pullback_tensor, raise_last, ricci, weyl

PROPERTIES = (
    "jordan-osserman",
    "k-osserman",
    "osserman-type-rs",
    "jordan-ip",
    "k-stanilov",
    "conformal-osserman",
    "conformal-ip",
)
FLAVORS = ("spacelike", "timelike", "mixed")
POINTWISE = {"jordan-ip", "k-stanilov", "conformal-osserman", "conformal-ip"}
# operator scale floor as a fraction of the natural curvature scale
NATURAL_FLOOR = 1e-3
UNCERTAIN_RETRIES = 5


class SpecError(ValueError):
    """Property specification incompatible with itself or with the signature."""


class HypothesisError(ValueError):
    """Theorem hypotheses violated by the requested parameters."""


@dataclass(frozen=True)
class PropertySpec:
    property: str
    flavor: str | None = "spacelike"
    k: int | None = None
    r: int | None = None
    s: int | None = None
    scope: str | None = None

    def __post_init__(self):
        if self.property not in PROPERTIES:
            raise SpecError(f"unknown property {self.property!r}; choose from {', '.join(PROPERTIES)}")
        if self.property == "osserman-type-rs":
            if self.r is None or self.s is None or self.r < 0 or self.s < 0 or self.r + self.s < 1:
                raise SpecError("osserman-type-rs needs r, s >= 0 with r + s >= 1")
            object.__setattr__(self, "flavor", None)
        else:
            if self.flavor not in FLAVORS:
                raise SpecError(f"flavor must be one of {FLAVORS}, got {self.flavor!r}")
            if self.flavor == "mixed" and self.property not in ("jordan-ip", "conformal-ip"):
                raise SpecError("mixed flavor is only defined for jordan-ip and conformal-ip")
        if self.property in ("k-osserman", "k-stanilov"):
            if self.k is None or self.k < 2:
                raise SpecError(f"{self.property} needs k >= 2")
        scope = self.scope or ("pointwise" if self.property in POINTWISE else "global")
        if scope not in ("pointwise", "global"):
            raise SpecError(f"scope must be pointwise or global, got {scope!r}")
        object.__setattr__(self, "scope", scope)

    @property
    def uses_weyl(self) -> bool:
        return self.property.startswith("conformal")

    @property
    def operator(self) -> str:
        return {
            "jordan-osserman": "jacobi",
            "conformal-osserman": "jacobi",
            "k-osserman": "jacobi_plane",
            "osserman-type-rs": "jacobi_plane",
            "jordan-ip": "skew",
            "conformal-ip": "skew",
            "k-stanilov": "stanilov",
        }[self.property]

    def plane_request(self) -> PlaneRequest:
        if self.property == "osserman-type-rs":
            return PlaneRequest.of_type(self.r, self.s)
        k = {"jacobi": 1, "skew": 2}.get(self.operator, self.k)
        if self.flavor == "mixed":
            return PlaneRequest(2, 1, 1)
        return PlaneRequest(k, k, 0) if self.flavor == "timelike" else PlaneRequest(k, 0, k)

    @property
    def check_id(self) -> str:
        req = self.plane_request()
        return f"{self.property}:{self.flavor}:{req.r},{req.s}:{self.scope}"

    def params(self) -> dict:
        out = {}
        if self.k is not None:
            out["k"] = self.k
        if self.r is not None:
            out["r"], out["s"] = self.r, self.s
        out["scope"] = self.scope
        return out

    def label(self) -> str:
        req = self.plane_request()
        if self.property == "osserman-type-rs":
            return f"Osserman of type ({req.r},{req.s})"
        base = {
            "jordan-osserman": "Osserman",
            "k-osserman": f"{self.k}-Osserman",
            "jordan-ip": "IP",
            "k-stanilov": f"{self.k}-Stanilov",
            "conformal-osserman": "conformal Osserman",
            "conformal-ip": "conformal IP",
        }[self.property]
        return f"{self.flavor} {base}"


@dataclass(frozen=True)
class CheckConfig:
    samples: int = 200
    seed: int = 42
    n_points: int = 5
    tol_eig: float = TOL_EIG
    tol_rank: float = TOL_RANK
    search_starts: int = 8
    search_nfev: int = 60
    max_uncertain_frac: float = 0.1
    operator_scale: float = 1.0

    def tolerances(self) -> dict:
        return {"tol_eig": self.tol_eig, "tol_rank": self.tol_rank}


@dataclass
class Verdict:
    property: str
    flavor: str | None
    params: dict
    family: str
    family_params: dict
    points: list
    samples: int
    seed: int
    tolerances: dict
    status: str
    reference_jordan_type: list | None
    witness: dict | None
    uncertain_count: int
    samples_used: int = 0
    search_starts: int = 0
    note: str = ""
    evidence: str = "seeded sampling with degenerate-stratum search; consistent is not a proof"

    def to_json(self) -> dict:
        return asdict(self)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)

    @classmethod
    def from_json(cls, data: dict) -> "Verdict":
        return cls(**data)


def _frame_json(fr: Frame) -> dict:
    return {"vectors": fr.vectors.tolist(), "eps": list(fr.eps) if fr.eps else None}


class _PointContext:
    """Everything needed to build operators of one spec at one point."""

    def __init__(self, fam: MetricFamily, point, spec: PropertySpec, config: CheckConfig,
                 span_source: MetricFamily | None = None):
        self.fam, self.spec, self.config = fam, spec, config
        self.point = np.asarray(point, float)
        self.g = metric_at(fam, self.point)
        A = curvature_at(fam, self.point)
        self.A = weyl(A, self.g) if spec.uses_weyl else A
        # natural scale from the full curvature, so a round-off Weyl part reads as zero
        self.Rn = float(np.linalg.norm(raise_last(A, self.g)))
        self.nilpotent = bool(fam.nilpotent_weyl if spec.uses_weyl else fam.nilpotent_curvature)
        src = metric_at(span_source, self.point) if span_source is not None else self.g
        self.resample = span_source is not None
        self.sampler = PlaneSampler(src)
        self.req = spec.plane_request()

    def frame_from_eta(self, Z) -> Frame:
        fr = self.sampler.frame_from_eta(Z, self.req)
        return orthonormalize(self.g, fr.vectors) if self.resample else fr

    def raw_frame(self, Z) -> Frame:
        """Orthonormal frame from ``eta``-rows without type or pivot-size checks."""
        fr = orthonormalize(self.sampler.g, np.atleast_2d(Z) @ self.sampler.E.T, 1e-14, self.sampler.norm)
        if self.resample:
            piv = fr.pivots
            fr = orthonormalize(self.g, fr.vectors)
            fr = Frame(fr.vectors, fr.gram, fr.eps, True, fr.change_of_basis, piv)
        return fr

    def full_space(self) -> bool:
        return self.req.k == self.g.dim

    def deterministic_frame(self) -> Frame:
        fr = orthonormalize(self.g, self.sampler.E.T)
        order = sorted(range(fr.k), key=lambda i: (fr.eps[i], i))
        return Frame(fr.vectors[order], np.diag([float(fr.eps[i]) for i in order]), tuple(fr.eps[i] for i in order))

    def operator(self, fr: Frame) -> tuple[np.ndarray, float]:
        """Operator matrix and its natural scale."""
        V = fr.vectors
        norms = np.linalg.norm(V, axis=1)
        name = self.spec.operator
        if name == "jacobi":
            M, nat = ops.jacobi(self.A, self.g, V[0]).matrix, self.Rn * norms[0] ** 2
        elif name == "jacobi_plane":
            M, nat = ops.jacobi_plane(self.A, self.g, fr).matrix, self.Rn * float(np.sum(norms**2))
        elif name == "skew":
            M = ops.skew_curvature(self.A, self.g, fr).matrix
            nat = self.Rn * norms[0] * norms[1] / np.sqrt(abs(np.linalg.det(self.g.gram(V))))
        else:
            M = ops.stanilov(self.A, self.g, fr).matrix
            nat = sum((self.Rn * norms[i] * norms[j]) ** 2 for i, j in combinations(range(fr.k), 2))
        c = self.config.operator_scale
        return c * M, abs(c) * nat

    def jtype(self, fr: Frame) -> JordanType:
        M, nat = self.operator(fr)
        return jordan_type(M, self.config.tol_eig, self.config.tol_rank,
                           scale=NATURAL_FLOOR * nat, nilpotent=self.nilpotent)


def _record(pi: int, ctx: _PointContext, fr: Frame, T: JordanType, how: str) -> dict:
    return {
        "point_index": pi,
        "point": ctx.point.tolist(),
        "frame": _frame_json(fr),
        "jordan_type": T.to_json(),
        "found_by": how,
    }


MAX_SEARCH_STARTS = 16
MAX_ANCHORS = 24
MAX_FACES = 64
FACE_DRAWS = 2
BARRIER_PIVOT = 2 * PIVOT_MIN


def _search_targets(ref: JordanType) -> list[tuple[float, int, int, int]]:
    """``(lambda, k, r_k, d)``: drop the rank of ``(M - lambda)^k`` from ``r_k`` by ``d``.

    Single drops come first, then multiple simultaneous drops.
    """
    out = []
    for e, ranks in zip(ref.entries, ref.ranks):
        if e.pair:
            continue
        for kk in range(1, len(ranks)):
            for d in range(1, ranks[kk] + 1):
                out.append((e.re, kk, ranks[kk], d))
    out.sort(key=lambda t: (t[3] > 1, t[1], t[3]))
    return out


def _search_problem(ctx: _PointContext, shape, lam: float, kk: int, rk: int, d: int, anchor=None):
    """Residual and Jacobian whose zeros are frames with ``rank (M - lam)^kk <= rk - d``.

    Partial drops use variable projection: with ``P = (M - lam)^kk`` and ``U``
    the right singular vectors of its ``nu = n - rk + d`` smallest singular
    values, the residual is ``P U / |P|_F``.  The Jacobian freezes ``U``, so the
    residual stays smooth across the stratum where ``|sigma|`` would have a kink.
    A full collapse uses ``P`` over the natural scale.  A hinge barrier on the
    Gram-Schmidt pivots keeps the plane inside the sampled compact core and of
    the requested type.  Rows of ``anchor`` (``eta``-coordinates) are held fixed
    in front of the free rows.
    """
    n = ctx.g.dim
    fixed = np.zeros((0, n)) if anchor is None else np.atleast_2d(anchor)
    nu = n - rk + d
    full = d == rk
    size = (n * n if full else n * nu) + ctx.req.k
    want = (ctx.req.r, ctx.req.s)

    def power(z):
        fr = ctx.raw_frame(np.vstack([fixed, z.reshape(shape)]))
        if fr.type != want:
            raise DegeneratePlaneError("type changed")
        M, nat = ctx.operator(fr)
        return fr, np.linalg.matrix_power(M - lam * np.eye(n), kk), nat

    def kernel(P):
        return np.linalg.svd(P)[2][n - nu:].T

    def value(z, U=None):
        try:
            fr, P, nat = power(z)
        except DegeneratePlaneError:
            return np.ones(size)
        barrier = np.maximum(0.0, 1.0 - np.array(fr.pivots) / BARRIER_PIVOT)
        if full:
            main = P.ravel() / max(nat, 1e-300) ** kk
        else:
            main = (P @ (kernel(P) if U is None else U)).ravel() / max(np.linalg.norm(P), 1e-300)
        return np.concatenate([main, barrier])

    def jac(z):
        U = None
        if not full:
            try:
                U = kernel(power(z)[1])
            except DegeneratePlaneError:
                return np.zeros((size, z.size))
        f0 = value(z, U)
        J = np.empty((size, z.size))
        for j in range(z.size):
            h = 1e-7 * max(1.0, abs(z[j]))
            zh = z.copy()
            zh[j] += h
            J[:, j] = (value(zh, U) - f0) / h
        return J

    return value, jac


def _coordinate_anchors(ctx: _PointContext, limit: int) -> list[tuple[np.ndarray, tuple[int, int]]]:
    """Nondegenerate spans of coordinate vectors that fit inside the requested plane type.

    Falsifying strata of structured metrics are often planes containing such a span;
    random starts almost never land on them.  Larger spans come first.
    """
    k, n = ctx.req.k, ctx.g.dim
    out = []
    for a in range(k - 1, 0, -1):
        for idx in combinations(range(n), a):
            Z = ctx.sampler.Einv[:, list(idx)].T
            try:
                fr = orthonormalize(ctx.sampler.g, Z @ ctx.sampler.E.T, ctx.sampler.pivot_min, ctx.sampler.norm)
            except DegeneratePlaneError:
                continue
            r, s = fr.type
            if r <= ctx.req.r and s <= ctx.req.s:
                out.append((Z, (r, s)))
                if len(out) >= limit:
                    return out
    return out


def _coordinate_faces(ctx: _PointContext, limit: int) -> list[tuple[int, ...]]:
    """Coordinate subsets whose span is safely nondegenerate and holds the requested type."""
    k, n = ctx.req.k, ctx.g.dim
    G = ctx.sampler.g.matrix
    out = []
    for size in range(k, n):
        for idx in combinations(range(n), size):
            ev = np.linalg.eigvalsh(G[np.ix_(idx, idx)])
            if np.min(np.abs(ev)) < 1e-3 * np.max(np.abs(ev)):
                continue
            if np.sum(ev < 0) >= ctx.req.r and np.sum(ev > 0) >= ctx.req.s:
                out.append(idx)
                if len(out) >= limit:
                    return out
    return out


def _face_draw(ctx: _PointContext, idx, rng) -> np.ndarray:
    """``eta``-rows of a random plane inside the coordinate span ``idx``."""
    sub = PlaneSampler(InnerProduct(ctx.sampler.g.matrix[np.ix_(idx, idx)]))
    fr = sub.sample_plane(ctx.req, rng)
    V = np.zeros((ctx.req.k, ctx.g.dim))
    V[:, list(idx)] = fr.vectors
    return V @ ctx.sampler.Einv.T


def _stratum_search(ctx: _PointContext, ref: JordanType, key: tuple, config: CheckConfig):
    """Least-squares search for a frame whose type differs from ``ref``.

    Cheap structured candidates come first: random planes inside coordinate
    faces, checked directly.  Then anchored starts (a coordinate span plus random
    rows, only the random rows free) and finally fully random starts.
    """
    targets = _search_targets(ref)
    if not targets or config.search_starts <= 0:
        return None
    k, n = ctx.req.k, ctx.g.dim
    anchors = _coordinate_anchors(ctx, MAX_ANCHORS)
    n_random = min(max(config.search_starts, len(targets)), MAX_SEARCH_STARTS)
    starts = list(enumerate(anchors)) + [(len(anchors) + j, None) for j in range(n_random)]

    def accept(Z):
        fr = ctx.frame_from_eta(Z)
        T = ctx.jtype(fr)
        if not T.uncertain and not same_type(T, ref, config.tol_eig):
            return fr, T
        return None

    for i, idx in enumerate(_coordinate_faces(ctx, MAX_FACES)):
        rng = rng_for(config.seed, *key, "face", i)
        for _ in range(FACE_DRAWS):
            try:
                if hit := accept(_face_draw(ctx, idx, rng)):
                    return hit
            except (DegeneratePlaneError, SamplingError, np.linalg.LinAlgError, ValueError):
                continue

    for start, A in starts:
        lam, kk, rk, d = targets[start % len(targets)]
        rng = rng_for(config.seed, *key, "search", start)
        a = 0 if A is None else A[0].shape[0]
        try:
            Z0 = _draw_valid(ctx, rng, A)
            if A is not None and (hit := accept(Z0)):
                return hit
            value, jac = _search_problem(ctx, (k - a, n), lam, kk, rk, d, anchor=None if A is None else A[0])
            sol = least_squares(value, Z0[a:].ravel(), jac=jac, max_nfev=config.search_nfev,
                                xtol=1e-15, ftol=1e-15, gtol=1e-15)
            hit = accept(np.vstack([Z0[:a], sol.x.reshape(k - a, n)]))
        except (DegeneratePlaneError, SamplingError, np.linalg.LinAlgError, ValueError):
            continue
        if hit:
            return hit
    return None


def check(
    fam: MetricFamily,
    spec: PropertySpec,
    points=None,
    config: CheckConfig = CheckConfig(),
    *,
    span_source: MetricFamily | None = None,
    allow_vacuous: bool = False,
) -> Verdict:
    """Decide ``spec`` on ``fam`` by seeded sampling at ``points``.

    ``span_source`` samples spans with the metric of another family on the same
    coordinates and re-orthonormalizes them for ``fam`` (used to compare a
    metric with a conformal rescaling on identical spans).
    """
    pts = [np.asarray(P, float) for P in (points if points is not None else fam.default_points(config.n_points))]
    verdict = Verdict(
        property=spec.property, flavor=spec.flavor, params=spec.params(), family=fam.name,
        family_params=_jsonable(fam.params()), points=[P.tolist() for P in pts], samples=config.samples,
        seed=config.seed, tolerances=config.tolerances(), status="consistent",
        reference_jordan_type=None, witness=None, uncertain_count=0, search_starts=config.search_starts,
    )
    if not pts:
        raise ValueError("no evaluation points")
    req = spec.plane_request()
    p, q = fam.signature_at(pts[0])
    if req.r > p or req.s > q:
        msg = f"no planes of type ({req.r},{req.s}) in signature ({p},{q})"
        if not allow_vacuous:
            raise SpecError(msg)
        verdict.note = f"vacuous: {msg}"
        return verdict

    ref: JordanType | None = None
    ref_rec = None
    used = 0
    for pi, P in enumerate(pts):
        ctx = _PointContext(fam, P, spec, config, span_source)
        if spec.scope == "pointwise":
            ref, ref_rec = None, None
        key = (spec.check_id, pi)
        if ctx.full_space():
            frames = [ctx.deterministic_frame()]
            n_here = 1
        else:
            frames = None
            n_here = config.samples
        for j in range(n_here):
            T, fr = None, None
            for attempt in range(UNCERTAIN_RETRIES):
                if frames is not None:
                    fr = frames[0]
                else:
                    rng = rng_for(config.seed, *key, j) if attempt == 0 else rng_for(config.seed, *key, j, attempt)
                    fr = ctx.frame_from_eta(_draw_valid(ctx, rng))
                T = ctx.jtype(fr)
                if not T.uncertain:
                    break
                verdict.uncertain_count += 1
                T = None
                if frames is not None:
                    break
            if T is None:
                continue
            used += 1
            if ref is None:
                ref, ref_rec = T, _record(pi, ctx, fr, T, "sampling")
                if verdict.reference_jordan_type is None:
                    verdict.reference_jordan_type = T.to_json()
                continue
            if not same_type(T, ref, config.tol_eig):
                verdict.status = "falsified"
                verdict.witness = {"reference": ref_rec, "mismatch": _record(pi, ctx, fr, T, "sampling")}
                break
        if verdict.status == "falsified":
            break
        if ref is not None and frames is None:
            found = _stratum_search(ctx, ref, key, config)
            if found is not None:
                fr, T = found
                verdict.status = "falsified"
                verdict.witness = {"reference": ref_rec, "mismatch": _record(pi, ctx, fr, T, "search")}
                break
    verdict.samples_used = used
    if verdict.status != "falsified":
        total = used + verdict.uncertain_count
        if used == 0 or verdict.uncertain_count > config.max_uncertain_frac * total:
            verdict.status = "undetermined"
            verdict.note = (f"{verdict.uncertain_count} uncertain Jordan decisions out of {total}; "
                            "adjust --tol-rank / --tol-eig")
    return verdict


def _draw_valid(ctx: _PointContext, rng, anchor=None) -> np.ndarray:
    """Random ``eta``-rows of a valid frame, after the fixed rows of ``anchor = (Z, type)``."""
    for _ in range(ctx.sampler.max_attempts):
        Z = ctx.sampler.draw_eta(ctx.req, rng)
        if anchor is not None:
            # drop as many timelike and spacelike draws as the anchor already supplies
            (ZA, (ra, sa)), r = anchor, ctx.req.r
            Z = np.vstack([ZA, Z[ra:r], Z[r + sa:]])
        try:
            ctx.sampler.frame_from_eta(Z, ctx.req)
            return Z
        except DegeneratePlaneError:
            continue
    raise SamplingError(f"resample budget exhausted for type ({ctx.req.r},{ctx.req.s})")


def sample_operator(fam: MetricFamily, spec: PropertySpec, point, config: CheckConfig = CheckConfig(),
                    index: int = 0) -> tuple[Frame, np.ndarray, JordanType]:
    """One seeded frame at ``point`` with the operator of ``spec`` and its Jordan type."""
    ctx = _PointContext(fam, point, spec, config)
    if ctx.full_space():
        fr = ctx.deterministic_frame()
    else:
        fr = ctx.frame_from_eta(_draw_valid(ctx, rng_for(config.seed, "sample", spec.check_id, index)))
    M, _ = ctx.operator(fr)
    return fr, M, ctx.jtype(fr)


def recheck_witness(fam: MetricFamily, spec: PropertySpec, verdict: Verdict) -> tuple[JordanType, JordanType]:
    """Recompute the reference and mismatch types from the stored frames."""
    cfg = CheckConfig(tol_eig=verdict.tolerances["tol_eig"], tol_rank=verdict.tolerances["tol_rank"])
    out = []
    for which in ("reference", "mismatch"):
        rec = verdict.witness[which]
        ctx = _PointContext(fam, rec["point"], spec, cfg)
        V = np.array(rec["frame"]["vectors"])
        fr = Frame(V, ctx.g.gram(V), tuple(rec["frame"]["eps"]))
        out.append(ctx.jtype(fr))
    return out[0], out[1]


def _jsonable(obj):
    return json.loads(json.dumps(obj, default=str))


# -- theorem tables -------------------------------------------------------------------


@dataclass
class TheoremRow:
    claim: str
    expected: str | None  # None: reported, not asserted
    observed: str
    agreement: bool | None
    params: dict = field(default_factory=dict)
    verdict: dict | None = None


@dataclass
class TheoremReport:
    theorem: str
    seed: int
    rows: list[TheoremRow]

    @property
    def all_agree(self) -> bool:
        return all(r.agreement is not False for r in self.rows)

    def to_json(self) -> dict:
        return {"theorem": self.theorem, "seed": self.seed, "all_agree": self.all_agree,
                "rows": [asdict(r) for r in self.rows]}

    def to_text(self) -> str:
        lines = [f"theorem {self.theorem} (seed {self.seed})"]
        w = max((len(r.claim) for r in self.rows), default=10)
        for r in self.rows:
            mark = {True: "ok", False: "MISMATCH", None: "reported"}[r.agreement]
            lines.append(f"  {r.claim:<{w}}  expected={r.expected or '-':<10} observed={r.observed:<12} {mark}")
        lines.append("all rows agree" if self.all_agree else "DISAGREEMENT")
        return "\n".join(lines)


def _row(claim, expected, fam, spec, config, params=None, **kw) -> TheoremRow:
    v = check(fam, spec, None, config, **kw)
    agree = None if expected is None else (v.status == expected)
    return TheoremRow(claim, expected, v.status, agree, params or {}, v.to_json())


def _gf_family(p: int, hessian: str) -> HypersurfaceGf:
    if hessian == "definite":
        return HypersurfaceGf.definite_default(p)
    if hessian == "indefinite":
        return HypersurfaceGf.indefinite_default(p)
    raise HypothesisError(f"hessian must be 'definite' or 'indefinite', got {hessian!r}")


def _hessian_kind(fam: HypersurfaceGf, points) -> str:
    kinds = set()
    for P in points:
        ev = np.linalg.eigvalsh(fam.hessian(P))
        if np.min(np.abs(ev)) <= 1e-8 * max(np.max(np.abs(ev)), 1.0):
            raise HypothesisError(f"Hessian degenerate at {np.asarray(P).tolist()}: eigenvalues {ev}")
        kinds.add("definite" if np.all(ev > 0) or np.all(ev < 0) else "indefinite")
    if len(kinds) != 1:
        raise HypothesisError("Hessian changes type across the evaluation points")
    return kinds.pop()


C, F = "consistent", "falsified"


def _suite_32x(params, config):
    rows = []
    for p in params.get("p", [2, 3]):
        for kind in params.get("hessian", ["definite", "indefinite"]):
            fam = _gf_family(p, kind)
            _hessian_kind(fam, fam.default_points(config.n_points))
            tag = {"p": p, "hessian": kind}
            osserman = C if (p == 2 or kind == "definite") else F
            for flavor, exp in (("spacelike", C), ("timelike", C), ("mixed", F)):
                rows.append(_row(f"p={p} {kind}: {flavor} IP", exp, fam, PropertySpec("jordan-ip", flavor), config, tag))
            for flavor in ("spacelike", "timelike"):
                rows.append(_row(f"p={p} {kind}: {flavor} Osserman", osserman, fam,
                                 PropertySpec("jordan-osserman", flavor), config, tag))
            for flavor in ("spacelike", "timelike"):
                for k in range(2, p + 1):
                    rows.append(_row(f"p={p} {kind}: {flavor} {k}-Stanilov", C, fam,
                                     PropertySpec("k-stanilov", flavor, k=k), config, tag))
    return rows


def _products(params, config):
    p = params.get("p", 2)
    base = _gf_family(p, "definite")
    for a, b in params.get("ab", [(1, 0), (0, 1), (1, 1)]):
        fam = ProductWithFlat(base, a, b)
        yield a, b, fam


def _suite_33(params, config):
    rows = []
    for a, b, fam in _products(params, config):
        tag = {"a": a, "b": b}
        rows.append(_row(f"(a,b)=({a},{b}): mixed IP", F, fam, PropertySpec("jordan-ip", "mixed"), config, tag))
        if a > 0 and b == 0:
            expect = {"timelike": F, "spacelike": C}
        elif a == 0 and b > 0:
            expect = {"timelike": C, "spacelike": F}
        elif a > 0 and b > 0:
            expect = {"timelike": F, "spacelike": F}
        else:
            continue
        for flavor in ("timelike", "spacelike"):
            rows.append(_row(f"(a,b)=({a},{b}): {flavor} Osserman", expect[flavor], fam,
                             PropertySpec("jordan-osserman", flavor), config, tag))
            rows.append(_row(f"(a,b)=({a},{b}): {flavor} IP", expect[flavor], fam,
                             PropertySpec("jordan-ip", flavor), config, tag))
    return rows


def osserman_types_expected(p: int, q: int, a: int, b: int, reading: str = "corrected") -> set[tuple[int, int]]:
    """Types ``(r, s)`` listed as Osserman for ``M x R^(a,b)``.

    ``reading`` selects the complement in the fourth range: ``"corrected"`` uses
    ``(p+a, q+b-s)``, ``"literal"`` uses ``(p+q, q+b-s)``, and ``"none"`` omits it.
    """
    out = set()
    if a == 0:
        for r in range(1, p + 1):
            out |= {(r, 0), (p - r, q + b)}
    if b == 0:
        for s in range(1, p + 1):
            out |= {(0, s), (p + a, q - s)}
    if a > 0:
        for r in range(a + 2, p + a + 1):
            out |= {(r, 0), (p + a - r, q + b)}
    if b > 0:
        for s in range(b + 2, q + b + 1):
            out.add((0, s))
            if reading != "none":
                out.add(((p + q) if reading == "literal" else (p + a), q + b - s))
    return out


def _suite_3x(params, config):
    rows = []
    p = params.get("p", 2)
    q = p
    for a, b, fam in _products(params, config):
        P, Q = p + a, q + b
        firm = osserman_types_expected(p, q, a, b, "none")
        corrected = osserman_types_expected(p, q, a, b, "corrected")
        literal = osserman_types_expected(p, q, a, b, "literal")
        for r in range(P + 1):
            for s in range(Q + 1):
                if r + s == 0 or (r, s) == (P, Q):
                    continue
                tag = {"a": a, "b": b, "r": r, "s": s}
                claim = f"(a,b)=({a},{b}): type ({r},{s})"
                if (r, s) in firm or ((r, s) in corrected) == ((r, s) in literal):
                    expected = C if (r, s) in corrected else F
                else:
                    # only the two readings of the fourth range disagree here
                    expected = None
                    claim += (f" [fourth range: {'Osserman' if (r, s) in corrected else 'not Osserman'} as (p+a,...),"
                              f" {'Osserman' if (r, s) in literal else 'not Osserman'} as (p+q,...)]")
                rows.append(_row(claim, expected, fam, PropertySpec("osserman-type-rs", r=r, s=s), config, tag))
        for t in sorted(literal - corrected):
            if not (t[0] <= P and t[1] <= Q):
                rows.append(TheoremRow(f"(a,b)=({a},{b}): literal fourth-range type {t} does not exist in "
                                       f"signature ({P},{Q})", None, "n/a", None, {"a": a, "b": b}))
    return rows


def _gF(params) -> FamilyGF:
    return FamilyGF.default(params.get("s", 2))


def _suite_36(params, config):
    fam = _gF(params)
    s = fam.s
    rows = [
        _row("spacelike Osserman", C, fam, PropertySpec("jordan-osserman", "spacelike"), config),
        _row("timelike Osserman", F, fam, PropertySpec("jordan-osserman", "timelike"), config),
    ]
    for k in range(2, s + 1):
        rows.append(_row(f"spacelike {k}-Osserman", C, fam, PropertySpec("k-osserman", "spacelike", k=k), config))
    for k in range(2, 2 * s + 1):
        exp = C if s + 2 <= k <= 2 * s else F
        rows.append(_row(f"timelike {k}-Osserman", exp, fam, PropertySpec("k-osserman", "timelike", k=k), config))
    rows.append(_row("spacelike IP", C, fam, PropertySpec("jordan-ip", "spacelike"), config))
    rows.append(_row("timelike IP", F, fam, PropertySpec("jordan-ip", "timelike"), config))
    rows.append(_row("mixed IP", F, fam, PropertySpec("jordan-ip", "mixed"), config))
    for k in range(2, s + 1):
        rows.append(_row(f"spacelike {k}-Stanilov", C, fam, PropertySpec("k-stanilov", "spacelike", k=k), config))
    for k in range(2, 2 * s + 1):
        exp = C if k == 2 * s else F
        rows.append(_row(f"timelike {k}-Stanilov", exp, fam, PropertySpec("k-stanilov", "timelike", k=k), config))
    rep = spacelike_rank_report(fam, fam.default_points(config.n_points), config)
    rows.append(TheoremRow("skew operator rank on spacelike planes is 4", "4", ",".join(map(str, rep)),
                           rep == [4], {}, None))
    return rows


def _suite_3xx(params, config):
    fam = _gF(params)
    return [
        _row("conformal spacelike Osserman", C, fam, PropertySpec("conformal-osserman", "spacelike"), config),
        _row("conformal timelike Osserman", F, fam, PropertySpec("conformal-osserman", "timelike"), config),
        _row("conformal spacelike IP", C, fam, PropertySpec("conformal-ip", "spacelike"), config),
        _row("conformal timelike IP", F, fam, PropertySpec("conformal-ip", "timelike"), config),
        _row("conformal mixed IP", F, fam, PropertySpec("conformal-ip", "mixed"), config),
    ]


THEOREMS = {"3.2x": _suite_32x, "3.3": _suite_33, "3.x": _suite_3x, "3.6": _suite_36, "3.xx": _suite_3xx}


def check_suite_theorem(theorem: str, params: dict | None = None, config: CheckConfig = CheckConfig()) -> TheoremReport:
    if theorem not in THEOREMS:
        raise ValueError(f"unknown theorem {theorem!r}; choose from {', '.join(THEOREMS)}")
    return TheoremReport(theorem, config.seed, THEOREMS[theorem](params or {}, config))


# -- structure checks ---------------------------------------------------------------


def spacelike_rank_report(fam: MetricFamily, points, config: CheckConfig = CheckConfig(), n: int = 20) -> list[int]:
    """Sorted set of ranks of ``R(pi)`` over sampled spacelike 2-planes with ``R(pi) != 0``."""
    ranks = set()
    spec = PropertySpec("jordan-ip", "spacelike")
    for pi, P in enumerate(points):
        ctx = _PointContext(fam, P, spec, config)
        for j in range(n):
            rng = rng_for(config.seed, "spacelike-rank", pi, j)
            fr = ctx.frame_from_eta(_draw_valid(ctx, rng))
            M, nat = ctx.operator(fr)
            s = max(np.linalg.norm(M, 2), NATURAL_FLOOR * nat)
            r, _, _ = numerical_rank(M, config.tol_rank * s)
            if r:
                ranks.add(r)
    return sorted(ranks)


@dataclass
class NilpotencyReport:
    family: str
    point: list
    index: int | None
    filtration_residuals: dict
    spacelike_ranks: list
    ok: bool


def _pair_operators_all(A: CurvatureTensor, g: InnerProduct) -> list[np.ndarray]:
    m = g.dim
    R = ops.pair_operators(A, g, np.eye(m))
    return [R[i, j] for i in range(m) for j in range(i + 1, m) if np.any(R[i, j])]


def _composite_index(mats: list[np.ndarray], scale: float, tol: float, kmax: int = 4) -> int | None:
    if not mats:
        return 1
    prods = mats
    for k in range(2, kmax + 1):
        prods = [A @ B for A in prods for B in mats]
        if max(np.max(np.abs(P)) for P in prods) <= tol * scale**k:
            return k
        prods = [P for P in prods if np.max(np.abs(P)) > tol * scale**k]
    return None


def nilpotency_structure_check(fam: MetricFamily, point, config: CheckConfig = CheckConfig()) -> NilpotencyReport:
    """Span filtration of the curvature operators and their nilpotency index."""
    inner = fam.inner if isinstance(fam, ProductWithFlat) else fam
    P = np.asarray(point, float)
    g = metric_at(fam, P)
    A = curvature_at(fam, P)
    if not isinstance(inner, (HypersurfaceGf, FamilyGF)):
        if A.max_abs() == 0.0:
            return NilpotencyReport(fam.name, P.tolist(), 1, {}, [], True)
        raise TypeError(f"nilpotency structure is defined for gf / gF families, got {fam.name}")
    mats = _pair_operators_all(A, g)
    scale = max((np.linalg.norm(M, 2) for M in mats), default=0.0)
    index = _composite_index(mats, scale, 1e-10)
    m = g.dim
    if isinstance(inner, HypersurfaceGf):
        p = inner.p
        x, y = list(range(p)), list(range(p, 2 * p))
        chain = {"x->span(y)": (x, y), "y->0": (y, [])}
    else:
        s = inner.s
        u, t, v = list(range(s)), list(range(s, 2 * s)), list(range(2 * s, 3 * s))
        chain = {"u->span(t,v)": (u, t + v), "t->span(v)": (t, v), "v->0": (v, [])}
    res = {}
    for name, (src, dst) in chain.items():
        outside = [i for i in range(m) if i not in dst]
        res[name] = float(max((np.max(np.abs(M[np.ix_(outside, src)])) for M in mats), default=0.0) / max(scale, 1e-300))
    ranks = spacelike_rank_report(fam, [P], config)
    expected = 2 if isinstance(inner, HypersurfaceGf) else 3
    ok = all(r < 1e-10 for r in res.values()) and (index == expected or (not mats and index == 1))
    return NilpotencyReport(fam.name, P.tolist(), index, res, ranks, ok)


@dataclass
class ModelReport:
    metric_residual: float
    tensor_residual: float
    ok: bool


def verify_model(fam: MetricFamily, point, model: AlgebraicModel, frame, tol: float = 1e-8) -> ModelReport:
    """Compare ``g`` and ``R`` in the frame (columns) against the model."""
    Fm = np.asarray(frame, float)
    if Fm.shape != (fam.dim, fam.dim):
        raise ValueError(f"frame must be {fam.dim}x{fam.dim}")
    if abs(np.linalg.det(Fm)) <= 1e-12 * max(np.linalg.norm(Fm), 1.0) ** fam.dim:
        raise ValueError("singular frame")
    g = metric_at(fam, point)
    A = curvature_at(fam, point)
    gr = float(np.max(np.abs(pullback_metric(g, Fm) - model.inner.matrix)))
    ar = float(np.max(np.abs(pullback_tensor(A, Fm) - model.tensor.components)))
    return ModelReport(gr, ar, gr < tol and ar < tol)


def model_report_for_model(model: AlgebraicModel, frame=None) -> ModelReport:
    m = model.inner.dim
    Fm = np.eye(m) if frame is None else np.asarray(frame, float)
    gr = float(np.max(np.abs(pullback_metric(model.inner, Fm) - model.inner.matrix)))
    ar = float(np.max(np.abs(pullback_tensor(model.tensor, Fm) - model.tensor.components)))
    return ModelReport(gr, ar, gr < 1e-8 and ar < 1e-8)


def adapted_frame_gf(fam: HypersurfaceGf, point) -> np.ndarray:
    """Frame (columns ``X_1..X_p, Y_1..Y_p``) carrying ``g_f`` and ``R`` to the model ``V_{p,p}``.

    ``X = S d_x + C d_y`` with ``S = H^{-1/2}`` and ``C = -S G0 / 2`` where
    ``G0 = g(d_x, d_x)``; ``Y = H^{1/2} d_y``.
    """
    if not isinstance(fam, HypersurfaceGf):
        raise TypeError("adapted frame is defined for the gf family")
    P = fam.check_domain(point)
    H = fam.hessian(P)
    lam, Q = np.linalg.eigh(H)
    if np.any(lam <= 0):
        raise HypothesisError(f"Hessian is not positive definite at {P.tolist()}: eigenvalues {lam}")
    S = Q @ np.diag(lam**-0.5) @ Q.T
    Sh = Q @ np.diag(lam**0.5) @ Q.T
    p = fam.p
    G0 = fam.metric_value(P)[:p, :p]
    Fm = np.zeros((2 * p, 2 * p))
    Fm[:p, :p] = S.T
    Fm[p:, :p] = (-0.5 * S @ G0).T
    Fm[p:, p:] = Sh.T
    return Fm


# -- conformal checks ---------------------------------------------------------------


@dataclass
class ConformalReport:
    verdict_g: dict
    verdict_alpha_g: dict
    same_verdict: bool
    weyl_residual: float
    ok: bool


def conformal_invariance_check(fam: MetricFamily, alpha, spec: PropertySpec, points=None,
                               config: CheckConfig = CheckConfig(), tol: float = 1e-8) -> ConformalReport:
    if not spec.uses_weyl:
        raise SpecError("conformal invariance applies to conformal-osserman / conformal-ip")
    scaled = ConformalScaling(fam, alpha)
    pts = [np.asarray(P, float) for P in (points if points is not None else fam.default_points(config.n_points))]
    v1 = check(fam, spec, pts, config)
    v2 = check(scaled, spec, pts, config, span_source=fam)
    worst = 0.0
    for P in pts:
        a = scaled._alpha(P)
        W1 = weyl(curvature_at(fam, P), metric_at(fam, P)).components
        W2 = weyl(curvature_at(scaled, P), metric_at(scaled, P)).components
        worst = max(worst, float(np.max(np.abs(W2 - a * W1)) / max(np.max(np.abs(a * W1)), 1e-300)))
    same = v1.status == v2.status
    return ConformalReport(v1.to_json(), v2.to_json(), same, worst, same and worst < tol)


@dataclass
class EinsteinReport:
    ricci_residual: float
    conformal: dict
    pointwise: dict
    agree: bool


def einstein_equivalence_check(fam: MetricFamily, flavor: str, points=None,
                               config: CheckConfig = CheckConfig(), tol: float = 1e-10) -> EinsteinReport:
    """Conformal Osserman versus pointwise Osserman on an Einstein metric."""
    pts = [np.asarray(P, float) for P in (points if points is not None else fam.default_points(config.n_points))]
    worst = 0.0
    for P in pts:
        g = metric_at(fam, P)
        A = curvature_at(fam, P)
        rho = ricci(A, g).matrix
        # Einstein: rho = (tau/m) g
        tau = float(np.einsum("ij,ij->", g.inverse, rho))
        dev = rho - tau / g.dim * g.matrix
        worst = max(worst, float(np.max(np.abs(dev)) / max(A.max_abs(), 1e-300)))
    if worst > tol:
        raise HypothesisError(f"metric is not Einstein (relative Ricci deviation {worst:.3g})")
    v1 = check(fam, PropertySpec("conformal-osserman", flavor), pts, config)
    v2 = check(fam, PropertySpec("jordan-osserman", flavor, scope="pointwise"), pts, config)
    return EinsteinReport(worst, v1.to_json(), v2.to_json(), v1.status == v2.status)
