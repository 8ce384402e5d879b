"""Seeded sampling of unit vectors and nondegenerate planes of prescribed type.

Random draws happen in an orthonormalizing frame ``E`` of ``g`` (``E^T g E =
diag(-1..-1, +1..+1)``), written ``eta``-coordinates below.  Every sample is
kept away from the null cone: a Gram-Schmidt pivot ``u`` is accepted only when
``|eta(u, u)| > PIVOT_MIN * |u|^2``.

Stream keys: ``rng_for(seed, *key)`` builds a Philox generator from
``SeedSequence(seed, spawn_key=key)``, where string key parts are replaced by
their CRC32.  The classifier uses ``(seed, check_id, point_index, sample_index)``
so samples are reproducible independently of evaluation order.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass

import numpy as np

from .tensor_core import InnerProduct

PIVOT_MIN = 0.05
MAX_ATTEMPTS = 10_000


class DegeneratePlaneError(ValueError):
    """A (near-)null vector was met during orthonormalization."""


class SamplingError(RuntimeError):
    """Unachievable plane type or exhausted resample budget."""


def rng_for(seed: int, *key) -> np.random.Generator:
    parts = tuple(zlib.crc32(k.encode()) if isinstance(k, str) else int(k) for k in key)
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed), spawn_key=parts)))


@dataclass(frozen=True, eq=False)
class Frame:
    """Rows of ``vectors`` span the plane; ``eps`` is set when the frame is orthonormal."""

    vectors: np.ndarray
    gram: np.ndarray
    eps: tuple[int, ...] | None = None
    oriented: bool = True
    change_of_basis: np.ndarray | None = None
    pivots: tuple[float, ...] | None = None  # relative pivot magnitudes from Gram-Schmidt

    @property
    def k(self) -> int:
        return self.vectors.shape[0]

    @property
    def type(self) -> tuple[int, int]:
        if self.eps is None:
            ev = np.linalg.eigvalsh(self.gram)
            return int(np.sum(ev < 0)), int(np.sum(ev > 0))
        return self.eps.count(-1), self.eps.count(1)

    @classmethod
    def of(cls, g: InnerProduct, vectors) -> "Frame":
        v = np.atleast_2d(np.asarray(vectors, dtype=float))
        return cls(v, g.gram(v))


@dataclass(frozen=True)
class PlaneRequest:
    k: int
    r: int  # timelike count
    s: int  # spacelike count

    def __post_init__(self):
        if self.r < 0 or self.s < 0 or self.r + self.s != self.k or self.k < 1:
            raise ValueError(f"invalid plane request k={self.k}, type=({self.r},{self.s})")

    @classmethod
    def of_type(cls, r: int, s: int) -> "PlaneRequest":
        return cls(r + s, r, s)


def orthonormalizing_frame(g: InnerProduct) -> np.ndarray:
    """``E`` with ``E.T @ g @ E = diag(eta)``, negative directions first."""
    lam, Q = np.linalg.eigh(g.matrix)
    order = np.argsort(lam, kind="stable")
    lam, Q = lam[order], Q[:, order]
    return Q / np.sqrt(np.abs(lam))


def orthonormalize(g: InnerProduct, vectors, pivot_tol: float = 1e-10, norm: np.ndarray | None = None) -> Frame:
    """Indefinite Gram-Schmidt with sign bookkeeping.

    A pivot ``u`` is degenerate when ``|g(u,u)| <= pivot_tol * u^T N u`` with
    ``N = norm`` (identity by default).  The returned frame carries
    ``change_of_basis`` ``C`` with ``frame.vectors = C @ vectors``.
    """
    V = np.atleast_2d(np.asarray(vectors, dtype=float))
    k, m = V.shape
    if m != g.dim:
        raise ValueError(f"vectors have dimension {m}, metric has {g.dim}")
    N = np.eye(m) if norm is None else norm
    G = g.matrix
    out = np.zeros((k, m))
    C = np.zeros((k, k))
    eps = []
    rel = []
    for i in range(k):
        u = V[i].copy()
        c = np.zeros(k)
        c[i] = 1.0
        for j in range(i):
            coef = eps[j] * (u @ G @ out[j])
            u -= coef * out[j]
            c -= coef * C[j]
        piv = u @ G @ u
        size = u @ N @ u
        if size <= 0 or abs(piv) <= pivot_tol * size:
            raise DegeneratePlaneError(f"pivot {piv:.3g} at vector {i} is degenerate (null direction)")
        rel.append(abs(piv) / size)
        nrm = np.sqrt(abs(piv))
        out[i] = u / nrm
        C[i] = c / nrm
        eps.append(1 if piv > 0 else -1)
    return Frame(out, np.diag(np.array(eps, float)), tuple(eps), True, C, tuple(rel))


class PlaneSampler:
    """Samples unit vectors and planes at one point for one metric."""

    def __init__(self, g: InnerProduct, pivot_min: float = PIVOT_MIN, max_attempts: int = MAX_ATTEMPTS):
        self.g = g
        self.E = orthonormalizing_frame(g)
        self.Einv = np.linalg.inv(self.E)
        # Euclidean norm of eta-coordinates, expressed on tangent vectors
        self.norm = self.Einv.T @ self.Einv
        self.pivot_min = pivot_min
        self.max_attempts = max_attempts

    @property
    def p(self) -> int:
        return self.g.p

    @property
    def q(self) -> int:
        return self.g.q

    def check_request(self, req: PlaneRequest):
        if req.r > self.p or req.s > self.q:
            raise SamplingError(
                f"no planes of type ({req.r},{req.s}) in signature ({self.p},{self.q})")

    def frame_from_eta(self, Z: np.ndarray, req: PlaneRequest) -> Frame:
        """Orthonormal frame of type ``req`` from raw ``eta``-coordinate rows ``Z``.

        Timelike vectors come first, each group in Gram-Schmidt order.
        Raises ``DegeneratePlaneError`` when a pivot is too close to null or the
        type differs from ``req``.
        """
        V = np.atleast_2d(Z) @ self.E.T
        fr = orthonormalize(self.g, V, self.pivot_min, self.norm)
        if fr.type != (req.r, req.s):
            raise DegeneratePlaneError(f"sampled plane has type {fr.type}, wanted ({req.r},{req.s})")
        order = sorted(range(fr.k), key=lambda i: (fr.eps[i], i))
        return Frame(fr.vectors[order], np.diag([float(fr.eps[i]) for i in order]),
                     tuple(fr.eps[i] for i in order), True, fr.change_of_basis[order], fr.pivots)

    def draw_eta(self, req: PlaneRequest, rng: np.random.Generator) -> np.ndarray:
        p, q = self.p, self.q
        Z = np.empty((req.k, p + q))
        # timelike rows weighted towards the negative block, spacelike rows towards the positive one
        Z[: req.r, :p] = rng.standard_normal((req.r, p))
        Z[: req.r, p:] = 0.5 * rng.standard_normal((req.r, q))
        Z[req.r:, :p] = 0.5 * rng.standard_normal((req.s, p))
        Z[req.r:, p:] = rng.standard_normal((req.s, q))
        return Z

    def sample_plane(self, req: PlaneRequest, rng: np.random.Generator) -> Frame:
        self.check_request(req)
        for _ in range(self.max_attempts):
            try:
                return self.frame_from_eta(self.draw_eta(req, rng), req)
            except DegeneratePlaneError:
                continue
        raise SamplingError(f"resample budget of {self.max_attempts} exhausted for type ({req.r},{req.s})")

    def sample_unit_vector(self, kind: str, rng: np.random.Generator) -> np.ndarray:
        if kind == "spacelike":
            req = PlaneRequest(1, 0, 1)
        elif kind == "timelike":
            req = PlaneRequest(1, 1, 0)
        else:
            raise ValueError(f"kind must be 'spacelike' or 'timelike', got {kind!r}")
        self.check_request(req)
        for _ in range(self.max_attempts):
            z = rng.standard_normal(self.g.dim)
            sq = z[: self.p] @ z[: self.p]
            val = z @ z - 2 * sq  # eta(z, z)
            if (val > 0) == (kind == "spacelike") and abs(val) > self.pivot_min * (z @ z):
                v = self.E @ z
                # normalize against g itself so conditioning of E does not leak into g(v, v)
                return v / np.sqrt(abs(v @ self.g.matrix @ v))
        raise SamplingError(f"resample budget of {self.max_attempts} exhausted for {kind} vectors")


def sample_unit_vector(g: InnerProduct, kind: str, rng: np.random.Generator) -> np.ndarray:
    return PlaneSampler(g).sample_unit_vector(kind, rng)


def sample_plane(g: InnerProduct, req: PlaneRequest, rng: np.random.Generator) -> Frame:
    return PlaneSampler(g).sample_plane(req, rng)
