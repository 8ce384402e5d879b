"""Inner products, algebraic curvature tensors and their contractions.

Index convention throughout the package: ``A[i, j, k, l] = A(e_i, e_j, e_k, e_l)``
with ``A(x, y, z, w) = g(A(x, y)z, w)``.  The constant curvature tensor of
curvature ``c`` is ``c * (g(x, w) g(y, z) - g(x, z) g(y, w))``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

DEGENERACY_THRESHOLD = 1e-12


class DegenerateMetricError(ValueError):
    """Raised when an inner product is (numerically) degenerate."""


class SignatureError(ValueError):
    """Raised when the eigenvalue sign count disagrees with a declared signature."""


def signature_of(matrix: np.ndarray) -> tuple[int, int]:
    """Return ``(p, q)``: the number of negative and positive eigenvalues."""
    ev = np.linalg.eigvalsh(matrix)
    scale = max(np.max(np.abs(ev)), 1.0)
    if np.min(np.abs(ev)) <= DEGENERACY_THRESHOLD * scale:
        raise DegenerateMetricError(f"degenerate inner product, eigenvalues {ev}")
    return int(np.sum(ev < 0)), int(np.sum(ev > 0))


@dataclass(frozen=True, eq=False)
class InnerProduct:
    """Nondegenerate symmetric bilinear form ``g_{ij}`` of signature ``(p, q)``.

    ``p`` counts timelike (negative) directions.  When ``signature`` is omitted
    it is computed from the eigenvalues; when given it is verified.
    """

    matrix: np.ndarray
    signature: tuple[int, int] | None = None
    _inverse: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        mat = np.array(self.matrix, dtype=float)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError(f"inner product must be square, got shape {mat.shape}")
        mat = 0.5 * (mat + mat.T)
        sig = signature_of(mat)
        if self.signature is not None and tuple(self.signature) != sig:
            raise SignatureError(f"declared signature {self.signature}, eigenvalues give {sig}")
        mat.setflags(write=False)
        inv = np.linalg.inv(mat)
        inv = 0.5 * (inv + inv.T)
        inv.setflags(write=False)
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "signature", sig)
        object.__setattr__(self, "_inverse", inv)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def p(self) -> int:
        return self.signature[0]

    @property
    def q(self) -> int:
        return self.signature[1]

    @property
    def inverse(self) -> np.ndarray:
        return self._inverse

    def __call__(self, x, y) -> float:
        return float(np.asarray(x) @ self.matrix @ np.asarray(y))

    def gram(self, vectors) -> np.ndarray:
        """Gram matrix of the rows of ``vectors``."""
        v = np.atleast_2d(np.asarray(vectors, dtype=float))
        return v @ self.matrix @ v.T

    def scaled(self, alpha: float) -> "InnerProduct":
        return InnerProduct(alpha * self.matrix)

    @classmethod
    def standard(cls, p: int, q: int) -> "InnerProduct":
        """``diag(-1,...,-1, +1,...,+1)`` with ``p`` minus signs."""
        return cls(np.diag([-1.0] * p + [1.0] * q), (p, q))


@dataclass(frozen=True, eq=False)
class CurvatureTensor:
    """Rank-4 array ``A_{ijkl}`` expected to carry the curvature symmetries."""

    components: np.ndarray

    def __post_init__(self):
        a = np.array(self.components, dtype=float)
        m = a.shape[0]
        if a.shape != (m, m, m, m):
            raise ValueError(f"curvature tensor must have shape (m,m,m,m), got {a.shape}")
        a.setflags(write=False)
        object.__setattr__(self, "components", a)

    @property
    def dim(self) -> int:
        return self.components.shape[0]

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.components))) if self.components.size else 0.0

    @classmethod
    def zeros(cls, m: int) -> "CurvatureTensor":
        return cls(np.zeros((m, m, m, m)))


@dataclass(frozen=True, eq=False)
class BilinearForm:
    matrix: np.ndarray

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True, eq=False)
class AlgebraicModel:
    """A model space ``(V, g_V, A_V)``."""

    name: str
    inner: InnerProduct
    tensor: CurvatureTensor

    def __post_init__(self):
        if self.inner.dim != self.tensor.dim:
            raise ValueError("model inner product and tensor dimensions differ")


# -- constructions ---------------------------------------------------------------


def kulkarni_nomizu_gg(g: np.ndarray) -> np.ndarray:
    """``G(x,y,z,w) = g(x,w) g(y,z) - g(x,z) g(y,w)``."""
    return np.einsum("il,jk->ijkl", g, g) - np.einsum("ik,jl->ijkl", g, g)


def constant_curvature_tensor(c: float, g: InnerProduct | np.ndarray) -> CurvatureTensor:
    gm = g.matrix if isinstance(g, InnerProduct) else np.asarray(g, dtype=float)
    return CurvatureTensor(c * kulkarni_nomizu_gg(gm))


def symmetries_residuals(a: np.ndarray) -> dict[str, float]:
    """Max absolute residuals of the three defining identities."""
    return {
        "antisymmetry": float(np.max(np.abs(a + a.transpose(1, 0, 2, 3)))),
        "pair_symmetry": float(np.max(np.abs(a - a.transpose(2, 3, 0, 1)))),
        "first_bianchi": float(
            np.max(np.abs(a + a.transpose(1, 2, 0, 3) + a.transpose(2, 0, 1, 3)))
        ),
    }


def validate_symmetries(A: CurvatureTensor, tol: float = 1e-10) -> list[tuple[str, float]]:
    """Return the violated identities with their residual relative to ``max|A|``.

    An empty list means every identity holds within ``tol``.  For the zero
    tensor the residuals are judged absolutely.
    """
    a = A.components
    scale = A.max_abs() or 1.0
    return [
        (name, res / scale)
        for name, res in symmetries_residuals(a).items()
        if res / scale > tol
    ]


def _check_dims(A: CurvatureTensor, g: InnerProduct):
    if A.dim != g.dim:
        raise ValueError(f"tensor dim {A.dim} does not match metric dim {g.dim}")


def curvature_operator(A: CurvatureTensor, g: InnerProduct, x, y) -> np.ndarray:
    """Matrix of ``z -> A(x, y) z`` (columns are images of basis vectors).

    Characterized by ``g(A(x,y) z, w) = A(x, y, z, w)``.
    """
    _check_dims(A, g)
    x, y = np.asarray(x, float), np.asarray(y, float)
    # explicit antisymmetrization makes swapping x and y negate the result bit for bit
    lowered = 0.5 * (np.einsum("i,j,ijkl->kl", x, y, A.components) - np.einsum("i,j,ijkl->kl", y, x, A.components))
    # lowered[k, l] = A(x, y, e_k, e_l); raise l
    return g.inverse @ lowered.T


def raise_last(A: CurvatureTensor, g: InnerProduct) -> np.ndarray:
    """``A^l_{ijk}`` stored as ``out[i, j, k, l]``; ``A(x,y)z = out[x,y,z,:]``."""
    _check_dims(A, g)
    return np.einsum("ijkm,ml->ijkl", A.components, g.inverse)


def ricci(A: CurvatureTensor, g: InnerProduct) -> BilinearForm:
    """``rho(x, y) = sum_ij g^{ij} A(x, e_i, e_j, y)``."""
    _check_dims(A, g)
    rho = np.einsum("ij,xijy->xy", g.inverse, A.components)
    return BilinearForm(0.5 * (rho + rho.T))


def scalar_curvature(rho: BilinearForm, g: InnerProduct) -> float:
    if rho.dim != g.dim:
        raise ValueError("dimension mismatch")
    return float(np.einsum("ij,ij->", g.inverse, rho.matrix))


def weyl(A: CurvatureTensor, g: InnerProduct) -> CurvatureTensor:
    """Weyl conformal curvature, the totally trace-free part of ``A``."""
    _check_dims(A, g)
    m = g.dim
    if m < 4:
        raise ValueError(f"Weyl tensor requires dimension >= 4, got {m}")
    gm = g.matrix
    rho = ricci(A, g).matrix
    tau = scalar_curvature(BilinearForm(rho), g)
    gg = kulkarni_nomizu_gg(gm)
    # rho(x,w)g(y,z) + rho(y,z)g(x,w) - rho(x,z)g(y,w) - rho(y,w)g(x,z)
    rg = (
        np.einsum("il,jk->ijkl", rho, gm)
        + np.einsum("jk,il->ijkl", rho, gm)
        - np.einsum("ik,jl->ijkl", rho, gm)
        - np.einsum("jl,ik->ijkl", rho, gm)
    )
    w = A.components + tau / ((m - 1) * (m - 2)) * gg - rg / (m - 2)
    return CurvatureTensor(w)


def traces(A: CurvatureTensor, g: InnerProduct) -> np.ndarray:
    """The Ricci-type contraction ``sum g^{ij} A(x, e_i, e_j, y)`` as a matrix."""
    return np.einsum("ij,xijy->xy", g.inverse, A.components)


def pullback_metric(g: InnerProduct | np.ndarray, frame: np.ndarray) -> np.ndarray:
    """Components ``g(f_a, f_b)`` for the columns ``f_a`` of ``frame``."""
    gm = g.matrix if isinstance(g, InnerProduct) else np.asarray(g)
    return frame.T @ gm @ frame


def pullback_tensor(A: CurvatureTensor | np.ndarray, frame: np.ndarray) -> np.ndarray:
    a = A.components if isinstance(A, CurvatureTensor) else np.asarray(A)
    return np.einsum("ijkl,ia,jb,kc,ld->abcd", a, frame, frame, frame, frame, optimize=True)


# -- model spaces -----------------------------------------------------------------


def model_vpp(p: int) -> AlgebraicModel:
    """Neutral-signature model on basis ``X_1..X_p, Y_1..Y_p``.

    ``g_V(X_i, Y_j) = delta_ij`` and
    ``A_V(X_i, X_j, X_k, X_l) = delta_il delta_jk - delta_ik delta_jl``.
    """
    m = 2 * p
    gm = np.zeros((m, m))
    gm[:p, p:] = np.eye(p)
    gm[p:, :p] = np.eye(p)
    a = np.zeros((m, m, m, m))
    a[:p, :p, :p, :p] = kulkarni_nomizu_gg(np.eye(p))
    return AlgebraicModel(f"V_{p},{p}", InnerProduct(gm, (p, p)), CurvatureTensor(a))


def model_v3s(s: int) -> AlgebraicModel:
    """Signature ``(2s, s)`` model on basis ``U_1..U_s, T_1..T_s, V_1..V_s``.

    ``g_V(U_i, V_i) = 1``, ``g_V(T_i, T_i) = -1`` and
    ``A_V(U_i, U_j, U_j, T_i) = 1`` for ``i != j``, extended by the curvature
    symmetries.
    """
    m = 3 * s
    gm = np.zeros((m, m))
    for i in range(s):
        gm[i, 2 * s + i] = gm[2 * s + i, i] = 1.0
        gm[s + i, s + i] = -1.0
    a = np.zeros((m, m, m, m))

    def put(i, j, k, l, val):
        # orbit of (i,j,k,l) under the Z_2 symmetries
        for (x, y, z, w), sgn in (
            ((i, j, k, l), 1), ((j, i, k, l), -1), ((i, j, l, k), -1), ((j, i, l, k), 1),
            ((k, l, i, j), 1), ((l, k, i, j), -1), ((k, l, j, i), -1), ((l, k, j, i), 1),
        ):
            a[x, y, z, w] = sgn * val

    for i in range(s):
        for j in range(s):
            if i != j:
                put(i, j, j, s + i, 1.0)
    return AlgebraicModel(f"V_{m}", InnerProduct(gm, (2 * s, s)), CurvatureTensor(a))
