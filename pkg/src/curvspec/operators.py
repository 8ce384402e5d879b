"""Curvature-derived endomorphisms of a tangent space.

Normalizations (sums, never averages):

* ``J(x) y = R(y, x) x``;
* ``J(pi) y = sum_ij g^{ij} R(y, e_i) e_j``, which is ``sum_i eps_i J(e_i)`` on an
  orthonormal frame;
* ``R(pi) = |det G|^{-1/2} R(e_1, e_2)`` for any nondegenerate 2-frame with Gram ``G``;
* ``Theta(pi) = 1/2 sum_ijkl g^{ij} g^{kl} R(e_i, e_k) R(e_j, e_l)``, which is
  ``sum_{i<j} eps_i eps_j R(e_i, e_j)^2`` on an orthonormal frame.

Operator matrices act on column vectors: column ``k`` is the image of ``e_k``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .grassmann import Frame
from .tensor_core import CurvatureTensor, InnerProduct, raise_last, weyl

AdjointClass = Literal["self-adjoint", "skew-adjoint", "none"]
PLANE_DEGENERACY = 1e-12


class DegeneratePlaneError(ValueError):
    """The spanning vectors have a (numerically) degenerate Gram matrix."""


@dataclass(frozen=True, eq=False)
class LinOperator:
    matrix: np.ndarray
    metric: InnerProduct
    adjoint_class: AdjointClass = "none"

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __call__(self, v) -> np.ndarray:
        return self.matrix @ np.asarray(v, float)

    def __matmul__(self, other: "LinOperator") -> "LinOperator":
        return LinOperator(self.matrix @ other.matrix, self.metric)

    def adjoint_residual(self) -> float:
        """Relative residual of the declared adjointness, 0 for class ``none``."""
        if self.adjoint_class == "none":
            return 0.0
        sign = 1.0 if self.adjoint_class == "self-adjoint" else -1.0
        gm = self.metric.matrix
        lhs = self.matrix.T @ gm  # g(Mv, w)
        scale = max(np.max(np.abs(lhs)), 1e-300)
        return float(np.max(np.abs(lhs - sign * gm @ self.matrix)) / scale) if np.any(lhs) else 0.0


def _vectors(frame) -> np.ndarray:
    if isinstance(frame, Frame):
        return frame.vectors
    return np.atleast_2d(np.asarray(frame, float))


def _checked_gram(g: InnerProduct, V: np.ndarray) -> np.ndarray:
    if V.shape[1] != g.dim:
        raise ValueError(f"frame vectors have dimension {V.shape[1]}, metric has {g.dim}")
    G = g.gram(V)
    ev = np.abs(np.linalg.eigvalsh(G))
    if ev.max() == 0 or ev.min() <= PLANE_DEGENERACY * ev.max():
        raise DegeneratePlaneError(f"degenerate span, Gram eigenvalues {np.linalg.eigvalsh(G)}")
    return G


def _raised(A: CurvatureTensor, g: InnerProduct) -> np.ndarray:
    if A.dim != g.dim:
        raise ValueError(f"tensor dim {A.dim} does not match metric dim {g.dim}")
    return raise_last(A, g)


def pair_operators(A: CurvatureTensor, g: InnerProduct, V: np.ndarray) -> np.ndarray:
    """``out[a, b]`` is the matrix of ``R(v_a, v_b)``."""
    P = np.einsum("ai,bj,ijkl->abkl", V, V, _raised(A, g))
    return np.einsum("abkl->ablk", P)


def jacobi(A: CurvatureTensor, g: InnerProduct, x) -> LinOperator:
    x = np.asarray(x, float)
    M = np.einsum("yjkl,j,k->ly", _raised(A, g), x, x)
    return LinOperator(M, g, "self-adjoint")


def jacobi_plane(A: CurvatureTensor, g: InnerProduct, frame) -> LinOperator:
    V = _vectors(frame)
    Ginv = np.linalg.inv(_checked_gram(g, V))
    M = np.einsum("ab,yjkl,aj,bk->ly", Ginv, _raised(A, g), V, V)
    return LinOperator(M, g, "self-adjoint")


def jacobi_plane_sum(A: CurvatureTensor, g: InnerProduct, frame: Frame) -> LinOperator:
    """``sum_i eps_i J(e_i)`` over an orthonormal frame."""
    if frame.eps is None:
        raise ValueError("orthonormal frame required")
    M = sum(e * jacobi(A, g, v).matrix for e, v in zip(frame.eps, frame.vectors))
    return LinOperator(M, g, "self-adjoint")


def skew_curvature(A: CurvatureTensor, g: InnerProduct, frame) -> LinOperator:
    V = _vectors(frame)
    if V.shape[0] != 2:
        raise ValueError(f"skew curvature needs a 2-frame, got {V.shape[0]} vectors")
    G = _checked_gram(g, V)
    R12 = pair_operators(A, g, V)[0, 1]
    return LinOperator(R12 / np.sqrt(abs(np.linalg.det(G))), g, "skew-adjoint")


def stanilov(A: CurvatureTensor, g: InnerProduct, frame) -> LinOperator:
    V = _vectors(frame)
    if V.shape[0] < 2:
        raise ValueError("Stanilov operator needs k >= 2")
    Ginv = np.linalg.inv(_checked_gram(g, V))
    R = pair_operators(A, g, V)
    M = 0.5 * np.einsum("ij,kl,ikxy,jlyz->xz", Ginv, Ginv, R, R)
    return LinOperator(M, g, "self-adjoint")


def stanilov_sum(A: CurvatureTensor, g: InnerProduct, frame: Frame) -> LinOperator:
    """``sum_{i<j} eps_i eps_j R(e_i, e_j)^2`` over an orthonormal frame."""
    if frame.eps is None:
        raise ValueError("orthonormal frame required")
    R = pair_operators(A, g, frame.vectors)
    k = frame.k
    M = np.zeros((g.dim, g.dim))
    for i in range(k):
        for j in range(i + 1, k):
            M += frame.eps[i] * frame.eps[j] * R[i, j] @ R[i, j]
    return LinOperator(M, g, "self-adjoint")


def weyl_jacobi(A: CurvatureTensor, g: InnerProduct, x, W: CurvatureTensor | None = None) -> LinOperator:
    return jacobi(weyl(A, g) if W is None else W, g, x)


def weyl_skew(A: CurvatureTensor, g: InnerProduct, frame, W: CurvatureTensor | None = None) -> LinOperator:
    return skew_curvature(weyl(A, g) if W is None else W, g, frame)
