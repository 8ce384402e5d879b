import numpy as np
import pytest

from curvspec import operators as ops
from curvspec.geometry import ConstantCurvature, FamilyGF, HypersurfaceGf, curvature_at, metric_at
from curvspec.grassmann import PlaneRequest, PlaneSampler, rng_for
from curvspec.jordan import nilpotency_index
from curvspec.polynomial import PolySpec
from curvspec.tensor_core import CurvatureTensor, InnerProduct, constant_curvature_tensor, model_vpp


def at(fam, j=0):
    P = fam.default_points(j + 1)[j]
    return curvature_at(fam, P), metric_at(fam, P)


def rel(a, b):
    return np.max(np.abs(a - b)) / max(np.max(np.abs(b)), 1e-300)


GF = FamilyGF.default(2)
GFH = HypersurfaceGf.definite_default(3)
CONST = ConstantCurvature(0.9, 2, 3)


def test_zero_tensor_gives_zero_operators():
    g = InnerProduct(np.diag([-1.0, 1, 1, 1]))
    Z = CurvatureTensor(np.zeros((4,) * 4))
    fr = PlaneSampler(g).sample_plane(PlaneRequest(2, 0, 2), rng_for(1, "z"))
    for M in (ops.jacobi(Z, g, [0, 1, 0, 0]), ops.jacobi_plane(Z, g, fr), ops.skew_curvature(Z, g, fr),
              ops.stanilov(Z, g, fr), ops.weyl_jacobi(Z, g, [0, 1, 0, 0]), ops.weyl_skew(Z, g, fr)):
        assert not np.any(M.matrix)


def test_jacobi_constant_curvature():
    c = 0.9
    g = InnerProduct(np.diag([-1.0, 1, 1, 1, 1]))
    A = constant_curvature_tensor(c, g)
    x = PlaneSampler(g).sample_unit_vector("spacelike", rng_for(3, "x"))
    J = ops.jacobi(A, g, x).matrix
    for y in np.eye(5):
        np.testing.assert_allclose(J @ y, c * (y - (x @ g.matrix @ y) * x), atol=1e-13)


def test_jacobi_on_quadratic_gf():
    fam = HypersurfaceGf(2, PolySpec.parse("x1^2 + x2^2", ("x1", "x2")))
    A, g = at(fam)
    J = ops.jacobi(A, g, [1, 0, 0, 0]).matrix
    want = np.zeros((4, 4))
    want[3, 1] = 4.0  # d_x2 -> 4 d_y2
    np.testing.assert_allclose(J, want, atol=1e-12)


@pytest.mark.parametrize("fam", [GF, GFH, CONST], ids=lambda f: f.name)
def test_jacobi_invariants(fam):
    A, g = at(fam)
    x = np.random.default_rng(0).standard_normal(g.dim)
    J = ops.jacobi(A, g, x)
    assert J.adjoint_residual() < 1e-9
    assert np.max(np.abs(J(x))) <= 1e-12 * max(np.max(np.abs(J.matrix)), 1e-300) * np.abs(x).max()
    np.testing.assert_allclose(ops.jacobi(A, g, 3 * x).matrix, 9 * J.matrix, rtol=1e-12, atol=1e-14)


def test_jacobi_plane_single_vector():
    A, g = at(CONST)
    x = PlaneSampler(g).sample_unit_vector("spacelike", rng_for(4, "x"))
    np.testing.assert_allclose(ops.jacobi_plane(A, g, [x]).matrix, ops.jacobi(A, g, x).matrix, atol=1e-14)


def test_jacobi_plane_constant_curvature_eigenvalues():
    c = 0.9
    g = InnerProduct(np.diag([-1.0, -1, 1, 1, 1]))
    A = constant_curvature_tensor(c, g)
    fr = PlaneSampler(g).sample_plane(PlaneRequest(2, 0, 2), rng_for(5, "pi"))
    M = ops.jacobi_plane(A, g, fr).matrix
    # c on the plane, 2c on its complement
    for v in fr.vectors:
        np.testing.assert_allclose(M @ v, c * v, atol=1e-12)
    comp = np.linalg.svd(fr.vectors @ g.matrix)[2][2:]
    for w in comp:
        np.testing.assert_allclose(M @ w, 2 * c * w, atol=1e-12)


def frames(fam, req, n=5, tag="f"):
    A, g = at(fam)
    S = PlaneSampler(g)
    return A, g, [S.sample_plane(req, rng_for(7, tag, i)) for i in range(n)]


@pytest.mark.parametrize("fam", [GF, GFH, CONST], ids=lambda f: f.name)
@pytest.mark.parametrize("req", [PlaneRequest(2, 0, 2), PlaneRequest(2, 1, 1), PlaneRequest(2, 2, 0)],
                         ids=lambda r: f"{r.r}{r.s}")
def test_rebasing_invariance(fam, req):
    A, g, frs = frames(fam, req, 4)
    rng = np.random.default_rng(11)
    for fr in frs:
        J0 = ops.jacobi_plane(A, g, fr).matrix
        T0 = ops.stanilov(A, g, fr).matrix
        R0 = ops.skew_curvature(A, g, fr).matrix
        for _ in range(20):
            C = rng.standard_normal((2, 2))
            V = C @ fr.vectors
            sign = np.sign(np.linalg.det(C))
            assert rel(ops.jacobi_plane(A, g, V).matrix, J0) < 1e-8 or not np.any(J0)
            assert np.max(np.abs(ops.stanilov(A, g, V).matrix - T0)) <= 1e-8 * max(np.max(np.abs(T0)), 1e-12)
            assert np.max(np.abs(ops.skew_curvature(A, g, V).matrix - sign * R0)) <= 1e-8 * max(np.max(np.abs(R0)), 1e-12)


@pytest.mark.parametrize("fam", [GF, CONST], ids=lambda f: f.name)
def test_general_forms_reduce_to_orthonormal_sums(fam):
    A, g, frs = frames(fam, PlaneRequest(3, 1, 2), 5, "ortho")
    for fr in frs:
        a, b = ops.jacobi_plane(A, g, fr).matrix, ops.jacobi_plane_sum(A, g, fr).matrix
        assert np.max(np.abs(a - b)) <= 1e-12 * max(np.max(np.abs(b)), 1.0)
        a, b = ops.stanilov(A, g, fr).matrix, ops.stanilov_sum(A, g, fr).matrix
        assert np.max(np.abs(a - b)) <= 1e-12 * max(np.max(np.abs(b)), 1.0)


def test_skew_orientation_and_adjointness():
    A, g, frs = frames(GF, PlaneRequest(2, 1, 1), 3, "or")
    for fr in frs:
        R = ops.skew_curvature(A, g, fr)
        assert R.adjoint_residual() < 1e-9
        np.testing.assert_allclose(ops.skew_curvature(A, g, fr.vectors[::-1]).matrix, -R.matrix, atol=1e-14)


def test_skew_vpp_pair():
    V = model_vpp(3)
    e = np.eye(6)
    M = ops.skew_curvature(V.tensor, V.inner, [e[0] + e[3], e[1] + e[4]]).matrix
    assert np.linalg.matrix_rank(M) == 2
    assert np.max(np.abs(M @ M)) < 1e-14
    assert nilpotency_index(M) == 2


def test_skew_gF_rank_four_nilpotent_cube():
    A, g, frs = frames(GF, PlaneRequest(2, 0, 2), 5, "rk")
    for fr in frs:
        M = ops.skew_curvature(A, g, fr).matrix
        s = np.linalg.norm(M, 2)
        assert np.linalg.matrix_rank(M, tol=1e-9 * s) == 4
        assert np.max(np.abs(np.linalg.matrix_power(M, 3))) < 1e-10 * s**3


def test_skew_rejects_degenerate_and_wrong_size():
    A, g = at(GF)
    with pytest.raises(ops.DegeneratePlaneError):
        ops.skew_curvature(A, g, [np.eye(6)[4], np.eye(6)[5]])  # span{dv1, dv2} is null
    with pytest.raises(ValueError):
        ops.skew_curvature(A, g, np.eye(6)[:3])


def test_stanilov_vanishes_on_gf():
    for req in (PlaneRequest(2, 0, 2), PlaneRequest(3, 3, 0)):
        A, g, frs = frames(GFH, req, 3, "st")
        scale = A.max_abs() ** 2
        for fr in frs:
            assert np.max(np.abs(ops.stanilov(A, g, fr).matrix)) < 1e-12 * scale


def test_stanilov_gF_nonzero_nilpotent():
    A, g, frs = frames(GF, PlaneRequest(2, 0, 2), 3, "stF")
    for fr in frs:
        T = ops.stanilov(A, g, fr)
        assert T.adjoint_residual() < 1e-9
        assert np.max(np.abs(T.matrix)) > 1e-6
        assert nilpotency_index(T.matrix) is not None


def test_weyl_operators():
    A, g = at(CONST)
    x = PlaneSampler(g).sample_unit_vector("timelike", rng_for(8, "w"))
    fr = PlaneSampler(g).sample_plane(PlaneRequest(2, 1, 1), rng_for(8, "wp"))
    assert np.max(np.abs(ops.weyl_jacobi(A, g, x).matrix)) < 1e-12
    assert np.max(np.abs(ops.weyl_skew(A, g, fr).matrix)) < 1e-12
    A, g = at(GF)
    x = PlaneSampler(g).sample_unit_vector("timelike", rng_for(8, "w"))
    fr = PlaneSampler(g).sample_plane(PlaneRequest(2, 0, 2), rng_for(8, "wq"))
    assert rel(ops.weyl_jacobi(A, g, x).matrix, ops.jacobi(A, g, x).matrix) < 1e-10
    assert rel(ops.weyl_skew(A, g, fr).matrix, ops.skew_curvature(A, g, fr).matrix) < 1e-10
