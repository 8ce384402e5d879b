import numpy as np
import pytest

from curvspec.grassmann import (
    DegeneratePlaneError,
    PlaneRequest,
    PlaneSampler,
    SamplingError,
    orthonormalize,
    rng_for,
    sample_plane,
    sample_unit_vector,
)
from curvspec.tensor_core import InnerProduct


def eta(p, q):
    return InnerProduct(np.diag([-1.0] * p + [1.0] * q))


def test_unit_vectors_are_normalized():
    g = eta(1, 1)
    for i in range(50):
        v = sample_unit_vector(g, "spacelike", rng_for(1, "v", i))
        assert abs(v @ g.matrix @ v - 1) < 1e-12
        w = sample_unit_vector(g, "timelike", rng_for(1, "w", i))
        assert abs(w @ g.matrix @ w + 1) < 1e-12


def test_unit_vector_in_general_metric(rng):
    B = rng.standard_normal((4, 4))
    while np.linalg.cond(B) > 10:
        B = rng.standard_normal((4, 4))
    g = InnerProduct(B @ np.diag([-1.0, 1, 1, 1]) @ B.T)
    v = sample_unit_vector(g, "timelike", rng_for(2, "t"))
    assert abs(v @ g.matrix @ v + 1) < 1e-12


def test_impossible_kinds():
    with pytest.raises(SamplingError):
        sample_unit_vector(eta(0, 3), "timelike", rng_for(0))
    with pytest.raises(ValueError):
        sample_unit_vector(eta(1, 2), "null", rng_for(0))


def test_plane_types():
    g = eta(1, 2)
    fr = sample_plane(g, PlaneRequest(2, 1, 1), rng_for(3, "m"))
    assert fr.eps == (-1, 1)
    np.testing.assert_allclose(g.gram(fr.vectors), np.diag([-1.0, 1.0]), atol=1e-10)
    fr = sample_plane(g, PlaneRequest(2, 0, 2), rng_for(3, "s"))
    assert fr.eps == (1, 1)
    with pytest.raises(SamplingError):
        sample_plane(g, PlaneRequest(3, 0, 3), rng_for(3))


@pytest.mark.parametrize("p, q", [(1, 3), (2, 2), (3, 3), (0, 4)])
def test_every_frame_is_orthonormal(p, q):
    g = eta(p, q)
    S = PlaneSampler(g)
    for r in range(min(p, 2) + 1):
        for s in range(min(q, 2) + 1):
            if r + s == 0:
                continue
            for i in range(20):
                fr = S.sample_plane(PlaneRequest(r + s, r, s), rng_for(4, r, s, i))
                assert np.max(np.abs(g.gram(fr.vectors) - np.diag(fr.eps))) < 1e-10
                assert fr.eps == (-1,) * r + (1,) * s


def test_determinism():
    g = eta(2, 3)
    a = sample_plane(g, PlaneRequest(2, 1, 1), rng_for(42, "chk", 0, 7)).vectors
    b = sample_plane(g, PlaneRequest(2, 1, 1), rng_for(42, "chk", 0, 7)).vectors
    c = sample_plane(g, PlaneRequest(2, 1, 1), rng_for(42, "chk", 0, 8)).vectors
    assert a.tobytes() == b.tobytes()
    assert a.tobytes() != c.tobytes()


def test_coverage_smoke():
    g = eta(2, 2)
    S = PlaneSampler(g)
    planes = []
    for i in range(1000):
        fr = S.sample_plane(PlaneRequest(2, 0, 2), rng_for(5, "cov", i))
        assert min(fr.pivots) > 0.05
        planes.append((fr.vectors.T @ fr.vectors @ g.matrix).ravel())  # g-orthogonal projector onto the plane
    P = np.array(planes)
    d = np.linalg.norm(P[:, None] - P[None], axis=-1)
    np.fill_diagonal(d, np.inf)
    assert d.min() > 1e-8
    assert np.std(P, axis=0).max() > 0.1


def test_orthonormalize_examples():
    g = eta(1, 2)
    fr = orthonormalize(g, np.eye(3)[:2])
    np.testing.assert_array_equal(fr.vectors, np.eye(3)[:2])
    assert fr.eps == (-1, 1)
    with pytest.raises(DegeneratePlaneError):
        orthonormalize(g, [[1.0, 1.0, 0.0]])
    fr = orthonormalize(g, [[2.0, 0, 0], [0, 3.0, 0]])
    assert fr.eps == (-1, 1)
    np.testing.assert_allclose(fr.vectors, np.eye(3)[:2])
    np.testing.assert_allclose(fr.change_of_basis, np.diag([0.5, 1 / 3]))


def test_orthonormalize_change_of_basis(rng):
    g = eta(2, 3)
    V = rng.standard_normal((3, 5))
    fr = orthonormalize(g, V)
    np.testing.assert_allclose(fr.change_of_basis @ V, fr.vectors, atol=1e-12)
    np.testing.assert_allclose(g.gram(fr.vectors), np.diag(fr.eps), atol=1e-10)


def test_plane_request_validation():
    with pytest.raises(ValueError):
        PlaneRequest(2, 1, 2)
    assert PlaneRequest.of_type(1, 1) == PlaneRequest(2, 1, 1)
