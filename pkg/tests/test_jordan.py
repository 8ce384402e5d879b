import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curvspec.jordan import (
    JordanEntry,
    JordanType,
    blocks_from_ranks,
    dumps,
    jordan_type,
    negated,
    nilpotency_index,
    planted_example,
    real_jordan_block,
    same_type,
)
from curvspec.tensor_core import model_vpp, curvature_operator


def jt(*pairs, dim=None):
    entries = tuple(JordanEntry(float(complex(l).real), float(complex(l).imag), tuple(b)) for l, b in pairs)
    return JordanType.from_json([e.to_json() for e in entries])


def conj(rng, M):
    while True:
        S = rng.standard_normal(M.shape)
        if np.linalg.cond(S) < 100:
            return S @ M @ np.linalg.inv(S)


def test_zero_matrix():
    t = jordan_type(np.zeros((4, 4)))
    assert t.to_json() == [{"re": 0.0, "im": 0.0, "blocks": [1, 1, 1, 1]}]


def test_square_zero_rank_one():
    M = np.zeros((3, 3))
    M[0, 2] = 1.0
    assert jordan_type(M).blocks_at(0) == (2, 1)


def test_conjugated_three_block_plus_two(rng):
    J = np.zeros((4, 4))
    J[:3, :3] = real_jordan_block(0, 3)
    J[3, 3] = 2.0
    t = jordan_type(conj(rng, J))
    assert not t.uncertain
    assert same_type(t, jt((0, [3]), (2, [1])))


def test_complex_pair_merged():
    t = jordan_type(real_jordan_block(complex(1, 2), 2))
    assert len(t.entries) == 1
    e = t.entries[0]
    assert e.pair and e.blocks == (2,) and (e.re, e.im) == pytest.approx((1, 2))
    assert t.dim == 4


def test_nilpotent_fast_path_agrees(rng):
    J = np.zeros((6, 6))
    J[:3, :3] = real_jordan_block(0, 3)
    J[3:5, 3:5] = real_jordan_block(0, 2)
    M = conj(rng, J)
    a, b = jordan_type(M, nilpotent=True), jordan_type(M)
    assert a.blocks_at(0) == b.blocks_at(0) == (3, 2, 1)


def test_nilpotency_index():
    assert nilpotency_index(np.zeros((3, 3))) == 1
    assert nilpotency_index(np.eye(3)) is None
    V = model_vpp(2)
    e = np.eye(4)
    M = curvature_operator(V.tensor, V.inner, e[0], e[1])  # X1 -> -Y2, X2 -> Y1
    assert nilpotency_index(M) == 2
    assert nilpotency_index(real_jordan_block(0, 4)) == 4


def test_same_type_examples():
    t = jt((0, [2, 1]))
    assert same_type(t, t)
    assert not same_type(t, jt((0, [1, 1, 1])))
    assert same_type(jt((1.0, [1]), (0, [2])), jt((1.0 + 5e-9, [1]), (0, [2])), 1e-6)
    assert not same_type(jt((1.0, [1]), (0, [2])), jt((1.1, [1]), (0, [2])), 1e-6)
    assert not same_type(jt((0, [1])), jt((0, [1, 1])))


def test_negated_matches_direct(rng):
    M, _ = planted_example(rng)
    assert same_type(negated(jordan_type(M)), jordan_type(-M))


def test_serialization_is_canonical():
    a = jt((2, [1]), (0, [3]))
    b = jt((0, [3]), (2, [1]))
    assert dumps(a) == dumps(b)
    assert JordanType.from_json(a.to_json()) == a


def test_block_sum_invariant():
    with pytest.raises(ValueError):
        JordanType((JordanEntry(0.0, 0.0, (2,)),), 3)


@pytest.mark.parametrize("ranks, blocks, ok", [([4, 2, 0], (2, 2), True), ([3, 1, 0], (2, 1), True),
                                               ([5, 3, 2, 1, 1], (3, 1), True), ([4, 3, 1], (2, 2), False)])
def test_blocks_from_ranks(ranks, blocks, ok):
    got, good = blocks_from_ranks(ranks)
    assert good == ok
    if ok:
        assert got == blocks


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**63 - 1))
def test_conjugation_invariance(seed):
    rng = np.random.default_rng(seed)
    M, _ = planted_example(rng)
    t = jordan_type(M)
    u = jordan_type(conj(rng, M))
    assert t.uncertain or u.uncertain or same_type(t, u)


def test_planted_recovery(rng):
    misses = 0
    for _ in range(200):
        M, want = planted_example(rng)
        got = jordan_type(M)
        misses += not (not got.uncertain and same_type(got, want))
    assert misses == 0


@pytest.mark.parametrize("n", [2, 5, 8])
def test_definite_self_adjoint_is_diagonalizable(rng, n):
    B = rng.standard_normal((n, n))
    G = B @ B.T + n * np.eye(n)  # definite metric
    for _ in range(5):
        H = rng.standard_normal((n, n))
        H = H + H.T
        A = np.linalg.solve(G, H)  # G A is symmetric, so A is G-self-adjoint
        t = jordan_type(A)
        assert all(e.im == 0 and set(e.blocks) == {1} for e in t.entries)


def test_repeated_eigenvalue_self_adjoint():
    A = np.diag([1.0, 1.0, 1.0, -2.0])
    t = jordan_type(A)
    assert t.blocks_at(1.0) == (1, 1, 1) and t.blocks_at(-2.0) == (1,)


def test_rejects_bad_input():
    with pytest.raises(ValueError):
        jordan_type(np.ones((2, 3)))
    with pytest.raises(ValueError):
        jordan_type(np.array([[np.nan, 0], [0, 1]]))


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**63 - 1), st.integers(1, 8), st.sampled_from([1e-20, 1e-6, 1.0, 1e8]))
def test_any_matrix_gives_a_valid_type(seed, n, scale):
    M = np.random.default_rng(seed).standard_normal((n, n)) * scale
    t = jordan_type(M)
    assert sum(e.size for e in t.entries) == n
    assert all(list(e.blocks) == sorted(e.blocks, reverse=True) for e in t.entries)
    assert len({(e.re, e.im) for e in t.entries}) == len(t.entries)
