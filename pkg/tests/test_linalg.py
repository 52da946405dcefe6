import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from eigenkmeans import linalg as L

from .conftest import naive_matmul


def cofactor_det(m):
    m = [list(r) for r in m]
    if len(m) == 1:
        return m[0][0]
    return sum(
        (-1) ** j * m[0][j] * cofactor_det([row[:j] + row[j + 1 :] for row in m[1:]])
        for j in range(len(m))
    )


def sym3_roots(s):
    """Closed-form eigenvalues of a symmetric 3x3 matrix (trigonometric method)."""
    p1 = s[0, 1] ** 2 + s[0, 2] ** 2 + s[1, 2] ** 2
    q = np.trace(s) / 3
    p2 = sum((s[i, i] - q) ** 2 for i in range(3)) + 2 * p1
    p = math.sqrt(p2 / 6)
    b = (s - q * np.eye(3)) / p
    r = min(1.0, max(-1.0, cofactor_det(b) / 2))
    phi = math.acos(r) / 3
    e1 = q + 2 * p * math.cos(phi)
    e3 = q + 2 * p * math.cos(phi + 2 * math.pi / 3)
    return sorted([e1, 3 * q - e1 - e3, e3], reverse=True)


def random_symmetric(rng, n):
    b = rng.standard_normal((n, n))
    return (b + b.T) / 2


class TestHelpers:
    def test_gram_identity(self):
        np.testing.assert_array_equal(L.gram(np.eye(2)), np.eye(2))

    def test_gram_column(self):
        np.testing.assert_array_equal(L.gram([[3.0], [4.0]]), [[25.0]])

    def test_gram_matches_naive(self, rng):
        a = rng.standard_normal((5, 3))
        np.testing.assert_allclose(L.gram(a), naive_matmul(a.T.tolist(), a.tolist()), atol=1e-12)

    def test_gram_bitwise_symmetric(self, rng):
        g = L.gram(rng.standard_normal((300, 17)))
        assert np.array_equal(g, g.T)

    def test_matvec(self, rng):
        x = rng.standard_normal(3)
        np.testing.assert_array_equal(L.matvec(np.eye(3), x), x)
        np.testing.assert_array_equal(L.matvec(np.zeros((3, 3)), x), np.zeros(3))
        a = rng.standard_normal((4, 3))
        expected = naive_matmul(a.tolist(), [[v] for v in x])[:, 0]
        np.testing.assert_allclose(L.matvec(a, x), expected, atol=1e-12)

    def test_matmul_transpose_scale_axpy(self, rng):
        a, b = rng.standard_normal((4, 3)), rng.standard_normal((3, 2))
        np.testing.assert_allclose(L.matmul(a, b), naive_matmul(a.tolist(), b.tolist()), atol=1e-12)
        np.testing.assert_array_equal(L.transpose(a), a.T)
        np.testing.assert_array_equal(L.scale(2.0, a), 2 * a)
        np.testing.assert_array_equal(L.axpy(3.0, a, a), 4 * a)

    @pytest.mark.parametrize(
        "call",
        [
            lambda: L.matvec(np.eye(3), np.ones(2)),
            lambda: L.matmul(np.ones((2, 3)), np.ones((2, 3))),
            lambda: L.axpy(1.0, np.ones(2), np.ones(3)),
        ],
    )
    def test_dimension_mismatch(self, call):
        with pytest.raises(L.DimensionError):
            call()


class TestJacobi:
    def test_diagonal(self):
        pairs = L.eig_symmetric([[2.0, 0.0], [0.0, 3.0]])
        assert [p.value for p in pairs] == [3.0, 2.0]
        np.testing.assert_array_equal(pairs[0].vector, [0.0, 1.0])
        np.testing.assert_array_equal(pairs[1].vector, [1.0, 0.0])

    def test_two_by_two(self):
        # roots of λ² - 4λ + 3
        pairs = L.eig_symmetric([[2.0, 1.0], [1.0, 2.0]])
        np.testing.assert_allclose([p.value for p in pairs], [3.0, 1.0], atol=1e-14)
        h = 1 / math.sqrt(2)
        np.testing.assert_allclose(pairs[0].vector, [h, h], atol=1e-14)
        # largest-magnitude component ties -> index 0 is made positive
        np.testing.assert_allclose(pairs[1].vector, [h, -h], atol=1e-14)

    def test_one_by_one(self):
        (pair,) = L.eig_symmetric([[-4.5]])
        assert pair.value == -4.5
        np.testing.assert_array_equal(pair.vector, [1.0])

    def test_zero_matrix(self):
        values, vectors = L.eig_symmetric_arrays(np.zeros((3, 3)))
        np.testing.assert_array_equal(values, 0.0)
        np.testing.assert_array_equal(vectors, np.eye(3))

    def test_residual_random_8x8(self, rng):
        s = random_symmetric(rng, 8)
        for pair in L.eig_symmetric(s):
            assert np.linalg.norm(s @ pair.vector - pair.value * pair.vector) <= 1e-8
            assert abs(np.linalg.norm(pair.vector) - 1) <= 1e-12

    def test_three_by_three_closed_form(self, rng):
        for _ in range(20):
            s = random_symmetric(rng, 3)
            values, _ = L.eig_symmetric_arrays(s)
            np.testing.assert_allclose(values, sym3_roots(s), atol=1e-10)

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_product_is_determinant(self, rng, n):
        s = random_symmetric(rng, n)
        values, _ = L.eig_symmetric_arrays(s)
        assert math.isclose(np.prod(values), cofactor_det(s.tolist()), rel_tol=1e-9, abs_tol=1e-12)

    def test_sign_convention(self, rng):
        _, v = L.eig_symmetric_arrays(random_symmetric(rng, 9))
        for col in v.T:
            assert col[np.argmax(np.abs(col))] > 0

    def test_non_symmetric_rejected(self):
        with pytest.raises(L.NotSymmetricError):
            L.eig_symmetric([[1.0, 2.0], [0.0, 1.0]])

    def test_non_square_rejected(self):
        with pytest.raises(L.DimensionError):
            L.eig_symmetric(np.ones((2, 3)))

    def test_non_convergence(self, rng, monkeypatch):
        monkeypatch.setattr(L, "MAX_SWEEPS", 1)
        with pytest.raises(L.ConvergenceError) as err:
            L.eig_symmetric_arrays(random_symmetric(rng, 12))
        assert err.value.off_norm > 0

    def test_repeated_eigenvalues_orthonormal(self):
        s = np.diag([2.0, 2.0, 2.0, 5.0])
        q, _ = np.linalg.qr(np.random.default_rng(1).standard_normal((4, 4)))
        values, v = L.eig_symmetric_arrays(q @ s @ q.T)
        np.testing.assert_allclose(values, [5, 2, 2, 2], atol=1e-12)
        assert np.linalg.norm(v.T @ v - np.eye(4)) <= 1e-7

    def test_deterministic(self, rng):
        s = random_symmetric(rng, 15)
        a = L.eig_symmetric_arrays(s)
        b = L.eig_symmetric_arrays(s.copy())
        assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])


@settings(max_examples=60, deadline=None)
@given(
    arrays(np.float64, st.tuples(st.integers(1, 12), st.integers(1, 12)),
           elements=st.floats(-1, 1, allow_subnormal=False))
)
def test_eigen_invariants(b):
    n = min(b.shape)
    s = b[:n, :n]
    s = (s + s.T) / 2
    values, v = L.eig_symmetric_arrays(s)
    assert np.all(np.diff(values) <= 0)
    tr = np.trace(s)
    assert abs(values.sum() - tr) <= 1e-8 * abs(tr) + 1e-12
    assert np.linalg.norm(v.T @ v - np.eye(n)) <= 1e-7
    for i in range(n):
        assert np.linalg.norm(s @ v[:, i] - values[i] * v[:, i]) <= 1e-8 * np.linalg.norm(s)
    gaps = np.abs(values[:, None] - values[None, :]) > 1e-6
    assert np.all(np.abs(v.T @ v)[gaps] <= 1e-8)


@pytest.mark.parametrize("n", [1, 2, 3, 7, 8, 21])
def test_schedule_covers_each_pair_once(n):
    seen = []
    for p, q in L._round_robin(n):
        assert len(set(p) | set(q)) == 2 * len(p)  # disjoint within a round
        seen += list(zip(p.tolist(), q.tolist()))
    assert sorted(seen) == [(i, j) for i in range(n) for j in range(i + 1, n)]
