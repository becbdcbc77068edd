import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from conftest import random_spd
from graphprec.errors import (
    DimensionMismatch,
    EmptyMatrix,
    NonFiniteEntries,
    NotPositiveDefinite,
    NotSquare,
    NotSymmetric,
)
from graphprec.linalg import (
    as_matrix,
    cholesky,
    invert_spd,
    min_eigenvalue,
    norms,
    solve_spd,
    spectral_norm,
)


class TestCholesky:
    def test_identity(self):
        np.testing.assert_array_equal(cholesky(np.eye(3)).lower, np.eye(3))

    def test_hand_2x2(self):
        low = cholesky([[4.0, 2.0], [2.0, 3.0]]).lower
        np.testing.assert_allclose(low, [[2.0, 0.0], [1.0, np.sqrt(2.0)]], atol=1e-15)
        np.testing.assert_allclose(low @ low.T, [[4, 2], [2, 3]], atol=1e-14)

    def test_indefinite(self):
        with pytest.raises(NotPositiveDefinite):
            cholesky([[1.0, 2.0], [2.0, 1.0]])

    def test_asymmetric(self):
        with pytest.raises(NotSymmetric):
            cholesky([[1.0, 0.5], [0.0, 1.0]])

    def test_not_square(self):
        with pytest.raises(NotSquare):
            cholesky(np.ones((2, 3)))

    def test_empty(self):
        with pytest.raises(EmptyMatrix):
            cholesky(np.zeros((0, 0)))

    def test_near_singular_fails_loudly(self):
        a = np.array([[1.0, 1.0], [1.0, 1.0 + 1e-14]])
        with pytest.raises(NotPositiveDefinite):
            cholesky(a)

    def test_rounding_asymmetry_is_tolerated(self):
        a = np.array([[2.0, 1.0], [1.0 + 1e-15, 2.0]])
        low = cholesky(a).lower
        assert low[0, 1] == 0.0

    def test_nan_rejected(self):
        with pytest.raises(NonFiniteEntries):
            cholesky([[np.nan, 0.0], [0.0, 1.0]])

    @pytest.mark.parametrize("d", [1, 5, 50, 200])
    def test_reconstruction(self, rng, d):
        a = random_spd(rng, d)
        low = cholesky(a).lower
        assert np.all(np.triu(low, 1) == 0)
        assert np.all(np.diag(low) > 0)
        assert np.max(np.abs(low @ low.T - a)) <= 1e-10 * np.max(np.abs(a))


class TestSolve:
    def test_identity(self):
        b = np.array([[1.0], [2.0], [3.0]])
        np.testing.assert_array_equal(solve_spd(cholesky(np.eye(3)), b), b)

    def test_hand_2x2(self):
        x = solve_spd(cholesky([[4.0, 2.0], [2.0, 3.0]]), [1.0, 0.0])
        np.testing.assert_allclose(x, [0.375, -0.25], atol=1e-15)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            solve_spd(cholesky(np.eye(3)), np.ones(2))

    def test_recovers_x(self, rng):
        for d in (2, 10, 40):
            a = random_spd(rng, d)
            x = rng.standard_normal((d, 3))
            got = solve_spd(cholesky(a), a @ x)
            assert np.linalg.norm(got - x) <= 1e-8 * np.linalg.norm(x)


class TestInvert:
    def test_identity(self):
        np.testing.assert_array_equal(invert_spd(np.eye(4)), np.eye(4))

    def test_hand_2x2(self):
        np.testing.assert_allclose(invert_spd([[2.0, 1.0], [1.0, 2.0]]),
                                   [[2 / 3, -1 / 3], [-1 / 3, 2 / 3]], atol=1e-15)

    def test_rank_one(self):
        with pytest.raises(NotPositiveDefinite):
            invert_spd([[1.0, 1.0], [1.0, 1.0]])

    def test_result_symmetric(self, rng):
        inv = invert_spd(random_spd(rng, 7))
        np.testing.assert_array_equal(inv, inv.T)

    @given(st.integers(1, 12), st.integers(0, 2**32 - 1))
    def test_round_trip(self, d, seed):
        a = random_spd(np.random.default_rng(seed), d, eps=1.0)
        back = invert_spd(invert_spd(a))
        assert np.max(np.abs(back - a)) <= 1e-8 * np.max(np.abs(a))


class TestNorms:
    def test_identity(self):
        assert norms(np.eye(3)) == (1.0, 1.0, 1.0, 1.0)

    def test_hand_2x2(self):
        r = norms([[1.0, -2.0], [3.0, 4.0]])
        assert (r.l1, r.linf, r.sup) == (6.0, 7.0, 4.0)
        exact = np.linalg.svd([[1.0, -2.0], [3.0, 4.0]], compute_uv=False)[0]
        assert r.spectral == pytest.approx(exact, rel=1e-9)
        assert r.spectral == pytest.approx(5.117, abs=5e-4)

    def test_vector(self):
        r = norms(np.array([3.0, 4.0]))
        assert (r.l1, r.linf, r.sup) == (7.0, 4.0, 4.0)
        assert r.spectral == pytest.approx(5.0, rel=1e-12)

    def test_empty(self):
        with pytest.raises(EmptyMatrix):
            norms(np.zeros((0, 3)))

    def test_zero_matrix(self):
        assert norms(np.zeros((3, 3))) == (0.0, 0.0, 0.0, 0.0)

    def test_spectral_matches_svd(self, rng):
        for shape in [(5, 5), (8, 3), (3, 8), (30, 30)]:
            a = rng.standard_normal(shape)
            assert spectral_norm(a) == pytest.approx(np.linalg.norm(a, 2), rel=1e-8)

    def test_start_vector_in_null_space(self):
        # all-ones start is annihilated by this matrix
        a = np.array([[1.0, -1.0], [2.0, -2.0]])
        assert spectral_norm(a) == pytest.approx(np.linalg.norm(a, 2), rel=1e-10)

    @given(arrays(np.float64, st.tuples(st.integers(1, 8), st.integers(1, 8)),
                  elements=st.floats(-1e3, 1e3, allow_nan=False)))
    def test_ordering(self, a):
        r = norms(a)
        slack = 1e-9 * max(r.sup, 1e-300)
        assert r.sup <= r.spectral + slack
        assert r.spectral <= np.sqrt(r.l1) * np.sqrt(r.linf) * (1 + 1e-9) + slack


class TestMisc:
    def test_as_matrix_vector_is_column(self):
        assert as_matrix([1.0, 2.0]).shape == (2, 1)

    def test_as_matrix_3d(self):
        with pytest.raises(DimensionMismatch):
            as_matrix(np.zeros((2, 2, 2)))

    def test_min_eigenvalue(self, rng):
        a = random_spd(rng, 12)
        f = cholesky(a)
        got = min_eigenvalue(lambda v: solve_spd(f, v), 12)
        assert got == pytest.approx(np.linalg.eigvalsh(a)[0], rel=1e-6)


def test_spectral_norm_ones_is_an_eigenvector():
    # ones is the eigenvector of the smallest eigenvalue of this inverse
    inv = np.linalg.inv(np.eye(3) + 0.2)
    assert spectral_norm(inv) == pytest.approx(1.0, rel=1e-9)
