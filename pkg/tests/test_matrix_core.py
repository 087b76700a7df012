"""Unit tests for the dense kernel helpers."""

import numpy as np
import pytest

from riecur.matrix_core import (
    TruncatedSVD,
    hard_threshold,
    incoherence_estimate,
    pinv_truncated,
    require_indices,
    require_matrix,
    sample_uniform_indices,
    sparsity_profile,
    truncated_svd,
)


class TestRequireMatrix:
    def test_accepts_and_casts(self):
        a = require_matrix([[1, 2], [3, 4]])
        assert a.dtype == np.float64
        np.testing.assert_array_equal(a, [[1.0, 2.0], [3.0, 4.0]])

    def test_rejects_vector(self):
        with pytest.raises(ValueError, match="2-D"):
            require_matrix(np.ones(4))

    def test_rejects_empty(self):
        with pytest.raises(ValueError, match="at least one row"):
            require_matrix(np.ones((0, 3)))

    def test_rejects_nan_and_inf(self):
        with pytest.raises(ValueError, match="non-finite"):
            require_matrix(np.array([[1.0, np.nan]]))
        with pytest.raises(ValueError, match="non-finite"):
            require_matrix(np.array([[np.inf, 1.0]]))


class TestRequireIndices:
    def test_valid(self):
        idx = require_indices([0, 3, 7], 8)
        np.testing.assert_array_equal(idx, [0, 3, 7])

    def test_out_of_bounds(self):
        with pytest.raises(ValueError, match="out of bounds"):
            require_indices([0, 8], 8)
        with pytest.raises(ValueError, match="out of bounds"):
            require_indices([-1, 2], 8)

    def test_duplicates_and_unsorted(self):
        with pytest.raises(ValueError, match="strictly increasing"):
            require_indices([2, 2, 5], 8)
        with pytest.raises(ValueError, match="strictly increasing"):
            require_indices([5, 2], 8)

    def test_empty(self):
        with pytest.raises(ValueError, match="non-empty"):
            require_indices([], 8)


class TestHardThreshold:
    """The operator keeps |a| >= zeta and zeroes the rest."""

    def test_basic(self):
        a = np.array([[0.5, -2.0], [1.0, -0.25]])
        out = hard_threshold(a, 1.0)
        np.testing.assert_array_equal(out, [[0.0, -2.0], [1.0, 0.0]])

    def test_boundary_is_kept(self):
        # Entries exactly at the threshold survive.
        out = hard_threshold(np.array([[1.0, -1.0, 0.999]]), 1.0)
        np.testing.assert_array_equal(out, [[1.0, -1.0, 0.0]])

    def test_zero_threshold_keeps_everything(self):
        rng = np.random.default_rng(3)
        a = rng.standard_normal((6, 5))
        np.testing.assert_array_equal(hard_threshold(a, 0.0), a)

    def test_idempotent(self):
        rng = np.random.default_rng(4)
        a = rng.standard_normal((8, 8))
        once = hard_threshold(a, 0.7)
        np.testing.assert_array_equal(hard_threshold(once, 0.7), once)

    def test_negative_threshold_rejected(self):
        with pytest.raises(ValueError, match="non-negative"):
            hard_threshold(np.ones((2, 2)), -0.1)


class TestTruncatedSVD:
    def test_exact_rank_factorization(self):
        rng = np.random.default_rng(0)
        a = rng.standard_normal((30, 4)) @ rng.standard_normal((4, 25))
        svd = truncated_svd(a, 4)
        np.testing.assert_allclose(svd.W @ np.diag(svd.sigma) @ svd.V.T, a, atol=1e-10)

    def test_orthonormal_factors(self):
        rng = np.random.default_rng(1)
        a = rng.standard_normal((40, 30))
        svd = truncated_svd(a, 6)
        np.testing.assert_allclose(svd.W.T @ svd.W, np.eye(6), atol=1e-12)
        np.testing.assert_allclose(svd.V.T @ svd.V, np.eye(6), atol=1e-12)

    def test_matches_full_svd_values(self):
        rng = np.random.default_rng(2)
        a = rng.standard_normal((50, 35))
        svd = truncated_svd(a, 5)
        ref = np.linalg.svd(a, compute_uv=False)[:5]
        np.testing.assert_allclose(svd.sigma, ref, rtol=1e-12)

    def test_eckart_young_error(self):
        # The rank-r truncation must attain the optimal Frobenius error,
        # which equals the L2 norm of the discarded singular values.
        rng = np.random.default_rng(5)
        a = rng.standard_normal((45, 60))
        r = 7
        svd = truncated_svd(a, r)
        approx = svd.W @ np.diag(svd.sigma) @ svd.V.T
        tail = np.linalg.svd(a, compute_uv=False)[r:]
        np.testing.assert_allclose(
            np.linalg.norm(a - approx), np.linalg.norm(tail), rtol=1e-10
        )

    def test_iterative_path_matches_dense(self):
        # Large enough to take the sparse-solver branch, small enough to be fast.
        rng = np.random.default_rng(6)
        a = rng.standard_normal((700, 650))
        svd = truncated_svd(a, 3)
        ref = np.linalg.svd(a, compute_uv=False)[:3]
        np.testing.assert_allclose(svd.sigma, ref, rtol=1e-8)
        approx = svd.W @ np.diag(svd.sigma) @ svd.V.T
        ref_w, ref_s, ref_vt = np.linalg.svd(a, full_matrices=False)
        ref_a = ref_w[:, :3] @ np.diag(ref_s[:3]) @ ref_vt[:3]
        np.testing.assert_allclose(approx, ref_a, atol=1e-7)

    def test_deterministic(self):
        rng = np.random.default_rng(7)
        a = rng.standard_normal((700, 620))
        s1 = truncated_svd(a, 2)
        s2 = truncated_svd(a, 2)
        np.testing.assert_array_equal(s1.W, s2.W)
        np.testing.assert_array_equal(s1.sigma, s2.sigma)
        np.testing.assert_array_equal(s1.V, s2.V)

    def test_rank_out_of_range(self):
        a = np.ones((4, 3))
        with pytest.raises(ValueError, match="out of range"):
            truncated_svd(a, 0)
        with pytest.raises(ValueError, match="out of range"):
            truncated_svd(a, 4)


class TestPinvTruncated:
    def test_full_rank_square_inverse(self):
        rng = np.random.default_rng(10)
        a = rng.standard_normal((6, 6)) + 6 * np.eye(6)
        np.testing.assert_allclose(pinv_truncated(a, 6), np.linalg.inv(a), atol=1e-9)

    def test_rank_truncation_matches_oracle(self):
        # Independent construction from the full SVD.
        rng = np.random.default_rng(11)
        a = rng.standard_normal((12, 9))
        r = 4
        w, sigma, vt = np.linalg.svd(a, full_matrices=False)
        oracle = vt[:r].T @ np.diag(1.0 / sigma[:r]) @ w[:, :r].T
        np.testing.assert_allclose(pinv_truncated(a, r), oracle, atol=1e-12)

    def test_penrose_identities_on_exact_rank(self):
        rng = np.random.default_rng(12)
        a = rng.standard_normal((15, 3)) @ rng.standard_normal((3, 11))
        p = pinv_truncated(a, 3)
        np.testing.assert_allclose(a @ p @ a, a, atol=1e-9)
        np.testing.assert_allclose(p @ a @ p, p, atol=1e-9)

    def test_small_singular_values_are_dropped(self):
        # One tiny singular value below rel_tol * sigma_1 must not be inverted.
        u = np.eye(3)
        a = u @ np.diag([1.0, 0.5, 1e-15]) @ u
        p = pinv_truncated(a, 3)
        assert np.max(np.abs(p)) <= 2.1

    def test_tikhonov_bias_is_small_and_stabilizing(self):
        rng = np.random.default_rng(13)
        a = rng.standard_normal((8, 8)) + 4 * np.eye(8)
        plain = pinv_truncated(a, 8)
        damped = pinv_truncated(a, 8, tikhonov=True)
        np.testing.assert_allclose(damped, plain, rtol=1e-6, atol=1e-8)

    def test_zero_matrix(self):
        p = pinv_truncated(np.zeros((4, 5)), 2)
        np.testing.assert_array_equal(p, np.zeros((5, 4)))


class TestSampling:
    def test_invariants(self):
        rng = np.random.default_rng(20)
        for _ in range(50):
            idx = sample_uniform_indices(37, 9, rng)
            assert idx.shape == (9,)
            assert idx[0] >= 0 and idx[-1] < 37
            assert np.all(np.diff(idx) > 0)

    def test_full_draw(self):
        rng = np.random.default_rng(21)
        np.testing.assert_array_equal(sample_uniform_indices(5, 5, rng), np.arange(5))

    def test_deterministic_given_state(self):
        a = sample_uniform_indices(100, 10, np.random.default_rng(22))
        b = sample_uniform_indices(100, 10, np.random.default_rng(22))
        np.testing.assert_array_equal(a, b)

    def test_rejects_oversampling(self):
        with pytest.raises(ValueError, match="cannot sample"):
            sample_uniform_indices(4, 5, np.random.default_rng(0))


class TestDiagnostics:
    def test_incoherence_identity_block(self):
        # Standard basis vectors are maximally coherent: mu = n / r.
        w = np.zeros((8, 2))
        w[0, 0] = 1.0
        w[1, 1] = 1.0
        svd = TruncatedSVD(w, np.ones(2), w.copy())
        assert incoherence_estimate(svd) == pytest.approx(4.0)

    def test_incoherence_flat_vector(self):
        # A perfectly spread vector attains the lower bound mu = 1.
        n = 16
        w = np.full((n, 1), 1.0 / np.sqrt(n))
        svd = TruncatedSVD(w, np.ones(1), w.copy())
        assert incoherence_estimate(svd) == pytest.approx(1.0)

    def test_incoherence_at_least_one(self):
        rng = np.random.default_rng(30)
        for _ in range(20):
            a = rng.standard_normal((30, 20))
            svd = truncated_svd(a, 3)
            assert incoherence_estimate(svd) >= 1.0

    def test_sparsity_profile_hand_case(self):
        s = np.zeros((4, 5))
        s[1, :3] = 1.0  # densest row: 3/5
        s[:2, 0] = 1.0  # densest column: 2/4
        assert sparsity_profile(s) == pytest.approx(0.6)

    def test_sparsity_profile_dense_row_dominates(self):
        s = np.zeros((10, 10))
        s[3, :] = 1.0
        assert sparsity_profile(s) == pytest.approx(1.0)

    def test_sparsity_profile_zero_matrix(self):
        assert sparsity_profile(np.zeros((3, 3))) == 0.0
