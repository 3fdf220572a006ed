"""Raster primitives against loop oracles and their stated edge cases."""

import numpy as np
import pytest
from oracles import entropy_oracle, gaussian_oracle, sobel_oracle_exact

from depthq import (
    DegenerateInputError,
    GaussianPass,
    GrayMap,
    RgbMap,
    gaussian_blur,
    hadamard,
    local_entropy,
    luminance,
    normalize_unit,
    rectify_shift,
    sobel_gradient,
)
from depthq.raster import require_unit


class TestGrayMap:
    def test_rejects_non_finite(self):
        bad = np.array([[0.0, np.nan], [0.0, 0.0]])
        with pytest.raises(ValueError):
            GrayMap(bad)
        with pytest.raises(ValueError):
            GrayMap(np.array([[np.inf, 0.0]]))

    def test_rejects_wrong_rank(self):
        with pytest.raises(DegenerateInputError):
            GrayMap(np.zeros((2, 2, 3)))

    def test_data_is_read_only(self):
        m = GrayMap(np.zeros((3, 3)))
        with pytest.raises(ValueError):
            m.data[0, 0] = 1.0

    def test_shape_accessors(self):
        m = GrayMap(np.zeros((4, 7)))
        assert (m.height, m.width, m.shape) == (4, 7, (4, 7))


class TestRgbMap:
    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            RgbMap(np.full((2, 2, 3), 256.0))
        with pytest.raises(ValueError):
            RgbMap(np.full((2, 2, 3), -1.0))

    def test_rejects_wrong_channels(self):
        with pytest.raises(DegenerateInputError):
            RgbMap(np.zeros((2, 2, 4)))
        with pytest.raises(DegenerateInputError):
            RgbMap(np.zeros((2, 2)))


class TestGaussianPass:
    def test_rejects_even_or_nonpositive_side(self):
        with pytest.raises(ValueError):
            GaussianPass(8, 2.0)
        with pytest.raises(ValueError):
            GaussianPass(-3, 2.0)

    def test_rejects_bad_sigma(self):
        with pytest.raises(ValueError):
            GaussianPass(5, 0.0)
        with pytest.raises(ValueError):
            GaussianPass(5, float("nan"))

    def test_weights_normalised_and_symmetric(self):
        w = GaussianPass(9, 2.0).weights()
        assert w.shape == (9,)
        assert abs(w.sum() - 1.0) < 1e-12
        assert np.allclose(w, w[::-1])


class TestNormalizeUnit:
    def test_all_zero_stays_zero(self):
        out = normalize_unit(GrayMap(np.zeros((4, 4))))
        assert not out.data.any()

    def test_scales_by_max(self):
        m = GrayMap(np.array([[0.0, 0.5], [2.0, 0.5]]))
        out = normalize_unit(m)
        assert np.array_equal(out.data, np.array([[0.0, 0.25], [1.0, 0.25]]))

    def test_identity_when_max_is_one(self):
        m = GrayMap(np.array([[0.25, 1.0], [0.5, 0.0]]))
        assert np.array_equal(normalize_unit(m).data, m.data)

    def test_rejects_negative_values(self):
        with pytest.raises(ValueError):
            normalize_unit(GrayMap(np.array([[-0.1, 0.5]])))


class TestRequireUnit:
    def test_passes_in_range(self):
        require_unit(GrayMap(np.array([[0.0, 1.0]])))

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            require_unit(GrayMap(np.array([[1.0001]])))


class TestSobelGradient:
    def test_constant_is_zero(self):
        out = sobel_gradient(GrayMap(np.full((6, 6), 0.7)))
        assert not out.data.any()

    def test_step_edge_response_location(self):
        arr = np.zeros((8, 8))
        arr[:, 4:] = 1.0
        out = sobel_gradient(GrayMap(arr)).data
        assert np.all(out[:, 3:5] == 1.0)
        assert not out[:, :2].any()
        assert not out[:, 6:].any()

    def test_matches_loop_oracle_exactly(self):
        rng = np.random.default_rng(11)
        arr = rng.uniform(0, 1, size=(8, 8))
        out = sobel_gradient(GrayMap(arr)).data
        assert np.array_equal(out, sobel_oracle_exact(arr))

    def test_rejects_tiny_input(self):
        with pytest.raises(DegenerateInputError):
            sobel_gradient(GrayMap(np.zeros((2, 5))))


class TestGaussianBlur:
    def test_constant_preserved(self):
        out = gaussian_blur(GrayMap(np.full((9, 9), 0.42)), GaussianPass(5, 1.5))
        assert np.allclose(out.data, 0.42, atol=1e-12)

    def test_impulse_mass_preserved(self):
        arr = np.zeros((33, 33))
        arr[16, 16] = 1.0
        out = gaussian_blur(GrayMap(arr), GaussianPass(9, 2.0))
        assert abs(out.data.sum() - 1.0) < 1e-9

    def test_matches_dense_convolution_oracle(self):
        rng = np.random.default_rng(5)
        arr = rng.uniform(0, 1, size=(16, 16))
        out = gaussian_blur(GrayMap(arr), GaussianPass(5, 1.5)).data
        assert np.abs(out - gaussian_oracle(arr, 5, 1.5)).max() < 1e-9

    def test_linearity(self):
        rng = np.random.default_rng(6)
        a = rng.uniform(0, 1, size=(8, 8))
        b = rng.uniform(0, 1, size=(8, 8))
        gp = GaussianPass(5, 1.2)
        lhs = gaussian_blur(GrayMap(0.3 * a + 0.6 * b), gp).data
        rhs = 0.3 * gaussian_blur(GrayMap(a), gp).data + 0.6 * gaussian_blur(GrayMap(b), gp).data
        assert np.abs(lhs - rhs).max() < 1e-9

    def test_interior_mass_mean_preserved(self):
        # Concentrate the signal away from the borders so replicate padding
        # never clips smoothing mass; the mean must then survive the pass.
        arr = np.zeros((32, 32))
        arr[12:20, 12:20] = 0.8
        out = gaussian_blur(GrayMap(arr), GaussianPass(7, 1.5))
        assert abs(out.data.mean() - arr.mean()) < 1e-6


class TestRectifyShift:
    def test_below_threshold_zeroes(self):
        out = rectify_shift(GrayMap(np.full((3, 3), 0.2)), 0.5)
        assert not out.data.any()

    def test_affine_shift(self):
        out = rectify_shift(GrayMap(np.full((3, 3), 0.7)), 0.5)
        assert np.allclose(out.data, 0.2)

    def test_zero_threshold_is_identity(self):
        rng = np.random.default_rng(2)
        arr = rng.uniform(0, 1, size=(4, 4))
        assert np.array_equal(rectify_shift(GrayMap(arr), 0.0).data, arr)

    def test_matches_pointwise_oracle_exactly(self):
        rng = np.random.default_rng(3)
        arr = rng.uniform(0, 1, size=(5, 5))
        out = rectify_shift(GrayMap(arr), 0.4).data
        assert np.array_equal(out, np.maximum(arr - 0.4, 0.0))

    def test_rejects_non_finite_threshold(self):
        with pytest.raises(ValueError):
            rectify_shift(GrayMap(np.zeros((2, 2))), float("nan"))


class TestHadamard:
    def test_ones_identity(self):
        rng = np.random.default_rng(4)
        arr = rng.uniform(0, 1, size=(8, 8))
        out = hadamard(GrayMap(arr), GrayMap(np.ones((8, 8))))
        assert np.array_equal(out.data, arr)

    def test_zeros_absorb(self):
        rng = np.random.default_rng(4)
        arr = rng.uniform(0, 1, size=(8, 8))
        assert not hadamard(GrayMap(arr), GrayMap(np.zeros((8, 8)))).data.any()

    def test_commutative(self):
        rng = np.random.default_rng(8)
        a = rng.uniform(0, 1, size=(8, 8))
        b = rng.uniform(0, 1, size=(8, 8))
        ab = hadamard(GrayMap(a), GrayMap(b)).data
        ba = hadamard(GrayMap(b), GrayMap(a)).data
        assert np.array_equal(ab, ba)
        assert np.array_equal(ab, a * b)

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            hadamard(GrayMap(np.zeros((2, 3))), GrayMap(np.zeros((3, 2))))


class TestLocalEntropy:
    def test_constant_map_zero_entropy(self):
        out = local_entropy(GrayMap(np.full((7, 7), 0.33)), 2, 8)
        assert not out.data.any()

    def test_uniform_window_hits_log2_bins(self):
        # A 3x3 window whose nine values land in nine distinct bins is a
        # uniform occupancy, the entropy maximum.
        bins = 9
        vals = (np.arange(9) + 0.5) / bins
        arr = vals.reshape(3, 3)
        out = local_entropy(GrayMap(arr), 1, bins)
        assert abs(out.data[1, 1] - np.log2(bins)) < 1e-12

    def test_matches_windowed_histogram_oracle(self):
        rng = np.random.default_rng(9)
        arr = rng.uniform(0, 1, size=(12, 12))
        out = local_entropy(GrayMap(arr), 2, 8).data
        assert np.abs(out - entropy_oracle(arr, 2, 8)).max() < 1e-9

    def test_output_bounded_by_log2_bins(self):
        rng = np.random.default_rng(10)
        arr = rng.uniform(0, 1, size=(20, 20))
        out = local_entropy(GrayMap(arr), 3, 16).data
        assert out.min() >= 0.0
        assert out.max() <= np.log2(16) + 1e-12

    def test_parameter_validation(self):
        m = GrayMap(np.zeros((4, 4)))
        with pytest.raises(ValueError):
            local_entropy(m, 0, 8)
        with pytest.raises(ValueError):
            local_entropy(m, 1, 1)
        with pytest.raises(ValueError):
            local_entropy(GrayMap(np.full((4, 4), 1.5)), 1, 8)


class TestLuminance:
    def test_white_maps_to_one(self):
        out = luminance(RgbMap(np.full((2, 2, 3), 255.0)))
        assert np.allclose(out.data, 1.0, atol=1e-12)

    def test_pure_red_coefficient(self):
        rgb = np.zeros((2, 2, 3))
        rgb[..., 0] = 255.0
        out = luminance(RgbMap(rgb))
        assert np.allclose(out.data, 0.299, atol=1e-12)
