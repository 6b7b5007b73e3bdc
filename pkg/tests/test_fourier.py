"""Transform and fast-convolution correctness.

The O(L^2) double-loop transform is the oracle for every fast path, and
direct summation oracles (defined inline) check both convolution flavors.
"""

import numpy as np
import pytest

from convformer.fourier import (
    ResidueError,
    circular_conv_fft,
    circular_corr_fft,
    dft_naive,
    fft,
    idft,
    ifft,
    linear_conv_fft,
)
from convformer.rng import Rng


def circular_conv_direct(x, c):
    """Direct O(L^2) circular sum: y_l = sum_j c_j x_{(l-j) mod L}."""
    x = np.asarray(x, dtype=np.float64)
    c = np.asarray(c, dtype=np.float64)
    n = x.shape[-1]
    y = np.zeros_like(x)
    for j in range(n):
        y += c[..., j : j + 1] * np.roll(x, j, axis=-1)
    return y


def causal_conv_direct(x, c):
    """Direct causal sum: y_l = sum_j c_j x_{l-j}, x_{<0} = 0."""
    x = np.asarray(x, dtype=np.float64)
    c = np.asarray(c, dtype=np.float64)
    n, k = len(x), len(c)
    y = np.zeros(n)
    for l in range(n):
        for j in range(k):
            if l - j >= 0:
                y[l] += c[j] * x[l - j]
    return y


class TestNaiveTransform:
    def test_zeros(self):
        np.testing.assert_array_equal(dft_naive([0, 0, 0, 0]), np.zeros(4))

    def test_constant_signal(self):
        np.testing.assert_allclose(
            dft_naive([1, 1, 1, 1]), [4, 0, 0, 0], atol=1e-12
        )

    def test_impulse_flat_spectrum(self):
        np.testing.assert_allclose(
            dft_naive([1, 0, 0, 0]), [1, 1, 1, 1], atol=1e-12
        )

    def test_inverse_roundtrip_length7(self):
        rng = Rng(11)
        x = rng.normal_array(7) + 1j * rng.normal_array(7)
        np.testing.assert_allclose(idft(dft_naive(x)), x, atol=1e-10)

    def test_inverse_of_scaled_impulse_is_ones(self):
        n = 6
        spec = np.zeros(n, dtype=complex)
        spec[0] = n
        np.testing.assert_allclose(idft(spec), np.ones(n), atol=1e-12)

    def test_inverse_of_zeros(self):
        np.testing.assert_array_equal(idft(np.zeros(5)), np.zeros(5))


class TestFastTransform:
    def test_matches_naive_pow2(self):
        rng = Rng(21)
        x = rng.normal_array(64) + 1j * rng.normal_array(64)
        np.testing.assert_allclose(fft(x), dft_naive(x), atol=1e-9)

    def test_matches_naive_length50_bluestein(self):
        rng = Rng(22)
        x = rng.normal_array(50) + 1j * rng.normal_array(50)
        np.testing.assert_allclose(fft(x), dft_naive(x), atol=1e-9)

    def test_delta_closed_form(self):
        x = np.zeros(8)
        x[3] = 1.0
        expect = np.exp(-2j * np.pi * 3 * np.arange(8) / 8)
        np.testing.assert_allclose(fft(x), expect, atol=1e-12)
        np.testing.assert_allclose(np.abs(fft(x)), 1.0, atol=1e-12)

    @pytest.mark.parametrize("n", list(range(1, 33)) + [50, 63, 100, 129])
    def test_matches_naive_all_small_lengths(self, n):
        rng = Rng(1000 + n)
        x = rng.normal_array(n) + 1j * rng.normal_array(n)
        np.testing.assert_allclose(fft(x), dft_naive(x), atol=1e-9)

    @pytest.mark.parametrize("n", [3, 5, 7, 12, 50, 100, 1000])
    def test_roundtrip_non_pow2(self, n):
        rng = Rng(2000 + n)
        x = rng.normal_array(n) + 1j * rng.normal_array(n)
        np.testing.assert_allclose(ifft(fft(x)), x, atol=1e-9)

    def test_linearity(self):
        rng = Rng(23)
        x = rng.normal_array(50) + 1j * rng.normal_array(50)
        y = rng.normal_array(50) + 1j * rng.normal_array(50)
        a, b = 2.5, -1.25
        np.testing.assert_allclose(
            fft(a * x + b * y), a * fft(x) + b * fft(y), atol=1e-9
        )

    @pytest.mark.parametrize("n", [4, 16, 50, 63, 100, 1000])
    def test_parseval(self, n):
        rng = Rng(3000 + n)
        x = rng.normal_array(n) + 1j * rng.normal_array(n)
        time_energy = np.sum(np.abs(x) ** 2)
        freq_energy = np.sum(np.abs(fft(x)) ** 2) / n
        assert abs(time_energy - freq_energy) <= 1e-9 * time_energy

    def test_batched_matches_per_row(self):
        rng = Rng(24)
        x = rng.normal_array((3, 5, 50))
        batched = fft(x)
        for i in range(3):
            for j in range(5):
                np.testing.assert_allclose(
                    batched[i, j], fft(x[i, j]), atol=1e-12
                )


class TestCircularConv:
    def test_delta_kernel_identity(self):
        rng = Rng(31)
        x = rng.normal_array(12)
        c = np.zeros(12)
        c[0] = 1.0
        np.testing.assert_allclose(circular_conv_fft(x, c), x, atol=1e-12)

    def test_small_closed_form(self):
        # direct circular sum gives [5, 3, 5, 7]
        got = circular_conv_fft([1, 2, 3, 4], [1, 1, 0, 0])
        np.testing.assert_allclose(got, [5, 3, 5, 7], atol=1e-12)
        np.testing.assert_allclose(
            circular_conv_direct([1, 2, 3, 4], [1, 1, 0, 0]), [5, 3, 5, 7]
        )

    def test_zero_kernel(self):
        x = Rng(32).normal_array(9)
        np.testing.assert_allclose(
            circular_conv_fft(x, np.zeros(9)), np.zeros(9), atol=1e-12
        )

    @pytest.mark.parametrize("n", list(range(1, 65)) + [50, 100, 1000])
    def test_matches_direct_sum(self, n):
        rng = Rng(4000 + n)
        x = rng.normal_array(n)
        c = rng.normal_array(n)
        np.testing.assert_allclose(
            circular_conv_fft(x, c), circular_conv_direct(x, c), atol=1e-9
        )

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValueError):
            circular_conv_fft(np.ones(4), np.ones(3))

    def test_residue_guard_trips_on_complex_leak(self):
        # feeding a spectrum with a genuinely complex product through the
        # real-output guard must raise, not silently truncate
        with pytest.raises(ResidueError):
            from convformer.fourier import _residue_real

            _residue_real(np.array([1.0 + 1e-3j]))


class TestCircularCorr:
    @pytest.mark.parametrize("n", [1, 2, 7, 16, 50])
    def test_matches_direct_sum(self, n):
        rng = Rng(6000 + n)
        g = rng.normal_array(n)
        c = rng.normal_array(n)
        direct = np.zeros(n)
        for m in range(n):
            for j in range(n):
                direct[m] += c[j] * g[(m + j) % n]
        np.testing.assert_allclose(circular_corr_fft(g, c), direct, atol=1e-9)


class TestLinearConv:
    def test_unit_kernel_identity(self):
        x = Rng(41).normal_array(10)
        np.testing.assert_allclose(linear_conv_fft(x, [1.0]), x, atol=1e-12)

    def test_small_closed_form(self):
        np.testing.assert_allclose(
            linear_conv_fft([1, 2, 3], [1, 1]), [1, 3, 5], atol=1e-12
        )

    def test_full_kernel_ones_prefix_counts(self):
        n = 16
        got = linear_conv_fft(np.ones(n), np.ones(n))
        np.testing.assert_allclose(got, np.arange(1, n + 1), atol=1e-10)

    def test_kernel_longer_than_signal_rejected(self):
        with pytest.raises(ValueError):
            linear_conv_fft(np.ones(3), np.ones(4))

    @pytest.mark.parametrize("n,k", [(1, 1), (8, 3), (50, 45), (50, 50), (37, 11)])
    def test_matches_direct_causal_sum(self, n, k):
        rng = Rng(5000 + 100 * n + k)
        x = rng.normal_array(n)
        c = rng.normal_array(k)
        np.testing.assert_allclose(
            linear_conv_fft(x, c), causal_conv_direct(x, c), atol=1e-9
        )
