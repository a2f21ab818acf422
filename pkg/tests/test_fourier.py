import numpy as np
import pytest

from ffad.errors import ComponentCountError, EmptyInputError, InvalidInputError
from ffad.fourier import (
    DEFAULT_SWEEP_COMPONENTS,
    FrequencyRepresentation,
    TimeSeries,
    forward_spectrum,
    inverse_ft,
    reconstruction_mse,
    sweep_components,
    sweep_csv,
    truncate_normalize,
)

_DFT_MATRICES = {}


def naive_dft(x):
    """Ground-truth O(N^2) DFT: direct evaluation of the defining sum."""
    x = np.asarray(x, dtype=np.float64)
    n = x.size
    if n not in _DFT_MATRICES:
        k = np.arange(n).reshape(-1, 1)
        j = np.arange(n).reshape(1, -1)
        _DFT_MATRICES[n] = np.exp(-2j * np.pi * k * j / n)
    return _DFT_MATRICES[n] @ x.astype(np.complex128)


def sinusoid_mixture(rng, length, n_waves=3, max_freq=8.0):
    t = np.arange(length) / length
    x = np.zeros(length)
    for _ in range(n_waves):
        freq = rng.uniform(0.5, max_freq)
        x += rng.uniform(0.3, 1.2) * np.sin(2 * np.pi * freq * t + rng.uniform(0, 2 * np.pi))
    return x


class TestForwardSpectrum:
    def test_constant_series_is_dc_only(self):
        for n, c in [(8, 0.5), (13, -2.0), (60, 3.25)]:
            spec = forward_spectrum(TimeSeries(np.full(n, c)))
            assert spec[0] == pytest.approx(n * c, abs=1e-12)
            assert spec[0].imag == 0.0
            assert np.max(np.abs(spec[1:])) < 1e-9 * n

    def test_single_bin_cosine(self):
        n = 8
        x = np.cos(2 * np.pi * np.arange(n) / n)
        spec = forward_spectrum(TimeSeries(x))
        expected = np.zeros(n, dtype=complex)
        expected[1] = 4.0
        expected[7] = 4.0
        assert np.allclose(spec, expected, atol=1e-9 * n)

    @pytest.mark.parametrize("length", [15, 60, 97, 128, 512])
    def test_matches_naive_dft(self, length):
        rng = np.random.default_rng(42 + length)
        for _ in range(25):
            x = rng.normal(size=length)
            assert np.max(np.abs(forward_spectrum(x) - naive_dft(x))) < 1e-9 * length

    @pytest.mark.parametrize("length", [2, 3, 4, 5, 6, 7, 9, 11, 12, 16, 21, 49, 50, 79, 101])
    def test_matches_naive_dft_small_lengths(self, length):
        rng = np.random.default_rng(length)
        x = rng.normal(size=length)
        assert np.max(np.abs(forward_spectrum(x) - naive_dft(x))) < 1e-9 * length

    def test_linearity(self):
        rng = np.random.default_rng(7)
        n = 60
        x, y = rng.normal(size=n), rng.normal(size=n)
        alpha, beta = 1.7, -0.45
        lhs = forward_spectrum(alpha * x + beta * y)
        rhs = alpha * forward_spectrum(x) + beta * forward_spectrum(y)
        assert np.max(np.abs(lhs - rhs)) < 1e-9 * n

    def test_dc_imaginary_part_is_exactly_zero(self):
        rng = np.random.default_rng(11)
        for length in [15, 60, 97, 128]:
            spec = forward_spectrum(rng.normal(size=length))
            assert spec[0].imag == 0.0

    def test_non_finite_input_rejected(self):
        with pytest.raises(InvalidInputError):
            forward_spectrum(np.array([1.0, np.nan, 2.0]))
        with pytest.raises(InvalidInputError):
            TimeSeries(np.array([1.0, np.inf]))

    def test_too_short_rejected(self):
        with pytest.raises(InvalidInputError):
            forward_spectrum(np.array([1.0]))


class TestTruncateNormalize:
    def test_constant_series(self):
        c = 0.5
        spec = forward_spectrum(np.full(12, c))
        rep = truncate_normalize(spec, 3, 12)
        assert rep.coeffs == pytest.approx(
            np.array([[c, 0.0], [0.0, 0.0], [0.0, 0.0]]), abs=1e-12
        )
        assert rep.original_length == 12

    def test_cosine_normalization(self):
        n = 8
        x = np.cos(2 * np.pi * np.arange(n) / n)
        rep = truncate_normalize(forward_spectrum(x), 2, n)
        assert rep.coeffs == pytest.approx(np.array([[0.0, 0.0], [0.5, 0.0]]), abs=1e-12)

    def test_m_out_of_range(self):
        spec = forward_spectrum(np.arange(10.0))
        truncate_normalize(spec, 6, 10)  # floor(10/2) + 1 is still valid
        with pytest.raises(ComponentCountError, match="m=7"):
            truncate_normalize(spec, 7, 10)
        with pytest.raises(ComponentCountError, match="BeetleFly"):
            truncate_normalize(spec, 7, 10, origin="BeetleFly")
        with pytest.raises(ComponentCountError):
            truncate_normalize(spec, 0, 10)

    def test_dc_coefficient_imag_is_zero(self):
        rng = np.random.default_rng(3)
        rep = truncate_normalize(forward_spectrum(rng.normal(size=21)), 5, 21)
        assert rep.coeffs[0, 1] == 0.0


class TestInverseFt:
    def test_dc_reconstruction(self):
        rep = FrequencyRepresentation(np.array([[1.5, 0.0]]), original_length=9)
        rec = inverse_ft(rep)
        assert rec.values == pytest.approx(np.full(9, 1.5), abs=1e-12)

    @pytest.mark.parametrize("length", [2, 5, 8, 15, 16, 31, 60, 97])
    def test_full_roundtrip_even_and_odd(self, length):
        rng = np.random.default_rng(100 + length)
        x = rng.normal(size=length)
        m = length // 2 + 1
        rec = inverse_ft(truncate_normalize(forward_spectrum(x), m, length))
        rms = float(np.sqrt(np.mean((rec.values - x) ** 2)))
        assert rms < 1e-8

    def test_nyquist_term_not_doubled(self):
        # A pure alternating signal lives entirely in the Nyquist bin; exact
        # recovery requires that bin to enter the merge with weight 1, not 2.
        n = 8
        x = np.where(np.arange(n) % 2 == 0, 1.0, -1.0)
        rec = inverse_ft(truncate_normalize(forward_spectrum(x), n // 2 + 1, n))
        assert rec.values == pytest.approx(x, abs=1e-12)

    def test_low_m_gives_coarse_trend(self):
        rng = np.random.default_rng(5)
        x = sinusoid_mixture(rng, 60)
        errs = [reconstruction_mse(TimeSeries(x), m) for m in (1, 2, 3, 5, 30)]
        assert errs[-1] < errs[0]
        assert errs[-1] < 1e-3


class TestReconstructionMse:
    def test_full_m_is_exact(self):
        rng = np.random.default_rng(17)
        for length in [14, 15, 60]:
            x = rng.normal(size=length)
            assert reconstruction_mse(TimeSeries(x), length // 2 + 1) < 1e-15

    def test_constant_series_m1_is_zero(self):
        assert reconstruction_mse(TimeSeries(np.full(16, 0.5)), 1) == 0.0
        assert reconstruction_mse(TimeSeries(np.full(10, -2.0)), 1) == 0.0

    def test_monotone_in_m(self):
        rng = np.random.default_rng(23)
        x = TimeSeries(rng.normal(size=60))
        errs = [reconstruction_mse(x, m) for m in range(1, 31)]
        for lo, hi in zip(errs[1:], errs[:-1]):
            assert lo <= hi + 1e-15


class TestSweep:
    def test_default_m_list(self):
        assert DEFAULT_SWEEP_COMPONENTS == (1, 2, 3, 5, 10, 15, 20, 30)

    def test_constant_dataset_all_zero(self):
        # Power-of-two lengths cancel exactly in the radix-2 butterflies, so
        # the zero is bit-exact there; other lengths are zero to rounding.
        data = [TimeSeries(np.full(64, c)) for c in (0.5, 1.0, -4.0)]
        for point in sweep_components(data, [1, 2, 3]):
            assert point.mean_mse == 0.0
            assert point.series_skipped == 0
        for point in sweep_components([TimeSeries(np.full(60, 0.5))], [1, 2, 3]):
            assert point.mean_mse < 1e-30

    def test_sinusoid_corpus_decay(self):
        rng = np.random.default_rng(31)
        data = [TimeSeries(sinusoid_mixture(rng, 60)) for _ in range(100)]
        points = sweep_components(data)
        means = [p.mean_mse for p in points]
        assert all(b <= a + 1e-15 for a, b in zip(means, means[1:]))
        assert means[-1] < 0.1 * means[0]

    def test_short_series_skipped_and_counted(self):
        data = [TimeSeries(np.arange(15.0)), TimeSeries(np.arange(64.0))]
        points = sweep_components(data, [5, 30])
        assert points[0].series_skipped == 0
        assert points[1].series_skipped == 1  # 30 > 15 // 2 + 1

    def test_empty_dataset(self):
        with pytest.raises(EmptyInputError):
            sweep_components([], [1])

    def test_csv_format(self):
        rng = np.random.default_rng(2)
        data = [TimeSeries(rng.normal(size=20)) for _ in range(3)]
        text = sweep_csv(sweep_components(data, [1, 2]))
        lines = text.strip().split("\n")
        assert lines[0] == "m,mean_mse,series_skipped"
        assert len(lines) == 3
        m, mse, skipped = lines[1].split(",")
        assert m == "1" and skipped == "0"
        assert float(mse) > 0
