"""Frequency-domain featurization of time series.

Converts variable-length real series into fixed-length, normalized Fourier
coefficient arrays and back.  The forward transform is an exact DFT

    X_k = sum_{n=0}^{N-1} x_n * exp(-2*pi*i*k*n / N)

computed with an iterative radix-2 FFT for power-of-two lengths, a recursive
small-prime Cooley-Tukey decomposition for composite lengths, and Bluestein's
chirp-z algorithm for lengths with large prime factors, so any N >= 2 is
supported.  Stored coefficients are X_k / N; under that normalization the
cosine/sine merge in :func:`inverse_ft` is an exact inverse.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import ComponentCountError, EmptyInputError, InvalidInputError

_SMALL_PRIMES = (2, 3, 5, 7)

# Default component sweep used by the reconstruction experiment.
DEFAULT_SWEEP_COMPONENTS = (1, 2, 3, 5, 10, 15, 20, 30)

# Operating point for corpus building: 20 low-frequency components.
DEFAULT_COMPONENTS = 20


@dataclass(frozen=True)
class TimeSeries:
    """One real-valued sequence with optional class label and dataset tag."""

    values: np.ndarray
    label: str | None = None
    dataset_id: str | None = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 1:
            raise InvalidInputError(
                f"time series must be one-dimensional, got shape {values.shape}"
            )
        if values.size < 2:
            raise InvalidInputError(
                f"time series needs at least 2 samples, got {values.size}"
            )
        if not np.all(np.isfinite(values)):
            raise InvalidInputError("time series contains non-finite values")
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class FrequencyRepresentation:
    """m normalized Fourier coefficients of one series, split (real, imag).

    ``coeffs`` has shape [m, 2]; row k holds (a_k, b_k) = X_k / N for the
    k-th lowest frequency.  ``original_length`` is the source series length N
    and bounds m by floor(N/2) + 1.
    """

    coeffs: np.ndarray
    original_length: int

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=np.float64)
        if coeffs.ndim != 2 or coeffs.shape[1] != 2:
            raise InvalidInputError(
                f"coefficient array must have shape [m, 2], got {coeffs.shape}"
            )
        if not np.all(np.isfinite(coeffs)):
            raise InvalidInputError("coefficients contain non-finite values")
        m = coeffs.shape[0]
        length = int(self.original_length)
        if length < 1:
            raise InvalidInputError(f"original_length must be positive, got {length}")
        if m < 1 or m > length // 2 + 1:
            raise ComponentCountError(
                f"m={m} out of range 1..{length // 2 + 1} for length {length}"
            )
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "original_length", length)

    @property
    def m(self) -> int:
        return self.coeffs.shape[0]


@dataclass(frozen=True)
class SweepPoint:
    """Mean reconstruction MSE for one component count over a dataset."""

    m: int
    mean_mse: float
    series_skipped: int


def _bit_reverse_indices(n: int) -> np.ndarray:
    levels = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.intp)
    for _ in range(levels):
        rev = (rev << 1) | (idx & 1)
        idx >>= 1
    return rev


def _fft_pow2(x: np.ndarray) -> np.ndarray:
    """Iterative radix-2 decimation-in-time FFT; len(x) must be 2**k."""
    n = x.size
    if n == 1:
        return x.astype(np.complex128)
    out = x[_bit_reverse_indices(n)].astype(np.complex128)
    size = 2
    while size <= n:
        half = size // 2
        twiddle = np.exp(-2j * np.pi * np.arange(half) / size)
        blocks = out.reshape(n // size, size)
        even = blocks[:, :half].copy()
        odd = blocks[:, half:] * twiddle
        blocks[:, :half] = even + odd
        blocks[:, half:] = even - odd
        size *= 2
    return out


def _ifft_pow2(x: np.ndarray) -> np.ndarray:
    return np.conj(_fft_pow2(np.conj(x))) / x.size


def _bluestein(x: np.ndarray) -> np.ndarray:
    """Chirp-z FFT for arbitrary length via a power-of-two convolution."""
    n = x.size
    k = np.arange(n, dtype=np.int64)
    # k*k mod 2n keeps the chirp phase argument small and exact.
    chirp = np.exp(-1j * np.pi * ((k * k) % (2 * n)) / n)
    m = 1
    while m < 2 * n - 1:
        m *= 2
    a = np.zeros(m, dtype=np.complex128)
    a[:n] = x * chirp
    b = np.zeros(m, dtype=np.complex128)
    b[:n] = np.conj(chirp)
    b[m - n + 1:] = np.conj(chirp[1:])[::-1]
    conv = _ifft_pow2(_fft_pow2(a) * _fft_pow2(b))[:n]
    return chirp * conv


def _fft_any(x: np.ndarray) -> np.ndarray:
    n = x.size
    if n == 1:
        return x.astype(np.complex128)
    if n & (n - 1) == 0:
        return _fft_pow2(x)
    for p in _SMALL_PRIMES:
        if n % p == 0:
            q = n // p
            subs = [_fft_any(x[r::p]) for r in range(p)]
            k = np.arange(n)
            out = np.zeros(n, dtype=np.complex128)
            wrapped = k % q
            for r, sub in enumerate(subs):
                out += np.exp(-2j * np.pi * (k * r) / n) * sub[wrapped]
            return out
    return _bluestein(x)


def _as_values(series) -> np.ndarray:
    if isinstance(series, TimeSeries):
        return series.values
    values = np.asarray(series, dtype=np.float64)
    if values.ndim != 1 or values.size < 2:
        raise InvalidInputError(
            f"expected a 1-d series with >= 2 samples, got shape {values.shape}"
        )
    if not np.all(np.isfinite(values)):
        raise InvalidInputError("series contains non-finite values")
    return values


def forward_spectrum(series) -> np.ndarray:
    """Unnormalized DFT of a real series, as a complex array of length N.

    Any length N >= 2 is supported, not only powers of two.  The DC entry is
    evaluated as the direct sample sum, so its imaginary part is exactly zero
    for real input.
    """
    values = _as_values(series)
    spectrum = _fft_any(values.astype(np.complex128))
    spectrum[0] = values.sum()
    return spectrum


def truncate_normalize(
    spectrum, m: int, original_length: int, origin: str | None = None
) -> FrequencyRepresentation:
    """Keep the m lowest-frequency coefficients, each divided by N.

    ``origin`` (a dataset/series tag) is only used to label errors when the
    requested m is out of range.
    """
    spectrum = np.asarray(spectrum, dtype=np.complex128)
    limit = original_length // 2 + 1
    if m < 1 or m > limit or m > spectrum.size:
        where = f" ({origin})" if origin else ""
        raise ComponentCountError(
            f"m={m} out of range 1..{limit} for series of length "
            f"{original_length}{where}"
        )
    kept = spectrum[:m] / float(original_length)
    coeffs = np.column_stack([kept.real, kept.imag])
    return FrequencyRepresentation(coeffs=coeffs, original_length=original_length)


def inverse_ft(rep: FrequencyRepresentation) -> TimeSeries:
    """Merge normalized coefficients back into a length-N series.

    rec[j] = sum_k c_k * (a_k * cos(k * theta_j) - b_k * sin(k * theta_j))
    with theta_j = 2*pi*j / N, c_0 = 1 and c_k = 2 for 0 < k < N/2.  The
    Nyquist term (k = N/2, even N) is not doubled; doubling it would break
    exact reconstruction at full m.
    """
    n = rep.original_length
    m = rep.m
    k = np.arange(m, dtype=np.float64)
    scale = np.where(k == 0, 1.0, 2.0)
    if n % 2 == 0:
        scale = np.where(k == n // 2, 1.0, scale)
    theta = np.arange(n, dtype=np.float64) * (2.0 * np.pi / n)
    angles = np.outer(theta, k)
    rec = np.cos(angles) @ (scale * rep.coeffs[:, 0])
    rec -= np.sin(angles) @ (scale * rep.coeffs[:, 1])
    return TimeSeries(values=rec)


def reconstruction_mse(series, m: int) -> float:
    """Mean squared error of the m-component reconstruction of a series."""
    values = _as_values(series)
    spectrum = forward_spectrum(values)
    origin = series.dataset_id if isinstance(series, TimeSeries) else None
    rep = truncate_normalize(spectrum, m, values.size, origin=origin)
    rec = inverse_ft(rep)
    return float(np.mean((values - rec.values) ** 2))


def sweep_components(
    dataset: Sequence[TimeSeries], m_values: Iterable[int] = DEFAULT_SWEEP_COMPONENTS
) -> list[SweepPoint]:
    """Mean reconstruction MSE per component count over a dataset.

    Series too short for a given m (m > floor(N/2) + 1) are skipped and
    counted rather than failing the whole sweep.  Reduction order is fixed
    by series index, so results do not depend on scheduling.
    """
    dataset = list(dataset)
    if not dataset:
        raise EmptyInputError("sweep needs at least one series")
    points = []
    for m in m_values:
        errors = []
        skipped = 0
        for series in dataset:
            if m > len(series) // 2 + 1:
                skipped += 1
                continue
            errors.append(reconstruction_mse(series, m))
        mean = float(np.mean(errors)) if errors else float("nan")
        points.append(SweepPoint(m=int(m), mean_mse=mean, series_skipped=skipped))
    return points


def sweep_csv(points: Sequence[SweepPoint]) -> str:
    """Render a sweep table as CSV with 17-significant-digit floats."""
    lines = ["m,mean_mse,series_skipped"]
    for p in points:
        lines.append(f"{p.m},{p.mean_mse:.17g},{p.series_skipped}")
    return "\n".join(lines) + "\n"
