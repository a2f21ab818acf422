"""Dense linear algebra for Frechet scoring.

Everything here operates on small symmetric matrices (hidden sizes around
20), so a cyclic Jacobi eigensolver is accurate, dependency-free, and fast
enough; the matrix square root is formed from its eigendecomposition.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import InsufficientSamplesError, InvalidInputError, NotPsdError, ShapeError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GaussianStats:
    """Sample mean and covariance of an encoded sample set.

    ``cov`` uses the unbiased n-1 divisor and is symmetrized exactly.
    Positive semidefiniteness (up to a -1e-10 relative eigenvalue tolerance)
    is enforced where it matters numerically, in :func:`sqrtm_psd`.
    """

    mean: np.ndarray
    cov: np.ndarray
    n: int

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=np.float64)
        cov = np.asarray(self.cov, dtype=np.float64)
        if mean.ndim != 1 or cov.shape != (mean.size, mean.size):
            raise ShapeError(
                f"mean {mean.shape} and covariance {cov.shape} are inconsistent"
            )
        if not (np.all(np.isfinite(mean)) and np.all(np.isfinite(cov))):
            raise InvalidInputError("Gaussian statistics contain non-finite values")
        scale = max(1.0, float(np.max(np.abs(cov))))
        if float(np.max(np.abs(cov - cov.T))) > 1e-12 * scale:
            raise InvalidInputError("covariance is not symmetric to 1e-12 relative")
        if self.n < 2:
            raise InsufficientSamplesError(f"need n >= 2 samples, got {self.n}")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def dim(self) -> int:
        return self.mean.size


def fit_gaussian(sample) -> GaussianStats:
    """Fit mean and unbiased covariance to a set of vectors.

    Accepts an EncodedSet or any [n, H] array-like.  The covariance is
    symmetrized as (C + C^T)/2 so downstream eigensolves see an exactly
    symmetric matrix.
    """
    vectors = np.asarray(getattr(sample, "vectors", sample), dtype=np.float64)
    if vectors.ndim != 2:
        raise ShapeError(f"expected [n, H] vectors, got shape {vectors.shape}")
    n = vectors.shape[0]
    if n < 2:
        raise InsufficientSamplesError(f"need at least 2 vectors to fit, got {n}")
    if not np.all(np.isfinite(vectors)):
        raise InvalidInputError("sample vectors contain non-finite values")
    mean = vectors.mean(axis=0)
    centered = vectors - mean
    cov = centered.T @ centered / (n - 1)
    cov = (cov + cov.T) / 2.0
    return GaussianStats(mean=mean, cov=cov, n=n)


def sym_eig(a, tol: float = 1e-13, max_sweeps: int = 60):
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    Returns (eigenvalues ascending, eigenvectors as columns) with
    A = V diag(w) V^T.  Sweeps stop once the off-diagonal Frobenius mass
    falls below tol * ||A||_F.
    """
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {a.shape}")
    scale = max(1.0, float(np.max(np.abs(a))) if a.size else 0.0)
    if float(np.max(np.abs(a - a.T))) > 1e-10 * scale:
        raise ShapeError("matrix is not symmetric to tolerance")
    n = a.shape[0]
    work = (a + a.T) / 2.0
    vectors = np.eye(n)
    fro = float(np.linalg.norm(work))
    if fro == 0.0 or n == 1:
        order = np.argsort(np.diag(work))
        return np.diag(work)[order].copy(), vectors[:, order]

    off_diag = np.ones((n, n), dtype=bool)
    np.fill_diagonal(off_diag, False)
    for _ in range(max_sweeps):
        # norm of the off-diagonal part, summed directly (no cancellation)
        if np.sqrt(np.sum(work[off_diag] ** 2)) <= tol * fro:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = work[p, q]
                if abs(apq) < 1e-300:
                    continue
                tau = (work[q, q] - work[p, p]) / (2.0 * apq)
                if tau == 0.0:
                    t = 1.0
                elif abs(tau) > 1e150:
                    t = 1.0 / (2.0 * tau)  # avoids overflow in tau * tau
                else:
                    t = np.sign(tau) / (abs(tau) + np.sqrt(tau * tau + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                col_p = work[:, p].copy()
                col_q = work[:, q].copy()
                work[:, p] = c * col_p - s * col_q
                work[:, q] = s * col_p + c * col_q
                row_p = work[p, :].copy()
                row_q = work[q, :].copy()
                work[p, :] = c * row_p - s * row_q
                work[q, :] = s * row_p + c * row_q
                work[p, q] = 0.0
                work[q, p] = 0.0
                vec_p = vectors[:, p].copy()
                vectors[:, p] = c * vec_p - s * vectors[:, q]
                vectors[:, q] = s * vec_p + c * vectors[:, q]

    order = np.argsort(np.diag(work))
    return np.diag(work)[order].copy(), vectors[:, order]


def sqrtm_psd(a, clamp_tol: float = 1e-10):
    """Principal square root of a symmetric PSD matrix.

    Eigenvalues in [-clamp_tol * ||A||, 0) are treated as rounding noise,
    clamped to zero, and logged; anything more negative raises NotPsdError.
    """
    values, vectors = sym_eig(a)
    scale = float(np.max(np.abs(values))) if values.size else 0.0
    lowest = float(values[0])
    if lowest < -clamp_tol * max(scale, 1e-300):
        raise NotPsdError(
            f"matrix is not PSD: eigenvalue {lowest:.3e} below "
            f"-{clamp_tol:.0e} * {scale:.3e}"
        )
    if lowest < 0.0:
        logger.warning(
            "clamping %d negative eigenvalue(s) >= %.3e to zero",
            int(np.sum(values < 0.0)),
            lowest,
        )
    root = vectors @ np.diag(np.sqrt(np.maximum(values, 0.0))) @ vectors.T
    return (root + root.T) / 2.0
