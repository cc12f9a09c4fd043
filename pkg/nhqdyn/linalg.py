"""
Dense complex matrix kernel: eigendecompositions, positive square roots,
series matrix exponential and residual diagnostics
"""
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from nhqdyn.errors import (
    DegenerateSpectrum, DimMismatch, InvalidMatrix, NonConvergence,
    NotHermitian, NotPositive, Overflow
)
from nhqdyn.tolerances import DEFAULT_TOLERANCES

# Taylor terms used after scaling the argument below SERIES_RADIUS
TAYLOR_TERMS = 18
SERIES_RADIUS = 0.5
# e**709 is the largest finite double
MAX_SERIES_NORM = 700.0


def frozen(array):
    """Return a read-only copy of an array"""
    out = np.array(array, copy=True)
    out.setflags(write=False)
    return out


def as_matrix(A, max_dim=None):
    """
    Validate and convert to a square complex128 matrix

    Args:
        A: Array-like square matrix
        max_dim: Optional dimension cap

    Returns:
        numpy complex128 array of shape (n, n)
    """
    M = np.asarray(A, dtype=np.complex128)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] < 1:
        raise InvalidMatrix(f"Expected a non-empty square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise InvalidMatrix("Matrix has NaN or infinite entries")
    if max_dim is not None and M.shape[0] > max_dim:
        raise InvalidMatrix(f"Dimension {M.shape[0]} exceeds the configured maximum {max_dim}")
    return M


def as_vector(v, dim=None):
    """
    Validate and convert to a complex128 vector

    Args:
        v: Array-like vector
        dim: Expected dimension, checked when given
    """
    x = np.asarray(v, dtype=np.complex128)
    if x.ndim != 1 or x.shape[0] < 1:
        raise InvalidMatrix(f"Expected a non-empty vector, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise InvalidMatrix("Vector has NaN or infinite entries")
    if dim is not None and x.shape[0] != dim:
        raise DimMismatch(f"Vector has dimension {x.shape[0]}, expected {dim}",
                          expected=dim, actual=x.shape[0])
    return x


def operator_norm(A):
    """Spectral (largest singular value) norm"""
    return float(np.linalg.norm(A, 2))


def hermitian_residual(A):
    """max |A[i][j] - conj(A[j][i])|"""
    return float(np.max(np.abs(A - A.conj().T)))


def is_hermitian(A, tol=DEFAULT_TOLERANCES):
    """
    Check hermiticity within herm_tol, scaled by max(1, ||A||)

    Returns:
        Tuple (is_hermitian, residual)
    """
    residual = hermitian_residual(A)
    return residual <= tol.herm_tol * max(1.0, operator_norm(A)), residual


def canonical_order(values):
    """Ascending by real part, ties broken by imaginary part"""
    # Rounding keeps conjugate pairs together despite last-bit noise in Re
    return np.lexsort((values.imag, np.round(values.real, 10)))


def fix_phase(vectors):
    """
    Normalize columns to unit length and make the largest-magnitude
    component of each column real positive
    """
    out = vectors / np.linalg.norm(vectors, axis=0)
    idx = np.argmax(np.abs(out), axis=0)
    pivots = out[idx, np.arange(out.shape[1])]
    return out * (np.abs(pivots) / pivots)


@dataclass(frozen=True, eq=False)
class EigenDecomposition:
    """Right eigenpairs in canonical order with per-pair residuals"""
    eigenvalues: np.ndarray
    right_vectors: np.ndarray
    residuals: np.ndarray

    @property
    def dim(self):
        return self.eigenvalues.shape[0]

    @property
    def vectors(self):
        """Eigenvectors as a list of 1-D arrays"""
        return [self.right_vectors[:, k] for k in range(self.dim)]

    @property
    def min_gap(self):
        if self.dim < 2:
            return float("inf")
        diffs = np.abs(self.eigenvalues[:, None] - self.eigenvalues[None, :])
        diffs[np.diag_indices(self.dim)] = np.inf
        return float(np.min(diffs))


def _residuals(A, values, vectors):
    return np.linalg.norm(A @ vectors - vectors * values, axis=0)


def eigen_general(A, tol=DEFAULT_TOLERANCES):
    """
    Right eigenpairs of a general complex matrix

    Args:
        A: Square matrix
        tol: Tolerance table (eig_tol, gap_tol, max_dim)

    Returns:
        EigenDecomposition with unit, phase-fixed eigenvectors

    Raises:
        NonConvergence: LAPACK failure or residuals above eig_tol * ||A||
        DegenerateSpectrum: min eigenvalue gap at or below gap_tol * ||A||
    """
    A = as_matrix(A, max_dim=tol.max_dim)
    try:
        values, vectors = scipy.linalg.eig(A)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise NonConvergence(f"Eigenvalue iteration failed: {e}")

    order = canonical_order(values)
    values = values[order]
    vectors = fix_phase(vectors[:, order])

    norm = operator_norm(A)
    residuals = _residuals(A, values, vectors)
    if np.any(residuals > tol.eig_tol * norm + np.finfo(float).tiny):
        raise NonConvergence(
            f"Eigenpair residual {residuals.max():.3e} exceeds {tol.eig_tol:.1e}*||A||"
        )

    decomposition = EigenDecomposition(frozen(values), frozen(vectors), frozen(residuals))
    gap = decomposition.min_gap
    if gap <= tol.gap_tol * norm:
        raise DegenerateSpectrum(
            f"Eigenvalues are not distinct: min gap {gap:.3e} <= {tol.gap_tol:.1e}*||A||",
            min_gap=gap
        )
    return decomposition


def eigen_hermitian(A, tol=DEFAULT_TOLERANCES):
    """
    Eigendecomposition of a Hermitian matrix (real ascending eigenvalues,
    orthonormal eigenvectors). Degenerate spectra are allowed here.

    Raises:
        NotHermitian: A deviates from A-dagger beyond herm_tol
    """
    A = as_matrix(A, max_dim=tol.max_dim)
    ok, residual = is_hermitian(A, tol)
    if not ok:
        raise NotHermitian(f"Matrix is not Hermitian (residual {residual:.3e})", residual=residual)

    A = 0.5 * (A + A.conj().T)
    try:
        values, vectors = scipy.linalg.eigh(A)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise NonConvergence(f"Hermitian eigensolver failed: {e}")

    idx = np.argmax(np.abs(vectors), axis=0)
    pivots = vectors[idx, np.arange(vectors.shape[1])]
    vectors = vectors * (np.abs(pivots) / pivots)
    values = values.astype(np.complex128)
    residuals = _residuals(A, values, vectors)
    return EigenDecomposition(frozen(values), frozen(vectors), frozen(residuals))


def sqrt_psd(A, tol=DEFAULT_TOLERANCES):
    """
    Positive square root of a Hermitian positive definite matrix

    Raises:
        NotPositive: some eigenvalue at or below psd_floor * ||A||
    """
    A = as_matrix(A, max_dim=tol.max_dim)
    decomposition = eigen_hermitian(A, tol)
    values = decomposition.eigenvalues.real
    floor = tol.psd_floor * operator_norm(A)
    if np.any(values <= floor):
        raise NotPositive(f"Matrix is not positive definite (min eigenvalue {values.min():.3e})")

    V = decomposition.right_vectors
    root = (V * np.sqrt(values)) @ V.conj().T
    return 0.5 * (root + root.conj().T)


def inverse_sqrt_psd(A, tol=DEFAULT_TOLERANCES):
    """A**(-1/2) for a Hermitian positive definite matrix"""
    A = as_matrix(A, max_dim=tol.max_dim)
    decomposition = eigen_hermitian(A, tol)
    values = decomposition.eigenvalues.real
    if np.any(values <= tol.psd_floor * operator_norm(A)):
        raise NotPositive(f"Matrix is not positive definite (min eigenvalue {values.min():.3e})")
    V = decomposition.right_vectors
    root = (V / np.sqrt(values)) @ V.conj().T
    return 0.5 * (root + root.conj().T)


def condition_psd(A, tol=DEFAULT_TOLERANCES):
    """Condition number of a Hermitian positive definite matrix"""
    values = eigen_hermitian(A, tol).eigenvalues.real
    return float(values.max() / values.min())


def expm_series(A):
    """
    e**A by scaling and squaring with a truncated Taylor series.

    Independent of any eigendecomposition; used to validate the spectral
    propagators.

    Raises:
        Overflow: ||A||_1 too large for a finite result
    """
    A = as_matrix(A)
    n = A.shape[0]
    norm = float(np.linalg.norm(A, 1))
    if norm > MAX_SERIES_NORM:
        raise Overflow(f"||A||_1 = {norm:.3e} is too large for the series exponential")

    squarings = 0
    if norm > SERIES_RADIUS:
        squarings = int(np.ceil(np.log2(norm / SERIES_RADIUS)))
    scaled = A / 2.0 ** squarings

    identity = np.eye(n, dtype=np.complex128)
    result = identity
    # Horner form of I + X + X^2/2! + ...
    for k in range(TAYLOR_TERMS, 0, -1):
        result = identity + (scaled @ result) / k

    for _ in range(squarings):
        result = result @ result

    if not np.all(np.isfinite(result)):
        raise Overflow("Series exponential overflowed during squaring")
    return result
