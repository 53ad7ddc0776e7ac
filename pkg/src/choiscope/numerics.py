"""Dense complex matrix substrate.

Hermitian eigendecomposition, SVD rank, PSD tests, pseudo-inverse and the
Hilbert-Schmidt inner product.  Everything downstream is built on these
few primitives, all of them thin, validated wrappers around LAPACK via
numpy.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonFinite, NotHermitian, NotPsd, ShapeMismatch


@dataclass(frozen=True)
class Tolerance:
    """Absolute/relative tolerance pair used throughout the library."""

    atol: float = 1e-9
    rtol: float = 1e-9

    def __post_init__(self):
        if not (np.isfinite(self.atol) and np.isfinite(self.rtol)):
            raise ValueError("tolerances must be finite")
        if self.atol < 0 or self.rtol < 0:
            raise ValueError("tolerances must be non-negative")


DEFAULT_TOL = Tolerance()


def as_matrix(M) -> np.ndarray:
    """Coerce to a 2-d complex ndarray, rejecting non-finite input."""
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2:
        raise ShapeMismatch(f"expected a matrix, got ndim={M.ndim}")
    if not np.all(np.isfinite(M.real)) or not np.all(np.isfinite(M.imag)):
        raise NonFinite("matrix contains non-finite entries")
    return M


def check_hermitian(M: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Return ``M`` if Hermitian within ``tol.atol`` (max-norm), else raise."""
    M = as_matrix(M)
    if M.shape[0] != M.shape[1]:
        raise ShapeMismatch(f"matrix is {M.shape}, not square")
    dev = np.max(np.abs(M - M.conj().T)) if M.size else 0.0
    if dev > tol.atol:
        raise NotHermitian(f"max |M - M^dag| = {dev:.3e} > atol = {tol.atol:.3e}")
    return M


def eig_hermitian(M, tol: Tolerance = DEFAULT_TOL):
    """Eigendecomposition of a Hermitian matrix.

    Returns ``(w, V)`` with eigenvalues ``w`` real and ascending and the
    columns of ``V`` the matching orthonormal eigenvectors.
    """
    M = check_hermitian(M, tol)
    w, V = np.linalg.eigh((M + M.conj().T) / 2.0)
    return w, V


def is_psd(M, tol: Tolerance = DEFAULT_TOL) -> bool:
    """True iff the Hermitian matrix ``M`` has min eigenvalue >= -atol."""
    w, _ = eig_hermitian(M, tol)
    return bool(w[0] >= -tol.atol)


def min_eigenvalue(M, tol: Tolerance = DEFAULT_TOL) -> float:
    w, _ = eig_hermitian(M, tol)
    return float(w[0])


def svd_rank(M, tol: Tolerance = DEFAULT_TOL) -> int:
    """Number of singular values above ``atol + rtol * sigma_max``."""
    M = as_matrix(M)
    s = np.linalg.svd(M, compute_uv=False)
    if s.size == 0:
        return 0
    return int(np.sum(s > tol.atol + tol.rtol * s[0]))


def pseudo_inverse(M, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Moore-Penrose inverse of a Hermitian PSD matrix.

    Eigenvalues above ``atol`` are inverted, the rest are zeroed.
    """
    w, V = eig_hermitian(M, tol)
    if w[0] < -tol.atol:
        raise NotPsd(f"min eigenvalue {w[0]:.3e} < -atol")
    inv = np.where(w > tol.atol, 1.0 / np.where(w > tol.atol, w, 1.0), 0.0)
    return (V * inv) @ V.conj().T


def hs_inner(A, B) -> complex:
    """Hilbert-Schmidt inner product tr(A^dag B)."""
    A = as_matrix(A)
    B = as_matrix(B)
    if A.shape != B.shape:
        raise ShapeMismatch(f"shapes differ: {A.shape} vs {B.shape}")
    return complex(np.sum(A.conj() * B))


def frobenius_norm(A) -> float:
    return float(np.linalg.norm(np.asarray(A, dtype=complex)))
