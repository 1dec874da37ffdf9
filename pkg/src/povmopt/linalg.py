"""Dense complex spectral calculus.

Hermitian eigendecomposition with a deterministic eigenvector phase
convention, positive parts and spectral projectors, Schatten norms, and
semidefinite-order checks. Everything is a pure function over dense
complex128 numpy arrays; there is no sparse path.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, NumericalError, PreconditionError

# Max-entry tolerance for accepting an input matrix as Hermitian.
HERMITIAN_TOL = 1e-10

# Per-dimension reconstruction/orthonormality tolerance of an eigendecomposition.
SPECTRAL_TOL = 1e-10

# Relative cutoff separating strictly positive eigenvalues from the zero cluster.
EIG_ZERO_FACTOR = 1e-10


def as_complex_matrix(mat) -> np.ndarray:
    """Coerce input to a square complex128 array, rejecting NaN/Inf entries."""
    arr = np.asarray(mat, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix has NaN or Inf entries")
    return arr


def hermiticity_defect(mat) -> float:
    """Largest entrywise deviation |A - A^dag|."""
    arr = as_complex_matrix(mat)
    return float(np.max(np.abs(arr - arr.conj().T)))


def real_part(mat) -> np.ndarray:
    """Hermitian part (A + A^dag)/2.

    Exactly Hermitian entry by entry: conjugation and halving round
    identically on both triangles, and the diagonal imaginary parts
    cancel without rounding.
    """
    arr = as_complex_matrix(mat)
    return (arr + arr.conj().T) / 2.0


def symmetrize(mat) -> np.ndarray:
    """Alias of :func:`real_part`, for call sites that only fix round-off."""
    return real_part(mat)


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Eigensystem of a Hermitian matrix.

    ``eigenvalues`` are real and sorted descending; ``eigenvectors[:, i]``
    is the orthonormal eigenvector for ``eigenvalues[i]``, with the
    largest-magnitude component of each column made real positive.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return int(self.eigenvalues.shape[0])

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def _fix_phases(vectors: np.ndarray) -> np.ndarray:
    # Deterministic gauge: leading component (largest magnitude, first on
    # ties) of every column made real positive.
    lead_rows = np.argmax(np.abs(vectors), axis=0)
    lead = vectors[lead_rows, np.arange(vectors.shape[1])]
    phases = lead / np.abs(lead)
    return vectors * phases.conj()[np.newaxis, :]


def eigh(mat, hermitian_tol: float = HERMITIAN_TOL) -> SpectralDecomposition:
    """Eigendecomposition of a Hermitian matrix.

    The input must be Hermitian within ``hermitian_tol`` (max-entry); it is
    symmetrized exactly before the solve so round-off asymmetry never
    propagates downstream.
    """
    arr = as_complex_matrix(mat)
    defect = float(np.max(np.abs(arr - arr.conj().T)))
    if defect > hermitian_tol:
        raise PreconditionError(
            f"matrix is not Hermitian: max-entry deviation {defect:.3e} "
            f"exceeds tolerance {hermitian_tol:.3e}"
        )
    herm = (arr + arr.conj().T) / 2.0
    try:
        vals, vecs = np.linalg.eigh(herm)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"Hermitian eigensolver did not converge: {exc}") from exc
    vals = vals[::-1]
    vecs = _fix_phases(np.ascontiguousarray(vecs[:, ::-1]))
    return SpectralDecomposition(eigenvalues=vals, eigenvectors=vecs)


def positive_cutoff(eigenvalues: np.ndarray) -> float:
    """Threshold above which an eigenvalue counts as strictly positive.

    Scale-invariant: ``EIG_ZERO_FACTOR`` times the spectral radius, so a
    degenerate zero eigenvalue perturbed by round-off stays on the zero
    side.
    """
    if eigenvalues.size == 0:
        return 0.0
    return EIG_ZERO_FACTOR * float(np.max(np.abs(eigenvalues)))


def positive_part(mat, hermitian_tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Spectral truncation of a Hermitian matrix to its positive eigenvalues."""
    dec = eigh(mat, hermitian_tol)
    keep = dec.eigenvalues > positive_cutoff(dec.eigenvalues)
    vecs = dec.eigenvectors[:, keep]
    out = (vecs * dec.eigenvalues[keep]) @ vecs.conj().T
    return (out + out.conj().T) / 2.0


def positive_projection(mat, hermitian_tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Orthogonal projector onto the strictly positive eigenspace."""
    dec = eigh(mat, hermitian_tol)
    keep = dec.eigenvalues > positive_cutoff(dec.eigenvalues)
    vecs = dec.eigenvectors[:, keep]
    out = vecs @ vecs.conj().T
    return (out + out.conj().T) / 2.0


def trace_norm(mat) -> float:
    """Schatten-1 norm: the sum of singular values."""
    arr = as_complex_matrix(mat)
    try:
        singular = np.linalg.svd(arr, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"SVD did not converge: {exc}") from exc
    return float(np.sum(singular))


def operator_norm(mat) -> float:
    """Schatten-inf norm: the largest singular value."""
    arr = as_complex_matrix(mat)
    try:
        singular = np.linalg.svd(arr, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"SVD did not converge: {exc}") from exc
    return float(singular[0]) if singular.size else 0.0


def is_psd(mat, tol: float = 0.0) -> bool:
    """True iff the smallest eigenvalue of the Hermitian part is >= -tol."""
    arr = as_complex_matrix(mat)
    herm = (arr + arr.conj().T) / 2.0
    try:
        vals = np.linalg.eigvalsh(herm)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"Hermitian eigensolver did not converge: {exc}") from exc
    return bool(vals[0] >= -tol)
