"""Dense complex linear algebra for small Hermitian matrices.

Matrices are plain complex numpy arrays. This module validates the
properties the rest of the package relies on (Hermiticity, positivity,
unit trace) and provides the spectral operations everything else is
built from. Dimensions are capped at ``MAX_DIM``; nothing here is meant
for large or sparse problems.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .tolerances import (
    COMMUTE_TOL,
    HERMITIAN_TOL,
    MAX_DIM,
    PSD_TOL,
    TRACE_TOL,
)


def hermiticity_defect(m: np.ndarray) -> float:
    """Largest entrywise magnitude of M - M^dagger."""
    return float(np.abs(m - m.conj().T).max())


def require_hermitian(m, tol: float = HERMITIAN_TOL, name: str = "matrix") -> np.ndarray:
    """Coerce to a complex square array, rejecting non-Hermitian input.

    The error message quotes the worst asymmetry so callers can see how
    far off the input was.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"{name} must be square, got shape {m.shape}")
    if m.shape[0] < 1:
        raise ValueError(f"{name} must have dimension >= 1")
    defect = hermiticity_defect(m)
    if defect > tol:
        raise ValueError(
            f"{name} is not Hermitian: max asymmetry {defect:.3e} exceeds tolerance {tol:.1e}"
        )
    return m


def hermitize(m: np.ndarray) -> np.ndarray:
    """Hermitian part (M + M^dagger) / 2, used to scrub roundoff."""
    return (m + m.conj().T) / 2


@dataclass(frozen=True)
class Spectrum:
    """Full spectral decomposition of a Hermitian matrix.

    eigenvalues are sorted in descending order; eigenvectors holds the
    matching orthonormal eigenvectors as columns.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def hermitian_eig(m, tol: float = HERMITIAN_TOL) -> Spectrum:
    """Spectral decomposition of a Hermitian matrix, eigenvalues descending.

    Backed by LAPACK's Hermitian eigensolver; deterministic for identical
    input. Non-Hermitian input beyond ``tol`` is rejected.
    """
    m = require_hermitian(m, tol=tol)
    w, v = np.linalg.eigh(m)
    return Spectrum(eigenvalues=w[::-1].copy(), eigenvectors=v[:, ::-1].copy())


def trace_norm(m, tol: float = HERMITIAN_TOL) -> float:
    """Sum of absolute eigenvalues of a Hermitian matrix."""
    m = require_hermitian(m, tol=tol)
    return float(np.abs(np.linalg.eigvalsh(m)).sum())


def tensor(a, b, max_dim: int = MAX_DIM) -> np.ndarray:
    """Kronecker product, rejecting results larger than ``max_dim``."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    out_dim = a.shape[0] * b.shape[0]
    if out_dim > max_dim:
        raise ValueError(f"tensor product dimension {out_dim} exceeds maximum {max_dim}")
    return np.kron(a, b)


def is_positive_semidefinite(m, tol: float = PSD_TOL) -> bool:
    """True iff the minimum eigenvalue is >= -tol."""
    m = require_hermitian(m)
    return bool(np.linalg.eigvalsh(m)[0] >= -tol)


def is_density_operator(m, tol: float = PSD_TOL) -> bool:
    try:
        require_density(m, tol=tol)
    except ValueError:
        return False
    return True


def require_density(m, tol: float = PSD_TOL, name: str = "state") -> np.ndarray:
    """Validate a density operator: Hermitian, PSD, unit trace."""
    m = require_hermitian(m, name=name)
    min_eig = float(np.linalg.eigvalsh(m)[0])
    if min_eig < -tol:
        raise ValueError(f"{name} is not positive semidefinite: min eigenvalue {min_eig:.3e}")
    tr = float(np.trace(m).real)
    if abs(tr - 1.0) > TRACE_TOL:
        raise ValueError(f"{name} must have unit trace, got {tr!r}")
    return m


def von_neumann_entropy(rho) -> float:
    """Entropy of a density operator in bits, with 0 log 0 taken as 0."""
    rho = require_density(rho)
    w = np.linalg.eigvalsh(rho)
    w = w[w > 0.0]
    return float(-(w * np.log2(w)).sum())


def projector(vec) -> np.ndarray:
    """Rank-one projector onto a (normalized copy of a) state vector."""
    v = np.asarray(vec, dtype=complex).ravel()
    norm = np.linalg.norm(v)
    if norm == 0:
        raise ValueError("cannot project onto the zero vector")
    v = v / norm
    return np.outer(v, v.conj())


def all_commute(mats, tol: float = COMMUTE_TOL) -> bool:
    """True iff every pair of matrices commutes within ``tol`` (max entry)."""
    mats = [np.asarray(m, dtype=complex) for m in mats]
    for i, a in enumerate(mats):
        for b in mats[i + 1:]:
            if np.abs(a @ b - b @ a).max() > tol:
                return False
    return True


def common_eigenbasis(mats, gap_tol: float = COMMUTE_TOL) -> np.ndarray:
    """Orthonormal basis simultaneously diagonalizing commuting Hermitian matrices.

    Refines an eigenbasis one matrix at a time: within each still-degenerate
    block, diagonalize the next matrix and split the block wherever adjacent
    eigenvalues differ by more than ``gap_tol``. Merging near-equal
    eigenvalues is safe for a commuting family; splitting spuriously is not,
    so the gap tolerance errs on the side of keeping blocks together.

    Returns the basis as columns of a unitary matrix.
    """
    mats = [require_hermitian(m) for m in mats]
    dim = mats[0].shape[0]
    v = np.eye(dim, dtype=complex)
    blocks = [list(range(dim))]
    for m in mats:
        refined: list[list[int]] = []
        for blk in blocks:
            if len(blk) == 1:
                refined.append(blk)
                continue
            sub = v[:, blk]
            b = hermitize(sub.conj().T @ m @ sub)
            w, u = np.linalg.eigh(b)
            v[:, blk] = sub @ u
            start = 0
            for i in range(1, len(blk)):
                if w[i] - w[i - 1] > gap_tol:
                    refined.append(blk[start:i])
                    start = i
            refined.append(blk[start:])
        blocks = refined
    return v
