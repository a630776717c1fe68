"""Dense complex linear algebra at the fixed dimensions 2, 4 and 16.

Everything downstream (states, channels, speed-limit integrands) consumes
these kernels.  All functions are pure and operate on plain ``numpy``
arrays of complex dtype.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadDim, NonHermitian, NotPSD

HERMITICITY_TOL = 1e-12
PSD_FLOOR = -1e-10

I2 = np.eye(2, dtype=complex)
I4 = np.eye(4, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


@dataclass(frozen=True)
class HermitianEigen:
    """Eigendecomposition of a Hermitian matrix.

    ``eigenvalues`` are real and sorted in descending order;
    ``eigenvectors`` holds the matching orthonormal eigenvectors as columns,
    each scaled so its largest-magnitude component is real and positive.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def hermitize(a: np.ndarray) -> np.ndarray:
    """Return the Hermitian part (A + A†)/2."""
    return (a + a.conj().T) / 2


def hermiticity_defect(a: np.ndarray) -> float:
    """Largest entrywise deviation from Hermiticity, max_ij |A_ij - conj(A_ji)|."""
    return float(np.max(np.abs(a - a.conj().T)))


def _fix_phases(vectors: np.ndarray) -> np.ndarray:
    """Scale each column so its largest-magnitude component is real positive."""
    fixed = vectors.copy()
    for k in range(fixed.shape[1]):
        col = fixed[:, k]
        idx = int(np.argmax(np.abs(col)))
        pivot = col[idx]
        if abs(pivot) > 0:
            fixed[:, k] = col * (abs(pivot) / pivot)
    return fixed


def hermitian_eig(a: np.ndarray, tol: float = HERMITICITY_TOL) -> HermitianEigen:
    """Eigendecomposition of a Hermitian matrix with deterministic conventions.

    Raises
    ------
    NonHermitian
        If ``max_ij |A_ij - conj(A_ji)|`` exceeds ``tol``.
    """
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise BadDim(f"expected a square matrix, got shape {a.shape}")
    defect = hermiticity_defect(a)
    if defect > tol:
        raise NonHermitian(f"Hermiticity defect {defect:.3e} exceeds {tol:.1e}")
    vals, vecs = np.linalg.eigh(hermitize(a))
    order = np.arange(vals.size)[::-1]  # eigh returns ascending
    return HermitianEigen(vals[order].copy(), _fix_phases(vecs[:, order]))


def sqrt_psd(a: np.ndarray, tol: float = HERMITICITY_TOL) -> np.ndarray:
    """Hermitian PSD square root of a PSD matrix.

    Eigenvalues in [PSD_FLOOR, 0) are treated as integration noise and
    clamped to zero; anything below the floor raises :class:`NotPSD`.
    """
    eig = hermitian_eig(a, tol=tol)
    if eig.eigenvalues.min() < PSD_FLOOR:
        raise NotPSD(
            f"minimum eigenvalue {eig.eigenvalues.min():.3e} below {PSD_FLOOR:.1e}"
        )
    roots = np.sqrt(np.clip(eig.eigenvalues, 0.0, None))
    v = eig.eigenvectors
    return hermitize((v * roots) @ v.conj().T)


def fidelity(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Uhlmann fidelity F(ρ,σ) = [Tr sqrt(sqrt(σ) ρ sqrt(σ))]², clamped to [0, 1].

    Evaluated as the squared nuclear norm of sqrt(ρ) sqrt(σ), which is the
    same quantity but keeps small singular values at full precision and is
    symmetric in its arguments by construction.
    """
    root_r = sqrt_psd(np.asarray(rho, dtype=complex))
    root_s = sqrt_psd(np.asarray(sigma, dtype=complex))
    total = float(np.linalg.svd(root_r @ root_s, compute_uv=False).sum())
    return min(1.0, max(0.0, total * total))


def _singular_values(a: np.ndarray) -> np.ndarray:
    return np.linalg.svd(np.asarray(a, dtype=complex), compute_uv=False)


def op_norm(a: np.ndarray) -> float:
    """Operator norm: the largest singular value."""
    return float(_singular_values(a).max())


def trace_norm(a: np.ndarray) -> float:
    """Trace norm: the sum of singular values."""
    return float(_singular_values(a).sum())


def hs_norm(a: np.ndarray) -> float:
    """Hilbert-Schmidt norm: the root sum of squared singular values."""
    return float(np.linalg.norm(np.asarray(a, dtype=complex)))


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Tensor product of two operators."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def partial_trace(x: np.ndarray, keep: str = "system") -> np.ndarray:
    """Trace a 16x16 operator on system ⊗ ancilla (4 ⊗ 4) down to one factor.

    ``keep`` selects which tensor factor survives: ``"system"`` (the first)
    or ``"ancilla"`` (the second).  The total trace is preserved.
    """
    x = np.asarray(x, dtype=complex)
    if x.shape != (16, 16):
        raise BadDim(f"expected a 16x16 matrix, got shape {x.shape}")
    blocks = x.reshape(4, 4, 4, 4)  # (sys row, anc row, sys col, anc col)
    if keep == "system":
        return np.einsum("ikjk->ij", blocks)
    if keep == "ancilla":
        return np.einsum("kikj->ij", blocks)
    raise BadDim(f"keep must be 'system' or 'ancilla', got {keep!r}")
