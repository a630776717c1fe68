"""Two-qubit state constructors, validation and spectral purification.

Basis conventions
-----------------
The computational basis is ordered |00>, |01>, |10>, |11> with the ground
state of each atom mapped to |0> and the excited state to |1>, so the
one-excitation product state with the second qubit excited is |01>.

The maximally entangled reference state is fixed as

    |psi+> = (|01> + |10>) / sqrt(2),

the convention under which the diagonal mixture (|01><01| + |10><10|)/2 is
its closest separable state with fidelity 1/2.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from . import linalg
from .errors import BadDim, BadMixingParameter, DomainError, NotBellDiagonal

DENSITY_HERMITICITY_TOL = 1e-10
DENSITY_TRACE_TOL = 1e-10
DENSITY_EIG_FLOOR = -1e-8
BELL_DIAGONAL_TOL = 1e-8


class BellDiagonalCoeffs(NamedTuple):
    """Correlation coefficients c_i = Tr(ρ σ_i ⊗ σ_i) of a Bell-diagonal state."""

    c1: float
    c2: float
    c3: float


def validate_density_matrix(rho: np.ndarray) -> np.ndarray:
    """Check the density-matrix invariants and return the array as complex.

    Requires a 4x4 matrix, Hermitian within 1e-10, unit trace within 1e-10
    and minimum eigenvalue >= -1e-8.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise BadDim(f"expected a 4x4 density matrix, got shape {rho.shape}")
    defect = linalg.hermiticity_defect(rho)
    if defect > DENSITY_HERMITICITY_TOL:
        raise DomainError(f"density matrix Hermiticity defect {defect:.3e}")
    trace_err = abs(np.trace(rho) - 1.0)
    if trace_err > DENSITY_TRACE_TOL:
        raise DomainError(f"density matrix trace off by {trace_err:.3e}")
    min_eig = float(np.linalg.eigvalsh(linalg.hermitize(rho)).min())
    if min_eig < DENSITY_EIG_FLOOR:
        raise DomainError(f"density matrix minimum eigenvalue {min_eig:.3e}")
    return rho


def ket(amplitudes) -> np.ndarray:
    """Normalized state vector from a sequence of amplitudes."""
    v = np.asarray(amplitudes, dtype=complex)
    return v / np.linalg.norm(v)


def projector(vector: np.ndarray) -> np.ndarray:
    """Rank-one projector |v><v|."""
    v = np.asarray(vector, dtype=complex)
    return np.outer(v, v.conj())


def bell_psi_plus() -> np.ndarray:
    """Density matrix of |psi+> = (|01> + |10>)/sqrt(2).

    Built entrywise so every element is exactly representable; measures of
    the maximally entangled reference state then evaluate without roundoff.
    """
    rho = np.zeros((4, 4), dtype=complex)
    rho[1:3, 1:3] = 0.5
    return rho


def state_g1e2() -> np.ndarray:
    """Projector onto the separable one-excitation state |01>."""
    return projector(ket([0, 1, 0, 0]))


def separable_oun_sigma() -> np.ndarray:
    """The diagonal mixture (|01><01| + |10><10|)/2.

    This is the fixed closest separable (and classical) state to |psi+> and
    to every state on its dephasing trajectory.
    """
    return np.diag(np.array([0, 0.5, 0.5, 0], dtype=complex))


def separable_collective_sigma(kind: str, x: float) -> np.ndarray:
    """Diagonal separable mixtures used by the collective-decay scenarios.

    ``kind="g1e2"`` gives x|00><00| + (1-x)|11><11|; ``kind="bell-psi-plus"``
    gives x|01><01| + (1-x)|11><11|.
    """
    if not 0.0 <= x <= 1.0:
        raise BadMixingParameter(f"mixing parameter x={x} outside [0, 1]")
    if kind == "g1e2":
        diag = [x, 0.0, 0.0, 1.0 - x]
    elif kind == "bell-psi-plus":
        diag = [0.0, x, 0.0, 1.0 - x]
    else:
        raise DomainError(f"unknown separable family kind {kind!r}")
    return np.diag(np.array(diag, dtype=complex))


def purify(rho: np.ndarray) -> np.ndarray:
    """Spectral purification of a two-qubit state into a 16-dim unit vector.

    Returns |psi> = sum_i sqrt(lambda_i) |e_i> ⊗ |a_i| with eigenpairs in
    descending order and the ancilla basis fixed to the computational basis;
    component 4*s + a carries system index s and ancilla index a.
    """
    rho = validate_density_matrix(rho)
    eig = linalg.hermitian_eig(rho, tol=DENSITY_HERMITICITY_TOL)
    roots = np.sqrt(np.clip(eig.eigenvalues, 0.0, None))
    vector = (eig.eigenvectors * roots).reshape(-1)
    return vector / np.linalg.norm(vector)


def bell_coeffs(rho: np.ndarray, tol: float = BELL_DIAGONAL_TOL) -> BellDiagonalCoeffs:
    """Correlation coefficients of a Bell-diagonal state.

    A Bell-diagonal two-qubit state has, in the computational basis, equal
    diagonal pairs (rho_00 = rho_33, rho_11 = rho_22), real antidiagonal
    entries and zeros elsewhere.  Any violation beyond ``tol`` raises
    :class:`NotBellDiagonal`.
    """
    rho = validate_density_matrix(rho)
    pattern_mask = np.zeros((4, 4), dtype=bool)
    pattern_mask[np.arange(4), np.arange(4)] = True
    pattern_mask[np.arange(4), 3 - np.arange(4)] = True
    worst = float(np.max(np.abs(rho[~pattern_mask])))
    worst = max(worst, abs(rho[0, 0] - rho[3, 3]), abs(rho[1, 1] - rho[2, 2]))
    worst = max(worst, abs(rho[0, 3].imag), abs(rho[1, 2].imag))
    if worst > tol:
        raise NotBellDiagonal(f"off-pattern magnitude {worst:.3e} exceeds {tol:.1e}")
    paulis = (linalg.SIGMA_X, linalg.SIGMA_Y, linalg.SIGMA_Z)
    c = [float(np.trace(rho @ linalg.kron(s, s)).real) for s in paulis]
    return BellDiagonalCoeffs(*c)


def bell_diagonal_state(coeffs: BellDiagonalCoeffs) -> np.ndarray:
    """Reconstruct (I + sum_i c_i σ_i ⊗ σ_i)/4 from its coefficients."""
    rho = np.eye(4, dtype=complex)
    for c, s in zip(coeffs, (linalg.SIGMA_X, linalg.SIGMA_Y, linalg.SIGMA_Z)):
        rho = rho + c * linalg.kron(s, s)
    return rho / 4.0
