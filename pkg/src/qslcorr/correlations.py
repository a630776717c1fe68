"""Quantum-correlation measures and the change amounts fed to the speed limit.

Concurrence follows the Wootters spin-flip construction; the Bures measures
of entanglement and discord are the distance of a state from its closest
separable, respectively classical, state expressed through the maximal
fidelity:

    E_B = 1 - sqrt(F_P),   F_P(C) = (1 + sqrt(1 - C^2)) / 2,
    D_B = 1 - sqrt((1 + b_max) / 2)   (Bell-diagonal states only).

Both measures live in [0, 1 - 1/sqrt(2)] and coincide along Bell-diagonal
dephasing trajectories.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import DomainError
from .states import BellDiagonalCoeffs, validate_density_matrix

MAX_BURES_MEASURE = 1.0 - 1.0 / np.sqrt(2.0)
_AMOUNT_SLACK = 1e-9
_SQRT_ARG_FLOOR = -1e-12

_SPIN_FLIP = linalg.kron(linalg.SIGMA_Y, linalg.SIGMA_Y)


@dataclass(frozen=True)
class CorrelationAmount:
    """Change of a correlation measure between two ends of an evolution.

    ``direction`` is ``"decay"`` when the initial value is at least the
    final one and ``"creation"`` otherwise; ``change`` is the absolute
    difference.
    """

    initial: float
    final: float
    change: float
    direction: str


_EIG_TRUNCATION = 32 * np.finfo(float).eps
# Concurrences this close to 1 are indistinguishable from exact maximal
# entanglement at solver precision; snapping keeps the sqrt-singular Bures
# formulas exact at the maximally entangled point.
UNIT_SNAP = 4e-15


def snap_unit(c):
    """Clamp to [0, 1], mapping values within UNIT_SNAP of 1 to exactly 1."""
    return np.where(np.asarray(c) > 1.0 - UNIT_SNAP, 1.0, np.clip(c, 0.0, 1.0))


def _truncated_sqrt(rho: np.ndarray) -> np.ndarray:
    """Matrix square root with eigenvalues below 32 eps ||ρ|| zeroed.

    Eigenvalues at the noise floor of the solver would otherwise reappear
    as sqrt-amplified phantom singular values of the spin-flip matrix.
    """
    vals, vecs = np.linalg.eigh(rho)
    vals = np.where(vals < _EIG_TRUNCATION * vals.max(), 0.0, vals)
    return (vecs * np.sqrt(vals)) @ vecs.conj().T


def concurrence(rho: np.ndarray) -> float:
    """Wootters concurrence C = max(0, k1 - k2 - k3 - k4) of a two-qubit state.

    The k_i (descending) are computed as the singular values of
    sqrt(ρ) (σ_y⊗σ_y) sqrt(ρ)^T, whose Gram matrix is the usual spin-flip
    sandwich sqrt(ρ) ρ~ sqrt(ρ).  Working with the un-squared factor keeps
    small k_i at full precision, which matters for states close to maximal
    entanglement.
    """
    rho = validate_density_matrix(rho)
    root = _truncated_sqrt(linalg.hermitize(rho))
    flipped = root @ _SPIN_FLIP @ root.T
    k = np.linalg.svd(flipped, compute_uv=False)
    c = 2.0 * k[0] - k.sum()
    return float(snap_unit(c))


def concurrence_product_eigs(rho: np.ndarray) -> float:
    """Concurrence from the eigenvalues of ρ (σ_y⊗σ_y) ρ* (σ_y⊗σ_y).

    Fast textbook route; its small k_i carry sqrt-of-roundoff noise, so it
    serves as a cross-check of :func:`concurrence` rather than the primary
    path.
    """
    rho = validate_density_matrix(rho)
    rho_tilde = _SPIN_FLIP @ rho.conj() @ _SPIN_FLIP
    evals = np.linalg.eigvals(rho @ rho_tilde)
    roots = np.sort(np.sqrt(np.clip(evals.real, 0.0, None)))[::-1]
    c = roots[0] - roots[1] - roots[2] - roots[3]
    return min(1.0, max(0.0, float(c)))


def concurrence_sandwich(rho: np.ndarray) -> float:
    """Concurrence via the PSD sandwich sqrt(sqrt(ρ) ρ~ sqrt(ρ)).

    Second independent cross-check of :func:`concurrence`.
    """
    rho = validate_density_matrix(rho)
    rho_tilde = _SPIN_FLIP @ rho.conj() @ _SPIN_FLIP
    root = linalg.sqrt_psd(rho)
    inner = linalg.hermitize(root @ rho_tilde @ root)
    vals = np.sqrt(np.clip(np.linalg.eigvalsh(inner), 0.0, None))
    c = 2.0 * vals.max() - vals.sum()
    return min(1.0, max(0.0, float(c)))


def _check_unit_interval(value, name: str) -> np.ndarray:
    arr = np.asarray(value, dtype=float)
    if np.any(arr < -1e-12) or np.any(arr > 1.0 + 1e-12):
        raise DomainError(f"{name} outside [0, 1]")
    return np.clip(arr, 0.0, 1.0)


def separable_fidelity_from_concurrence(c):
    """Maximal fidelity with a separable state, F_P = (1 + sqrt(1 - C^2))/2.

    Accepts a scalar concurrence or an array of them.
    """
    c = _check_unit_interval(c, "concurrence")
    out = 0.5 * (1.0 + np.sqrt(np.clip(1.0 - c * c, 0.0, None)))
    return float(out) if out.ndim == 0 else out


def bures_entanglement(c):
    """Bures measure of entanglement as a function of concurrence.

    Monotone increasing from 0 at C=0 to 1 - 1/sqrt(2) at C=1.  Accepts a
    scalar concurrence or an array of them.
    """
    out = 1.0 - np.sqrt(separable_fidelity_from_concurrence(c))
    return float(out) if np.ndim(out) == 0 else out


def b_max(coeffs: BellDiagonalCoeffs) -> float:
    """Largest of the three cyclic closest-classical-state overlaps.

    For coefficients of a physical Bell-diagonal state every square-root
    argument is a product of Bell populations and hence nonnegative; values
    in [-1e-12, 0) are clamped to zero and anything lower raises
    :class:`DomainError`.
    """
    c1, c2, c3 = coeffs

    def branch(a: float, b: float, c: float) -> float:
        args = ((1.0 + a) ** 2 - (b - c) ** 2, (1.0 - a) ** 2 - (b + c) ** 2)
        total = 0.0
        for arg in args:
            if arg < _SQRT_ARG_FLOOR:
                raise DomainError(f"square-root argument {arg:.3e} for ({a}, {b}, {c})")
            total += np.sqrt(max(0.0, arg))
        return total

    return 0.5 * max(branch(c1, c2, c3), branch(c2, c1, c3), branch(c3, c1, c2))


def bures_discord_bell_diagonal(coeffs: BellDiagonalCoeffs) -> float:
    """Bures measure of discord for a Bell-diagonal state.

    D_B = 1 - sqrt((1 + b_max)/2), which is 1 - 1/sqrt(2) for a Bell state
    (b_max = 0) and 0 for the maximally mixed state (b_max = 1).
    """
    b = b_max(coeffs)
    if not -1e-12 <= b <= 1.0 + 1e-9:
        raise DomainError(f"b_max={b} outside [0, 1]")
    return 1.0 - np.sqrt((1.0 + min(1.0, max(0.0, b))) / 2.0)


def correlation_change(initial: float, final: float) -> CorrelationAmount:
    """Absolute change of a Bures measure and its decay/creation direction."""
    for name, value in (("initial", initial), ("final", final)):
        if not -_AMOUNT_SLACK <= value <= MAX_BURES_MEASURE + _AMOUNT_SLACK:
            raise DomainError(
                f"{name} measure {value} outside [0, {MAX_BURES_MEASURE:.6f}]"
            )
    initial = float(initial)
    final = float(final)
    direction = "decay" if initial >= final else "creation"
    return CorrelationAmount(initial, final, abs(initial - final), direction)
