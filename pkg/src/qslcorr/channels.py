"""Decoherence channels: local dephasing driven by Ornstein-Uhlenbeck noise
and the collective decay of two two-level atoms in a common vacuum.

Both channels are exposed as a :class:`GeneratorSpec`, a time-dependent
superoperator L_t with dρ/dt = L_t ρ.  The generator can be applied to 4x4
system operators or, extended trivially on a 4-dimensional ancilla, to
16x16 operators on the purification space; both entry points accept stacked
inputs for batched evaluation along a trajectory.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np

from . import linalg
from .errors import BadGeometry, BadParams

Rate = Union[float, Callable[[np.ndarray], np.ndarray]]

# Single-atom raising operator |e><g| with |g> -> |0|, |e> -> |1>.
_S_PLUS = np.array([[0, 0], [1, 0]], dtype=complex)
_S_MINUS = _S_PLUS.conj().T
# Energy operator (|e><e| - |g><g|)/2 per atom.
_S_Z = np.diag([-0.5, 0.5]).astype(complex)

Z1 = linalg.kron(linalg.SIGMA_Z, linalg.I2)
Z2 = linalg.kron(linalg.I2, linalg.SIGMA_Z)
S1_PLUS = linalg.kron(_S_PLUS, linalg.I2)
S2_PLUS = linalg.kron(linalg.I2, _S_PLUS)
S1_MINUS = linalg.kron(_S_MINUS, linalg.I2)
S2_MINUS = linalg.kron(linalg.I2, _S_MINUS)


@dataclass(frozen=True)
class OunParams:
    """Dephasing-channel parameters: coupling strength and inverse memory time."""

    kappa: float
    lam: float

    def __post_init__(self):
        if not (math.isfinite(self.kappa) and self.kappa > 0):
            raise BadParams(f"kappa must be positive and finite, got {self.kappa}")
        if not (math.isfinite(self.lam) and self.lam > 0):
            raise BadParams(f"lambda must be positive and finite, got {self.lam}")


@dataclass(frozen=True)
class CollectiveParams:
    """Collective-decay parameters.

    ``Lambda`` is the single-atom spontaneous emission rate, ``Lambda12``
    the collective damping, ``M12`` the dipole-dipole coupling and ``omega``
    the (optional) atomic frequency of the identical atoms.
    """

    Lambda: float
    Lambda12: float
    M12: float
    omega: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.Lambda) and self.Lambda > 0):
            raise BadParams(f"Lambda must be positive and finite, got {self.Lambda}")
        for name in ("Lambda12", "M12", "omega"):
            if not math.isfinite(getattr(self, name)):
                raise BadParams(f"{name} must be finite")
        if abs(self.Lambda12) > self.Lambda:
            raise BadParams(
                f"|Lambda12|={abs(self.Lambda12)} exceeds Lambda={self.Lambda}"
            )
        if self.omega < 0:
            raise BadParams(f"omega must be nonnegative, got {self.omega}")


class GeneratorSpec:
    """Time-dependent generator L_t assembled from a Hamiltonian part and
    dissipator terms rate(t) * (A X B - {B A, X}/2).

    Instances are immutable values capturing the channel parameters; both
    ``apply`` and ``apply_extended`` are pure functions of (t, X) and accept
    stacked inputs (t of shape (N,), X of shape (N, d, d)).
    """

    def __init__(
        self,
        hamiltonian: np.ndarray | None,
        terms: Sequence[tuple[Rate, np.ndarray, np.ndarray]],
    ):
        self.hamiltonian = None if hamiltonian is None else np.asarray(
            hamiltonian, dtype=complex
        )
        self.terms = tuple(
            (rate, np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))
            for rate, a, b in terms
        )
        self._ham_ext = (
            None if self.hamiltonian is None else linalg.kron(self.hamiltonian, linalg.I4)
        )
        self._terms_sys = tuple((rate, a, b, b @ a) for rate, a, b in self.terms)
        extended = [
            (rate, linalg.kron(a, linalg.I4), linalg.kron(b, linalg.I4))
            for rate, a, b in self.terms
        ]
        self._terms_ext = tuple((rate, a, b, b @ a) for rate, a, b in extended)

    def rate_at(self, rate: Rate, t) -> np.ndarray:
        value = rate(np.asarray(t, dtype=float)) if callable(rate) else rate
        return np.asarray(value, dtype=float)

    def _apply(self, t, x, hamiltonian, terms) -> np.ndarray:
        x = np.asarray(x, dtype=complex)
        out = np.zeros_like(x)
        if hamiltonian is not None:
            out += -1j * (hamiltonian @ x - x @ hamiltonian)
        for rate, a, b, ba in terms:
            r = self.rate_at(rate, t)
            if r.ndim:
                r = r.reshape(r.shape + (1, 1))
            out += r * (a @ x @ b - 0.5 * (ba @ x + x @ ba))
        return out

    def apply(self, t, rho) -> np.ndarray:
        """Derivative L_t ρ of a 4x4 system operator (or a stack of them)."""
        return self._apply(t, rho, self.hamiltonian, self._terms_sys)

    def apply_extended(self, t, x) -> np.ndarray:
        """(L_t ⊗ id) acting on 16x16 operators of system ⊗ ancilla."""
        return self._apply(t, x, self._ham_ext, self._terms_ext)


def oun_decoherence_function(params: OunParams, t) -> np.ndarray:
    """Dephasing function p_t = exp(-κ/2 (t + (e^{-λt} - 1)/λ)).

    Equals 1 at t = 0 and decreases strictly with t.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise BadParams("time must be nonnegative")
    exponent = t + np.expm1(-params.lam * t) / params.lam
    return np.exp(-0.5 * params.kappa * exponent)


def oun_rate(params: OunParams, t) -> np.ndarray:
    """Dephasing rate γ(t) = -ṗ_t/(2 p_t) = κ (1 - e^{-λt})/4.

    Starts at 0, increases monotonically and saturates at κ/4.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise BadParams("time must be nonnegative")
    return -params.kappa * np.expm1(-params.lam * t) / 4.0


def oun_generator(params: OunParams) -> GeneratorSpec:
    """Local dephasing acting identically on both qubits.

    L_t ρ = γ(t) [(σ_z⊗I) ρ (σ_z⊗I) - ρ] + γ(t) [(I⊗σ_z) ρ (I⊗σ_z) - ρ];
    diagonal states are fixed points and |psi+| coherence decays as p_t².
    """

    def gamma(t):
        return oun_rate(params, t)

    return GeneratorSpec(None, [(gamma, Z1, Z1), (gamma, Z2, Z2)])


def collective_generator(params: CollectiveParams) -> GeneratorSpec:
    """Two identical atoms coupled through a common vacuum field.

    dρ/dt = -i ω Σ_i [S_i^z, ρ] - i M12 [S_1^+ S_2^- + S_2^+ S_1^-, ρ]
            + Σ_{ij} Λ_ij (S_j^- ρ S_i^+ - {S_i^+ S_j^-, ρ}/2)

    with Λ_ii = Lambda and Λ_ij = Lambda12 for i ≠ j.  The map preserves
    trace and Hermiticity, and the ground state |00> is stationary.
    """
    plus = (S1_PLUS, S2_PLUS)
    minus = (S1_MINUS, S2_MINUS)
    lam = np.array(
        [[params.Lambda, params.Lambda12], [params.Lambda12, params.Lambda]]
    )
    hamiltonian = params.M12 * (S1_PLUS @ S2_MINUS + S2_PLUS @ S1_MINUS)
    if params.omega:
        hamiltonian = hamiltonian + params.omega * (
            linalg.kron(_S_Z, linalg.I2) + linalg.kron(linalg.I2, _S_Z)
        )
    terms = [
        (float(lam[i, j]), minus[j], plus[i]) for i in range(2) for j in range(2)
    ]
    return GeneratorSpec(hamiltonian, terms)


def collective_couplings(
    mu0_r: float, d_dot_r: float, Lambda: float
) -> tuple[float, float]:
    """Collective damping Λ12 and dipole-dipole coupling M12 from geometry.

    ``mu0_r`` is the interatomic distance in units of the transition
    wavelength scale (μ0 r) and ``d_dot_r`` the cosine between the dipole
    direction and the interatomic axis.  In the small-separation limit with
    perpendicular dipoles Λ12 → Λ while M12 diverges like -(3/4)Λ/(μ0 r)³.
    """
    if not (math.isfinite(mu0_r) and mu0_r > 0):
        raise BadGeometry(f"mu0_r must be positive and finite, got {mu0_r}")
    if not -1.0 <= d_dot_r <= 1.0:
        raise BadGeometry(f"d_dot_r must lie in [-1, 1], got {d_dot_r}")
    if not (math.isfinite(Lambda) and Lambda > 0):
        raise BadGeometry(f"Lambda must be positive and finite, got {Lambda}")
    x = mu0_r
    dd = d_dot_r * d_dot_r
    sin_x, cos_x = math.sin(x), math.cos(x)
    lambda12 = 1.5 * Lambda * (
        (1.0 - dd) * sin_x / x + (1.0 - 3.0 * dd) * (cos_x / x**2 - sin_x / x**3)
    )
    m12 = 0.75 * Lambda * (
        -(1.0 - dd) * cos_x / x + (1.0 - 3.0 * dd) * (sin_x / x**2 - cos_x / x**3)
    )
    return lambda12, m12
