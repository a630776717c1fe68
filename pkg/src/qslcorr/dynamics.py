"""Fixed-step integration of dρ/dt = L_t ρ and trajectory bookkeeping.

The integrator is classical fourth-order Runge-Kutta on a uniform grid.
A fixed grid (rather than an adaptive one) keeps every downstream quadrature
sampled on exactly the nodes of the state trajectory, which makes results
reproducible bit for bit.

After every step the state is re-Hermitized, negative eigenvalues from
roundoff are clamped to zero and the trace is renormalized; the worst
pre-repair trace drift and eigenvalue excursion are recorded on the
returned :class:`Trajectory`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .channels import GeneratorSpec
from .errors import BadSteps, GridMismatch, IntegrationDiverged
from .states import validate_density_matrix

DIVERGENCE_FLOOR = -1e-4
GRID_TOL = 1e-12


@dataclass
class TrajectorySamples:
    """Per-node measures and norm integrands attached to a trajectory.

    ``d_bures`` is NaN on nodes where the state is not Bell diagonal.
    ``rho_norms`` and ``sigma_norms`` hold columns (op, tr, hs) of the
    extended-generator images of the purified state and of the closest
    separable state.
    """

    concurrence: np.ndarray
    e_bures: np.ndarray
    d_bures: np.ndarray
    f_p: np.ndarray
    rho_norms: np.ndarray
    sigma_norms: np.ndarray


@dataclass
class Trajectory:
    """Uniform time grid with the states evolved on it.

    ``samples`` stays None until a scenario run fills it in.
    """

    times: np.ndarray
    states: np.ndarray
    max_trace_drift: float = 0.0
    max_eig_clamp: float = 0.0
    samples: TrajectorySamples | None = field(default=None)

    @property
    def step(self) -> float:
        return float(self.times[1] - self.times[0])


def _repair(rho: np.ndarray) -> tuple[np.ndarray, float, float]:
    """Hermitize, clamp negative eigenvalues and renormalize the trace.

    Returns the repaired state plus the trace drift and the most negative
    eigenvalue encountered before repair.
    """
    rho = linalg.hermitize(rho)
    drift = abs(float(np.trace(rho).real) - 1.0)
    vals, vecs = np.linalg.eigh(rho)
    min_eig = float(vals.min())
    if min_eig < DIVERGENCE_FLOOR:
        raise IntegrationDiverged(
            f"state eigenvalue {min_eig:.3e} below {DIVERGENCE_FLOOR:.1e}"
        )
    if min_eig < 0.0:
        vals = np.clip(vals, 0.0, None)
        rho = (vecs * vals) @ vecs.conj().T
    rho = rho / np.trace(rho).real
    return rho, drift, max(0.0, -min_eig)


def evolve(
    gen: GeneratorSpec, rho0: np.ndarray, tau: float, steps: int
) -> Trajectory:
    """Integrate dρ/dt = L_t ρ over [0, tau] with classical RK4.

    ``steps`` must be an even integer >= 10 so the resulting grid is usable
    by composite Simpson quadrature.  The global error is O(h^4).
    """
    if steps < 10 or steps % 2 != 0:
        raise BadSteps(f"steps must be an even integer >= 10, got {steps}")
    if not tau > 0:
        raise BadSteps(f"tau must be positive, got {tau}")
    rho = validate_density_matrix(rho0).copy()
    h = tau / steps
    times = np.linspace(0.0, tau, steps + 1)
    states = np.empty((steps + 1, 4, 4), dtype=complex)
    states[0] = rho
    max_drift = 0.0
    max_clamp = 0.0
    for k in range(steps):
        t = times[k]
        k1 = gen.apply(t, rho)
        k2 = gen.apply(t + 0.5 * h, rho + 0.5 * h * k1)
        k3 = gen.apply(t + 0.5 * h, rho + 0.5 * h * k2)
        k4 = gen.apply(t + h, rho + h * k3)
        rho = rho + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        rho, drift, clamp = _repair(rho)
        max_drift = max(max_drift, drift)
        max_clamp = max(max_clamp, clamp)
        states[k + 1] = rho
    return Trajectory(times, states, max_drift, max_clamp)


def _check_uniform_grid(times: np.ndarray) -> float:
    diffs = np.diff(times)
    if diffs.size == 0 or np.any(diffs <= 0):
        raise GridMismatch("times must be strictly increasing")
    h = float(diffs[0])
    if np.max(np.abs(diffs - h)) > GRID_TOL * max(1.0, abs(times[-1])):
        raise GridMismatch("time grid is not uniform")
    return h


def time_average(values: np.ndarray, times: np.ndarray) -> float:
    """Composite-Simpson time average (1/τ) ∫ values dt over the grid."""
    values = np.asarray(values, dtype=float)
    times = np.asarray(times, dtype=float)
    if values.shape != times.shape:
        raise GridMismatch(
            f"values shape {values.shape} does not match times shape {times.shape}"
        )
    h = _check_uniform_grid(times)
    n = values.size - 1
    if n % 2 != 0:
        raise GridMismatch("composite Simpson needs an even number of intervals")
    integral = (h / 3.0) * (
        values[0]
        + values[-1]
        + 4.0 * values[1:-1:2].sum()
        + 2.0 * values[2:-1:2].sum()
    )
    return float(integral / (times[-1] - times[0]))


def cumulative_integral(values: np.ndarray, h: float) -> np.ndarray:
    """Running integral ∫_0^{t_k} values dt on a uniform grid.

    Even-index prefixes use composite Simpson; odd-index prefixes append a
    trapezoid correction for the final interval, so the result agrees with
    :func:`time_average` on every even node.
    """
    values = np.asarray(values, dtype=float)
    n = values.size
    out = np.zeros(n)
    simpson = 0.0
    for k in range(1, n):
        if k % 2 == 0:
            simpson += (h / 3.0) * (values[k - 2] + 4.0 * values[k - 1] + values[k])
            out[k] = simpson
        else:
            out[k] = simpson + 0.5 * h * (values[k - 1] + values[k])
    return out
