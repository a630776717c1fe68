"""Two-qubit correlation dynamics and quantum-speed-limit times.

The package simulates two decoherence channels (local dephasing driven by
Ornstein-Uhlenbeck noise and collective two-atom decay), tracks Bures
measures of entanglement and discord along the trajectories, and evaluates
the unified Margolus-Levitin / Mandelstam-Tamm style bound on the minimum
time to create or destroy a given amount of correlation.
"""

from .channels import (
    CollectiveParams,
    GeneratorSpec,
    OunParams,
    collective_couplings,
    collective_generator,
    oun_decoherence_function,
    oun_generator,
    oun_rate,
)
from .correlations import (
    CorrelationAmount,
    bures_discord_bell_diagonal,
    bures_entanglement,
    concurrence,
    correlation_change,
    separable_fidelity_from_concurrence,
)
from .dynamics import Trajectory, TrajectorySamples, evolve, time_average
from .linalg import (
    HermitianEigen,
    fidelity,
    hermitian_eig,
    hs_norm,
    kron,
    op_norm,
    partial_trace,
    sqrt_psd,
    trace_norm,
)
from .qsl import (
    QslResult,
    ScenarioRun,
    SweepRow,
    closest_separable_trajectory,
    norm_integrands,
    run_scenario,
    sweep_scenario,
    tau_qc_discord,
    tau_qc_entanglement,
)
from .states import (
    BellDiagonalCoeffs,
    bell_coeffs,
    bell_diagonal_state,
    bell_psi_plus,
    purify,
    separable_collective_sigma,
    separable_oun_sigma,
    state_g1e2,
)

__version__ = "0.1.0"

__all__ = [
    "BellDiagonalCoeffs",
    "CollectiveParams",
    "CorrelationAmount",
    "GeneratorSpec",
    "HermitianEigen",
    "OunParams",
    "QslResult",
    "ScenarioRun",
    "SweepRow",
    "Trajectory",
    "TrajectorySamples",
    "bell_coeffs",
    "bell_diagonal_state",
    "bell_psi_plus",
    "bures_discord_bell_diagonal",
    "bures_entanglement",
    "closest_separable_trajectory",
    "collective_couplings",
    "collective_generator",
    "concurrence",
    "correlation_change",
    "evolve",
    "fidelity",
    "hermitian_eig",
    "hs_norm",
    "kron",
    "norm_integrands",
    "op_norm",
    "oun_decoherence_function",
    "oun_generator",
    "oun_rate",
    "partial_trace",
    "purify",
    "run_scenario",
    "separable_collective_sigma",
    "separable_fidelity_from_concurrence",
    "separable_oun_sigma",
    "sqrt_psd",
    "state_g1e2",
    "sweep_scenario",
    "tau_qc_discord",
    "tau_qc_entanglement",
    "time_average",
    "trace_norm",
]
