"""Built-in verification battery for the ``qslcorr selftest`` subcommand.

Runs the golden closed-form checks and a reduced set of the randomized
property suites, printing one PASS/FAIL line per check.  These checks
verify that the installation computes correctly; the full acceptance
suite (including method-level bound diagnostics) lives in the test tree.
"""

from __future__ import annotations

import sys
import time

import numpy as np

from . import linalg
from .channels import (
    CollectiveParams,
    OunParams,
    collective_generator,
    oun_decoherence_function,
    oun_generator,
)
from .correlations import bures_discord_bell_diagonal, bures_entanglement, concurrence
from .dynamics import evolve
from .qsl import _concurrence_nodes, run_scenario
from .states import bell_coeffs, bell_psi_plus, purify, state_g1e2

MAX_BURES = 1.0 - 1.0 / np.sqrt(2.0)


def _random_density(rng, rank: int = 4) -> np.ndarray:
    g = rng.normal(size=(4, rank)) + 1j * rng.normal(size=(4, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def check_bell_reference_values() -> None:
    c = concurrence(bell_psi_plus())
    e = bures_entanglement(c)
    d = bures_discord_bell_diagonal(bell_coeffs(bell_psi_plus()))
    assert abs(e - MAX_BURES) < 1e-10, f"E deviates: {e}"
    assert abs(d - MAX_BURES) < 1e-10, f"D deviates: {d}"


def check_oun_closed_form() -> None:
    params = OunParams(kappa=1.0, lam=0.1)
    traj = evolve(oun_generator(params), bell_psi_plus(), 1.0, 2000)
    t = traj.times
    c = _concurrence_nodes(traj.states)
    f_p = 0.5 * (1.0 + np.sqrt(np.clip(1.0 - c * c, 0.0, None)))
    closed = 0.5 * (
        1.0 + np.sqrt(1.0 - np.exp(-2.0 * (t + np.expm1(-0.1 * t) / 0.1)))
    )
    worst = float(np.max(np.abs(f_p - closed)))
    assert worst < 1e-6, f"F_P deviates by {worst:.3e}"
    p_sq = oun_decoherence_function(params, t) ** 2
    worst_c = float(np.max(np.abs(c - p_sq)))
    assert worst_c < 1e-6, f"concurrence deviates by {worst_c:.3e}"


def check_collective_closed_forms() -> None:
    params = CollectiveParams(Lambda=1.0, Lambda12=0.95, M12=4.65)
    gen = collective_generator(params)
    traj = evolve(gen, state_g1e2(), 1.0, 2000)
    t = traj.times
    c = _concurrence_nodes(traj.states)
    closed = np.exp(-t) * np.abs(np.sin(2 * 4.65 * t) + 1j * np.sinh(0.95 * t))
    worst = float(np.max(np.abs(c - closed)))
    assert worst < 1e-6, f"creation concurrence deviates by {worst:.3e}"

    traj_b = evolve(gen, bell_psi_plus(), 1.0, 2000)
    c_b = _concurrence_nodes(traj_b.states)
    f_p = 0.5 * (1.0 + np.sqrt(np.clip(1.0 - c_b * c_b, 0.0, None)))
    closed_b = 0.5 * (1.0 + np.sqrt(1.0 - np.exp(-2.0 * t * 1.95)))
    worst_b = float(np.max(np.abs(f_p - closed_b)))
    assert worst_b < 1e-6, f"decay F_P deviates by {worst_b:.3e}"


def check_bound_ordering() -> None:
    runs = (
        run_scenario("oun", "bell-psi-plus", OunParams(1.0, 0.1), 1.0, 500),
        run_scenario(
            "collective", "g1e2", CollectiveParams(1.0, 0.95, 4.65), 1.0, 500
        ),
    )
    for run in runs:
        for res in run.results:
            assert res.tau_op >= res.tau_hs - 1e-12 >= res.tau_tr - 2e-12
            assert abs(res.tau_unified - res.tau_op) <= 1e-12


def check_norm_ordering() -> None:
    rng = np.random.default_rng(11)
    for _ in range(100):
        a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        a = linalg.hermitize(a)
        assert (
            linalg.op_norm(a)
            <= linalg.hs_norm(a) + 1e-12
            <= linalg.trace_norm(a) + 2e-12
        )


def check_fidelity_properties() -> None:
    rng = np.random.default_rng(12)
    for _ in range(100):
        rho, sigma = _random_density(rng), _random_density(rng)
        f_ab = linalg.fidelity(rho, sigma)
        f_ba = linalg.fidelity(sigma, rho)
        assert abs(f_ab - f_ba) < 1e-9
        assert abs(linalg.fidelity(rho, rho) - 1.0) < 1e-12


def check_purification_roundtrip() -> None:
    rng = np.random.default_rng(13)
    for _ in range(100):
        rho = _random_density(rng, rank=rng.integers(1, 5))
        vec = purify(rho)
        back = linalg.partial_trace(np.outer(vec, vec.conj()), keep="system")
        assert np.max(np.abs(back - rho)) < 1e-10


def check_generator_preservation() -> None:
    rng = np.random.default_rng(14)
    gens = (
        oun_generator(OunParams(1.3, 0.4)),
        collective_generator(CollectiveParams(1.0, 0.9, 3.0, omega=0.7)),
    )
    for gen in gens:
        for _ in range(50):
            rho = _random_density(rng)
            t = float(rng.uniform(0, 3))
            image = gen.apply(t, rho)
            assert abs(np.trace(image)) < 1e-12
            assert linalg.hermiticity_defect(image) < 1e-10


def check_extended_consistency() -> None:
    rng = np.random.default_rng(15)
    gen = collective_generator(CollectiveParams(1.0, 0.95, 4.65))
    for _ in range(100):
        x = rng.normal(size=(16, 16)) + 1j * rng.normal(size=(16, 16))
        x = linalg.hermitize(x)
        lhs = linalg.partial_trace(gen.apply_extended(0.3, x), keep="system")
        rhs = gen.apply(0.3, linalg.partial_trace(x, keep="system"))
        assert np.max(np.abs(lhs - rhs)) < 1e-10


def check_convergence() -> None:
    coarse = run_scenario("oun", "bell-psi-plus", OunParams(1.0, 0.1), 1.0, 2000)
    fine = run_scenario("oun", "bell-psi-plus", OunParams(1.0, 0.1), 1.0, 4000)
    a = coarse.results[-1].tau_unified
    b = fine.results[-1].tau_unified
    assert abs(a - b) / b < 1e-4, f"relative change {abs(a - b) / b:.3e}"


CHECKS = (
    ("bell reference values", check_bell_reference_values),
    ("dephasing closed form", check_oun_closed_form),
    ("collective closed forms", check_collective_closed_forms),
    ("bound ordering", check_bound_ordering),
    ("norm ordering", check_norm_ordering),
    ("fidelity properties", check_fidelity_properties),
    ("purification roundtrip", check_purification_roundtrip),
    ("generator preservation", check_generator_preservation),
    ("extended generator consistency", check_extended_consistency),
    ("grid convergence", check_convergence),
)


def run_selftest(stream=None) -> int:
    """Run every check, print one line per result, return a shell exit code."""
    stream = stream or sys.stdout
    failures = 0
    for name, check in CHECKS:
        start = time.perf_counter()
        try:
            check()
        except AssertionError as exc:
            failures += 1
            status = f"FAIL ({exc})"
        else:
            status = "PASS"
        elapsed = time.perf_counter() - start
        print(f"{name:<32s} {status} [{elapsed:.2f}s]", file=stream)
    print(
        f"{len(CHECKS) - failures}/{len(CHECKS)} checks passed",
        file=stream,
    )
    return 1 if failures else 0
