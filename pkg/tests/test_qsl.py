import logging

import numpy as np
import pytest
from numpy.testing import assert_allclose

from qslcorr import channels, dynamics, linalg, qsl, states
from qslcorr.channels import GeneratorSpec
from qslcorr.correlations import correlation_change
from qslcorr.errors import GridMismatch, NoDynamics, UnsupportedScenario
from qslcorr.qsl import _concurrence_nodes, _fidelity_nodes

OUN = channels.OunParams(kappa=1.0, lam=0.1)
FIG2 = channels.CollectiveParams(Lambda=1.0, Lambda12=0.95, M12=4.65)
MAX_BURES = 1.0 - 1.0 / np.sqrt(2.0)


@pytest.fixture(scope="module")
def oun_run():
    return qsl.run_scenario("oun", "bell-psi-plus", OUN, 1.0, 1000)


@pytest.fixture(scope="module")
def creation_run():
    return qsl.run_scenario("collective", "g1e2", FIG2, 1.0, 1000)


class TestNormIntegrands:
    def test_zero_generator(self):
        traj = dynamics.evolve(GeneratorSpec(None, []), states.bell_psi_plus(), 1.0, 10)
        sigmas = np.tile(states.separable_oun_sigma(), (11, 1, 1))
        rho_n, sigma_n = qsl.norm_integrands(GeneratorSpec(None, []), traj, sigmas)
        assert np.max(rho_n) == 0.0 and np.max(sigma_n) == 0.0

    def test_oun_analytic_values(self):
        # For the dephasing channel both purification images have exactly
        # two eigenvalues +-2 gamma(t), so op/tr/hs = (2, 4, 2 sqrt 2) gamma.
        gen = channels.oun_generator(OUN)
        traj = dynamics.evolve(gen, states.bell_psi_plus(), 1.0, 200)
        sigmas = qsl.closest_separable_trajectory("oun", "bell-psi-plus", traj, OUN)
        rho_n, sigma_n = qsl.norm_integrands(gen, traj, sigmas)
        gamma = channels.oun_rate(OUN, traj.times)
        for side in (rho_n, sigma_n):
            assert_allclose(side[:, 0], 2 * gamma, atol=1e-10)
            assert_allclose(side[:, 1], 4 * gamma, atol=1e-10)
            assert_allclose(side[:, 2], 2 * np.sqrt(2) * gamma, atol=1e-10)

    def test_norm_ordering_per_node(self, creation_run):
        s = creation_run.trajectory.samples
        for side in (s.rho_norms, s.sigma_norms):
            assert np.all(side[:, 0] <= side[:, 2] + 1e-12)  # op <= hs
            assert np.all(side[:, 2] <= side[:, 1] + 1e-12)  # hs <= tr

    def test_integrands_finite_and_stable(self):
        gen = channels.collective_generator(FIG2)
        coarse = dynamics.evolve(gen, states.bell_psi_plus(), 0.5, 100)
        fine = dynamics.evolve(gen, states.bell_psi_plus(), 0.5, 200)
        out = {}
        for traj in (coarse, fine):
            sig = qsl.closest_separable_trajectory(
                "collective", "bell-psi-plus", traj, FIG2, audit=False
            )
            rho_n, sigma_n = qsl.norm_integrands(gen, traj, sig)
            total = rho_n + sigma_n
            assert np.all(np.isfinite(total))
            out[traj.states.shape[0]] = total
        # shared nodes of the two refinements agree
        assert_allclose(out[101], out[201][::2], atol=1e-6)

    def test_grid_mismatch(self):
        gen = channels.oun_generator(OUN)
        traj = dynamics.evolve(gen, states.bell_psi_plus(), 1.0, 10)
        with pytest.raises(GridMismatch):
            qsl.norm_integrands(gen, traj, np.zeros((5, 4, 4), dtype=complex))


class TestClosestSeparable:
    def test_oun_constant(self):
        traj = dynamics.evolve(
            channels.oun_generator(OUN), states.bell_psi_plus(), 1.0, 50
        )
        sigmas = qsl.closest_separable_trajectory("oun", "bell-psi-plus", traj, OUN)
        assert np.max(np.abs(sigmas - states.separable_oun_sigma()[None])) == 0.0

    def test_oun_achieves_separable_fidelity(self):
        traj = dynamics.evolve(
            channels.oun_generator(OUN), states.bell_psi_plus(), 1.0, 200
        )
        sigmas = qsl.closest_separable_trajectory("oun", "bell-psi-plus", traj, OUN)
        f = _fidelity_nodes(traj.states, sigmas)
        c = _concurrence_nodes(traj.states)
        f_p = 0.5 * (1 + np.sqrt(np.clip(1 - c * c, 0, None)))
        assert np.max(np.abs(f - f_p)) <= 1e-9

    @pytest.mark.parametrize("initial,rho0", [
        ("g1e2", states.state_g1e2()),
        ("bell-psi-plus", states.bell_psi_plus()),
    ])
    def test_collective_achieves_separable_fidelity(self, initial, rho0):
        gen = channels.collective_generator(FIG2)
        traj = dynamics.evolve(gen, rho0, 1.0, 400)
        sigmas = qsl.closest_separable_trajectory("collective", initial, traj, FIG2)
        f = _fidelity_nodes(traj.states, sigmas)
        c = _concurrence_nodes(traj.states)
        f_p = 0.5 * (1 + np.sqrt(np.clip(1 - c * c, 0, None)))
        assert np.max(np.abs(f - f_p)) <= 1e-7
        for sigma in sigmas[::40]:
            states.validate_density_matrix(sigma)

    def test_creation_starts_at_unit_fidelity(self):
        gen = channels.collective_generator(FIG2)
        traj = dynamics.evolve(gen, states.state_g1e2(), 0.2, 20)
        sigmas = qsl.closest_separable_trajectory(
            "collective", "g1e2", traj, FIG2, audit=False
        )
        f0 = linalg.fidelity(traj.states[0], sigmas[0])
        assert_allclose(f0, 1.0, atol=1e-12)

    def test_audit_logs_formula_shortfall(self, caplog):
        gen = channels.collective_generator(FIG2)
        traj = dynamics.evolve(gen, states.state_g1e2(), 1.0, 100)
        with caplog.at_level(logging.INFO, logger="qslcorr.qsl"):
            qsl.closest_separable_trajectory("collective", "g1e2", traj, FIG2)
        assert any("under-performs" in record.message for record in caplog.records)

    def test_unsupported_scenarios(self):
        traj = dynamics.evolve(
            channels.oun_generator(OUN), states.state_g1e2(), 1.0, 10
        )
        with pytest.raises(UnsupportedScenario):
            qsl.closest_separable_trajectory("oun", "g1e2", traj, OUN)
        with pytest.raises(UnsupportedScenario):
            qsl.closest_separable_trajectory("thermal", "bell-psi-plus", traj, OUN)


class TestTauQc:
    def test_zero_change(self):
        amount = correlation_change(0.1, 0.1)
        result = qsl.tau_qc_entanglement(amount, (1.0, 2.0, 1.5), 1.0)
        assert result.tau_op == result.tau_tr == result.tau_hs == 0.0
        assert result.tau_unified == 0.0

    def test_full_bell_decay_factor(self):
        # symbolic simplification: 2 E0 (1 - E0/2) = 1 - 1/2 = 0.5 exactly
        amount = correlation_change(MAX_BURES, 0.0)
        result = qsl.tau_qc_entanglement(amount, (2.0, 4.0, 3.0), 1.0)
        assert_allclose(result.tau_op, 0.5 / 2.0, atol=1e-14)
        assert_allclose(result.tau_tr, 0.5 / 4.0, atol=1e-14)
        assert_allclose(result.tau_hs, 0.5 / 3.0, atol=1e-14)
        assert result.tau_unified == result.tau_op

    def test_creation_factor(self):
        amount = correlation_change(0.0, 0.1)
        result = qsl.tau_qc_entanglement(amount, (1.0, 1.0, 1.0), 1.0)
        assert_allclose(result.tau_op, 0.19, atol=1e-14)

    def test_no_dynamics(self):
        amount = correlation_change(0.1, 0.0)
        with pytest.raises(NoDynamics):
            qsl.tau_qc_entanglement(amount, (0.0, 1.0, 1.0), 1.0)

    def test_factor_range_scan(self):
        # 200 x 200 admissible (Q0, dQ) grid for both directions
        q0s = np.linspace(0, MAX_BURES, 200)
        for q0 in q0s:
            decay = 2 * np.linspace(0, q0, 200) * (
                1 - (2 * q0 - np.linspace(0, q0, 200)) / 2
            )
            creation_dq = np.linspace(0, MAX_BURES - q0, 200)
            creation = 2 * creation_dq * (1 - (2 * q0 + creation_dq) / 2)
            for factor in (decay, creation):
                assert np.all(factor >= -1e-15) and np.all(factor <= 1.0 + 1e-15)

    def test_discord_same_structure(self):
        amount = correlation_change(MAX_BURES, 0.1)
        e = qsl.tau_qc_entanglement(amount, (1.0, 2.0, 1.5), 1.0)
        d = qsl.tau_qc_discord(amount, (1.0, 2.0, 1.5), 1.0)
        assert e == d


class TestRunScenario:
    def test_oun_basics(self, oun_run):
        assert len(oun_run.results) == 1001
        first = oun_run.results[0]
        assert first.tau_unified == 0.0 and first.amount.change == 0.0
        final = oun_run.results[-1]
        assert final.amount.direction == "decay"
        assert final.amount.change > 0.05

    def test_tau_ordering_invariants(self, oun_run, creation_run):
        for run in (oun_run, creation_run):
            for res in run.results:
                assert res.tau_op >= res.tau_hs - 1e-12
                assert res.tau_hs >= res.tau_tr - 1e-12
                assert res.tau_unified == max(res.tau_op, res.tau_tr, res.tau_hs)

    def test_k_ordering(self, oun_run):
        for res in oun_run.results[1:]:
            assert res.k_op <= res.k_hs + 1e-12 <= res.k_tr + 2e-12

    def test_creation_direction(self, creation_run):
        later = [r.amount.direction for r in creation_run.results[10:]]
        assert set(later) == {"creation"}

    def test_discord_equals_entanglement_for_oun(self, oun_run):
        disc = qsl.run_scenario(
            "oun", "bell-psi-plus", OUN, 1.0, 1000, measure="discord"
        )
        for e_res, d_res in zip(oun_run.results, disc.results):
            assert abs(e_res.amount.change - d_res.amount.change) <= 1e-8
            assert abs(e_res.tau_unified - d_res.tau_unified) <= 1e-6

    def test_collective_discord_rejected(self):
        with pytest.raises(UnsupportedScenario):
            qsl.run_scenario("collective", "g1e2", FIG2, 1.0, 100, measure="discord")

    def test_oun_g1e2_rejected(self):
        with pytest.raises(UnsupportedScenario):
            qsl.run_scenario("oun", "g1e2", OUN, 1.0, 100)

    def test_samples_attached(self, oun_run):
        s = oun_run.trajectory.samples
        assert s is not None
        assert s.concurrence.shape == oun_run.trajectory.times.shape
        assert np.all(np.isnan(s.d_bures)) is not True
        assert np.all(s.f_p >= 0.5 - 1e-12)

    def test_simpson_trapezoid_agreement(self, oun_run):
        s = oun_run.trajectory.samples
        times = oun_run.trajectory.times
        for col in range(3):
            integrand = s.rho_norms[:, col] + s.sigma_norms[:, col]
            simpson = dynamics.time_average(integrand, times)
            trap = np.trapezoid(integrand, times) / times[-1]
            assert abs(simpson - trap) <= 1e-5

    def test_grid_convergence(self):
        coarse = qsl.run_scenario("oun", "bell-psi-plus", OUN, 1.0, 500)
        fine = qsl.run_scenario("oun", "bell-psi-plus", OUN, 1.0, 1000)
        a, b = coarse.results[-1].tau_unified, fine.results[-1].tau_unified
        assert abs(a - b) / b < 1e-4


class TestSweep:
    def test_row_count_and_values(self):
        values = np.linspace(0.5, 2.0, 4)
        rows = qsl.sweep_scenario(
            "oun", "bell-psi-plus", OUN, 1.0, 200, "entanglement", "kappa", values,
            lambda_ratio=0.1,
        )
        assert len(rows) == 4
        assert_allclose([r.value for r in rows], values)

    def test_lambda_ratio_applied(self):
        params, _ = qsl.apply_sweep_value("oun", OUN, 1.0, "kappa", 4.0, 0.1)
        assert params.kappa == 4.0 and abs(params.lam - 0.4) < 1e-15
        params, _ = qsl.apply_sweep_value("oun", OUN, 1.0, "kappa", 4.0, None)
        assert params.lam == OUN.lam

    def test_tau_sweep(self):
        rows = qsl.sweep_scenario(
            "oun", "bell-psi-plus", OUN, 1.0, 200, "entanglement", "tau",
            np.array([0.5, 1.0]),
        )
        assert rows[0].value == 0.5 and rows[1].value == 1.0

    def test_unsupported_param(self):
        with pytest.raises(UnsupportedScenario):
            qsl.apply_sweep_value("oun", OUN, 1.0, "M12", 1.0, None)

    def test_parallel_matches_serial(self):
        values = np.linspace(1.0, 3.0, 3)
        serial = qsl.sweep_scenario(
            "oun", "bell-psi-plus", OUN, 1.0, 100, "entanglement", "kappa", values
        )
        parallel = qsl.sweep_scenario(
            "oun", "bell-psi-plus", OUN, 1.0, 100, "entanglement", "kappa", values,
            jobs=2,
        )
        assert serial == parallel
