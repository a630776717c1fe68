import numpy as np
import pytest
from numpy.testing import assert_allclose

from qslcorr import linalg, states
from qslcorr.errors import BadMixingParameter, DomainError, NotBellDiagonal

from helpers import random_density_matrix


class TestConstructors:
    def test_bell_psi_plus_is_pure(self):
        rho = states.bell_psi_plus()
        states.validate_density_matrix(rho)
        assert_allclose(np.trace(rho @ rho).real, 1.0, atol=1e-14)
        assert np.linalg.matrix_rank(rho) == 1

    def test_bell_psi_plus_components(self):
        rho = states.bell_psi_plus()
        psi = np.array([0, 1, 1, 0], dtype=complex) / np.sqrt(2)
        assert_allclose(rho, np.outer(psi, psi.conj()), atol=1e-15)

    def test_g1e2_projector(self):
        rho = states.state_g1e2()
        states.validate_density_matrix(rho)
        assert_allclose(rho, np.diag([0, 1.0, 0, 0]), atol=1e-15)

    def test_oun_sigma(self):
        sigma = states.separable_oun_sigma()
        states.validate_density_matrix(sigma)
        assert_allclose(sigma, np.diag([0, 0.5, 0.5, 0]), atol=1e-15)

    def test_oun_sigma_fidelity_with_bell(self):
        f = linalg.fidelity(states.bell_psi_plus(), states.separable_oun_sigma())
        assert_allclose(f, 0.5, atol=1e-12)

    def test_collective_sigma_endpoints(self):
        assert_allclose(
            states.separable_collective_sigma("g1e2", 1.0), np.diag([1.0, 0, 0, 0])
        )
        for kind in ("g1e2", "bell-psi-plus"):
            assert_allclose(
                states.separable_collective_sigma(kind, 0.0),
                np.diag([0, 0, 0, 1.0]),
            )
        states.validate_density_matrix(states.separable_collective_sigma("bell-psi-plus", 0.3))

    def test_collective_sigma_bad_x(self):
        for x in (-0.1, 1.1):
            with pytest.raises(BadMixingParameter):
                states.separable_collective_sigma("g1e2", x)

    def test_collective_sigma_bad_kind(self):
        with pytest.raises(DomainError):
            states.separable_collective_sigma("nope", 0.5)


class TestValidation:
    def test_rejects_trace(self):
        with pytest.raises(DomainError):
            states.validate_density_matrix(np.eye(4, dtype=complex))

    def test_rejects_non_hermitian(self):
        rho = np.diag([1.0, 0, 0, 0]).astype(complex)
        rho[0, 1] = 1e-3
        with pytest.raises(DomainError):
            states.validate_density_matrix(rho)

    def test_rejects_negative(self):
        rho = np.diag([1.1, -0.1, 0, 0]).astype(complex)
        with pytest.raises(DomainError):
            states.validate_density_matrix(rho)


class TestPurify:
    def test_pure_state(self):
        vec = states.purify(states.bell_psi_plus())
        psi = np.array([0, 1, 1, 0], dtype=complex) / np.sqrt(2)
        # |psi+> tensor first ancilla basis vector, up to global phase
        expected = np.kron(psi, np.array([1, 0, 0, 0], dtype=complex))
        phase = vec[np.argmax(np.abs(expected))] / expected[np.argmax(np.abs(expected))]
        assert_allclose(vec, expected * phase, atol=1e-12)

    def test_maximally_mixed_schmidt(self):
        vec = states.purify(np.eye(4, dtype=complex) / 4)
        svals = np.linalg.svd(vec.reshape(4, 4), compute_uv=False)
        assert_allclose(svals, [0.5, 0.5, 0.5, 0.5], atol=1e-12)

    def test_roundtrip(self, rng):
        for _ in range(200):
            rho = random_density_matrix(rng, rank=int(rng.integers(1, 5)))
            vec = states.purify(rho)
            assert abs(np.linalg.norm(vec) - 1.0) <= 1e-12
            back = linalg.partial_trace(np.outer(vec, vec.conj()), keep="system")
            assert np.max(np.abs(back - rho)) <= 1e-10


class TestBellCoeffs:
    def test_bell_state(self):
        # oracle: direct traces against sigma_i x sigma_i
        rho = states.bell_psi_plus()
        expected = [
            np.trace(rho @ linalg.kron(s, s)).real
            for s in (linalg.SIGMA_X, linalg.SIGMA_Y, linalg.SIGMA_Z)
        ]
        got = states.bell_coeffs(rho)
        assert_allclose(got, expected, atol=1e-14)
        assert_allclose(got, (1.0, 1.0, -1.0), atol=1e-14)

    def test_maximally_mixed(self):
        got = states.bell_coeffs(np.eye(4, dtype=complex) / 4)
        assert_allclose(got, (0.0, 0.0, 0.0), atol=1e-14)

    def test_rejects_non_bell_diagonal(self):
        with pytest.raises(NotBellDiagonal):
            states.bell_coeffs(states.state_g1e2())

    def test_reconstruction_roundtrip(self, rng):
        # random Bell-diagonal mixtures: reconstruct within 1e-10
        for _ in range(100):
            weights = rng.dirichlet(np.ones(4))
            bells = np.array(
                [
                    [0, 1, 1, 0],
                    [0, 1, -1, 0],
                    [1, 0, 0, 1],
                    [1, 0, 0, -1],
                ],
                dtype=complex,
            ) / np.sqrt(2)
            rho = sum(
                w * np.outer(b, b.conj()) for w, b in zip(weights, bells)
            )
            coeffs = states.bell_coeffs(rho)
            rebuilt = states.bell_diagonal_state(coeffs)
            assert np.max(np.abs(rebuilt - rho)) <= 1e-10
