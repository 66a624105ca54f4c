import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chiralpotts import ModelParams, correlation_table, negative_control, select_ground_states, two_point
from chiralpotts.correlations import (
    correlation_matrix,
    max_symmetry_residual,
    pair_expectation,
    reflection_residuals,
)

from oracles import correlator_matrix, dense_hamiltonian, index_of


def random_state(dim, seed):
    rng = np.random.default_rng(seed)
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


class TestTwoPoint:
    def test_origin(self):
        p = ModelParams(3, 4)
        psi = random_state(p.dim, 3)
        for r in (1, 2):
            assert abs(two_point(psi, r, 0, p) - 1) <= 1e-15

    def test_basis_state(self):
        p = ModelParams(3, 3)
        c = (2, 0, 1)
        psi = np.zeros(p.dim, dtype=complex)
        psi[index_of(c, 3)] = 1.0
        omega = np.exp(2j * np.pi / 3)
        for r in (1, 2):
            for R in range(3):
                val = two_point(psi, r, R, p)
                assert abs(val - omega ** (r * (c[0] - c[R]))) <= 1e-15
                assert abs(abs(val) - 1) <= 1e-15

    def test_reduces_r_mod_l(self):
        p = ModelParams(3, 4)
        psi = random_state(p.dim, 1)
        assert two_point(psi, 1, 5, p) == two_point(psi, 1, 1, p)
        assert two_point(psi, 1, -1, p) == two_point(psi, 1, 3, p)

    def test_matches_dense_operator(self, solved):
        params, _, _, report = solved(3, 3)
        psi = report.eigenvectors[0].vector
        for r in (1, 2):
            for R in range(3):
                dense = np.vdot(psi, correlator_matrix(3, 3, r, 0, R) @ psi)
                assert abs(two_point(psi, r, R, params) - dense) <= 1e-13

    def test_frozen_ground_state_values(self, solved):
        # dense-operator oracle on the nondegenerate N=3, L=4, lambda=0.5 ground state
        params, _, _, report = solved(3, 4)
        psi = report.eigenvectors[0].vector
        assert abs(two_point(psi, 1, 1, params) - (0.9361063111060333 + 0.00057129693931367j)) <= 1e-10
        assert abs(two_point(psi, 1, 2, params) - 0.9331377651307332) <= 1e-10
        assert abs(two_point(psi, 1, 3, params) - (0.9361063111060333 - 0.00057129693931367j)) <= 1e-10

    def test_rejects_unnormalized(self):
        p = ModelParams(2, 3)
        with pytest.raises(ValueError):
            two_point(np.ones(p.dim), 1, 1, p)

    @pytest.mark.parametrize("r", [0, 3])
    def test_rejects_r(self, r):
        p = ModelParams(3, 3)
        with pytest.raises(ValueError):
            two_point(random_state(p.dim, 0), r, 1, p)

    def test_matrix_matches_scalar(self):
        p = ModelParams(4, 3)
        psi = random_state(p.dim, 5)
        rho = correlation_matrix(psi, p)
        for r in range(1, 4):
            for R in range(3):
                assert abs(rho[r - 1, R] - two_point(psi, r, R, p)) <= 1e-14


class TestTable:
    def test_invariants(self, solved):
        params, _, _, report = solved(3, 5)
        for i, ev in enumerate(report.eigenvectors):
            tb = correlation_table(ev, params, i)
            assert np.max(np.abs(tb.values[:, 0] - 1)) <= 1e-13
            assert np.max(np.abs(tb.values)) <= 1 + 1e-12
            assert np.max(np.abs(tb.values[::-1] - tb.values.conj())) <= 1e-12
            assert tb.max_symmetry_residual <= 1e-10
            assert tb.midpoint_imag is None

    def test_midpoint_even_length(self, solved):
        params, _, _, report = solved(3, 4)
        for ev in report.eigenvectors:
            tb = correlation_table(ev, params)
            assert abs(tb.rho(1, 2).imag) <= 1e-10
            assert tb.max_midpoint_imag <= 1e-10
            assert tb.passes()

    def test_nontrivial_imaginary_parts(self, solved):
        # the identity is not vacuous: off-midpoint values carry imaginary parts
        params, _, _, report = solved(3, 5)
        imag = max(np.max(np.abs(correlation_table(ev, params).values.imag)) for ev in report.eigenvectors)
        assert imag > 1e-3

    def test_conjugation_step(self, solved):
        params, _, _, report = solved(3, 5)
        for ev in report.eigenvectors[:10]:
            psi = ev.vector
            for r in (1, 2):
                for R in range(5):
                    lhs = np.conj(two_point(psi, r, R, params))
                    assert abs(lhs - pair_expectation(psi, r, R, 0, params)) <= 1e-10

    def test_phase_invariance(self, solved):
        params, _, _, report = solved(3, 4)
        psi = report.eigenvectors[3].vector
        a = correlation_matrix(psi, params)
        b = correlation_matrix(np.exp(0.731j) * psi, params)
        assert np.max(np.abs(a - b)) <= 1e-14

    @settings(max_examples=20, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 5), length=st.integers(2, 5))
    def test_adjoint_identity_any_state(self, seed, n, length):
        p = ModelParams(n, length)
        rho = correlation_matrix(random_state(p.dim, seed), p)
        assert np.max(np.abs(rho[::-1] - rho.conj())) <= 1e-12

    def test_reflection_residual_formula(self):
        rho = np.array([[1.0, 0.5 + 0.1j, 0.2, 0.5 - 0.1j]])
        np.testing.assert_allclose(reflection_residuals(rho), 0.0, atol=1e-16)
        rho[0, 1] = 0.5 + 0.2j
        assert reflection_residuals(rho)[0, 1] == pytest.approx(0.1)


class TestNegativeControl:
    def test_equal_superposition_k0_k1(self, solved):
        params, _, _, report = solved(3, 3)
        k0 = next(ev for ev in report.eigenvectors if ev.momentum == 0 and ev.charge == 0)
        k1 = next(ev for ev in report.eigenvectors if ev.momentum == 1 and ev.charge == 0)
        psi = (k0.vector + k1.vector) / np.sqrt(2)
        assert max_symmetry_residual(psi, params) > 1e-3

    def test_pure_eigenvector_passes(self, solved):
        params, _, _, report = solved(3, 3)
        for ev in report.eigenvectors:
            assert max_symmetry_residual(ev.vector, params) <= 1e-10

    def test_report(self, solved):
        params, bundle, _, report = solved(3, 3)
        nc = negative_control(params, bundle, seed=11, report=report)
        assert nc.passed and nc.max_residual > 1e-3
        assert 1 <= len(nc.attempts) <= 5
        assert nc.control_residual <= 1e-10
        assert nc.attempts[0]["momenta"][0] != nc.attempts[0]["momenta"][1]

    def test_reproducible(self, solved):
        params, bundle, _, report = solved(3, 4)
        a = negative_control(params, bundle, seed=5, report=report)
        b = negative_control(params, bundle, seed=5, report=report)
        assert a == b

    def test_builds_own_report(self, solved):
        params, bundle, _, _ = solved(3, 3)
        assert negative_control(params, bundle, seed=0).passed

    def test_two_sites(self, solved):
        params, bundle, _, report = solved(3, 2)
        nc = negative_control(params, bundle, report=report)
        assert nc.passed and nc.control_residual <= 1e-10

    def test_ising_two_sites_cannot_fail(self, solved):
        # N=2 correlators are real and R = -R when L = 2, so every draw stays symmetric
        params, bundle, _, report = solved(2, 2)
        nc = negative_control(params, bundle, report=report)
        assert not nc.passed and len(nc.attempts) == 5
        assert nc.max_residual <= 1e-12

    def test_ground_state_selection_feeds_tables(self, solved):
        params, _, _, report = solved(2, 2, 0.0)
        for ev in select_ground_states(report):
            tb = correlation_table(ev, params)
            np.testing.assert_allclose(np.abs(tb.values), 1.0, atol=1e-12)
