"""Ensemble/POVM data-model tests: operator sum, success probability,
validation reports, and the standard starting measurements."""

import numpy as np
import pytest

from helpers import (
    conjugate_ensemble,
    conjugate_povm,
    orthogonal_ensemble,
    random_ensemble,
    random_povm,
    random_unitary,
    trine_ensemble,
)
from povmopt import (
    DimensionError,
    Ensemble,
    Povm,
    check_optimal,
    lagrange_operator,
    shifted_basis_ensemble,
    shifted_basis_povm,
    square_root_measurement,
    success_probability,
    uniform_povm,
    validate_ensemble,
    validate_povm,
)


class TestEnsemble:
    def test_from_priors_weights_states(self):
        rho = np.eye(2, dtype=complex) / 2.0
        ensemble = Ensemble.from_priors([rho, rho], [0.3, 0.7])
        np.testing.assert_allclose(ensemble.priors, [0.3, 0.7], atol=1e-15)

    def test_shape_mismatch_rejected(self):
        with pytest.raises(DimensionError):
            Ensemble(dim=2, states=[np.eye(2), np.eye(3)])

    def test_label_count_mismatch_rejected(self):
        with pytest.raises(DimensionError):
            Ensemble(dim=2, states=[np.eye(2) / 2, np.eye(2) / 2], labels=["a"])

    def test_validate_passes_on_valid_pair(self):
        rng = np.random.default_rng(20)
        ensemble = random_ensemble(rng, 3, 4)
        report = validate_ensemble(ensemble)
        assert report.ok, report.summary()

    def test_validate_flags_negative_eigenvalue(self):
        bad = np.diag([1.0 + 1e-3, -1e-3]).astype(complex)
        ensemble = Ensemble(dim=2, states=[bad, np.zeros((2, 2), dtype=complex)])
        report = validate_ensemble(ensemble)
        failing = [c for c in report.failures() if "psd" in c.name]
        assert failing and failing[0].residual == pytest.approx(1e-3, rel=1e-6)

    def test_validate_flags_mass_deficit(self):
        rho = np.eye(2, dtype=complex) / 2.0
        ensemble = Ensemble.from_priors([rho, rho], [0.5, 0.47])
        report = validate_ensemble(ensemble)
        failing = [c for c in report.failures() if "mass" in c.name]
        assert failing and failing[0].residual == pytest.approx(0.03, abs=1e-12)


class TestPovmValidation:
    def test_valid_random_povm(self):
        rng = np.random.default_rng(21)
        report = validate_povm(random_povm(rng, 3, 4))
        assert report.ok, report.summary()

    def test_incomplete_sum_residual(self):
        povm = Povm(dim=2, elements=[0.45 * np.eye(2), 0.45 * np.eye(2)])
        report = validate_povm(povm)
        failing = [c for c in report.failures() if c.name == "completeness"]
        assert failing and failing[0].residual == pytest.approx(0.1, abs=1e-12)

    def test_negative_element_flagged(self):
        povm = Povm(dim=2, elements=[np.diag([1.0, 1.001]), np.diag([0.0, -0.001])])
        report = validate_povm(povm)
        assert any("psd" in c.name for c in report.failures())


class TestLagrangeOperator:
    @pytest.mark.parametrize("m", [2, 4])
    def test_shifted_family_gives_zero(self, m):
        operator = lagrange_operator(shifted_basis_ensemble(m), shifted_basis_povm(m))
        np.testing.assert_array_equal(operator, np.zeros((m, m)))

    def test_single_outcome_povm_returns_first_state(self):
        rng = np.random.default_rng(22)
        ensemble = random_ensemble(rng, 3, 2)
        povm = Povm(dim=3, elements=[np.eye(3, dtype=complex), np.zeros((3, 3))])
        np.testing.assert_allclose(
            lagrange_operator(ensemble, povm), ensemble.states[0], atol=1e-15
        )

    def test_orthogonal_optimum_gives_state_sum(self):
        ensemble, povm = orthogonal_ensemble([0.2, 0.3, 0.5])
        operator = lagrange_operator(ensemble, povm)
        np.testing.assert_allclose(operator, sum(ensemble.states), atol=1e-15)
        np.testing.assert_array_equal(operator, operator.conj().T)

    def test_count_mismatch_rejected(self):
        rng = np.random.default_rng(23)
        with pytest.raises(DimensionError):
            lagrange_operator(random_ensemble(rng, 2, 3), uniform_povm(2, 2))

    def test_dim_mismatch_rejected(self):
        rng = np.random.default_rng(24)
        with pytest.raises(DimensionError):
            lagrange_operator(random_ensemble(rng, 2, 2), uniform_povm(3, 2))


class TestSuccessProbability:
    @pytest.mark.parametrize("m", [2, 4, 8])
    def test_shifted_family_is_exactly_zero(self, m):
        assert success_probability(shifted_basis_ensemble(m), shifted_basis_povm(m)) == 0.0

    def test_orthogonal_states_measured_in_own_basis(self):
        ensemble, povm = orthogonal_ensemble([0.25, 0.75])
        assert success_probability(ensemble, povm) == pytest.approx(1.0, abs=1e-15)

    def test_uniform_povm_gives_one_over_m(self):
        rng = np.random.default_rng(25)
        for m in (2, 3, 5):
            ensemble = random_ensemble(rng, 3, m)
            expected = float(np.sum(ensemble.priors)) / m  # trace linearity
            value = success_probability(ensemble, uniform_povm(3, m))
            assert value == pytest.approx(expected, abs=1e-12)

    def test_equals_operator_trace(self):
        rng = np.random.default_rng(26)
        for _ in range(20):
            ensemble = random_ensemble(rng, 3, 3)
            povm = random_povm(rng, 3, 3)
            trace = float(np.trace(lagrange_operator(ensemble, povm)).real)
            assert success_probability(ensemble, povm) == pytest.approx(trace, abs=1e-10)

    def test_unitary_invariance(self):
        rng = np.random.default_rng(27)
        for _ in range(10):
            ensemble = random_ensemble(rng, 4, 3)
            povm = random_povm(rng, 4, 3)
            unitary = random_unitary(rng, 4)
            before = success_probability(ensemble, povm)
            after = success_probability(
                conjugate_ensemble(ensemble, unitary), conjugate_povm(povm, unitary)
            )
            assert after == pytest.approx(before, abs=1e-8)

    def test_bounded(self):
        rng = np.random.default_rng(28)
        for _ in range(20):
            dim = int(rng.integers(2, 5))
            m = int(rng.integers(2, 5))
            value = success_probability(
                random_ensemble(rng, dim, m), random_povm(rng, dim, m)
            )
            assert 0.0 <= value <= 1.0 + 1e-9


class TestUniformPovm:
    def test_elements_are_scaled_identity(self):
        povm = uniform_povm(2, 3)
        assert povm.n_outcomes == 3
        for element in povm.elements:
            np.testing.assert_array_equal(element, np.eye(2) / 3.0)

    @pytest.mark.parametrize("m", [2, 3, 4])
    def test_sums_to_identity_exactly(self, m):
        povm = uniform_povm(3, m)
        np.testing.assert_array_equal(povm.element_sum(), np.eye(3))

    def test_rejects_nonpositive_counts(self):
        with pytest.raises(DimensionError):
            uniform_povm(2, 0)


class TestSquareRootMeasurement:
    def test_orthogonal_states_give_projective_measurement(self):
        ensemble, projective = orthogonal_ensemble([0.3, 0.7])
        srm = square_root_measurement(ensemble)
        for got, want in zip(srm.elements, projective.elements):
            np.testing.assert_allclose(got, want, atol=1e-12)

    def test_degenerate_state_folds_into_first_element(self):
        rho = np.diag([0.6, 0.4]).astype(complex)
        ensemble = Ensemble(dim=2, states=[rho, np.zeros((2, 2), dtype=complex)])
        srm = square_root_measurement(ensemble)
        np.testing.assert_allclose(srm.elements[0], np.eye(2), atol=1e-12)
        np.testing.assert_allclose(srm.elements[1], np.zeros((2, 2)), atol=1e-15)

    def test_completeness_exact(self):
        rng = np.random.default_rng(29)
        for _ in range(10):
            ensemble = random_ensemble(rng, 4, 3, rank=2)
            srm = square_root_measurement(ensemble)
            np.testing.assert_array_equal(srm.element_sum(), np.eye(4))
            assert validate_povm(srm).ok

    def test_trine_reaches_two_thirds_and_is_optimal(self):
        ensemble = trine_ensemble()
        srm = square_root_measurement(ensemble)
        assert success_probability(ensemble, srm) == pytest.approx(2.0 / 3.0, abs=1e-12)
        optimal, _ = check_optimal(ensemble, srm, tol=1e-10)
        assert optimal


class TestShiftedBasisFamily:
    def test_states_and_outcomes(self):
        ensemble = shifted_basis_ensemble(4)
        povm = shifted_basis_povm(4)
        assert ensemble.dim == 4 and povm.dim == 4
        assert validate_ensemble(ensemble).ok
        assert validate_povm(povm).ok
        np.testing.assert_allclose(ensemble.priors, np.full(4, 0.25), atol=1e-15)

    def test_minimum_size(self):
        with pytest.raises(DimensionError):
            shifted_basis_ensemble(1)
