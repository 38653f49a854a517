#!/usr/bin/env python3
"""
Test suite for eigensolvers, coalescence measures, branch tracking and EP search
"""

import logging
from unittest.mock import patch

import numpy as np
import pytest

from betadyne.exceptions import ConfigError, DimensionError, SpectralError
from betadyne.model import UnravelingSpec, nhh_beta
from betadyne.quantum_core import random_hermitian, random_operator
from betadyne.scenarios import (
    KERR_REFERENCE_BETA,
    DrivenQubitParams,
    GainLossQubitParams,
    KerrParams,
    build_driven_qubit,
    build_gain_loss_qubit,
    build_kerr,
    driven_qubit_ep_beta,
    gain_loss_ep_candidates,
)
from betadyne.spectral import (
    characteristic_coefficients,
    coalescence,
    cubic_discriminant,
    cubic_ep_condition,
    eig2_closed,
    eig3_closed,
    eigendecompose,
    find_ep,
    overlap,
    scan_coalescence,
    trace_ep_locus,
    track_branches,
)


def spectrum_distance(a, b):
    distances = np.abs(np.asarray(a)[:, None] - np.asarray(b)[None, :])
    return max(distances.min(axis=1).max(), distances.min(axis=0).max())


def driven_qubit_beta_family(omega, gamma=1.0):
    model = build_driven_qubit(DrivenQubitParams(omega=omega, gamma_minus=gamma))
    return lambda beta: nhh_beta(model, UnravelingSpec(betas=[beta]))


def driven_qubit_omega_family(beta, gamma=1.0):
    def family(omega):
        model = build_driven_qubit(DrivenQubitParams(omega=omega, gamma_minus=gamma))
        return nhh_beta(model, UnravelingSpec(betas=[beta]))

    return family


def kerr_family_alpha(beta):
    def family(alpha):
        model = build_kerr(KerrParams(kerr=2.0, gamma=1.0, drive=alpha))
        return nhh_beta(model, UnravelingSpec(betas=[beta]))

    return family


def kerr_family_beta(alpha):
    model = build_kerr(KerrParams(kerr=2.0, gamma=1.0, drive=alpha))
    return lambda beta: nhh_beta(model, UnravelingSpec(betas=[beta]))


@pytest.mark.unit
class TestEigendecompose:
    """General eigensolver"""

    def setup_method(self):
        self.rng = np.random.default_rng(31)

    def test_identity(self):
        np.testing.assert_allclose(eigendecompose(np.eye(2)).eigenvalues, [1, 1])

    def test_jordan_block(self):
        system = eigendecompose([[0, 1], [0, 0]])
        np.testing.assert_allclose(system.eigenvalues, [0, 0], atol=1e-12)
        assert overlap(system.vectors[:, 0], system.vectors[:, 1]) == pytest.approx(1.0, abs=1e-6)

    def test_gain_loss_nhh(self):
        H = 0.5 * np.diag([1 - 1j, -1 - 0.5j])
        np.testing.assert_allclose(eigendecompose(H).eigenvalues, [(1 - 1j) / 2, (-1 - 0.5j) / 2])

    def test_sort_order(self):
        system = eigendecompose(np.diag([1j, 2.0, 1.0, -1j]))
        np.testing.assert_allclose(system.eigenvalues, [2.0, 1.0, 1j, -1j])

    def test_residuals_and_normalization(self):
        for dim in (2, 3, 5):
            A = random_operator(dim, self.rng)
            system = eigendecompose(A)
            np.testing.assert_allclose(np.linalg.norm(system.vectors, axis=0), 1.0, atol=1e-10)
            assert system.residuals().max() <= 1e-8 * np.linalg.norm(A, 2)

    def test_non_finite_entries(self):
        with pytest.raises(SpectralError):
            eigendecompose([[np.inf, 0], [0, 1]])

    def test_similarity_invariance(self):
        for _ in range(20):
            A = random_operator(3, self.rng)
            U, _, Vh = np.linalg.svd(random_operator(3, self.rng))
            S = U @ np.diag([1.0, 3.0, 10.0]) @ Vh
            similar = np.linalg.inv(S) @ A @ S
            assert spectrum_distance(eigendecompose(similar).eigenvalues, eigendecompose(A).eigenvalues) <= 1e-7

    def test_shift_covariance(self):
        A = random_operator(3, self.rng)
        shift = -0.3j
        base, shifted = eigendecompose(A), eigendecompose(A + shift * np.eye(3))
        assert spectrum_distance(shifted.eigenvalues, base.eigenvalues + shift) <= 1e-12
        assert coalescence(A).max_overlap == pytest.approx(coalescence(A + shift * np.eye(3)).max_overlap, abs=1e-9)

    def test_hermitian_eigenvectors_are_orthogonal(self):
        for _ in range(10):
            assert coalescence(random_hermitian(4, self.rng)).max_overlap <= 1e-10


@pytest.mark.unit
class TestClosedForms:
    """Quadratic and Cardano oracles"""

    def setup_method(self):
        self.rng = np.random.default_rng(8)

    def test_eig2_swap_matrix(self):
        system = eig2_closed([[0, 1], [1, 0]])
        np.testing.assert_allclose(system.eigenvalues, [1, -1])
        assert overlap(system.vectors[:, 0], system.vectors[:, 1]) == pytest.approx(0.0, abs=1e-12)

    def test_eig2_exceptional_point(self):
        # a~ = 2i sqrt(bc) with b = c = 1
        system = eig2_closed([[2j, 1], [1, 0]])
        np.testing.assert_allclose(system.eigenvalues, [1j, 1j], atol=1e-12)
        assert overlap(system.vectors[:, 0], system.vectors[:, 1]) == pytest.approx(1.0, abs=1e-12)

    def test_eig2_diagonal_fallback(self):
        system = eig2_closed(np.diag([1.0, 2.0]))
        np.testing.assert_allclose(system.eigenvalues, [2.0, 1.0])
        assert system.residuals().max() <= 1e-14

    def test_eig2_driven_qubit(self):
        H = 0.5 * np.array([[-1j, 1], [1, 0]])
        expected = [(-1j + np.sqrt(3)) / 4, (-1j - np.sqrt(3)) / 4]
        np.testing.assert_allclose(eig2_closed(H).eigenvalues, expected, atol=1e-14)

    def test_eig2_matches_general_solver(self):
        for _ in range(1000):
            A = random_operator(2, self.rng)
            assert spectrum_distance(eig2_closed(A).eigenvalues, eigendecompose(A).eigenvalues) <= 1e-9

    def test_eig3_diagonal(self):
        np.testing.assert_allclose(eig3_closed(np.diag([1.0, 2.0, 3.0])).eigenvalues, [3, 2, 1], atol=1e-12)

    def test_eig3_kerr_diagonal_limit(self):
        H = nhh_beta(build_kerr(KerrParams(kerr=2.0, gamma=1.0, drive=0.0)), UnravelingSpec(betas=[0.0]))
        np.testing.assert_allclose(eig3_closed(H).eigenvalues, [4 - 1j, 0, -0.5j], atol=1e-12)

    def test_eig3_matches_general_solver(self):
        for _ in range(1000):
            A = random_operator(3, self.rng)
            system = eig3_closed(A)
            assert spectrum_distance(system.eigenvalues, eigendecompose(A).eigenvalues) <= 1e-9
            assert system.residuals().max() <= 1e-8 * np.linalg.norm(A, 2)

    def test_wrong_dimension(self):
        with pytest.raises(DimensionError):
            eig2_closed(np.eye(3))
        with pytest.raises(DimensionError):
            eig3_closed(np.eye(2))


@pytest.mark.unit
class TestCubicDiscriminant:
    """Characteristic cubic and its discriminant"""

    def setup_method(self):
        self.rng = np.random.default_rng(12)

    def test_double_root(self):
        assert cubic_discriminant(-4, 5, -2) == 0

    def test_distinct_roots(self):
        assert cubic_discriminant(-6, 11, -6) == pytest.approx(4.0)

    def test_coefficients(self):
        a, b, c = characteristic_coefficients(np.diag([1.0, 2.0, 3.0]))
        assert (a, b, c) == (pytest.approx(-6), pytest.approx(11), pytest.approx(-6))

    def test_constructed_double_root_coalesces(self):
        for _ in range(20):
            P = random_operator(3, self.rng)
            r1, r2 = complex(*self.rng.standard_normal(2)), complex(*self.rng.standard_normal(2))
            jordan = np.array([[r1, 1, 0], [0, r1, 0], [0, 0, r2]])
            A = P @ jordan @ np.linalg.inv(P)
            disc = cubic_discriminant(*characteristic_coefficients(A))
            scale = max(1.0, np.abs(np.linalg.eigvals(A)).max()) ** 6
            assert abs(disc) <= 1e-8 * scale
            assert coalescence(A).max_overlap >= 1 - 1e-4

    def test_random_matrices_do_not_coalesce(self):
        for _ in range(1000):
            A = random_operator(3, self.rng)
            disc = abs(cubic_discriminant(*characteristic_coefficients(A)))
            gap = coalescence(A).min_gap
            assert (disc <= 1e-10) == (gap <= 1e-6 * max(1.0, np.abs(np.linalg.eigvals(A)).max()))

    def test_condition_on_family(self):
        family = lambda x: np.diag([1.0, 1.0 + x, 2.0])
        assert cubic_ep_condition(family, 0.0) == pytest.approx(0.0, abs=1e-12)
        assert abs(cubic_ep_condition(family, -1.0)) == pytest.approx(4.0)


@pytest.mark.unit
class TestCoalescence:
    """Overlaps and the coalescence measure"""

    def test_overlap_bounds(self):
        assert overlap([1, 0], [0, 1]) == 0.0
        assert overlap([1, 1j], [1, 1j]) == pytest.approx(1.0)
        assert overlap([2, 0], [1j, 0]) == pytest.approx(1.0)

    def test_overlap_zero_vector(self):
        with pytest.raises(DimensionError):
            overlap([0, 0], [1, 0])

    def test_jordan_block_measure(self):
        assert coalescence([[0, 1], [0, 0]]).measure <= 1e-6

    def test_diagonal_measure(self):
        report = coalescence(np.diag([1.0, 2.0]))
        assert report.min_gap == pytest.approx(1.0)
        assert report.max_overlap == 0.0
        assert report.measure == pytest.approx(1.5)

    def test_diabolic_point_is_not_exceptional(self):
        report = coalescence(np.eye(2))
        assert report.min_gap == 0.0
        assert report.measure >= 0.99

    def test_gain_loss_without_displacement_never_coalesces(self):
        for gamma_plus in np.linspace(0.0, 2.0, 41):
            model = build_gain_loss_qubit(GainLossQubitParams(omega=1.0, gamma_minus=1.0, gamma_plus=gamma_plus))
            report = coalescence(nhh_beta(model, UnravelingSpec(betas=[0, 0])))
            assert report.max_overlap == 0.0
            assert report.measure >= 0.05

    def test_kerr_without_displacement_never_coalesces(self):
        family = kerr_family_alpha(0.0)
        for report in scan_coalescence(family, np.linspace(0.0, 3.0, 61)):
            assert report.measure >= 0.05

    def test_scan_order_independent_of_workers(self):
        family = driven_qubit_omega_family(0.0)
        points = np.linspace(0.1, 1.0, 10)
        serial = [report.measure for report in scan_coalescence(family, points)]
        threaded = [report.measure for report in scan_coalescence(family, points, workers=4)]
        assert serial == threaded


@pytest.mark.unit
class TestBranchTracking:
    """Continuity of eigenvalue branches along sweeps"""

    def test_constant_sweep(self):
        system = eigendecompose(np.diag([1.0, 2.0]))
        branches = track_branches([system] * 5)
        np.testing.assert_allclose(branches.values, np.tile([2.0, 1.0], (5, 1)))

    def test_crossing_lines_follow_slopes(self):
        ts = np.linspace(0.0, 1.0, 21)
        branches = track_branches([eigendecompose(np.diag([t, 1 - t])) for t in ts])
        for b in range(2):
            slope = np.diff(branches.values[:, b].real)
            np.testing.assert_allclose(slope, slope[0], atol=1e-12)
        assert branches.values[0, 0] == pytest.approx(1.0)
        assert branches.values[-1, 0] == pytest.approx(0.0)

    def test_driven_qubit_split_changes_at_ep(self):
        omegas = np.linspace(0.1, 1.0, 91)
        family = driven_qubit_omega_family(0.0)
        branches = track_branches([eigendecompose(family(w)) for w in omegas])
        below = np.argmin(np.abs(omegas - 0.3))
        above = np.argmin(np.abs(omegas - 0.8))
        # imaginary split below the EP, real split above
        np.testing.assert_allclose(branches.values[below].real, 0.0, atol=1e-12)
        assert abs(branches.values[below, 0].imag - branches.values[below, 1].imag) > 0.1
        np.testing.assert_allclose(branches.values[above].imag, -0.25, atol=1e-12)
        assert abs(branches.values[above, 0].real - branches.values[above, 1].real) > 0.1

    def test_dimension_checks(self):
        with pytest.raises(DimensionError):
            track_branches([eigendecompose(np.eye(2))])
        with pytest.raises(DimensionError):
            track_branches([eigendecompose(np.eye(2)), eigendecompose(np.eye(3))])

    def test_larger_dimension_uses_assignment(self):
        ts = np.linspace(0.0, 1.0, 11)
        branches = track_branches([eigendecompose(np.diag([t, 1 - t, 5.0, 6.0])) for t in ts])
        np.testing.assert_allclose(branches.values[:, 2].real, 1 - ts, atol=1e-12)
        np.testing.assert_allclose(branches.values[:, 3].real, ts, atol=1e-12)


@pytest.mark.integration
class TestExceptionalPointSearch:
    """Locating EPs of the scenario families"""

    def test_driven_qubit_over_omega(self):
        result = find_ep(driven_qubit_omega_family(0.0), 0.4)
        assert result.converged
        assert result.location == pytest.approx(0.5, abs=1e-6)

    def test_driven_qubit_shifted_ep(self):
        result = find_ep(driven_qubit_omega_family(5j / 24), 0.7)
        assert result.converged
        assert result.location == pytest.approx(0.75, abs=1e-4)

    @pytest.mark.parametrize("omega", [0.3, 0.5, 0.75, 1.0, 1.5])
    def test_driven_qubit_displacement(self, omega):
        expected = driven_qubit_ep_beta(DrivenQubitParams(omega=omega, gamma_minus=1.0))
        result = find_ep(driven_qubit_beta_family(omega), complex(0.05, expected.imag + 0.1))
        assert result.converged
        assert abs(result.location - expected) <= 1e-6

    def test_gain_loss_displacement(self):
        params = GainLossQubitParams(omega=1.0, gamma_minus=1.0, gamma_plus=0.5)
        model = build_gain_loss_qubit(params)
        family = lambda beta: nhh_beta(model, UnravelingSpec.uniform(beta, 2))
        result = find_ep(family, 0.6 + 0.3j)
        assert result.converged
        assert result.report.measure <= 1e-6
        assert min(abs(result.location - c) for c in gain_loss_ep_candidates(params)) <= 1e-4
        assert result.report.max_overlap >= 0.999

    def test_gain_loss_over_rate_ratio(self):
        # fixed beta = (2 + i) / (4 sqrt 2) puts the EP at gamma_+ = 2 gamma_-
        beta = (2 + 1j) / (4 * np.sqrt(2))

        def family(gamma_plus):
            model = build_gain_loss_qubit(GainLossQubitParams(omega=1.0, gamma_minus=1.0, gamma_plus=gamma_plus))
            return nhh_beta(model, UnravelingSpec.uniform(beta, 2))

        result = find_ep(family, 1.8)
        assert result.converged
        assert result.location == pytest.approx(2.0, abs=1e-5)

    def test_multistart_box(self):
        result = find_ep(driven_qubit_beta_family(1.0), 1.0 + 1.0j, box=((-1.0, 1.0), (-1.0, 1.0)), points=5)
        assert result.converged
        assert abs(result.location - 0.375j) <= 1e-5
        assert result.evaluations > result.iterations

    def test_unconverged_search_reports_best(self):
        model = build_gain_loss_qubit(GainLossQubitParams())
        family = lambda beta: nhh_beta(model, UnravelingSpec.uniform(0.0, 2))
        result = find_ep(family, 0.1j)
        assert not result.converged
        assert result.report.measure > 0.5

    def test_invalid_tolerance(self):
        with pytest.raises(ConfigError):
            find_ep(driven_qubit_omega_family(0.0), 0.4, tol=0.0)

    @pytest.mark.slow
    def test_kerr_displacement_induces_ep(self):
        # the real-drive sweep gets close to the EP; the figure's beta is only quoted to four digits
        family = kerr_family_alpha(KERR_REFERENCE_BETA)
        alphas = np.linspace(0.0, 0.3, 301)
        reports = scan_coalescence(family, alphas)
        best = int(np.argmin([report.measure for report in reports]))
        refined = find_ep(family, float(alphas[best]), tol=1e-3)
        assert refined.report.measure <= 1e-2
        assert refined.location == pytest.approx(0.1, abs=0.03)

        # at that drive the displacement can be tuned onto the EP
        at_alpha = find_ep(kerr_family_beta(refined.location), KERR_REFERENCE_BETA)
        assert at_alpha.converged
        assert abs(at_alpha.location - KERR_REFERENCE_BETA) <= 1e-2
        sweep_max = max(abs(cubic_ep_condition(family, a)) for a in np.linspace(0.0, 3.0, 31))
        assert abs(cubic_ep_condition(kerr_family_beta(refined.location), at_alpha.location)) <= 1e-3 * sweep_max


@pytest.mark.integration
class TestEPLocus:
    """Continuation of the EP displacement along a second parameter"""

    def test_driven_qubit_locus_matches_closed_form(self):
        omegas = np.linspace(0.75, 1.25, 6)
        locus = trace_ep_locus(lambda omega, beta: driven_qubit_beta_family(omega)(beta), omegas, 0.2j)
        assert [point.param for point in locus] == list(omegas)
        for point in locus:
            expected = driven_qubit_ep_beta(DrivenQubitParams(omega=point.param, gamma_minus=1.0))
            assert point.result.converged
            assert abs(point.beta - expected) <= 1e-5

    def test_unconverged_point_keeps_previous_start(self, caplog):
        def family2(omega, beta):
            if omega < 0:
                return np.array([[0.0, 1.0], [1.0, 0.0]], dtype=np.complex128)
            return driven_qubit_beta_family(omega)(beta)

        with patch("betadyne.spectral.find_ep", wraps=find_ep) as search:
            with caplog.at_level(logging.WARNING, logger="betadyne.spectral"):
                locus = trace_ep_locus(family2, [0.75, -1.0, 1.0], 0.2j)
        starts = [call.args[1] for call in search.call_args_list]
        assert starts[0] == 0.2j
        assert starts[1] == starts[2] == locus[0].beta
        assert [point.result.converged for point in locus] == [True, False, True]
        assert abs(locus[2].beta - 0.375j) <= 1e-5
        assert "1 of 3 points did not converge" in caplog.text

    @pytest.mark.slow
    def test_kerr_locus_over_imaginary_drive(self):
        # rotating the drive phase rotates the EP displacement by the same phase
        start = find_ep(kerr_family_beta(0.1j), 1j * KERR_REFERENCE_BETA, box=((-1.0, 1.0), (-1.0, 1.0)), points=9)
        assert start.converged

        drives = 1j * np.linspace(0.1, 0.2, 11)
        family2 = lambda alpha, beta: kerr_family_beta(alpha)(beta)
        locus = trace_ep_locus(family2, drives, start.location)
        assert abs(locus[0].beta - start.location) <= 1e-4
        betas = np.array([point.beta for point in locus])
        assert np.all(np.abs(np.diff(betas)) <= 0.1)
        for point in locus:
            assert point.result.converged
            assert point.result.report.measure <= 1e-6
            real_drive = kerr_family_beta(point.param.imag)
            assert coalescence(real_drive(-1j * point.beta)).measure <= 1e-5
