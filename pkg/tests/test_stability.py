"""Jacobian algebra, surge boundary, divergence indicator, cycle detection."""

import numpy as np
import pytest

from surgekit.compressor import (DEFAULT_MAP, GreitzerParams, PlantState,
                                 equilibrium_from_throttle,
                                 throttle_from_flow)
from surgekit.errors import AnalysisError, DomainError
from surgekit.odesim import Trajectory, simulate_greitzer
from surgekit.stability import (BOUNDARY, STABLE_FOCUS, UNSTABLE_FOCUS,
                                bendixson_indicator, char_poly,
                                detect_limit_cycle, discriminant,
                                eig_real_part, jacobian_at_equilibrium,
                                stability_scan, surge_boundary)

M = DEFAULT_MAP
GRID = np.linspace(0.01, 0.79, 1000)


class TestJacobian:
    def test_at_map_peak(self):
        jac = jacobian_at_equilibrium(M, 0.5)
        np.testing.assert_allclose(
            jac, [[0.0, -0.8], [1.25, -0.4389044943820225]], atol=1e-12)

    def test_upper_left_values(self):
        assert jacobian_at_equilibrium(M, 0.25)[0, 0] == pytest.approx(
            0.864, abs=1e-12)
        jac = jacobian_at_equilibrium(M, 0.4)
        assert jac[0, 0] == pytest.approx(0.55296, abs=1e-12)
        assert jac[1, 1] == pytest.approx(-0.25 / 0.67456, abs=1e-12)

    def test_domain_check(self):
        for phi in (0.0, 0.8, -0.2, 1.0):
            with pytest.raises(DomainError):
                jacobian_at_equilibrium(M, phi)


class TestCharPoly:
    def test_values(self):
        b, c = char_poly(M, 0.5)
        assert b == pytest.approx(0.4389044943820225, abs=1e-12)
        assert c == pytest.approx(1.0, abs=1e-12)
        b4, _ = char_poly(M, 0.4)
        assert b4 == pytest.approx(-0.18234804554079687, abs=1e-12)

    def test_consistent_with_jacobian(self):
        for phi in GRID[::25]:
            jac = jacobian_at_equilibrium(M, float(phi))
            b, c = char_poly(M, float(phi))
            assert b == pytest.approx(-np.trace(jac), abs=1e-12)
            assert c == pytest.approx(np.linalg.det(jac), abs=1e-12)

    def test_roots_match_eigenvalues(self):
        # cross-validation of two code paths
        for phi in GRID[::10]:
            jac = jacobian_at_equilibrium(M, float(phi))
            b, c = char_poly(M, float(phi))
            eig = np.sort_complex(np.linalg.eigvals(jac))
            roots = np.sort_complex(np.roots([1.0, b, c]))
            np.testing.assert_allclose(eig, roots, atol=1e-10)


class TestDiscriminant:
    def test_value_at_peak(self):
        assert discriminant(M, 0.5) == pytest.approx(-3.8073628448112613,
                                                     abs=1e-9)

    def test_negative_throughout_working_range(self):
        assert all(discriminant(M, float(p)) < 0.0 for p in GRID)


class TestRealPart:
    def test_values(self):
        assert eig_real_part(M, 0.5) == pytest.approx(-0.21945224719101125,
                                                      abs=1e-12)
        assert eig_real_part(M, 0.4) == pytest.approx(0.09117402277039843,
                                                      abs=1e-12)
        assert eig_real_part(M, 0.6) < 0.0

    def test_single_sign_change(self):
        vals = np.array([eig_real_part(M, float(p))
                         for p in np.linspace(0.1, 0.79, 1000)])
        flips = np.sum(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)
        assert flips == 1

    def test_matches_numeric_eigenvalues(self):
        for phi in GRID[::50]:
            eig = np.linalg.eigvals(jacobian_at_equilibrium(M, float(phi)))
            assert eig_real_part(M, float(phi)) == pytest.approx(
                eig.real.mean(), abs=1e-12)


class TestSurgeBoundary:
    def test_location(self):
        b = surge_boundary(M)
        assert 0.42 <= b <= 0.44
        assert b == pytest.approx(0.43, abs=0.01)
        assert b == pytest.approx(0.434977715135924, abs=1e-9)

    def test_brackets_the_root(self):
        b = surge_boundary(M)
        assert eig_real_part(M, b - 0.01) > 0.0
        assert eig_real_part(M, b + 0.01) < 0.0
        assert abs(eig_real_part(M, b)) <= 1e-10

    def test_no_sign_change_raises(self):
        with pytest.raises(AnalysisError):
            surge_boundary(M, lo=0.5, hi=0.7)


class TestBendixson:
    def test_values(self):
        assert bendixson_indicator(M, 0.5) == pytest.approx(
            -0.4389044943820225, abs=1e-12)
        assert bendixson_indicator(M, 0.4) == pytest.approx(
            0.18234804554079687, abs=1e-12)

    def test_twice_the_real_part_everywhere(self):
        for phi in GRID:
            assert abs(bendixson_indicator(M, float(phi))
                       - 2.0 * eig_real_part(M, float(phi))) <= 1e-12

    def test_negative_in_stable_zone(self):
        b = surge_boundary(M)
        for phi in np.linspace(b + 1e-3, 0.79, 200):
            assert bendixson_indicator(M, float(phi)) < 0.0

    def test_sign_change_matches_boundary(self):
        b = surge_boundary(M)
        grid = np.arange(0.1, 0.79, 1e-4)
        vals = np.array([bendixson_indicator(M, float(p)) for p in grid])
        i = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]
        assert len(i) == 1
        assert abs(grid[i[0]] - b) <= 1e-3


class TestStabilityScan:
    def test_grid_spacing(self):
        rows = stability_scan(M, 0.3, 0.5, 3)
        assert [r.phi for r in rows] == pytest.approx([0.3, 0.4, 0.5])

    def test_stable_zone_classification(self):
        rows = stability_scan(M, 0.45, 0.79, 50)
        assert all(r.classification == STABLE_FOCUS for r in rows)

    def test_unstable_zone_classification(self):
        rows = stability_scan(M, 0.1, 0.42, 50)
        assert all(r.classification == UNSTABLE_FOCUS for r in rows)

    def test_classification_consistency(self):
        for r in stability_scan(M, 0.2, 0.7, 101):
            if r.real_part < -1e-9:
                assert r.classification == STABLE_FOCUS
            elif r.real_part > 1e-9:
                assert r.classification == UNSTABLE_FOCUS
            else:
                assert r.classification == BOUNDARY
            assert r.discriminant < 0.0

    def test_range_validation(self):
        with pytest.raises(DomainError):
            stability_scan(M, 0.5, 0.3, 10)
        with pytest.raises(DomainError):
            stability_scan(M, 0.1, 0.5, 1)


def _cycle_run(flow, dt=1e-2, t_end=100.0):
    g = throttle_from_flow(M, flow)
    eq = equilibrium_from_throttle(M, g)
    return simulate_greitzer(PlantState(eq.phi + 0.01, eq.psi + 0.01),
                             GreitzerParams(g=g), M, dt=dt, t_end=t_end)


class TestLimitCycleDetection:
    def test_detected_in_unstable_zone(self):
        rep = detect_limit_cycle(_cycle_run(0.4))
        assert rep.detected
        assert rep.amplitude_phi > 0.0
        assert rep.amplitude_psi > 0.0
        assert rep.period > 0.0
        assert rep.cycles_analyzed >= 3

    def test_peak_convergence_within_tolerance(self):
        rep = detect_limit_cycle(_cycle_run(0.4), tol=0.01)
        assert rep.detected

    def test_not_detected_in_stable_zone(self):
        rep = detect_limit_cycle(_cycle_run(0.55))
        assert not rep.detected

    def test_constant_trajectory(self):
        samples = np.column_stack([np.arange(200) * 0.1,
                                   np.full(200, 0.5), np.full(200, 0.7)])
        traj = Trajectory(0.1, ["t", "phi", "psi"], samples)
        assert not detect_limit_cycle(traj).detected

    def test_settle_fraction_validation(self):
        traj = _cycle_run(0.4, t_end=20.0)
        with pytest.raises(DomainError):
            detect_limit_cycle(traj, settle_fraction=1.0)

    def test_amplitude_robust_to_step_halving(self):
        a = detect_limit_cycle(_cycle_run(0.4, dt=1e-2))
        b = detect_limit_cycle(_cycle_run(0.4, dt=5e-3))
        assert a.detected and b.detected
        assert abs(a.amplitude_phi - b.amplitude_phi) <= 0.02 * a.amplitude_phi
