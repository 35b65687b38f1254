"""Tests for the stationary-curve catalog: periods, reconstruction, search."""

import numpy as np
import pytest
from scipy.integrate import quad

from elastica.catalog import (
    OrbitParams,
    chord_vectors,
    energy_blowup_check,
    find_clamped_equilibria,
    find_navier_equilibria,
    kappa_extremes,
    partial_periods,
    period_L,
    reconstruct,
    write_catalog,
)
from elastica.energy import potential_F
from elastica.errors import InvalidInputError, OutOfDomainError


def trig_period_oracle(E, lam):
    """Period by an independent trig substitution.

    kappa = kappa_m + (kappa_M - kappa_m) sin^2 t makes both endpoint
    singularities analytic; different machinery than the production
    u^2 substitutions.
    """
    km, kM = kappa_extremes(E, lam)
    dk = kM - km

    def q_of(k):
        if min(abs(k - km), abs(kM - k)) < 1e-9 * max(1.0, dk):
            eps = 1e-6 * max(1.0, abs(k))
            k = k + (eps if abs(k - km) < abs(kM - k) else -eps)
        return (E - potential_F(k, lam)) / ((k - km) * (kM - k))

    val, _ = quad(lambda t: 4.0 / np.sqrt(q_of(km + dk * np.sin(t) ** 2)),
                  0.0, np.pi / 2, epsabs=1e-13, epsrel=1e-12, limit=300)
    return val


class TestKappaExtremes:
    def test_potential_attains_level(self):
        lam = 1.3
        for E in (-0.5, -1e-4, 1e-3, 2.0, 1e4):
            km, kM = kappa_extremes(E, lam)
            assert abs(potential_F(kM, lam) - E) < 1e-9 * max(1.0, abs(E))
            assert abs(potential_F(km, lam) - E) < 1e-9 * max(1.0, abs(E))

    def test_negative_levels_one_signed(self):
        km, kM = kappa_extremes(-0.1, 1.0)
        assert 0.0 < km < kM

    def test_positive_levels_symmetric(self):
        km, kM = kappa_extremes(0.5, 1.0)
        assert km == -kM

    def test_below_well_rejected(self):
        with pytest.raises(OutOfDomainError):
            kappa_extremes(-0.26, 1.0)


class TestPeriods:
    def test_against_trig_oracle(self):
        lam = 1.0
        for E in np.geomspace(1e-4, 1e4, 10):
            L = period_L(E, lam)
            assert abs(L - trig_period_oracle(E, lam)) < 1e-8 * L

    def test_negative_side_against_oracle(self):
        lam = 1.0
        for E in (-0.2, -0.01, -1e-4):
            L = period_L(E, lam)
            assert abs(L - trig_period_oracle(E, lam)) < 1e-8 * L

    def test_split_sums_to_period(self):
        lam = 1.0
        for E in np.geomspace(1e-6, 1e6, 50):
            l1, l2 = partial_periods(E, lam, 0.0)
            assert abs(period_L(E, lam) - (l1 + l2)) < 1e-9

    def test_separatrix_rejected(self):
        with pytest.raises(OutOfDomainError):
            period_L(0.0, 1.0)

    def test_alpha_outside_orbit_rejected(self):
        with pytest.raises(OutOfDomainError):
            partial_periods(-0.1, 1.0, 0.0)  # orbit has kappa > 0

    def test_diverges_toward_separatrix(self):
        lam = 1.0
        pos = [period_L(E, lam) for E in np.geomspace(1e-6, 1e-1, 10)]
        neg = [period_L(E, lam) for E in -np.geomspace(1e-6, 0.2, 10)]
        assert all(np.diff(pos) < 0)
        assert all(np.diff(neg) < 0)

    def test_partial_l2_decreasing(self):
        l2s = [partial_periods(E, 1.0, 0.5)[1] for E in (1.0, 1e2, 1e4)]
        assert all(np.diff(l2s) < 0)


class TestOrbitParams:
    def test_rejects_kappa0_outside_range(self):
        with pytest.raises(InvalidInputError):
            OrbitParams(1.0, -0.1, 0.0, 1)  # orbit lives at kappa > 0

    def test_rejects_bad_sign(self):
        with pytest.raises(InvalidInputError):
            OrbitParams(1.0, 1.0, 0.0, 2)

    def test_kappa_s0_on_first_integral(self):
        orb = OrbitParams(1.0, 1.0, 0.3, -1)
        assert orb.kappa_s0 < 0
        assert np.isclose(orb.kappa_s0**2 + potential_F(0.3, 1.0), 1.0)


class TestReconstruct:
    def test_conserves_first_integral(self):
        from elastica.curve import curvature

        lam, E = 1.0, 1.0
        orb = OrbitParams(lam, E, 0.0, 1)
        L = period_L(E, lam)
        c = reconstruct(orb, L, 2048)
        k = curvature(c)
        # discrete curvature of the reconstructed polyline matches the
        # orbit's curvature range
        km, kM = kappa_extremes(E, lam)
        assert np.max(k) < kM + 1e-3
        assert np.min(k) > km - 1e-3

    def test_unit_speed_nodes(self):
        orb = OrbitParams(1.0, 1.0, 0.0, 1)
        c = reconstruct(orb, 4.0, 512)
        seg = np.linalg.norm(np.diff(c.points, axis=0), axis=1)
        assert np.max(np.abs(seg - 4.0 / 512)) < 1e-6

    def test_rejects_bad_length(self):
        with pytest.raises(InvalidInputError):
            reconstruct(OrbitParams(1.0, 1.0, 0.0, 1), -1.0, 128)


class TestChordVectors:
    def test_l0_partial_zero(self):
        d_full, d_part = chord_vectors(1.0, 1.0, 0.0, "L0")
        assert np.array_equal(d_part, np.zeros(2))
        assert np.linalg.norm(d_full) > 0

    def test_rejects_unknown_segment(self):
        with pytest.raises(InvalidInputError):
            chord_vectors(1.0, 1.0, 0.0, "L3")

    def test_partials_compose(self):
        # L1 then L2 chords from matched starts add up to the full
        # period chord by the orbit's time-reversal structure
        E, lam = 1.0, 1.0
        d_full, d1 = chord_vectors(E, lam, 0.0, "L1")
        assert np.linalg.norm(d1) <= np.linalg.norm(d_full) + 1e-9


class TestNavierSearch:
    def test_reference_catalog(self):
        recs = find_navier_equilibria(1.0, 0.0, 1.0, 30.0)
        assert len(recs) == 5
        # straight segment present with its exact energy lam^2 R
        assert any(r.E == 0.0 and np.isclose(r.energy, 1.0) for r in recs)
        for r in recs:
            assert r.stationary_residual < 1e-6
            assert r.bc_residual < 1e-8
            assert r.energy <= 30.0 + 1e-9

    def test_endpoints_canonical(self):
        recs = find_navier_equilibria(1.0, 0.0, 1.0, 30.0)
        for r in recs:
            assert np.allclose(r.curve.points[0], [0.0, 0.0], atol=1e-12)
            assert np.allclose(r.curve.points[-1], [1.0, 0.0], atol=1e-9)

    def test_budget_below_segment_energy(self):
        recs = find_navier_equilibria(1.0, 0.0, 1.0, 0.5)
        assert recs == []

    def test_rejects_bad_inputs(self):
        with pytest.raises(InvalidInputError):
            find_navier_equilibria(0.0, 0.0, 1.0, 10.0)
        with pytest.raises(InvalidInputError):
            find_navier_equilibria(1.0, 0.0, -1.0, 10.0)


class TestClampedSearch:
    def test_reproduces_known_equilibrium(self):
        recs = find_clamped_equilibria(1.0, (0.0, 1.0), (0.0, 1.0), 0.5,
                                       100.0)
        assert len(recs) >= 1
        energies = [r.energy for r in recs]
        assert np.min(energies) < 44.0  # the bowed-arc minimizer
        for r in recs:
            assert r.stationary_residual < 1e-6
            assert r.bc_residual < 1e-8

    def test_rejects_nonunit_tangents(self):
        with pytest.raises(InvalidInputError):
            find_clamped_equilibria(1.0, (0.0, 2.0), (0.0, 1.0), 0.5, 10.0)


class TestEnergyBlowup:
    def test_bound_and_growth(self):
        rep = energy_blowup_check(1.0, [1e2, 1e4, 1e6])
        assert rep["bound_holds"]
        assert rep["strictly_increasing"]

    def test_rejects_unsorted(self):
        with pytest.raises(InvalidInputError):
            energy_blowup_check(1.0, [1e4, 1e2])


class TestWriteCatalog:
    def test_round_trip(self, tmp_path):
        from elastica.cli import read_catalog

        recs = find_navier_equilibria(1.0, 0.0, 1.0, 5.0)
        write_catalog(recs, tmp_path)
        back = read_catalog(str(tmp_path / "catalog.json"))
        assert len(back) == len(recs)
        for a, b in zip(recs, back):
            assert a.E == b.E
            assert np.array_equal(a.curve.points, b.curve.points)
