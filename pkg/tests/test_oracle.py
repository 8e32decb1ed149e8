import math

import numpy as np
import pytest

from qrefrig.errors import ConvergenceError, TruncationError
from qrefrig.media import MediumParams, Spectrum
from qrefrig.oracle import (
    BasisConfig,
    ORDER_CHECK_QUANTITIES,
    ao_exact_spectrum,
    ao_hamiltonian,
    classical_energy_quadrature,
    classical_partition_quadrature,
    gibbs_sum_exact,
    order_check,
    position_matrix,
    thermal_exact,
)
from qrefrig.media import ao_partition_first_order, classical_entropy_energy


class TestPositionMatrix:
    def test_two_by_two(self):
        x = position_matrix(1.0, 2)
        assert x[0, 1] == pytest.approx(1 / math.sqrt(2), rel=1e-15)
        assert np.allclose(x, x.T)

    def test_omega_scaling(self):
        x = position_matrix(2.0, 3)
        assert x[0, 1] == pytest.approx(0.5, rel=1e-15)
        assert x[1, 2] == pytest.approx(math.sqrt(2) / 2, rel=1e-15)

    def test_fourth_power_bandwidth(self):
        x4 = np.linalg.matrix_power(position_matrix(1.0, 12), 4)
        for i in range(12):
            for j in range(12):
                if abs(i - j) > 4:
                    assert x4[i, j] == 0.0
        assert x4[0, 4] != 0.0

    def test_rejects_small_matrix(self):
        with pytest.raises(ValueError):
            position_matrix(1.0, 1)


class TestExactSpectrum:
    def test_harmonic_levels_exact(self):
        spec = ao_exact_spectrum(MediumParams(omega=1.0))
        k = np.arange(len(spec.levels))
        assert np.max(np.abs(spec.levels - (k + 0.5))) < 1e-10

    def test_ground_state_mildly_anharmonic(self):
        spec = ao_exact_spectrum(MediumParams(omega=1.0, lam=0.1))
        assert spec.levels[0] == pytest.approx(0.559146327184, abs=1e-9)
        assert spec.levels[0] < 0.575  # first-order value sits above

    def test_ground_state_stable_under_doubling(self):
        e128 = np.linalg.eigvalsh(ao_hamiltonian(MediumParams(1.0, 0.1), 128))[0]
        e256 = np.linalg.eigvalsh(ao_hamiltonian(MediumParams(1.0, 0.1), 256))[0]
        assert abs(e128 - e256) < 1e-6

    def test_deep_perturbative_ground_state(self):
        p = MediumParams(omega=5.0, lam=0.6, omega0=0.6 ** (1 / 3))
        e0 = ao_exact_spectrum(p).levels[0]
        assert e0 < 2.518
        assert e0 == pytest.approx(2.518, abs=3e-4)

    @pytest.mark.parametrize("lam", [0.01, 0.1, 0.5])
    def test_truncation_variational_from_above(self, lam):
        p = MediumParams(omega=1.0, lam=lam)
        tol = BasisConfig().level_tol
        e_n = np.linalg.eigvalsh(ao_hamiltonian(p, 128))[:64]
        e_2n = np.linalg.eigvalsh(ao_hamiltonian(p, 256))[:64]
        assert np.all(e_n >= e_2n - tol)

    @pytest.mark.parametrize("lam", [0.01, 0.05, 0.1, 0.25, 0.5])
    def test_exact_ground_below_first_order(self, lam):
        p = MediumParams(omega=1.0, lam=lam)
        first_order = 0.5 + 0.75 * lam
        assert ao_exact_spectrum(p).levels[0] < first_order

    def test_determinism(self):
        p = MediumParams(omega=1.0, lam=0.2)
        a = ao_exact_spectrum(p).levels
        b = ao_exact_spectrum(p).levels
        assert np.allclose(a, b, rtol=0.0, atol=1e-10)

    def test_convergence_error_when_too_many_levels_requested(self):
        cfg = BasisConfig(size=8, max_size=16)
        with pytest.raises(ConvergenceError):
            ao_exact_spectrum(MediumParams(omega=1.0, lam=0.9), cfg, min_levels=16)

    def test_rejects_bad_config(self):
        with pytest.raises(ValueError):
            BasisConfig(size=4)
        with pytest.raises(ValueError):
            BasisConfig(trust_fraction=0.0)


class TestGibbsSumExact:
    def test_harmonic_geometric_sum(self):
        spec = ao_exact_spectrum(MediumParams(omega=1.0), min_levels=48)
        z = gibbs_sum_exact(spec, 1.0)
        assert z == pytest.approx(math.exp(-0.5) / (1 - math.exp(-1.0)), rel=1e-12)

    def test_ground_state_dominance(self):
        spec = ao_exact_spectrum(MediumParams(omega=1.0, lam=0.1))
        z = gibbs_sum_exact(spec, 30.0)
        assert z == pytest.approx(math.exp(-30.0 * spec.levels[0]), rel=1e-6)

    def test_truncation_error(self):
        spec = Spectrum(levels=np.array([0.5, 1.5, 2.5]), truncation=3)
        with pytest.raises(TruncationError):
            gibbs_sum_exact(spec, 0.5)

    def test_first_order_partition_error_is_quadratic(self):
        def gap(lam):
            p = MediumParams(omega=5.0, lam=lam)
            z1 = ao_partition_first_order(1.0, p)
            z = gibbs_sum_exact(ao_exact_spectrum(p, min_levels=16), 1.0)
            return abs(z1 - z)

        assert 3.2 <= gap(0.03) / gap(0.015) <= 4.8

    def test_thermal_exact_identity(self):
        spec = ao_exact_spectrum(MediumParams(omega=1.0, lam=0.1), min_levels=48)
        z, u, s = thermal_exact(spec, 1.0)
        assert s == pytest.approx(math.log(z) + u, abs=1e-12)


class TestQuadrature:
    @pytest.mark.parametrize("beta,omega", [(1.0, 1.0), (2.0, 5.0), (0.5, 0.8)])
    def test_harmonic_value(self, beta, omega):
        z = classical_partition_quadrature(beta, MediumParams(omega=omega))
        assert z == pytest.approx(1 / (beta * omega), rel=1e-10)

    def test_small_quartic_value(self):
        z = classical_partition_quadrature(1.0, MediumParams(omega=1.0, lam=0.01))
        assert z == pytest.approx(0.974048607075, abs=1e-8)

    def test_matches_linearized_form_to_second_order(self):
        from qrefrig.media import classical_partition

        def gap(lam):
            p = MediumParams(omega=1.0, lam=lam)
            return abs(classical_partition(1.0, p) - classical_partition_quadrature(1.0, p))

        assert 3.2 <= gap(0.02) / gap(0.01) <= 4.8

    def test_energy_equipartition_at_zero_lam(self):
        u = classical_energy_quadrature(2.0, MediumParams(omega=3.0))
        assert u == pytest.approx(0.5, rel=1e-10)

    def test_energy_matches_closed_form_to_second_order(self):
        def gap(lam):
            p = MediumParams(omega=5.0, lam=lam)
            _, e = classical_entropy_energy(1.0, p)
            return abs(e - classical_energy_quadrature(1.0, p))

        assert 3.2 <= gap(0.2) / gap(0.1) <= 4.8


class TestOrderCheck:
    def test_zero_lam_convention(self):
        rep = order_check("ao-level-0", 0.0)
        assert rep.passed and rep.err == 0.0 and rep.ratio is None

    def test_unknown_quantity(self):
        with pytest.raises(ValueError):
            order_check("nope", 0.1)

    @pytest.mark.parametrize("lam", [0.02, 0.01])
    def test_ao_level_ratio(self, lam):
        rep = order_check("ao-level-0", lam)
        assert rep.passed
        assert rep.ratio == pytest.approx(4.0, abs=0.8)

    def test_otto_heat_ratio(self):
        assert order_check("otto-qc-ao", 0.2).passed

    @pytest.mark.xfail(
        strict=True,
        reason="the qubit Otto closed-form slope is half the two-level Gibbs "
        "slope, so the closed-vs-oracle gap is first order",
    )
    def test_otto_spin_cop_ratio(self):
        assert order_check("cop-otto-spin", 0.2).passed

    def test_registry_names_are_stable(self):
        assert {"ao-level-0", "z-ao", "z-classical", "otto-qc-ao",
                "stirling-qab-ao", "classical-qc", "cop-otto-ao",
                "cop-stirling-spin"} <= set(ORDER_CHECK_QUANTITIES)
