"""Thermal-state functionals: Gibbs populations, internal energy, entropy,
and the mean level shift bought by the quartic term ("energy cost").

Internal energies follow U = -d(ln Z)/d(beta) for each medium's partition
function, truncated to first order in ``lam`` where the partition function
itself is a first-order form; entropies then come from S = ln Z + beta U,
so the triple (Z, U, S) of a :class:`ThermalFunctions` always satisfies
that identity to rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import TruncationError
from .media import (
    Medium,
    MediumKind,
    MediumParams,
    Spectrum,
    ao_partition_first_order,
    ao_spectrum,
    classical_entropy_energy,
    harmonic_partition,
    spin_levels,
    spin_partition,
)

# Gibbs tail bound: last retained Boltzmann term must be below this
# fraction of the running sum.
TAIL_BOUND = 1e-16


@dataclass(frozen=True)
class ThermalFunctions:
    """(Z, U, S, populations) of one medium at one inverse temperature."""

    beta: float
    z: float
    u: float
    s: float
    populations: np.ndarray | None = None


@dataclass(frozen=True)
class EnergyCost:
    """Gibbs-averaged level shift attributable to the quartic term."""

    delta_h: float
    kind: MediumKind
    beta: float
    params: MediumParams


@dataclass(frozen=True)
class FiniteDifferenceReport:
    """Residual of the closed-form U against a numeric -d(ln Z)/d(beta)."""

    kind: MediumKind
    beta: float
    u_closed: float
    u_fd: float
    residual: float


def gibbs_populations(spectrum: Spectrum, beta: float) -> np.ndarray:
    """Normalized Boltzmann weights over a spectrum.

    For truncated spectra the last retained term must fall below
    ``TAIL_BOUND`` times the running sum, otherwise the truncation cannot
    represent the state and :class:`TruncationError` is raised.  Complete
    spectra (the two-level spin) skip the bound.
    """
    if not (beta > 0):
        raise ValueError(f"beta must be positive, got {beta}")
    levels = spectrum.levels
    if len(levels) == 0:
        raise ValueError("spectrum is empty")
    weights = np.exp(-beta * (levels - levels[0]))
    total = weights.sum()
    if not spectrum.complete and weights[-1] >= TAIL_BOUND * total:
        raise TruncationError(
            f"Gibbs tail bound unmet: last term {weights[-1]:.3e} vs "
            f"{TAIL_BOUND:.0e} x sum {total:.6e} ({len(levels)} levels)"
        )
    return weights / total


def oscillator_level_count(beta: float, omega: float) -> int:
    """Levels needed for a harmonic-like Gibbs sum to meet the tail bound."""
    # exp(-beta*omega*n) < 1e-16 * sum  =>  n ~ 37 / (beta*omega), padded
    n = int(math.ceil(40.0 / (beta * omega))) + 8
    return max(n, 8)


def ao_internal_energy(beta: float, p: MediumParams) -> float:
    """Oscillator internal energy, first order in lam.

    U = (omega/2) coth(x) + (3 lam / 4 omega^2) [coth^2(x) - beta omega coth(x) csch^2(x)]
    with x = beta omega / 2.
    """
    x = 0.5 * beta * p.omega
    c = 1.0 / math.tanh(x)
    csch2 = 1.0 / math.sinh(x) ** 2
    return 0.5 * p.omega * c + 0.75 * p.lam / p.omega**2 * (c * c - beta * p.omega * c * csch2)


def ao_internal_energy_gibbs(beta: float, p: MediumParams, n_levels: int | None = None) -> float:
    """Diagnostic backend: Gibbs-sum U over the first-order spectrum.

    Differs from :func:`ao_internal_energy` at second order in lam.
    """
    if n_levels is None:
        n_levels = oscillator_level_count(beta, p.omega)
    spec = ao_spectrum(p, n_levels)
    pops = gibbs_populations(spec, beta)
    return float(np.dot(spec.levels, pops))


def spin_internal_energy(beta: float, p: MediumParams) -> float:
    """Two-level internal energy (exact Gibbs average)."""
    e0, e1 = spin_levels(p)
    r = math.exp(-beta * (e1 - e0))
    return (e0 + e1 * r) / (1.0 + r)


def thermal_functions(
    kind: MediumKind,
    p: MediumParams,
    beta: float,
    populations: bool = False,
) -> ThermalFunctions:
    """Closed-form (Z, U, S) for any medium; populations on request.

    Classical media carry no populations.  Classical Z is reported in the
    log-consistent form exp(S - beta U) so the entropy identity holds
    exactly alongside the first-order S and E closed forms; the linearized
    value itself is :func:`qrefrig.media.classical_partition`.
    """
    if not (beta > 0):
        raise ValueError(f"beta must be positive, got {beta}")
    params = p if not kind.is_harmonic else MediumParams(p.omega, 0.0, p.omega0)

    pops: np.ndarray | None = None
    if kind.is_oscillator:
        z = ao_partition_first_order(beta, params) if params.lam else harmonic_partition(beta, params.omega)
        u = ao_internal_energy(beta, params)
        if populations:
            spec = ao_spectrum(params, oscillator_level_count(beta, params.omega))
            pops = gibbs_populations(spec, beta)
    elif kind.is_spin:
        z = spin_partition(beta, params)
        u = spin_internal_energy(beta, params)
        if populations:
            e0, e1 = spin_levels(params)
            r = math.exp(-beta * (e1 - e0))
            pops = np.array([1.0, r]) / (1.0 + r)
    else:
        s_cl, u = classical_entropy_energy(beta, params)
        z = math.exp(s_cl - beta * u)
    s = math.log(z) + beta * u
    return ThermalFunctions(beta=beta, z=z, u=u, s=s, populations=pops)


def energy_cost_ao(beta: float, p: MediumParams) -> EnergyCost:
    """Oscillator energy cost.

    delta_H = (1/Z) (3 lam / 8 omega^2) csch(x) coth^2(x), x = beta omega / 2,
    with Z the first-order oscillator partition value.
    """
    if p.lam == 0.0:
        return EnergyCost(0.0, MediumKind.QUANTUM_ANHARMONIC, beta, p)
    z = ao_partition_first_order(beta, p)
    x = 0.5 * beta * p.omega
    val = 0.375 * p.lam / p.omega**2 / math.sinh(x) / math.tanh(x) ** 2 / z
    return EnergyCost(val, MediumKind.QUANTUM_ANHARMONIC, beta, p)


def energy_cost_spin(beta: float, p: MediumParams) -> EnergyCost:
    """Spin energy cost.

    delta_H = (1/Z) (3 lam / 4 omega^2) exp(-3 beta omega / 2) (5 + exp(beta omega)).
    """
    if p.lam == 0.0:
        return EnergyCost(0.0, MediumKind.SPIN_ANHARMONIC, beta, p)
    z = spin_partition(beta, p)
    w = p.omega
    val = 0.75 * p.lam / w**2 * math.exp(-1.5 * beta * w) * (5.0 + math.exp(beta * w)) / z
    return EnergyCost(val, MediumKind.SPIN_ANHARMONIC, beta, p)


def delta_h_gibbs_sum(beta: float, p: MediumParams, n_levels: int | None = None) -> float:
    """Cross-check: Gibbs-weighted sum of the raw level shifts.

    sum_n p_n [E_n - (n + 1/2) omega] over the first-order spectrum;
    agrees with :func:`energy_cost_ao` to second order in lam.
    """
    if n_levels is None:
        n_levels = oscillator_level_count(beta, p.omega)
    spec = ao_spectrum(p, n_levels)
    pops = gibbs_populations(spec, beta)
    k = np.arange(n_levels, dtype=float)
    shifts = spec.levels - (k + 0.5) * p.omega
    return float(np.dot(shifts, pops))


def _log_partition(kind: MediumKind, p: MediumParams, beta: float) -> float:
    tf = thermal_functions(kind, p, beta)
    return math.log(tf.z)


def finite_difference_consistency(
    kind: MediumKind, p: MediumParams, beta: float
) -> FiniteDifferenceReport:
    """Check U_closed against a Richardson-refined central difference.

    Differentiates ln Z of the medium with step h = max(1e-5, 1e-5 beta),
    combining the h and h/2 central differences.  For media whose closed U
    is the exact derivative of the exposed ln Z the residual is pure
    rounding; for the first-order oscillator it is O(lam^2).
    """
    h = max(1e-5, 1e-5 * beta)

    def central(step: float) -> float:
        up = _log_partition(kind, p, beta + step)
        dn = _log_partition(kind, p, beta - step)
        return (up - dn) / (2.0 * step)

    d_h = central(h)
    d_h2 = central(0.5 * h)
    u_fd = -(4.0 * d_h2 - d_h) / 3.0
    u_closed = thermal_functions(kind, p, beta).u
    return FiniteDifferenceReport(
        kind=kind, beta=beta, u_closed=u_closed, u_fd=u_fd, residual=abs(u_closed - u_fd)
    )


def shannon_entropy(populations: np.ndarray) -> float:
    """Shannon entropy -sum p ln p of a population vector (0 ln 0 = 0)."""
    pos = populations[populations > 0.0]
    return float(-np.dot(pos, np.log(pos)))


def energy_cost(kind: MediumKind, p: MediumParams, beta: float) -> EnergyCost:
    """Dispatch the energy cost by medium family (zero for harmonic kinds)."""
    if kind.is_harmonic:
        return EnergyCost(0.0, kind, beta, p)
    if kind.is_oscillator:
        return energy_cost_ao(beta, p)
    if kind.is_spin:
        return energy_cost_spin(beta, p)
    raise ValueError(f"energy cost is not defined for {kind.value}")
