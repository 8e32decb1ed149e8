"""Working-medium models and their spectra / partition functions.

Units: hbar = k_B = m = 1 throughout, so frequencies, energies and
temperatures share one scale.  The quartic strength ``lam`` carries
dimension frequency**3; the dimensionless anharmonicity is
``g = lam / omega0**3``.

Four families are covered:

* quantum oscillator, harmonic or with a quartic term treated to first
  order in ``lam`` (level formula and partition function),
* a two-level spin analogue with the matching level shifts,
* the classical oscillator (phase-space partition function, entropy and
  mean energy to first order).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import ValidityDomainError

# above this the linear correction is kept but flagged as marginal
VALIDITY_SOFT_THRESHOLD = 0.5

# slack for g == 1 round-trips (g -> lam -> g)
_G_EPS = 1e-9


class MediumKind(str, Enum):
    """Tags for the six supported working media."""

    QUANTUM_HARMONIC = "quantum-harmonic"
    QUANTUM_ANHARMONIC = "quantum-anharmonic"
    SPIN_HARMONIC = "spin-harmonic"
    SPIN_ANHARMONIC = "spin-anharmonic"
    CLASSICAL_HARMONIC = "classical-harmonic"
    CLASSICAL_ANHARMONIC = "classical-anharmonic"

    @property
    def is_oscillator(self) -> bool:
        return self in (MediumKind.QUANTUM_HARMONIC, MediumKind.QUANTUM_ANHARMONIC)

    @property
    def is_spin(self) -> bool:
        return self in (MediumKind.SPIN_HARMONIC, MediumKind.SPIN_ANHARMONIC)

    @property
    def is_classical(self) -> bool:
        return self in (MediumKind.CLASSICAL_HARMONIC, MediumKind.CLASSICAL_ANHARMONIC)

    @property
    def is_harmonic(self) -> bool:
        return self in (
            MediumKind.QUANTUM_HARMONIC,
            MediumKind.SPIN_HARMONIC,
            MediumKind.CLASSICAL_HARMONIC,
        )


@dataclass(frozen=True)
class MediumParams:
    """Frequency and quartic strength defining one medium instance.

    ``omega`` and ``omega0`` must be positive; ``lam`` must be
    non-negative and satisfy ``lam / omega0**3 <= 1`` (the dimensionless
    anharmonicity stays in [0, 1], the right endpoint being the boundary
    of the regime we sweep).
    """

    omega: float
    lam: float = 0.0
    omega0: float = 1.0

    def __post_init__(self) -> None:
        if not (self.omega > 0):
            raise ValueError(f"omega must be positive, got {self.omega}")
        if not (self.omega0 > 0):
            raise ValueError(f"omega0 must be positive, got {self.omega0}")
        if self.lam < 0:
            raise ValueError(f"lam must be non-negative, got {self.lam}")
        if self.g > 1.0 + _G_EPS:
            raise ValueError(
                f"anharmonicity g = lam/omega0^3 = {self.g:.6g} exceeds 1"
            )

    @property
    def g(self) -> float:
        """Dimensionless anharmonicity lam / omega0**3."""
        return self.lam / self.omega0**3

    @property
    def at_boundary(self) -> bool:
        """True when g sits at the right endpoint of the allowed range."""
        return self.g >= 1.0 - 1e-12

    def with_omega(self, omega: float) -> "MediumParams":
        return MediumParams(omega=omega, lam=self.lam, omega0=self.omega0)


@dataclass(frozen=True)
class Medium:
    """A medium kind paired with its parameters.

    Harmonic kinds force ``lam = 0``.
    """

    kind: MediumKind
    params: MediumParams

    def __post_init__(self) -> None:
        if self.kind.is_harmonic and self.params.lam != 0.0:
            raise ValueError(f"{self.kind.value} requires lam = 0, got {self.params.lam}")


@dataclass(frozen=True)
class Spectrum:
    """Ordered energy levels with truncation metadata.

    ``truncation`` is the number of levels retained.  ``converged`` flags
    each retained level; levels produced by closed formulas are all
    converged by construction.  ``complete`` marks spectra that are the
    entire level set of the model (the two-level spin), for which Gibbs
    sums need no tail bound.
    """

    levels: np.ndarray
    truncation: int
    converged: np.ndarray = field(default=None)  # type: ignore[assignment]
    complete: bool = False

    def __post_init__(self) -> None:
        levels = np.asarray(self.levels, dtype=float)
        object.__setattr__(self, "levels", levels)
        if self.truncation < 1:
            raise ValueError("truncation must be at least 1")
        if self.converged is None:
            object.__setattr__(self, "converged", np.ones(len(levels), dtype=bool))
        if np.any(np.diff(levels) <= 0):
            raise ValueError("levels must be strictly increasing")


@dataclass(frozen=True)
class SpinCalibration:
    """Field scale and drive constants realising the spin analogue.

    ``gamma * b_z - omega == 3 lam / omega**2`` and
    ``omega_drive - omega == (9/4) lam / omega**2`` hold exactly.
    """

    b_z: float
    gamma: float
    omega_drive: float


def ao_level(n: int, p: MediumParams) -> float:
    """Oscillator level n with the first-order quartic shift.

    E_n = (n + 1/2) omega + (3 lam / 2 omega^2) (n^2 + n + 1/2)
    """
    if n < 0:
        raise ValueError("n must be a non-negative integer")
    return (n + 0.5) * p.omega + 1.5 * p.lam / p.omega**2 * (n * n + n + 0.5)


def ao_spectrum(p: MediumParams, n_levels: int) -> Spectrum:
    """First ``n_levels`` first-order oscillator levels as a Spectrum."""
    if n_levels < 1:
        raise ValueError("n_levels must be at least 1")
    k = np.arange(n_levels, dtype=float)
    levels = (k + 0.5) * p.omega + 1.5 * p.lam / p.omega**2 * (k * k + k + 0.5)
    return Spectrum(levels=levels, truncation=n_levels)


def spin_levels(p: MediumParams) -> tuple[float, float]:
    """The two spin-analogue levels.

    E_0 = omega/2 + 3 lam / (4 omega^2),  E_1 = 3 omega/2 + 15 lam / (4 omega^2)
    """
    w, lam = p.omega, p.lam
    return (0.5 * w + 0.75 * lam / w**2, 1.5 * w + 3.75 * lam / w**2)


def spin_spectrum(p: MediumParams) -> Spectrum:
    e0, e1 = spin_levels(p)
    return Spectrum(levels=np.array([e0, e1]), truncation=2, complete=True)


def spin_calibration(p: MediumParams, b_z: float = 1.0) -> SpinCalibration:
    """Coupling gamma and drive Omega realising the spin levels in a field b_z."""
    if not (b_z > 0):
        raise ValueError(f"b_z must be positive, got {b_z}")
    w, lam = p.omega, p.lam
    gamma = (w + 3.0 * lam / w**2) / b_z
    omega_drive = w + 2.25 * lam / w**2
    return SpinCalibration(b_z=b_z, gamma=gamma, omega_drive=omega_drive)


def harmonic_partition(beta: float, omega: float) -> float:
    """Quantum harmonic partition value (1/2) csch(beta omega / 2)."""
    _check_beta(beta)
    return 0.5 / math.sinh(0.5 * beta * omega)


def ao_validity_factor(beta: float, p: MediumParams) -> float:
    """Size of the linear correction inside the first-order oscillator Z.

    v = (3 beta lam / 4 omega^2) coth^2(beta omega / 2); the expansion is
    meaningless once v reaches 1.
    """
    _check_beta(beta)
    return 0.75 * beta * p.lam / p.omega**2 / math.tanh(0.5 * beta * p.omega) ** 2


def ao_partition_first_order(beta: float, p: MediumParams) -> float:
    """First-order oscillator partition value.

    Z = (1/2) csch(beta omega / 2) [1 - v] with v from
    :func:`ao_validity_factor`.  Raises :class:`ValidityDomainError` when
    v >= 1.
    """
    v = ao_validity_factor(beta, p)
    if v >= 1.0:
        raise ValidityDomainError(
            f"first-order Z invalid: correction factor v = {v:.4g} >= 1 "
            f"(beta={beta}, omega={p.omega}, lam={p.lam})"
        )
    return harmonic_partition(beta, p.omega) * (1.0 - v)


def spin_partition(beta: float, p: MediumParams) -> float:
    """Two-level partition value exp(-beta E_0) + exp(-beta E_1)."""
    _check_beta(beta)
    e0, e1 = spin_levels(p)
    # factored form stays finite deep into the low-temperature regime
    return math.exp(-beta * e0) * (1.0 + math.exp(-beta * (e1 - e0)))


def classical_validity_factor(beta: float, p: MediumParams) -> float:
    """Relative size 3 lam / (beta omega^4) of the classical correction."""
    _check_beta(beta)
    return 3.0 * p.lam / (beta * p.omega**4)


def classical_partition(beta: float, p: MediumParams) -> float:
    """Classical phase-space partition value to first order.

    Z = (1 / beta omega) (1 - 3 lam / (beta omega^4)); equals
    1/(beta omega) at lam = 0.  Raises :class:`ValidityDomainError` when
    the correction reaches 1.
    """
    u = classical_validity_factor(beta, p)
    if u >= 1.0:
        raise ValidityDomainError(
            f"first-order classical Z invalid: correction {u:.4g} >= 1 "
            f"(beta={beta}, omega={p.omega}, lam={p.lam})"
        )
    return (1.0 - u) / (beta * p.omega)


def classical_entropy_energy(beta: float, p: MediumParams) -> tuple[float, float]:
    """Classical entropy and mean energy to first order.

    S = 1 - ln(beta omega) - 6 lam / (beta omega^4)
    E = 1/beta - 3 lam / (beta^2 omega^4)
    """
    _check_beta(beta)
    w, lam = p.omega, p.lam
    s = 1.0 - math.log(beta * w) - 6.0 * lam / (beta * w**4)
    e = 1.0 / beta - 3.0 * lam / (beta**2 * w**4)
    return s, e


def _check_beta(beta: float) -> None:
    if not (beta > 0):
        raise ValueError(f"beta must be positive, got {beta}")
