"""Four-stroke Otto and Stirling refrigeration ledgers and COPs.

Sign conventions for the quantum cycles: the cold-stroke heat is
Q_c = sum_n E'_n (P^h_n - P^c_n) and the hot-stroke heat is
Q_h = sum_n E_n (P^c_n - P^h_n); the net work w = Q_h + Q_c is negative
when the cycle refrigerates, and the COP Q_c / |w| is reported only then
(None otherwise).  Ledgers expose the raw stroke heats so any external
convention can be applied on top; nothing is sign-flipped silently.

Two backends are available.  ``CLOSED_FORM_O1`` evaluates the first-order
closed forms: leading (harmonic) stroke heats plus ``lam`` times a fixed
linear coefficient per stroke.  ``NUMERIC`` assembles the same strokes
from Gibbs populations over the medium's spectrum (Otto) or from the
closed-form internal energies and entropies (Stirling).  For oscillator
media the two routes agree to O(lam^2).  For spin media the fixed linear
coefficients of the Otto strokes and of the Stirling isochoric-1 stroke
are kept as canonical closed forms even though they differ from the
two-level Gibbs derivative; the numeric ledger is the model-faithful
route there.

The classical endoreversible Otto cycle keeps its own bookkeeping: both
stroke heats are positive in refrigerator mode and the net work input is
w = q_h - q_c.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

import numpy as np

from .errors import ConvergenceError, ValidityDomainError
from .media import (
    Medium,
    MediumKind,
    MediumParams,
    Spectrum,
    VALIDITY_SOFT_THRESHOLD,
    ao_spectrum,
    ao_validity_factor,
    classical_entropy_energy,
    spin_spectrum,
)
from .thermo import (
    gibbs_populations,
    oscillator_level_count,
    shannon_entropy,
    thermal_functions,
)

_MAX_LEVELS = 8192


def _coth(x: float) -> float:
    return 1.0 / math.tanh(x)


def _csch(x: float) -> float:
    return 1.0 / math.sinh(x)


def _sech(x: float) -> float:
    return 1.0 / math.cosh(x)


class Backend(str, Enum):
    CLOSED_FORM_O1 = "ClosedFormO1"
    NUMERIC = "Numeric"


@dataclass(frozen=True)
class CycleParams:
    """One quantum cycle configuration: frequencies, bath temperatures, medium."""

    omega: float
    omega_prime: float
    beta_h: float
    beta_c: float
    medium: Medium

    def __post_init__(self) -> None:
        for name in ("omega", "omega_prime", "beta_h", "beta_c"):
            if not (getattr(self, name) > 0):
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")

    @property
    def otto_negative_work(self) -> bool:
        """omega > omega' and beta_c omega' > beta_h omega."""
        return self.omega > self.omega_prime and self.beta_c * self.omega_prime > self.beta_h * self.omega

    @property
    def stirling_negative_work(self) -> bool:
        """omega > omega' and beta_h < beta_c."""
        return self.omega > self.omega_prime and self.beta_h < self.beta_c


@dataclass(frozen=True)
class CycleLedger:
    """Per-stroke heats, net work, COP and validity flags of one evaluation.

    ``work`` is always the plain left-to-right sum of the stroke heats in
    their ledger order (classical Otto: q_h - q_c), so the bookkeeping
    identity can be re-checked bit-for-bit.  ``cop`` is None whenever the
    cycle is not refrigerating.
    """

    cycle: str
    backend: str
    heats: dict[str, float]
    work: float
    cop: float | None
    flags: dict[str, bool]
    diagnostics: dict[str, Any] = field(default_factory=dict, repr=False)

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"cycle": self.cycle, "backend": self.backend}
        out.update(self.heats)
        out["w"] = self.work
        out["cop"] = self.cop
        out["flags"] = dict(self.flags)
        return out


# --------------------------------------------------------------------------
# linear-in-lam coefficients of the first-order stroke heats and COPs
# --------------------------------------------------------------------------

def qc1_ao(w: float, wp: float, bh: float, bc: float) -> float:
    return 3.0 / (4 * w**2 * wp**2) * (
        w**2 * (bc * wp * _coth(bc * wp / 2) - 1) * _csch(bc * wp / 2) ** 2
        + _csch(w * bh / 2) ** 2 * (w**2 - bh * wp**3 * _coth(w * bh / 2))
    )


def qc1_spin(w: float, wp: float, bh: float, bc: float) -> float:
    return 3.0 / (4 * w**2 * wp**2) * (
        w**2 * (math.tanh(bc * wp / 2) + bc * wp * _sech(bc * wp / 2) ** 2 - math.tanh(w * bh / 2))
        - bh * wp**3 * _sech(w * bh / 2) ** 2
    )


def qh1_ao(w: float, wp: float, bh: float, bc: float) -> float:
    return -3.0 / (4 * w**2 * wp**2) * (
        (w**3 * bc * _coth(bc * wp / 2) - wp**2) * _csch(bc * wp / 2) ** 2
        - wp**2 * (w * bh * _coth(w * bh / 2) - 1) * _csch(w * bh / 2) ** 2
    )


def qh1_spin(w: float, wp: float, bh: float, bc: float) -> float:
    return -3.0 / (4 * w**2 * wp**2) * (
        w**3 * bc * _sech(bc * wp / 2) ** 2
        - wp**2 * (-math.tanh(bc * wp / 2) + math.tanh(w * bh / 2) + w * bh * _sech(w * bh / 2) ** 2)
    )


def qab1_ao(w: float, wp: float, bh: float, bc: float) -> float:
    return 0.375 * bc * (
        math.sinh(w * bc) * _csch(w * bc / 2) ** 4 / w
        - math.sinh(bc * wp) * _csch(bc * wp / 2) ** 4 / wp
    )


def qab1_spin(w: float, wp: float, bh: float, bc: float) -> float:
    return 3 * bc / (2 * w * wp) * (
        wp / (math.cosh(w * bc) + 1) - w / (math.cosh(bc * wp) + 1)
    )


def qbc1_ao(w: float, wp: float, bh: float, bc: float) -> float:
    return 3.0 / (16 * wp**2) * (
        math.sinh(bh * wp) * (math.sinh(bh * wp) - 2 * bh * wp) * _csch(bh * wp / 2) ** 4
        - math.sinh(bc * wp) * (math.sinh(bc * wp) - 2 * bc * wp) * _csch(bc * wp / 2) ** 4
    )


def qbc1_spin(w: float, wp: float, bh: float, bc: float) -> float:
    return 3 * _sech(bc * wp / 2) ** 2 * _sech(bh * wp / 2) ** 2 / (8 * wp**2) * (
        bh * wp * math.cosh(bc * wp) + bh * wp + math.sinh(bh * wp)
        - bc * wp - math.sinh(bc * wp) - math.sinh(wp * (bc - bh))
        - bc * wp * math.cosh(bh * wp)
    )


def qcd1_ao(w: float, wp: float, bh: float, bc: float) -> float:
    return -0.375 * bh * (
        math.sinh(w * bh) * _csch(w * bh / 2) ** 4 / w
        - math.sinh(bh * wp) * _csch(bh * wp / 2) ** 4 / wp
    )


def qcd1_spin(w: float, wp: float, bh: float, bc: float) -> float:
    return -3 * bh / (2 * w * wp) * (
        wp / (math.cosh(w * bh) + 1) - w / (math.cosh(bh * wp) + 1)
    )


def qda1_ao(w: float, wp: float, bh: float, bc: float) -> float:
    return -3.0 / (16 * w**2) * (
        math.sinh(w * bh) * (math.sinh(w * bh) - 2 * w * bh) * _csch(w * bh / 2) ** 4
        - math.sinh(w * bc) * (math.sinh(w * bc) - 2 * w * bc) * _csch(w * bc / 2) ** 4
    )


def qda1_spin(w: float, wp: float, bh: float, bc: float) -> float:
    return -3 * _sech(w * bc / 2) ** 2 * _sech(w * bh / 2) ** 2 / (8 * w**2) * (
        math.sinh(w * bc) + math.sinh(w * (bc - bh)) + w * bc * (math.cosh(w * bh) + 1)
        - w * bh * (math.cosh(w * bc) + 1) - math.sinh(w * bh)
    )


def stirling_cop1_ao(w: float, wp: float, bh: float, bc: float) -> float:
    """Linear coefficient of the oscillator Stirling COP."""
    lc = lambda x: math.log(_csch(x))
    d = bc * math.log(_csch(bh * wp / 2) / _csch(w * bh / 2)) + bh * math.log(
        _csch(w * bc / 2) / _csch(bc * wp / 2)
    )
    big = (
        -w * bc * bh * wp**2 * _coth(w * bc / 2) ** 3
        + bh * wp**2 * _coth(w * bc / 2) ** 2
        * (2 * lc(bc * wp / 2) - 2 * lc(w * bc / 2) + bc * wp * _coth(bh * wp / 2))
        - bh * wp**2 * _coth(w * bh / 2) ** 2
        * (2 * lc(bc * wp / 2) - 2 * lc(w * bc / 2) + bc * wp * _coth(bh * wp / 2))
        - w * (
            -w * bc * bh * wp * _coth(bh * wp / 2) ** 3
            + 2 * w * bc * _coth(bh * wp / 2) ** 2 * (lc(w * bh / 2) - lc(bh * wp / 2))
            + w * bc * _coth(bc * wp / 2) ** 2
            * (bh * wp * _coth(bh * wp / 2) + 2 * lc(bh * wp / 2) - 2 * lc(w * bh / 2))
            + wp * (bc * lc(bh * wp / 2) - bh * lc(bc * wp / 2) - bc * lc(w * bh / 2) + bh * lc(w * bc / 2))
            * (w * bh * math.sinh(bh * wp) * _csch(bh * wp / 2) ** 4
               - bc * wp * math.sinh(w * bc) * _csch(w * bc / 2) ** 4)
        )
        + w * bc * bh * _coth(w * bc / 2)
        * (w**2 * (_coth(bc * wp / 2) ** 2 - _coth(bh * wp / 2) ** 2) + wp**2 * _coth(w * bh / 2) ** 2)
    )
    return 3 * bc * bh / (8 * w**2 * wp**2 * d**2) * big


def stirling_cop1_spin(w: float, wp: float, bh: float, bc: float) -> float:
    """Linear coefficient of the qubit Stirling COP."""
    d = bc * math.log(math.cosh(bh * wp / 2) / math.cosh(w * bh / 2)) + bh * math.log(
        math.cosh(w * bc / 2) / math.cosh(bc * wp / 2)
    )
    t1 = (
        3 * bc * bh**2 / (4 * w**2 * wp**2 * d**2)
        * (wp**2 * (math.tanh(w * bc / 2) - math.tanh(w * bh / 2))
           + w**2 * (math.tanh(bh * wp / 2) - math.tanh(bc * wp / 2)))
        * (2 * math.log(math.cosh(w * bc / 2) / math.cosh(bc * wp / 2))
           - w * bc * math.tanh(w * bc / 2) + bc * wp * math.tanh(bh * wp / 2))
    )
    t2 = (
        3 * bc * bh
        * (-2 * w * math.tanh(bc * wp / 2) - bc * wp**2 * _sech(w * bc / 2) ** 2
           + w * (bh * wp + math.sinh(bh * wp)) * _sech(bh * wp / 2) ** 2)
        / (4 * w * wp**2 * d)
    )
    return t1 - t2


# --------------------------------------------------------------------------
# leading (harmonic) stroke heats
# --------------------------------------------------------------------------

def otto_leading(cp: CycleParams, spin: bool) -> tuple[float, float]:
    w, wp, bh, bc = cp.omega, cp.omega_prime, cp.beta_h, cp.beta_c
    if spin:
        d = math.tanh(bc * wp / 2) - math.tanh(bh * w / 2)
    else:
        d = _coth(bh * w / 2) - _coth(bc * wp / 2)
    return wp / 2 * d, -w / 2 * d


def stirling_leading(cp: CycleParams, spin: bool) -> tuple[float, float, float, float]:
    w, wp, bh, bc = cp.omega, cp.omega_prime, cp.beta_h, cp.beta_c
    if spin:
        qab = (w / 2 * math.tanh(bc * w / 2) - wp / 2 * math.tanh(bc * wp / 2)
               + math.log(math.cosh(bc * wp / 2) / math.cosh(bc * w / 2)) / bc)
        qbc = wp / 2 * (math.tanh(bc * wp / 2) - math.tanh(bh * wp / 2))
        qcd = (-w / 2 * math.tanh(bh * w / 2) + wp / 2 * math.tanh(bh * wp / 2)
               - math.log(math.cosh(bh * wp / 2) / math.cosh(bh * w / 2)) / bh)
        qda = -w / 2 * (math.tanh(bc * w / 2) - math.tanh(bh * w / 2))
    else:
        qab = (wp / 2 * _coth(bc * wp / 2) - w / 2 * _coth(bc * w / 2)
               + math.log(math.sinh(bc * w / 2) / math.sinh(bc * wp / 2)) / bc)
        qbc = wp / 2 * (_coth(bh * wp / 2) - _coth(bc * wp / 2))
        qcd = (-wp / 2 * _coth(bh * wp / 2) + w / 2 * _coth(bh * w / 2)
               - math.log(math.sinh(bh * w / 2) / math.sinh(bh * wp / 2)) / bh)
        qda = -w / 2 * (_coth(bh * w / 2) - _coth(bc * w / 2))
    return qab, qbc, qcd, qda


def stirling_cop_leading(cp: CycleParams, spin: bool) -> float:
    w, wp, bh, bc = cp.omega, cp.omega_prime, cp.beta_h, cp.beta_c
    _guard_frequencies(w, wp)
    if spin:
        num = (w * math.tanh(bc * w / 2) - wp * math.tanh(bh * wp / 2)
               + math.log(math.cosh(bc * wp / 2) ** 2 / math.cosh(bc * w / 2) ** 2) / bc)
        den = (math.log(math.cosh(bh * wp / 2) ** 2 / math.cosh(bh * w / 2) ** 2) / bh
               + math.log(math.cosh(bc * w / 2) ** 2 / math.cosh(bc * wp / 2) ** 2) / bc)
    else:
        num = (wp * _coth(bh * wp / 2) - w * _coth(bc * w / 2)
               + math.log(math.sinh(bc * w / 2) ** 2 / math.sinh(bc * wp / 2) ** 2) / bc)
        den = (math.log(math.sinh(bh * w / 2) ** 2 / math.sinh(bh * wp / 2) ** 2) / bh
               + math.log(math.sinh(bc * wp / 2) ** 2 / math.sinh(bc * w / 2) ** 2) / bc)
    return num / den


# --------------------------------------------------------------------------
# Otto cycle
# --------------------------------------------------------------------------

def _guard_frequencies(w: float, wp: float) -> None:
    if w == wp:
        raise ValueError("omega and omega_prime must differ (omega > omega_prime for refrigeration)")


def _quantum_medium(cp: CycleParams) -> tuple[MediumKind, MediumParams]:
    kind = cp.medium.kind
    if kind.is_classical:
        raise ValueError(
            f"{kind.value} is not a quantum cycle medium; use the classical Otto ledger"
        )
    return kind, cp.medium.params


def _oscillator_validity(kind: MediumKind, p: MediumParams,
                         corners: list[tuple[float, float]]) -> tuple[bool, bool]:
    """Hard-check the first-order partition domain at the thermal corners.

    Raises :class:`ValidityDomainError` once the correction reaches 1;
    reports the soft-warning flag above the marginal threshold.
    """
    if not (kind.is_oscillator and p.lam):
        return True, False
    worst = max(ao_validity_factor(beta, p.with_omega(om)) for beta, om in corners)
    if worst >= 1.0:
        raise ValidityDomainError(
            f"first-order partition invalid at a cycle corner: v = {worst:.4g} >= 1"
        )
    return True, worst > VALIDITY_SOFT_THRESHOLD


def _otto_flags(cp: CycleParams, kind: MediumKind, p: MediumParams, converged: bool) -> dict[str, bool]:
    valid, marginal = _oscillator_validity(
        kind, p, [(cp.beta_h, cp.omega), (cp.beta_c, cp.omega_prime)]
    )
    return {
        "negative_work_condition": cp.otto_negative_work,
        "partition_valid": valid,
        "partition_marginal": marginal,
        "truncation_converged": converged,
    }


def _spectrum_for(kind: MediumKind, p: MediumParams, omega: float, beta: float) -> Spectrum:
    pw = p.with_omega(omega)
    if kind.is_spin:
        return spin_spectrum(pw)
    return ao_spectrum(pw, oscillator_level_count(beta, omega))


def otto_ledger(
    cp: CycleParams,
    backend: Backend = Backend.CLOSED_FORM_O1,
    spectra: tuple[Spectrum, Spectrum] | None = None,
) -> CycleLedger:
    """Evaluate one Otto refrigeration cycle.

    ``backend=CLOSED_FORM_O1`` uses the first-order stroke heats (quantum
    media only).  ``backend=NUMERIC`` sums Gibbs populations over the
    medium's spectrum; ``spectra`` may supply precomputed (hot, cold)
    spectra, e.g. exact diagonalized ones, in place of the default
    first-order levels.
    """
    kind, p = _quantum_medium(cp)
    w, wp, bh, bc = cp.omega, cp.omega_prime, cp.beta_h, cp.beta_c
    diagnostics: dict[str, Any] = {}

    if backend is Backend.CLOSED_FORM_O1:
        qc0, qh0 = otto_leading(cp, kind.is_spin)
        if kind.is_harmonic or p.lam == 0.0:
            q_c, q_h = qc0, qh0
        elif kind.is_spin:
            q_c = qc0 + p.lam * qc1_spin(w, wp, bh, bc)
            q_h = qh0 + p.lam * qh1_spin(w, wp, bh, bc)
        else:
            q_c = qc0 + p.lam * qc1_ao(w, wp, bh, bc)
            q_h = qh0 + p.lam * qh1_ao(w, wp, bh, bc)
        converged = True
    else:
        if spectra is not None:
            spec_hot, spec_cold = spectra
        else:
            spec_hot = _spectrum_for(kind, p, w, bh)
            spec_cold = _spectrum_for(kind, p, wp, bc)
        n = min(len(spec_hot.levels), len(spec_cold.levels))
        complete = spec_hot.complete and spec_cold.complete
        e_hot = spec_hot.levels[:n]
        e_cold = spec_cold.levels[:n]
        p_hot = gibbs_populations(
            Spectrum(e_hot, n, complete=complete), bh
        )
        p_cold = gibbs_populations(
            Spectrum(e_cold, n, complete=complete), bc
        )
        q_c = float(np.dot(e_cold, p_hot - p_cold))
        q_h = float(np.dot(e_hot, p_cold - p_hot))
        converged = True
        diagnostics = {
            "populations_hot": p_hot,
            "populations_cold": p_cold,
            # cycle corners A, B, C, D carry (populations, level set);
            # adiabats transport the population vectors unchanged
            "population_entropy": {
                "A": shannon_entropy(p_hot),
                "B": shannon_entropy(p_cold),
                "C": shannon_entropy(p_cold),
                "D": shannon_entropy(p_hot),
            },
        }

    work = q_h + q_c
    cop = q_c / abs(work) if work < 0 else None
    return CycleLedger(
        cycle="otto",
        backend=backend.value,
        heats={"q_c": q_c, "q_h": q_h},
        work=work,
        cop=cop,
        flags=_otto_flags(cp, kind, p, converged),
        diagnostics=diagnostics,
    )


def otto_cop_first_order(cp: CycleParams) -> float:
    """First-order Otto COP.

    Oscillator: omega'/(omega-omega') + (3 lam / 2 w^2 w'^2)
    (w^3 - w'^3)/(w - w')^2 [coth(beta_h w / 2) + coth(beta_c w' / 2)];
    the qubit form replaces the bracket by 1.
    """
    kind, p = _quantum_medium(cp)
    w, wp = cp.omega, cp.omega_prime
    _guard_frequencies(w, wp)
    lead = wp / (w - wp)
    slope = 1.5 / (w**2 * wp**2) * (w**3 - wp**3) / (w - wp) ** 2
    if not kind.is_spin:
        slope *= otto_slope_ratio(cp)
    return lead + p.lam * slope


def otto_cop_first_order_from_heats(cp: CycleParams) -> float:
    """First-order Otto COP rebuilt from the stroke-heat expansion.

    Expands q_c / |w| of the ClosedFormO1 ledger to first order in lam;
    agrees with :func:`otto_cop_first_order` to rounding.
    """
    kind, p = _quantum_medium(cp)
    w, wp, bh, bc = cp.omega, cp.omega_prime, cp.beta_h, cp.beta_c
    _guard_frequencies(w, wp)
    qc0, qh0 = otto_leading(cp, kind.is_spin)
    w0 = qc0 + qh0
    if w0 == 0:
        raise ValueError("degenerate cycle: leading net work vanishes")
    if kind.is_spin:
        c_qc, c_qh = qc1_spin(w, wp, bh, bc), qh1_spin(w, wp, bh, bc)
    else:
        c_qc, c_qh = qc1_ao(w, wp, bh, bc), qh1_ao(w, wp, bh, bc)
    slope = (-c_qc * w0 + qc0 * (c_qc + c_qh)) / w0**2
    return qc0 / abs(w0) + p.lam * slope


def otto_slope_ratio(cp: CycleParams) -> float:
    """coth(beta_h omega / 2) + coth(beta_c omega' / 2).

    Equals the ratio of the oscillator and qubit first-order Otto COP
    slopes, and exceeds 2 (each coth > 1).
    """
    return _coth(cp.beta_h * cp.omega / 2) + _coth(cp.beta_c * cp.omega_prime / 2)


# --------------------------------------------------------------------------
# Stirling cycle
# --------------------------------------------------------------------------

def _stirling_closed_heats(cp: CycleParams) -> tuple[float, float, float, float]:
    kind, p = _quantum_medium(cp)
    w, wp, bh, bc = cp.omega, cp.omega_prime, cp.beta_h, cp.beta_c
    lead = stirling_leading(cp, kind.is_spin)
    if kind.is_harmonic or p.lam == 0.0:
        return lead
    if kind.is_spin:
        coeffs = (qab1_spin(w, wp, bh, bc), qbc1_spin(w, wp, bh, bc),
                  qcd1_spin(w, wp, bh, bc), qda1_spin(w, wp, bh, bc))
    else:
        coeffs = (qab1_ao(w, wp, bh, bc), qbc1_ao(w, wp, bh, bc),
                  qcd1_ao(w, wp, bh, bc), qda1_ao(w, wp, bh, bc))
    return tuple(q + p.lam * c for q, c in zip(lead, coeffs))  # type: ignore[return-value]


def _stirling_numeric_heats(cp: CycleParams) -> tuple[float, float, float, float]:
    kind, p = _quantum_medium(cp)
    w, wp, bh, bc = cp.omega, cp.omega_prime, cp.beta_h, cp.beta_c
    corner = lambda beta, omega: thermal_functions(kind, p.with_omega(omega), beta)
    a = corner(bc, w)
    b = corner(bc, wp)
    c = corner(bh, wp)
    d = corner(bh, w)
    q_ab = (b.s - a.s) / bc
    q_bc = c.u - b.u
    q_cd = (d.s - c.s) / bh
    q_da = a.u - d.u
    return q_ab, q_bc, q_cd, q_da


def stirling_ledger(cp: CycleParams, backend: Backend = Backend.CLOSED_FORM_O1) -> CycleLedger:
    """Evaluate one Stirling refrigeration cycle.

    Strokes: isothermal at T_c (omega -> omega'), isochoric heating at
    omega', isothermal at T_h (omega' -> omega), isochoric cooling at
    omega.  COP = (q_ab + q_bc) / |w| when w < 0.
    """
    kind, p = _quantum_medium(cp)
    if backend is Backend.CLOSED_FORM_O1:
        q_ab, q_bc, q_cd, q_da = _stirling_closed_heats(cp)
    else:
        q_ab, q_bc, q_cd, q_da = _stirling_numeric_heats(cp)
    work = q_ab + q_bc + q_cd + q_da
    cop = (q_ab + q_bc) / abs(work) if work < 0 else None
    valid, marginal = _oscillator_validity(
        kind, p,
        [(cp.beta_c, cp.omega), (cp.beta_c, cp.omega_prime),
         (cp.beta_h, cp.omega_prime), (cp.beta_h, cp.omega)],
    )
    flags = {
        "negative_work_condition": cp.stirling_negative_work,
        "partition_valid": valid,
        "partition_marginal": marginal,
        "truncation_converged": True,
    }
    return CycleLedger(
        cycle="stirling",
        backend=backend.value,
        heats={"q_ab": q_ab, "q_bc": q_bc, "q_cd": q_cd, "q_da": q_da},
        work=work,
        cop=cop,
        flags=flags,
    )


def stirling_cop_first_order(cp: CycleParams) -> float:
    """First-order Stirling COP: leading fraction plus lam times the
    medium's fixed linear coefficient."""
    kind, p = _quantum_medium(cp)
    w, wp, bh, bc = cp.omega, cp.omega_prime, cp.beta_h, cp.beta_c
    lead = stirling_cop_leading(cp, kind.is_spin)
    if kind.is_harmonic or p.lam == 0.0:
        return lead
    c1 = stirling_cop1_spin(w, wp, bh, bc) if kind.is_spin else stirling_cop1_ao(w, wp, bh, bc)
    return lead + p.lam * c1


def stirling_cop_first_order_from_heats(cp: CycleParams) -> float:
    """First-order Stirling COP rebuilt from the stroke-heat expansion."""
    kind, p = _quantum_medium(cp)
    w, wp, bh, bc = cp.omega, cp.omega_prime, cp.beta_h, cp.beta_c
    _guard_frequencies(w, wp)
    lead = stirling_leading(cp, kind.is_spin)
    if kind.is_spin:
        coeffs = (qab1_spin(w, wp, bh, bc), qbc1_spin(w, wp, bh, bc),
                  qcd1_spin(w, wp, bh, bc), qda1_spin(w, wp, bh, bc))
    else:
        coeffs = (qab1_ao(w, wp, bh, bc), qbc1_ao(w, wp, bh, bc),
                  qcd1_ao(w, wp, bh, bc), qda1_ao(w, wp, bh, bc))
    w0 = sum(lead)
    if w0 == 0:
        raise ValueError("degenerate cycle: leading net work vanishes")
    w1 = sum(coeffs)
    num0 = lead[0] + lead[1]
    num1 = coeffs[0] + coeffs[1]
    slope = (-num1 * w0 + num0 * w1) / w0**2
    return num0 / abs(w0) + p.lam * slope


# --------------------------------------------------------------------------
# classical endoreversible Otto cycle
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ClassicalOttoParams:
    """Stroke-endpoint inverse temperatures of the classical Otto cycle.

    The cold isochore runs beta_1 -> beta_4 (beta_1 >= beta_4), the hot one
    beta_3 -> beta_2 (beta_2 >= beta_3); equality degenerates the stroke.
    """

    omega: float
    omega_prime: float
    beta_1: float
    beta_2: float
    beta_3: float
    beta_4: float
    lam: float = 0.0

    def __post_init__(self) -> None:
        for name in ("omega", "omega_prime", "beta_1", "beta_2", "beta_3", "beta_4"):
            if not (getattr(self, name) > 0):
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if self.lam < 0:
            raise ValueError(f"lam must be non-negative, got {self.lam}")
        if not (self.beta_1 >= self.beta_4):
            raise ValueError("beta_1 must not be below beta_4 (cold isochore ordering)")
        if not (self.beta_2 >= self.beta_3):
            raise ValueError("beta_2 must not be below beta_3 (hot isochore ordering)")


def _e_classical(beta: float, omega: float, lam: float) -> float:
    s, e = classical_entropy_energy(beta, MediumParams(omega=omega, lam=lam))
    return e


def classical_otto_ledger(p: ClassicalOttoParams) -> CycleLedger:
    """Classical endoreversible Otto ledger from the first-order energies.

    q_c = E(beta_4, w') - E(beta_1, w'), q_h = E(beta_3, w) - E(beta_2, w),
    w_comp = E(beta_3, w) - E(beta_4, w'), w_exp = E(beta_2, w) - E(beta_1, w').
    Net work input w = q_h - q_c; COP = q_c / |w| when the cycle
    refrigerates (q_c > 0 and w > 0).
    """
    e1 = _e_classical(p.beta_1, p.omega_prime, p.lam)
    e2 = _e_classical(p.beta_2, p.omega, p.lam)
    e3 = _e_classical(p.beta_3, p.omega, p.lam)
    e4 = _e_classical(p.beta_4, p.omega_prime, p.lam)
    q_c = e4 - e1
    q_h = e3 - e2
    w_comp = e3 - e4
    w_exp = e2 - e1
    work = q_h - q_c
    cop = q_c / abs(work) if (q_c > 0 and work > 0) else None
    flags = {
        "negative_work_condition": q_c > 0 and work > 0,
        "partition_valid": all(
            3 * p.lam / (b * om**4) < 1.0
            for b, om in ((p.beta_1, p.omega_prime), (p.beta_4, p.omega_prime),
                          (p.beta_2, p.omega), (p.beta_3, p.omega))
        ),
        "partition_marginal": any(
            3 * p.lam / (b * om**4) > VALIDITY_SOFT_THRESHOLD
            for b, om in ((p.beta_1, p.omega_prime), (p.beta_4, p.omega_prime),
                          (p.beta_2, p.omega), (p.beta_3, p.omega))
        ),
        "truncation_converged": True,
    }
    return CycleLedger(
        cycle="classical-otto",
        backend=Backend.CLOSED_FORM_O1.value,
        heats={"q_c": q_c, "q_h": q_h, "w_comp": w_comp, "w_exp": w_exp},
        work=work,
        cop=cop,
        flags=flags,
    )


def classical_otto_cop_closed(p: ClassicalOttoParams) -> float:
    """Closed-form classical Otto COP, linear in lam.

    omega'/(omega-omega') + 3 lam (b1-b4)(b2-b3) /
    [b1 b2 b3 b4 (b1 b2 b3 - b2 b3 b4 + b3 b4 b1 - b4 b1 b2)^2] *
    [1/(b2 w^4) + 1/(b3 w^4) - 1/(b4 w'^4) - 1/(b1 w'^4)]
    """
    w, wp = p.omega, p.omega_prime
    _guard_frequencies(w, wp)
    b1, b2, b3, b4 = p.beta_1, p.beta_2, p.beta_3, p.beta_4
    comb = b1 * b2 * b3 - b2 * b3 * b4 + b3 * b4 * b1 - b4 * b1 * b2
    if comb == 0.0:
        raise ValueError("degenerate beta combination: squared prefactor denominator vanishes")
    bracket = 1 / (b2 * w**4) + 1 / (b3 * w**4) - 1 / (b4 * wp**4) - 1 / (b1 * wp**4)
    slope = 3 * (b1 - b4) * (b2 - b3) / (b1 * b2 * b3 * b4 * comb**2) * bracket
    return wp / (w - wp) + p.lam * slope


def classical_adiabat_solve(
    beta_start: float, from_freq: float, to_freq: float, lam: float
) -> float:
    """Inverse temperature after an entropy-preserving frequency change.

    Solves S(beta_out, to_freq) = S(beta_start, from_freq) for the
    classical first-order entropy by safeguarded Newton iteration from the
    harmonic seed beta_start * from_freq / to_freq; the returned root has
    |delta S| < 1e-12.
    """
    for name, val in (("beta_start", beta_start), ("from_freq", from_freq), ("to_freq", to_freq)):
        if not (val > 0):
            raise ValueError(f"{name} must be positive, got {val}")
    if lam < 0:
        raise ValueError(f"lam must be non-negative, got {lam}")

    def entropy(beta: float, omega: float) -> float:
        return 1.0 - math.log(beta * omega) - 6.0 * lam / (beta * omega**4)

    target = entropy(beta_start, from_freq)
    b = beta_start * from_freq / to_freq
    lo, hi = b / 16.0, b * 16.0
    for _ in range(100):
        f = entropy(b, to_freq) - target
        if abs(f) < 1e-12:
            return b
        fp = -1.0 / b + 6.0 * lam / (b * b * to_freq**4)
        step_ok = fp != 0.0
        if step_ok:
            b_new = b - f / fp
            step_ok = lo < b_new < hi
        if not step_ok:
            # bisect toward the side where the residual changes sign;
            # entropy decreases in beta inside the validity domain
            if f > 0:
                lo = b
            else:
                hi = b
            b_new = 0.5 * (lo + hi)
        else:
            if f > 0:
                lo = max(lo, b)
            else:
                hi = min(hi, b)
        b = b_new
    raise ConvergenceError(
        f"adiabat solve did not converge (beta_start={beta_start}, "
        f"{from_freq} -> {to_freq}, lam={lam}); likely outside the validity domain"
    )


def classical_adiabat_consistent_params(
    beta_cold: float, beta_hot: float, omega: float, omega_prime: float, lam: float = 0.0
) -> ClassicalOttoParams:
    """Build classical Otto params with beta_2, beta_4 on the adiabats.

    beta_1 = beta_cold and beta_3 = beta_hot are taken as the bath-side
    endpoints; beta_2 and beta_4 solve the two entropy-matching conditions.
    """
    beta_2 = classical_adiabat_solve(beta_cold, omega_prime, omega, lam)
    beta_4 = classical_adiabat_solve(beta_hot, omega, omega_prime, lam)
    return ClassicalOttoParams(
        omega=omega, omega_prime=omega_prime,
        beta_1=beta_cold, beta_2=beta_2, beta_3=beta_hot, beta_4=beta_4, lam=lam,
    )
