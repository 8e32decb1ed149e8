"""Independent numerical ground truth for the first-order formulas.

Three oracles live here:

* exact quartic-oscillator spectra from dense diagonalization in a
  truncated number basis, with a basis-doubling convergence check,
* exact Gibbs sums over those spectra,
* classical phase-space partition/energy by refined composite quadrature.

On top of them, :func:`order_check` measures the order of accuracy of any
registered first-order quantity by the halving test: if the closed form
is first order, err(lam) / err(lam/2) should sit near 4.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConvergenceError, TruncationError
from .media import (
    Medium,
    MediumKind,
    MediumParams,
    Spectrum,
    ao_level,
    ao_partition_first_order,
    classical_partition,
)
from .cycles import (
    Backend,
    ClassicalOttoParams,
    CycleParams,
    classical_otto_ledger,
    otto_cop_first_order,
    otto_ledger,
    stirling_cop_first_order,
    stirling_ledger,
)
from .thermo import TAIL_BOUND, oscillator_level_count

RATIO_WINDOW = (3.2, 4.8)

# shared cycle parameter set used by the registered cycle quantities
_W, _WP, _BH, _BC = 5.0, 4.0, 0.5, 1.0


@dataclass(frozen=True)
class BasisConfig:
    """Truncated-basis diagonalization settings.

    Only the lowest ``trust_fraction`` of the eigenvalues are convergence
    candidates; a level counts as converged when it moves by less than
    ``level_tol`` under basis doubling.  The basis grows from ``size`` up
    to ``max_size`` until the requested number of levels has converged.
    """

    size: int = 128
    trust_fraction: float = 0.5
    level_tol: float = 1e-8
    max_size: int = 1024

    def __post_init__(self) -> None:
        if self.size < 8:
            raise ValueError(f"basis size must be at least 8, got {self.size}")
        if not (0 < self.trust_fraction <= 1):
            raise ValueError(f"trust_fraction must be in (0, 1], got {self.trust_fraction}")
        if self.max_size < self.size:
            raise ValueError("max_size must be at least size")


@dataclass(frozen=True)
class QuadratureConfig:
    """Classical phase-space quadrature settings.

    The integration domain is cut where beta * V(x) reaches
    ``action_cutoff`` (tail below 1e-17 of the peak at the default 40);
    the composite rule halves its step until the relative change drops
    below ``rel_tol``.
    """

    action_cutoff: float = 40.0
    rel_tol: float = 1e-10
    max_levels: int = 30


@dataclass(frozen=True)
class OrderReport:
    """Halving-test outcome for one first-order quantity."""

    quantity: str
    lam: float
    err: float
    err_half: float
    ratio: float | None
    passed: bool


def position_matrix(omega: float, n: int) -> np.ndarray:
    """Position operator in the lowest n number states: tridiagonal with
    off-diagonal sqrt((k+1) / (2 omega))."""
    if n < 2:
        raise ValueError(f"matrix size must be at least 2, got {n}")
    if not (omega > 0):
        raise ValueError(f"omega must be positive, got {omega}")
    off = np.sqrt(np.arange(1, n) / (2.0 * omega))
    return np.diag(off, 1) + np.diag(off, -1)


def ao_hamiltonian(p: MediumParams, n: int) -> np.ndarray:
    """Projection of the quartic-oscillator Hamiltonian onto n states.

    The x^4 block is taken from a matrix four states larger, so the
    result is the true principal submatrix of the infinite operator and
    its eigenvalues decrease monotonically with n.
    """
    x = position_matrix(p.omega, n + 4)
    x4 = np.linalg.matrix_power(x, 4)[:n, :n]
    return np.diag((np.arange(n) + 0.5) * p.omega) + p.lam * x4


def ao_exact_spectrum(
    p: MediumParams, cfg: BasisConfig | None = None, min_levels: int = 2
) -> Spectrum:
    """Converged exact levels of the quartic oscillator.

    Diagonalizes at basis sizes N and 2N and keeps the leading run of
    levels that agree to ``level_tol``, doubling N as needed.  Raises
    :class:`ConvergenceError` when fewer than ``min_levels`` levels
    (never fewer than 2) converge at ``max_size``.
    """
    cfg = cfg or BasisConfig()
    min_levels = max(min_levels, 2)
    size = cfg.size
    while True:
        e_n = np.linalg.eigvalsh(ao_hamiltonian(p, size))
        e_2n = np.linalg.eigvalsh(ao_hamiltonian(p, 2 * size))
        k = max(int(size * cfg.trust_fraction), 1)
        agree = np.abs(e_n[:k] - e_2n[:k]) < cfg.level_tol
        count = int(np.argmin(agree)) if not agree.all() else k
        if count >= min_levels:
            return Spectrum(levels=e_2n[:count].copy(), truncation=count)
        if 2 * size >= cfg.max_size:
            raise ConvergenceError(
                f"only {count} levels converged at basis size {2 * size} "
                f"(requested {min_levels}; omega={p.omega}, lam={p.lam})"
            )
        size *= 2


def gibbs_sum_exact(spec: Spectrum, beta: float) -> float:
    """Partition value over converged levels, with the Gibbs tail bound."""
    if not (beta > 0):
        raise ValueError(f"beta must be positive, got {beta}")
    levels = spec.levels
    terms = np.exp(-beta * (levels - levels[0]))
    if not spec.complete and terms[-1] >= TAIL_BOUND * terms.sum():
        raise TruncationError(
            f"Gibbs tail bound unmet with {len(levels)} converged levels at beta={beta}"
        )
    return float(terms.sum() * math.exp(-beta * levels[0]))


def thermal_exact(spec: Spectrum, beta: float) -> tuple[float, float, float]:
    """(Z, U, S) by exact Gibbs sums over a converged spectrum."""
    z = gibbs_sum_exact(spec, beta)
    weights = np.exp(-beta * (spec.levels - spec.levels[0]))
    pops = weights / weights.sum()
    u = float(np.dot(spec.levels, pops))
    s = math.log(z) + beta * u
    return z, u, s


# --------------------------------------------------------------------------
# classical quadrature
# --------------------------------------------------------------------------

def _x_cutoff(beta: float, p: MediumParams, cutoff: float) -> float:
    # solve beta (w^2 x^2 / 2 + lam x^4) = cutoff for x > 0
    if p.lam == 0.0:
        return math.sqrt(2.0 * cutoff / (beta * p.omega**2))
    a = beta * p.lam
    b = 0.5 * beta * p.omega**2
    y = (-b + math.sqrt(b * b + 4.0 * a * cutoff)) / (2.0 * a)
    return math.sqrt(y)


def _refine_simpson(
    f: Callable[[np.ndarray], np.ndarray], a: float, b: float, cfg: QuadratureConfig
) -> float:
    n = 16
    prev = None
    for _ in range(cfg.max_levels):
        x = np.linspace(a, b, n + 1)
        y = f(x)
        h = (b - a) / n
        cur = h / 3.0 * (y[0] + y[-1] + 4.0 * y[1:-1:2].sum() + 2.0 * y[2:-2:2].sum())
        if prev is not None and abs(cur - prev) <= cfg.rel_tol * abs(cur):
            return float(cur)
        prev = cur
        n *= 2
    raise ConvergenceError(f"quadrature did not settle within {cfg.max_levels} refinements")


def classical_partition_quadrature(
    beta: float, p: MediumParams, cfg: QuadratureConfig | None = None
) -> float:
    """Classical partition value by direct phase-space quadrature.

    (1 / 2 pi) sqrt(2 pi / beta) * integral of exp(-beta V(x)) over the
    cut domain; equals 1/(beta omega) at lam = 0 to 1e-10 relative.
    """
    if not (beta > 0):
        raise ValueError(f"beta must be positive, got {beta}")
    cfg = cfg or QuadratureConfig()
    xm = _x_cutoff(beta, p, cfg.action_cutoff)
    w2, lam = p.omega**2, p.lam

    def boltzmann(x: np.ndarray) -> np.ndarray:
        return np.exp(-beta * (0.5 * w2 * x * x + lam * x**4))

    integral = _refine_simpson(boltzmann, -xm, xm, cfg)
    return math.sqrt(2.0 * math.pi / beta) * integral / (2.0 * math.pi)


def classical_energy_quadrature(
    beta: float, p: MediumParams, cfg: QuadratureConfig | None = None
) -> float:
    """Classical mean energy 1/(2 beta) + <V> by quadrature."""
    if not (beta > 0):
        raise ValueError(f"beta must be positive, got {beta}")
    cfg = cfg or QuadratureConfig()
    xm = _x_cutoff(beta, p, cfg.action_cutoff)
    w2, lam = p.omega**2, p.lam

    def v(x: np.ndarray) -> np.ndarray:
        return 0.5 * w2 * x * x + lam * x**4

    z_x = _refine_simpson(lambda x: np.exp(-beta * v(x)), -xm, xm, cfg)
    v_x = _refine_simpson(lambda x: v(x) * np.exp(-beta * v(x)), -xm, xm, cfg)
    return 0.5 / beta + v_x / z_x


def classical_entropy_quadrature(
    beta: float, p: MediumParams, cfg: QuadratureConfig | None = None
) -> float:
    """Classical entropy ln Z + beta U with both factors from quadrature."""
    z = classical_partition_quadrature(beta, p, cfg)
    u = classical_energy_quadrature(beta, p, cfg)
    return math.log(z) + beta * u


# --------------------------------------------------------------------------
# order-of-accuracy checks
# --------------------------------------------------------------------------

def _ao_params(lam: float, omega: float = 1.0) -> MediumParams:
    return MediumParams(omega=omega, lam=lam, omega0=1.0)


def _cycle_params(kind: MediumKind, lam: float) -> CycleParams:
    return CycleParams(
        omega=_W, omega_prime=_WP, beta_h=_BH, beta_c=_BC,
        medium=Medium(kind, MediumParams(omega=_W, lam=lam, omega0=1.0)),
    )


def otto_ledger_exact(cp: CycleParams, cfg: BasisConfig | None = None):
    """Numeric Otto ledger over exact diagonalized spectra.

    Spin media fall back to the plain numeric ledger, whose two-level
    sums are already exact for that model.
    """
    if cp.medium.kind.is_spin:
        return otto_ledger(cp, Backend.NUMERIC)
    p = cp.medium.params
    n_hot = oscillator_level_count(cp.beta_h, cp.omega)
    n_cold = oscillator_level_count(cp.beta_c, cp.omega_prime)
    need = max(n_hot, n_cold)
    spec_hot = ao_exact_spectrum(p.with_omega(cp.omega), cfg, min_levels=need)
    spec_cold = ao_exact_spectrum(p.with_omega(cp.omega_prime), cfg, min_levels=need)
    return otto_ledger(cp, Backend.NUMERIC, spectra=(spec_hot, spec_cold))


def stirling_heats_exact(
    cp: CycleParams, cfg: BasisConfig | None = None
) -> tuple[float, float, float, float]:
    """Stirling stroke heats from exact-spectrum thermal functions."""
    p = cp.medium.params
    need = max(
        oscillator_level_count(cp.beta_h, cp.omega_prime),
        oscillator_level_count(cp.beta_h, cp.omega),
    )
    spec_w = ao_exact_spectrum(p.with_omega(cp.omega), cfg, min_levels=need)
    spec_wp = ao_exact_spectrum(p.with_omega(cp.omega_prime), cfg, min_levels=need)
    _, u_a, s_a = thermal_exact(spec_w, cp.beta_c)
    _, u_b, s_b = thermal_exact(spec_wp, cp.beta_c)
    _, u_c, s_c = thermal_exact(spec_wp, cp.beta_h)
    _, u_d, s_d = thermal_exact(spec_w, cp.beta_h)
    return (
        (s_b - s_a) / cp.beta_c,
        u_c - u_b,
        (s_d - s_c) / cp.beta_h,
        u_a - u_d,
    )


def _stirling_cop_exact(cp: CycleParams) -> float:
    q = stirling_heats_exact(cp)
    return (q[0] + q[1]) / abs(sum(q))


def _pair(closed: Callable[[float], float], oracle: Callable[[float], float]):
    return lambda lam: (closed(lam), oracle(lam))


def _otto_closed_heat(lam: float, key: str) -> float:
    cp = _cycle_params(MediumKind.QUANTUM_ANHARMONIC, lam)
    return otto_ledger(cp, Backend.CLOSED_FORM_O1).heats[key]


def _otto_exact_heat(lam: float, key: str) -> float:
    cp = _cycle_params(MediumKind.QUANTUM_ANHARMONIC, lam)
    return otto_ledger_exact(cp).heats[key]


def _stirling_closed_heat(lam: float, idx: int) -> float:
    cp = _cycle_params(MediumKind.QUANTUM_ANHARMONIC, lam)
    led = stirling_ledger(cp, Backend.CLOSED_FORM_O1)
    return list(led.heats.values())[idx]


def _stirling_exact_heat(lam: float, idx: int) -> float:
    cp = _cycle_params(MediumKind.QUANTUM_ANHARMONIC, lam)
    return stirling_heats_exact(cp)[idx]


def _classical_params(lam: float) -> ClassicalOttoParams:
    # adiabat-consistent endpoints of the lam = 0 cycle
    return ClassicalOttoParams(
        omega=_W, omega_prime=_WP, beta_1=1.0, beta_2=0.8, beta_3=0.5, beta_4=0.625, lam=lam
    )


def _classical_heat_closed(lam: float, key: str) -> float:
    return classical_otto_ledger(_classical_params(lam)).heats[key]


def _classical_heat_quadrature(lam: float, key: str) -> float:
    p = _classical_params(lam)
    e = lambda beta, omega: classical_energy_quadrature(beta, MediumParams(omega=omega, lam=lam))
    if key == "q_c":
        return e(p.beta_4, p.omega_prime) - e(p.beta_1, p.omega_prime)
    return e(p.beta_3, p.omega) - e(p.beta_2, p.omega)


def _spin_numeric_otto_cop(lam: float) -> float:
    cp = _cycle_params(MediumKind.SPIN_ANHARMONIC, lam)
    return otto_ledger(cp, Backend.NUMERIC).cop


def _spin_numeric_stirling_cop(lam: float) -> float:
    cp = _cycle_params(MediumKind.SPIN_ANHARMONIC, lam)
    return stirling_ledger(cp, Backend.NUMERIC).cop


ORDER_CHECK_QUANTITIES: dict[str, Callable[[float], tuple[float, float]]] = {
    "ao-level-0": _pair(lambda l: ao_level(0, _ao_params(l)),
                        lambda l: float(ao_exact_spectrum(_ao_params(l)).levels[0])),
    "ao-level-1": _pair(lambda l: ao_level(1, _ao_params(l)),
                        lambda l: float(ao_exact_spectrum(_ao_params(l)).levels[1])),
    "ao-level-2": _pair(lambda l: ao_level(2, _ao_params(l)),
                        lambda l: float(ao_exact_spectrum(_ao_params(l)).levels[2])),
    "z-ao": _pair(lambda l: ao_partition_first_order(1.0, _ao_params(l)),
                  lambda l: gibbs_sum_exact(ao_exact_spectrum(_ao_params(l), min_levels=48), 1.0)),
    "z-classical": _pair(lambda l: classical_partition(1.0, _ao_params(l)),
                         lambda l: classical_partition_quadrature(1.0, _ao_params(l))),
    "otto-qc-ao": _pair(lambda l: _otto_closed_heat(l, "q_c"), lambda l: _otto_exact_heat(l, "q_c")),
    "otto-qh-ao": _pair(lambda l: _otto_closed_heat(l, "q_h"), lambda l: _otto_exact_heat(l, "q_h")),
    "stirling-qab-ao": _pair(lambda l: _stirling_closed_heat(l, 0), lambda l: _stirling_exact_heat(l, 0)),
    "stirling-qbc-ao": _pair(lambda l: _stirling_closed_heat(l, 1), lambda l: _stirling_exact_heat(l, 1)),
    "stirling-qcd-ao": _pair(lambda l: _stirling_closed_heat(l, 2), lambda l: _stirling_exact_heat(l, 2)),
    "stirling-qda-ao": _pair(lambda l: _stirling_closed_heat(l, 3), lambda l: _stirling_exact_heat(l, 3)),
    "classical-qc": _pair(lambda l: _classical_heat_closed(l, "q_c"),
                          lambda l: _classical_heat_quadrature(l, "q_c")),
    "classical-qh": _pair(lambda l: _classical_heat_closed(l, "q_h"),
                          lambda l: _classical_heat_quadrature(l, "q_h")),
    "cop-otto-ao": _pair(lambda l: otto_cop_first_order(_cycle_params(MediumKind.QUANTUM_ANHARMONIC, l)),
                         lambda l: otto_ledger_exact(_cycle_params(MediumKind.QUANTUM_ANHARMONIC, l)).cop),
    "cop-otto-spin": _pair(lambda l: otto_cop_first_order(_cycle_params(MediumKind.SPIN_ANHARMONIC, l)),
                           _spin_numeric_otto_cop),
    "cop-stirling-ao": _pair(lambda l: stirling_cop_first_order(_cycle_params(MediumKind.QUANTUM_ANHARMONIC, l)),
                             lambda l: _stirling_cop_exact(_cycle_params(MediumKind.QUANTUM_ANHARMONIC, l))),
    "cop-stirling-spin": _pair(lambda l: stirling_cop_first_order(_cycle_params(MediumKind.SPIN_ANHARMONIC, l)),
                               _spin_numeric_stirling_cop),
}

# default lambda for each quantity class: cycle quantities probe at 0.2,
# spectral ones at 0.02
SPECTRAL_QUANTITIES = ("ao-level-0", "ao-level-1", "ao-level-2", "z-ao", "z-classical")


def default_lambda(quantity: str) -> float:
    return 0.02 if quantity in SPECTRAL_QUANTITIES else 0.2


def order_check(quantity: str, lam: float) -> OrderReport:
    """Halving test of one registered first-order quantity.

    err(lam) and err(lam/2) are the absolute closed-vs-oracle deviations;
    the test passes when their ratio falls in [3.2, 4.8] (or when both
    vanish, the lam = 0 convention).
    """
    if quantity not in ORDER_CHECK_QUANTITIES:
        raise ValueError(
            f"unknown quantity {quantity!r}; choose from {sorted(ORDER_CHECK_QUANTITIES)}"
        )
    if lam < 0:
        raise ValueError("lam must be non-negative")
    fn = ORDER_CHECK_QUANTITIES[quantity]
    closed, oracle = fn(lam)
    err = abs(closed - oracle)
    if lam == 0.0:
        return OrderReport(quantity, lam, err, 0.0, None, passed=err == 0.0)
    closed_h, oracle_h = fn(lam / 2)
    err_half = abs(closed_h - oracle_h)
    if err_half == 0.0:
        return OrderReport(quantity, lam, err, err_half, None, passed=err == 0.0)
    ratio = err / err_half
    return OrderReport(
        quantity, lam, err, err_half, ratio,
        passed=RATIO_WINDOW[0] <= ratio <= RATIO_WINDOW[1],
    )
