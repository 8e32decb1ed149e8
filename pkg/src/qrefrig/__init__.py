"""Quantum Otto and Stirling refrigeration cycles for harmonic,
quartic-anharmonic and spin-qubit working media, a classical
endoreversible Otto baseline, and the numerical oracles that validate
every first-order closed form."""

__version__ = "0.1.0"

from .errors import ConvergenceError, QrefrigError, TruncationError, ValidityDomainError
from .media import (
    Medium,
    MediumKind,
    MediumParams,
    SpinCalibration,
    Spectrum,
    ao_level,
    ao_partition_first_order,
    ao_spectrum,
    classical_entropy_energy,
    classical_partition,
    harmonic_partition,
    spin_calibration,
    spin_levels,
    spin_partition,
)
from .thermo import (
    EnergyCost,
    ThermalFunctions,
    energy_cost,
    energy_cost_ao,
    energy_cost_spin,
    finite_difference_consistency,
    gibbs_populations,
    thermal_functions,
)
from .cycles import (
    Backend,
    ClassicalOttoParams,
    CycleLedger,
    CycleParams,
    classical_adiabat_consistent_params,
    classical_adiabat_solve,
    classical_otto_cop_closed,
    classical_otto_ledger,
    otto_cop_first_order,
    otto_cop_first_order_from_heats,
    otto_ledger,
    otto_slope_ratio,
    stirling_cop_first_order,
    stirling_cop_first_order_from_heats,
    stirling_ledger,
)
from .oracle import (
    BasisConfig,
    OrderReport,
    QuadratureConfig,
    ao_exact_spectrum,
    classical_partition_quadrature,
    gibbs_sum_exact,
    order_check,
    otto_ledger_exact,
    position_matrix,
)

__all__ = [name for name in dir() if not name.startswith("_")]
