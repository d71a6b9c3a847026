"""Channel capacities of trapped ideal Bose and Fermi gases.

Builds discrete trap spectra, solves the grand-canonical particle-number
constraint, and evaluates the entropy that equals the classical and
quantum capacity of a noiseless channel, together with condensation
diagnostics and the high-temperature series apparatus.
"""

from .capacity import (
    CapacityCurve,
    CurveError,
    CurveSample,
    DerivativeCurve,
    ReferenceTemperatures,
    capacity_curve,
    capacity_point,
    derivative_curve,
    four_point_derivative,
    fracture_locator,
    has_kink,
    kink_strength,
    photon_capacity_curve,
    photon_capacity_point,
    reference_temperature,
    reference_temperatures,
    scaling_exponent,
)
from .oracle import (
    ConfigurationTable,
    boson_tail_bound_bits,
    brute_force_entropy_bits,
    brute_force_moments,
    enumerate_configurations,
)
from .series import (
    ExpansionCoefficients,
    SeriesFugacityComparison,
    SpectralSums,
    alpha2_boson_sign,
    capacity_expansion,
    dos_exponent,
    fermion_advantage_condition,
    fugacity_coefficients,
    fugacity_series,
    moment_ratio_analytic,
    series_vs_exact_fugacity,
    spectral_sums,
    systematics_condition,
)
from .spectrum import (
    LevelList,
    TrapDescriptor,
    box_levels_3d,
    box_trap,
    build_levels,
    harmonic_levels,
    harmonic_trap,
    levels_to_csv,
    power_law_trap,
    restore_offset,
    shift_to_zero,
    shifted_by,
)
from .statmech import (
    BOSON,
    PHOTONLIKE,
    ConvergenceError,
    GasDomainError,
    GasState,
    Species,
    UnreachableNumberError,
    entropy_bits,
    fermion,
    gibbs_residual,
    log_partition,
    mean_occupation,
    occupations,
    solve_fugacity,
    total_energy,
    total_number,
)

__version__ = "0.1.0"
