"""Capacity curves over temperature grids and their diagnostics.

A curve node carries the solved state's capacity (bits), energy,
chemical potential, fugacity and condensed fraction.  Post-processing
covers the four-point derivative stencil, the kink (fracture) locator
built on second differences of dC/dT, closed-form reference
temperatures, and log-log scaling fits.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import zeta

from .spectrum import LevelList, TrapDescriptor
from .statmech import (
    PHOTONLIKE,
    ConvergenceError,
    GasDomainError,
    GasState,
    Species,
    UnreachableNumberError,
    solve_fugacity,
    total_number,
)

__all__ = [
    "CurveSample",
    "CapacityCurve",
    "CurveError",
    "DerivativeCurve",
    "ReferenceTemperatures",
    "capacity_point",
    "photon_capacity_point",
    "capacity_curve",
    "photon_capacity_curve",
    "four_point_derivative",
    "derivative_curve",
    "second_differences",
    "fracture_locator",
    "kink_strength",
    "has_kink",
    "reference_temperatures",
    "reference_temperature",
    "scaling_exponent",
]

KINK_RATIO = 3.0  # max |second difference| vs its median; the null test
KINK_EDGE_GUARD = 3  # nodes at each window end where a peak is an artifact

_GRID_RTOL = 1e-9  # relative jitter allowed when checking grid uniformity


class CurveError(RuntimeError):
    """A grid node failed to solve; carries the offending temperature."""

    def __init__(self, temperature: float, cause: Exception):
        super().__init__(f"at T={temperature:.12g}: {cause}")
        self.temperature = temperature


@dataclass(frozen=True)
class CurveSample:
    """One solved point of a capacity curve."""

    T: float
    T_ref: float
    capacity_bits: float
    energy: float
    mu: float
    z: float
    ground_fraction: float
    n_total: float

    @property
    def T_over_ref(self) -> float:
        return self.T / self.T_ref


@dataclass(frozen=True)
class CapacityCurve:
    """Ordered samples over a strictly increasing temperature grid."""

    samples: tuple[CurveSample, ...]

    def __post_init__(self):
        temps = [s.T for s in self.samples]
        if len(temps) == 0:
            raise ValueError("curve needs at least one sample")
        if any(b <= a for a, b in zip(temps, temps[1:])):
            raise ValueError("curve temperatures must be strictly increasing")

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def temperatures(self) -> np.ndarray:
        return np.array([s.T for s in self.samples])

    @property
    def capacities(self) -> np.ndarray:
        return np.array([s.capacity_bits for s in self.samples])

    @property
    def energies(self) -> np.ndarray:
        return np.array([s.energy for s in self.samples])

    @property
    def t_ref(self) -> float:
        return self.samples[0].T_ref


@dataclass(frozen=True)
class DerivativeCurve:
    """Four-point-stencil derivative on the interior nodes of a curve."""

    temperatures: np.ndarray
    values: np.ndarray
    t_ref: float

    def __len__(self) -> int:
        return int(self.temperatures.size)


def _sample_from_state(state: GasState, T: float, t_ref: float, n: float) -> CurveSample:
    ground = state.ground_occupation
    return CurveSample(
        T=T,
        T_ref=t_ref,
        capacity_bits=state.capacity_bits,
        energy=state.energy,
        mu=state.mu,
        z=state.z,
        ground_fraction=min(1.0, ground / n),
        n_total=n,
    )


def capacity_point(spectrum: LevelList, species: Species, n: float, T: float,
                   t_ref: float = 1.0) -> CurveSample:
    """Solve the fugacity at temperature T and evaluate the curve fields.

    The capacity equals the entropy of the solved grand canonical state
    and is both the classical and the quantum capacity of the noiseless
    channel.
    """
    if not T > 0.0:
        raise ValueError("temperature must be positive")
    state = solve_fugacity(spectrum, species, n, 1.0 / T)
    return _sample_from_state(state, T, t_ref, n)


def photon_capacity_point(spectrum: LevelList, T: float, t_ref: float = 1.0) -> CurveSample:
    """Photonlike point: z = 1, no number constraint, needs eps_0 > 0.

    The reported particle number is the resulting mean total occupation.
    """
    if not T > 0.0:
        raise ValueError("temperature must be positive")
    beta = 1.0 / T
    n = total_number(spectrum, PHOTONLIKE, beta, 1.0)
    state = GasState(beta=beta, z=1.0, spectrum=spectrum, species=PHOTONLIKE)
    return _sample_from_state(state, T, t_ref, n)


def _evaluate_grid(point_fn, t_grid: Sequence[float], threads: int | None) -> CapacityCurve:
    temps = [float(t) for t in t_grid]
    if any(b <= a for a, b in zip(temps, temps[1:])):
        raise ValueError("temperature grid must be strictly increasing")

    def solve_node(T: float) -> CurveSample:
        try:
            return point_fn(T)
        except (GasDomainError, UnreachableNumberError, ConvergenceError) as exc:
            raise CurveError(T, exc) from exc

    # Results are consumed in grid order, so the first failing node (not
    # the first to finish) aborts the evaluation.
    if threads is not None and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            samples = tuple(pool.map(solve_node, temps))
    else:
        samples = tuple(solve_node(t) for t in temps)
    return CapacityCurve(samples)


def capacity_curve(spectrum: LevelList, species: Species, n: float,
                   t_grid: Sequence[float], t_ref: float = 1.0,
                   threads: int | None = None) -> CapacityCurve:
    """One :func:`capacity_point` per grid node (parallelizable; output
    ordered by grid index)."""
    return _evaluate_grid(
        lambda T: capacity_point(spectrum, species, n, T, t_ref), t_grid, threads)


def photon_capacity_curve(spectrum: LevelList, t_grid: Sequence[float],
                          t_ref: float = 1.0, threads: int | None = None) -> CapacityCurve:
    return _evaluate_grid(
        lambda T: photon_capacity_point(spectrum, T, t_ref), t_grid, threads)


def _uniform_spacing(temps: np.ndarray) -> float:
    steps = np.diff(temps)
    dx = float(steps.mean())
    if np.any(np.abs(steps - dx) > _GRID_RTOL * abs(dx)):
        raise ValueError("four-point stencil requires a uniform grid")
    return dx


def _stencil(values: np.ndarray, dx: float, index: int) -> float:
    # df/dx = [f(x-2h) - 8 f(x-h) + 8 f(x+h) - f(x+2h)] / (12 h) + O(h^4)
    return (values[index - 2] - 8.0 * values[index - 1]
            + 8.0 * values[index + 1] - values[index + 2]) / (12.0 * dx)


def four_point_derivative(curve: CapacityCurve, index: int) -> float:
    """Four-point first-derivative stencil of capacity at a grid node."""
    n = len(curve)
    if not 2 <= index <= n - 3:
        raise ValueError(f"index {index} has no two-node margin in a {n}-point curve")
    dx = _uniform_spacing(curve.temperatures)
    return _stencil(curve.capacities, dx, index)


def derivative_curve(curve: CapacityCurve, field: str = "capacity_bits") -> DerivativeCurve:
    """Apply the stencil across all interior nodes of a curve.

    ``field`` selects the differentiated quantity (``capacity_bits`` or
    ``energy``).
    """
    n = len(curve)
    if n < 5:
        raise ValueError("need at least 5 uniform samples for the stencil")
    temps = curve.temperatures
    dx = _uniform_spacing(temps)
    values = np.array([getattr(s, field) for s in curve.samples])
    idx = np.arange(2, n - 2)
    deriv = (values[idx - 2] - 8.0 * values[idx - 1]
             + 8.0 * values[idx + 1] - values[idx + 2]) / (12.0 * dx)
    return DerivativeCurve(temperatures=temps[idx], values=deriv, t_ref=curve.t_ref)


def second_differences(deriv: DerivativeCurve) -> np.ndarray:
    """Centered second differences of the derivative values."""
    v = deriv.values
    return v[2:] - 2.0 * v[1:-1] + v[:-2]


def fracture_locator(deriv: DerivativeCurve) -> float:
    """Temperature of the largest |second difference| of dC/dT, the
    kink estimate for the condensation onset."""
    if len(deriv) < 7:
        raise ValueError("need at least 7 derivative samples to locate a kink")
    _uniform_spacing(deriv.temperatures)
    d2 = np.abs(second_differences(deriv))
    return float(deriv.temperatures[1 + int(np.argmax(d2))])


def kink_strength(deriv: DerivativeCurve) -> tuple[float, float]:
    """(max, median) of |second differences| of the derivative curve."""
    if len(deriv) < 7:
        raise ValueError("need at least 7 derivative samples")
    d2 = np.abs(second_differences(deriv))
    return float(d2.max()), float(np.median(d2))


def has_kink(deriv: DerivativeCurve, ratio: float = KINK_RATIO,
             edge_guard: int = KINK_EDGE_GUARD) -> bool:
    """Kink criterion: max |second difference| >= ratio * median,
    provided the maximum is an interior peak.

    A curvature maximum within ``edge_guard`` nodes of the window ends is
    a sampling artifact (low-T activation, asymptotic flattening), not a
    condensation signature, and never counts as a kink.
    """
    d2 = np.abs(second_differences(deriv))
    if d2.size < 2 * edge_guard + 1:
        raise ValueError("too few derivative samples for the kink test")
    peak_at = int(np.argmax(d2))
    if peak_at < edge_guard or peak_at >= d2.size - edge_guard:
        return False
    peak = float(d2[peak_at])
    return peak > 0.0 and peak >= ratio * float(np.median(d2))


@dataclass(frozen=True)
class ReferenceTemperatures:
    """Closed-form condensation / Fermi temperatures in natural units.

    Entries are ``None`` when the formula does not apply to the trap.
    """

    tc_3d_harmonic: float | None = None
    tc_2d_harmonic: float | None = None
    tc_1d_harmonic: float | None = None
    tc_3d_box: float | None = None
    tf_harmonic: float | None = None
    tf_3d_box: float | None = None

    def as_dict(self) -> dict[str, float]:
        return {k: v for k, v in self.__dict__.items() if v is not None}


def reference_temperatures(trap: TrapDescriptor, n: float, g: int = 1) -> ReferenceTemperatures:
    """Evaluate the applicable reference-temperature formulas.

    Harmonic: Tc = w_ho (N/zeta(3))^(1/3) in 3D with w_ho the geometric
    mean of the frequency ratios, Tc = w_ho (N/zeta(2))^(1/2) in 2D,
    Tc = w N/ln(2N) in 1D, and Tf = w_ho (6N/g)^(1/3) in 3D.  Periodic
    box: Tc = (N/zeta(3/2))^(2/3)/pi and Tf = (6 pi^2 N/g)^(2/3)/(4 pi^2)
    in units of (2 pi hbar)^2/(2 m L^2).
    """
    if not n > 0.0:
        raise ValueError("particle number must be positive")
    if g < 1:
        raise ValueError("spin degeneracy must be >= 1")
    if trap.kind == "harmonic":
        w_ho = float(np.prod(trap.ratios)) ** (1.0 / trap.d)
        if trap.d == 3:
            return ReferenceTemperatures(
                tc_3d_harmonic=w_ho * (n / zeta(3.0)) ** (1.0 / 3.0),
                tf_harmonic=w_ho * (6.0 * n / g) ** (1.0 / 3.0),
            )
        if trap.d == 2:
            return ReferenceTemperatures(
                tc_2d_harmonic=w_ho * (n / zeta(2.0)) ** 0.5)
        if n <= 1.0:
            raise ValueError("1D condensation temperature needs N > 1")
        return ReferenceTemperatures(tc_1d_harmonic=w_ho * n / math.log(2.0 * n))
    if trap.kind == "box_periodic":
        return ReferenceTemperatures(
            tc_3d_box=(n / zeta(1.5)) ** (2.0 / 3.0) / math.pi,
            tf_3d_box=(6.0 * math.pi ** 2 * n / g) ** (2.0 / 3.0) / (4.0 * math.pi ** 2),
        )
    raise ValueError("no reference temperature formulas for power-law traps")


def reference_temperature(trap: TrapDescriptor, n: float, species: Species,
                          normalize: str = "tc") -> float:
    """The single normalizing temperature for a run: condensation (tc),
    Fermi (tf) or 1.0 (none)."""
    if normalize == "none":
        return 1.0
    refs = reference_temperatures(trap, n, species.g)
    if normalize == "tc":
        for value in (refs.tc_3d_harmonic, refs.tc_2d_harmonic,
                      refs.tc_1d_harmonic, refs.tc_3d_box):
            if value is not None:
                return value
        raise ValueError("no condensation temperature for this trap")
    if normalize == "tf":
        for value in (refs.tf_harmonic, refs.tf_3d_box):
            if value is not None:
                return value
        raise ValueError("no Fermi temperature for this trap")
    raise ValueError(f"unknown normalization {normalize!r}")


def scaling_exponent(curve: CapacityCurve, t_lo: float, t_hi: float) -> float:
    """Least-squares slope of log C vs log T over [t_lo, t_hi]."""
    temps = curve.temperatures
    caps = curve.capacities
    mask = (temps >= t_lo) & (temps <= t_hi)
    if int(mask.sum()) < 5:
        raise ValueError("need at least 5 samples inside the fit window")
    if np.any(caps[mask] <= 0.0):
        raise ValueError("all capacities in the fit window must be positive")
    x = np.log(temps[mask])
    y = np.log(caps[mask])
    x = x - x.mean()
    return float(np.dot(x, y - y.mean()) / np.dot(x, x))
