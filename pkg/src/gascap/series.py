"""High-temperature expansion apparatus: spectral sums, third-order
fugacity and capacity coefficients, power-law density-of-states moment
ratios, and the fermion-advantage / systematics conditions.

Coefficients are stored bare; the overall log2(e) prefactor of the
capacity expansion is applied at evaluation only.  Fermions are treated
spinless here: for spin degeneracy g > 1, fold g into the level
degeneracies instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .spectrum import LevelList
from .statmech import Species, solve_fugacity

__all__ = [
    "SpectralSums",
    "ExpansionCoefficients",
    "SeriesFugacityComparison",
    "spectral_sums",
    "fugacity_coefficients",
    "fugacity_series",
    "series_vs_exact_fugacity",
    "capacity_expansion",
    "dos_exponent",
    "moment_ratio_analytic",
    "fermion_advantage_condition",
    "alpha2_boson_sign",
    "systematics_condition",
]

LOG2E = 1.0 / math.log(2.0)

SERIES_REGIME_MAX = 0.1  # N/S_1 above this is outside the series regime


@dataclass(frozen=True)
class SpectralSums:
    """Spectral sums S_k = sum_i e^{-k beta eps_i} and
    D_k = sum_i beta eps_i e^{-k beta eps_i}, degeneracy weighted."""

    S: tuple[float, ...]
    D: tuple[float, ...]
    beta: float

    def s(self, k: int) -> float:
        return self.S[k - 1]

    def d(self, k: int) -> float:
        return self.D[k - 1]

    @property
    def kmax(self) -> int:
        return len(self.S)


def spectral_sums(spectrum: LevelList, beta: float, kmax: int = 3) -> SpectralSums:
    """Exact degeneracy-weighted spectral sums up to order ``kmax``.

    Requires a zero-shifted spectrum (lowest level at 0) so the sums
    match the expansion variable N/S_1.
    """
    if kmax < 1:
        raise ValueError("kmax must be >= 1")
    if not beta > 0.0:
        raise ValueError("inverse temperature must be positive")
    if spectrum.ground_energy != 0.0:
        raise ValueError("spectral sums need a zero-shifted spectrum")
    be = beta * spectrum.energies
    deg = spectrum.degeneracies
    s_vals = []
    d_vals = []
    for k in range(1, kmax + 1):
        w = np.exp(-k * be)
        s_vals.append(float(np.dot(deg, w)))
        d_vals.append(float(np.dot(deg, be * w)))
    return SpectralSums(S=tuple(s_vals), D=tuple(d_vals), beta=beta)


def _require_massive(species: Species):
    if species.is_photonlike:
        raise ValueError("the fugacity expansion applies to number-conserving species")
    if species.is_fermion and species.g != 1:
        raise ValueError("the expansion treats spinless fermions; fold the spin "
                         "degeneracy g into the level degeneracies instead")


def fugacity_coefficients(sums: SpectralSums, species: Species) -> tuple[float, float, float]:
    """Coefficients (c1, c2, c3) of z = sum_i c_i (N/S_1)^i.

    Bosons: (1, -S2/S1, (2 S2^2 - S1 S3)/S1^2); fermions flip the sign
    of the second coefficient only.
    """
    _require_massive(species)
    if sums.kmax < 3:
        raise ValueError("need spectral sums up to k = 3")
    s1, s2, s3 = sums.s(1), sums.s(2), sums.s(3)
    c2 = s2 / s1
    c3 = (2.0 * s2 * s2 - s1 * s3) / (s1 * s1)
    if species.is_fermion:
        return (1.0, c2, c3)
    return (1.0, -c2, c3)


def fugacity_series(sums: SpectralSums, species: Species, n: float) -> float:
    """Evaluate the cubic fugacity expansion at particle number ``n``."""
    c1, c2, c3 = fugacity_coefficients(sums, species)
    x = n / sums.s(1)
    return x * (c1 + x * (c2 + x * c3))


@dataclass(frozen=True)
class SeriesFugacityComparison:
    """Cubic-series fugacity against the exact constraint solve."""

    z_series: float
    z_exact: float
    gap: float
    x: float
    in_regime: bool


def series_vs_exact_fugacity(spectrum: LevelList, species: Species, n: float,
                             beta: float, rel_tol: float = 1e-10) -> SeriesFugacityComparison:
    """Compare the cubic fugacity series with the exact solve.

    ``in_regime`` flags N/S_1 < 0.1; outside it the cubic is reported but
    not trustworthy.  The absolute truncation error scales as (N/S_1)^4,
    hence the relative gap as (N/S_1)^3.
    """
    sums = spectral_sums(spectrum, beta, kmax=3)
    x = n / sums.s(1)
    z_series = fugacity_series(sums, species, n)
    z_exact = solve_fugacity(spectrum, species, n, beta, rel_tol=rel_tol).z
    gap = abs(z_series - z_exact) / z_exact
    return SeriesFugacityComparison(
        z_series=z_series, z_exact=z_exact, gap=gap, x=x,
        in_regime=bool(x < SERIES_REGIME_MAX))


@dataclass(frozen=True)
class ExpansionCoefficients:
    """Third-order capacity expansion:

    C / log2(e) = sum_i alpha_i (N/S1)^i + beta1 (N/S1) ln(N/S1)
                  + beta2 (N/S1)^2 ln(N/S1).

    ``fugacity`` carries the matching (c1, c2, c3); ``s1`` the evaluation
    scale S_1.
    """

    fugacity: tuple[float, float, float]
    alpha: tuple[float, float, float]
    beta_log: tuple[float, float]
    s1: float

    def capacity_series_bits(self, n: float) -> float:
        """Evaluate the truncated capacity expansion, in bits."""
        x = n / self.s1
        if not x > 0.0:
            raise ValueError("particle number must be positive")
        a1, a2, a3 = self.alpha
        b1, b2 = self.beta_log
        lx = math.log(x)
        nats = x * (a1 + x * (a2 + x * a3)) + (b1 * x + b2 * x * x) * lx
        return LOG2E * nats


def capacity_expansion(sums: SpectralSums, species: Species) -> ExpansionCoefficients:
    """Third-order coefficients of the capacity expansion in N/S_1.

    The first- and third-order coefficients and the log coefficients
    agree between bosons and fermions; only the second-order coefficient
    flips sign.  Writing the capacity as ln Z + beta E - N ln z and
    substituting the fugacity cubic gives

        alpha1 = S1 + D1
        alpha2 = +-(S2/2 - (S2/S1) D1 + D2)      (+ boson, - fermion)
        alpha3 = S3/3 - S2^2/(2 S1)
                 + ((2 S2^2 - S1 S3)/S1^2) D1 - (2 S2/S1) D2 + D3
        beta1  = -S1,  beta2 = 0

    (the only ln(N/S1) source is -N ln z with N = S1 x held exactly, so
    the x^2 ln x coefficient vanishes for both species; the truncation
    error is O(x^4)).
    """
    _require_massive(species)
    if sums.kmax < 3:
        raise ValueError("need spectral sums up to k = 3")
    s1, s2, s3 = sums.s(1), sums.s(2), sums.s(3)
    d1, d2, d3 = sums.d(1), sums.d(2), sums.d(3)
    a1 = s1 + d1
    a2_boson = 0.5 * s2 - (s2 / s1) * d1 + d2
    a3 = (s3 / 3.0 - s2 * s2 / (2.0 * s1)
          + ((2.0 * s2 * s2 - s1 * s3) / (s1 * s1)) * d1
          - (2.0 * s2 / s1) * d2 + d3)
    alpha = (a1, -a2_boson if species.is_fermion else a2_boson, a3)
    return ExpansionCoefficients(
        fugacity=fugacity_coefficients(sums, species),
        alpha=alpha, beta_log=(-s1, 0.0), s1=s1)


def dos_exponent(gamma: float, d: int) -> float:
    """Exponent eta of the power-law-trap density of states, eps^eta with
    eta = d/gamma + (d-2)/2."""
    if not gamma > 0.0:
        raise ValueError("power-law exponent must be positive")
    if d < 1:
        raise ValueError("dimension must be >= 1")
    return d / gamma + 0.5 * (d - 2)


def moment_ratio_analytic(gamma: float, d: int, k: int) -> float:
    """Continuum D_k/S_k for a power-law trap: (1/k)(d/gamma + d/2)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    eta = dos_exponent(gamma, d)
    if not eta > -1.0:
        raise ValueError("density of states not integrable: d/gamma + (d-2)/2 <= -1")
    return (d / gamma + 0.5 * d) / k


def fermion_advantage_condition(gamma: float, d: int) -> bool:
    """True when 1/gamma + 1/2 > 1/d strictly: the fermionic channel
    beats the bosonic one at sufficiently high temperature."""
    dos_exponent(gamma, d)  # validates arguments
    return 1.0 / gamma + 0.5 > 1.0 / d


def alpha2_boson_sign(gamma: float, d: int) -> int:
    """Predicted sign of the bosonic second-order coefficient,
    sign(1 - (d/gamma + d/2))."""
    dos_exponent(gamma, d)
    value = 1.0 - (d / gamma + 0.5 * d)
    return (value > 0.0) - (value < 0.0)


def systematics_condition(gamma: float, d: int) -> bool:
    """True when the expansion's beta-orders increase, i.e.
    2d/gamma + d > d/gamma + d/2 > 1; the binding part is
    d/gamma + d/2 > 1 (equivalent to the advantage condition)."""
    dos_exponent(gamma, d)
    return d / gamma + 0.5 * d > 1.0
