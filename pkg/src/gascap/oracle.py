"""Brute-force configuration enumeration on tiny systems.

Ground truth for the per-mode closed forms: every occupation tuple over
the sublevels is listed with weight z^n e^{-beta E}, and Shannon
entropy / moments of the normalized table are compared against the
grand-canonical formulas.  Test-harness scale only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .spectrum import LevelList
from .statmech import GasDomainError, Species

__all__ = [
    "ConfigurationTable",
    "enumerate_configurations",
    "brute_force_entropy_bits",
    "brute_force_moments",
    "boson_tail_bound_bits",
]

_MAX_MODES = 6
_MAX_TABLE = 2 ** 22


@dataclass(frozen=True)
class ConfigurationTable:
    """Flat enumeration of occupation configurations.

    ``weights`` are rescaled by exp(-log_scale) to dodge under/overflow;
    normalized probabilities and entropies are scale free, and
    ``log_scale + ln(sum(weights))`` recovers the true log-normalization.
    """

    total_n: np.ndarray
    total_e: np.ndarray
    weights: np.ndarray
    log_scale: float
    truncation: int


def enumerate_configurations(spectrum: LevelList, species: Species, m: int,
                             beta: float, z: float) -> ConfigurationTable:
    """Enumerate all occupation tuples with per-mode occupation <= m.

    One mode per degenerate sublevel (times g for fermions); fermionic
    modes are forced to occupations {0, 1}.
    """
    if m < 1:
        raise ValueError("per-mode truncation must be >= 1")
    if not beta > 0.0 or not z > 0.0:
        raise ValueError("beta and z must be positive")
    if species.is_photonlike:
        if z != 1.0:
            raise GasDomainError("photonlike statistics fix z = 1")
        if spectrum.ground_energy <= 0.0:
            raise GasDomainError("divergent photonlike partition function")
    per_mode = species.g if species.is_fermion else 1
    mode_energies = np.repeat(spectrum.energies, spectrum.degeneracies * per_mode)
    n_modes = mode_energies.size
    m_eff = 1 if species.is_fermion else m
    table_size = (m_eff + 1) ** n_modes
    if n_modes > _MAX_MODES or table_size > _MAX_TABLE:
        raise ValueError(
            f"oracle size guard exceeded: {n_modes} modes at truncation {m_eff} "
            f"gives {table_size} configurations")

    occ_grids = np.indices((m_eff + 1,) * n_modes)
    total_n = occ_grids.sum(axis=0).ravel()
    total_e = np.tensordot(mode_energies, occ_grids, axes=(0, 0)).ravel()
    log_w = total_n * math.log(z) - beta * total_e
    shift = float(log_w.max())
    return ConfigurationTable(
        total_n=total_n.astype(np.int64),
        total_e=total_e.astype(np.float64),
        weights=np.exp(log_w - shift),
        log_scale=shift,
        truncation=m_eff,
    )


def brute_force_entropy_bits(table: ConfigurationTable) -> float:
    """Shannon entropy (bits) of the normalized configuration weights."""
    p = table.weights / table.weights.sum()
    return float(-np.dot(p, np.log2(p)))


def brute_force_moments(table: ConfigurationTable) -> tuple[float, float, float]:
    """(mean_n, mean_e, log_norm) of the table; log_norm is the ln of the
    unnormalized weight total."""
    total = table.weights.sum()
    p = table.weights / total
    mean_n = float(np.dot(p, table.total_n))
    mean_e = float(np.dot(p, table.total_e))
    log_norm = table.log_scale + math.log(float(total))
    return mean_n, mean_e, log_norm


def boson_tail_bound_bits(spectrum: LevelList, m: int, beta: float, z: float) -> float:
    """Upper bound, in bits, on the entropy lost to truncating each
    bosonic mode's geometric distribution at occupation m.

    Per mode with weight w = z e^{-beta eps} < 1 the truncation gap is at
    most w^(m+1) (1 + (m+1) ln(1/w)) / (1 - w^(m+1)) nats.
    """
    log_w = math.log(z) - beta * spectrum.energies
    if np.any(log_w >= 0.0):
        raise GasDomainError("fugacity at or above condensation bound")
    wm = np.exp((m + 1) * log_w)
    per_mode = wm * (1.0 - (m + 1) * log_w) / (1.0 - wm)
    return float(np.dot(spectrum.degeneracies, per_mode)) / math.log(2.0)
