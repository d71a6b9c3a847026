"""Grand-canonical thermodynamics over a discrete spectrum.

All operations are pure functions of (spectrum, species, beta, z); the
constraint solver works in the fugacity z on the zero-shifted spectrum,
where the bosonic feasible set is the clean interval (0, 1).  Per-level
quantities are evaluated through t = beta*eps - ln z with expm1 /
log1p / logaddexp formulations, so high-energy tails and the
near-condensation regime stay accurate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .spectrum import LevelList, shift_to_zero

__all__ = [
    "Species",
    "BOSON",
    "PHOTONLIKE",
    "fermion",
    "GasState",
    "GasDomainError",
    "UnreachableNumberError",
    "ConvergenceError",
    "mean_occupation",
    "occupations",
    "total_number",
    "total_energy",
    "log_partition",
    "entropy_bits",
    "solve_fugacity",
    "gibbs_residual",
]

LOG2 = math.log(2.0)

# Upper clamp for the bosonic fugacity on a zero-shifted spectrum; the
# grand canonical constraint never saturates z = 1 at finite level count.
BOSE_Z_MAX = 1.0 - 2.0 ** -50

_MAX_BISECTIONS = 200
_REL_TOL = 1e-10


class GasDomainError(ValueError):
    """Evaluation outside the statistics' domain (condensation bound etc.)."""


class UnreachableNumberError(ValueError):
    """The requested mean particle number exceeds what the spectrum holds."""


class ConvergenceError(RuntimeError):
    """Constraint solve did not reach tolerance; carries the last residual."""

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


@dataclass(frozen=True)
class Species:
    """Particle statistics: ``boson``, ``fermion`` (spin degeneracy g) or
    ``photonlike`` (no number constraint, z = 1 identically)."""

    statistics: str
    g: int = 1

    def __post_init__(self):
        if self.statistics not in ("boson", "fermion", "photonlike"):
            raise ValueError(f"unknown statistics {self.statistics!r}")
        if self.g < 1:
            raise ValueError("spin degeneracy must be >= 1")
        if self.statistics != "fermion" and self.g != 1:
            raise ValueError("spin degeneracy applies to fermions only")

    @property
    def is_fermion(self) -> bool:
        return self.statistics == "fermion"

    @property
    def is_photonlike(self) -> bool:
        return self.statistics == "photonlike"


BOSON = Species("boson")
PHOTONLIKE = Species("photonlike")


def fermion(g: int = 1) -> Species:
    return Species("fermion", g=g)


def _check_domain(species: Species, spectrum: LevelList, beta: float, z: float):
    if beta <= 0.0:
        raise GasDomainError("inverse temperature must be positive")
    if not z > 0.0:
        raise GasDomainError("fugacity must be positive")
    if species.is_photonlike:
        if z != 1.0:
            raise GasDomainError("photonlike statistics fix z = 1")
        if spectrum.ground_energy <= 0.0:
            raise GasDomainError("divergent photonlike partition function: "
                                 "lowest level must be strictly positive")
    elif not species.is_fermion:
        if math.log(z) >= beta * spectrum.ground_energy:
            raise GasDomainError("fugacity at or above condensation bound")


def _occupations_u(spectrum: LevelList, species: Species, beta: float, u: float) -> np.ndarray:
    # u = ln z; t = beta*eps - u is positive for bosons below condensation.
    t = beta * spectrum.energies - u
    if species.is_fermion:
        return species.g * expit(-t)
    with np.errstate(over="ignore"):  # expm1 -> inf on deep tails; 1/inf = 0
        return 1.0 / np.expm1(t)


def _number_u(spectrum: LevelList, species: Species, beta: float, u: float) -> float:
    occ = _occupations_u(spectrum, species, beta, u)
    return float(np.dot(spectrum.degeneracies, occ))


def mean_occupation(species: Species, eps: float, beta: float, z: float) -> float:
    """Mean occupation of one level (per degenerate sublevel).

    Bosons/photonlike: ``z e^{-beta eps} / (1 - z e^{-beta eps})``;
    fermions: ``g z e^{-beta eps} / (1 + z e^{-beta eps})``.  The caller
    multiplies by the level degeneracy.
    """
    if not z > 0.0:
        raise GasDomainError("fugacity must be positive")
    if species.is_fermion:
        return species.g * float(expit(math.log(z) - beta * eps))
    if species.is_photonlike and z != 1.0:
        raise GasDomainError("photonlike statistics fix z = 1")
    t = beta * eps - math.log(z)
    if t <= 0.0:
        raise GasDomainError("fugacity at or above condensation bound")
    return 1.0 / math.expm1(t)


def occupations(spectrum: LevelList, species: Species, beta: float, z: float) -> np.ndarray:
    """Per-level mean occupations (per degenerate sublevel), vectorized."""
    _check_domain(species, spectrum, beta, z)
    return _occupations_u(spectrum, species, beta, math.log(z))


def total_number(spectrum: LevelList, species: Species, beta: float, z: float) -> float:
    """Degeneracy-weighted mean particle number; strictly increasing in z."""
    occ = occupations(spectrum, species, beta, z)
    return float(np.dot(spectrum.degeneracies, occ))


def total_energy(spectrum: LevelList, species: Species, beta: float, z: float) -> float:
    """Mean energy, including the ``offset * N`` correction when the
    spectrum was zero-shifted."""
    occ = spectrum.degeneracies * occupations(spectrum, species, beta, z)
    energy = float(np.dot(spectrum.energies, occ))
    if spectrum.offset != 0.0:
        energy += spectrum.offset * float(occ.sum())
    return energy


def log_partition(spectrum: LevelList, species: Species, beta: float, z: float) -> float:
    """ln of the grand canonical partition function on the stored energies."""
    _check_domain(species, spectrum, beta, z)
    t = beta * spectrum.energies - math.log(z)
    if species.is_fermion:
        per_level = species.g * np.logaddexp(0.0, -t)
    else:
        per_level = -np.log1p(-np.exp(-t))
    return float(np.dot(spectrum.degeneracies, per_level))


def _entropy_terms_nats(spectrum: LevelList, species: Species, beta: float, z: float) -> np.ndarray:
    t = beta * spectrum.energies - math.log(z)
    if species.is_fermion:
        # Binary entropy of the filling x = expit(-t); evaluated at |t|
        # (h(x) = h(1-x)) so both terms are positive and nothing cancels.
        ta = np.abs(t)
        return species.g * (np.logaddexp(0.0, -ta) + expit(-ta) * ta)
    with np.errstate(over="ignore"):
        nbar = 1.0 / np.expm1(t)
    return -np.log1p(-np.exp(-t)) + nbar * t


def entropy_bits(spectrum: LevelList, species: Species, beta: float, z: float) -> float:
    """Entropy of the grand canonical state in bits.

    Bosons/photonlike per mode: ``(1+n) log2(1+n) - n log2 n``; fermions
    per sublevel: ``g`` times the binary entropy of ``n/g``.  This equals
    the classical and the quantum capacity of the noiseless channel.
    """
    _check_domain(species, spectrum, beta, z)
    terms = _entropy_terms_nats(spectrum, species, beta, z)
    return float(np.dot(spectrum.degeneracies, terms)) / LOG2


@dataclass(frozen=True)
class GasState:
    """A solved grand-canonical state.

    ``spectrum`` is stored zero-shifted (its ``offset`` keeps the
    original scale), so 0 < z < 1 for bosons.  ``mu`` reports the
    chemical potential on the original energy scale.
    """

    beta: float
    z: float
    spectrum: LevelList
    species: Species

    @property
    def temperature(self) -> float:
        return 1.0 / self.beta

    @property
    def mu(self) -> float:
        if self.species.is_photonlike:
            return 0.0
        return self.spectrum.offset + math.log(self.z) / self.beta

    @property
    def n_total(self) -> float:
        return total_number(self.spectrum, self.species, self.beta, self.z)

    @property
    def energy(self) -> float:
        return total_energy(self.spectrum, self.species, self.beta, self.z)

    @property
    def capacity_bits(self) -> float:
        return entropy_bits(self.spectrum, self.species, self.beta, self.z)

    @property
    def ground_occupation(self) -> float:
        """Mean number in the lowest level (all its sublevels)."""
        occ = mean_occupation(self.species, self.spectrum.ground_energy, self.beta, self.z)
        return self.spectrum.ground_degeneracy * occ


def _bisect_u(spectrum, species, n_target, beta, u_lo, u_hi, best_u, best_res,
              rel_tol):
    """Monotone bisection for ln z on a straddling bracket."""
    u, residual = best_u, best_res
    for _ in range(_MAX_BISECTIONS):
        if residual <= rel_tol:
            return u, residual
        mid = 0.5 * (u_lo + u_hi)
        if not u_lo < mid < u_hi:
            break  # bracket exhausted at float resolution
        n_mid = _number_u(spectrum, species, beta, mid)
        r_mid = abs(n_mid - n_target) / n_target
        if r_mid < residual:
            u, residual = mid, r_mid
        if n_mid < n_target:
            u_lo = mid
        else:
            u_hi = mid
    if residual <= rel_tol:
        return u, residual
    raise ConvergenceError("fugacity bisection did not converge", residual)


def _solve_boson_u(spectrum: LevelList, n_target: float, beta: float,
                   rel_tol: float) -> float:
    u_max = math.log(BOSE_Z_MAX)
    n_hi = _number_u(spectrum, BOSON, beta, u_max)
    if n_hi < n_target:
        raise UnreachableNumberError(
            f"unreachable N: requested {n_target:g} but the spectrum holds at most "
            f"{n_hi:g} below the condensation bound; increase the cutoff")
    # Bisect on the fugacity interval (0, BOSE_Z_MAX), parametrized as
    # v = 1 - z so that float resolution stays fine near condensation,
    # where dN/dz diverges; u = ln z = log1p(-v) is exact there.
    v_lo, v_hi = 1.0 - BOSE_Z_MAX, 1.0
    u, residual = u_max, abs(n_hi - n_target) / n_target
    for _ in range(_MAX_BISECTIONS):
        if residual <= rel_tol:
            return u
        v_mid = 0.5 * (v_lo + v_hi)
        if not v_lo < v_mid < v_hi:
            break
        u_mid = math.log1p(-v_mid)
        n_mid = _number_u(spectrum, BOSON, beta, u_mid)
        r_mid = abs(n_mid - n_target) / n_target
        if r_mid < residual:
            u, residual = u_mid, r_mid
        if n_mid > n_target:
            v_lo = v_mid
        else:
            v_hi = v_mid
    if residual <= rel_tol:
        return u
    raise ConvergenceError("fugacity bisection did not converge", residual)


def _solve_fermion_u(spectrum: LevelList, species: Species, n_target: float,
                     beta: float, rel_tol: float) -> float:
    supremum = species.g * spectrum.total_states
    if n_target >= supremum:
        raise UnreachableNumberError(
            f"unreachable N: requested {n_target:g} but the spectrum holds at most "
            f"{supremum:g} fermions; increase the cutoff")
    # Grow the bracket by doubling (or halving) z until it straddles the
    # target; u steps of ln 2.  (best_u, best_res) stay a matched pair.
    u = 0.0
    n_at = _number_u(spectrum, species, beta, u)
    best_u, best_res = u, abs(n_at - n_target) / n_target
    if n_at < n_target:
        while n_at < n_target:
            u += LOG2
            if u > 700.0:
                raise UnreachableNumberError(
                    f"unreachable N: {n_target:g} is not attained at any finite fugacity")
            n_at = _number_u(spectrum, species, beta, u)
        u_lo, u_hi = u - LOG2, u
    else:
        while n_at > n_target:
            u -= LOG2
            if u < -700.0:
                raise UnreachableNumberError(
                    f"unreachable N: {n_target:g} is not attained at any positive fugacity")
            n_at = _number_u(spectrum, species, beta, u)
        u_lo, u_hi = u, u + LOG2
    r_at = abs(n_at - n_target) / n_target
    if r_at < best_res:
        best_u, best_res = u, r_at
    u_best, _ = _bisect_u(spectrum, species, n_target, beta, u_lo, u_hi,
                          best_u, best_res, rel_tol)
    return u_best


def solve_fugacity(spectrum: LevelList, species: Species, n_target: float,
                   beta: float, rel_tol: float = _REL_TOL) -> GasState:
    """Solve the particle-number constraint for the fugacity.

    The spectrum is zero-shifted internally before solving; the returned
    state satisfies ``|total_number - n_target| / n_target <= rel_tol``
    (default 1e-10).

    Raises
    ------
    UnreachableNumberError
        If ``n_target`` exceeds what the spectrum can hold (never
        silently clamped).
    ConvergenceError
        If bisection fails to reach tolerance within 200 iterations.
    """
    if species.is_photonlike:
        raise ValueError("photonlike species carry no number constraint")
    if not n_target > 0.0:
        raise ValueError("target particle number must be positive")
    if not beta > 0.0:
        raise GasDomainError("inverse temperature must be positive")
    if not 0.0 < rel_tol <= 1e-6:
        raise ValueError("rel_tol must be in (0, 1e-6]")
    shifted = shift_to_zero(spectrum)
    if species.is_fermion:
        u = _solve_fermion_u(shifted, species, n_target, beta, rel_tol)
    else:
        u = _solve_boson_u(shifted, n_target, beta, rel_tol)
    return GasState(beta=beta, z=math.exp(u), spectrum=shifted, species=species)


def gibbs_residual(state: GasState) -> float:
    """Relative defect of the open-system identity
    ``S ln2 = ln Z + beta (E - mu N)``; a self-consistency diagnostic."""
    s_nats = state.capacity_bits * LOG2
    log_z = log_partition(state.spectrum, state.species, state.beta, state.z)
    rhs = log_z + state.beta * (state.energy - state.mu * state.n_total)
    return abs(s_nats - rhs) / max(1.0, abs(s_nats))
