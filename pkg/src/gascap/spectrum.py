"""Discrete trap spectra as (energy, degeneracy) lists in natural units.

Harmonic energies are measured in units of the base trap quantum (the
smallest axis quantum when frequency ratios are supplied), periodic-box
energies in units of (2*pi*hbar)^2 / (2 m L^2).  Temperatures everywhere
use the same unit with k_B = 1.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "LevelList",
    "TrapDescriptor",
    "harmonic_levels",
    "box_levels_3d",
    "shift_to_zero",
    "restore_offset",
    "shifted_by",
    "harmonic_trap",
    "box_trap",
    "power_law_trap",
    "build_levels",
    "levels_to_csv",
]


@dataclass(frozen=True)
class LevelList:
    """Sorted single-particle spectrum with grouped degeneracies.

    Parameters
    ----------
    energies : ndarray
        Strictly increasing level energies (float64).
    degeneracies : ndarray
        Positive integer multiplicity of each level (int64).
    offset : float
        Energy subtracted by :func:`shift_to_zero`; zero for freshly
        built spectra.  ``energies + offset`` recovers the original
        scale.
    """

    energies: np.ndarray
    degeneracies: np.ndarray
    offset: float = 0.0

    def __post_init__(self):
        energies = np.ascontiguousarray(self.energies, dtype=np.float64)
        degeneracies = np.ascontiguousarray(self.degeneracies, dtype=np.int64)
        if energies.ndim != 1 or energies.size == 0:
            raise ValueError("spectrum must contain at least one level")
        if degeneracies.shape != energies.shape:
            raise ValueError("energies and degeneracies must have equal length")
        if np.any(np.diff(energies) <= 0.0):
            raise ValueError("level energies must be strictly increasing")
        if np.any(degeneracies < 1):
            raise ValueError("degeneracies must be >= 1")
        energies.setflags(write=False)
        degeneracies.setflags(write=False)
        object.__setattr__(self, "energies", energies)
        object.__setattr__(self, "degeneracies", degeneracies)
        object.__setattr__(self, "offset", float(self.offset))

    @property
    def num_levels(self) -> int:
        return int(self.energies.size)

    @property
    def total_states(self) -> int:
        """Total sublevel count, sum of all degeneracies."""
        return int(self.degeneracies.sum())

    @property
    def ground_energy(self) -> float:
        return float(self.energies[0])

    @property
    def ground_degeneracy(self) -> int:
        return int(self.degeneracies[0])


@dataclass(frozen=True)
class TrapDescriptor:
    """Trap geometry used for reference temperatures and level building.

    ``kind`` is one of ``"harmonic"`` (d in 1..3, integer frequency
    ratios), ``"box_periodic"`` (d = 3) or ``"power_law"`` (analytic
    only; no discrete levels).  ``cutoff`` is the per-axis quantum
    number bound: max quanta for harmonic axes, max |n_i| for the box.
    """

    kind: str
    d: int
    ratios: tuple[int, ...] = field(default=())
    gamma: float = float("nan")
    cutoff: int = 1

    def __post_init__(self):
        if self.kind not in ("harmonic", "box_periodic", "power_law"):
            raise ValueError(f"unknown trap kind {self.kind!r}")
        if self.kind == "harmonic":
            if not 1 <= self.d <= 3:
                raise ValueError("harmonic traps support d in 1..3")
            if len(self.ratios) != self.d:
                raise ValueError("need one frequency ratio per axis")
            if any(r <= 0 for r in self.ratios):
                raise ValueError("frequency ratios must be positive")
        elif self.kind == "box_periodic":
            if self.d != 3:
                raise ValueError("periodic box spectra are 3D only")
        else:
            if not self.gamma > 0:
                raise ValueError("power-law exponent must be positive")
            if self.d < 1:
                raise ValueError("dimension must be >= 1")
        if self.kind != "power_law" and self.cutoff < 1:
            raise ValueError("cutoff must be >= 1")


def harmonic_trap(d: int, ratios: Sequence[int] | None = None, cutoff: int = 1) -> TrapDescriptor:
    if ratios is None:
        ratios = (1,) * d
    return TrapDescriptor(kind="harmonic", d=d, ratios=tuple(int(r) for r in ratios), cutoff=cutoff)


def box_trap(cutoff: int) -> TrapDescriptor:
    return TrapDescriptor(kind="box_periodic", d=3, cutoff=cutoff)


def power_law_trap(gamma: float, d: int) -> TrapDescriptor:
    return TrapDescriptor(kind="power_law", d=d, gamma=float(gamma), cutoff=1)


def _as_integer_ratios(ratios: Iterable[float]) -> list[int]:
    # Grouping is exact integer arithmetic, so ratios must be (integral)
    # rationals; irrational ratios are out of scope.
    out = []
    for r in ratios:
        ri = int(round(float(r)))
        if ri < 1 or abs(float(r) - ri) > 0.0:
            raise ValueError(
                f"frequency ratio {r!r} is not a positive integer; "
                "supply ratios as exact integers p:q:r"
            )
        out.append(ri)
    return out


def harmonic_levels(d: int, ratios: Sequence[float], cutoff: int) -> LevelList:
    """Build the spectrum of a d-dimensional harmonic trap.

    Levels are all sums ``sum_j ratios[j] * n_j`` with ``0 <= n_j <=
    cutoff``, grouped exactly (integer arithmetic), without zero-point
    offset.  Degeneracies are found by convolving the per-axis
    occupation counts, so construction costs O(cutoff^2) rather than
    O(cutoff^d).

    Parameters
    ----------
    d : int
        Dimension, 1 to 3.
    ratios : sequence of int
        Positive integer frequency ratios, one per axis.
    cutoff : int
        Maximum quanta per axis (inclusive).

    Returns
    -------
    LevelList
        Ground state at energy 0 with total state count (cutoff+1)^d.
    """
    if not 1 <= d <= 3:
        raise ValueError("harmonic traps support d in 1..3")
    if cutoff < 1:
        raise ValueError("cutoff must be >= 1")
    ratios_i = _as_integer_ratios(ratios)
    if len(ratios_i) != d:
        raise ValueError("need one frequency ratio per axis")

    counts = np.ones(1, dtype=np.int64)
    for r in ratios_i:
        axis = np.zeros(r * cutoff + 1, dtype=np.int64)
        axis[:: r] = 1  # one state per quantum on this axis
        counts = np.convolve(counts, axis)
    nonzero = np.nonzero(counts)[0]
    return LevelList(nonzero.astype(np.float64), counts[nonzero])


def box_levels_3d(cutoff: int) -> LevelList:
    """Build the spectrum of a 3D cubic box with periodic boundaries.

    Levels are ``n_x^2 + n_y^2 + n_z^2`` with each ``n_i`` in
    ``-cutoff..cutoff``, grouped with lattice degeneracies.  The ground
    state sits at 0 with degeneracy 1 and the total state count is
    ``(2*cutoff + 1)**3``.
    """
    if cutoff < 1:
        raise ValueError("cutoff must be >= 1")
    axis_vals = np.arange(-cutoff, cutoff + 1, dtype=np.int64) ** 2
    axis_counts = np.bincount(axis_vals, minlength=cutoff * cutoff + 1).astype(np.int64)
    counts = np.convolve(np.convolve(axis_counts, axis_counts), axis_counts)
    nonzero = np.nonzero(counts)[0]
    return LevelList(nonzero.astype(np.float64), counts[nonzero])


def shift_to_zero(levels: LevelList) -> LevelList:
    """Subtract the lowest energy from every level, recording it in ``offset``."""
    e0 = levels.ground_energy
    if e0 == 0.0:
        return levels
    return LevelList(levels.energies - e0, levels.degeneracies, levels.offset + e0)


def restore_offset(levels: LevelList) -> LevelList:
    """Undo :func:`shift_to_zero` by adding the recorded offset back."""
    if levels.offset == 0.0:
        return levels
    return LevelList(levels.energies + levels.offset, levels.degeneracies, 0.0)


def shifted_by(levels: LevelList, c: float) -> LevelList:
    """Return a copy with all energies raised by ``c`` (offset untouched)."""
    return LevelList(levels.energies + c, levels.degeneracies, levels.offset)


def build_levels(trap: TrapDescriptor) -> LevelList:
    """Materialize the discrete spectrum of a trap descriptor."""
    if trap.kind == "harmonic":
        return harmonic_levels(trap.d, trap.ratios, trap.cutoff)
    if trap.kind == "box_periodic":
        return box_levels_3d(trap.cutoff)
    raise ValueError("power-law traps are analytic only; no discrete levels")


def levels_to_csv(levels: LevelList, stream=None) -> str:
    """Write ``energy,degeneracy`` rows for debugging; returns the text."""
    buf = io.StringIO()
    buf.write("energy,degeneracy\n")
    for e, g in zip(levels.energies, levels.degeneracies):
        buf.write(f"{e:.12g},{int(g)}\n")
    text = buf.getvalue()
    if stream is not None:
        stream.write(text)
    return text
