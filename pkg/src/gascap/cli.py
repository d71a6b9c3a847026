"""Command-line surface: figure data as CSV, series checks, reference
temperatures.

Every run is deterministic: identical configuration produces
byte-identical output (values printed with 12 significant digits,
rows ordered by grid index regardless of worker scheduling).

Exit codes: 0 success, 1 numerical failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import dataclass, replace

import numpy as np

from . import capacity as cap
from . import series as ser
from .spectrum import LevelList, TrapDescriptor, box_levels_3d, box_trap, harmonic_levels, harmonic_trap, shifted_by
from .statmech import (
    BOSON,
    PHOTONLIKE,
    ConvergenceError,
    GasDomainError,
    Species,
    UnreachableNumberError,
    fermion,
)

__all__ = ["main", "RunConfig", "load_config"]

EXIT_OK = 0
EXIT_NUMERICAL = 1
EXIT_USAGE = 2

_NUMERICAL_ERRORS = (GasDomainError, UnreachableNumberError, ConvergenceError,
                     cap.CurveError)


def _fmt(x: float) -> str:
    return f"{x:.12g}"


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    """Resolved run parameters shared by the curve-producing commands."""

    trap: str = "harmonic"
    dim: int = 3
    ratios: tuple[int, ...] = ()
    cutoff: int = 120
    species: str = "boson"
    g: int = 1
    n: float = 1000.0
    tmin: float = 0.1
    tmax: float = 1.6
    points: int = 200
    normalize: str = ""
    derivative: bool = False
    fracture: bool = False
    kink_ratio: float = cap.KINK_RATIO
    kink_guard: int = cap.KINK_EDGE_GUARD
    eshift: float = 0.0
    out: str = ""
    threads: int = 0

    def validated(self, need_stencil: bool = False) -> "RunConfig":
        cfg = self
        if cfg.trap not in ("harmonic", "box"):
            raise UsageError(f"unknown trap {cfg.trap!r} (harmonic or box)")
        if cfg.trap == "harmonic" and not 1 <= cfg.dim <= 3:
            raise UsageError("harmonic traps support --dim 1..3")
        if cfg.trap == "box" and cfg.dim != 3:
            raise UsageError("box traps are 3D only")
        if not cfg.ratios:
            cfg = replace(cfg, ratios=(1,) * cfg.dim)
        if cfg.trap == "harmonic" and len(cfg.ratios) != cfg.dim:
            raise UsageError("need one frequency ratio per axis")
        if cfg.cutoff < 1:
            raise UsageError("--cutoff must be >= 1")
        if cfg.species not in ("boson", "fermion", "photon"):
            raise UsageError(f"unknown species {cfg.species!r}")
        if cfg.g < 1:
            raise UsageError("--g must be >= 1")
        if cfg.species != "fermion" and cfg.g != 1:
            raise UsageError("--g applies to fermions only")
        if not cfg.n > 0:
            raise UsageError("--n must be positive")
        if not cfg.tmin < cfg.tmax:
            raise UsageError("empty temperature range: need --tmin < --tmax")
        if not cfg.tmin > 0:
            raise UsageError("--tmin must be positive")
        if cfg.points < 1:
            raise UsageError("--points must be >= 1")
        if need_stencil and cfg.points < 7:
            raise UsageError("derivative output needs at least 7 grid points")
        if cfg.fracture and cfg.points < 11:
            raise UsageError("the kink locator needs at least 11 grid points")
        if not cfg.kink_ratio > 0:
            raise UsageError("--kink-ratio must be positive")
        if cfg.kink_guard < 1:
            raise UsageError("--kink-guard must be >= 1")
        if not cfg.normalize:
            default = {"boson": "tc", "fermion": "tf", "photon": "none"}
            cfg = replace(cfg, normalize=default[cfg.species])
        if cfg.normalize not in ("tc", "tf", "none"):
            raise UsageError("--normalize must be tc, tf or none")
        if cfg.threads < 0:
            raise UsageError("--threads must be >= 0")
        return cfg

    @property
    def species_obj(self) -> Species:
        if self.species == "fermion":
            return fermion(self.g)
        return PHOTONLIKE if self.species == "photon" else BOSON

    @property
    def trap_obj(self) -> TrapDescriptor:
        if self.trap == "box":
            return box_trap(self.cutoff)
        return harmonic_trap(self.dim, self.ratios, self.cutoff)

    def build_spectrum(self) -> LevelList:
        levels = (box_levels_3d(self.cutoff) if self.trap == "box"
                  else harmonic_levels(self.dim, self.ratios, self.cutoff))
        if self.eshift != 0.0:
            levels = shifted_by(levels, self.eshift)
        return levels


def _coerce(key: str, raw: str):
    raw = raw.strip().strip('"').strip("'")
    if key in ("dim", "cutoff", "g", "points", "threads", "kink_guard"):
        return int(raw)
    if key in ("n", "tmin", "tmax", "eshift", "kink_ratio"):
        return float(raw)
    if key in ("derivative", "fracture"):
        if raw.lower() in ("true", "1", "yes"):
            return True
        if raw.lower() in ("false", "0", "no"):
            return False
        raise UsageError(f"config key {key!r}: expected a boolean, got {raw!r}")
    if key == "ratios":
        inner = raw.strip("[]")
        return tuple(int(p.strip()) for p in inner.split(",") if p.strip())
    if key in ("trap", "species", "normalize", "out"):
        return raw
    raise UsageError(f"unknown config key {key!r}")


def load_config(path: str) -> dict:
    """Read a flat TOML-style ``key = value`` file into config values."""
    values: dict = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                stripped = line.strip()
                if not stripped or stripped.startswith("#"):
                    continue
                if "=" not in stripped:
                    raise UsageError(f"{path}:{lineno}: expected key = value")
                key, _, raw = stripped.partition("=")
                key = key.strip()
                if not raw.strip().startswith(('"', "'")):
                    raw = raw.split("#", 1)[0]
                values[key] = _coerce(key, raw)
    except OSError as exc:
        raise UsageError(f"cannot read config file: {exc}") from exc
    return values


def _merge_config(args: argparse.Namespace) -> RunConfig:
    cfg_values = load_config(args.config) if getattr(args, "config", None) else {}
    merged = {}
    for key in RunConfig.__dataclass_fields__:
        flag_value = getattr(args, key, None)
        if flag_value is not None:
            merged[key] = flag_value
        elif key in cfg_values:
            merged[key] = cfg_values[key]
    if "ratios" in merged and not isinstance(merged["ratios"], tuple):
        merged["ratios"] = tuple(int(r) for r in str(merged["ratios"]).split(","))
    return RunConfig(**merged)


def _write_output(text: str, out: str):
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _default_threads() -> int:
    return min(4, os.cpu_count() or 1)


def _compute_curve(cfg: RunConfig) -> cap.CapacityCurve:
    spectrum = cfg.build_spectrum()
    t_ref = cap.reference_temperature(cfg.trap_obj, cfg.n, cfg.species_obj, cfg.normalize)
    grid = np.linspace(cfg.tmin * t_ref, cfg.tmax * t_ref, cfg.points)
    threads = cfg.threads if cfg.threads > 0 else _default_threads()
    if cfg.species == "photon":
        return cap.photon_capacity_curve(spectrum, grid, t_ref=t_ref, threads=threads)
    return cap.capacity_curve(spectrum, cfg.species_obj, cfg.n, grid,
                              t_ref=t_ref, threads=threads)


def cmd_capacity(cfg: RunConfig) -> int:
    cfg = cfg.validated()
    curve = _compute_curve(cfg)
    lines = ["T,T_over_Tref,capacity_bits,energy,mu,z,ground_fraction"]
    for s in curve.samples:
        lines.append(",".join(_fmt(v) for v in (
            s.T, s.T_over_ref, s.capacity_bits, s.energy, s.mu, s.z, s.ground_fraction)))
    _write_output("\n".join(lines) + "\n", cfg.out)
    return EXIT_OK


def cmd_derivative(cfg: RunConfig) -> int:
    cfg = cfg.validated(need_stencil=True)
    curve = _compute_curve(cfg)
    deriv = cap.derivative_curve(curve)
    lines = []
    if cfg.fracture:
        kink_t = cap.fracture_locator(deriv)
        lines.append(f"# kink_T_over_Tref={_fmt(kink_t / deriv.t_ref)}")
        verdict = cap.has_kink(deriv, ratio=cfg.kink_ratio, edge_guard=cfg.kink_guard)
        lines.append(f"# has_kink={str(verdict).lower()}")
    lines.append("T,T_over_Tref,dC_dT")
    for t, v in zip(deriv.temperatures, deriv.values):
        lines.append(",".join(_fmt(x) for x in (t, t / deriv.t_ref, v)))
    _write_output("\n".join(lines) + "\n", cfg.out)
    return EXIT_OK


def cmd_energy(cfg: RunConfig) -> int:
    cfg = cfg.validated(need_stencil=cfg.derivative)
    curve = _compute_curve(cfg)
    lines = []
    if cfg.derivative:
        deriv = cap.derivative_curve(curve, field="energy")
        lines.append("T,T_over_Tref,energy,dE_dT")
        for i, v in enumerate(deriv.values):
            s = curve.samples[i + 2]
            lines.append(",".join(_fmt(x) for x in (s.T, s.T_over_ref, s.energy, v)))
    else:
        lines.append("T,T_over_Tref,energy")
        for s in curve.samples:
            lines.append(",".join(_fmt(x) for x in (s.T, s.T_over_ref, s.energy)))
    _write_output("\n".join(lines) + "\n", cfg.out)
    return EXIT_OK


def cmd_reference_temps(args: argparse.Namespace) -> int:
    if args.trap == "box":
        trap = box_trap(1)
    else:
        dim = args.dim if args.dim is not None else 3
        trap = harmonic_trap(dim, None, 1)
    refs = cap.reference_temperatures(trap, args.n, args.g)
    lines = [f"{key}={_fmt(value)}" for key, value in refs.as_dict().items()]
    _write_output("\n".join(lines) + "\n", args.out or "")
    return EXIT_OK


def _series_spectrum(gamma: float, dim: int, cutoff: int) -> LevelList | None:
    if gamma == 2.0:
        return harmonic_levels(dim, (1,) * dim, cutoff)
    if math.isinf(gamma) and dim == 3:
        return box_levels_3d(cutoff)
    return None


def cmd_series_check(args: argparse.Namespace) -> int:
    gamma, dim = args.gamma, args.dim if args.dim is not None else 3
    if not gamma > 0:
        raise UsageError("--gamma must be positive")
    if dim < 1:
        raise UsageError("--dim must be >= 1")
    n = args.n if args.n is not None else 100.0
    if not n > 0:
        raise UsageError("--n must be positive")
    temps = args.t or [10.0, 20.0, 40.0]
    if any(t <= 0 for t in temps):
        raise UsageError("temperatures must be positive")
    cutoff = args.cutoff if args.cutoff is not None else 150

    advantage = ser.fermion_advantage_condition(gamma, dim)
    systematic = ser.systematics_condition(gamma, dim)
    lines = [
        f"# series check: gamma={_fmt(gamma)} dim={dim} N={_fmt(n)} cutoff={cutoff}",
        f"fermion_advantage_condition={str(advantage).lower()}",
        f"systematics_condition={str(systematic).lower()}",
    ]
    if not advantage:
        lines.append("# caveat: expansion not systematic here; no fermion advantage "
                     "is predicted at high temperature")

    spectrum = _series_spectrum(gamma, dim, cutoff)
    if spectrum is None:
        lines.append("# no discrete spectrum for this (gamma, dim); conditions only")
        _write_output("\n".join(lines) + "\n", args.out or "")
        return EXIT_OK

    header = ("T,N_over_S1,C_boson_exact,C_boson_series,C_fermion_exact,"
              "C_fermion_series,alpha1,alpha2_boson,alpha3,beta1,beta2")
    lines.append(header)
    for t in sorted(temps):
        beta = 1.0 / t
        sums = ser.spectral_sums(spectrum, beta, kmax=3)
        x = n / sums.s(1)
        coeff_b = ser.capacity_expansion(sums, BOSON)
        coeff_f = ser.capacity_expansion(sums, fermion(1))
        cb = cap.capacity_point(spectrum, BOSON, n, t).capacity_bits
        cf = cap.capacity_point(spectrum, fermion(1), n, t).capacity_bits
        lines.append(",".join(_fmt(v) for v in (
            t, x, cb, coeff_b.capacity_series_bits(n), cf,
            coeff_f.capacity_series_bits(n), coeff_b.alpha[0], coeff_b.alpha[1],
            coeff_b.alpha[2], coeff_b.beta_log[0], coeff_b.beta_log[1])))
    _write_output("\n".join(lines) + "\n", args.out or "")
    return EXIT_OK


def _add_run_flags(p: argparse.ArgumentParser):
    p.add_argument("--config", help="flat key = value config file; flags override it")
    p.add_argument("--trap", choices=["harmonic", "box"], default=None)
    p.add_argument("--dim", type=int, default=None, help="harmonic trap dimension (1..3)")
    p.add_argument("--ratios", type=lambda s: tuple(int(r) for r in s.split(",")),
                   default=None, help="integer frequency ratios, e.g. 1,1,2")
    p.add_argument("--cutoff", type=int, default=None, help="per-axis quantum number bound")
    p.add_argument("--species", choices=["boson", "fermion", "photon"], default=None)
    p.add_argument("--g", type=int, default=None, help="fermion spin degeneracy 2s+1")
    p.add_argument("--n", type=float, default=None, help="mean particle number")
    p.add_argument("--tmin", type=float, default=None,
                   help="grid start, in units of the normalizing temperature")
    p.add_argument("--tmax", type=float, default=None, help="grid end, same units")
    p.add_argument("--points", type=int, default=None, help="grid size")
    p.add_argument("--normalize", choices=["tc", "tf", "none"], default=None,
                   help="reference temperature for the T axis")
    p.add_argument("--eshift", type=float, default=None,
                   help="raise all level energies by this constant")
    p.add_argument("--out", default=None, help="CSV output path (default stdout)")
    p.add_argument("--threads", type=int, default=None,
                   help="parallel workers over grid nodes (0 = auto)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gascap",
        description="Capacities of noiseless channels carrying trapped ideal quantum gases.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_cap = sub.add_parser("capacity", help="capacity curve CSV over a temperature grid")
    _add_run_flags(p_cap)

    p_der = sub.add_parser("derivative", help="dC/dT CSV (four-point stencil, interior nodes)")
    _add_run_flags(p_der)
    p_der.add_argument("--fracture", action="store_true", default=None,
                       help="prepend the located kink and its verdict as comment lines")
    p_der.add_argument("--kink-ratio", dest="kink_ratio", type=float, default=None,
                       help="kink test: max |second difference| vs this multiple "
                            "of the median (default 3)")
    p_der.add_argument("--kink-guard", dest="kink_guard", type=int, default=None,
                       help="nodes at each window end where a peak never counts "
                            "as a kink (default 3)")

    p_en = sub.add_parser("energy", help="energy (and optionally dE/dT) CSV")
    _add_run_flags(p_en)
    p_en.add_argument("--derivative", action="store_true", default=None,
                      help="add the dE_dT column (interior nodes only)")

    p_ser = sub.add_parser("series-check",
                           help="high-temperature series vs exact capacities")
    p_ser.add_argument("--gamma", type=float, required=True,
                       help="power-law exponent (2 = harmonic, inf = 3D box)")
    p_ser.add_argument("--dim", type=int, default=None)
    p_ser.add_argument("--n", type=float, default=None)
    p_ser.add_argument("--t", type=float, action="append",
                       help="temperature to tabulate (repeatable)")
    p_ser.add_argument("--cutoff", type=int, default=None)
    p_ser.add_argument("--out", default=None)

    p_ref = sub.add_parser("reference-temps", help="closed-form Tc / Tf values")
    p_ref.add_argument("--trap", choices=["harmonic", "box"], default="harmonic")
    p_ref.add_argument("--dim", type=int, default=None)
    p_ref.add_argument("--n", type=float, required=True)
    p_ref.add_argument("--g", type=int, default=1)
    p_ref.add_argument("--out", default=None)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "capacity":
            return cmd_capacity(_merge_config(args))
        if args.command == "derivative":
            return cmd_derivative(_merge_config(args))
        if args.command == "energy":
            return cmd_energy(_merge_config(args))
        if args.command == "series-check":
            return cmd_series_check(args)
        if args.command == "reference-temps":
            return cmd_reference_temps(args)
        parser.error(f"unknown command {args.command!r}")
    except _NUMERICAL_ERRORS as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (UsageError, ValueError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
