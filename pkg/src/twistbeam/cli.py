"""``twistbeam`` command-line front end.

Subcommands ``field``, ``flux``, ``amplitude``, ``ratio`` and ``scaling`` each
write one table (CSV or JSON).  Settings are merged as
defaults < ``--config`` file < ``--figure`` preset < explicit flags.

Exit codes: 0 success, 2 usage error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import math
import shlex
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .atomic import AtomicState, QuadratureSpec
from .beam import (
    BOHR_RADIUS_NM,
    BeamParams,
    CylindricalPoint,
    electric_field,
    flux,
    flux_bracket,
    magnetic_field,
    omega_to_wavelength_nm,
    resonant_omega,
    vector_potential,
    wavelength_nm_to_omega,
)
from .errors import InvalidArgumentError, NumericalError
from .observables import (
    REGULAR,
    FluxConvention,
    TargetGeometry,
    amplitude,
    amplitude_factorized,
    fit_scaling,
    predict_scaling,
    ratio_curve,
    ratio_rtw,
    small_b_grid,
)
from .records import make_table, write_table
from .specfun import WignerIndex, wigner_small_d

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL = 0, 2, 3

FIGURES = {
    "2": dict(l_f=[1], convention="integrated"),
    "3a": dict(l_f=[2], convention="integrated"),
    "3b": dict(l_f=[2], convention="local"),
    "3c": dict(l_f=[3], convention="integrated"),
    "3d": dict(l_f=[3], convention="local"),
}
FIGURE_COMMON = dict(n_f=4, theta_k=0.2, helicity=1, m_gamma=[1, 2, 3, 4],
                     b_min=0.0, b_max=2.0, b_points=400)


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    omega: float | None = None
    wavelength_nm: float | None = None
    n_f: int | None = None
    theta_k: float = 0.2
    m_gamma: list[int] = field(default_factory=lambda: [1])
    helicity: int = 1
    l_f: list[int] = field(default_factory=lambda: [1])
    m_f: list[int] | None = None
    rho: list[float] = field(default_factory=lambda: [0.0])
    rho_range: list[float] | None = None
    phi: list[float] = field(default_factory=lambda: [0.0])
    z: float = 0.0
    b: list[float] = field(default_factory=lambda: [0.0])
    b_min: float = 0.0
    b_max: float = 2.0
    b_points: int = 400
    convention: str = "local"
    aperture: float | None = None
    quantity: str = "both"
    kb_min: float = 1e-4
    kb_max: float = 1e-2
    fit_points: int = 9
    rel_tol: float = 1e-11
    abs_tol: float = 1e-30
    max_subdivisions: int = 400
    figure: str | None = None
    out: str | None = None
    format: str = "csv"

    def hashed(self) -> dict:
        """Settings that determine the table contents (everything but the destination)."""
        d = asdict(self)
        d.pop("out")
        return d

    def quad(self) -> QuadratureSpec:
        return QuadratureSpec(abs_tol=self.abs_tol, rel_tol=self.rel_tol,
                              max_subdivisions=self.max_subdivisions)

    def validate(self):
        if not self.m_gamma:
            raise UsageError("--m-gamma needs at least one value")
        if self.command in ("amplitude", "ratio", "scaling") and not self.l_f:
            raise UsageError("--l-f needs at least one value")
        if self.helicity not in (-1, 1):
            raise UsageError("--lambda-hel must be +1 or -1")
        if not 0 < self.theta_k < math.pi / 2:
            raise UsageError("--theta-k must lie in (0, pi/2)")
        if self.command == "ratio":
            if self.b_points < 1 or self.b_max < self.b_min or self.b_min < 0:
                raise UsageError("empty or invalid b range")
            if self.b_points > 1 and self.b_max == self.b_min:
                raise UsageError("empty b range")
        if self.n_f is not None and self.wavelength_nm is not None:
            expected = omega_to_wavelength_nm(resonant_omega(self.n_f))
            if abs(self.wavelength_nm - expected) > 0.01 * expected:
                raise UsageError(
                    f"--wavelength-nm {self.wavelength_nm} inconsistent with --n-f {self.n_f} "
                    f"(resonance at {expected:.2f} nm)")
        if self.format not in ("csv", "json"):
            raise UsageError("--format must be csv or json")
        if self.rho_range is not None and (len(self.rho_range) != 3 or self.rho_range[2] < 1):
            raise UsageError("--rho-range takes START STOP POINTS")

    def atom_n_f(self) -> int:
        return 4 if self.n_f is None else self.n_f

    def beam(self, m_gamma: int, atomic: bool) -> BeamParams:
        """Beam for one m_γ; atomic runs sit on the 1s -> n_f resonance."""
        if atomic:
            omega = resonant_omega(self.atom_n_f())
        elif self.wavelength_nm is not None:
            omega = wavelength_nm_to_omega(self.wavelength_nm)
        elif self.n_f is not None:
            omega = resonant_omega(self.n_f)
        else:
            omega = 1.0 if self.omega is None else self.omega
        return BeamParams(omega, self.theta_k, m_gamma, self.helicity)

    def rho_grid(self) -> np.ndarray:
        if self.rho_range is not None:
            start, stop, n = self.rho_range
            return np.linspace(start, stop, int(n))
        return np.asarray(self.rho, dtype=float)


def _add_common(p: argparse.ArgumentParser, atomic: bool):
    p.add_argument("--config", help="flat key = value file mirroring flag names")
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--format", choices=["csv", "json"])
    p.add_argument("--theta-k", type=float, help="pitch angle in radians")
    p.add_argument("--m-gamma", type=int, nargs="+", help="total angular momentum projection(s)")
    p.add_argument("--lambda-hel", dest="helicity", type=int, choices=[-1, 1], help="helicity")
    p.add_argument("--n-f", type=int, help="final principal quantum number")
    p.add_argument("--wavelength-nm", type=float, help="photon wavelength in nm")
    if not atomic:
        p.add_argument("--omega", type=float, help="wavenumber (used when no n_f/wavelength)")
    else:
        p.add_argument("--l-f", type=int, nargs="+", help="final orbital quantum number(s)")
        p.add_argument("--rel-tol", type=float)
        p.add_argument("--abs-tol", type=float)
        p.add_argument("--max-subdivisions", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="twistbeam", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"twistbeam {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    for name in ("field", "flux"):
        p = sub.add_parser(name, argument_default=argparse.SUPPRESS,
                           help=f"sample the Bessel-mode {'fields' if name == 'field' else 'energy flux'}")
        _add_common(p, atomic=False)
        p.add_argument("--rho", type=float, nargs="+", help="radial distances")
        p.add_argument("--rho-range", type=float, nargs=3, metavar=("START", "STOP", "POINTS"))
        if name == "field":
            p.add_argument("--phi", type=float, nargs="+", help="azimuths in radians")
            p.add_argument("--z", type=float)

    p = sub.add_parser("amplitude", argument_default=argparse.SUPPRESS,
                       help="direct and factorized amplitudes per m_f")
    _add_common(p, atomic=True)
    p.add_argument("--m-f", type=int, nargs="+")
    p.add_argument("--b", type=float, nargs="+", help="impact parameters in wavelengths")

    p = sub.add_parser("ratio", argument_default=argparse.SUPPRESS,
                       help="twisted/plane-wave cross-section ratio over a b grid")
    _add_common(p, atomic=True)
    p.add_argument("--b-min", type=float, help="in wavelengths")
    p.add_argument("--b-max", type=float, help="in wavelengths")
    p.add_argument("--b-points", type=int)
    p.add_argument("--convention", choices=["local", "integrated"])
    p.add_argument("--aperture", type=float, help="averaging disk radius in wavelengths")
    p.add_argument("--figure", choices=sorted(FIGURES), help="figure preset")

    p = sub.add_parser("scaling", argument_default=argparse.SUPPRESS,
                       help="small-b power-law fits against predicted exponents")
    _add_common(p, atomic=True)
    p.add_argument("--m-f", type=int, nargs="+")
    p.add_argument("--quantity", choices=["ratio", "amplitude", "both"])
    p.add_argument("--kb-min", type=float)
    p.add_argument("--kb-max", type=float)
    p.add_argument("--fit-points", type=int)
    return parser


def _config_file_args(command: str, path: str) -> list[str]:
    """Turn ``key = value`` lines into flag tokens for the subcommand parser."""
    tokens = [command]
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config file: {exc}")
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            key, sep, value = line.partition(":")
        if not sep:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        key = key.strip().replace("_", "-")
        tokens.append(f"--{key}")
        tokens.extend(shlex.split(value.replace(",", " ")))
    return tokens


def parse_config(argv) -> RunConfig:
    parser = build_parser()
    flags = vars(parser.parse_args(argv))
    command = flags.pop("command")
    merged: dict = {}
    cfg_path = flags.pop("config", None)
    if cfg_path:
        file_vals = vars(parser.parse_args(_config_file_args(command, cfg_path)))
        file_vals.pop("command")
        file_vals.pop("config", None)
        merged.update(file_vals)
    figure = flags.get("figure", merged.get("figure"))
    if figure is not None:
        merged.update(FIGURE_COMMON)
        merged.update(FIGURES[figure])
    merged.update(flags)
    cfg = RunConfig(command=command, **merged)
    cfg.validate()
    return cfg


# --- subcommands -----------------------------------------------------------

_CYL = ("rho", "phi", "z")


def cmd_field(cfg: RunConfig):
    cols = ["m_gamma", "rho", "phi", "z", "kappa_rho"]
    cols += [f"A_{c}_{p}" for c in ("plus", "minus", "zero") for p in ("re", "im")]
    cols += [f"{f}_{c}_{p}" for f in "BE" for c in _CYL for p in ("re", "im")]
    cols += ["flux"]
    rows = []
    for m in cfg.m_gamma:
        beam = cfg.beam(m, atomic=False)
        for rho in cfg.rho_grid():
            for phi in cfg.phi:
                pt = CylindricalPoint(float(rho), float(phi), cfg.z)
                row = {"m_gamma": m, "rho": float(rho), "phi": float(phi), "z": cfg.z,
                       "kappa_rho": beam.kappa * rho}
                a = vector_potential(beam, pt).components
                for c, v in zip(("plus", "minus", "zero"), a):
                    row[f"A_{c}_re"], row[f"A_{c}_im"] = v.real, v.imag
                for name, sample in (("B", magnetic_field(beam, pt)), ("E", electric_field(beam, pt))):
                    for c, v in zip(_CYL, sample.components):
                        row[f"{name}_{c}_re"], row[f"{name}_{c}_im"] = v.real, v.imag
                row["flux"] = float(flux(beam, rho))
                rows.append(row)
    return cols, rows, False


def cmd_flux(cfg: RunConfig):
    cols = ["m_gamma", "rho", "kappa_rho", "bracket", "flux"]
    rows = []
    for m in cfg.m_gamma:
        beam = cfg.beam(m, atomic=False)
        for rho in cfg.rho_grid():
            rows.append({"m_gamma": m, "rho": float(rho), "kappa_rho": beam.kappa * rho,
                         "bracket": float(flux_bracket(beam, rho)), "flux": float(flux(beam, rho))})
    return cols, rows, False


def cmd_amplitude(cfg: RunConfig):
    cols = ["b_over_lambda", "b_nm", "b_a0", "m_gamma", "l_f", "m_f", "amp_re", "amp_im",
            "amp_abs", "amp_factorized", "wigner_d", "error"]
    rows, failed = [], False
    n_f, quad = cfg.atom_n_f(), cfg.quad()
    for m_g in cfg.m_gamma:
        beam = cfg.beam(m_g, atomic=True)
        for l_f in cfg.l_f:
            m_values = cfg.m_f if cfg.m_f is not None else range(-l_f, l_f + 1)
            for m_f in m_values:
                if abs(m_f) > l_f:
                    continue
                final = AtomicState(n_f, l_f, m_f)
                d = wigner_small_d(WignerIndex(l_f, m_f, beam.helicity), beam.theta_k)
                for b_lam in cfg.b:
                    b = b_lam * beam.wavelength
                    row = {"b_over_lambda": b_lam, "b_nm": b * BOHR_RADIUS_NM, "b_a0": b,
                           "m_gamma": m_g, "l_f": l_f, "m_f": m_f, "wigner_d": d}
                    try:
                        amp = amplitude(final, beam, TargetGeometry(b), quad)
                        row.update(amp_re=amp.real, amp_im=amp.imag, amp_abs=abs(amp),
                                   amp_factorized=amplitude_factorized(final, beam, TargetGeometry(b), quad))
                    except NumericalError as exc:
                        row["error"], failed = str(exc), True
                    rows.append(row)
    return cols, rows, failed


def cmd_ratio(cfg: RunConfig):
    l_max = max(cfg.l_f)
    rate_cols = [f"rate_m{m}" for m in range(-l_max, l_max + 1)]
    cols = ["b_over_lambda", "b_nm", "b_a0", "m_gamma", "l_f", "convention", "r_tw",
            "classification", "flux", "total_rate"] + rate_cols + ["error"]
    rows, failed = [], False
    n_f, quad = cfg.atom_n_f(), cfg.quad()
    b_lam = np.linspace(cfg.b_min, cfg.b_max, cfg.b_points)
    for m_g in cfg.m_gamma:
        beam = cfg.beam(m_g, atomic=True)
        aperture = None if cfg.aperture is None else cfg.aperture * beam.wavelength
        conv = FluxConvention(cfg.convention, aperture)
        for l_f in cfg.l_f:
            base = {"m_gamma": m_g, "l_f": l_f, "convention": cfg.convention}
            try:
                curve = ratio_curve(n_f, l_f, beam, b_lam * beam.wavelength, conv, quad)
            except NumericalError as exc:
                rows.append({**base, "classification": "error", "error": str(exc)})
                failed = True
                continue
            for i, bl in enumerate(b_lam):
                b = curve.b_grid[i]
                row = {**base, "b_over_lambda": float(bl), "b_nm": b * BOHR_RADIUS_NM, "b_a0": b,
                       "r_tw": float(curve.values[i]), "classification": curve.classifications[i],
                       "flux": float(curve.flux[i])}
                total = 0.0
                for m, rates in curve.rates.items():
                    row[f"rate_m{m}"] = float(rates[i])
                    total += float(rates[i])
                row["total_rate"] = total
                rows.append(row)
    return cols, rows, failed


def cmd_scaling(cfg: RunConfig):
    cols = ["quantity", "l_f", "m_gamma", "m_f", "predicted", "measured", "stderr",
            "classification", "kb_min", "kb_max", "points", "error"]
    rows, failed = [], False
    n_f, quad = cfg.atom_n_f(), cfg.quad()
    span = {"kb_min": cfg.kb_min, "kb_max": cfg.kb_max, "points": cfg.fit_points}
    for m_g in cfg.m_gamma:
        beam = cfg.beam(m_g, atomic=True)
        bs = small_b_grid(beam, cfg.fit_points, cfg.kb_min, cfg.kb_max)
        for l_f in cfg.l_f:
            if cfg.quantity in ("ratio", "both"):
                row = {"quantity": "ratio", "l_f": l_f, "m_gamma": m_g, **span,
                       "predicted": predict_scaling(n_f, l_f, 0, beam).ratio_exponent}
                try:
                    vals = [ratio_rtw(n_f, l_f, beam, TargetGeometry(b), quad=quad) for b in bs]
                    fit = fit_scaling(bs, vals)
                    row.update(measured=fit.slope, stderr=fit.stderr, classification=fit.classification)
                except NumericalError as exc:
                    row["error"], failed = str(exc), True
                rows.append(row)
            if cfg.quantity in ("amplitude", "both"):
                m_values = cfg.m_f if cfg.m_f is not None else range(-l_f, l_f + 1)
                for m_f in m_values:
                    if abs(m_f) > l_f:
                        continue
                    final = AtomicState(n_f, l_f, m_f)
                    row = {"quantity": "amplitude", "l_f": l_f, "m_gamma": m_g, "m_f": m_f, **span,
                           "predicted": predict_scaling(n_f, l_f, m_f, beam).amp_exponent_b}
                    try:
                        vals = [abs(amplitude(final, beam, TargetGeometry(b), quad)) for b in bs]
                        fit = fit_scaling(bs, vals)
                        row.update(measured=fit.slope, stderr=fit.stderr,
                                   classification=fit.classification)
                    except NumericalError as exc:
                        row["error"], failed = str(exc), True
                    rows.append(row)
    # Sanity row: the fitter on an exact b² law.
    bs = np.logspace(-4, -2, cfg.fit_points)
    fit = fit_scaling(bs, 3.0 * bs**2)
    rows.append({"quantity": "synthetic", "predicted": 2, "measured": fit.slope, "stderr": fit.stderr,
                 "classification": fit.classification, **span})
    return cols, rows, failed


COMMANDS = {"field": cmd_field, "flux": cmd_flux, "amplitude": cmd_amplitude,
            "ratio": cmd_ratio, "scaling": cmd_scaling}

_META = {
    "units": "atomic units (hbar = c = 1, lengths in Bohr radii) for amplitude/ratio/scaling; "
             "field/flux lengths are in units of 1/omega when --omega is used",
    "plane_wave_flux": "cos(theta_k) * omega**2 / 2, the constant that makes the local E1 ratio exactly 1",
}


def run(cfg: RunConfig, stream=None) -> int:
    cols, rows, failed = COMMANDS[cfg.command](cfg)
    table = make_table(cols, rows, cfg.hashed(), _META if cfg.format == "json" else None)
    write_table(table, cfg.out, cfg.format, stream=stream if stream is not None else sys.stdout)
    return EXIT_NUMERICAL if failed else EXIT_OK


def main(argv=None) -> int:
    try:
        cfg = parse_config(argv)
    except SystemExit as exc:  # argparse usage errors and --help/--version
        return int(exc.code or 0)
    except (UsageError, InvalidArgumentError) as exc:
        print(f"twistbeam: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return run(cfg)
    except InvalidArgumentError as exc:
        print(f"twistbeam: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"twistbeam: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
