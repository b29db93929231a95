"""Twisted-photon amplitudes, excitation rates and cross-section ratios r^tw(b).

The atom sits at the origin and the vortex axis passes through the point
``b (cos φ_b, sin φ_b)`` in the transverse plane.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .atomic import (
    AMPLITUDE_PREFACTOR,
    DEFAULT_QUAD,
    AtomicState,
    QuadratureSpec,
    brace_combination,
    plane_wave_amplitude,
)
from .beam import BeamParams, flux, flux_bracket, flux_prefactor, mean_flux_over_disk
from .errors import InvalidArgumentError
from .specfun import WignerIndex, bessel_j, wigner_small_d

REGULAR = "regular"
FINITE_LIMIT = "finite-limit"
ZERO = "zero"
DIVERGENT = "divergent"
EXACT_ZERO = "exact-zero"


class FluxKind(str, Enum):
    LOCAL = "local"
    INTEGRATED = "integrated"


@dataclass(frozen=True)
class FluxConvention:
    kind: FluxKind = FluxKind.LOCAL
    aperture_radius: float | None = None  # INTEGRATED only; default 10 · 2π/κ

    def __post_init__(self):
        object.__setattr__(self, "kind", FluxKind(self.kind))
        if self.aperture_radius is not None and not self.aperture_radius > 0:
            raise InvalidArgumentError("aperture radius must be positive")

    def radius(self, beam: BeamParams) -> float:
        if self.aperture_radius is not None:
            return self.aperture_radius
        return 10 * 2 * math.pi / beam.kappa


LOCAL = FluxConvention(FluxKind.LOCAL)
INTEGRATED = FluxConvention(FluxKind.INTEGRATED)


@dataclass(frozen=True)
class TargetGeometry:
    b: float
    phi_b: float = 0.0

    def __post_init__(self):
        if not self.b >= 0:
            raise InvalidArgumentError("impact parameter must be non-negative")


@dataclass
class RatioCurve:
    b_grid: np.ndarray
    values: np.ndarray
    convention: FluxConvention
    beam: BeamParams
    final: tuple[int, int]
    classifications: list[str] = field(default_factory=list)
    rates: dict[int, np.ndarray] = field(default_factory=dict)  # per m_f, |M|²
    flux: np.ndarray | None = None

    def __post_init__(self):
        self.b_grid = np.asarray(self.b_grid, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.b_grid.size and np.any(np.diff(self.b_grid) <= 0):
            raise InvalidArgumentError("b grid must be strictly increasing")
        if np.any(self.values < 0):
            raise InvalidArgumentError("ratio values must be non-negative")


@dataclass(frozen=True)
class ScalingPrediction:
    amp_exponent_b: int
    amp_exponent_theta: int
    amp_exponent_omega_a0: int
    ratio_exponent: int


@dataclass(frozen=True)
class ScalingFit:
    slope: float
    stderr: float
    classification: str
    n_points: int


def thread_count() -> int:
    env = os.environ.get("TWISTBEAM_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise InvalidArgumentError(f"TWISTBEAM_THREADS must be an integer, got {env!r}")
    return min(8, os.cpu_count() or 1)


def amplitude(final: AtomicState, beam: BeamParams, geom: TargetGeometry,
              quad: QuadratureSpec = DEFAULT_QUAD, cancel=None) -> complex:
    """Full twisted-photon amplitude M_{n_f l_f m_f Λ}(b) with the δ-function stripped."""
    m_gamma, lam = beam.m_gamma, beam.helicity
    order = final.m - m_gamma
    bes = bessel_j(order, beam.kappa * geom.b)
    if bes == 0.0:
        return 0j
    phase = 1j ** (-lam) * np.exp(1j * (m_gamma - final.m) * geom.phi_b)
    brace = brace_combination(final, beam, quad, cancel)
    return complex(AMPLITUDE_PREFACTOR * math.sqrt(beam.kappa / (2 * math.pi)) * phase * bes * brace)


def amplitude_factorized(final: AtomicState, beam: BeamParams, geom: TargetGeometry,
                         quad: QuadratureSpec = DEFAULT_QUAD) -> float:
    """|M| as √(κ/2π) |J_{m_f-m_γ}(κb) d^{l_f}_{m_f Λ}(θ_k) M^pw|."""
    pw = plane_wave_amplitude(final.n, final.l, beam, quad, final.Z)
    d = wigner_small_d(WignerIndex(final.l, final.m, beam.helicity), beam.theta_k)
    bes = bessel_j(final.m - beam.m_gamma, beam.kappa * geom.b)
    return abs(math.sqrt(beam.kappa / (2 * math.pi)) * bes * d * pw)


def rate_breakdown(n_f: int, l_f: int, beam: BeamParams, geom: TargetGeometry,
                   quad: QuadratureSpec = DEFAULT_QUAD, Z: float = 1.0, cancel=None) -> dict[int, float]:
    return {
        m: abs(amplitude(AtomicState(n_f, l_f, m, Z), beam, geom, quad, cancel)) ** 2
        for m in range(-l_f, l_f + 1)
    }


def excitation_rate(n_f: int, l_f: int, beam: BeamParams, geom: TargetGeometry,
                    quad: QuadratureSpec = DEFAULT_QUAD, Z: float = 1.0, cancel=None) -> float:
    """Σ_{m_f} |M_{n_f l_f m_f Λ}(b)|², not normalized by any flux."""
    return math.fsum(rate_breakdown(n_f, l_f, beam, geom, quad, Z, cancel).values())


def plane_wave_flux(beam: BeamParams) -> float:
    """Reference flux that makes the local-convention E1 ratio exactly one.

    Equals the twisted flux prefactor times 2π/κ, i.e. cosθ_k ω²/2: the
    √(κ/2π) normalization of the twisted amplitude is divided out.
    """
    return flux_prefactor(beam) * 2 * math.pi / beam.kappa


def plane_wave_cross_section(n_f: int, l_f: int, beam: BeamParams,
                             quad: QuadratureSpec = DEFAULT_QUAD, Z: float = 1.0) -> float:
    return abs(plane_wave_amplitude(n_f, l_f, beam, quad, Z)) ** 2 / plane_wave_flux(beam)


def _flux_orders(beam):
    m, lam = beam.m_gamma, beam.helicity
    return [abs(m - lam), abs(m + lam), abs(m)]


def _contributing_sublevels(l_f, beam):
    return [
        m for m in range(-l_f, l_f + 1)
        if abs(wigner_small_d(WignerIndex(l_f, m, beam.helicity), beam.theta_k)) > 1e-14
    ]


def center_exponent(l_f: int, beam: BeamParams) -> int:
    """Exponent p with local-flux r^tw(b) ∝ b^p as b -> 0."""
    rate_order = min(abs(m - beam.m_gamma) for m in _contributing_sublevels(l_f, beam))
    return 2 * rate_order - 2 * min(_flux_orders(beam))


def classify_center(l_f: int, beam: BeamParams) -> str:
    """Behaviour of the local-flux ratio at b = 0: regular, finite-limit, zero or divergent."""
    if min(_flux_orders(beam)) == 0:
        return REGULAR
    p = center_exponent(l_f, beam)
    if p < 0:
        return DIVERGENT
    return ZERO if p > 0 else FINITE_LIMIT


def _center_limit(n_f, l_f, beam, quad, Z):
    """lim_{b->0} of the local ratio when numerator and flux vanish at the same order."""
    n = min(_flux_orders(beam))
    num = 0.0
    for m in range(-l_f, l_f + 1):
        if abs(m - beam.m_gamma) == n:
            brace = brace_combination(AtomicState(n_f, l_f, m, Z), beam, quad)
            num += beam.kappa / (2 * math.pi) * abs(AMPLITUDE_PREFACTOR * brace) ** 2
    th, m_g, lam = beam.theta_k, beam.m_gamma, beam.helicity
    coef = {abs(m_g - lam): 0.0, abs(m_g + lam): 0.0, abs(m_g): 0.0}
    coef[abs(m_g - lam)] += math.cos(th / 2) ** 4
    coef[abs(m_g + lam)] += math.sin(th / 2) ** 4
    coef[abs(m_g)] += 0.5 * math.sin(th) ** 2
    # The common (κb/2)^{2n}/(n!)² factor cancels between numerator and flux.
    den = flux_prefactor(beam) * coef[n]
    return num / den / plane_wave_cross_section(n_f, l_f, beam, quad, Z)


def ratio_rtw(n_f: int, l_f: int, beam: BeamParams, geom: TargetGeometry,
              convention: FluxConvention = LOCAL, quad: QuadratureSpec = DEFAULT_QUAD,
              Z: float = 1.0) -> float:
    """Twisted-to-plane-wave cross-section ratio r^tw(b), summed over m_f.

    Under the local convention a vanishing flux at b = 0 is resolved from the
    small-b exponents: +inf when divergent, 0 when the rate vanishes faster,
    the analytic limit otherwise.
    """
    rate = excitation_rate(n_f, l_f, beam, geom, quad, Z)
    sigma_pw = plane_wave_cross_section(n_f, l_f, beam, quad, Z)
    if convention.kind is FluxKind.INTEGRATED:
        return rate / mean_flux_over_disk(beam, convention.radius(beam)) / sigma_pw
    f = flux(beam, geom.b)
    if f > 0:
        return rate / f / sigma_pw
    cls = classify_center(l_f, beam)
    if cls == DIVERGENT:
        return math.inf
    if cls == ZERO:
        return 0.0
    return _center_limit(n_f, l_f, beam, quad, Z)


def ratio_curve(n_f: int, l_f: int, beam: BeamParams, b_grid, convention: FluxConvention = LOCAL,
                quad: QuadratureSpec = DEFAULT_QUAD, Z: float = 1.0, threads: int | None = None,
                phi_b: float = 0.0) -> RatioCurve:
    """Sample r^tw on ``b_grid``; rows are evaluated concurrently, assembled in grid order."""
    b_grid = np.asarray(b_grid, dtype=float)
    if b_grid.size == 0:
        raise InvalidArgumentError("empty b grid")
    # Warm the g-factor cache once so worker threads only evaluate Bessel factors.
    for m in range(-l_f, l_f + 1):
        brace_combination(AtomicState(n_f, l_f, m, Z), beam, quad)
    plane_wave_cross_section(n_f, l_f, beam, quad, Z)

    def row(b):
        geom = TargetGeometry(float(b), phi_b)
        return (ratio_rtw(n_f, l_f, beam, geom, convention, quad, Z),
                rate_breakdown(n_f, l_f, beam, geom, quad, Z))

    workers = threads or thread_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(row, b_grid))
    else:
        results = [row(b) for b in b_grid]
    values = np.array([r for r, _ in results])
    rates = {m: np.array([br[m] for _, br in results]) for m in range(-l_f, l_f + 1)}
    classes = []
    for b, v in zip(b_grid, values):
        if convention.kind is FluxKind.LOCAL and flux(beam, b) == 0:
            classes.append(classify_center(l_f, beam))
        else:
            classes.append(REGULAR)
    return RatioCurve(b_grid, values, convention, beam, (n_f, l_f), classes, rates,
                      np.asarray(flux(beam, b_grid)))


def predict_scaling(n_f: int, l_f: int, m_f: int, beam: BeamParams) -> ScalingPrediction:
    """Small-b, small-θ_k power counting for |M| and for the local r^tw.

    |M| ~ θ_k^{|m_γ-Λ|} (ωb)^{|m_γ-m_f|} (ωa0)^{l_f-1}.  The ratio exponent is
    the b-power of the local r^tw near the axis; for m_γ = l_f (Λ = +1) it is
    -(2m_γ - 2).
    """
    AtomicState(n_f, l_f, m_f)
    m_g = beam.m_gamma
    return ScalingPrediction(
        amp_exponent_b=abs(m_g - m_f),
        amp_exponent_theta=abs(m_g - beam.helicity),
        amp_exponent_omega_a0=l_f - 1,
        ratio_exponent=center_exponent(l_f, beam),
    )


def small_b_grid(beam: BeamParams, points: int = 9, kb_min: float = 1e-4, kb_max: float = 1e-2) -> np.ndarray:
    """Impact parameters with κb log-spaced on [kb_min, kb_max]."""
    return np.logspace(math.log10(kb_min), math.log10(kb_max), points) / beam.kappa


def fit_scaling(b, values, kappa: float | None = None) -> ScalingFit:
    """Least-squares slope of log(values) against log(b) with its standard error."""
    b = np.asarray(b, dtype=float)
    y = np.asarray(values, dtype=float)
    if b.size < 5 or b.size != y.size:
        raise InvalidArgumentError("need at least 5 matching (b, value) points")
    if kappa is not None and np.any(kappa * b >= 0.05):
        raise InvalidArgumentError("fit grid must satisfy κb < 0.05")
    if np.any(b <= 0):
        raise InvalidArgumentError("b values must be positive")
    if np.any(y == 0) or not np.all(np.isfinite(y)):
        return ScalingFit(math.nan, math.nan, EXACT_ZERO, int(b.size))
    x, ly = np.log(b), np.log(np.abs(y))
    design = np.vstack([x, np.ones_like(x)]).T
    coef, *_ = np.linalg.lstsq(design, ly, rcond=None)
    resid = ly - design @ coef
    dof = b.size - 2
    sxx = np.sum((x - x.mean()) ** 2)
    stderr = math.sqrt(np.sum(resid**2) / dof / sxx)
    return ScalingFit(float(coef[0]), stderr, REGULAR, int(b.size))
