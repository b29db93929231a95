"""Hydrogen-like 1s -> (n_f, l_f, m_f) matrix elements for Bessel-mode photons.

The atomic g-factors are double integrals over r and cos θ_r of
R_{n_f l_f} R'_{10} J_{m_f-λ}(κ r sin θ) Y_{l_f m_f} Y_{1λ} e^{i k_z r cos θ},
evaluated by nested adaptive Gauss-Kronrod quadrature.  All quantities are in
atomic units (a0 = 1).
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass

import numpy as np

from .beam import BeamParams
from .errors import InvalidArgumentError
from .quadrature import gauss_kronrod
from .specfun import (
    RadialState,
    bessel_j,
    hydrogen_radial,
    hydrogen_radial_derivative,
    spherical_harmonic,
)

# -(e / m_e a0) sqrt(2πκ/3) = AMPLITUDE_PREFACTOR * sqrt(κ / 2π) in atomic units.
# Shared by twisted and plane-wave amplitudes, so it cancels in every ratio.
AMPLITUDE_PREFACTOR = -2 * math.pi / math.sqrt(3)


@dataclass(frozen=True)
class AtomicState:
    n: int
    l: int
    m: int
    Z: float = 1.0

    def __post_init__(self):
        if self.n < 1 or not 0 <= self.l < self.n or abs(self.m) > self.l:
            raise InvalidArgumentError(f"invalid state (n, l, m) = ({self.n}, {self.l}, {self.m})")
        if self.Z < 1:
            raise InvalidArgumentError("Z must be >= 1")


@dataclass(frozen=True)
class QuadratureSpec:
    abs_tol: float = 1e-30
    rel_tol: float = 1e-11
    max_subdivisions: int = 400
    radial_cutoff: float | None = None  # default 40 n_f² a0 / Z

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise InvalidArgumentError("tolerances must be positive")
        if self.radial_cutoff is not None and not self.radial_cutoff > 0:
            raise InvalidArgumentError("radial cutoff must be positive")

    def cutoff(self, n_f: int, Z: float) -> float:
        if self.radial_cutoff is not None:
            return self.radial_cutoff
        return 40.0 * n_f**2 / Z


DEFAULT_QUAD = QuadratureSpec()


@dataclass(frozen=True)
class GFactors:
    """g-factors for polarization indices +Λ, 0 and -Λ."""

    g_plus: complex
    g_zero: complex
    g_minus: complex


_cache: dict = {}
_cache_lock = threading.Lock()


def clear_cache():
    with _cache_lock:
        _cache.clear()


def _angular_integrals(l, m, pol, kappa, k_z, r, quad, cancel):
    """∫ d cosθ J_{m-pol}(κ r sinθ) Y_lm(θ,0) Y_1pol(θ,0) e^{i k_z r cosθ} for each r."""

    def integrand(u):
        theta = np.arccos(np.clip(u, -1.0, 1.0))
        sin_t = np.sqrt(np.clip(1.0 - u * u, 0.0, None))
        ang = spherical_harmonic(l, m, theta, 0.0).real * spherical_harmonic(1, pol, theta, 0.0).real
        bes = bessel_j(m - pol, kappa * np.outer(sin_t, r))
        return ang[:, None] * bes * np.exp(1j * k_z * np.outer(u, r))

    res = gauss_kronrod(integrand, -1.0, 1.0, abs_tol=quad.abs_tol, rel_tol=quad.rel_tol,
                        max_subdivisions=quad.max_subdivisions, cancel=cancel)
    return res.value


def _g_raw(n, l, m, pol, Z, kappa, k_z, quad, cancel=None):
    key = (n, l, m, pol, float(Z), float(kappa), float(k_z), quad)
    with _cache_lock:
        if key in _cache:
            return _cache[key]
    final = RadialState(n, l, Z)
    ground = RadialState(1, 0, Z)
    cutoff = quad.cutoff(n, Z)

    def radial(r):
        weight = -r * r * hydrogen_radial(final, r) * hydrogen_radial_derivative(ground, r)
        return weight * _angular_integrals(l, m, pol, kappa, k_z, r, quad, cancel)

    # The 1s derivative decays as e^{-Zr}; geometric breakpoints resolve the bulk.
    breaks = [2.0**k / Z for k in range(-1, 12) if 2.0**k / Z < cutoff]
    res = gauss_kronrod(radial, 0.0, cutoff, abs_tol=quad.abs_tol, rel_tol=quad.rel_tol,
                        max_subdivisions=quad.max_subdivisions, breakpoints=breaks, cancel=cancel)
    value = complex(res.value)
    with _cache_lock:
        _cache[key] = value
    return value


def g_factor(final: AtomicState, pol: int, beam: BeamParams,
             quad: QuadratureSpec = DEFAULT_QUAD, cancel=None) -> complex:
    """Dimensionless atomic factor g_{n_f l_f m_f, pol} for the 1s initial state.

    ``pol`` is the spherical polarization index in {-1, 0, +1}; relative to the
    beam it is +Λ, 0 or -Λ.
    """
    if pol not in (-1, 0, 1):
        raise InvalidArgumentError("pol must be -1, 0 or +1")
    return _g_raw(final.n, final.l, final.m, pol, final.Z, beam.kappa, beam.k_z, quad, cancel)


def g_factors(final: AtomicState, beam: BeamParams,
              quad: QuadratureSpec = DEFAULT_QUAD, cancel=None) -> GFactors:
    lam = beam.helicity
    return GFactors(
        g_factor(final, lam, beam, quad, cancel),
        g_factor(final, 0, beam, quad, cancel),
        g_factor(final, -lam, beam, quad, cancel),
    )


def brace_combination(final: AtomicState, beam: BeamParams,
                      quad: QuadratureSpec = DEFAULT_QUAD, cancel=None) -> complex:
    """cos²(θ/2) g_{+Λ} + (i/√2) sinθ g_0 - sin²(θ/2) g_{-Λ}."""
    g = g_factors(final, beam, quad, cancel)
    th = beam.theta_k
    return (math.cos(th / 2) ** 2 * g.g_plus
            + 1j / math.sqrt(2) * math.sin(th) * g.g_zero
            - math.sin(th / 2) ** 2 * g.g_minus)


def plane_wave_amplitude(n_f: int, l_f: int, beam: BeamParams,
                         quad: QuadratureSpec = DEFAULT_QUAD, Z: float = 1.0, cancel=None) -> complex:
    """Amplitude for a plane wave along z with helicity Λ into (n_f, l_f, m_f = Λ).

    Only the beam's ω and Λ matter; the twisted-photon quantum numbers are ignored.
    """
    lam = beam.helicity
    if not 0 <= l_f < n_f or abs(lam) > l_f:
        raise InvalidArgumentError(f"no m_f = {lam} sublevel for (n_f, l_f) = ({n_f}, {l_f})")
    return AMPLITUDE_PREFACTOR * _g_raw(n_f, l_f, lam, lam, Z, 0.0, beam.omega, quad, cancel)
