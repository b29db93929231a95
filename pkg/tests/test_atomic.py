import math
import threading

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from twistbeam.atomic import (
    AtomicState,
    QuadratureSpec,
    brace_combination,
    clear_cache,
    g_factor,
    g_factors,
    plane_wave_amplitude,
    AMPLITUDE_PREFACTOR,
)
from twistbeam.beam import BeamParams
from twistbeam.errors import Cancelled, InvalidArgumentError
from twistbeam.specfun import WignerIndex, wigner_small_d


def _gl(a, b, n):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (b - a) * x + 0.5 * (b + a), 0.5 * (b - a) * w


def _g_oracle(m, pol, beam, n=200):
    """Tensor-product Gauss-Legendre for n_f = 2, l_f = 1 with scipy special functions."""
    # radial nodes split where the e^{-3r/2} envelope has decayed
    r1, w1 = _gl(0.0, 12.0, n)
    r2, w2 = _gl(12.0, 160.0, n)
    r, wr = np.concatenate([r1, r2]), np.concatenate([w1, w2])
    u, wu = np.polynomial.legendre.leggauss(n)
    R21 = r * np.exp(-r / 2) / (2 * math.sqrt(6))
    dR10 = -2 * np.exp(-r)
    radial = -r * r * R21 * dR10
    th = np.arccos(u)
    ang = special.sph_harm_y(1, m, th, 0.0).real * special.sph_harm_y(1, pol, th, 0.0).real
    U, Rr = np.meshgrid(u, r, indexing="ij")
    inner = special.jv(m - pol, beam.kappa * Rr * np.sqrt(1 - U * U)) * np.exp(1j * beam.k_z * Rr * U)
    return np.einsum("i,j,i,j,ij->", wu, wr, ang, radial, inner)


@pytest.fixture
def lyman_alpha():
    return BeamParams.from_wavelength_nm(121.6, 0.3, 1)


@pytest.mark.parametrize("pol", [1, 0, -1])
def test_g_factor_against_tensor_gauss_legendre(lyman_alpha, pol):
    got = g_factor(AtomicState(2, 1, 1), pol, lyman_alpha)
    ref = _g_oracle(1, pol, lyman_alpha)
    assert abs(got - ref) < 1e-8 * max(abs(ref), 1e-30) or abs(got - ref) < 1e-14


def test_g_factor_dipole_limit():
    # ω -> 0: the Bessel and exponential factors drop out of the 1s -> 2p integral.
    beam = BeamParams(1e-7, 0.01, 1)
    got = g_factor(AtomicState(2, 1, 1), 1, beam)
    radial = math.factorial(3) / 1.5**4 / math.sqrt(6)  # -∫ r² R21 R10' dr
    ang = 1 / (2 * math.pi)  # ∫ Y11(θ, 0)² d cosθ
    assert got.real == pytest.approx(radial * ang, rel=1e-6)


@pytest.mark.parametrize("l_f", [1, 2, 3])
def test_factorization_brace_equals_d_times_plane_wave(ref_beam, l_f):
    n_f = 4
    g_pw = plane_wave_amplitude(n_f, l_f, ref_beam) / AMPLITUDE_PREFACTOR
    for m_f in range(-l_f, l_f + 1):
        brace = brace_combination(AtomicState(n_f, l_f, m_f), ref_beam)
        d = wigner_small_d(WignerIndex(l_f, m_f, 1), ref_beam.theta_k)
        expected = 1j ** (1 - m_f) * d * g_pw
        assert abs(brace - expected) <= 1e-6 * abs(g_pw)


@pytest.mark.parametrize("l_f,m,pol", [(1, 1, 1), (2, 1, 0), (3, 2, -1), (3, 0, 1)])
def test_parity_symmetry(ref_beam, l_f, m, pol):
    a = g_factor(AtomicState(4, l_f, m), pol, ref_beam)
    b = g_factor(AtomicState(4, l_f, -m), -pol, ref_beam)
    assert abs(a - b) <= 1e-10 * abs(a) + 1e-30


def test_brace_vanishes_where_wigner_d_does():
    beam = BeamParams.resonant(4, math.pi / 3, 1)
    brace = brace_combination(AtomicState(4, 2, 1), beam)
    scale = abs(plane_wave_amplitude(4, 2, beam) / AMPLITUDE_PREFACTOR)
    assert abs(brace) < 1e-9 * scale


def test_multipole_hierarchy(ref_beam):
    amps = [abs(plane_wave_amplitude(4, l, ref_beam)) for l in (1, 2, 3)]
    wa = ref_beam.omega
    assert amps[0] > amps[1] > amps[2] > 0
    # each step costs roughly one power of ω a0
    for lo, hi in zip(amps[1:], amps[:-1]):
        assert 0.1 * wa < lo / hi < 10 * wa


def test_tolerance_halving_is_stable(ref_beam):
    final = AtomicState(4, 2, 1)
    a = g_factors(final, ref_beam, QuadratureSpec(rel_tol=1e-10))
    b = g_factors(final, ref_beam, QuadratureSpec(rel_tol=5e-11))
    for x, y in ((a.g_plus, b.g_plus), (a.g_zero, b.g_zero), (a.g_minus, b.g_minus)):
        assert abs(x - y) <= 1e-9 * abs(y) + 1e-25


def test_radial_cutoff_converged(ref_beam):
    final = AtomicState(4, 3, 1)
    a = g_factor(final, 1, ref_beam, QuadratureSpec(radial_cutoff=640))
    b = g_factor(final, 1, ref_beam, QuadratureSpec(radial_cutoff=900))
    assert abs(a - b) <= 1e-10 * abs(b)


def test_cancellation_token(ref_beam):
    clear_cache()
    token = threading.Event()
    token.set()
    with pytest.raises(Cancelled):
        g_factor(AtomicState(4, 3, 2), 0, ref_beam.with_(theta_k=0.21), cancel=token)


@pytest.mark.parametrize("args", [(1, 1, 0), (3, 3, 0), (3, 1, 2), (2, 1, 0, 0.5)])
def test_state_validation(args):
    with pytest.raises(InvalidArgumentError):
        AtomicState(*args)


def test_plane_wave_needs_matching_sublevel(ref_beam):
    with pytest.raises(InvalidArgumentError):
        plane_wave_amplitude(4, 0, ref_beam)


@given(theta=st.floats(0.05, 1.2), lam=st.sampled_from([1, -1]))
@settings(max_examples=10, deadline=None)
def test_e1_brace_follows_wigner_for_any_pitch(theta, lam):
    beam = BeamParams.resonant(2, theta, lam, lam)
    g_pw = plane_wave_amplitude(2, 1, beam) / AMPLITUDE_PREFACTOR
    for m_f in (-1, 0, 1):
        brace = brace_combination(AtomicState(2, 1, m_f), beam)
        d = wigner_small_d(WignerIndex(1, m_f, lam), theta)
        assert abs(abs(brace) - abs(d * g_pw)) <= 1e-7 * abs(g_pw)
