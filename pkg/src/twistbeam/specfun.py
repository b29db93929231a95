"""Special functions: Bessel J_n, spherical harmonics, Wigner small-d, hydrogen radials.

Everything accepts scalar or array arguments and follows numpy broadcasting;
scalars in give scalars out.  Phases follow the Condon-Shortley convention.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import InvalidArgumentError

MAX_BESSEL_ORDER = 64
MAX_WIGNER_J = 64

# Below this |x| the power series is used; above it, Miller's downward recurrence.
_SERIES_LIMIT = 2.0
_RESCALE = 1e200


def _as_output(x, scalar):
    return x.item() if scalar else x


def _check_order(order, cap):
    if isinstance(order, bool) or int(order) != order:
        raise InvalidArgumentError(f"Bessel order must be an integer, got {order!r}")
    order = int(order)
    if abs(order) > cap:
        raise InvalidArgumentError(f"|order| = {abs(order)} exceeds the cap {cap}")
    return order


def _bessel_series(n, x):
    half = x / 2.0
    term = half**n / math.factorial(n)
    total = term.copy()
    q = -half * half
    for k in range(1, 60):
        term = term * q / (k * (k + n))
        total += term
        if np.all(np.abs(term) <= 1e-17 * np.abs(total)):
            break
    return total


def _bessel_miller(n, x):
    """Downward recurrence from a high start order, normalized by J_0 + 2ΣJ_2k = 1."""
    xmax = float(np.max(x))
    start = int(max(n, xmax) + 30 + 10 * np.cbrt(xmax))
    start += start % 2
    j_next = np.zeros_like(x)
    j_cur = np.full_like(x, 1e-30)
    norm = np.zeros_like(x)
    kept = np.zeros_like(x)
    inv_x = 1.0 / x
    for k in range(start, 0, -1):
        j_prev = 2.0 * k * inv_x * j_cur - j_next
        j_next, j_cur = j_cur, j_prev
        # j_cur now holds the order k-1 value.
        if k - 1 == n:
            kept = j_cur.copy()
        if (k - 1) % 2 == 0 and k - 1 > 0:
            norm += 2.0 * j_cur
        big = np.abs(j_cur) > _RESCALE
        if np.any(big):
            scale = np.where(big, 1.0 / _RESCALE, 1.0)
            j_cur *= scale
            j_next *= scale
            norm *= scale
            kept *= scale
    norm += j_cur  # order 0
    return kept / norm


def bessel_j(order: int, x, max_order: int = MAX_BESSEL_ORDER):
    """Bessel function of the first kind J_order(x) for integer order.

    Negative orders use J_{-n}(x) = (-1)^n J_n(x); negative arguments use
    J_n(-x) = (-1)^n J_n(x).
    """
    order = _check_order(order, max_order)
    scalar = np.ndim(x) == 0
    x = np.asarray(x, dtype=float)
    if np.any(np.isnan(x)):
        raise InvalidArgumentError("Bessel argument is NaN")
    if np.any(np.isinf(x)):
        raise InvalidArgumentError("Bessel argument must be finite")
    n = abs(order)
    ax = np.abs(x).reshape(-1)
    out = np.empty_like(ax)
    small = ax <= _SERIES_LIMIT
    if np.any(small):
        out[small] = _bessel_series(n, ax[small])
    if np.any(~small):
        out[~small] = _bessel_miller(n, ax[~small])
    out = out.reshape(x.shape)
    if n % 2 == 1:
        sign = np.where(x < 0, -1.0, 1.0)
        if order < 0:
            sign = -sign
        out = out * sign
    return _as_output(out, scalar)


@dataclass(frozen=True)
class WignerIndex:
    j: int
    m_row: int
    m_col: int

    def __post_init__(self):
        if self.j < 0 or abs(self.m_row) > self.j or abs(self.m_col) > self.j:
            raise InvalidArgumentError(f"invalid Wigner index {self}")
        if self.j > MAX_WIGNER_J:
            raise InvalidArgumentError(f"j = {self.j} exceeds {MAX_WIGNER_J}")


@lru_cache(maxsize=None)
def _factorial(n: int) -> int:
    return math.factorial(n)


@lru_cache(maxsize=4096)
def _wigner_terms(j, mp, m):
    """(coefficient, cos power, sin power) triples of the Wigner sum formula."""
    pref = math.sqrt(_factorial(j + mp) * _factorial(j - mp) * _factorial(j + m) * _factorial(j - m))
    terms = []
    for s in range(max(0, m - mp), min(j + m, j - mp) + 1):
        den = _factorial(j + m - s) * _factorial(s) * _factorial(mp - m + s) * _factorial(j - mp - s)
        sign = -1.0 if (mp - m + s) % 2 else 1.0
        terms.append((sign * pref / den, 2 * j + m - mp - 2 * s, mp - m + 2 * s))
    return tuple(terms)


def wigner_small_d(idx: WignerIndex, theta):
    """d^j_{m_row, m_col}(theta), real, Condon-Shortley / Wigner convention.

    With this convention d^1_{1,0}(θ) = -sin θ/√2 and d^1_{0,1}(θ) = +sin θ/√2.
    """
    scalar = np.ndim(theta) == 0
    theta = np.asarray(theta, dtype=float)
    if np.any((theta < 0) | (theta > np.pi)):
        raise InvalidArgumentError("theta must lie in [0, pi]")
    c = np.cos(theta / 2)
    s = np.sin(theta / 2)
    out = np.zeros_like(theta)
    for coef, pc, ps in _wigner_terms(idx.j, idx.m_row, idx.m_col):
        out = out + coef * c**pc * s**ps
    return _as_output(out, scalar)


def spherical_harmonic(l: int, m: int, theta, phi):
    """Y_lm(theta, phi) with the Condon-Shortley phase."""
    if l < 0 or abs(m) > l:
        raise InvalidArgumentError(f"invalid (l, m) = ({l}, {m})")
    scalar = np.ndim(theta) == 0 and np.ndim(phi) == 0
    theta = np.asarray(theta, dtype=float)
    if np.any((theta < 0) | (theta > np.pi)):
        raise InvalidArgumentError("theta must lie in [0, pi]")
    am = abs(m)
    x = np.cos(theta)
    sx = np.sin(theta)
    # Orthonormal associated Legendre by the standard three-term recurrence.
    p_mm = np.full_like(x, 1.0 / math.sqrt(4 * math.pi))
    for k in range(1, am + 1):
        p_mm = -math.sqrt((2 * k + 1) / (2 * k)) * sx * p_mm
    if l == am:
        p = p_mm
    else:
        p_prev, p = p_mm, math.sqrt(2 * am + 3) * x * p_mm
        for ll in range(am + 2, l + 1):
            a = math.sqrt((4 * ll * ll - 1) / (ll * ll - am * am))
            b = math.sqrt(((ll - 1) ** 2 - am * am) / (4 * (ll - 1) ** 2 - 1))
            p_prev, p = p, a * (x * p - b * p_prev)
    y = p * np.exp(1j * am * np.asarray(phi, dtype=float))
    if m < 0:
        y = (-1) ** am * np.conj(y)
    return _as_output(y, scalar)


@dataclass(frozen=True)
class RadialState:
    n: int
    l: int
    Z: float = 1.0
    a0: float = 1.0

    def __post_init__(self):
        if self.n < 1 or not (0 <= self.l <= self.n - 1):
            raise InvalidArgumentError(f"invalid (n, l) = ({self.n}, {self.l})")
        if self.Z < 1 or self.a0 <= 0:
            raise InvalidArgumentError("need Z >= 1 and a0 > 0")


def _laguerre(k, alpha, x):
    """Generalized Laguerre polynomial L_k^alpha(x) by upward recurrence."""
    if k < 0:
        return np.zeros_like(x)
    l0 = np.ones_like(x)
    if k == 0:
        return l0
    l1 = 1.0 + alpha - x
    for i in range(1, k):
        l0, l1 = l1, ((2 * i + 1 + alpha - x) * l1 - (i + alpha) * l0) / (i + 1)
    return l1


def _radial_norm(st):
    n, l, Z = st.n, st.l, st.Z
    return math.sqrt((2 * Z / n) ** 3 * _factorial(n - l - 1) / (2 * n * _factorial(n + l)))


def hydrogen_radial(state: RadialState, r):
    """Bound hydrogen-like R_nl(r), normalized so ∫ r² R² dr = 1."""
    scalar = np.ndim(r) == 0
    r = np.asarray(r, dtype=float) / state.a0
    if np.any(r < 0):
        raise InvalidArgumentError("r must be non-negative")
    n, l = state.n, state.l
    rho = 2 * state.Z * r / n
    out = _radial_norm(state) * np.exp(-rho / 2) * rho**l * _laguerre(n - l - 1, 2 * l + 1, rho)
    return _as_output(out * state.a0**-1.5, scalar)


def hydrogen_radial_derivative(state: RadialState, r):
    """dR_nl/dr, analytic for every (n, l)."""
    scalar = np.ndim(r) == 0
    r = np.asarray(r, dtype=float) / state.a0
    if np.any(r < 0):
        raise InvalidArgumentError("r must be non-negative")
    n, l = state.n, state.l
    k, alpha = n - l - 1, 2 * l + 1
    rho = 2 * state.Z * r / n
    lag = _laguerre(k, alpha, rho)
    dlag = -_laguerre(k - 1, alpha + 1, rho)
    if l == 0:
        poly = -0.5 * lag + dlag
    else:
        poly = rho ** (l - 1) * (l * lag + rho * (dlag - 0.5 * lag))
    out = _radial_norm(state) * (2 * state.Z / n) * np.exp(-rho / 2) * poly
    return _as_output(out * state.a0**-2.5, scalar)
