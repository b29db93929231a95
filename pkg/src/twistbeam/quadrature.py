"""Adaptive Gauss-Kronrod and periodic trapezoid quadrature.

Integrands are vectorized: ``f(x)`` receives a 1-D array of nodes and returns
an array whose leading axis runs over those nodes.  Any trailing axes are
integrated componentwise, and convergence is declared only when every
component meets its own tolerance.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import Cancelled, QuadratureError

# 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21).
_XGK = np.array([
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077715795881144,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
])
_WG = np.array([
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
])

# Full symmetric node/weight arrays on [-1, 1].
NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
_wg_half = np.zeros(11)
_wg_half[1:10:2] = _WG
GAUSS_WEIGHTS = np.concatenate([_wg_half[:-1], _wg_half[::-1]])

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class QuadResult:
    value: np.ndarray | complex | float
    error: np.ndarray | float
    intervals: int
    roundoff_limited: bool


@dataclass
class _Interval:
    a: float
    b: float
    value: np.ndarray
    error: np.ndarray
    floored: np.ndarray  # component error already at the roundoff floor


def _evaluate(f, bounds):
    """Apply the 21-point pair to each (a, b) in ``bounds`` with one call to ``f``."""
    centers = np.array([(a + b) / 2 for a, b in bounds])
    halfs = np.array([(b - a) / 2 for a, b in bounds])
    x = (centers[:, None] + halfs[:, None] * NODES[None, :]).ravel()
    fx = np.asarray(f(x))
    if fx.shape[0] != x.size:
        raise ValueError("integrand must return one value per node along axis 0")
    fx = fx.reshape((len(bounds), NODES.size) + fx.shape[1:])
    out = []
    for i, (a, b) in enumerate(bounds):
        vals = fx[i]
        h = halfs[i]
        k = h * np.tensordot(KRONROD_WEIGHTS, vals, axes=(0, 0))
        g = h * np.tensordot(GAUSS_WEIGHTS, vals, axes=(0, 0))
        resabs = abs(h) * np.tensordot(KRONROD_WEIGHTS, np.abs(vals), axes=(0, 0))
        floor = 50.0 * _EPS * resabs
        raw = np.abs(k - g)
        err = np.maximum(raw, floor)
        out.append(_Interval(a, b, np.asarray(k), np.asarray(err), np.asarray(raw <= floor)))
    return out


def gauss_kronrod(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    *,
    abs_tol: float = 1e-30,
    rel_tol: float = 1e-10,
    max_subdivisions: int = 200,
    breakpoints: Sequence[float] = (),
    cancel=None,
) -> QuadResult:
    """Integrate ``f`` over [a, b] by globally adaptive bisection.

    ``cancel`` may be any object with an ``is_set()`` method (for example a
    ``threading.Event``); it is polled once per bisection.
    """
    if not (abs_tol > 0 and rel_tol > 0):
        raise ValueError("tolerances must be positive")
    edges = [a] + sorted(p for p in breakpoints if a < p < b) + [b]
    intervals = _evaluate(f, list(zip(edges[:-1], edges[1:])))
    n_bisect = 0
    while True:
        total = sum(iv.value for iv in intervals)
        err = sum(iv.error for iv in intervals)
        tol = np.maximum(abs_tol, rel_tol * np.abs(total))
        if np.all(err <= tol):
            return QuadResult(total, err, len(intervals), False)
        if cancel is not None and cancel.is_set():
            raise Cancelled("quadrature cancelled")
        # Only components above the roundoff floor can still improve.
        scores = [
            np.max(np.where(iv.floored, 0.0, iv.error / tol)) for iv in intervals
        ]
        idx = int(np.argmax(scores))
        if scores[idx] == 0.0:
            return QuadResult(total, err, len(intervals), True)
        if n_bisect >= max_subdivisions:
            raise QuadratureError(
                f"no convergence after {max_subdivisions} subdivisions",
                residual=float(np.max(err)),
            )
        iv = intervals.pop(idx)
        mid = 0.5 * (iv.a + iv.b)
        intervals.extend(_evaluate(f, [(iv.a, mid), (mid, iv.b)]))
        n_bisect += 1


def periodic_mean(
    f: Callable[[np.ndarray], np.ndarray],
    *,
    tol: float = 1e-10,
    n_start: int = 16,
    n_max: int = 1 << 16,
) -> np.ndarray:
    """Mean of a 2π-periodic ``f`` over one period, ``∫ f dφ / 2π``.

    Uses the trapezoid rule, doubling the node count until successive
    estimates agree to ``tol`` (absolute).
    """
    n = n_start
    phi = 2 * np.pi * np.arange(n) / n
    prev = np.mean(np.asarray(f(phi)), axis=0)
    while n < n_max:
        # Reuse the existing nodes: only the midpoints are new.
        mid = phi + np.pi / n
        cur = 0.5 * (prev + np.mean(np.asarray(f(mid)), axis=0))
        n *= 2
        phi = 2 * np.pi * np.arange(n) / n
        if np.max(np.abs(cur - prev)) < tol:
            return cur
        prev = cur
    raise QuadratureError(f"periodic trapezoid did not converge with {n_max} nodes",
                          residual=float(np.max(np.abs(cur - prev))))
