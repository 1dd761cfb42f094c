"""Gamma, upper incomplete gamma and the lower Lambert W branch.

These are the only special functions needed by the closed-form Lorenz P-P
plot of a Weibull against a unit exponential and by the Weibull mean
normalisation. They are scalar kernels; array inputs are handled through
``np.vectorize`` at the call sites that need them.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = [
    "gamma_fn",
    "log_gamma",
    "upper_incomplete_gamma",
    "lambert_w_minus1",
    "analytic_lpp_weibull_exp",
]

# Lanczos approximation, g = 7, nine terms (relative error ~1e-15 for s > 0).
_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)
_EPS = 1e-16
_TINY = 1e-300
_BRANCH = -1.0 / math.e


def _lanczos_log_gamma(s: float) -> float:
    # valid for s >= 0.5
    z = s - 1.0
    acc = _LANCZOS_COEF[0]
    for i, c in enumerate(_LANCZOS_COEF[1:], start=1):
        acc += c / (z + i)
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * math.log(t) - t + math.log(acc)


def log_gamma(s: float) -> float:
    """Natural log of the gamma function for ``s > 0``."""
    s = float(s)
    if not s > 0.0 or not math.isfinite(s):
        raise ValueError(f"log_gamma requires a finite s > 0, got {s!r}")
    if s < 0.5:
        # Gamma(s) = Gamma(s + 1) / s keeps the Lanczos sum in its good range
        return _lanczos_log_gamma(s + 1.0) - math.log(s)
    return _lanczos_log_gamma(s)


def gamma_fn(s: float) -> float:
    """Gamma function on the positive half line.

    Parameters
    ----------
    s : float
        Argument, strictly positive.

    Returns
    -------
    float
        ``Gamma(s)``; ``inf`` once the result overflows a double (s > ~171.6).
    """
    s = float(s)
    if not s > 0.0 or not math.isfinite(s):
        raise ValueError(f"gamma_fn requires a finite s > 0, got {s!r}")
    if s < 0.5:
        return gamma_fn(s + 1.0) / s
    if s > 171.7:
        return math.inf
    z = s - 1.0
    acc = _LANCZOS_COEF[0]
    for i, c in enumerate(_LANCZOS_COEF[1:], start=1):
        acc += c / (z + i)
    t = z + _LANCZOS_G + 0.5
    return math.sqrt(2.0 * math.pi) * t ** (z + 0.5) * math.exp(-t) * acc


def _lower_series(s: float, x: float) -> float:
    """Regularised lower incomplete gamma P(s, x) by its power series."""
    term = 1.0 / s
    total = term
    ap = s
    for _ in range(10_000):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    else:  # pragma: no cover - series converges for every x < s + 1
        raise ArithmeticError("incomplete gamma series failed to converge")
    return total * math.exp(-x + s * math.log(x) - log_gamma(s))


def _upper_fraction(s: float, x: float) -> float:
    """Regularised upper incomplete gamma Q(s, x) by modified Lentz."""
    b = x + 1.0 - s
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, 10_000):
        an = -i * (i - s)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    else:  # pragma: no cover
        raise ArithmeticError("incomplete gamma continued fraction failed to converge")
    return math.exp(-x + s * math.log(x) - log_gamma(s)) * h


def upper_incomplete_gamma(s: float, x: float) -> float:
    """Non-regularised upper incomplete gamma ``int_x^inf t^(s-1) e^-t dt``.

    Uses the power series of the lower function when ``x < s + 1`` and the
    continued fraction for the upper function otherwise.
    """
    s = float(s)
    x = float(x)
    if not s > 0.0 or not math.isfinite(s):
        raise ValueError(f"upper_incomplete_gamma requires s > 0, got {s!r}")
    if math.isnan(x) or x < 0.0:
        raise ValueError(f"upper_incomplete_gamma requires x >= 0, got {x!r}")
    if x == 0.0:
        return gamma_fn(s)
    if math.isinf(x):
        return 0.0
    if x < s + 1.0:
        return gamma_fn(s) * (1.0 - _lower_series(s, x))
    return gamma_fn(s) * _upper_fraction(s, x)


def _w_initial(x: float) -> float:
    if x < -0.25:
        # branch-point expansion in p = -sqrt(2(1 + e x))
        p = -math.sqrt(max(2.0 * (1.0 + math.e * x), 0.0))
        return -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p**3
    l1 = math.log(-x)
    l2 = math.log(-l1)
    return l1 - l2 + l2 / l1


def lambert_w_minus1(x: float) -> float:
    """Lower real branch ``W_{-1}`` of the Lambert function.

    Solves ``w * exp(w) = x`` for ``w <= -1`` with ``-1/e <= x < 0``.
    Halley steps from an asymptotic seed, safeguarded by a bisection
    bracket; iteration stops on the residual of the defining equation.
    """
    x = float(x)
    if math.isnan(x) or x >= 0.0 or x < _BRANCH - 1e-15:
        raise ValueError(f"lambert_w_minus1 requires -1/e <= x < 0, got {x!r}")
    if x <= _BRANCH:
        return -1.0

    # f(w) = w e^w - x is decreasing on (-inf, -1]
    lo, hi = -1.0, -2.0
    while hi * math.exp(hi) < x:
        lo = hi
        hi *= 2.0
    # bracket: f(lo) <= 0 <= f(hi) with hi < lo
    w = min(max(_w_initial(x), hi), lo)
    for _ in range(200):
        ew = math.exp(w)
        f = w * ew - x
        if f == 0.0:
            break
        if f > 0.0:
            hi = w
        else:
            lo = w
        wp1 = w + 1.0
        step = 0.0
        if wp1 != 0.0:
            denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1)
            if denom != 0.0:
                step = f / denom
        w_new = w - step
        if not (hi < w_new < lo) or step == 0.0:
            w_new = 0.5 * (lo + hi)
        if abs(w_new - w) <= 4e-16 * abs(w):
            w = w_new
            break
        w = w_new
    return w


def _lpp_scalar(a: float, b: float, p: float) -> float:
    s = 1.0 + 1.0 / a
    if p == 0.0:
        return 0.0
    level = math.inf if p >= 1.0 else -math.log1p(-p)
    lorenz_f = b * (gamma_fn(s) - upper_incomplete_gamma(s, level))
    if lorenz_f >= 1.0:
        return 1.0
    if lorenz_f <= 0.0:
        return 0.0
    return min(1.0, -math.expm1(1.0 + lambert_w_minus1((lorenz_f - 1.0) / math.e)))


def analytic_lpp_weibull_exp(a: float, b: float, p):
    """Closed-form Lorenz P-P plot of ``W(a, b)`` against the unit exponential.

    Evaluates ``1 ^ L_G^{-1}(L_F(p))`` where ``L_F`` is the Weibull unscaled
    Lorenz curve (via the upper incomplete gamma) and
    ``L_G^{-1}(t) = 1 - exp(1 + W_{-1}((t - 1)/e))`` for ``t <= 1``; levels at
    or above the exponential mean map to 1. ``p = 1`` is accepted and uses the
    Weibull mean as the Lorenz ordinate.

    Parameters
    ----------
    a, b : float
        Weibull shape and scale, both positive.
    p : float or array_like
        Probabilities in ``[0, 1]``.
    """
    if not (a > 0 and b > 0):
        raise ValueError(f"Weibull parameters must be positive, got a={a!r}, b={b!r}")
    arr = np.asarray(p, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any((arr < 0.0) | (arr > 1.0)):
        raise ValueError("p must lie in [0, 1]")
    out = np.vectorize(lambda q: _lpp_scalar(a, b, float(q)), otypes=[float])(arr)
    return float(out) if out.ndim == 0 else out
