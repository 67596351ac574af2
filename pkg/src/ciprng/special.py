"""Regularized incomplete gamma functions and erfc.

Series expansion below ``x < a + 1``, modified Lentz continued fraction above.
"""
from __future__ import annotations

import math

_EPS = 1e-16
_FPMIN = 1e-300
_MAX_ITER = 100_000


def _log_prefactor(a: float, x: float) -> float:
    return -x + a * math.log(x) - math.lgamma(a)


def _gamma_series(a: float, x: float) -> float:
    # P(a, x)
    ap = a
    term = total = 1.0 / a
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    else:
        raise ArithmeticError(f"series for P({a}, {x}) did not converge")
    return total * math.exp(_log_prefactor(a, x))


def _gamma_cfrac(a: float, x: float) -> float:
    # Q(a, x)
    b = x + 1.0 - a
    c = 1.0 / _FPMIN
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = b + an / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    else:
        raise ArithmeticError(f"continued fraction for Q({a}, {x}) did not converge")
    return math.exp(_log_prefactor(a, x)) * h


def igam(a: float, x: float) -> float:
    """Regularized lower incomplete gamma P(a, x)."""
    if a <= 0 or x < 0:
        raise ValueError(f"igam needs a > 0 and x >= 0, got a={a}, x={x}")
    if x == 0:
        return 0.0
    if x < a + 1.0:
        return _gamma_series(a, x)
    return 1.0 - _gamma_cfrac(a, x)


def igamc(a: float, x: float) -> float:
    """Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x)."""
    if a <= 0 or x < 0:
        raise ValueError(f"igamc needs a > 0 and x >= 0, got a={a}, x={x}")
    if x == 0:
        return 1.0
    if x < a + 1.0:
        return 1.0 - _gamma_series(a, x)
    return _gamma_cfrac(a, x)


def erfc(x: float) -> float:
    # erfc(x) = Q(1/2, x^2) for x >= 0
    if x < 0:
        return 2.0 - erfc(-x)
    if x == 0:
        return 1.0
    return igamc(0.5, x * x)


def normal_cdf(x: float) -> float:
    return 0.5 * erfc(-x / math.sqrt(2.0))
