"""Cancellation-free evaluations of the small-rate expressions.

Every function takes a signed rate ``G`` and a time ``t`` and stays
accurate as ``G * t -> 0``, where the naive quotient loses all digits.
"""

import math

_SERIES_CUTOFF = 0.1


def grow(G: float, t: float) -> float:
    """(exp(G t) - 1) / G."""
    x = G * t
    if x == 0.0:
        return t
    return t * math.expm1(x) / x


def decay(G: float, t: float) -> float:
    """(1 - exp(-G t)) / G."""
    x = G * t
    if x == 0.0:
        return t
    return -t * math.expm1(-x) / x


def sinh_excess(G: float, t: float) -> float:
    """(sinh(G t) - G t) / G**2, odd in G."""
    x = G * t
    if abs(x) < _SERIES_CUTOFF:
        x2 = x * x
        # x/6 + x^3/120 + x^5/5040 + x^7/362880 + x^9/39916800
        s = x * (1 / 6 + x2 * (1 / 120 + x2 * (1 / 5040 + x2 * (1 / 362880 + x2 / 39916800))))
        return t * t * s
    return t * t * (math.sinh(x) - x) / (x * x)


def exp_excess(G: float, t: float) -> float:
    """(exp(G t) - 1 - G t) / G**2."""
    x = G * t
    if abs(x) < _SERIES_CUTOFF:
        # sum_{k>=0} x^k / (k+2)!
        s, term = 0.0, 0.5
        for k in range(12):
            s += term
            term *= x / (k + 3)
        return t * t * s
    return t * t * (math.expm1(x) - x) / (x * x)


def sinhc(x: float) -> float:
    """sinh(x) / x with the removable point at 0."""
    if abs(x) < 1e-4:
        return 1.0 + x * x / 6
    return math.sinh(x) / x
