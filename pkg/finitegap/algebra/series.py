"""
Truncated power series in a local coordinate h = λ − λ₀.

A series is a 1-D complex numpy array of Taylor coefficients, lowest order
first; every helper truncates its result to the requested length.
"""
from math import comb
from typing import Sequence

import numpy as np


def as_series(coefficients: Sequence[complex], length: int) -> np.ndarray:
    out = np.zeros(length, dtype=complex)
    data = np.asarray(coefficients, dtype=complex)[:length]
    out[: data.size] = data
    return out


def multiply(a: np.ndarray, b: np.ndarray, length: int) -> np.ndarray:
    if length <= 0:
        return np.zeros(0, dtype=complex)
    return as_series(np.convolve(a[:length], b[:length]), length)


def exp_series(g: np.ndarray, length: int) -> np.ndarray:
    """exp of a series with vanishing constant term."""
    e = np.zeros(length, dtype=complex)
    if length == 0:
        return e
    e[0] = 1.0
    g = as_series(g, length)
    k = np.arange(length)
    for n in range(1, length):
        e[n] = np.dot(k[1: n + 1] * g[1: n + 1], e[n - 1:: -1][:n]) / n
    return e


def shifted_power(base: complex, exponent: int, length: int) -> np.ndarray:
    """Taylor coefficients of (base + h)^exponent; `base` must be nonzero for negative exponents."""
    out = np.zeros(length, dtype=complex)
    if exponent >= 0:
        for i in range(min(length, exponent + 1)):
            out[i] = comb(exponent, i) * base ** (exponent - i)
        return out
    m = -exponent
    for i in range(length):
        # binom(-m, i) = (-1)^i C(m+i-1, i)
        out[i] = (-1) ** i * comb(m + i - 1, i) * base ** (-m - i)
    return out


def polynomial_taylor(coefficients: np.ndarray, center: complex, length: int) -> np.ndarray:
    """Taylor coefficients at `center` of Σ cⱼ λ^j (coefficients lowest degree first)."""
    out = np.zeros(length, dtype=complex)
    for j, c in enumerate(np.asarray(coefficients, dtype=complex)):
        if c != 0:
            out += c * shifted_power(center, j, length)
    return out


def inverse_binomial_at_infinity(root: complex, multiplicity: int, length: int) -> np.ndarray:
    """Coefficients in w = 1/λ of (1 − root·w)^(−multiplicity)."""
    out = np.zeros(length, dtype=complex)
    for i in range(length):
        out[i] = comb(multiplicity + i - 1, i) * root ** i
    return out
