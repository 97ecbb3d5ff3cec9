"""Entire functions C(z) = cosh√z and S(z) = sinh√z/√z.

Both are even in √z, so the square-root branch never matters. Near the
origin a Taylor series avoids the 0/0 in S.
"""

from __future__ import annotations

import math

import numpy as np

SERIES_RADIUS = 0.25
_N_TERMS = 14
_C_COEF = np.array([1.0 / math.factorial(2 * k) for k in range(_N_TERMS)])
_S_COEF = np.array([1.0 / math.factorial(2 * k + 1) for k in range(_N_TERMS)])


def _horner(coef, z):
    acc = np.zeros_like(z) + coef[-1]
    for c in coef[-2::-1]:
        acc = acc * z + c
    return acc


def cosh_sqrt(z):
    """C(z) = cosh(√z), complex output."""
    z = np.asarray(z, dtype=complex)
    small = np.abs(z) < SERIES_RADIUS
    s = np.sqrt(z)
    out = np.cosh(s)
    if np.any(small):
        out = np.where(small, _horner(_C_COEF, z), out)
    return out


def sinhc_sqrt(z):
    """S(z) = sinh(√z)/√z, complex output, S(0) = 1."""
    z = np.asarray(z, dtype=complex)
    small = np.abs(z) < SERIES_RADIUS
    s = np.sqrt(z)
    safe = np.where(small, 1.0, s)
    out = np.sinh(safe) / safe
    if np.any(small):
        out = np.where(small, _horner(_S_COEF, z), out)
    return out


def sinc(x):
    """sin(x)/x with sinc(0) = 1."""
    return np.sinc(np.asarray(x) / np.pi)
