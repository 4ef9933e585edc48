"""Shapiro-Wilk W test, Royston's AS R94 approximation (3 <= n <= 5000)."""

import math
from dataclasses import dataclass
from statistics import NormalDist

import numpy as np

from .errors import DegenerateInputError, InputError

DEFAULT_NORMALITY_THRESHOLD = 0.05
MIN_N = 3
MAX_N = 5000

_STD_NORMAL = NormalDist()

# polynomial coefficients, lowest order first
_C1 = (0.0, 0.221157, -0.147981, -2.07119, 4.434685, -2.706056)
_C2 = (0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633)
_C3 = (0.544, -0.39978, 0.025054, -6.714e-4)
_C4 = (1.3822, -0.77857, 0.062767, -0.0020322)
_C5 = (-1.5861, -0.31082, -0.083751, 0.0038915)
_C6 = (-0.4803, -0.082676, 0.0030302)
_G = (-2.273, 0.459)


def _poly(coeffs, x):
    result = 0.0
    for c in reversed(coeffs):
        result = result * x + c
    return result


@dataclass(frozen=True)
class NormalityResult:
    w_statistic: float
    p_value: float
    is_gaussian: bool
    threshold: float
    n: int


def shapiro_coefficients(n):
    """Half vector of AS R94 weights a_1 >= ... >= a_{n//2} (> 0)."""
    if n < MIN_N:
        raise InputError(f"Shapiro-Wilk needs at least {MIN_N} values, got {n}")
    half = n // 2
    if n == 3:
        return np.array([math.sqrt(0.5)])
    an25 = n + 0.25
    m = np.array([_STD_NORMAL.inv_cdf((i - 0.375) / an25) for i in range(1, half + 1)])
    summ2 = 2.0 * float(np.dot(m, m))
    ssumm2 = math.sqrt(summ2)
    rsn = 1.0 / math.sqrt(n)
    a1 = _poly(_C1, rsn) - m[0] / ssumm2

    a = np.empty(half)
    if n > 5:
        first = 2
        a2 = -m[1] / ssumm2 + _poly(_C2, rsn)
        fac = math.sqrt((summ2 - 2.0 * m[0] ** 2 - 2.0 * m[1] ** 2)
                        / (1.0 - 2.0 * a1 ** 2 - 2.0 * a2 ** 2))
        a[1] = a2
    else:
        first = 1
        fac = math.sqrt((summ2 - 2.0 * m[0] ** 2) / (1.0 - 2.0 * a1 ** 2))
    a[0] = a1
    a[first:] = -m[first:] / fac
    return a


def _p_value(w, n):
    if n == 3:
        # exact null distribution
        pw = (6.0 / math.pi) * (math.asin(math.sqrt(w)) - math.pi / 3.0)
        return min(1.0, max(0.0, pw))
    one_minus_w = 1.0 - w
    if one_minus_w <= 0.0:
        return 1.0
    y = math.log(one_minus_w)
    if n <= 11:
        gamma = _poly(_G, n)
        if y >= gamma:
            return 1e-99
        y = -math.log(gamma - y)
        mean = _poly(_C3, n)
        sd = math.exp(_poly(_C4, n))
    else:
        ln_n = math.log(n)
        mean = _poly(_C5, ln_n)
        sd = math.exp(_poly(_C6, ln_n))
    return 1.0 - NormalDist(mean, sd).cdf(y)


def shapiro_wilk(sample, threshold=DEFAULT_NORMALITY_THRESHOLD):
    """Shapiro-Wilk test; ``is_gaussian`` is ``p_value > threshold``."""
    x = np.sort(np.asarray(sample, dtype=np.float64).reshape(-1))
    n = x.size
    if n < MIN_N or n > MAX_N:
        raise InputError(f"Shapiro-Wilk needs {MIN_N} <= n <= {MAX_N}, got n={n}")
    if not np.all(np.isfinite(x)):
        raise InputError("Shapiro-Wilk sample contains non-finite values")
    rng = x[-1] - x[0]
    if rng <= 0.0:
        raise DegenerateInputError("Shapiro-Wilk sample is constant")

    half = shapiro_coefficients(n)
    a = np.zeros(n)
    a[:half.size] = -half
    a[n - half.size:] = half[::-1]

    xs = (x - x[0]) / rng
    xc = xs - xs.mean()
    ssx = float(np.dot(xc, xc))
    ssa = float(np.dot(a, a))
    sax = float(np.dot(a, xc))
    root = math.sqrt(ssa * ssx)
    w = 1.0 - (root - sax) * (root + sax) / (ssa * ssx)
    w = min(max(w, 0.0), 1.0)
    if n == 3 and w < 0.75:
        w = 0.75
    p = _p_value(w, n)
    return NormalityResult(float(w), float(p), bool(p > threshold), float(threshold), n)
