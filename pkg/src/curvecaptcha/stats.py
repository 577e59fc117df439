"""Statistical kernels: sample summaries, two-sample z test, critical values,
and an expanded Shapiro-Wilk normality test valid for 3 <= n <= 5000.

Everything here is pure and stateless. Summaries sort their input before
reducing so results are bit-identical under permutation of the sample.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from statistics import NormalDist

import numpy as np

_STD_NORMAL = NormalDist()

SW_MIN_N = 3
SW_MAX_N = 5000


class DegenerateSampleError(ValueError):
    """Raised when a test statistic is undefined for a constant sample."""


@dataclass(frozen=True)
class SampleStats:
    """Mean, sample standard deviation (n-1 divisor), and size."""

    mean: float
    std: float
    n: int

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError(f"sample size must be >= 2, got {self.n}")
        if self.std < 0:
            raise ValueError("standard deviation must be non-negative")


@dataclass(frozen=True)
class ZTestResult:
    z: float
    d0: float = 0.0

    def within_critical(self, critical_value: float) -> bool:
        return abs(self.z) <= critical_value


@dataclass(frozen=True)
class NormalityResult:
    w: float
    p_value: float


def summarize(sample) -> SampleStats:
    """Mean and sample standard deviation of a 1-D sample."""
    x = np.sort(np.asarray(sample, dtype=np.float64))
    if x.ndim != 1 or x.size < 2:
        raise ValueError("sample must be 1-D with at least 2 elements")
    if not np.all(np.isfinite(x)):
        raise ValueError("sample must be finite")
    mean = float(x.mean())
    std = float(math.sqrt(np.sum((x - mean) ** 2) / (x.size - 1)))
    return SampleStats(mean=mean, std=std, n=int(x.size))


def two_sample_z(a: SampleStats, b: SampleStats, d0: float = 0.0) -> ZTestResult:
    """z = ((mean_a - mean_b) - d0) / sqrt(std_a^2/n_a + std_b^2/n_b).

    If both deviations are zero the statistic is degenerate: z is 0 when the
    mean difference matches d0 (pass direction), otherwise a signed infinity
    (guaranteed fail, antisymmetric under sample swap).
    """
    num = (a.mean - b.mean) - d0
    denom = math.sqrt(a.std**2 / a.n + b.std**2 / b.n)
    if denom == 0.0:
        z = 0.0 if num == 0.0 else math.copysign(math.inf, num)
    else:
        z = num / denom
    return ZTestResult(z=z, d0=d0)


def critical_z(confidence: float) -> float:
    """Two-sided standard-normal critical value for the given confidence level
    (0.99 -> 2.5758, 0.95 -> 1.9600, 0.90 -> 1.6449)."""
    if not 0.0 < confidence < 1.0:
        raise ValueError(f"confidence must be in (0, 1), got {confidence}")
    return _STD_NORMAL.inv_cdf(0.5 + confidence / 2.0)


@lru_cache(maxsize=256)
def _sw_coefficients(n: int) -> np.ndarray:
    """Order-statistic weights a_1..a_n for the W statistic (ascending order,
    antisymmetric). Computed from normal order-statistic approximations with
    Royston's polynomial end corrections; no hard-coded tables beyond n=3."""
    if n == 3:
        r = math.sqrt(0.5)
        return np.array([-r, 0.0, r])

    m = np.array(
        [_STD_NORMAL.inv_cdf((i - 0.375) / (n + 0.25)) for i in range(1, n + 1)]
    )
    ssq_m = float(np.sum(m**2))
    c = m / math.sqrt(ssq_m)
    rsn = 1.0 / math.sqrt(n)

    # End-weight corrections (polynomials in n^{-1/2}).
    a_n = (
        c[-1]
        + 0.221157 * rsn
        - 0.147981 * rsn**2
        - 2.071190 * rsn**3
        + 4.434685 * rsn**4
        - 2.706056 * rsn**5
    )
    a = np.empty(n, dtype=np.float64)
    if n > 5:
        a_n1 = (
            c[-2]
            + 0.042981 * rsn
            - 0.293762 * rsn**2
            - 1.752461 * rsn**3
            + 5.682633 * rsn**4
            - 3.582633 * rsn**5
        )
        phi = (ssq_m - 2.0 * m[-1] ** 2 - 2.0 * m[-2] ** 2) / (
            1.0 - 2.0 * a_n**2 - 2.0 * a_n1**2
        )
        a[2:-2] = m[2:-2] / math.sqrt(phi)
        a[-1], a[-2] = a_n, a_n1
        a[0], a[1] = -a_n, -a_n1
    else:
        phi = (ssq_m - 2.0 * m[-1] ** 2) / (1.0 - 2.0 * a_n**2)
        a[1:-1] = m[1:-1] / math.sqrt(phi)
        a[-1] = a_n
        a[0] = -a_n
    return a


def _sw_p_value(w: float, n: int) -> float:
    if w >= 1.0:
        return 1.0
    if n == 3:
        p = (6.0 / math.pi) * (math.asin(math.sqrt(w)) - math.asin(math.sqrt(0.75)))
        return min(max(p, 0.0), 1.0)
    if n <= 11:
        gamma = -2.273 + 0.459 * n
        arg = gamma - math.log(1.0 - w)
        if arg <= 0.0:
            return 1.0
        wt = -math.log(arg)
        mu = 0.5440 - 0.39978 * n + 0.025054 * n**2 - 0.0006714 * n**3
        sigma = math.exp(1.3822 - 0.77857 * n + 0.062767 * n**2 - 0.0020322 * n**3)
    else:
        wt = math.log(1.0 - w)
        ln_n = math.log(n)
        mu = -1.5861 - 0.31082 * ln_n - 0.083751 * ln_n**2 + 0.0038915 * ln_n**3
        sigma = math.exp(-0.4803 - 0.082676 * ln_n + 0.0030302 * ln_n**2)
    z = (wt - mu) / sigma
    # Upper tail: large deviations of the transformed statistic mean non-normality.
    p = 1.0 - _STD_NORMAL.cdf(z)
    return min(max(p, 0.0), 1.0)


def shapiro_wilk(sample) -> NormalityResult:
    """W statistic and approximate p-value for departure from normality.

    Valid for 3 <= n <= 5000; a constant sample has no defined W.
    """
    x = np.sort(np.asarray(sample, dtype=np.float64))
    if x.ndim != 1:
        raise ValueError("sample must be 1-D")
    n = int(x.size)
    if not SW_MIN_N <= n <= SW_MAX_N:
        raise ValueError(f"sample size must be in [{SW_MIN_N}, {SW_MAX_N}], got {n}")
    if not np.all(np.isfinite(x)):
        raise ValueError("sample must be finite")
    centered = x - x.mean()
    ssq = float(np.sum(centered**2))
    if x[0] == x[-1] or ssq <= 0.0:
        raise DegenerateSampleError("constant sample: W is undefined")

    a = _sw_coefficients(n)
    w = float((a @ x) ** 2 / ssq)
    w = min(w, 1.0)
    return NormalityResult(w=w, p_value=_sw_p_value(w, n))
