"""Run statistics: sample summaries, Welch's t-test and instance difficulty.

The t-distribution tail is evaluated through the regularized incomplete beta
function, implemented with a Lentz-style continued fraction so the package has
no runtime dependency on a statistics library; the test suite cross-checks it
against published critical values and scipy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

__all__ = [
    "sample_mean",
    "sample_stddev",
    "regularized_incomplete_beta",
    "student_t_two_tailed_p",
    "WelchResult",
    "welch_t_test",
    "difficulty",
]


def sample_mean(xs: Sequence[float]) -> float:
    if not xs:
        raise ValueError("mean of an empty sample")
    return sum(xs) / len(xs)


def sample_stddev(xs: Sequence[float]) -> float:
    """Sample standard deviation with the n-1 denominator (two-pass)."""
    n = len(xs)
    if n < 2:
        raise ValueError(f"sample stddev needs n >= 2, got {n}")
    m = sum(xs) / n
    return math.sqrt(sum((x - m) ** 2 for x in xs) / (n - 1))


_CF_TINY = 1e-300
_CF_TOL = 1e-14  # per-step stopping tolerance; absolute error well below 1e-10
_CF_MAX_ITER = 500


def _betacf(a: float, b: float, x: float) -> float:
    # continued fraction for the incomplete beta (modified Lentz)
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _CF_TINY:
        d = _CF_TINY
    d = 1.0 / d
    h = d
    for m in range(1, _CF_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_TOL:
            return h
    raise ArithmeticError(
        f"incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})")


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b), the regularized incomplete beta function, for 0 <= x <= 1."""
    if a <= 0 or b <= 0:
        raise ValueError(f"parameters must be positive, got a={a}, b={b}")
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x must lie in [0, 1], got {x}")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    ln_front = (math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
                + a * math.log(x) + b * math.log1p(-x))
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def student_t_two_tailed_p(t: float, dof: float) -> float:
    """Two-tailed p-value of a t statistic at ``dof`` degrees of freedom."""
    if dof <= 0:
        raise ValueError(f"degrees of freedom must be positive, got {dof}")
    if math.isinf(t):
        return 0.0
    return regularized_incomplete_beta(dof / 2.0, 0.5, dof / (dof + t * t))


@dataclass(frozen=True)
class WelchResult:
    t_stat: float
    dof: float
    p_value: float
    significant: bool
    degenerate: bool = False   # both samples constant: t undefined


def welch_t_test(sample_a: Sequence[float], sample_b: Sequence[float],
                 confidence: float = 0.95) -> WelchResult:
    """Unequal-variance (Welch) two-sample t-test, two-tailed.

    Degrees of freedom follow Welch-Satterthwaite. When both samples are
    constant the statistic is undefined; the result is flagged degenerate and
    reported significant only if the two constants differ.
    """
    na, nb = len(sample_a), len(sample_b)
    if na < 2 or nb < 2:
        raise ValueError(f"both samples need n >= 2, got {na} and {nb}")
    if not 0.0 < confidence < 1.0:
        raise ValueError(f"confidence must lie in (0, 1), got {confidence}")
    ma, mb = sample_mean(sample_a), sample_mean(sample_b)
    va = sum((x - ma) ** 2 for x in sample_a) / (na - 1)
    vb = sum((x - mb) ** 2 for x in sample_b) / (nb - 1)
    se2 = va / na + vb / nb
    alpha = 1.0 - confidence
    if se2 == 0.0:
        if ma == mb:
            return WelchResult(t_stat=0.0, dof=float("nan"), p_value=1.0,
                               significant=False, degenerate=True)
        t = math.copysign(math.inf, ma - mb)
        return WelchResult(t_stat=t, dof=float("nan"), p_value=0.0,
                           significant=True, degenerate=True)
    t = (ma - mb) / math.sqrt(se2)
    dof = se2 ** 2 / ((va / na) ** 2 / (na - 1) + (vb / nb) ** 2 / (nb - 1))
    p = student_t_two_tailed_p(t, dof)
    return WelchResult(t_stat=t, dof=dof, p_value=p, significant=p < alpha)


def difficulty(f_ave: float, f_o: float) -> float:
    """Relative excess of the achieved average over the optimum."""
    if f_o <= 0:
        raise ValueError(f"optimum must be positive, got {f_o}")
    return (f_ave - f_o) / f_o
