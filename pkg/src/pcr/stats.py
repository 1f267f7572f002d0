"""Paired t-test and Cohen's d for per-query metric differences.

The Student t CDF is evaluated through the regularized incomplete beta
function (continued-fraction expansion), so no statistics package is needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, NamedTuple, Optional, Sequence

from .config import MARGINAL_P, SIGNIFICANT_P
from .errors import DegenerateVarianceError, EmptyInputError

_EPS = 1e-15
_TINY = 1e-300
_MAX_ITER = 500


def _betacf(a: float, b: float, x: float) -> float:
    # modified Lentz evaluation of the incomplete beta continued fraction
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, _MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise ArithmeticError(f"incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})")


def betainc(a: float, b: float, x: float, y: Optional[float] = None) -> float:
    """Regularized incomplete beta I_x(a, b) for a, b > 0 and 0 <= x <= 1.

    ``y`` may pass 1 - x when the caller can compute it more accurately.
    """
    if a <= 0 or b <= 0:
        raise ValueError("a and b must be positive")
    if not 0.0 <= x <= 1.0:
        raise ValueError("x must lie in [0, 1]")
    if y is None:
        y = 1.0 - x
    if x == 0.0 or y == 0.0:
        return 0.0 if x == 0.0 else 1.0
    log_front = math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b) + a * math.log(x) + b * math.log(y)
    front = math.exp(log_front)
    # the fraction converges fast only on this side of the mean
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, y) / b


def t_sf_two_sided(t: float, df: float) -> float:
    """P(|T| >= |t|) for Student's t with ``df`` degrees of freedom."""
    if df <= 0:
        raise ValueError("df must be positive")
    if math.isinf(t):
        return 0.0
    t2 = t * t
    x = df / (df + t2)
    y = t2 / (df + t2)
    return min(1.0, max(0.0, betainc(df / 2.0, 0.5, x, y)))


def t_cdf(t: float, df: float) -> float:
    tail = 0.5 * t_sf_two_sided(t, df)
    return 1.0 - tail if t >= 0 else tail


def t_ppf(q: float, df: float) -> float:
    """Quantile of Student's t by bisection on :func:`t_cdf`."""
    if not 0.0 < q < 1.0:
        raise ValueError("q must lie in (0, 1)")
    lo, hi = -1.0, 1.0
    while t_cdf(lo, df) > q:
        lo *= 2.0
    while t_cdf(hi, df) < q:
        hi *= 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if t_cdf(mid, df) < q:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-12 * max(1.0, abs(mid)):
            break
    return 0.5 * (lo + hi)


class TTest(NamedTuple):
    t_statistic: float
    p_value: float
    cohens_d: float


def _mean_sd(diffs: Sequence[float]):
    n = len(diffs)
    mean = math.fsum(diffs) / n
    var = math.fsum((x - mean) ** 2 for x in diffs) / (n - 1)
    return mean, math.sqrt(var)


def paired_ttest(diffs: Sequence[float]) -> TTest:
    """Paired t-test on differences, with d = mean / sd (sample sd, ddof=1).

    Because both use the same sd, d equals t / sqrt(n) exactly up to rounding.
    """
    n = len(diffs)
    if n < 2:
        raise EmptyInputError("paired t-test needs at least two differences")
    mean, sd = _mean_sd(diffs)
    # identical diffs can leave rounding residue in sd, so test them directly
    if sd == 0.0 or min(diffs) == max(diffs):
        raise DegenerateVarianceError(mean)
    t = mean / (sd / math.sqrt(n))
    p = t_sf_two_sided(t, n - 1)
    return TTest(t, p, mean / sd)


def significance_label(p: Optional[float]) -> str:
    if p is None:
        return "n/a"
    if p < SIGNIFICANT_P:
        return "Yes"
    if p < MARGINAL_P:
        return "Marginal"
    return "No"


@dataclass(frozen=True)
class PairedComparison:
    label_a: str
    label_b: str
    diffs: List[float]
    mean_diff: float
    t_statistic: Optional[float]
    p_value: Optional[float]
    cohens_d: Optional[float]
    n: int
    metric: str = "relevance@10"

    @property
    def significant(self) -> str:
        return significance_label(self.p_value)

    def to_dict(self) -> dict:
        return {
            "comparison": f"{self.label_a} vs {self.label_b}",
            "label_a": self.label_a,
            "label_b": self.label_b,
            "metric": self.metric,
            "n": self.n,
            "mean_diff": self.mean_diff,
            "t_statistic": self.t_statistic,
            "p_value": self.p_value,
            "cohens_d": self.cohens_d,
            "significant": self.significant,
            "diffs": list(self.diffs),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PairedComparison":
        return cls(
            d["label_a"], d["label_b"], list(d["diffs"]), d["mean_diff"], d["t_statistic"],
            d["p_value"], d["cohens_d"], d["n"], d.get("metric", "relevance@10"),
        )


def compare(
    label_a: str,
    label_b: str,
    values_a: Sequence[float],
    values_b: Sequence[float],
    metric: str = "relevance@10",
) -> PairedComparison:
    """Paired comparison a − b; constant differences yield null statistics."""
    if len(values_a) != len(values_b):
        raise ValueError("paired samples must have equal length")
    diffs = [a - b for a, b in zip(values_a, values_b)]
    if len(diffs) < 2:
        raise EmptyInputError("paired comparison needs at least two queries")
    mean = math.fsum(diffs) / len(diffs)
    try:
        t, p, d = paired_ttest(diffs)
    except DegenerateVarianceError:
        t = p = d = None
    return PairedComparison(label_a, label_b, diffs, mean, t, p, d, len(diffs), metric)
