"""Optimal decision point between two univariate Gaussian classes."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import NoCrossing
from .gaussian import std_normal_cdf, univariate_log_pdf


@dataclass(frozen=True)
class UnivariateClassPair:
    """Two 1-D Gaussian classes; the first has the smaller mean."""

    mean1: float
    var1: float
    prior1: float
    mean2: float
    var2: float
    prior2: float

    def __post_init__(self):
        if not self.mean1 < self.mean2:
            raise ValueError("expected mean1 < mean2")
        if not (self.var1 > 0 and self.var2 > 0):
            raise ValueError("variances must be positive")
        if not (self.prior1 > 0 and self.prior2 > 0) or abs(self.prior1 + self.prior2 - 1) > 1e-12:
            raise ValueError("priors must be positive and sum to 1")

    @classmethod
    def from_sd(cls, mean1, sd1, mean2, sd2, prior1=0.5) -> "UnivariateClassPair":
        return cls(mean1, sd1 * sd1, prior1, mean2, sd2 * sd2, 1.0 - prior1)

    def log_joint(self, x):
        """``(ln f_1(x) pi_1, ln f_2(x) pi_2)``."""
        return (
            univariate_log_pdf(x, self.mean1, self.var1) + math.log(self.prior1),
            univariate_log_pdf(x, self.mean2, self.var2) + math.log(self.prior2),
        )


@dataclass(frozen=True)
class Boundary:
    x_star: float
    roots: tuple[float, ...]
    error: float


def error_probability(pair: UnivariateClassPair, x_star: float) -> float:
    """Misclassification probability when deciding class 1 below ``x_star``."""
    if x_star == math.inf:
        return pair.prior1 * 0.0 + pair.prior2
    if x_star == -math.inf:
        return pair.prior1
    z1 = (x_star - pair.mean1) / math.sqrt(pair.var1)
    z2 = (x_star - pair.mean2) / math.sqrt(pair.var2)
    # 1 - Phi(z) written as Phi(-z) to keep the upper tail accurate
    return std_normal_cdf(-z1) * pair.prior1 + std_normal_cdf(z2) * pair.prior2


def crossing_points(pair: UnivariateClassPair) -> tuple[float, ...]:
    """Real solutions of ``ln f_1(x) + ln pi_1 = ln f_2(x) + ln pi_2``, ascending.

    Expanding both sides gives ``a x^2 + b x + c = 0``.
    """
    m1, v1, m2, v2 = pair.mean1, pair.var1, pair.mean2, pair.var2
    a = 0.5 / v2 - 0.5 / v1
    b = m1 / v1 - m2 / v2
    c = (
        0.5 * m2 * m2 / v2
        - 0.5 * m1 * m1 / v1
        + 0.5 * math.log(v2 / v1)
        + math.log(pair.prior1 / pair.prior2)
    )
    if a == 0.0:
        return (-c / b,)
    disc = b * b - 4.0 * a * c
    if disc < 0.0:
        raise NoCrossing(
            f"posterior curves never cross (discriminant {disc:.3e}); one class dominates everywhere"
        )
    q = -0.5 * (b + math.copysign(math.sqrt(disc), b))
    roots = {q / a, c / q} if q != 0.0 else {-b / (2.0 * a)}
    return tuple(sorted(roots))


def _polish(pair: UnivariateClassPair, x: float) -> float:
    # Newton steps on g(x) = ln f1 pi1 - ln f2 pi2; g is exactly quadratic
    for _ in range(3):
        l1, l2 = pair.log_joint(x)
        g = l1 - l2
        dg = -(x - pair.mean1) / pair.var1 + (x - pair.mean2) / pair.var2
        if dg == 0.0 or g == 0.0:
            break
        step = g / dg
        x_new = x - step
        if abs(step) > 1e-6 * (1.0 + abs(x)):
            break
        x = x_new
    return x


def optimal_boundary_detail(pair: UnivariateClassPair) -> Boundary:
    """Minimum-error threshold among the crossings and the two infinite limits.

    With unequal variances a crossing can be a local maximum of the error, and
    the infimum may sit at ``-inf`` or ``+inf`` (always decide one class).
    ``roots`` always lists the finite crossings.
    """
    roots = tuple(_polish(pair, r) for r in crossing_points(pair))
    candidates = roots + (-math.inf, math.inf)
    errors = [error_probability(pair, r) for r in candidates]
    best = min(errors)

    def rank(i: int):
        x = candidates[i]
        inside = pair.mean1 < x < pair.mean2
        return (errors[i] > best + 1e-15, not inside, math.isinf(x), i)

    i = min(range(len(candidates)), key=rank)
    return Boundary(x_star=candidates[i], roots=roots, error=errors[i])


def optimal_boundary(pair: UnivariateClassPair) -> float:
    """The threshold that minimises :func:`error_probability` (may be infinite)."""
    return optimal_boundary_detail(pair).x_star
