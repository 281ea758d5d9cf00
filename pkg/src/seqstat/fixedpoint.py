"""Threshold equations behind the sequential test's stopping behavior.

For a rate ``gamma > 0`` the equation

    gjs(p, q, theta) = gamma * theta

has exactly one root ``theta > 0`` whenever ``gamma < D(p || q)``, because
the left side is concave in ``theta``, vanishes at 0 with slope
``D(p || q)``, and saturates at ``D(q || p)``.  The root fixes both the
error exponent (``gamma * theta``) and the expected-stopping-time scale
(training length divided by the root) of the sequential classifier.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .divergence import chernoff, gjs
from .errors import (
    AlphabetMismatch,
    DuplicateDistribution,
    GammaOutOfRange,
    NonPositiveGamma,
    NoSolution,
    NonConvergence,
)
from .probability import Distribution, EmpiricalType, kl

# The bisection stops once the bracket is this narrow relative to the root.
RELATIVE_BRACKET_WIDTH = 1e-13
# |gjs(p, q, root) - gamma * root| must come out at or below this.
RESIDUAL_BOUND = 1e-10
# Initial lower bracket edge; the root is strictly positive when it exists.
BRACKET_LOW = 1e-12
# Reports flag rates within this distance of the Chernoff cap.
NEAR_CAP_WIDTH = 1e-9

_DUPLICATE_TOLERANCE = 1e-12


@dataclass(frozen=True)
class FixedPointResult:
    """Root of ``gjs(p, q, theta) = gamma * theta`` with solve diagnostics."""

    theta_star: float
    residual: float
    bracket_low: float
    bracket_high: float
    iterations: int


@dataclass(frozen=True)
class ExponentReport:
    """Error exponents of the binary sequential test at rate ``gamma``.

    ``beta_star`` and ``theta_star`` are the roots for the two argument
    orders; the type-I and type-II exponents are the corresponding
    ``gamma * root`` values and the prior-weighted (Bayesian) exponent is
    ``gamma`` itself.
    """

    gamma: float
    beta_star: float
    theta_star: float
    exponent_type1: float
    exponent_type2: float
    bayes_exponent: float
    near_cap: bool


def _check_gamma(gamma: float) -> float:
    gamma = float(gamma)
    if not math.isfinite(gamma) or gamma <= 0.0:
        raise NonPositiveGamma(f"gamma must be finite and > 0, got {gamma}")
    return gamma


def solve_fixed_point(p: Distribution, q: Distribution, gamma: float) -> FixedPointResult:
    """Find the positive root of ``gjs(p, q, theta) = gamma * theta``.

    Raises :class:`NoSolution` when ``gamma >= D(p || q)``, the exact
    nonexistence condition.  The root is bracketed by doubling from
    ``theta = 1`` and then bisected to a relative width of
    ``RELATIVE_BRACKET_WIDTH``.
    """
    if p.alphabet != q.alphabet:
        raise AlphabetMismatch("distributions live on different alphabets")
    gamma = _check_gamma(gamma)
    slope_at_zero = kl(p, q)
    if gamma >= slope_at_zero:
        raise NoSolution(
            f"no positive root: gamma={gamma} is not below D(p||q)={slope_at_zero}"
        )

    def excess(theta: float) -> float:
        return gjs(p, q, theta) - gamma * theta

    iterations = 0
    lo, hi = BRACKET_LOW, 1.0
    while excess(hi) > 0.0:
        lo = hi
        hi *= 2.0
        iterations += 1
        if iterations > 1100:
            raise NonConvergence("root bracketing did not terminate")
    while (hi - lo) > RELATIVE_BRACKET_WIDTH * hi:
        mid = 0.5 * (lo + hi)
        if excess(mid) > 0.0:
            lo = mid
        else:
            hi = mid
        iterations += 1
    theta = 0.5 * (lo + hi)
    residual = abs(gjs(p, q, theta) - gamma * theta)
    if residual > RESIDUAL_BOUND:
        raise NonConvergence(f"fixed-point residual {residual} exceeds {RESIDUAL_BOUND}")
    return FixedPointResult(theta, residual, lo, hi, iterations)


def exponent_report(p1: Distribution, p2: Distribution, gamma: float) -> ExponentReport:
    """Exponent summary for the binary sequential test at rate ``gamma``.

    Valid rates are ``0 < gamma <= chernoff(p1, p2)``; the report flags
    rates within ``NEAR_CAP_WIDTH`` of that cap.
    """
    gamma = _check_gamma(gamma)
    cap = chernoff(p1, p2)
    if gamma > cap + 1e-12:
        raise GammaOutOfRange(
            f"gamma={gamma} exceeds the Chernoff information {cap} of the pair"
        )
    beta = solve_fixed_point(p2, p1, gamma)
    theta = solve_fixed_point(p1, p2, gamma)
    return ExponentReport(
        gamma=gamma,
        beta_star=beta.theta_star,
        theta_star=theta.theta_star,
        exponent_type1=gjs(p2, p1, beta.theta_star),
        exponent_type2=gjs(p1, p2, theta.theta_star),
        bayes_exponent=gamma,
        near_cap=(cap - gamma) <= NEAR_CAP_WIDTH,
    )


def multiclass_thetas(dists: list[Distribution], gamma: float) -> np.ndarray:
    """Matrix of pairwise roots for the multiclass sequential test.

    Entry ``(i, j)``, for ``i != j``, is the root of
    ``gjs(dists[j], dists[i], theta) = gamma * theta``; the diagonal is NaN.
    Requires ``0 < gamma <= min pairwise chernoff`` so every entry exists.
    """
    gamma = _check_gamma(gamma)
    m = len(dists)
    if m < 2:
        raise GammaOutOfRange("need at least two distributions")
    for i in range(m):
        for j in range(i + 1, m):
            diff = max(
                abs(a - b) for a, b in zip(dists[i].weights, dists[j].weights)
            )
            if diff <= _DUPLICATE_TOLERANCE:
                raise DuplicateDistribution(f"distributions {i} and {j} coincide")
    cap = min(
        chernoff(dists[i], dists[j]) for i in range(m) for j in range(i + 1, m)
    )
    if gamma > cap + 1e-12:
        raise GammaOutOfRange(
            f"gamma={gamma} exceeds the smallest pairwise Chernoff information {cap}"
        )
    out = np.full((m, m), math.nan)
    for i in range(m):
        for j in range(m):
            if i != j:
                out[i, j] = solve_fixed_point(dists[j], dists[i], gamma).theta_star
    return out


def empirical_fixed_point(
    t: EmpiricalType, q: Distribution, gamma: float, fallback: float = 1.0
) -> float:
    """Root of the threshold equation with an empirical type as first slot.

    When ``D(T || q) <= gamma`` no positive root exists and ``fallback`` is
    returned; any positive constant works there because the plug-in root
    only matters on the event that the empirical type stays close to its
    source, which forces the root to exist.
    """
    gamma = _check_gamma(gamma)
    t_dist = t.as_distribution()
    if kl(t_dist, q) > gamma:
        return solve_fixed_point(t_dist, q, gamma).theta_star
    return float(fallback)
