"""Suffix-max laws, the adaptive threshold pair, and the two tight-ratio constants.

The adaptive stopping rule for the expectation objective compares each arriving
value against tau = max(alpha, beta), where both thresholds are computed from
the law of the best value still to come:

    alpha = E[y] / phi
    beta  solves  E[(y - phi * x)^+] = x

with phi the golden ratio. The probability objective instead hinges on the
constant lambda, the unique root of x / (1 - x) = ln(1 / x).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple

from .core import DiscreteDistribution, Instance

PHI = (1.0 + math.sqrt(5.0)) / 2.0


def solve_lambda(residual_tol: float = 1e-14) -> float:
    """Root of x / (1 - x) = ln(1 / x) in (0, 1), by bisection.

    The difference x / (1 - x) + ln(x) is strictly increasing on (0, 1), from
    -inf to +inf, so the root is unique. Iterates to float resolution and
    checks the residual against ``residual_tol``.
    """

    def gap(x: float) -> float:
        return x / (1.0 - x) + math.log(x)

    lo, hi = 1e-12, 1.0 - 1e-12
    for _ in range(200):
        mid = (lo + hi) / 2.0
        if mid in (lo, hi):
            break
        if gap(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    root = (lo + hi) / 2.0
    if abs(gap(root)) > residual_tol:
        raise ArithmeticError(f"lambda bisection stalled, residual {gap(root)!r}")
    return root


LAMBDA = solve_lambda()
LN_INV_LAMBDA = math.log(1.0 / LAMBDA)


@dataclass(frozen=True)
class Constants:
    phi: float
    lam: float
    ln_inv_lambda: float


CONSTANTS = Constants(phi=PHI, lam=LAMBDA, ln_inv_lambda=LN_INV_LAMBDA)


class SuffixMaxDistribution:
    """Exact law of the maximum value over a set of boxes.

    The CDF at x is the product of the member boxes' CDFs at x; that product is
    evaluated directly from the members, so it holds exactly at every support
    point. The empty set is a first-class value: its maximum is "always below
    any positive x" and has expectation 0, represented as a point mass at 0.
    """

    __slots__ = ("members", "empty_set", "outcomes", "_expectation")

    def __init__(self, members: Iterable[DiscreteDistribution]):
        self.members: tuple[DiscreteDistribution, ...] = tuple(members)
        self.empty_set: bool = not self.members
        if self.empty_set:
            self.outcomes: tuple[tuple[float, float], ...] = ((0.0, 1.0),)
        else:
            values = sorted({v for m in self.members for v in m.values})
            outcomes = []
            prev_cdf = 0.0
            for v in values:
                cdf = self.prob_below(v, strict=False)
                p = cdf - prev_cdf
                if p > 0.0:
                    outcomes.append((v, p))
                prev_cdf = cdf
            self.outcomes = tuple(outcomes)
        self._expectation = math.fsum(v * p for v, p in self.outcomes)

    def prob_below(self, x: float, strict: bool = False) -> float:
        """P[max < x] (strict) or P[max <= x], as the product over members."""
        if self.empty_set:
            if strict:
                return 1.0 if x > 0.0 else 0.0
            return 1.0 if x >= 0.0 else 0.0
        prod = 1.0
        for m in self.members:
            prod *= m.prob_below(x, strict=strict)
        return prod

    def expectation(self) -> float:
        return self._expectation

    def as_distribution(self) -> DiscreteDistribution:
        return DiscreteDistribution(self.outcomes)


def suffix_max(dists: Iterable[DiscreteDistribution]) -> SuffixMaxDistribution:
    """Law of the max over the given boxes; an empty iterable is allowed."""
    return SuffixMaxDistribution(dists)


def expected_surplus(dist: SuffixMaxDistribution, c: float) -> float:
    """E[(y - c)^+] for y distributed as ``dist``; 0 for the empty set."""
    return math.fsum(p * (v - c) for v, p in dist.outcomes if v > c)


def solve_beta(dist: SuffixMaxDistribution) -> float:
    """The unique x >= 0 with E[(y - phi*x)^+] = x, solved exactly.

    The left side is piecewise linear and non-increasing in x with breakpoints
    at support values divided by phi; on each segment the equation is linear,
    so the root is found by scanning segments and solving in closed form. Use
    :func:`solve_beta_bisection` as an independent cross-check.
    """
    outs = dist.outcomes
    if dist.empty_set or dist.expectation() == 0.0:
        return 0.0
    m = len(outs)
    # suffix_p[a] = P[y >= outs[a].value], suffix_ev[a] = E[y; y >= outs[a].value]
    suffix_p = [0.0] * (m + 1)
    suffix_ev = [0.0] * (m + 1)
    for a in range(m - 1, -1, -1):
        v, p = outs[a]
        suffix_p[a] = suffix_p[a + 1] + p
        suffix_ev[a] = suffix_ev[a + 1] + p * v
    # On x in [outs[a-1].value/phi, outs[a].value/phi) the active tail is a..m-1
    # and the equation reads suffix_ev[a] - phi*suffix_p[a]*x = x.
    lower = 0.0
    for a in range(m):
        upper = outs[a][0] / PHI
        candidate = suffix_ev[a] / (1.0 + PHI * suffix_p[a])
        if lower <= candidate <= upper:
            return candidate
        lower = upper
    # Float edge cases can leave every candidate marginally outside its
    # segment; the bisection fallback is exact to tolerance.
    return solve_beta_bisection(dist)


def solve_beta_bisection(dist: SuffixMaxDistribution, tol: float = 1e-14) -> float:
    """Bisection solve of E[(y - phi*x)^+] = x, independent of the exact path."""
    if dist.empty_set or dist.expectation() == 0.0:
        return 0.0

    def gap(x: float) -> float:
        return expected_surplus(dist, PHI * x) - x

    lo, hi = 0.0, dist.expectation()
    while gap(hi) > 0.0:
        hi *= 2.0
    for _ in range(200):
        mid = (lo + hi) / 2.0
        if mid in (lo, hi):
            break
        if gap(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    root = (lo + hi) / 2.0
    if abs(gap(root)) > max(tol, 1e-12 * dist.expectation()):
        raise ArithmeticError(f"beta bisection stalled, residual {gap(root)!r}")
    return root


@dataclass(frozen=True)
class ThresholdTriple:
    """(alpha, beta, tau) for one step of the adaptive expectation policy."""

    alpha: float
    beta: float
    tau: float


def threshold_triple(dist: SuffixMaxDistribution) -> ThresholdTriple:
    """alpha = E[y]/phi, beta from :func:`solve_beta`, tau = max(alpha, beta)."""
    alpha = dist.expectation() / PHI
    beta = solve_beta(dist)
    return ThresholdTriple(alpha=alpha, beta=beta, tau=max(alpha, beta))


class ClassicThresholds(NamedTuple):
    median_of_max: float
    half_expected_max: float
    inv_e_quantile: float


def classic_thresholds(instance: Instance) -> ClassicThresholds:
    """The three textbook single thresholds for an instance.

    Quantile-style thresholds pick the smallest support value meeting the
    probability bound, which makes tie-breaking on atoms deterministic.
    """
    law = suffix_max(instance.distributions)
    return ClassicThresholds(
        median_of_max=_lower_quantile(law, 0.5),
        half_expected_max=law.expectation() / 2.0,
        inv_e_quantile=_lower_quantile(law, 1.0 / math.e),
    )


def _lower_quantile(law: SuffixMaxDistribution, q: float) -> float:
    acc = 0.0
    for v, p in law.outcomes:
        acc += p
        if acc >= q:
            return v
    return law.outcomes[-1][0]
