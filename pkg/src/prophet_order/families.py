"""Generators for the worst-case instance families and the fixed-threshold curve.

Each generator returns a :class:`FamilyInstance`: the boxes, the named arrival
orders the construction is about, the parameters used, and the limiting
constant the family approaches as its parameter goes to its extreme. Finite
parameters only approach that constant; reports quote both and the deviation,
never asserting the limit as the finite value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

from .core import DiscreteDistribution, Instance, Order, validate_instance
from .thresholds import LAMBDA, LN_INV_LAMBDA, PHI


@dataclass(frozen=True)
class FamilyInstance:
    name: str
    instance: Instance
    canonical_orders: tuple[tuple[str, Order], ...]
    parameters: dict
    predicted_limit: float
    limit_note: str

    def order(self, name: str) -> Order:
        for key, order in self.canonical_orders:
            if key == name:
                return order
        raise KeyError(name)


def hv_box(eps: float) -> DiscreteDistribution:
    """High-variance box: 1/eps with probability eps, else 0. Mean 1."""
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must be in (0, 1), got {eps!r}")
    return DiscreteDistribution.from_pairs([(0.0, 1.0 - eps), (1.0 / eps, eps)])


def example1(eps: float) -> FamilyInstance:
    """Three boxes: deterministic sqrt(2) and 1, plus a high-variance box.

    The two canonical orders differ in whether the high-variance box or the
    deterministic 1 follows the opening sqrt(2). As eps -> 0 the adaptive
    expectation policy's ratio against the order-aware optimum approaches
    1/sqrt(2) on the order that hides the high-variance box second.
    """
    root2 = math.sqrt(2.0)
    instance = Instance(
        (
            DiscreteDistribution.point(root2),
            DiscreteDistribution.point(1.0),
            hv_box(eps),
        )
    )
    fam = FamilyInstance(
        name="example1",
        instance=instance,
        canonical_orders=(
            ("order_a", Order((0, 2, 1))),  # sqrt(2), HV, 1
            ("order_b", Order((0, 1, 2))),  # sqrt(2), 1, HV
        ),
        parameters={"eps": eps},
        predicted_limit=1.0 / root2,
        limit_note="1/sqrt(2), the eps->0 ratio ceiling for deterministic order-unaware rules",
    )
    validate_instance(instance, require_unique_max=True).raise_if_invalid()
    return fam


def golden_lb(eps: float, step: float) -> FamilyInstance:
    """Descending deterministic values from phi down to 1, plus a high-variance box.

    Canonical orders: ``pi`` places all deterministic boxes first (descending)
    with the high-variance box last; ``pi_x_<v>`` truncates pi right after the
    deterministic value v, inserts the high-variance box, then the rest. The
    worst ratio over these orders approaches 1/phi as eps, step -> 0.
    """
    if not 0.0 < eps < 0.5:
        raise ValueError(f"eps must be in (0, 0.5), got {eps!r}")
    if not 0.0 < step <= PHI - 1.0:
        raise ValueError(f"step must be in (0, phi-1], got {step!r}")
    values = []
    v = PHI
    while v > 1.0 + 1e-9:
        values.append(v)
        v -= step
    values.append(1.0)
    boxes = tuple(DiscreteDistribution.point(x) for x in values) + (hv_box(eps),)
    instance = Instance(boxes)
    m = len(values)
    hv_id = m
    pi = Order(tuple(range(m)) + (hv_id,))
    orders: list[tuple[str, Order]] = [("pi", pi)]
    for j, x in enumerate(values):
        seq = tuple(range(j + 1)) + (hv_id,) + tuple(range(j + 1, m))
        orders.append((f"pi_x_{x:.6g}", Order(seq)))
    fam = FamilyInstance(
        name="golden_lb",
        instance=instance,
        canonical_orders=tuple(orders),
        parameters={"eps": eps, "step": step, "deterministic_boxes": m},
        predicted_limit=1.0 / PHI,
        limit_note="1/phi, the tight ratio for the expectation objective",
    )
    validate_instance(instance, require_unique_max=True).raise_if_invalid()
    return fam


def _seq_pow(q: float, n: int) -> float:
    """q**n evaluated as the sequential product the evaluators will compute."""
    acc = 1.0
    for _ in range(n):
        acc *= q
    return acc


def maxprob_lb(n: int) -> FamilyInstance:
    """A deterministic 1/2 followed by n rare boxes with values 1..n.

    Each rare box realizes its value with probability eps chosen so that
    P[all rare boxes stay at 0] lands exactly on lambda in float arithmetic
    (the construction sits on the accept boundary of the max-probability rule,
    so eps is nudged by ulps until the sequential product is >= lambda; the
    drift from lambda stays below 1e-12). Canonical orders run the rare boxes
    decreasing (the hard order) and increasing after the deterministic box.
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    q = LAMBDA ** (1.0 / n)
    while _seq_pow(q, n) < LAMBDA:
        q = math.nextafter(q, 1.0)
    if abs(_seq_pow(q, n) - LAMBDA) > 1e-12:
        raise ArithmeticError("per-box zero probability drifted from lambda^(1/n)")
    eps = 1.0 - q
    boxes = [DiscreteDistribution.point(0.5)]
    for i in range(1, n + 1):
        boxes.append(DiscreteDistribution.from_pairs([(0.0, q), (float(i), eps)]))
    instance = Instance(tuple(boxes))
    decreasing = Order((0,) + tuple(range(n, 0, -1)))
    increasing = Order(tuple(range(n + 1)))
    fam = FamilyInstance(
        name="maxprob_lb",
        instance=instance,
        canonical_orders=(("decreasing", decreasing), ("increasing", increasing)),
        parameters={"n": n, "eps": eps},
        predicted_limit=LN_INV_LAMBDA,
        limit_note="ln(1/lambda), the tight ratio for the max-probability objective",
    )
    validate_instance(instance, require_unique_max=True).raise_if_invalid()
    return fam


def single_threshold_family(n: int, T: int) -> FamilyInstance:
    """n boxes where box i holds value i with probability 1/sqrt(n), else 0.

    The canonical order has three periods: values T..T+k-1 ascending (with
    k = floor((n-T)/2)), then n down to T+k, then T-1 down to 1. A fixed
    threshold-T rule accepts the first value it sees in the first two periods
    and can never accept in the third.
    """
    if n < 1 or not 1 <= T <= n:
        raise ValueError(f"need n >= 1 and 1 <= T <= n, got n={n}, T={T}")
    p = 1.0 / math.sqrt(n)
    boxes = tuple(
        DiscreteDistribution.from_pairs([(0.0, 1.0 - p), (float(i), p)])
        for i in range(1, n + 1)
    )
    instance = Instance(boxes)
    k = (n - T) // 2
    period1 = list(range(T, T + k))
    period2 = list(range(n, T + k - 1, -1))
    period3 = list(range(T - 1, 0, -1))
    order_values = period1 + period2 + period3
    if len(order_values) != n:
        raise AssertionError("period partition does not cover all boxes")
    order = Order(tuple(v - 1 for v in order_values))
    alpha = (n - T) / math.sqrt(n)
    fam = FamilyInstance(
        name="single_threshold",
        instance=instance,
        canonical_orders=(("three_period", order),),
        parameters={
            "n": n,
            "T": T,
            "alpha": alpha,
            "value_prob": p,
            "period_sizes": (len(period1), len(period2), len(period3)),
        },
        predicted_limit=closed_form_alg(alpha),
        limit_note="closed-form win probability of the threshold rule at this alpha, asymptotic in n",
    )
    validate_instance(instance, require_unique_max=True).raise_if_invalid()
    return fam


def threshold_for_alpha(n: int, alpha: float) -> int:
    """Integer threshold T with (n - T)/sqrt(n) closest to the requested alpha."""
    return min(n, max(1, n - round(alpha * math.sqrt(n))))


def closed_form_alg(alpha: float) -> float:
    """Limiting win probability of the threshold rule on the three-period order."""
    return alpha / 2.0 * math.exp(-alpha) + math.exp(-alpha / 2.0) - math.exp(-alpha)


def closed_form_opt(alpha: float) -> float:
    """Limiting win probability of the discard-period-1 order-aware rule."""
    return 1.0 - math.exp(-alpha / 2.0) + math.exp(-alpha)


def closed_form_ratio(alpha: float) -> float:
    return closed_form_alg(alpha) / closed_form_opt(alpha)


class CurvePoint(NamedTuple):
    alpha: float
    alg: float
    opt: float
    ratio: float


@dataclass(frozen=True)
class SingleThresholdReport:
    alpha_grid: tuple[CurvePoint, ...]
    alpha_star: float
    max_ratio: float


DEFAULT_ALPHA_GRID = tuple(i * 0.01 for i in range(401))


def single_threshold_ratio_curve(
    grid: Optional[Sequence[float]] = None,
) -> SingleThresholdReport:
    """Evaluate the closed-form ratio on a grid and refine its maximizer.

    The maximizer of the grid is refined by golden-section search between its
    neighbors to 1e-6; the grid must be non-empty with alpha >= 0 and should
    bracket the hump (the default grid covers [0, 4]).
    """
    alphas = list(DEFAULT_ALPHA_GRID if grid is None else grid)
    if not alphas or any(a < 0.0 for a in alphas):
        raise ValueError("grid must be non-empty with alpha >= 0")
    points = tuple(
        CurvePoint(a, closed_form_alg(a), closed_form_opt(a), closed_form_ratio(a))
        for a in alphas
    )
    best = max(range(len(points)), key=lambda i: points[i].ratio)
    lo = points[max(0, best - 1)].alpha
    hi = points[min(len(points) - 1, best + 1)].alpha
    alpha_star = _golden_section_max(closed_form_ratio, lo, hi, xtol=1e-6)
    return SingleThresholdReport(
        alpha_grid=points,
        alpha_star=alpha_star,
        max_ratio=closed_form_ratio(alpha_star),
    )


def _golden_section_max(fn, lo: float, hi: float, xtol: float) -> float:
    if hi <= lo:
        return lo
    inv = 1.0 / PHI
    c = hi - inv * (hi - lo)
    d = lo + inv * (hi - lo)
    fc, fd = fn(c), fn(d)
    while hi - lo > xtol:
        if fc > fd:
            hi, d, fd = d, c, fc
            c = hi - inv * (hi - lo)
            fc = fn(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + inv * (hi - lo)
            fd = fn(d)
    return (lo + hi) / 2.0
