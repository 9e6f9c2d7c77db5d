"""Stopping rules behind one decision interface.

Order-unaware policies (adaptive golden-ratio thresholds, max-probability rule)
never read the arrival order; order-aware optima (backward induction, the
win-probability DP) are built for one fixed order. Every decision is a
deterministic function of the :class:`DecisionContext`; internal caches are
pure memoization keyed on context fields.

Tie-breaking is uniform across policies: accept on threshold equality. The
max-probability rule additionally requires the current value to strictly
exceed the running prefix maximum, so a value merely equal to the baseline is
rejected.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from typing import Callable, NamedTuple, Optional

from .core import Instance, Order, ValidationError, validate_instance, validate_order
from .thresholds import (
    LAMBDA,
    ThresholdTriple,
    classic_thresholds,
    suffix_max,
    threshold_triple,
)


class DecisionContext(NamedTuple):
    """What a policy sees when a box arrives.

    ``position`` is 1-based. ``prefix_max`` is the running maximum of the
    baseline and every value observed before this one. ``full_order`` is only
    populated for order-aware policies.
    """

    position: int
    current_value: float
    prefix_max: float
    remaining_boxes: frozenset[int]
    full_order: Optional[Order] = None


class Policy:
    """Base stopping rule. Subclasses implement :meth:`decide`.

    ``uses_prefix_max`` tells evaluators whether the decision reads
    ``prefix_max``; policies that don't admit faster exact evaluation.
    """

    kind: str = "custom"
    order_aware: bool = False
    uses_prefix_max: bool = True

    def decide(self, ctx: DecisionContext) -> bool:
        raise NotImplementedError


class GoldenPolicy(Policy):
    """Accept the current value iff it meets tau = max(alpha, beta).

    Both thresholds are recomputed from the boxes still to come, so the rule
    is order-unaware: only the *set* of remaining boxes matters. With no boxes
    left tau is 0 and anything (including 0) is accepted.
    """

    kind = "golden"
    uses_prefix_max = False

    def __init__(self, instance: Instance):
        self.instance = instance
        self._triples: dict[frozenset[int], ThresholdTriple] = {}

    def triple(self, remaining_boxes: frozenset[int]) -> ThresholdTriple:
        cached = self._triples.get(remaining_boxes)
        if cached is None:
            law = suffix_max(self.instance.box(b) for b in sorted(remaining_boxes))
            cached = threshold_triple(law)
            self._triples[remaining_boxes] = cached
        return cached

    def tau(self, remaining_boxes: frozenset[int]) -> float:
        return self.triple(remaining_boxes).tau

    def decide(self, ctx: DecisionContext) -> bool:
        return ctx.current_value >= self.tau(ctx.remaining_boxes)


class MaxProbPolicy(Policy):
    """Accept a new running maximum once the future stays below it w.p. >= lambda.

    The box is taken iff its value strictly exceeds the prefix maximum (and the
    baseline) and the probability that every remaining box stays strictly below
    it is at least lambda. Both conditions read only the remaining set, so the
    rule is order-unaware.
    """

    kind = "maxprob"
    uses_prefix_max = True

    def __init__(self, instance: Instance, baseline: float = 0.0):
        if not math.isfinite(baseline) or baseline < 0.0:
            raise ValueError(f"baseline must be finite and >= 0, got {baseline!r}")
        self.instance = instance
        self.baseline = baseline
        self._below: dict[tuple[frozenset[int], float], float] = {}

    def prob_future_below(self, remaining_boxes: frozenset[int], value: float) -> float:
        key = (remaining_boxes, value)
        cached = self._below.get(key)
        if cached is None:
            cached = math.prod(
                self.instance.box(b).prob_below(value, strict=True) for b in remaining_boxes
            )
            self._below[key] = cached
        return cached

    def decide(self, ctx: DecisionContext) -> bool:
        v = ctx.current_value
        if v <= max(ctx.prefix_max, self.baseline):
            return False
        return self.prob_future_below(ctx.remaining_boxes, v) >= LAMBDA


def opt_expectation_thresholds(instance: Instance, order: Order) -> list[float]:
    """Backward-induction thresholds for the expectation objective.

    tau*[t] is the expected value of optimal play on positions t+1..n, so the
    box at position t is accepted iff its value >= tau*[t]; tau*[n] = 0.
    """
    validate_order(instance, order).raise_if_invalid()
    n = instance.n
    taus = [0.0] * n
    cont = 0.0  # optimal continuation value from position t+1 onward
    for t in range(n - 1, 0, -1):
        box = instance.box(order.sequence[t])
        cont = math.fsum(p * (v if v >= cont else cont) for v, p in box.outcomes)
        taus[t - 1] = cont
    return taus


class OptExpectationPolicy(Policy):
    """The optimal order-aware rule for maximizing the expected accepted value."""

    kind = "opt-exp"
    order_aware = True
    uses_prefix_max = False

    def __init__(self, instance: Instance, order: Order):
        self.instance = instance
        self.order = order
        self.thresholds = opt_expectation_thresholds(instance, order)

    def decide(self, ctx: DecisionContext) -> bool:
        return ctx.current_value >= self.thresholds[ctx.position - 1]


class OptMaxProbPolicy(Policy):
    """The optimal order-aware rule for catching the maximum value.

    Solves the finite DP over states (position, prefix max), where the prefix
    max ranges over the baseline and every support value. Accepting value v at
    position t wins with probability [v > prefix_max] * P[all later boxes < v];
    the rule accepts iff that payoff is >= the continuation value (ties go to
    accept). ``win_probability`` is the DP value at the start state.

    Requires a unique-max-valid instance (no positive value shared between two
    boxes).
    """

    kind = "opt-maxprob"
    order_aware = True
    uses_prefix_max = True

    def __init__(self, instance: Instance, order: Order, baseline: float = 0.0):
        if not math.isfinite(baseline) or baseline < 0.0:
            raise ValueError(f"baseline must be finite and >= 0, got {baseline!r}")
        validate_instance(instance, require_unique_max=True).raise_if_invalid()
        validate_order(instance, order).raise_if_invalid()
        self.instance = instance
        self.order = order
        self.baseline = baseline

        n = instance.n
        seq = order.sequence
        grid = sorted({baseline} | {v for d in instance.distributions for v in d.values})
        self._grid = grid
        # win_factor[t][v] = P[every box after position t stays strictly below v]
        win_factor: list[dict[float, float]] = [dict() for _ in range(n + 1)]
        win_factor[n] = {v: 1.0 for v in grid}
        for t in range(n - 1, 0, -1):
            box = instance.box(seq[t])
            nxt = win_factor[t + 1]
            win_factor[t] = {v: nxt[v] * box.prob_below(v, strict=True) for v in grid}
        self._win_factor = win_factor

        # value_table[t] maps prefix max -> win probability of optimal play at
        # positions t..n; row n+1 is identically 0.
        value_table: list[dict[float, float]] = [dict() for _ in range(n + 2)]
        value_table[n + 1] = {v: 0.0 for v in grid}
        for t in range(n, 0, -1):
            box = instance.box(seq[t - 1])
            nxt = value_table[t + 1]
            row = {}
            for theta in grid:
                total = 0.0
                for v, p in box.outcomes:
                    payoff = win_factor[t][v] if v > theta else 0.0
                    cont = nxt[theta if v <= theta else v]
                    total += p * (payoff if payoff >= cont else cont)
                row[theta] = total
            value_table[t] = row
        self.value_table = value_table
        self.win_probability = value_table[1][baseline]

    def decide(self, ctx: DecisionContext) -> bool:
        t = ctx.position
        v = ctx.current_value
        theta = max(ctx.prefix_max, self.baseline)
        if theta not in self.value_table[t + 1]:
            # The value function is constant between grid points (only
            # comparisons against support values matter), so snapping the
            # prefix max down to the grid is exact.
            theta = self._grid[bisect_right(self._grid, theta) - 1]
        payoff = self._win_factor[t][v] if v > ctx.prefix_max and v > self.baseline else 0.0
        cont = self.value_table[t + 1][theta if v <= theta else v]
        return payoff >= cont


class SingleThresholdPolicy(Policy):
    """Accept the first value >= a fixed threshold."""

    uses_prefix_max = False

    def __init__(self, threshold: float, kind: str = "threshold"):
        if not threshold >= 0.0:
            raise ValueError(f"threshold must be >= 0, got {threshold!r}")
        self.threshold = threshold
        self.kind = kind

    def decide(self, ctx: DecisionContext) -> bool:
        return ctx.current_value >= self.threshold


class FunctionPolicy(Policy):
    """Wrap an arbitrary decision function (used for custom rules in tests)."""

    def __init__(self, fn: Callable[[DecisionContext], bool], kind: str = "custom",
                 uses_prefix_max: bool = True):
        self._fn = fn
        self.kind = kind
        self.uses_prefix_max = uses_prefix_max

    def decide(self, ctx: DecisionContext) -> bool:
        return self._fn(ctx)


def make_policy(spec: str, instance: Instance, order: Order | None = None) -> Policy:
    """Build a policy from its CLI spec string.

    Recognized: ``golden``, ``maxprob[:theta]``, ``opt-exp``,
    ``opt-maxprob[:theta]``, ``threshold:<T>``, ``median``, ``half-emax``,
    ``inv-e``. Order-aware kinds require ``order``.
    """
    name, _, arg = spec.partition(":")
    name = name.strip()
    if name == "golden":
        return GoldenPolicy(instance)
    if name == "maxprob":
        return MaxProbPolicy(instance, baseline=float(arg) if arg else 0.0)
    if name == "opt-exp":
        if order is None:
            raise ValidationError("policy 'opt-exp' is order-aware and needs an order")
        return OptExpectationPolicy(instance, order)
    if name == "opt-maxprob":
        if order is None:
            raise ValidationError("policy 'opt-maxprob' is order-aware and needs an order")
        return OptMaxProbPolicy(instance, order, baseline=float(arg) if arg else 0.0)
    if name == "threshold":
        if not arg:
            raise ValidationError("policy 'threshold' needs a value, e.g. threshold:1.5")
        return SingleThresholdPolicy(float(arg))
    if name in ("median", "half-emax", "inv-e"):
        classic = classic_thresholds(instance)
        value = {
            "median": classic.median_of_max,
            "half-emax": classic.half_expected_max,
            "inv-e": classic.inv_e_quantile,
        }[name]
        return SingleThresholdPolicy(value, kind=name)
    raise ValidationError(f"unknown policy spec {spec!r}")
