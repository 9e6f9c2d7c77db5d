"""Exact, enumerated, and sampled evaluation of stopping rules, plus ratio sweeps.

Three independent routes compute a policy's performance on a fixed arrival
order: an exact forward pass (``eval_exact``), full profile enumeration
(``brute_force``), and seeded sampling (``monte_carlo``). The first two must
agree to 1e-12 on any input both can handle; tests rely on that redundancy.

Win-probability semantics: a run wins iff the accepted value strictly exceeds
the baseline and every other realized value. Instances where a positive value
appears in two boxes are rejected for this objective rather than tie-broken.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
import random
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .core import (
    Instance,
    Order,
    ValidationError,
    ValueProfile,
    validate_instance,
    validate_order,
)
from .policies import (
    DecisionContext,
    GoldenPolicy,
    OptExpectationPolicy,
    OptMaxProbPolicy,
    Policy,
    SingleThresholdPolicy,
)
from .thresholds import PHI, solve_beta, suffix_max

DEFAULT_STATE_CAP = 1_000_000
DEFAULT_PROFILE_CAP = 1_000_000
DEFAULT_PERM_CAP = 8

AUDIT_SLACK = 1e-9


class CapExceededError(RuntimeError):
    """A configured resource cap would be exceeded; pick a cheaper route."""


@dataclass(frozen=True)
class Objective:
    """What to maximize: expected accepted value, or the chance of catching the max.

    ``baseline`` is the standing value the accepted box must strictly exceed
    for the win-probability objective; it is ignored for expectation.
    """

    kind: str
    baseline: float = 0.0

    EXPECTATION = "expectation"
    WINPROB = "winprob"

    @classmethod
    def expectation(cls) -> "Objective":
        return cls(cls.EXPECTATION)

    @classmethod
    def winprob(cls, baseline: float = 0.0) -> "Objective":
        return cls(cls.WINPROB, baseline)

    @property
    def is_winprob(self) -> bool:
        return self.kind == self.WINPROB

    @classmethod
    def parse(cls, text: str) -> "Objective":
        name, _, arg = text.partition(":")
        if name == "expectation":
            return cls.expectation()
        if name == "winprob":
            return cls.winprob(float(arg) if arg else 0.0)
        raise ValidationError(f"unknown objective {text!r}")


@dataclass(frozen=True)
class EvalResult:
    value: float
    method: str  # "exact-dp" | "brute-force" | "monte-carlo"
    samples: Optional[int] = None
    stderr: Optional[float] = None

    def to_json_dict(self) -> dict:
        out: dict = {"value": self.value, "method": self.method}
        if self.samples is not None:
            out["samples"] = self.samples
        if self.stderr is not None:
            out["stderr"] = self.stderr
        return out


def _check_inputs(instance: Instance, order: Order, objective: Objective) -> None:
    validate_order(instance, order).raise_if_invalid()
    if objective.is_winprob:
        validate_instance(instance, require_unique_max=True).raise_if_invalid()


def _remaining_sets(order: Order) -> list[frozenset[int]]:
    seq = order.sequence
    return [frozenset(seq[pos:]) for pos in range(1, len(seq) + 1)]


def _win_factors(instance: Instance, order: Order, values: Iterable[float]) -> list[dict[float, float]]:
    """factors[t][v] = P[every box after position t realizes strictly below v]."""
    vals = sorted(set(values))
    n = instance.n
    factors: list[dict[float, float]] = [dict() for _ in range(n + 1)]
    factors[n] = {v: 1.0 for v in vals}
    for t in range(n - 1, 0, -1):
        box = instance.box(order.sequence[t])
        nxt = factors[t + 1]
        factors[t] = {v: nxt[v] * box.prob_below(v, strict=True) for v in vals}
    return factors


def _clamp_prob(x: float) -> float:
    return 0.0 if x < 0.0 else (1.0 if x > 1.0 else x)


def eval_exact(
    instance: Instance,
    order: Order,
    policy: Policy,
    objective: Objective,
    *,
    state_cap: int = DEFAULT_STATE_CAP,
) -> EvalResult:
    """Exact performance of ``policy`` on ``order``, no sampling involved.

    The workhorse is a forward pass over states (position, prefix max). Two
    algebraically equivalent shortcuts avoid the state dimension when the
    policy admits it: prefix-max-independent policies under expectation
    factorize position by position, and fixed-threshold policies under
    win-probability reduce to prefix/suffix products (everything the rule
    passes is strictly below its threshold, hence below anything it accepts).
    The general path refuses to build state spaces above ``state_cap`` (as
    total support size times n); use :func:`monte_carlo` on such inputs.
    """
    _check_inputs(instance, order, objective)
    if isinstance(policy, SingleThresholdPolicy) and objective.is_winprob:
        value = _threshold_winprob(instance, order, policy.threshold, objective.baseline)
        return EvalResult(_clamp_prob(value), "exact-dp")
    if not objective.is_winprob and not policy.uses_prefix_max:
        return EvalResult(_stateless_expectation(instance, order, policy), "exact-dp")
    return _state_dp(instance, order, policy, objective, state_cap)


def _stateless_expectation(instance: Instance, order: Order, policy: Policy) -> float:
    seq = order.sequence
    rem = _remaining_sets(order)
    full = order if policy.order_aware else None
    total = 0.0
    pass_mass = 1.0
    for pos in range(1, len(seq) + 1):
        box = instance.box(seq[pos - 1])
        accepted = 0.0
        rejected = 0.0
        for v, p in box.outcomes:
            ctx = DecisionContext(pos, v, 0.0, rem[pos - 1], full)
            if policy.decide(ctx):
                accepted += p * v
            else:
                rejected += p
        total += pass_mass * accepted
        pass_mass *= rejected
        if pass_mass == 0.0:
            break
    return total


def _threshold_winprob(instance: Instance, order: Order, threshold: float, baseline: float) -> float:
    seq = order.sequence
    n = len(seq)
    winnable = sorted(
        {v for d in instance.distributions for v in d.values if v >= threshold and v > baseline}
    )
    if not winnable:
        return 0.0
    factors = _win_factors(instance, order, winnable)
    total = 0.0
    pass_mass = 1.0
    for pos in range(1, n + 1):
        box = instance.box(seq[pos - 1])
        for v, p in box.outcomes:
            if v >= threshold and v > baseline:
                total += pass_mass * p * factors[pos][v]
        pass_mass *= box.prob_below(threshold, strict=True)
        if pass_mass == 0.0:
            break
    return total


def _state_dp(
    instance: Instance,
    order: Order,
    policy: Policy,
    objective: Objective,
    state_cap: int,
) -> EvalResult:
    n = instance.n
    support_total = sum(len(d.outcomes) for d in instance.distributions)
    if support_total * n > state_cap:
        raise CapExceededError(
            f"state space {support_total} values x {n} positions exceeds cap {state_cap}; "
            "use monte_carlo for an estimate"
        )
    seq = order.sequence
    rem = _remaining_sets(order)
    full = order if policy.order_aware else None
    winprob = objective.is_winprob
    theta0 = objective.baseline if winprob else 0.0
    factors = (
        _win_factors(instance, order, (v for d in instance.distributions for v in d.values))
        if winprob
        else None
    )
    states: dict[float, float] = {theta0: 1.0}
    total = 0.0
    for pos in range(1, n + 1):
        box = instance.box(seq[pos - 1])
        outcomes = box.outcomes
        remaining = rem[pos - 1]
        nxt: dict[float, float] = {}
        for theta, mass in states.items():
            for v, p in outcomes:
                ctx = DecisionContext(pos, v, theta, remaining, full)
                if policy.decide(ctx):
                    if winprob:
                        if v > theta:
                            total += mass * p * factors[pos][v]
                    else:
                        total += mass * p * v
                else:
                    key = theta if v <= theta else v
                    nxt[key] = nxt.get(key, 0.0) + mass * p
        states = nxt
        if not states:
            break
    return EvalResult(_clamp_prob(total) if winprob else total, "exact-dp")


def simulate_profile(
    instance: Instance,
    order: Order,
    policy: Policy,
    objective: Objective,
    profile: ValueProfile,
) -> float:
    """Payoff of one sequential run on a fixed profile (the oracle walker)."""
    return _walk(
        order.sequence,
        _remaining_sets(order),
        order if policy.order_aware else None,
        policy,
        objective,
        profile.values,
    )


def _walk(
    seq: Sequence[int],
    rem: Sequence[frozenset[int]],
    full: Optional[Order],
    policy: Policy,
    objective: Objective,
    values: Sequence[float],
) -> float:
    winprob = objective.is_winprob
    prefix = objective.baseline if winprob else 0.0
    for pos in range(1, len(seq) + 1):
        bid = seq[pos - 1]
        v = values[bid]
        ctx = DecisionContext(pos, v, prefix, rem[pos - 1], full)
        if policy.decide(ctx):
            if not winprob:
                return v
            if v <= prefix:
                return 0.0
            return 1.0 if all(values[b] < v for b in rem[pos - 1]) else 0.0
        if v > prefix:
            prefix = v
    return 0.0


def brute_force(
    instance: Instance,
    order: Order,
    policy: Policy,
    objective: Objective,
    *,
    profile_cap: int = DEFAULT_PROFILE_CAP,
) -> EvalResult:
    """Enumerate every value profile with its probability and simulate the policy.

    Independent of :func:`eval_exact`; serves as its oracle on small inputs.
    """
    _check_inputs(instance, order, objective)
    n_profiles = math.prod(len(d.outcomes) for d in instance.distributions)
    if n_profiles > profile_cap:
        raise CapExceededError(
            f"{n_profiles} profiles exceed cap {profile_cap}; use monte_carlo or eval_exact"
        )
    seq = order.sequence
    rem = _remaining_sets(order)
    full = order if policy.order_aware else None
    total = 0.0
    for combo in itertools.product(*[d.outcomes for d in instance.distributions]):
        prob = math.prod(p for _, p in combo)
        values = tuple(v for v, _ in combo)
        payoff = _walk(seq, rem, full, policy, objective, values)
        if payoff:
            total += prob * payoff
    if objective.is_winprob:
        total = _clamp_prob(total)
    return EvalResult(total, "brute-force")


def monte_carlo(
    instance: Instance,
    order: Order,
    policy: Policy,
    objective: Objective,
    samples: int,
    seed: int,
) -> EvalResult:
    """Sampled estimate with standard error; reproducible from the seed."""
    if samples < 1:
        raise ValidationError(f"samples must be >= 1, got {samples}")
    _check_inputs(instance, order, objective)
    rng = random.Random(seed)
    seq = order.sequence
    rem = _remaining_sets(order)
    full = order if policy.order_aware else None
    dists = instance.distributions
    s1 = 0.0
    s2 = 0.0
    for _ in range(samples):
        values = tuple(d.sample(rng) for d in dists)
        payoff = _walk(seq, rem, full, policy, objective, values)
        s1 += payoff
        s2 += payoff * payoff
    mean = s1 / samples
    if samples > 1:
        var = max(0.0, (s2 - samples * mean * mean) / (samples - 1))
        stderr = math.sqrt(var / samples)
    else:
        stderr = 0.0
    return EvalResult(mean, "monte-carlo", samples=samples, stderr=stderr)


@dataclass(frozen=True)
class OrderRatio:
    order: Order
    alg: float
    opt: float
    ratio: float
    degenerate: bool
    method: str


@dataclass(frozen=True)
class RatioReport:
    per_order: tuple[OrderRatio, ...]
    min_ratio: float
    argmin_order: Order

    def to_json_dict(self) -> dict:
        return {
            "per_order": [
                {
                    "order": list(row.order.sequence),
                    "alg": row.alg,
                    "opt": row.opt,
                    "ratio": row.ratio,
                    "degenerate": row.degenerate,
                    "method": row.method,
                }
                for row in self.per_order
            ],
            "min_ratio": self.min_ratio,
            "argmin_order": list(self.argmin_order.sequence),
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["order", "alg", "opt", "ratio", "method"])
        for row in self.per_order:
            writer.writerow(
                [
                    ",".join(str(i) for i in row.order.sequence),
                    repr(row.alg),
                    repr(row.opt),
                    repr(row.ratio),
                    row.method,
                ]
            )
        return buf.getvalue()


def _benchmark_policy(
    instance: Instance, order: Order, objective: Objective, opt_kind: Optional[str]
) -> Policy:
    kind = opt_kind or ("opt-maxprob" if objective.is_winprob else "opt-exp")
    if kind == "opt-exp":
        return OptExpectationPolicy(instance, order)
    if kind == "opt-maxprob":
        return OptMaxProbPolicy(instance, order, baseline=objective.baseline)
    raise ValidationError(f"unknown benchmark kind {kind!r}")


def order_ratio_sweep(
    instance: Instance,
    policy: Policy,
    objective: Objective,
    *,
    opt_kind: Optional[str] = None,
    orders: Optional[Sequence[Order]] = None,
    perm_cap: int = DEFAULT_PERM_CAP,
    state_cap: int = DEFAULT_STATE_CAP,
) -> RatioReport:
    """Ratio of ``policy`` to the order-aware optimum over arrival orders.

    Sweeps every permutation unless ``orders`` is given; the benchmark is
    rebuilt for each order (it is order-aware by definition) while ``policy``
    is reused unchanged. Orders where the optimum is 0 are recorded with ratio
    1 and flagged degenerate instead of being dropped.
    """
    if orders is None:
        if instance.n > perm_cap:
            raise CapExceededError(
                f"n={instance.n} exceeds the permutation cap {perm_cap}; "
                "pass an explicit order list instead of sweeping all orders"
            )
        orders = [Order(perm) for perm in itertools.permutations(range(instance.n))]
    rows: list[OrderRatio] = []
    min_ratio = math.inf
    argmin: Optional[Order] = None
    for order in orders:
        alg_res = eval_exact(instance, order, policy, objective, state_cap=state_cap)
        opt_policy = _benchmark_policy(instance, order, objective, opt_kind)
        opt_res = eval_exact(instance, order, opt_policy, objective, state_cap=state_cap)
        degenerate = opt_res.value == 0.0
        ratio = 1.0 if degenerate else alg_res.value / opt_res.value
        rows.append(
            OrderRatio(order, alg_res.value, opt_res.value, ratio, degenerate, alg_res.method)
        )
        if ratio < min_ratio:
            min_ratio = ratio
            argmin = order
    assert argmin is not None
    return RatioReport(tuple(rows), min_ratio, argmin)


@dataclass(frozen=True)
class ContinuationAuditRow:
    t: int
    alg_suffix_value: float
    beta: float
    alpha: float
    ok_alg_vs_beta: bool
    ok_beta_vs_alpha: bool

    @property
    def passed(self) -> bool:
        return self.ok_alg_vs_beta and self.ok_beta_vs_alpha


def continuation_audit(instance: Instance, order: Order) -> list[ContinuationAuditRow]:
    """Check, at every position t, that the adaptive policy's continuation value
    dominates beta_t, and that beta_t >= E[y_t] / phi^2.

    ``alg_suffix_value`` is the exact expected value of the adaptive policy run
    on positions t+1..n alone; the t = n row is the (0, 0, 0) boundary.
    """
    validate_order(instance, order).raise_if_invalid()
    expectation = Objective.expectation()
    rows: list[ContinuationAuditRow] = []
    for t in range(1, instance.n + 1):
        suffix_ids = order.sequence[t:]
        law = suffix_max(instance.box(b) for b in suffix_ids)
        alpha = law.expectation() / PHI
        beta = solve_beta(law)
        if suffix_ids:
            sub = Instance(tuple(instance.box(b) for b in suffix_ids))
            alg_value = eval_exact(
                sub, Order.identity(sub.n), GoldenPolicy(sub), expectation
            ).value
        else:
            alg_value = 0.0
        rows.append(
            ContinuationAuditRow(
                t=t,
                alg_suffix_value=alg_value,
                beta=beta,
                alpha=alpha,
                ok_alg_vs_beta=alg_value >= beta - AUDIT_SLACK,
                ok_beta_vs_alpha=beta >= alpha / PHI - AUDIT_SLACK,
            )
        )
    return rows
