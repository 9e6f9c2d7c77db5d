"""Finite discrete value distributions, box instances, arrival orders, and profiles.

Everything downstream (thresholds, policies, exact evaluation) is built on the
types in this module. All types are immutable after construction and safe to
share across threads; randomness always enters through an explicit seed or
generator.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass
from typing import Iterable

PROB_SUM_TOL = 1e-9


class ValidationError(ValueError):
    """An instance, order, or distribution violates its invariants."""


@dataclass(frozen=True)
class DiscreteDistribution:
    """Finitely supported law of a single box's value.

    ``outcomes`` is a tuple of ``(value, probability)`` pairs with values
    strictly increasing and probabilities summing to 1. Build through
    :meth:`from_pairs`, which canonicalizes raw data; the bare constructor
    performs no checks (use :func:`validate_instance` to audit hand-built
    objects).
    """

    outcomes: tuple[tuple[float, float], ...]

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[float, float]]) -> "DiscreteDistribution":
        """Canonicalize ``(value, prob)`` pairs into a valid distribution.

        Duplicate values are merged by summing their probabilities, values are
        sorted ascending, and probabilities are renormalized when their sum is
        within ``PROB_SUM_TOL`` of 1. Anything unsalvageable (empty support,
        negative or non-finite values, probabilities outside (0, 1], a sum off
        by more than the tolerance) raises :class:`ValidationError`.
        """
        merged: dict[float, float] = {}
        for value, prob in pairs:
            v, p = float(value), float(prob)
            if not math.isfinite(v) or v < 0.0:
                raise ValidationError(f"value {v!r} is not a finite non-negative real")
            if not (0.0 < p <= 1.0 + PROB_SUM_TOL):
                raise ValidationError(f"probability {p!r} outside (0, 1]")
            merged[v] = merged.get(v, 0.0) + p
        if not merged:
            raise ValidationError("distribution needs at least one outcome")
        total = math.fsum(merged.values())
        if abs(total - 1.0) > PROB_SUM_TOL:
            raise ValidationError(f"probabilities sum to {total!r}, not 1")
        outcomes = tuple((v, merged[v] / total) for v in sorted(merged))
        return cls(outcomes)

    @classmethod
    def point(cls, value: float) -> "DiscreteDistribution":
        """Deterministic box holding ``value``."""
        return cls(((float(value), 1.0),))

    @property
    def values(self) -> tuple[float, ...]:
        return tuple(v for v, _ in self.outcomes)

    @property
    def probabilities(self) -> tuple[float, ...]:
        return tuple(p for _, p in self.outcomes)

    def expectation(self) -> float:
        return math.fsum(v * p for v, p in self.outcomes)

    def prob_below(self, x: float, strict: bool = False) -> float:
        """P[v < x] when ``strict``, else P[v <= x]."""
        if strict:
            return math.fsum(p for v, p in self.outcomes if v < x)
        return math.fsum(p for v, p in self.outcomes if v <= x)

    def prob_at(self, x: float) -> float:
        """Probability mass exactly at ``x``."""
        return math.fsum(p for v, p in self.outcomes if v == x)

    def sample(self, rng: random.Random) -> float:
        """Draw one value using the inverse CDF of ``rng.random()``."""
        u = rng.random()
        acc = 0.0
        for v, p in self.outcomes:
            acc += p
            if u < acc:
                return v
        return self.outcomes[-1][0]


@dataclass(frozen=True)
class Instance:
    """An ordered collection of boxes. Box ids are positional: 0..n-1."""

    distributions: tuple[DiscreteDistribution, ...]

    @classmethod
    def from_supports(cls, supports: Iterable[Iterable[tuple[float, float]]]) -> "Instance":
        dists = tuple(DiscreteDistribution.from_pairs(s) for s in supports)
        if not dists:
            raise ValidationError("instance needs at least one box")
        return cls(dists)

    @property
    def n(self) -> int:
        return len(self.distributions)

    @property
    def box_ids(self) -> range:
        return range(self.n)

    def box(self, box_id: int) -> DiscreteDistribution:
        return self.distributions[box_id]

    def to_json_dict(self) -> dict:
        return {
            "boxes": [
                {"support": [[v, p] for v, p in d.outcomes]} for d in self.distributions
            ]
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "Instance":
        try:
            boxes = data["boxes"]
        except (TypeError, KeyError):
            raise ValidationError('instance JSON must be {"boxes": [...]}') from None
        return cls.from_supports(
            [tuple((pair[0], pair[1]) for pair in box["support"]) for box in boxes]
        )


@dataclass(frozen=True)
class Order:
    """An arrival permutation of an instance's box ids."""

    sequence: tuple[int, ...]

    @classmethod
    def identity(cls, n: int) -> "Order":
        return cls(tuple(range(n)))

    @classmethod
    def from_string(cls, text: str) -> "Order":
        try:
            return cls(tuple(int(tok) for tok in text.replace(" ", "").split(",") if tok != ""))
        except ValueError:
            raise ValidationError(f"cannot parse order {text!r}") from None

    def to_json_dict(self) -> dict:
        return {"order": list(self.sequence)}

    @classmethod
    def from_json_dict(cls, data: dict) -> "Order":
        try:
            return cls(tuple(int(i) for i in data["order"]))
        except (TypeError, KeyError, ValueError):
            raise ValidationError('order JSON must be {"order": [ids...]}') from None


@dataclass(frozen=True)
class ValueProfile:
    """Realized values, indexed by box id."""

    values: tuple[float, ...]

    def __getitem__(self, box_id: int) -> float:
        return self.values[box_id]

    def max_value(self) -> float:
        return max(self.values)


@dataclass(frozen=True)
class Violation:
    kind: str
    box_ids: tuple[int, ...]
    message: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def raise_if_invalid(self) -> None:
        if self.violations:
            lines = "; ".join(v.message for v in self.violations)
            raise ValidationError(lines)


def validate_instance(instance: Instance, require_unique_max: bool = False) -> ValidationReport:
    """Audit an instance against every type invariant.

    With ``require_unique_max``, additionally reject any positive value that
    appears in two different boxes' supports. Shared zeros are allowed: a zero
    stands for "box is empty" and can never be the caught maximum, since a win
    requires strictly exceeding a non-negative baseline.
    """
    violations: list[Violation] = []
    if instance.n < 1:
        violations.append(Violation("empty_instance", (), "instance has no boxes"))
    for bid, dist in enumerate(instance.distributions):
        if not dist.outcomes:
            violations.append(Violation("empty_support", (bid,), f"box {bid}: empty support"))
            continue
        prev = None
        for v, p in dist.outcomes:
            if not math.isfinite(v) or v < 0.0:
                violations.append(
                    Violation("value_range", (bid,), f"box {bid}: value {v!r} not finite non-negative")
                )
            if prev is not None and v <= prev:
                violations.append(
                    Violation("value_order", (bid,), f"box {bid}: values not strictly increasing at {v!r}")
                )
            prev = v
            if not (0.0 < p <= 1.0):
                violations.append(
                    Violation("prob_range", (bid,), f"box {bid}: probability {p!r} outside (0, 1]")
                )
        total = math.fsum(dist.probabilities)
        if abs(total - 1.0) > PROB_SUM_TOL:
            violations.append(
                Violation("prob_sum", (bid,), f"box {bid}: probabilities sum to {total!r}")
            )
    if require_unique_max:
        seen: dict[float, int] = {}
        for bid, dist in enumerate(instance.distributions):
            for v in dist.values:
                if v == 0.0:
                    continue
                if v in seen and seen[v] != bid:
                    violations.append(
                        Violation(
                            "shared_value",
                            (seen[v], bid),
                            f"value {v!r} appears in boxes {seen[v]} and {bid}",
                        )
                    )
                else:
                    seen[v] = bid
    return ValidationReport(tuple(violations))


def validate_order(instance: Instance, order: Order) -> ValidationReport:
    """Check that ``order`` is a permutation of the instance's box ids."""
    violations: list[Violation] = []
    if sorted(order.sequence) != list(instance.box_ids):
        violations.append(
            Violation(
                "bad_order",
                tuple(order.sequence),
                f"order {list(order.sequence)} is not a permutation of 0..{instance.n - 1}",
            )
        )
    return ValidationReport(tuple(violations))


def draw_profile(instance: Instance, rng: random.Random) -> ValueProfile:
    """One independent draw per box from an existing generator."""
    return ValueProfile(tuple(d.sample(rng) for d in instance.distributions))


def sample_profile(instance: Instance, rng_seed: int) -> ValueProfile:
    """Reproducible profile draw: the same seed always yields the same profile."""
    return draw_profile(instance, random.Random(rng_seed))


def load_instance(path: str) -> Instance:
    with open(path, "r", encoding="utf-8") as fh:
        return Instance.from_json_dict(json.load(fh))


def save_instance(instance: Instance, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(instance.to_json_dict(), fh, indent=2)
        fh.write("\n")


def load_order(path: str) -> Order:
    with open(path, "r", encoding="utf-8") as fh:
        return Order.from_json_dict(json.load(fh))


def save_order(order: Order, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(order.to_json_dict(), fh, indent=2)
        fh.write("\n")
