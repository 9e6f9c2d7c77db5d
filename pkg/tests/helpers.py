"""Seeded generators and shared corpora for the test suite.

Values are dyadic rationals (k/128) so float arithmetic stays exact and
equality-based tie paths actually get exercised. Positive values are kept
distinct across the boxes of one instance, so every generated instance
satisfies the unique-max requirement; zeros may repeat (an empty box).
"""

from __future__ import annotations

import random
from functools import lru_cache

from prophet_order import Instance, Order, SuffixMaxDistribution, suffix_max

GUARANTEE_CORPUS_SEED = 0x5EED_0001
ORACLE_CORPUS_SEED = 0x5EED_0002


def random_instance(
    rng: random.Random,
    max_boxes: int,
    max_support: int,
    zero_prob: float = 0.35,
) -> Instance:
    n = rng.randint(1, max_boxes)
    used: set[float] = set()
    boxes = []
    for _ in range(n):
        k = rng.randint(1, max_support)
        values: set[float] = set()
        if rng.random() < zero_prob:
            values.add(0.0)
        while len(values) < k:
            v = rng.randrange(1, 1280) / 128.0
            if v not in used:
                values.add(v)
                used.add(v)
        weights = [rng.random() + 0.05 for _ in values]
        total = sum(weights)
        boxes.append([(v, w / total) for v, w in zip(sorted(values), weights)])
    return Instance.from_supports(boxes)


def random_order(rng: random.Random, n: int) -> Order:
    seq = list(range(n))
    rng.shuffle(seq)
    return Order(tuple(seq))


def random_suffix_law(rng: random.Random, max_boxes: int = 4, max_support: int = 4) -> SuffixMaxDistribution:
    if rng.random() < 0.05:
        return suffix_max([])
    inst = random_instance(rng, max_boxes, max_support)
    return suffix_max(inst.distributions)


@lru_cache(maxsize=None)
def guarantee_corpus() -> tuple[Instance, ...]:
    """200 unique-max instances, n <= 6, support size <= 4."""
    rng = random.Random(GUARANTEE_CORPUS_SEED)
    return tuple(random_instance(rng, 6, 4) for _ in range(200))


@lru_cache(maxsize=None)
def oracle_corpus() -> tuple[Instance, ...]:
    """100 unique-max instances, n <= 4, support size <= 3."""
    rng = random.Random(ORACLE_CORPUS_SEED)
    return tuple(random_instance(rng, 4, 3) for _ in range(100))
