"""Shared generators for randomized exact-arithmetic tests.

Everything is seeded: the suites are property-style but fully
deterministic, which keeps exact expected values stable.
"""

import random
from fractions import Fraction

import pytest

from ergolab import IntervalSet, make_measure, normalize


@pytest.fixture
def rng():
    return random.Random(0xE260)


def random_interval_set(rng, max_intervals=4, denominators=(8, 12, 16, 24, 32, 60, 64)):
    pairs = []
    for _ in range(rng.randint(0, max_intervals)):
        d = rng.choice(denominators)
        a, b = sorted(rng.sample(range(d + 1), 2))
        pairs.append((Fraction(a, d), Fraction(b, d)))
    return normalize(pairs)


def random_dyadic_set(rng, max_exp=5, max_intervals=4):
    k = rng.randint(1, max_exp)
    d = 1 << k
    pairs = []
    for _ in range(rng.randint(1, max_intervals)):
        a, b = sorted(rng.sample(range(d + 1), 2))
        pairs.append((Fraction(a, d), Fraction(b, d)))
    return normalize(pairs)


def random_measure(rng, max_atoms=5, value_den=12, value_range=4):
    n = rng.randint(1, max_atoms)
    values = rng.sample(
        [Fraction(i, value_den) for i in range(-value_range * value_den,
                                               value_range * value_den + 1)],
        n,
    )
    weights = [rng.randint(1, 8) for _ in range(n)]
    total = sum(weights)
    return make_measure([(v, Fraction(w, total)) for v, w in zip(values, weights)])


def random_zero_mean_measure(rng, max_atoms=6, value_den=6, value_range=4):
    # recenter a random draw by its mean; retry when values leave the range
    for _ in range(200):
        m = random_measure(rng, max_atoms, value_den, value_range)
        shifted = [(v - m.mean(), mass) for v, mass in m.atoms]
        if all(abs(v) <= value_range for v, _ in shifted):
            out = make_measure(shifted)
            assert out.mean() == 0
            return out
    raise AssertionError("failed to generate a zero-mean measure")
