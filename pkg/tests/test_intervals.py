from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ergolab import DomainError, IntervalSet, combine, normalize, split_at_mass, theta
from conftest import random_interval_set


def test_normalize_adjacency_merge():
    assert normalize([(0, F(1, 2)), (F(1, 2), F(3, 4))]) == IntervalSet.interval(0, F(3, 4))


def test_normalize_drops_empty():
    assert normalize([(F(1, 4), F(1, 4))]) == IntervalSet.empty()


def test_normalize_overlap_merge():
    assert normalize([(0, F(1, 2)), (F(1, 4), F(5, 8))]) == IntervalSet.interval(0, F(5, 8))


def test_normalize_rejects_outside_unit():
    with pytest.raises(DomainError):
        normalize([(F(-1, 4), F(1, 2))])
    with pytest.raises(DomainError):
        normalize([(F(1, 2), F(5, 4))])


def test_combine_examples():
    a = IntervalSet.interval(0, F(1, 4))
    b = IntervalSet.interval(F(1, 2), F(3, 4))
    assert combine(a, b, "union").intervals == ((F(0), F(1, 4)), (F(1, 2), F(3, 4)))
    assert combine(a, a, "symdiff") == IntervalSet.empty()
    c = IntervalSet.interval(0, F(1, 2))
    d = IntervalSet.interval(F(1, 4), F(3, 4))
    assert combine(c, d, "intersect") == IntervalSet.interval(F(1, 4), F(1, 2))
    with pytest.raises(DomainError):
        combine(a, b, "xor")


def test_measure_examples():
    assert IntervalSet.interval(0, F(1, 2)).measure() == F(1, 2)
    assert IntervalSet.empty().measure() == 0
    s = normalize([(0, F(1, 3)), (F(1, 2), F(7, 12))])
    assert s.measure() == F(5, 12)


def test_theta_examples():
    a = random_set_fixed()
    assert theta(a, a) == 0
    assert theta(IntervalSet.interval(0, F(1, 2)), IntervalSet.interval(F(1, 4), F(3, 4))) == F(1, 2)
    assert theta(a, IntervalSet.empty()) == a.measure()


def random_set_fixed():
    return normalize([(F(1, 8), F(1, 3)), (F(2, 5), F(3, 4))])


def test_split_at_mass_examples():
    s = normalize([(0, F(1, 4)), (F(1, 2), F(3, 4))])
    prefix, suffix = split_at_mass(s, F(3, 8))
    assert prefix == normalize([(0, F(1, 4)), (F(1, 2), F(5, 8))])
    assert suffix == IntervalSet.interval(F(5, 8), F(3, 4))
    p0, s0 = split_at_mass(s, 0)
    assert p0 == IntervalSet.empty() and s0 == s
    p1, s1 = split_at_mass(s, s.measure())
    assert p1 == s and s1 == IntervalSet.empty()
    with pytest.raises(DomainError):
        split_at_mass(s, F(9, 10))


def test_split_at_mass_exact_random(rng):
    for _ in range(100):
        a = random_interval_set(rng)
        if a.is_empty():
            continue
        m = a.measure() * F(rng.randint(0, 16), 16)
        prefix, suffix = a.split_at_mass(m)
        assert prefix.measure() == m
        assert prefix.union(suffix) == a
        assert prefix.intersect(suffix).is_empty()


def test_inclusion_exclusion_random(rng):
    for _ in range(200):
        a, b = random_interval_set(rng), random_interval_set(rng)
        assert a.union(b).measure() + a.intersect(b).measure() == a.measure() + b.measure()


def test_theta_triangle_random(rng):
    for _ in range(200):
        a, b, c = (random_interval_set(rng) for _ in range(3))
        assert theta(a, c) <= theta(a, b) + theta(b, c)


def test_combine_canonical_fixpoint(rng):
    for _ in range(100):
        a, b = random_interval_set(rng), random_interval_set(rng)
        for op in ("union", "intersect", "minus", "symdiff"):
            out = combine(a, b, op)
            assert normalize(out.intervals) == out


def test_json_roundtrip(rng):
    for _ in range(50):
        a = random_interval_set(rng)
        assert IntervalSet.from_json(a.to_json()) == a


rationals = st.fractions(min_value=0, max_value=1, max_denominator=64)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(rationals, rationals), max_size=5),
       st.lists(st.tuples(rationals, rationals), max_size=5))
def test_union_measure_bounds_hypothesis(raw_a, raw_b):
    a = normalize([(min(p), max(p)) for p in raw_a])
    b = normalize([(min(p), max(p)) for p in raw_b])
    u = a.union(b)
    assert max(a.measure(), b.measure()) <= u.measure() <= min(1, a.measure() + b.measure())
    assert u.minus(a).union(u.minus(b)).union(a.intersect(b)) == u
