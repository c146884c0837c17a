from fractions import Fraction as F

import pytest

from ergolab import (
    DomainError,
    IntervalSet,
    RokhlinTower,
    birkhoff_partition,
    exact_dyadic_tower,
    normalize,
    odometer_image,
    rokhlin_tower,
    sublevel_birkhoff,
)
from ergolab.intervals import union_all
from conftest import random_dyadic_set, random_interval_set


def test_image_examples():
    assert odometer_image(IntervalSet.interval(0, F(1, 2)), 1) == IntervalSet.interval(F(1, 2), 1)
    # the tail past 3/4 coalesces at the origin
    assert odometer_image(IntervalSet.interval(F(3, 4), 1), 1) == IntervalSet.interval(0, F(1, 4))
    a = normalize([(F(1, 3), F(2, 3))])
    assert odometer_image(a, 0) == a


def test_image_preserves_measure_and_inverts(rng):
    for _ in range(200):
        a = random_interval_set(rng)
        i = rng.randint(-64, 64)
        img = odometer_image(a, i)
        assert img.measure() == a.measure()
        assert odometer_image(img, -i) == a


def test_dyadic_tower_small():
    t0 = exact_dyadic_tower(0)
    assert t0.base == IntervalSet.full() and t0.height == 1 and t0.junk.is_empty()
    t2 = exact_dyadic_tower(2)
    expected = [
        IntervalSet.interval(0, F(1, 4)),
        IntervalSet.interval(F(1, 2), F(3, 4)),
        IntervalSet.interval(F(1, 4), F(1, 2)),
        IntervalSet.interval(F(3, 4), 1),
    ]
    assert [t2.level(i) for i in range(4)] == expected


@pytest.mark.parametrize("k", range(0, 9))
def test_dyadic_tower_partitions(k):
    tower = exact_dyadic_tower(k)
    levels = [tower.level(i) for i in range(tower.height)]
    assert union_all(levels) == IntervalSet.full()
    assert sum(l.measure() for l in levels) == 1  # disjoint because union has full measure


def test_rokhlin_examples():
    t = rokhlin_tower(3, F(1, 4))
    assert t.provenance == {"k": 4, "q": 5}
    assert t.junk.measure() == F(1, 16)
    t4 = rokhlin_tower(4, F(1, 4))
    assert t4.provenance == {"k": 4, "q": 4}
    assert t4.junk.is_empty()
    t1 = rokhlin_tower(1, 1)
    assert t1.base == IntervalSet.full() and t1.junk.is_empty()
    with pytest.raises(DomainError):
        rokhlin_tower(3, 0)
    with pytest.raises(DomainError):
        rokhlin_tower(3, 2)


@pytest.mark.parametrize("gamma", [F(1, 4), F(1, 16)])
@pytest.mark.parametrize("n", [1, 2, 3, 7, 16, 50, 128, 200])
def test_rokhlin_tower_partition(n, gamma):
    tower = rokhlin_tower(n, gamma)
    levels = [tower.level(i) for i in range(n)]
    covered = union_all(levels + [tower.junk])
    assert covered == IntervalSet.full()
    assert sum(l.measure() for l in levels) + tower.junk.measure() == 1
    assert tower.junk.measure() <= gamma
    assert all(l.intersect(tower.junk).is_empty() for l in levels)


def test_tower_json_roundtrip():
    t = rokhlin_tower(5, F(1, 8))
    assert RokhlinTower.from_json(t.to_json()).base == t.base


def test_birkhoff_examples():
    half = IntervalSet.interval(0, F(1, 2))
    p1 = birkhoff_partition(half, 1)
    assert {(c, k) for c, k in p1.cells} == {
        (IntervalSet.interval(0, F(1, 2)), 1),
        (IntervalSet.interval(F(1, 2), 1), 0),
    }
    p2 = birkhoff_partition(half, 2)
    assert p2.cells == ((IntervalSet.full(), 1),)
    quarter = IntervalSet.interval(0, F(1, 4))
    p3 = birkhoff_partition(quarter, 2)
    assert dict((k, c) for c, k in p3.cells) == {
        0: IntervalSet.interval(F(1, 4), F(3, 4)),
        1: normalize([(0, F(1, 4)), (F(3, 4), 1)]),
    }


def test_birkhoff_integral_identity(rng):
    for _ in range(60):
        a = random_interval_set(rng)
        n = rng.randint(1, 64)
        p = birkhoff_partition(a, n)
        assert p.total_measure() == 1
        assert p.weighted_count() == n * a.measure()


def test_birkhoff_grid_and_sweep_agree(rng):
    for _ in range(40):
        a = random_dyadic_set(rng, max_exp=4)
        n = rng.randint(1, 40)
        from ergolab.systems import _birkhoff_partition_sweep

        assert birkhoff_partition(a, n).cells == _birkhoff_partition_sweep(a, n).cells


def test_sublevel_examples():
    assert sublevel_birkhoff(IntervalSet.empty(), 5, 0, "two_sided") == IntervalSet.full()
    assert sublevel_birkhoff(IntervalSet.interval(0, F(1, 2)), 2, 0, "two_sided") == IntervalSet.full()
    assert sublevel_birkhoff(IntervalSet.interval(0, F(1, 4)), 2, 0, "two_sided") == IntervalSet.empty()
    with pytest.raises(DomainError):
        sublevel_birkhoff(IntervalSet.empty(), 2, 0, "sideways")


def test_sublevel_ergodic_smoke(rng):
    # dyadic sets stabilize: by n = 128 the two-sided 1/8-sublevel is large
    for _ in range(10):
        a = random_dyadic_set(rng, max_exp=5)
        measures = [
            sublevel_birkhoff(a, n, F(1, 8), "two_sided").measure()
            for n in (8, 16, 32, 64, 128)
        ]
        assert measures[-1] >= F(3, 4)
