from fractions import Fraction as F

import pytest

from ergolab import (
    CapacityError,
    DiscreteMeasure,
    DomainError,
    IntervalSet,
    ValidationError,
    condition,
    dirac,
    dirac_bound,
    discretize_center,
    gaussian_target,
    levy_distance,
    levy_le,
    make_measure,
    pow34_sequence,
    realize_on_base,
    scale,
    sqrt_sequence,
)
from conftest import random_measure, random_zero_mean_measure

D0 = dirac(0)


def test_make_measure_examples():
    assert make_measure([(0, 1)]) == D0
    m = make_measure([(1, F(1, 2)), (-1, F(1, 2))])
    assert m.values == (F(-1), F(1))
    assert make_measure([(0, F(1, 2)), (0, F(1, 2))]) == D0
    with pytest.raises(ValidationError):
        make_measure([(0, F(1, 2))])
    with pytest.raises(ValidationError):
        make_measure([(0, F(1, 2)), (1, 0), (2, F(1, 2))])


def test_condition_examples():
    u3 = make_measure([(-1, F(1, 3)), (0, F(1, 3)), (1, F(1, 3))])
    assert condition(u3, [(-1, F(1, 2))]) == make_measure([(-1, F(1, 2)), (0, F(1, 2))])
    m = make_measure([(-1, F(1, 4)), (F(1, 3), F(3, 4))])
    assert condition(m, [(-5, 5)]) == m
    assert condition(m, [(-1, 1)]) == m
    with pytest.raises(DomainError):
        condition(m, [(2, 3)])


def test_scale_examples():
    assert scale(dirac(2), 2) == dirac(1)
    m = make_measure([(-4, F(1, 2)), (4, F(1, 2))])
    assert scale(m, 1) == m
    assert scale(m, 8) == make_measure([(F(-1, 2), F(1, 2)), (F(1, 2), F(1, 2))])
    with pytest.raises(DomainError):
        scale(m, 0)


def test_levy_le_examples(rng):
    m = random_measure(rng)
    assert levy_le(m, m, 0)
    assert levy_le(D0, dirac(F(1, 2)), F(1, 2))
    assert not levy_le(D0, dirac(F(1, 2)), F(1, 4))
    for _ in range(20):
        a, b = random_measure(rng), random_measure(rng)
        assert levy_le(a, b, 1)


def test_levy_distance_bracket(rng):
    m = random_measure(rng)
    assert levy_distance(m, m, F(1, 64)) == (0, 0)
    lo, hi = levy_distance(D0, dirac(F(1, 2)), F(1, 64))
    assert lo <= F(1, 2) <= hi and hi - lo <= F(1, 64)
    for _ in range(40):
        a, b = random_measure(rng), random_measure(rng)
        lo, hi = levy_distance(a, b, F(1, 32))
        assert hi - lo <= F(1, 32)
        assert levy_le(a, b, hi)
        assert lo == 0 or not levy_le(a, b, lo)
        assert (lo, hi) == levy_distance(b, a, F(1, 32))


def test_dirac_bound_examples():
    assert dirac_bound(make_measure([(F(-1, 4), F(1, 2)), (F(1, 4), F(1, 2))]), F(1, 4))
    assert dirac_bound(D0, 0)
    assert not dirac_bound(dirac(1), F(1, 2))


def test_dirac_bound_matches_levy(rng):
    for _ in range(300):
        m = random_measure(rng)
        a = F(rng.randint(0, 12), 12)
        assert dirac_bound(m, a) == levy_le(m, D0, a)


def test_conditioning_contraction(rng):
    # conditioning moves the law by at most the discarded mass
    from ergolab.measures import mass_outside

    for _ in range(300):
        m = random_measure(rng)
        d = rng.choice([4, 6, 8])
        cuts = sorted(F(rng.randint(-4 * d, 4 * d), d) for _ in range(2))
        b = [(cuts[0], cuts[1])]
        outside = mass_outside(m, b)
        if outside == 1:
            continue
        assert levy_le(condition(m, b), m, outside)


def test_scaling_contraction(rng):
    for _ in range(200):
        a, b = random_measure(rng), random_measure(rng)
        x = 1 + F(rng.randint(0, 12), 4)
        _, hi = levy_distance(a, b, F(1, 32))
        assert levy_le(scale(a, x), scale(b, x), hi)


def test_discretize_worked_example():
    # nu = {-1: 1/4, 1/3: 3/4} at a_16 = 4 with C = 1 recenters through
    # p = 17/16 onto {-4: 4/17, 1: 12/17, 4: 1/17}
    seq = sqrt_sequence(100)
    nu = make_measure([(-1, F(1, 4)), (F(1, 3), F(3, 4))])
    lat = discretize_center(nu, F(2), seq, 16)
    assert seq.value(16) == 4
    assert lat.C == 1
    assert lat.provenance["eta_prime"] == make_measure([(-4, F(1, 4)), (1, F(3, 4))])
    assert lat.provenance["p"] == F(17, 16)
    assert lat.provenance["s"] == -1
    assert lat.eta == make_measure([(-4, F(4, 17)), (1, F(12, 17)), (4, F(1, 17))])
    assert lat.eta.mean() == 0


def test_discretize_lattice_compatible():
    seq = sqrt_sequence(10000)
    nu = make_measure([(-1, F(1, 2)), (1, F(1, 2))])
    lat = discretize_center(nu, F(1, 4), seq, 625)
    a = seq.value(625)
    assert a == 25
    assert lat.eta == make_measure([(-25, F(1, 2)), (25, F(1, 2))])
    assert levy_le(scale(lat.eta, a), nu, 0)


def test_discretize_requires_zero_mean_and_reports_n0():
    seq = sqrt_sequence(10000)
    with pytest.raises(DomainError):
        discretize_center(dirac(1), F(1, 4), seq, 1000)
    nu = make_measure([(-1, F(1, 2)), (1, F(1, 2))])
    with pytest.raises(CapacityError) as err:
        discretize_center(nu, F(1, 4), seq, 100)
    assert err.value.required == 577


def test_discretize_random(rng):
    seq = sqrt_sequence(20000)
    for _ in range(30):
        nu = random_zero_mean_measure(rng)
        # run at the minimal admissible n and a bit beyond
        for eps in (F(1, 4), F(1, 10)):
            n0 = discretize_center(nu, eps, seq, 20000).n0
            for n in (n0, n0 + 7):
                lat_n = discretize_center(nu, eps, seq, n)
                a = seq.value(n)
                assert lat_n.eta.mean() == 0
                assert sum(m for _, m in lat_n.eta.atoms) == 1
                assert lat_n.eta.support_radius() <= a * lat_n.C
                assert all(v.denominator == 1 for v in lat_n.eta.values)
                assert levy_le(scale(lat_n.eta, a), nu, eps)


def test_realize_on_base_examples():
    f = IntervalSet.interval(0, F(1, 2))
    parts = realize_on_base(f, make_measure([(1, F(1, 2)), (2, F(1, 2))]))
    assert parts == [
        (F(1), IntervalSet.interval(0, F(1, 4))),
        (F(2), IntervalSet.interval(F(1, 4), F(1, 2))),
    ]
    parts2 = realize_on_base(f, make_measure([(-1, F(1, 3)), (1, F(2, 3))]))
    assert parts2[0] == (F(-1), IntervalSet.interval(0, F(1, 6)))
    assert parts2[1] == (F(1), IntervalSet.interval(F(1, 6), F(1, 2)))
    assert realize_on_base(f, dirac(7)) == [(F(7), f)]
    with pytest.raises(DomainError):
        realize_on_base(IntervalSet.empty(), dirac(0))


def test_realize_on_base_random(rng):
    from conftest import random_interval_set

    for _ in range(50):
        f = random_interval_set(rng)
        if f.is_empty():
            continue
        eta = random_measure(rng)
        parts = realize_on_base(f, eta)
        total = IntervalSet.empty()
        for (v, part), (v2, mass) in zip(parts, eta.atoms):
            assert v == v2
            assert part.measure() == mass * f.measure()
            assert part.intersect(total).is_empty()
            total = total.union(part)
        assert total == f


def test_sequences_increasing_and_sublinear():
    for seq in (sqrt_sequence(1 << 20), pow34_sequence(1 << 20)):
        for n in list(range(2, 200)) + [1000, 4096, 65536, 1 << 20]:
            assert seq.value(n) > 0
            assert seq.value(n) > seq.value(n - 1)
            assert seq.value(n) < n or n < 4
        assert not seq.adjusted


def test_gaussian_target_is_zero_mean():
    g = gaussian_target(pairs=8)
    assert g.mean() == 0
    assert sum(m for _, m in g.atoms) == 1
    assert len(g.atoms) == 16


def test_measure_json_roundtrip(rng):
    for _ in range(20):
        m = random_measure(rng)
        assert DiscreteMeasure.from_json(m.to_json()) == m
