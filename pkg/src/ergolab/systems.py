"""Rokhlin towers and Birkhoff-sum partitions for the dyadic odometer.

The height-2^k dyadic tower over base [0, 2^-k) is exact: its levels
partition [0, 1) and T cycles them. Towers of arbitrary height n regroup a
dyadic tower: with q = floor(2^k / n), the base F = union of levels j*n,
j < q, carries a height-n tower whose junk (the top 2^k - q*n dyadic
levels) has measure below any requested gamma once k is large enough.

Birkhoff partitions S_n(1_A) are computed either by an exact breakpoint
sweep of the preimages T^-i(A) (general sets, small n*|A|) or by cyclic
level arithmetic (dyadic sets, any scale): for A a union of grid cells,
S_n(1_A)(x) depends only on the tower level of x.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Tuple

from .errors import CapacityError, DomainError
from .intervals import IntervalSet, union_all
from .odometer import (
    bit_reverse,
    cells_to_intervalset,
    dyadic_cells,
    odometer_image,
)

ZERO = Fraction(0)
ONE = Fraction(1)

SWEEP_EVENT_CAP = 1 << 21
PARTITION_LEVEL_CAP = 1 << 19


@dataclass(frozen=True)
class RokhlinTower:
    """Base, height, junk; levels are implicitly T^i(base), i < height."""

    base: IntervalSet
    height: int
    junk: IntervalSet
    provenance: Dict[str, int] = field(default_factory=dict)

    def level(self, i: int) -> IntervalSet:
        if not (0 <= i < self.height):
            raise DomainError(f"level {i} outside [0, {self.height})")
        return odometer_image(self.base, i)

    def levels_union(self) -> IntervalSet:
        return union_all(self.level(i) for i in range(self.height))

    def to_json(self):
        return {
            "base": self.base.to_json(),
            "height": self.height,
            "junk": self.junk.to_json(),
            "provenance": dict(self.provenance),
        }

    @staticmethod
    def from_json(data) -> "RokhlinTower":
        return RokhlinTower(
            base=IntervalSet.from_json(data["base"]),
            height=int(data["height"]),
            junk=IntervalSet.from_json(data["junk"]),
            provenance={k: int(v) for k, v in data.get("provenance", {}).items()},
        )


def exact_dyadic_tower(k: int) -> RokhlinTower:
    """The canonical tower: base [0, 2^-k), height 2^k, empty junk."""
    if k < 0:
        raise DomainError("k must be >= 0")
    base = IntervalSet.interval(ZERO, Fraction(1, 1 << k))
    return RokhlinTower(base=base, height=1 << k, junk=IntervalSet.empty(),
                        provenance={"k": k, "q": 1})


def tower_parameters(n: int, gamma) -> Tuple[int, int]:
    """(k, q) for the height-n tower with junk measure <= gamma.

    k is minimal with 2^k >= n/gamma; q = floor(2^k / n). The junk measure
    (2^k - q*n) / 2^k is then < n/2^k <= gamma.
    """
    gamma = Fraction(gamma)
    if not (0 < gamma <= 1):
        raise DomainError("gamma must satisfy 0 < gamma <= 1")
    if n < 1:
        raise DomainError("height must be >= 1")
    k = 0
    while (1 << k) * gamma < n:
        k += 1
    return k, (1 << k) // n


def rokhlin_tower(n: int, gamma) -> RokhlinTower:
    """Height-n tower with certified junk bound, materialized exactly."""
    k, q = tower_parameters(n, gamma)
    if q + ((1 << k) - q * n) > PARTITION_LEVEL_CAP:
        raise CapacityError(
            f"tower materialization for n={n}, gamma={gamma} exceeds cap",
            required=q + ((1 << k) - q * n),
        )
    base = cells_to_intervalset(k, [j * n for j in range(q)])
    junk = cells_to_intervalset(k, list(range(q * n, 1 << k)))
    return RokhlinTower(base=base, height=n, junk=junk,
                        provenance={"k": k, "q": q})


# -- Birkhoff partitions ------------------------------------------------------


@dataclass(frozen=True)
class LevelPartition:
    """Cells on which S_n(1_A) is constant, grouped by the count value."""

    cells: Tuple[Tuple[IntervalSet, int], ...]

    def total_measure(self) -> Fraction:
        return sum((c.measure() for c, _ in self.cells), ZERO)

    def weighted_count(self) -> Fraction:
        """The exact integral of the counting function."""
        return sum((c.measure() * k for c, k in self.cells), ZERO)

    def to_json(self):
        return [{"cell": c.to_json(), "count": k} for c, k in self.cells]

    @staticmethod
    def from_json(data) -> "LevelPartition":
        return LevelPartition(
            tuple((IntervalSet.from_json(row["cell"]), int(row["count"])) for row in data)
        )


def cyclic_window_counts(size: int, cells: List[int], n: int):
    """Piecewise-constant S_n over tower levels of the 2^k grid.

    `cells` is the sorted level list of the observed set; returns a list of
    (start_level, stop_level, count) spanning [0, size). Exact for every n:
    the window of length n sees each cell floor(n/size) times plus once more
    when the cell falls in the leading remainder.
    """
    w, r = divmod(n, size)
    base = w * len(cells)
    if r == 0 or not cells:
        return [(0, size, base)]
    deltas: Dict[int, int] = {}
    for m in cells:
        p_gain = (m - r + 1) % size
        p_lose = (m + 1) % size
        deltas[p_gain] = deltas.get(p_gain, 0) + 1
        deltas[p_lose] = deltas.get(p_lose, 0) - 1
    # count at level 0: cells in the cyclic window [0, r)
    c0 = bisect.bisect_left(cells, r)
    bps = sorted(set(deltas) | {0})
    pieces = []
    val = c0
    for idx, p in enumerate(bps):
        if p != 0:
            val += deltas.get(p, 0)
        stop = bps[idx + 1] if idx + 1 < len(bps) else size
        if p < stop:
            pieces.append((p, stop, base + val))
    return pieces


def birkhoff_partition(a: IntervalSet, n: int) -> LevelPartition:
    """Overlay of T^-i(a), i < n, with the exact count on each cell."""
    if n < 1:
        raise DomainError("n must be >= 1")
    dyadic = dyadic_cells(a)
    if dyadic is not None and (1 << dyadic[0]) <= PARTITION_LEVEL_CAP:
        k, cells = dyadic
        size = 1 << k
        pieces = cyclic_window_counts(size, cells, n)
        by_count: Dict[int, List[int]] = {}
        for start, stop, count in pieces:
            by_count.setdefault(count, []).extend(range(start, stop))
        grouped = tuple(
            (cells_to_intervalset(k, levels), count)
            for count, levels in sorted(by_count.items())
        )
        return LevelPartition(grouped)
    return _birkhoff_partition_sweep(a, n)


def _birkhoff_partition_sweep(a: IntervalSet, n: int) -> LevelPartition:
    events: List[Tuple[Fraction, int]] = []
    w = a
    total = 0
    for i in range(n):
        if i:
            w = odometer_image(w, -1)
        total += w.interval_count()
        if total > SWEEP_EVENT_CAP:
            raise CapacityError(
                "Birkhoff sweep exceeds event cap; use a dyadic set or smaller n",
                required=total,
            )
        for lo, hi in w.intervals:
            events.append((lo, 1))
            events.append((hi, -1))
    events.append((ZERO, 0))
    events.append((ONE, 0))
    events.sort()
    by_count: Dict[int, List[Tuple[Fraction, Fraction]]] = {}
    depth = 0
    prev = ZERO
    for pos, delta in events:
        if pos > prev:
            bucket = by_count.setdefault(depth, [])
            if bucket and bucket[-1][1] == prev:
                bucket[-1] = (bucket[-1][0], pos)
            else:
                bucket.append((prev, pos))
            prev = pos
        elif pos == prev:
            pass
        depth += delta
    grouped = tuple(
        (IntervalSet(tuple(pairs)), count) for count, pairs in sorted(by_count.items())
    )
    return LevelPartition(grouped)


def sublevel_birkhoff(a: IntervalSet, n: int, bound, mode: str) -> IntervalSet:
    """Exact sublevel set of the time-n Birkhoff average of 1_a.

    two_sided: {x : |S_n(1_a)(x) - n*mu(a)| <= n*bound}
    upper:     {x : S_n(1_a)(x) <= n*(mu(a) + bound)}
    """
    bound = Fraction(bound)
    if bound < 0:
        raise DomainError("bound must be >= 0")
    if mode not in ("upper", "two_sided"):
        raise DomainError(f"unknown mode {mode!r}")
    partition = birkhoff_partition(a, n)
    target = n * a.measure()
    selected = []
    for cell, count in partition.cells:
        if mode == "two_sided":
            ok = abs(count - target) <= n * bound
        else:
            ok = count <= target + n * bound
        if ok:
            selected.append(cell)
    return union_all(selected)
