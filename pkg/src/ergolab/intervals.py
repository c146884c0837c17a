"""Exact algebra of measurable subsets of [0, 1).

A set is a finite union of half-open intervals [lo, hi) with rational
endpoints, identified mod null sets. The representation is canonical:
intervals are sorted, pairwise disjoint, non-adjacent and non-empty, so two
IntervalSets equal as point sets mod null are equal field-by-field. All
boolean operations are closed on the representation and exact.

Single points are null and therefore invisible; half-open normalization is
what makes equality canonical.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Tuple

from .errors import DomainError
from .rationals import format_fraction, parse_fraction

ZERO = Fraction(0)
ONE = Fraction(1)

Pair = Tuple[Fraction, Fraction]


@dataclass(frozen=True)
class IntervalSet:
    """Canonical finite union of half-open rational intervals in [0, 1).

    Immutable; all operations are pure functions returning new values, so
    instances are safe to share between concurrent workers.
    """

    intervals: Tuple[Pair, ...]

    # -- constructors ------------------------------------------------------

    @staticmethod
    def empty() -> "IntervalSet":
        return _EMPTY

    @staticmethod
    def full() -> "IntervalSet":
        return _FULL

    @staticmethod
    def interval(lo, hi) -> "IntervalSet":
        return normalize([(lo, hi)])

    @staticmethod
    def from_pairs(pairs: Iterable[Tuple]) -> "IntervalSet":
        return normalize(pairs)

    # -- basic queries -----------------------------------------------------

    def is_empty(self) -> bool:
        return not self.intervals

    def __bool__(self) -> bool:
        return bool(self.intervals)

    def measure(self) -> Fraction:
        return sum((hi - lo for lo, hi in self.intervals), ZERO)

    def interval_count(self) -> int:
        return len(self.intervals)

    def contains_point(self, x: Fraction) -> bool:
        """Membership of a single point (boundary points follow [lo, hi))."""
        lo_idx, hi_idx = 0, len(self.intervals)
        while lo_idx < hi_idx:
            mid = (lo_idx + hi_idx) // 2
            lo, hi = self.intervals[mid]
            if x < lo:
                hi_idx = mid
            elif x >= hi:
                lo_idx = mid + 1
            else:
                return True
        return False

    # -- boolean algebra ----------------------------------------------------

    def union(self, other: "IntervalSet") -> "IntervalSet":
        return _sweep(self, other, lambda a, b: a or b)

    def intersect(self, other: "IntervalSet") -> "IntervalSet":
        return _sweep(self, other, lambda a, b: a and b)

    def minus(self, other: "IntervalSet") -> "IntervalSet":
        return _sweep(self, other, lambda a, b: a and not b)

    def symdiff(self, other: "IntervalSet") -> "IntervalSet":
        return _sweep(self, other, lambda a, b: a != b)

    def complement(self) -> "IntervalSet":
        return _FULL.minus(self)

    def theta(self, other: "IntervalSet") -> Fraction:
        """Measure of the symmetric difference: the ambient pseudo-metric."""
        return self.symdiff(other).measure()

    def shift(self, delta: Fraction) -> "IntervalSet":
        """Translate by delta; caller guarantees the image stays in [0, 1)."""
        return IntervalSet(tuple((lo + delta, hi + delta) for lo, hi in self.intervals))

    # -- measure-exact splitting --------------------------------------------

    def split_at_mass(self, m) -> Tuple["IntervalSet", "IntervalSet"]:
        """Split into (prefix, suffix) with measure(prefix) == m exactly.

        The prefix is the leftmost part. 0 <= m <= measure(self) required.
        """
        m = Fraction(m)
        if m < 0 or m > self.measure():
            raise DomainError(f"split mass {m} outside [0, {self.measure()}]")
        prefix = []
        remaining = m
        suffix_from = 0
        for idx, (lo, hi) in enumerate(self.intervals):
            if remaining == 0:
                suffix_from = idx
                break
            length = hi - lo
            if length <= remaining:
                prefix.append((lo, hi))
                remaining -= length
                suffix_from = idx + 1
            else:
                cut = lo + remaining
                prefix.append((lo, cut))
                remaining = ZERO
                return (
                    IntervalSet(tuple(prefix)),
                    IntervalSet(((cut, hi),) + self.intervals[idx + 1 :]),
                )
        return IntervalSet(tuple(prefix)), IntervalSet(self.intervals[suffix_from:])

    # -- serialization -------------------------------------------------------

    def to_json(self):
        return [[format_fraction(lo), format_fraction(hi)] for lo, hi in self.intervals]

    @staticmethod
    def from_json(data) -> "IntervalSet":
        return normalize([(parse_fraction(lo), parse_fraction(hi)) for lo, hi in data])

    def __repr__(self):
        body = " ∪ ".join(f"[{lo},{hi})" for lo, hi in self.intervals)
        return f"IntervalSet({body or '∅'})"


def normalize(raw: Iterable[Tuple]) -> IntervalSet:
    """Canonicalize a list of rational pairs into an IntervalSet.

    Empty pairs are dropped; overlaps and adjacencies merge. Endpoints must
    satisfy 0 <= lo <= hi <= 1.
    """
    cleaned = []
    for lo, hi in raw:
        lo, hi = Fraction(lo), Fraction(hi)
        if not (ZERO <= lo <= hi <= ONE):
            raise DomainError(f"endpoints ({lo}, {hi}) outside [0, 1]")
        if lo < hi:
            cleaned.append((lo, hi))
    cleaned.sort()
    merged = []
    for lo, hi in cleaned:
        if merged and lo <= merged[-1][1]:
            if hi > merged[-1][1]:
                merged[-1] = (merged[-1][0], hi)
        else:
            merged.append((lo, hi))
    return IntervalSet(tuple(merged))


def combine(a: IntervalSet, b: IntervalSet, op: str) -> IntervalSet:
    """Boolean operation by name: union, intersect, minus or symdiff."""
    try:
        return getattr(a, _OPS[op])(b)
    except KeyError:
        raise DomainError(f"unknown set operation {op!r}") from None


_OPS = {
    "union": "union",
    "intersect": "intersect",
    "minus": "minus",
    "symdiff": "symdiff",
}


def measure(a: IntervalSet) -> Fraction:
    return a.measure()


def theta(a: IntervalSet, b: IntervalSet) -> Fraction:
    return a.theta(b)


def split_at_mass(a: IntervalSet, m) -> Tuple[IntervalSet, IntervalSet]:
    return a.split_at_mass(m)


def union_all(sets: Iterable[IntervalSet]) -> IntervalSet:
    """Union of many sets in one sweep (linear in total interval count)."""
    events = []
    for s in sets:
        for lo, hi in s.intervals:
            events.append((lo, 1))
            events.append((hi, -1))
    events.sort()
    out = []
    depth = 0
    start = None
    for pos, delta in events:
        before = depth
        depth += delta
        if before == 0 and depth > 0:
            start = pos
        elif before > 0 and depth == 0:
            if out and out[-1][1] == start:
                out[-1] = (out[-1][0], pos)
            else:
                out.append((start, pos))
    return IntervalSet(tuple(out))


def _sweep(a: IntervalSet, b: IntervalSet, keep) -> IntervalSet:
    """Two-set boundary sweep; emits the canonical result of keep(inA, inB)."""
    bounds = sorted(
        {x for lo, hi in a.intervals for x in (lo, hi)}
        | {x for lo, hi in b.intervals for x in (lo, hi)}
    )
    if not bounds:
        return _EMPTY
    out = []
    ia = ib = 0
    for i in range(len(bounds) - 1):
        lo, hi = bounds[i], bounds[i + 1]
        while ia < len(a.intervals) and a.intervals[ia][1] <= lo:
            ia += 1
        while ib < len(b.intervals) and b.intervals[ib][1] <= lo:
            ib += 1
        in_a = ia < len(a.intervals) and a.intervals[ia][0] <= lo
        in_b = ib < len(b.intervals) and b.intervals[ib][0] <= lo
        if keep(in_a, in_b):
            if out and out[-1][1] == lo:
                out[-1] = (out[-1][0], hi)
            else:
                out.append((lo, hi))
    return IntervalSet(tuple(out))


_EMPTY = IntervalSet(())
_FULL = IntervalSet(((ZERO, ONE),))
