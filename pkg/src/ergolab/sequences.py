"""Normalizing sequences (a_n): rational, increasing, sublinear.

Built-in families are the rationalized power laws n^(1/2) and n^(3/4),
floored to the grid 2^-20. On every horizon we allow (n <= 2^36) the floor
of a power law to that grid is strictly increasing because consecutive gaps
exceed the grid spacing, so no tie adjustment ever fires; the adjustment
rule (running maximum plus 2^-40) is retained for completeness and records
itself when used. The divergence a_n -> infinity and a_n/n -> 0 are
asserted by the family tag; only the finite used range is checkable.

An "explicit" family carries literal values for tests and tooling.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt
from typing import Dict, Optional, Tuple

from .errors import DomainError
from .rationals import format_fraction, parse_fraction

GRID_BITS = 20
TIE_BITS = 40
MAX_HORIZON = 1 << 36


@dataclass
class NormalizingSequence:
    """Memoized access to a_n for a tagged family on a declared horizon."""

    family: str
    horizon: int
    params: Dict[str, str] = field(default_factory=dict)
    explicit: Optional[Tuple[Fraction, ...]] = None
    _memo: Dict[int, Fraction] = field(default_factory=dict, repr=False)
    adjusted: bool = field(default=False, repr=False)

    def __post_init__(self):
        if not (1 <= self.horizon <= MAX_HORIZON):
            raise DomainError(f"horizon must lie in [1, {MAX_HORIZON}]")

    def value(self, n: int) -> Fraction:
        if not (1 <= n <= self.horizon):
            raise DomainError(f"n={n} outside sequence horizon [1, {self.horizon}]")
        memo = self._memo
        if n in memo:
            return memo[n]
        a = self._raw(n)
        if n > 1:
            prev = self._raw(n - 1)
            if a <= prev:
                # grid collision; documented adjustment
                a = prev + Fraction(1, 1 << TIE_BITS)
                object.__setattr__(self, "adjusted", True)
        memo[n] = a
        return a

    def _raw(self, n: int) -> Fraction:
        if self.family == "sqrt":
            return Fraction(isqrt(n << (2 * GRID_BITS)), 1 << GRID_BITS)
        if self.family == "pow34":
            return Fraction(isqrt(isqrt(n**3 << (4 * GRID_BITS))), 1 << GRID_BITS)
        if self.family == "explicit":
            return self.explicit[n - 1]
        raise DomainError(f"unknown sequence family {self.family!r}")

    def minimal_n_with_value_above(self, threshold: Fraction) -> int:
        """Smallest n on the horizon with a_n > threshold."""
        lo, hi = 1, self.horizon
        if self.value(hi) <= threshold:
            raise DomainError(
                f"a_n never exceeds {threshold} on horizon {self.horizon}"
            )
        while lo < hi:
            mid = (lo + hi) // 2
            if self.value(mid) > threshold:
                hi = mid
            else:
                lo = mid + 1
        return lo

    def to_json(self):
        data = {"family": self.family, "horizon": self.horizon}
        if self.params:
            data["params"] = dict(self.params)
        if self.explicit is not None:
            data["values"] = [format_fraction(v) for v in self.explicit]
        return data

    @staticmethod
    def from_json(data) -> "NormalizingSequence":
        family = data["family"]
        horizon = int(data["horizon"])
        if family == "explicit":
            values = tuple(parse_fraction(v) for v in data["values"])
            return explicit_sequence(values)
        return make_sequence(family, horizon)


def make_sequence(family: str, horizon: int = 1 << 30) -> NormalizingSequence:
    if family not in ("sqrt", "pow34"):
        raise DomainError(f"unknown sequence family {family!r}")
    return NormalizingSequence(family=family, horizon=horizon)


def sqrt_sequence(horizon: int = 1 << 30) -> NormalizingSequence:
    return make_sequence("sqrt", horizon)


def pow34_sequence(horizon: int = 1 << 30) -> NormalizingSequence:
    return make_sequence("pow34", horizon)


def explicit_sequence(values) -> NormalizingSequence:
    values = tuple(Fraction(v) for v in values)
    if not values:
        raise DomainError("explicit sequence needs at least one value")
    for i in range(1, len(values)):
        if values[i] <= values[i - 1]:
            raise DomainError("explicit sequence must be strictly increasing")
    if values[0] <= 0:
        raise DomainError("sequence values must be positive")
    return NormalizingSequence(
        family="explicit", horizon=len(values), explicit=values
    )
