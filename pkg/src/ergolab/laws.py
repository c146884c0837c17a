"""Exact laws of normalized, centered Birkhoff sums of indicators.

exact_law computes the distribution of (S_n(1_B) - n*mu(B)) / a_n under
Lebesgue measure as a DiscreteMeasure, never by sampling. Two engines:

* a breakpoint sweep over the preimages T^-i(B) for general sets at small
  n * |B|;
* cyclic level arithmetic for dyadic sets at any scale. A union of grid
  cells has S_n constant on tower levels, and mixed-scale unions (a coarse
  set joined with a fine one) split into per-scale groups whose counts add;
  the joint distribution is recovered by sweeping the finest group's pieces
  against residue histograms of the combined coarser function.

The law always has mean exactly 0 because the counting function integrates
to n*mu(B).
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .errors import CapacityError, DomainError
from .intervals import IntervalSet
from .measures import DiscreteMeasure, levy_le
from .odometer import grouped_cells, odometer_image
from .sequences import NormalizingSequence
from .systems import LevelPartition, birkhoff_partition, cyclic_window_counts

ZERO = Fraction(0)
ONE = Fraction(1)

SWEEP_EVENT_CAP = 1 << 21
LIFT_PIECE_CAP = 1 << 21


@dataclass(frozen=True)
class LawReport:
    """The computed law plus the inputs that produced it."""

    law: DiscreteMeasure
    n: int
    a_n: Fraction
    mu_B: Fraction
    cells: Optional[LevelPartition] = None

    def to_json(self, include_cells: bool = False):
        data = {
            "law": self.law.to_json(),
            "n": self.n,
            "a_n": f"{self.a_n.numerator}/{self.a_n.denominator}",
            "mu_B": f"{self.mu_B.numerator}/{self.mu_B.denominator}",
            "cells_included": bool(include_cells and self.cells is not None),
        }
        if include_cells and self.cells is not None:
            data["cells"] = self.cells.to_json()
        return data


def count_distribution(b: IntervalSet, n: int) -> Dict[int, Fraction]:
    """Exact distribution of S_n(1_b): count value -> measure."""
    if n < 1:
        raise DomainError("n must be >= 1")
    if b.is_empty():
        return {0: ONE}
    groups = grouped_cells(b)
    if groups is not None:
        return _counts_from_groups(groups, n)
    return _counts_by_sweep(b, n)


def exact_law(
    b: IntervalSet, n: int, seq: NormalizingSequence, with_cells: bool = False
) -> LawReport:
    """Law of (S_n(1_b) - n*mu(b)) / a_n, computed from one exact partition."""
    if n < 1:
        raise DomainError("n must be >= 1")
    if n > seq.horizon:
        raise DomainError(f"n={n} beyond sequence horizon {seq.horizon}")
    a_n = seq.value(n)
    mu_b = b.measure()
    counts = count_distribution(b, n)
    center = n * mu_b
    atoms = [((k - center) / a_n, mass) for k, mass in sorted(counts.items())]
    law = DiscreteMeasure(tuple(atoms))
    if law.mean() != 0:
        raise AssertionError("law mean must vanish exactly")
    cells = birkhoff_partition(b, n) if with_cells else None
    return LawReport(law=law, n=n, a_n=a_n, mu_B=mu_b, cells=cells)


def verify_law_bound(
    b: IntervalSet, n: int, seq: NormalizingSequence, target: DiscreteMeasure, eps
) -> bool:
    """Membership predicate: d(law(b, n), target) <= eps, decided exactly."""
    return levy_le(exact_law(b, n, seq).law, target, eps)


# -- engines --------------------------------------------------------------------


def _counts_by_sweep(b: IntervalSet, n: int) -> Dict[int, Fraction]:
    events: List[Tuple[Fraction, int]] = []
    w = b
    total = 0
    for i in range(n):
        if i:
            w = odometer_image(w, -1)
        total += w.interval_count()
        if total > SWEEP_EVENT_CAP:
            raise CapacityError(
                "exact law sweep exceeds the event cap for a non-dyadic set",
                required=total,
            )
        for lo, hi in w.intervals:
            events.append((lo, 1))
            events.append((hi, -1))
    events.append((ZERO, 0))
    events.append((ONE, 0))
    events.sort()
    out: Dict[int, Fraction] = {}
    depth = 0
    prev = ZERO
    for pos, delta in events:
        if pos > prev:
            out[depth] = out.get(depth, ZERO) + (pos - prev)
            prev = pos
        depth += delta
    return out


def _counts_from_groups(groups: Dict[int, List[int]], n: int) -> Dict[int, Fraction]:
    """Joint count distribution for per-scale cell groups (counts add)."""
    constant = 0
    varying: List[Tuple[int, List[Tuple[int, int, int]]]] = []
    for k in sorted(groups):
        pieces = cyclic_window_counts(1 << k, groups[k], n)
        if len(pieces) == 1:
            constant += pieces[0][2]
        else:
            varying.append((k, pieces))
    if not varying:
        return {constant: ONE}
    if len(varying) == 1:
        k, pieces = varying[0]
        size = 1 << k
        levels: Dict[int, int] = {}
        for start, stop, val in pieces:
            levels[val] = levels.get(val, 0) + (stop - start)
        return {
            constant + val: Fraction(cnt, size) for val, cnt in levels.items()
        }
    # finest group swept against the combined coarser function
    fine_k, fine_pieces = varying[-1]
    coarse = _combine_coarse(varying[:-1])
    hist = _join_fine_coarse(fine_k, fine_pieces, coarse)
    return {
        constant + val: Fraction(cnt, 1 << fine_k) for val, cnt in hist.items()
    }


class _PiecewiseCyclic:
    """Integer step function on Z_{2^k} with residue-range histograms."""

    def __init__(self, k: int, pieces: List[Tuple[int, int, int]]):
        self.size = 1 << k
        self.pieces = pieces
        self.starts = [p[0] for p in pieces]
        self.full_hist: Dict[int, int] = {}
        for start, stop, val in pieces:
            self.full_hist[val] = self.full_hist.get(val, 0) + (stop - start)

    def hist_range(self, a: int, length: int) -> Dict[int, int]:
        """Histogram of values over the cyclic residue range [a, a+length)."""
        out: Dict[int, int] = {}
        cycles, rem = divmod(length, self.size)
        if cycles:
            for val, cnt in self.full_hist.items():
                out[val] = out.get(val, 0) + cnt * cycles
        a %= self.size
        spans = [(a, min(a + rem, self.size))]
        if a + rem > self.size:
            spans.append((0, a + rem - self.size))
        for lo, hi in spans:
            if lo >= hi:
                continue
            idx = bisect.bisect_right(self.starts, lo) - 1
            while idx < len(self.pieces) and self.pieces[idx][0] < hi:
                start, stop, val = self.pieces[idx]
                overlap = min(stop, hi) - max(start, lo)
                if overlap > 0:
                    out[val] = out.get(val, 0) + overlap
                idx += 1
        return out


def _combine_coarse(groups: List[Tuple[int, List[Tuple[int, int, int]]]]) -> _PiecewiseCyclic:
    """Sum of coarse step functions, lifted to the largest coarse modulus."""
    k_c = max(k for k, _ in groups)
    size = 1 << k_c
    deltas: Dict[int, int] = {}
    base = 0
    lifted_pieces = 0
    for k, pieces in groups:
        reps = 1 << (k_c - k)
        lifted_pieces += len(pieces) * reps
        if lifted_pieces > LIFT_PIECE_CAP:
            raise CapacityError(
                "coarse-group lift exceeds the piece cap", required=lifted_pieces
            )
        span = 1 << k
        base += pieces[0][2]
        prev_val = pieces[-1][2]
        for start, stop, val in pieces:
            jump = val - prev_val
            if jump:
                for rep in range(reps):
                    p = start + rep * span
                    deltas[p] = deltas.get(p, 0) + jump
            prev_val = val
    bps = sorted(set(deltas) | {0})
    pieces_out: List[Tuple[int, int, int]] = []
    val = base
    for idx, p in enumerate(bps):
        if p != 0:
            val += deltas.get(p, 0)
        stop = bps[idx + 1] if idx + 1 < len(bps) else size
        if p < stop:
            pieces_out.append((p, stop, val))
    return _PiecewiseCyclic(k_c, pieces_out)


def _join_fine_coarse(
    fine_k: int,
    fine_pieces: List[Tuple[int, int, int]],
    coarse: _PiecewiseCyclic,
) -> Dict[int, int]:
    """Histogram of fine(l) + coarse(l mod m) over all fine levels l."""
    out: Dict[int, int] = {}
    for start, stop, fine_val in fine_pieces:
        sub = coarse.hist_range(start % coarse.size, stop - start)
        for coarse_val, cnt in sub.items():
            key = fine_val + coarse_val
            out[key] = out.get(key, 0) + cnt
    return out
