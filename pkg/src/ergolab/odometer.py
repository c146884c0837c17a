"""The von Neumann–Kakutani dyadic odometer on [0, 1), exactly.

T translates each band I_k = [1 - 2^(1-k), 1 - 2^(-k)), k >= 1, by
3*2^(-k) - 1. It is invertible and Lebesgue-measure-preserving, maps
rational-endpoint interval sets to rational-endpoint interval sets, and is
ergodic. Images of sets whose right end accumulates at 1 coalesce mod null
into a single interval at 0, so every image is again a finite IntervalSet.

The dyadic structure is what makes large computations exact: T permutes the
2^k cells of the dyadic grid cyclically. Writing level(l) for the cell
T^l([0, 2^-k)), we have T^i(level(l)) = level((l + i) mod 2^k) as sets mod
null, for every integer i. Cells sit at bit-reversed positions:
level(l) = [rev_k(l)/2^k, rev_k(l)/2^k + 2^-k).
"""

from __future__ import annotations

from fractions import Fraction

from .errors import CapacityError, DomainError
from .intervals import IntervalSet, normalize

ONE = Fraction(1)

# Iterating T step-by-step beyond this is refused for non-dyadic sets; the
# dyadic fast path has no such limit.
MAX_STEPWISE = 1 << 14


def _forward_one(intervals):
    """One application of T to a list of (lo, hi) pairs."""
    out = []
    for lo, hi in intervals:
        k = 1
        # skip bands entirely below lo
        while ONE - Fraction(1, 1 << k) <= lo:
            k += 1
        if hi == ONE:
            # partial bands, then the coalesced tail [0, 2^(1-k0))
            while ONE - Fraction(2, 1 << k) < lo:
                band_lo, band_hi = ONE - Fraction(2, 1 << k), ONE - Fraction(1, 1 << k)
                shift = Fraction(3, 1 << k) - 1
                out.append((max(lo, band_lo) + shift, band_hi + shift))
                k += 1
            out.append((Fraction(0), Fraction(2, 1 << k)))
            continue
        while ONE - Fraction(2, 1 << k) < hi:
            band_lo, band_hi = ONE - Fraction(2, 1 << k), ONE - Fraction(1, 1 << k)
            piece_lo, piece_hi = max(lo, band_lo), min(hi, band_hi)
            if piece_lo < piece_hi:
                shift = Fraction(3, 1 << k) - 1
                out.append((piece_lo + shift, piece_hi + shift))
            k += 1
    return out


def _backward_one(intervals):
    """One application of T^(-1): bands [2^-k, 2^(1-k)) shift to I_k."""
    out = []
    for lo, hi in intervals:
        k = 1
        while Fraction(1, 1 << k) >= hi:
            k += 1
        if lo == 0:
            # at most one partial band at the top, then the coalesced tail
            while Fraction(2, 1 << k) > hi:
                shift = 1 - Fraction(3, 1 << k)
                out.append((Fraction(1, 1 << k) + shift, hi + shift))
                k += 1
            out.append((ONE - Fraction(2, 1 << k), ONE))
            continue
        while Fraction(2, 1 << k) > lo:
            band_lo, band_hi = Fraction(1, 1 << k), Fraction(2, 1 << k)
            piece_lo, piece_hi = max(lo, band_lo), min(hi, band_hi)
            if piece_lo < piece_hi:
                shift = 1 - Fraction(3, 1 << k)
                out.append((piece_lo + shift, piece_hi + shift))
            k += 1
    return out


def odometer_image(a: IntervalSet, i: int) -> IntervalSet:
    """The exact set T^i(a) mod null, as a finite IntervalSet.

    For |i| beyond MAX_STEPWISE the set must decompose into dyadic grid
    cells; those move by pure level arithmetic at any power.
    """
    if i == 0 or a.is_empty():
        return a
    cells = dyadic_cells(a)
    if cells is not None:
        k, levels = cells
        mask = (1 << k) - 1
        return cells_to_intervalset(k, [(l + i) & mask for l in levels])
    if abs(i) > MAX_STEPWISE:
        raise CapacityError(
            f"stepwise image of non-dyadic set capped at |i| <= {MAX_STEPWISE}",
            required=abs(i),
        )
    step = _forward_one if i > 0 else _backward_one
    pairs = list(a.intervals)
    for _ in range(abs(i)):
        pairs = step(pairs)
    return normalize(pairs)


# -- dyadic grid helpers ----------------------------------------------------


def bit_reverse(m: int, k: int) -> int:
    """Reverse the low k bits of m."""
    if k == 0:
        return 0
    return int(format(m, f"0{k}b")[::-1], 2)


def level_cell(k: int, level: int) -> tuple[Fraction, Fraction]:
    """Spatial cell of tower level `level` in the height-2^k dyadic tower."""
    pos = bit_reverse(level, k)
    return Fraction(pos, 1 << k), Fraction(pos + 1, 1 << k)


def _pow2_exponent(q: int) -> int | None:
    """k with q == 2^k, else None."""
    if q & (q - 1):
        return None
    return q.bit_length() - 1


def dyadic_exponent(a: IntervalSet) -> int | None:
    """Smallest k such that every endpoint of a is a multiple of 2^-k."""
    k = 0
    for lo, hi in a.intervals:
        for x in (lo, hi):
            e = _pow2_exponent(x.denominator)
            if e is None:
                return None
            k = max(k, e)
    return k


def dyadic_cells(a: IntervalSet, max_cells: int = 1 << 22):
    """Decompose a into grid cells: (k, sorted level list), or None.

    Uses the smallest grid 2^-k aligning all endpoints. Returns None when
    the set is not dyadic or would explode past max_cells.
    """
    k = dyadic_exponent(a)
    if k is None:
        return None
    scale = 1 << k
    total = sum(int((hi - lo) * scale) for lo, hi in a.intervals)
    if total > max_cells:
        return None
    levels = []
    for lo, hi in a.intervals:
        start = int(lo * scale)
        stop = int(hi * scale)
        levels.extend(bit_reverse(m, k) for m in range(start, stop))
    levels.sort()
    return k, levels


def cells_to_intervalset(k: int, levels) -> IntervalSet:
    """IntervalSet from grid-cell level indices (duplicates allowed)."""
    scale = 1 << k
    positions = sorted({bit_reverse(l, k) for l in levels})
    pairs = []
    for pos in positions:
        if pairs and pairs[-1][1] == pos:
            pairs[-1][1] = pos + 1
        else:
            pairs.append([pos, pos + 1])
    return IntervalSet(
        tuple((Fraction(a, scale), Fraction(b, scale)) for a, b in pairs)
    )


def grouped_cells(a: IntervalSet, max_cells_per_group: int = 1 << 22):
    """Decompose a into per-interval natural grids: {k: sorted levels}.

    Each interval is cut into cells of its own endpoint grid, so a union of
    a coarse set and a fine set yields one small group per scale instead of
    a single huge group at the finest scale. Intervals whose endpoints live
    on different grids are pre-split at the coarser grid so the fine part
    stays shorter than one coarse cell. Returns None if any endpoint is
    non-dyadic or a group would exceed the cap.
    """
    pieces = []
    for lo, hi in a.intervals:
        e_lo = _pow2_exponent(lo.denominator)
        e_hi = _pow2_exponent(hi.denominator)
        if e_lo is None or e_hi is None:
            return None
        e_lo, e_hi = max(e_lo, 0), max(e_hi, 0)
        if e_lo < e_hi:
            cut = Fraction(int(hi * (1 << e_lo)), 1 << e_lo)
            if lo < cut < hi:
                pieces.append((lo, cut, e_lo))
                pieces.append((cut, hi, e_hi))
                continue
        elif e_hi < e_lo:
            cut = Fraction(-int(-lo * (1 << e_hi)), 1 << e_hi)
            if lo < cut < hi:
                pieces.append((lo, cut, e_lo))
                pieces.append((cut, hi, e_hi))
                continue
        pieces.append((lo, hi, max(e_lo, e_hi)))
    groups: dict[int, list[int]] = {}
    for lo, hi, k in pieces:
        scale = 1 << k
        start, stop = int(lo * scale), int(hi * scale)
        bucket = groups.setdefault(k, [])
        bucket.extend(bit_reverse(m, k) for m in range(start, stop))
        if len(bucket) > max_cells_per_group:
            return None
    for levels in groups.values():
        levels.sort()
    return groups


class OdometerMap:
    """Facade for the fixed transformation; all methods are pure."""

    def image(self, a: IntervalSet, i: int = 1) -> IntervalSet:
        return odometer_image(a, i)

    def preimage(self, a: IntervalSet, i: int = 1) -> IntervalSet:
        return odometer_image(a, -i)
