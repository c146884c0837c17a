"""Set constructions realizing prescribed limit laws, with exact certificates.

Four builders:

* approximate_on_disjoint: a set B disjoint from A, of measure at most eps,
  whose normalized centered Birkhoff law at a chosen time n sits within eps
  of a prescribed zero-mean target, in the exact Lévy corridor sense.
* flatten_at: a set C near A (symmetric difference at most eps, measure
  preserved exactly) whose law at some time n >= N is within eps of the
  point mass at 0.
* flatten_subsequence: iterated flattening with the budget recursion
  eps_k = eps_{k-1} / (2 n_{k-1}), returning a ledger of exactly certified
  flat times for the final set.
* realize_targets: the capstone pipeline, alternating flattening with
  disjoint approximation so one set carries several target laws at several
  times, all certified exactly on the final set.

Every certificate claim is re-verified from scratch through the evaluator
and measure modules before the certificate is returned; a certificate with
a false claim is never returned.

Scope note: builders accept sets in the dyadic algebra (finite unions of
dyadic-rational intervals). That subalgebra is dense for the symmetric-
difference pseudo-metric, every construction stays inside it (tower bases
are trimmed so quantile cuts land on cell boundaries), and it is what makes
certificates exactly checkable at scale.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import CapacityError, ConstructionError, DomainError
from .intervals import IntervalSet
from .laws import exact_law
from .measures import (
    DIRAC_ZERO,
    DiscreteMeasure,
    center_on_lattice,
    levy_le,
    scale,
    truncation_radius,
)
from .odometer import bit_reverse, cells_to_intervalset, dyadic_cells, dyadic_exponent
from .rationals import format_fraction
from .sequences import NormalizingSequence
from .systems import cyclic_window_counts, tower_parameters

ZERO = Fraction(0)
ONE = Fraction(1)

DEFAULT_CAP = 1 << 25
MAX_ALPHA_RETRIES = 8
MAX_TIME_CANDIDATES = 512
CELL_CAP = 1 << 22


@dataclass(frozen=True)
class VerifiedClaim:
    claim_id: str
    holds: bool
    quantities: Dict[str, str]

    def to_json(self):
        return {
            "id": self.claim_id,
            "holds": self.holds,
            "quantities": dict(self.quantities),
        }

    @staticmethod
    def from_json(data) -> "VerifiedClaim":
        return VerifiedClaim(
            claim_id=data["id"],
            holds=bool(data["holds"]),
            quantities={k: str(v) for k, v in data["quantities"].items()},
        )


@dataclass(frozen=True)
class ConstructionCertificate:
    """Inputs, chosen parameters, the output set, and exact verified claims."""

    kind: str
    inputs: Dict[str, object]
    parameters: Dict[str, object]
    output_set: IntervalSet
    verified: Tuple[VerifiedClaim, ...]
    intermediates: Dict[str, object] = field(default_factory=dict)

    def claim(self, claim_id: str) -> VerifiedClaim:
        for c in self.verified:
            if c.claim_id == claim_id:
                return c
        raise KeyError(claim_id)


@dataclass(frozen=True)
class FlattenStep:
    k: int
    eps_k: Fraction
    n_k: int
    theta_step: Fraction


@dataclass(frozen=True)
class FlattenLedger:
    """Budget recursion rows plus the final set and its exact flat times."""

    steps: Tuple[FlattenStep, ...]
    final_set: IntervalSet
    eps: Fraction
    verified: Tuple[VerifiedClaim, ...]


class _Attempt(Exception):
    """Internal: this parameter choice failed; try the next one."""


def _claim(claim_id: str, holds: bool, **quantities) -> VerifiedClaim:
    rendered = {}
    for key, value in quantities.items():
        if isinstance(value, Fraction):
            rendered[key] = format_fraction(value)
        else:
            rendered[key] = str(value)
    return VerifiedClaim(claim_id=claim_id, holds=bool(holds), quantities=rendered)


def _require_all(claims: Sequence[VerifiedClaim]):
    bad = [c.claim_id for c in claims if not c.holds]
    if bad:
        raise _Attempt(f"claims failed: {', '.join(bad)}")


def _dyadic_cells_or_fail(a: IntervalSet, what: str):
    cells = dyadic_cells(a, max_cells=CELL_CAP)
    if cells is None:
        raise DomainError(
            f"{what} must be a union of dyadic-rational intervals "
            "(constructions operate in the dyadic algebra)"
        )
    return cells


def _mass_denominator_lcm(eta: DiscreteMeasure) -> int:
    den = 1
    for _, m in eta.atoms:
        g = _gcd(den, m.denominator)
        den = den // g * m.denominator
    return den


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


def _ceil_frac(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


def _floor_frac(x: Fraction) -> int:
    return x.numerator // x.denominator


# -- time candidates -----------------------------------------------------------


def _nice_times(seq: NormalizingSequence, n_min: int, n_cap: int, align: int):
    """Ascending times with exactly rational-friendly a_n, align-divisible.

    sqrt: perfect squares (integer a_n); pow34: fourth powers. Explicit
    sequences yield every align-multiple on their horizon.
    """
    n_min = max(1, n_min)
    if seq.family == "sqrt":
        t = align.bit_length() - 1
        base = 1 << ((t + 1) // 2)
        m = _ceil_div(isqrt(max(n_min - 1, 0)) + 1, base) * base
        while m * m <= n_cap:
            yield m * m
            m += base
    elif seq.family == "pow34":
        t = align.bit_length() - 1
        base = 1 << ((t + 3) // 4)
        m = base
        while m**4 < n_min:
            m += base
        while m**4 <= n_cap:
            yield m**4
            m += base
    else:
        n = _ceil_div(n_min, align) * align
        top = min(n_cap, seq.horizon)
        while n <= top:
            yield n
            n += align


# -- disjoint approximation ------------------------------------------------------


def approximate_on_disjoint(
    a: IntervalSet,
    nu: DiscreteMeasure,
    eps,
    seq: NormalizingSequence,
    n_cap: int = DEFAULT_CAP,
    fixed_n: Optional[int] = None,
    measure_cap=None,
    min_n: int = 1,
    align: int = 1,
) -> ConstructionCertificate:
    """A set B with B ∩ a = ∅, mu(B) <= eps and d(law(B, n), nu) <= eps.

    Builds a height-n tower, keeps base cells where the window-length
    Birkhoff average of a stays below mu(a) + alpha, splits the base by the
    lattice-centered version of nu, and places for each base cell the first
    g points of its window orbit that avoid a. All three claims are then
    re-verified exactly.
    """
    eps = Fraction(eps)
    if eps <= 0:
        raise DomainError("eps must be positive")
    mu_a = a.measure()
    if mu_a >= 1:
        raise DomainError("mu(a) must be < 1")
    if nu.mean() != 0:
        raise DomainError("target law must have mean exactly 0")
    measure_cap = eps if measure_cap is None else min(eps, Fraction(measure_cap))

    if nu == DIRAC_ZERO:
        return _trivial_approximate(a, nu, eps, seq, fixed_n, align, n_cap)

    k_a, cells_a = _dyadic_cells_or_fail(a, "the avoided set")
    alpha = min(eps / 5, (1 - mu_a) / 4)
    last_error = "no admissible time found"
    for _ in range(MAX_ALPHA_RETRIES):
        try:
            return _approximate_attempt(
                a, nu, eps, seq, n_cap, alpha, k_a, cells_a,
                fixed_n, measure_cap, min_n, align,
            )
        except _Attempt as exc:
            last_error = str(exc)
            alpha = alpha / 2
    raise ConstructionError(
        f"disjoint approximation failed after {MAX_ALPHA_RETRIES} retries: {last_error}"
    )


def _trivial_approximate(a, nu, eps, seq, fixed_n, align, n_cap):
    n = fixed_n if fixed_n is not None else align
    if n > min(n_cap, seq.horizon):
        raise CapacityError("time exceeds cap for trivial target", required=n)
    b = IntervalSet.empty()
    claims = _approximate_claims(a, b, nu, eps, n, seq, d=0, mu_f=ZERO)
    _require_all(claims)
    return ConstructionCertificate(
        kind="approximate",
        inputs={
            "A": a.to_json(),
            "nu": nu.to_json(),
            "eps": format_fraction(eps),
            "seq": seq.to_json(),
            "n_cap": n_cap,
        },
        parameters={"n": n, "d": 0, "k": 0, "cells_F": 0, "trivial": True},
        output_set=b,
        verified=tuple(claims),
    )


def _approximate_attempt(
    a, nu, eps, seq, n_cap, alpha, k_a, cells_a,
    fixed_n, measure_cap, min_n, align,
):
    c_radius = truncation_radius(nu, alpha / 6)
    gamma = alpha / (c_radius + 1)
    size_a = 1 << k_a
    non_a_residues = _complement_residues(size_a, cells_a)
    if not non_a_residues:
        raise _Attempt("avoided set covers the whole grid")

    if fixed_n is not None:
        candidates = [fixed_n]
    else:
        candidates = []
        for n in _nice_times(seq, min_n, min(n_cap, seq.horizon), align):
            candidates.append(n)
            if len(candidates) >= MAX_TIME_CANDIDATES:
                break
    reason = "no candidate time admissible"
    for n in candidates:
        try:
            return _approximate_at_time(
                a, nu, eps, seq, alpha, gamma, c_radius,
                k_a, cells_a, non_a_residues, n, measure_cap, n_cap,
            )
        except _Attempt as exc:
            reason = f"n={n}: {exc}"
    raise _Attempt(reason)


def _complement_residues(size: int, cells: List[int]) -> List[int]:
    cell_set = set(cells)
    return [r for r in range(size) if r not in cell_set]


def _approximate_at_time(
    a, nu, eps, seq, alpha, gamma, c_radius,
    k_a, cells_a, non_a_residues, n, measure_cap, n_cap,
):
    if n > min(n_cap, seq.horizon):
        raise _Attempt(f"time {n} beyond cap/horizon")
    a_n = seq.value(n)
    d_cap = _floor_frac(a_n * c_radius)
    if d_cap < 1:
        raise _Attempt("a_n * C below 1; scale too small")
    d = d_cap + 1
    eta, _prov = center_on_lattice(nu, c_radius, a_n)
    if not levy_le(scale(eta, a_n), nu, alpha):
        raise _Attempt("lattice law misses the alpha corridor")
    den = _mass_denominator_lcm(eta)
    g_values = {v: int(v) + d for v, _ in eta.atoms}
    g_max = max(g_values.values())
    if min(g_values.values()) < 1:
        raise _Attempt("shifted level function not positive")

    k0, _ = tower_parameters(n, gamma)
    k0 = max(k0, k_a)
    outcome = None
    reason = "base trim infeasible"
    for k in range(k0, k0 + 3):  # enlarge if the trim or E-loss bites too hard
        size = 1 << k
        q = size // n
        if q < 1:
            reason = "tower too short"
            continue
        found = _base_and_window(
            a, alpha, gamma, k, size, q, n, k_a, cells_a,
            non_a_residues, den, g_max,
        )
        if found is None:
            continue
        cells_f, window, i0, mu_e = found
        count_f = len(cells_f)
        mu_f = Fraction(count_f, size)
        if n * mu_f < 1 - gamma:
            reason = "base measure below (1 - gamma)/n"
            continue
        if (n - window) * mu_f < 1 - 3 * alpha:
            reason = "verification region below 1 - 3*alpha"
            continue
        outcome = (k, size, q, cells_f, window, i0, mu_e, count_f, mu_f)
        break
    if outcome is None:
        raise _Attempt(reason)
    k, size, q, cells_f, window, i0, mu_e, count_f, mu_f = outcome
    mu_b = d * mu_f
    if mu_b > measure_cap:
        raise _Attempt(f"mu(B) = {mu_b} exceeds cap {measure_cap}")

    assignments = _quantile_assign(cells_f, eta, k)
    b_cells: List[int] = []
    for v, levels in assignments.items():
        g = g_values[v]
        for level in levels:
            offsets = _first_clear_offsets(
                level, g, window, k_a, non_a_residues, size_a=1 << k_a
            )
            if offsets is None:
                raise _Attempt("window too short for the level target")
            b_cells.extend((level + j) % size for j in offsets)
    if len(b_cells) != len(set(b_cells)):
        raise AssertionError("orbit points collided across columns")
    if len(b_cells) != d * count_f:
        raise AssertionError("mean-zero cell count identity failed")
    b = cells_to_intervalset(k, b_cells)

    claims = _approximate_claims(a, b, nu, eps, n, seq, d=d, mu_f=mu_f)
    _require_all(claims)
    parameters = {
        "n": n,
        "k": k,
        "q": q,
        "i0": i0,
        "window": window,
        "d": d,
        "cells_F": count_f,
        "alpha": format_fraction(alpha),
        "C": format_fraction(c_radius),
        "gamma": format_fraction(gamma),
        "mu_E": format_fraction(mu_e),
        "eta": eta.to_json(),
        "assignments": {
            format_fraction(v): levels for v, levels in assignments.items()
        },
    }
    return ConstructionCertificate(
        kind="approximate",
        inputs={
            "A": a.to_json(),
            "nu": nu.to_json(),
            "eps": format_fraction(eps),
            "seq": seq.to_json(),
            "n_cap": n_cap,
        },
        parameters=parameters,
        output_set=b,
        verified=tuple(claims),
    )


def _base_and_window(
    a, alpha, gamma, k, size, q, n, k_a, cells_a, non_a_residues, den, g_max
):
    """Pick the window, the base column shift i0 and the trimmed base cells.

    Returns (cells_f, window, i0, mu_E) or None when the denominator trim
    cannot keep enough cells at this tower size.
    """
    size_a = 1 << k_a
    density = Fraction(len(non_a_residues), size_a) - alpha
    if density <= 0:
        raise _Attempt("avoided set too dense for the window")
    window0 = _ceil_frac(Fraction(g_max) / density)
    window0 = _ceil_div(window0, size_a) * size_a
    mu_a = a.measure()
    for window in (window0, 2 * window0, 4 * window0):
        if window >= n:
            raise _Attempt("window at least as long as the tower")
        pieces = cyclic_window_counts(size_a, cells_a, window)
        threshold = window * (mu_a + alpha)
        good = [(s, t) for s, t, cnt in pieces if cnt <= threshold]
        mu_e = Fraction(sum(t - s for s, t in good), size_a)
        if mu_e <= 1 - gamma / 2:
            continue
        e_full = mu_e == 1
        starts = [s for s, _ in good]
        stops = [t for _, t in good]

        def in_e(residue: int) -> bool:
            if e_full:
                return True
            idx = bisect.bisect_right(starts, residue) - 1
            return idx >= 0 and residue < stops[idx]

        i0 = 0
        if not e_full:
            best, best_count = 0, -1
            for cand in range(min(n, 8192)):
                cnt = sum(1 for j in range(q) if in_e((j * n + cand) % size_a))
                if cnt > best_count:
                    best, best_count = cand, cnt
                    if cnt == q:
                        break
            i0 = best
        levels = [(j * n + i0) % size for j in range(q) if in_e((j * n + i0) % size_a)]
        # spatial order so quantile parts are leftmost-first; trim the tail
        levels.sort(key=lambda l: bit_reverse(l, k))
        keep = len(levels) - (len(levels) % den)
        if keep < den:
            return None
        return levels[:keep], window, i0, mu_e
    raise _Attempt("no window satisfied the sublevel measure bound")


def _quantile_assign(cells_f: List[int], eta: DiscreteMeasure, k: int):
    """Split spatially ordered base cells by the masses of eta, exactly."""
    count = len(cells_f)
    assignments: Dict[Fraction, List[int]] = {}
    pos = 0
    for v, m in eta.atoms:
        take_frac = m * count
        take = int(take_frac)
        if take != take_frac:
            raise AssertionError("trim failed to align quantile cut")
        assignments[v] = cells_f[pos : pos + take]
        pos += take
    if pos != count:
        raise AssertionError("quantile assignment did not exhaust the base")
    return assignments


def _first_clear_offsets(level, g, window, k_a, non_a_residues, size_a):
    """First g offsets j < window with the orbit cell outside the avoided set."""
    r0 = level % size_a
    idx = bisect.bisect_left(non_a_residues, r0)
    cycle = [r - r0 for r in non_a_residues[idx:]]
    cycle += [r + size_a - r0 for r in non_a_residues[:idx]]
    out: List[int] = []
    base = 0
    while len(out) < g:
        for off in cycle:
            j = base + off
            if j >= window:
                return None
            out.append(j)
            if len(out) == g:
                break
        base += size_a
    return out


def _approximate_claims(a, b, nu, eps, n, seq, d, mu_f):
    mu_b = b.measure()
    overlap = b.intersect(a).measure()
    law = exact_law(b, n, seq).law
    return [
        _claim("disjoint", overlap == 0, overlap=overlap),
        _claim(
            "measure",
            mu_b == d * mu_f and mu_b <= eps,
            mu_B=mu_b,
            d=d,
            mu_F=mu_f,
            eps=eps,
        ),
        _claim(
            "law",
            levy_le(law, nu, eps),
            n=n,
            a_n=seq.value(n),
            eps=eps,
        ),
    ]


# -- flattening -------------------------------------------------------------------


def flatten_at(
    a: IntervalSet,
    eps,
    n_min: int,
    seq: NormalizingSequence,
    fixed_n: Optional[int] = None,
) -> ConstructionCertificate:
    """A set C with theta(a, C) <= eps, mu(C) = mu(a) exactly, and a time
    n >= n_min at which the law of C is within eps of the point mass at 0.

    Dyadic block surgery: every length-M sub-orbit of a tall tower is
    retouched so cumulative visit counts track mu(a) within one point, then
    a measure patch on the top level and junk restores mu(a) exactly.
    """
    eps = Fraction(eps)
    if eps <= 0:
        raise DomainError("eps must be positive")
    mu_a = a.measure()
    if mu_a >= 1:
        raise DomainError("mu(a) must be < 1")
    k_a, cells_a = _dyadic_cells_or_fail(a, "the set to flatten")
    alpha = min(eps / 5, (1 - mu_a) / 4)
    last = "no admissible block length"
    for _ in range(MAX_ALPHA_RETRIES):
        try:
            return _flatten_attempt(a, eps, n_min, seq, alpha, k_a, cells_a, fixed_n)
        except _Attempt as exc:
            last = str(exc)
            alpha = alpha / 2
    raise ConstructionError(f"flatten failed after retries: {last}")


def _flatten_attempt(a, eps, n_min, seq, alpha, k_a, cells_a, fixed_n):
    mu_a = a.measure()
    size_a = 1 << k_a
    block = None
    for m_exp in range(0, 22):
        m = 1 << m_exp
        pieces = cyclic_window_counts(size_a, cells_a, m)
        good = sum(t - s for s, t, cnt in pieces if abs(cnt - m * mu_a) <= m * alpha)
        if Fraction(good, size_a) > 1 - alpha:
            block = m
            break
    if block is None:
        raise _Attempt("no dyadic block length concentrates the averages")

    if fixed_n is not None:
        times = [fixed_n]
    else:
        first = _ceil_div(max(n_min, 1), size_a) * size_a
        guided = seq.minimal_n_with_value_above(Fraction(2 * block + 3, 1) / eps)
        guided = max(first, _ceil_div(guided, size_a) * size_a)
        times = sorted({first, guided, 2 * guided, 4 * guided})
    reason = "no admissible time"
    for n in times:
        if n > seq.horizon:
            continue
        try:
            return _flatten_at_time(a, eps, n, seq, alpha, block, k_a, cells_a, n_min)
        except _Attempt as exc:
            reason = f"n={n}: {exc}"
    raise _Attempt(reason)


def _flatten_at_time(a, eps, n, seq, alpha, block, k_a, cells_a, n_min):
    if n < max(n_min, 1):
        raise _Attempt("time below the requested minimum")
    mu_a = a.measure()
    size_a = 1 << k_a
    cell_set = set(cells_a)
    height = block * n
    k_t, q_t = tower_parameters(height, alpha)
    k_t = max(k_t, k_a)
    size = 1 << k_t
    q_t = size // height
    if q_t < 1:
        raise _Attempt("tower too short for the block height")

    g_pieces = cyclic_window_counts(size_a, cells_a, block)
    bad_res = {
        r
        for s, t, cnt in g_pieces
        if abs(cnt - block * mu_a) > block * alpha
        for r in range(s, t)
    }
    # block phase: fewest base cells falling outside the concentration set
    k0, k0_misses = 0, None
    for cand in range(block):
        misses = sum(
            1
            for j in range(q_t)
            for i in range(n)
            if ((j * height + i * block + cand) % size_a) in bad_res
        )
        if k0_misses is None or misses < k0_misses:
            k0, k0_misses = cand, misses
        if misses == 0:
            break

    toggles: List[int] = []
    blocks_per_column = n if k0 == 0 else n - 1
    for j in range(q_t):
        base_level = j * height + k0
        cum_exact = ZERO
        for b_idx in range(blocks_per_column):
            start = base_level + b_idx * block
            in_a = [
                ((start + t) % size) % size_a in cell_set for t in range(block)
            ]
            count = sum(in_a)
            lo = max(
                _ceil_frac(block * mu_a - 1),
                _ceil_frac((b_idx + 1) * block * mu_a - 1 - cum_exact),
                0,
            )
            hi = min(
                _floor_frac(block * mu_a + 1),
                _floor_frac((b_idx + 1) * block * mu_a + 1 - cum_exact),
                block,
            )
            if lo > hi:
                raise _Attempt("cumulative block window emptied")
            target = min(max(count, lo), hi)
            if target < count:
                drop = count - target
                for t in range(block):
                    if drop == 0:
                        break
                    if in_a[t]:
                        toggles.append((start + t) % size)
                        drop -= 1
            elif target > count:
                add = target - count
                for t in range(block):
                    if add == 0:
                        break
                    if not in_a[t]:
                        toggles.append((start + t) % size)
                        add -= 1
            cum_exact += target

    c_set = a.symdiff(cells_to_intervalset(k_t, toggles)) if toggles else a
    c_set = _exact_measure_patch(a, c_set, k_t, size, q_t, height, k0)

    claims = _flatten_claims(a, c_set, eps, n, seq)
    _require_all(claims)
    parameters = {
        "n": n,
        "M": block,
        "k": k_t,
        "q": q_t,
        "k0": k0,
        "alpha": format_fraction(alpha),
        "toggled_cells": len(toggles),
    }
    return ConstructionCertificate(
        kind="flatten",
        inputs={
            "A": a.to_json(),
            "eps": format_fraction(eps),
            "N": n_min,
            "seq": seq.to_json(),
        },
        parameters=parameters,
        output_set=c_set,
        verified=tuple(claims),
    )


def _exact_measure_patch(a, c_set, k_t, size, q_t, height, k0):
    """Restore mu(C) = mu(A) exactly using the top level and the junk."""
    delta = a.measure() - c_set.measure()
    if delta == 0:
        return c_set
    top_levels = [(j * height + k0 + height - 1) % size for j in range(q_t)]
    junk_levels = list(range(q_t * height, size))
    region = cells_to_intervalset(k_t, top_levels + junk_levels)
    if delta > 0:
        room = region.minus(c_set)
        if room.measure() < delta:
            raise _Attempt("patch region cannot absorb the measure defect")
        patch, _ = room.split_at_mass(delta)
        return c_set.union(patch)
    room = region.intersect(c_set)
    if room.measure() < -delta:
        raise _Attempt("patch region cannot shed the measure excess")
    patch, _ = room.split_at_mass(-delta)
    return c_set.minus(patch)


def _flatten_claims(a, c_set, eps, n, seq):
    theta = a.theta(c_set)
    law = exact_law(c_set, n, seq).law
    return [
        _claim("theta", theta <= eps, theta=theta, eps=eps),
        _claim(
            "measure_equal",
            c_set.measure() == a.measure(),
            mu_A=a.measure(),
            mu_C=c_set.measure(),
        ),
        _claim(
            "dirac",
            levy_le(law, DIRAC_ZERO, eps),
            n=n,
            a_n=seq.value(n),
            eps=eps,
        ),
    ]


def flatten_subsequence(
    a: IntervalSet, eps, steps: int, seq: NormalizingSequence
) -> FlattenLedger:
    """Iterated flattening with budgets eps_k = eps_{k-1}/(2 n_{k-1}).

    The final set carries, for every step k, an exactly verified flat law at
    time n_k within the full eps.
    """
    eps = Fraction(eps)
    if eps <= 0:
        raise DomainError("eps must be positive")
    if steps < 1:
        raise DomainError("need at least one step")
    if a.measure() >= 1:
        raise DomainError("mu(a) must be < 1")
    rows: List[FlattenStep] = []
    current = a
    eps_k = eps / 2
    n_prev = 0
    for k in range(1, steps + 1):
        cert = flatten_at(current, eps_k, n_prev + 1, seq)
        n_k = int(cert.parameters["n"])
        rows.append(
            FlattenStep(
                k=k,
                eps_k=eps_k,
                n_k=n_k,
                theta_step=current.theta(cert.output_set),
            )
        )
        current = cert.output_set
        n_prev = n_k
        eps_k = eps_k / (2 * n_k)
    final_set = current

    claims = _ledger_claims(rows, final_set, eps, seq)
    bad = [c.claim_id for c in claims if not c.holds]
    if bad:
        raise ConstructionError(f"flatten ledger claims failed: {', '.join(bad)}")
    return FlattenLedger(
        steps=tuple(rows), final_set=final_set, eps=eps, verified=tuple(claims)
    )


def _ledger_claims(rows, final_set, eps, seq):
    claims = []
    recursion_ok = rows[0].eps_k == eps / 2
    for prev, cur in zip(rows, rows[1:]):
        recursion_ok = recursion_ok and cur.eps_k == prev.eps_k / (2 * prev.n_k)
    claims.append(_claim("recursion", recursion_ok, eps=eps))
    total = sum((r.eps_k for r in rows), ZERO)
    claims.append(_claim("budget_sum", total <= eps, total=total, eps=eps))
    for r in rows:
        law = exact_law(final_set, r.n_k, seq).law
        claims.append(
            _claim(
                f"flat_at_{r.k}",
                levy_le(law, DIRAC_ZERO, eps),
                n=r.n_k,
                eps=eps,
            )
        )
    return claims


# -- capstone ----------------------------------------------------------------------


def realize_targets(
    a0: IntervalSet,
    targets: Sequence[Tuple[DiscreteMeasure, Fraction]],
    seq: NormalizingSequence,
    n_cap: int = DEFAULT_CAP,
) -> ConstructionCertificate:
    """One set realizing each target law at its own time, certified exactly.

    Per target: flatten the current set along the next time (grid-aligned
    times make the current set's law exactly flat, so the flattening is a
    verified no-op), then adjoin a disjoint small set realizing the target
    there. Later steps run under measure budgets that keep every earlier
    certified bound intact; all bounds are finally re-verified on the
    finished set.
    """
    if a0.measure() >= 1:
        raise DomainError("mu(a0) must be < 1")
    for nu, _ in targets:
        if nu.mean() != 0:
            raise DomainError("every target law must have mean exactly 0")
    targets = [(nu, Fraction(e)) for nu, e in targets]

    current = a0
    stages = []  # (n_j, eps_j, law_budget, set after step j)
    step_params = []
    for j, (nu_j, eps_j) in enumerate(targets, start=1):
        if eps_j <= 0:
            raise DomainError("target eps must be positive")
        law_budget = eps_j / 2
        caps = [eps_j / 2]
        for j_prev, (n_prev, eps_prev, _, _) in enumerate(stages, start=1):
            caps.append(eps_prev / (Fraction(1 << (1 + j - j_prev)) * n_prev))
        measure_cap = min(caps)
        k_cur = dyadic_exponent(current)
        if k_cur is None:
            raise DomainError("current set left the dyadic algebra")
        align = 1 << k_cur
        n_min = stages[-1][0] + 1 if stages else 1
        cert_b = None
        flat_claim = None
        for n_j in _nice_times(seq, n_min, min(n_cap, seq.horizon), align):
            flat_law = exact_law(current, n_j, seq).law
            if not levy_le(flat_law, DIRAC_ZERO, law_budget):
                continue
            try:
                cert_b = approximate_on_disjoint(
                    current, nu_j, law_budget, seq, n_cap,
                    fixed_n=n_j, measure_cap=measure_cap,
                )
            except (ConstructionError, _Attempt):
                continue
            flat_claim = _claim(
                f"flat_{j}",
                True,
                n=n_j,
                budget=law_budget,
            )
            break
        if cert_b is None:
            raise CapacityError(
                f"target {j} infeasible within cap {n_cap}: no admissible "
                f"aligned time (measure budget {measure_cap})",
                required=None,
            )
        n_j = int(cert_b.parameters["n"])
        current = current.union(cert_b.output_set)
        stages.append((n_j, eps_j, law_budget, current))
        step_params.append(
            {
                "j": j,
                "n": n_j,
                "eps": format_fraction(eps_j),
                "law_budget": format_fraction(law_budget),
                "measure_cap": format_fraction(measure_cap),
                "mu_B": format_fraction(cert_b.output_set.measure()),
                "flat": flat_claim.to_json(),
            }
        )

    final_set = current
    claims = _targets_claims(final_set, targets, stages, seq)
    bad = [c.claim_id for c in claims if not c.holds]
    if bad:
        raise ConstructionError(f"capstone claims failed: {', '.join(bad)}")
    intermediates = {
        f"after_{j}": s.to_json() for j, (_, _, _, s) in enumerate(stages, start=1)
    }
    return ConstructionCertificate(
        kind="targets",
        inputs={
            "A0": a0.to_json(),
            "targets": [
                {"nu": nu.to_json(), "eps": format_fraction(e)} for nu, e in targets
            ],
            "seq": seq.to_json(),
            "n_cap": n_cap,
        },
        parameters={"steps": step_params},
        output_set=final_set,
        verified=tuple(claims),
        intermediates=intermediates,
    )


def _targets_claims(final_set, targets, stages, seq):
    claims = []
    for j, ((nu_j, eps_j), (n_j, _, law_budget, after_j)) in enumerate(
        zip(targets, stages), start=1
    ):
        law = exact_law(final_set, n_j, seq).law
        claims.append(
            _claim(
                f"law_{j}",
                levy_le(law, nu_j, eps_j),
                n=n_j,
                eps=eps_j,
            )
        )
        theta_future = after_j.theta(final_set)
        claims.append(
            _claim(
                f"budget_{j}",
                law_budget + n_j * theta_future <= eps_j,
                law_budget=law_budget,
                n=n_j,
                theta_future=theta_future,
                eps=eps_j,
            )
        )
    return claims


# -- independent re-verification -----------------------------------------------


def recheck_approximate(inputs, parameters, output_set, seq) -> List[VerifiedClaim]:
    a = IntervalSet.from_json(inputs["A"])
    nu = DiscreteMeasure.from_json(inputs["nu"])
    eps = Fraction(inputs["eps"])
    n = int(parameters["n"])
    d = int(parameters["d"])
    if parameters.get("trivial"):
        mu_f = ZERO
    else:
        mu_f = Fraction(int(parameters["cells_F"]), 1 << int(parameters["k"]))
    return _approximate_claims(a, output_set, nu, eps, n, seq, d=d, mu_f=mu_f)


def recheck_flatten(inputs, parameters, output_set, seq) -> List[VerifiedClaim]:
    a = IntervalSet.from_json(inputs["A"])
    eps = Fraction(inputs["eps"])
    n = int(parameters["n"])
    return _flatten_claims(a, output_set, eps, n, seq)


def recheck_targets(inputs, parameters, output_set, intermediates, seq):
    targets = [
        (DiscreteMeasure.from_json(row["nu"]), Fraction(row["eps"]))
        for row in inputs["targets"]
    ]
    stages = []
    for row in parameters["steps"]:
        j = int(row["j"])
        after = IntervalSet.from_json(intermediates[f"after_{j}"])
        stages.append((int(row["n"]), Fraction(row["eps"]), Fraction(row["law_budget"]), after))
    return _targets_claims(output_set, targets, stages, seq)
