"""Finitely supported probability laws on R with exact Lévy-metric machinery.

Only rational-atom, rational-mass measures are first class: every distance
claim we make is of the form d <= eps, which the exact corridor predicate
decides. Continuous targets enter through a quantile discretization helper
whose output is an ordinary zero-mean DiscreteMeasure.

The Lévy distance itself is never produced in closed form; `levy_distance`
returns a certified bracket obtained by bisecting the exact predicate.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from statistics import NormalDist
from typing import Dict, List, Sequence, Tuple

from .errors import CapacityError, ConstructionError, DomainError, ValidationError
from .intervals import IntervalSet
from .rationals import format_fraction, parse_fraction
from .sequences import NormalizingSequence

ZERO = Fraction(0)
ONE = Fraction(1)
HALF = Fraction(1, 2)


@dataclass(frozen=True)
class DiscreteMeasure:
    """Sorted atoms (value, mass), masses positive and summing to exactly 1."""

    atoms: Tuple[Tuple[Fraction, Fraction], ...]

    @cached_property
    def values(self) -> Tuple[Fraction, ...]:
        return tuple(v for v, _ in self.atoms)

    @cached_property
    def _cumulative(self) -> Tuple[Fraction, ...]:
        out = []
        total = ZERO
        for _, m in self.atoms:
            total += m
            out.append(total)
        return tuple(out)

    def mass_at(self, v: Fraction) -> Fraction:
        i = bisect.bisect_left(self.values, v)
        if i < len(self.atoms) and self.atoms[i][0] == v:
            return self.atoms[i][1]
        return ZERO

    def mean(self) -> Fraction:
        return sum((v * m for v, m in self.atoms), ZERO)

    def cdf(self, t: Fraction) -> Fraction:
        """P(X <= t), right-continuous."""
        i = bisect.bisect_right(self.values, t)
        return self._cumulative[i - 1] if i else ZERO

    def cdf_left(self, t: Fraction) -> Fraction:
        """P(X < t), the left limit of the cdf at t."""
        i = bisect.bisect_left(self.values, t)
        return self._cumulative[i - 1] if i else ZERO

    def support_radius(self) -> Fraction:
        return max(abs(self.atoms[0][0]), abs(self.atoms[-1][0]))

    def to_json(self):
        return [
            {"value": format_fraction(v), "mass": format_fraction(m)}
            for v, m in self.atoms
        ]

    @staticmethod
    def from_json(data) -> "DiscreteMeasure":
        return make_measure(
            [(parse_fraction(row["value"]), parse_fraction(row["mass"])) for row in data]
        )

    def __repr__(self):
        body = ", ".join(f"{v}:{m}" for v, m in self.atoms)
        return f"DiscreteMeasure({{{body}}})"


def make_measure(atoms: Sequence[Tuple]) -> DiscreteMeasure:
    """Canonical measure: sorted, duplicates merged, total mass exactly 1."""
    merged: Dict[Fraction, Fraction] = {}
    for v, m in atoms:
        v, m = Fraction(v), Fraction(m)
        if m <= 0:
            raise ValidationError(f"mass {m} at {v} must be positive")
        merged[v] = merged.get(v, ZERO) + m
    total = sum(merged.values(), ZERO)
    if total != 1:
        raise ValidationError(f"masses sum to {total}, expected exactly 1")
    return DiscreteMeasure(tuple(sorted(merged.items())))


def dirac(v=ZERO) -> DiscreteMeasure:
    return DiscreteMeasure(((Fraction(v), ONE),))


DIRAC_ZERO = dirac()


# -- conditioning and scaling -------------------------------------------------


def condition(nu: DiscreteMeasure, b: Sequence[Tuple]) -> DiscreteMeasure:
    """Conditional law on a finite union of closed rational intervals."""
    pairs = [(Fraction(lo), Fraction(hi)) for lo, hi in b]
    kept = [
        (v, m)
        for v, m in nu.atoms
        if any(lo <= v <= hi for lo, hi in pairs)
    ]
    total = sum((m for _, m in kept), ZERO)
    if total == 0:
        raise DomainError("conditioning event has measure zero")
    return DiscreteMeasure(tuple((v, m / total) for v, m in kept))


def mass_outside(nu: DiscreteMeasure, b: Sequence[Tuple]) -> Fraction:
    pairs = [(Fraction(lo), Fraction(hi)) for lo, hi in b]
    inside = sum(
        (m for v, m in nu.atoms if any(lo <= v <= hi for lo, hi in pairs)), ZERO
    )
    return 1 - inside


def scale(nu: DiscreteMeasure, x) -> DiscreteMeasure:
    """The law of Y/x for Y ~ nu (so scale(nu, x)(B) = nu(xB))."""
    x = Fraction(x)
    if x <= 0:
        raise DomainError("scale factor must be positive")
    return DiscreteMeasure(tuple((v / x, m) for v, m in nu.atoms))


# -- Lévy metric ---------------------------------------------------------------


def _one_sided(p: DiscreteMeasure, q: DiscreteMeasure, eps: Fraction) -> bool:
    """Decide: for all t, P(t) <= Q(t + eps) + eps."""
    critical = sorted({v for v in p.values} | {v - eps for v in q.values})
    for c in critical:
        if p.cdf(c) > q.cdf(c + eps) + eps:
            return False
        if p.cdf_left(c) > q.cdf_left(c + eps) + eps:
            return False
    return True


def levy_le(nu: DiscreteMeasure, eta: DiscreteMeasure, eps) -> bool:
    """Exactly decide d(nu, eta) <= eps for the Lévy metric d."""
    eps = Fraction(eps)
    if eps < 0:
        raise DomainError("eps must be >= 0")
    return _one_sided(nu, eta, eps) and _one_sided(eta, nu, eps)


def levy_distance(nu: DiscreteMeasure, eta: DiscreteMeasure, tol) -> Tuple[Fraction, Fraction]:
    """Certified bracket (lo, hi) around d(nu, eta) with hi - lo <= tol.

    levy_le holds at hi and fails at lo (unless lo == 0, when d == 0).
    """
    tol = Fraction(tol)
    if tol <= 0:
        raise DomainError("tol must be positive")
    if levy_le(nu, eta, ZERO):
        return ZERO, ZERO
    lo, hi = ZERO, ONE
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if levy_le(nu, eta, mid):
            hi = mid
        else:
            lo = mid
    return lo, hi


def dirac_bound(nu: DiscreteMeasure, a) -> bool:
    """Both open-tail inequalities nu((-inf,-a)) <= a and nu((a,inf)) <= a.

    Equivalent to d(nu, delta_0) <= a.
    """
    a = Fraction(a)
    if a < 0:
        raise DomainError("a must be >= 0")
    return nu.cdf_left(-a) <= a and ONE - nu.cdf(a) <= a


# -- lattice discretization with exact recentering -----------------------------


@dataclass(frozen=True)
class CenteredLattice:
    """Integer-supported zero-mean law approximating nu at scale a_n."""

    eta: DiscreteMeasure
    C: Fraction
    n0: int
    alpha: Fraction
    provenance: Dict[str, object] = field(default_factory=dict)


def tail_first_moment(nu: DiscreteMeasure, c: Fraction) -> Fraction:
    return sum((abs(v) * m for v, m in nu.atoms if abs(v) > c), ZERO)


def truncation_radius(nu: DiscreteMeasure, alpha: Fraction) -> Fraction:
    """Minimal dyadic-grid C >= 1 with tail first moment <= alpha.

    Doubling to find an upper bound, then binary refinement on the grid of
    spacing upper/64.
    """
    c = ONE
    while tail_first_moment(nu, c) > alpha:
        c *= 2
        if c > 1 << 62:
            raise CapacityError("truncation radius search diverged", required=None)
    upper = c
    spacing = upper / 64
    lo_j, hi_j = max(1, int((upper / 2) / spacing)), int(upper / spacing)
    # minimal j with grid value >= 1 and tail bound satisfied
    best = hi_j
    while lo_j <= hi_j:
        mid = (lo_j + hi_j) // 2
        cand = mid * spacing
        if cand >= 1 and tail_first_moment(nu, cand) <= alpha:
            best = mid
            hi_j = mid - 1
        else:
            lo_j = mid + 1
    return best * spacing


def center_on_lattice(nu: DiscreteMeasure, c: Fraction, a: Fraction):
    """Bin the truncated law onto Z at scale a and recenter to exact mean 0.

    Returns (eta, provenance). Binning sends mass of [k/a, (k+1)/a) to k;
    atoms at the lower edge -C clamp into -floor(aC) so the support claim
    holds (the positional shift stays below 1/a). Recentering moves the mean
    defect to the atom at -s*floor(aC) with the renormalization
    p = 1 + |E|/floor(aC).
    """
    tau = condition(nu, [(-c, c)])
    d_cap = int(a * c)  # floor(a*C)
    bins: Dict[int, Fraction] = {}
    for v, m in tau.atoms:
        k = _floor_frac(v * a)
        if k < -d_cap:
            k = -d_cap
        bins[k] = bins.get(k, ZERO) + m
    eta_prime = DiscreteMeasure(tuple(sorted(bins.items())))
    eta_prime = DiscreteMeasure(
        tuple((Fraction(k), m) for k, m in eta_prime.atoms)
    )
    e = eta_prime.mean()
    if e == 0:
        eta = eta_prime
        p, s = ONE, 0
    else:
        s = 1 if e > 0 else -1
        p = 1 + abs(e) / d_cap
        anchor = Fraction(-s * d_cap)
        masses: Dict[Fraction, Fraction] = {v: m for v, m in eta_prime.atoms}
        masses[anchor] = masses.get(anchor, ZERO) + abs(e) / d_cap
        eta = DiscreteMeasure(
            tuple(sorted((v, m / p) for v, m in masses.items()))
        )
    if eta.mean() != 0:
        raise ConstructionError("lattice recentering failed to zero the mean")
    if eta.support_radius() > a * c:
        raise ConstructionError("lattice support exceeds [-aC, aC]")
    provenance = {"tau": tau, "eta_prime": eta_prime, "p": p, "s": s}
    return eta, provenance


def _floor_frac(x: Fraction) -> int:
    return x.numerator // x.denominator


def discretize_center(
    nu: DiscreteMeasure, eps, seq: NormalizingSequence, n: int
) -> CenteredLattice:
    """Zero-mean integer-lattice approximation of nu at scale a_n.

    Requires mean(nu) == 0 and n >= n0, where n0 is minimal with
    1/a_{n0} < alpha for alpha = min(eps/6, 1/2 - 2^-10). The returned
    lattice satisfies levy_le(scale(eta, a_n), nu, eps) exactly.
    """
    eps = Fraction(eps)
    if eps <= 0:
        raise DomainError("eps must be positive")
    if nu.mean() != 0:
        raise DomainError(f"mean(nu) = {nu.mean()}, expected exactly 0")
    alpha = min(eps / 6, HALF - Fraction(1, 1 << 10))
    c = truncation_radius(nu, alpha)
    n0 = seq.minimal_n_with_value_above(1 / alpha)
    if n < n0:
        raise CapacityError(
            f"n={n} below the minimal admissible n0={n0} for eps={eps}",
            required=n0,
        )
    a = seq.value(n)
    eta, provenance = center_on_lattice(nu, c, a)
    lattice = CenteredLattice(eta=eta, C=c, n0=n0, alpha=alpha, provenance=provenance)
    if not levy_le(scale(eta, a), nu, eps):
        raise ConstructionError(
            f"lattice law misses the eps={eps} corridor at n={n}"
        )
    return lattice


# -- quantile realization -------------------------------------------------------


def realize_on_base(f: IntervalSet, eta: DiscreteMeasure) -> List[Tuple[Fraction, IntervalSet]]:
    """Partition f so each part carries exactly eta's mass proportions.

    Parts are assigned left to right in atom order through measure-exact
    splits: the quantile function composed with normalized position.
    """
    total = f.measure()
    if total == 0:
        raise DomainError("cannot realize a law on a null base")
    parts = []
    rest = f
    for v, m in eta.atoms[:-1]:
        part, rest = rest.split_at_mass(m * total)
        parts.append((v, part))
    parts.append((eta.atoms[-1][0], rest))
    return parts


# -- continuous targets ----------------------------------------------------------


def gaussian_target(pairs: int = 8, denominator_bits: int = 20) -> DiscreteMeasure:
    """Symmetric rational discretization of the standard normal law.

    2*pairs atoms at +-rationalized quantile midpoints, equal masses; the
    symmetry makes the mean exactly zero.
    """
    if pairs < 1:
        raise DomainError("need at least one quantile pair")
    gauss = NormalDist()
    mass = Fraction(1, 2 * pairs)
    cap = 1 << denominator_bits
    atoms = []
    for i in range(pairs):
        prob = (pairs + i + Fraction(1, 2)) / (2 * pairs)
        q = Fraction(gauss.inv_cdf(float(prob))).limit_denominator(cap)
        if q <= 0:
            raise ConstructionError("quantile rationalization collapsed to zero")
        atoms.append((q, mass))
        atoms.append((-q, mass))
    return make_measure(atoms)
