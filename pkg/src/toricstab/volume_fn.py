"""One-parameter volume functions and directional derivatives of the volume.

Houses the exact polynomial and piecewise-polynomial types used everywhere:
volume curves t -> vol(L - tD), pseudo-effective thresholds, the positive
(movable) intersection pairing realized as a one-sided derivative, and
volumes along towers of star subdivisions.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import NotAmple, NotBig, NotMonotone, OutOfRange, UnboundedRegion, ZeroDivisor
from .geometry import (
    Chamber,
    Halfspace,
    ParametricPolytope,
    parametric_family,
    volume,
)
from .toric import Fan, ToricDivisor, is_ample, polytope_of, star_subdivision


# --------------------------------------------------------------------------
# exact polynomials
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Polynomial:
    """Univariate polynomial with exact rational coefficients, ascending order."""

    coeffs: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        cs = tuple(Fraction(c) for c in self.coeffs)
        while cs and cs[-1] == 0:
            cs = cs[:-1]
        object.__setattr__(self, "coeffs", cs)

    @classmethod
    def of(cls, *coeffs) -> Polynomial:
        return cls(tuple(Fraction(c) for c in coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1  # -1 for the zero polynomial

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def __call__(self, x) -> Fraction:
        x = Fraction(x)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __add__(self, other: Polynomial) -> Polynomial:
        return Polynomial(
            tuple(
                a + b
                for a, b in itertools.zip_longest(
                    self.coeffs, other.coeffs, fillvalue=Fraction(0)
                )
            )
        )

    def __sub__(self, other: Polynomial) -> Polynomial:
        return self + other.scale(-1)

    def __mul__(self, other: Polynomial) -> Polynomial:
        if self.is_zero or other.is_zero:
            return Polynomial(())
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Polynomial(tuple(out))

    def scale(self, c) -> Polynomial:
        c = Fraction(c)
        return Polynomial(tuple(c * a for a in self.coeffs))

    def derivative(self) -> Polynomial:
        return Polynomial(tuple(i * c for i, c in enumerate(self.coeffs) if i > 0))

    def antiderivative(self) -> Polynomial:
        return Polynomial(
            (Fraction(0),) + tuple(c / (i + 1) for i, c in enumerate(self.coeffs))
        )

    def integrate(self, a, b) -> Fraction:
        anti = self.antiderivative()
        return anti(b) - anti(a)

    def divmod(self, other: Polynomial) -> tuple[Polynomial, Polynomial]:
        if other.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        quo = [Fraction(0)] * max(len(rem) - len(other.coeffs) + 1, 0)
        d = other.coeffs
        while rem and rem[-1] == 0:
            rem.pop()
        while len(rem) >= len(d):
            shift = len(rem) - len(d)
            factor = rem[-1] / d[-1]
            quo[shift] += factor
            for i, c in enumerate(d):
                rem[shift + i] -= factor * c
            rem.pop()
            while rem and rem[-1] == 0:
                rem.pop()
        return Polynomial(tuple(quo)), Polynomial(tuple(rem))


def fit_polynomial(xs: Sequence, ys: Sequence) -> Polynomial:
    """Exact Lagrange interpolation through distinct rational nodes."""
    xs = [Fraction(x) for x in xs]
    ys = [Fraction(y) for y in ys]
    result = Polynomial(())
    for i, (xi, yi) in enumerate(zip(xs, ys)):
        term = Polynomial.of(1)
        denom = Fraction(1)
        for j, xj in enumerate(xs):
            if j == i:
                continue
            term = term * Polynomial.of(-xj, 1)
            denom *= xi - xj
        result = result + term.scale(yi / denom)
    return result


# ---- exact sign analysis ---------------------------------------------------

def _monic(p: Polynomial) -> Polynomial:
    return p if p.is_zero else p.scale(Fraction(1) / p.coeffs[-1])


def poly_gcd(a: Polynomial, b: Polynomial) -> Polynomial:
    while not b.is_zero:
        _, r = a.divmod(b)
        a, b = b, r
    return _monic(a)


def squarefree_decomposition(p: Polynomial) -> list[tuple[Polynomial, int]]:
    """Yun's algorithm: pairwise-coprime squarefree factors with multiplicities."""
    p = _monic(p)
    if p.degree <= 0:
        return []
    g = poly_gcd(p, p.derivative())
    if g.degree == 0:
        return [(p, 1)]
    c = p.divmod(g)[0]
    d = p.derivative().divmod(g)[0] - c.derivative()
    out: list[tuple[Polynomial, int]] = []
    i = 1
    while c.degree > 0:
        a = poly_gcd(c, d)
        if a.degree > 0:
            out.append((_monic(a), i))
        c_next = c.divmod(a)[0]
        d = d.divmod(a)[0] - c_next.derivative()
        c = c_next
        i += 1
    return out


def _sturm_sequence(p: Polynomial) -> list[Polynomial]:
    seq = [p, p.derivative()]
    while seq[-1].degree > 0:
        _q, r = seq[-2].divmod(seq[-1])
        if r.is_zero:
            break
        seq.append(r.scale(-1))
    return seq


def _sign_changes(values: Sequence[Fraction]) -> int:
    signs = [v for v in values if v != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if (a > 0) != (b > 0))


def count_roots(p: Polynomial, a, b) -> int:
    """Distinct real roots of p in (a, b]; requires p(a) != 0."""
    if p.is_zero:
        raise ValueError("the zero polynomial has infinitely many roots")
    seq = _sturm_sequence(p)
    return _sign_changes([q(a) for q in seq]) - _sign_changes([q(b) for q in seq])


def _divide_out_root(p: Polynomial, r) -> Polynomial:
    r = Fraction(r)
    while not p.is_zero and p.degree >= 1 and p(r) == 0:
        q, rem = p.divmod(Polynomial.of(-r, 1))
        assert rem.is_zero
        p = q
    return p


def nonneg_on_interval(p: Polynomial, a, b) -> bool:
    """Exact decision of p >= 0 everywhere on [a, b].

    Sign changes happen exactly at odd-multiplicity roots, so after checking
    the endpoints it suffices to verify that the odd part of the squarefree
    decomposition has no root strictly inside, then sample one non-root point.
    """
    a, b = Fraction(a), Fraction(b)
    if a > b:
        raise ValueError("empty interval")
    if p.is_zero:
        return True
    if p(a) < 0 or p(b) < 0:
        return False
    if a == b:
        return True
    odd = Polynomial.of(1)
    for factor, mult in squarefree_decomposition(p):
        if mult % 2 == 1:
            odd = odd * factor
    odd = _divide_out_root(_divide_out_root(odd, a), b)
    if odd.degree >= 1 and count_roots(odd, a, b) > 0:
        return False
    # no interior sign change: one non-root sample decides the sign
    for k in range(1, p.degree + 3):
        x = a + (b - a) * Fraction(k, p.degree + 3)
        val = p(x)
        if val != 0:
            return val > 0
    raise AssertionError("nonzero polynomial vanished at more points than its degree")


# --------------------------------------------------------------------------
# piecewise polynomials
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class PiecewisePolynomial:
    """Piecewise polynomial on [breakpoints[0], breakpoints[-1]].

    Continuity across breakpoints is enforced at construction unless the
    object is built with `continuous=False` (used for densities, which may
    jump at chamber walls).
    """

    breakpoints: tuple[Fraction, ...]
    pieces: tuple[Polynomial, ...]
    continuous: bool = field(default=True, compare=False)

    def __post_init__(self) -> None:
        bps = tuple(Fraction(b) for b in self.breakpoints)
        object.__setattr__(self, "breakpoints", bps)
        if len(bps) != len(self.pieces) + 1:
            raise ValueError("need exactly one piece per breakpoint interval")
        if any(x >= y for x, y in zip(bps, bps[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        if self.continuous:
            for x, left, right in zip(bps[1:], self.pieces, self.pieces[1:]):
                if left(x) != right(x):
                    raise ValueError(f"discontinuity at breakpoint {x}")

    @property
    def domain(self) -> tuple[Fraction, Fraction]:
        return self.breakpoints[0], self.breakpoints[-1]

    def piece_index(self, x) -> int:
        x = Fraction(x)
        lo, hi = self.domain
        if not lo <= x <= hi:
            raise OutOfRange(f"{x} outside domain [{lo}, {hi}]")
        for i in range(len(self.pieces) - 1):
            if x < self.breakpoints[i + 1]:
                return i
        return len(self.pieces) - 1

    def piece_at(self, x) -> Polynomial:
        return self.pieces[self.piece_index(x)]

    def __call__(self, x) -> Fraction:
        return self.piece_at(x)(x)

    def integrate(self, a=None, b=None) -> Fraction:
        lo, hi = self.domain
        a = lo if a is None else max(Fraction(a), lo)
        b = hi if b is None else min(Fraction(b), hi)
        total = Fraction(0)
        for i, poly in enumerate(self.pieces):
            left = max(a, self.breakpoints[i])
            right = min(b, self.breakpoints[i + 1])
            if left < right:
                total += poly.integrate(left, right)
        return total

    def moment(self) -> Fraction:
        """Exact integral of x * f(x) over the domain."""
        t = Polynomial.of(0, 1)
        total = Fraction(0)
        for i, poly in enumerate(self.pieces):
            total += (t * poly).integrate(self.breakpoints[i], self.breakpoints[i + 1])
        return total

    def is_nonincreasing(self) -> bool:
        return all(
            nonneg_on_interval(
                p.derivative().scale(-1), self.breakpoints[i], self.breakpoints[i + 1]
            )
            for i, p in enumerate(self.pieces)
        )

    def is_nonnegative(self) -> bool:
        return all(
            nonneg_on_interval(p, self.breakpoints[i], self.breakpoints[i + 1])
            for i, p in enumerate(self.pieces)
        )

    def normalized(self) -> PiecewisePolynomial:
        """Merge adjacent intervals carrying the same polynomial."""
        bps = [self.breakpoints[0]]
        pieces: list[Polynomial] = []
        for i, poly in enumerate(self.pieces):
            if pieces and pieces[-1] == poly:
                bps[-1] = self.breakpoints[i + 1]
                continue
            pieces.append(poly)
            bps.append(self.breakpoints[i + 1])
        return PiecewisePolynomial(tuple(bps), tuple(pieces), continuous=self.continuous)

    def scale(self, c) -> PiecewisePolynomial:
        return PiecewisePolynomial(
            self.breakpoints,
            tuple(p.scale(c) for p in self.pieces),
            continuous=self.continuous,
        )

    def derivative(self) -> PiecewisePolynomial:
        """Chamber-wise derivative; continuity is not implied."""
        return PiecewisePolynomial(
            self.breakpoints,
            tuple(p.derivative() for p in self.pieces),
            continuous=False,
        )

    def samples(self, per_piece: int) -> list[tuple[Fraction, Fraction]]:
        out = []
        for i, poly in enumerate(self.pieces):
            lo, hi = self.breakpoints[i], self.breakpoints[i + 1]
            for j in range(per_piece):
                x = lo + (hi - lo) * Fraction(j, per_piece)
                out.append((x, poly(x)))
        out.append((self.breakpoints[-1], self.pieces[-1](self.breakpoints[-1])))
        return out


# --------------------------------------------------------------------------
# volume functions of divisors
# --------------------------------------------------------------------------

def big_volume(fan: Fan, d: ToricDivisor) -> Fraction:
    """vol(D) = n! * volume of the section polytope; zero iff D is not big."""
    return math.factorial(fan.dimension) * volume(polytope_of(fan, d))


def divisor_family(
    fan: Fan, l: ToricDivisor, d: ToricDivisor, stop=None
) -> ParametricPolytope:
    """The parametric section polytope family of t -> L - tD from t = 0."""
    halfspaces = [Halfspace(u, a) for u, a in zip(fan.rays, l.coeffs)]
    return parametric_family(halfspaces, list(d.coeffs), start=Fraction(0), stop=stop)


def chamber_volume_polynomial(
    pp: ParametricPolytope, chamber: Chamber, degree: int
) -> Polynomial:
    """Exact volume polynomial on one chamber, by sampling and interpolation.

    The volume is genuinely polynomial of the prescribed degree inside a
    chamber, so a fit through degree+1 interior samples is exact; one extra
    sample is verified to catch a wrong chamber decomposition.
    """
    xs = chamber.sample_points(degree + 2)
    ys = [volume(pp.polytope_at(x)) for x in xs]
    poly = fit_polynomial(xs[: degree + 1], ys[: degree + 1])
    if poly(xs[-1]) != ys[-1]:
        raise AssertionError("volume is not polynomial on the chamber")
    return poly


def family_volume_curve(
    pp: ParametricPolytope, scale: Fraction, degree: int
) -> PiecewisePolynomial:
    """Piecewise polynomial of t -> scale * volume(P_t) over the family window."""
    bps = [pp.chambers[0].lo]
    pieces = []
    for chamber in pp.chambers:
        poly = chamber_volume_polynomial(pp, chamber, degree).scale(scale)
        bps.append(chamber.hi)
        pieces.append(poly)
    return PiecewisePolynomial(tuple(bps), tuple(pieces)).normalized()


def volume_curve(
    fan: Fan, l: ToricDivisor, d: ToricDivisor
) -> tuple[PiecewisePolynomial, Fraction]:
    """Exact t -> vol(L - tD) on [0, tau+], plus the pseudo-effective threshold.

    L must pass the polarization check (full-dimensional nef-saturated
    polytope); D must be effective and nonzero, which forces tau+ < infinity.
    """
    if d.is_zero:
        raise ZeroDivisor("direction divisor is zero")
    if not d.is_effective:
        raise ZeroDivisor("direction divisor must be effective")
    if not is_ample(fan, l):
        raise NotAmple("polarization is not big and nef")
    pp = divisor_family(fan, l, d)
    if pp.t_max is None:
        raise UnboundedRegion("family remains big for all t")
    n = fan.dimension
    curve = family_volume_curve(pp, Fraction(math.factorial(n)), n)
    if not curve.is_nonincreasing():
        raise NotMonotone("volume curve must be non-increasing")
    return curve, pp.t_max


def positive_pairing(fan: Fan, m: ToricDivisor, lprime: ToricDivisor) -> Fraction:
    """The derivative pairing (1/n) d/ds vol(M + s L') at s = 0+.

    Exact: the volume is a polynomial of degree <= n on the first chamber of
    the family s -> M + sL', so a fit anchored at s = 0 reads the one-sided
    derivative off symbolically.
    """
    if big_volume(fan, m) == 0:
        raise NotBig("positive pairing needs a big base divisor")
    n = fan.dimension
    halfspaces = [Halfspace(u, a) for u, a in zip(fan.rays, m.coeffs)]
    rates = [-c for c in lprime.coeffs]
    pp = parametric_family(halfspaces, rates, start=Fraction(0), stop=Fraction(1))
    first = pp.chambers[0]
    xs = [Fraction(0)] + first.sample_points(n + 1)
    ys = [volume(pp.polytope_at(x)) for x in xs]
    poly = fit_polynomial(xs[: n + 1], ys[: n + 1])
    if poly(xs[-1]) != ys[-1]:
        raise AssertionError("volume is not polynomial on the first chamber")
    return math.factorial(n) * poly.derivative()(Fraction(0)) / n


def stabilized_volume(
    fan: Fan,
    l: ToricDivisor,
    d: ToricDivisor,
    refinements: Sequence[Sequence[int]],
) -> list[Fraction]:
    """Volumes of L - D along a tower of star subdivisions with both pulled back.

    Divisor data determined on the input model pulls back along every
    refinement, so the sequence is constant; it is reported as a
    non-increasing upper-bound chain for the volume over all models.
    """
    values = [big_volume(fan, l - d)]
    current_fan, current_l, current_d = fan, l, d
    for center in refinements:
        current_fan, pull, _k_rel = star_subdivision(current_fan, tuple(center))
        current_l = pull(current_l)
        current_d = pull(current_d)
        values.append(big_volume(current_fan, current_l - current_d))
    for a, b in zip(values, values[1:]):
        assert b <= a, "stabilized volumes must be non-increasing"
    return values
