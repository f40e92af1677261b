"""Fans, toric divisors, log discrepancies, star subdivisions, intersections.

All varieties are given by complete simplicial fans in N = Z^n.  Divisors are
rational coefficient vectors indexed by rays; nef divisors pair through mixed
volumes of their section polytopes, and non-nef arguments are split as
differences of nef classes against an ample reference.
"""

from __future__ import annotations

import itertools
from math import gcd
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

from .errors import (
    AlreadyARay,
    DimensionMismatch,
    NonPrimitive,
    NotNefAndNotDecomposable,
    NotPseudoEffective,
    ZeroVector,
)
from .geometry import (
    Halfspace,
    LatticeVector,
    Point,
    Polytope,
    content,
    det,
    dot,
    is_primitive,
    kernel_vector,
    solve_linear,
    volume,
)


@dataclass(frozen=True)
class Fan:
    """A complete simplicial fan: primitive rays plus maximal cones by ray index."""

    rays: tuple[LatticeVector, ...]
    max_cones: tuple[tuple[int, ...], ...]
    dimension: int

    def __post_init__(self) -> None:
        # canonical cone order, so structurally equal fans compare equal
        object.__setattr__(
            self,
            "max_cones",
            tuple(sorted(set(tuple(sorted(c)) for c in self.max_cones))),
        )

    @classmethod
    def make(cls, rays: Sequence[Sequence[int]], max_cones: Sequence[Sequence[int]]) -> Fan:
        rays_t = tuple(tuple(int(a) for a in r) for r in rays)
        if not rays_t:
            raise ValueError("a fan needs at least one ray")
        dim = len(rays_t[0])
        if any(len(r) != dim for r in rays_t):
            raise DimensionMismatch("rays of mixed dimension")
        cones_t = tuple(tuple(sorted(int(i) for i in c)) for c in max_cones)
        for cone in cones_t:
            if any(i < 0 or i >= len(rays_t) for i in cone):
                raise ValueError(f"cone {cone} references a missing ray")
        return cls(rays_t, cones_t, dim)

    def cone_rays(self, cone: tuple[int, ...]) -> list[LatticeVector]:
        return [self.rays[i] for i in cone]

    def cone_coordinates(self, cone: tuple[int, ...], u: Sequence) -> Point | None:
        """Coordinates of u in the cone's ray basis, or None if u is outside."""
        if len(cone) != self.dimension:
            return None
        cols = self.cone_rays(cone)
        rows = [[cols[j][i] for j in range(len(cols))] for i in range(self.dimension)]
        lam = solve_linear(rows, list(u))
        if lam is None or any(c < 0 for c in lam):
            return None
        return lam

    def containing_cone(self, u: Sequence) -> tuple[tuple[int, ...], Point]:
        for cone in self.max_cones:
            lam = self.cone_coordinates(cone, u)
            if lam is not None:
                return cone, lam
        raise ZeroVector(f"{tuple(u)} lies outside the support of the fan")


@dataclass(frozen=True)
class ToricDivisor:
    """A rational divisor: one coefficient per ray of a fixed fan."""

    fan: Fan
    coeffs: tuple[Fraction, ...]

    @classmethod
    def make(cls, fan: Fan, coeffs: Sequence) -> ToricDivisor:
        cs = tuple(Fraction(c) for c in coeffs)
        if len(cs) != len(fan.rays):
            raise DimensionMismatch("one coefficient per ray required")
        return cls(fan, cs)

    def __add__(self, other: ToricDivisor) -> ToricDivisor:
        self._check(other)
        return ToricDivisor(self.fan, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: ToricDivisor) -> ToricDivisor:
        self._check(other)
        return ToricDivisor(self.fan, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> ToricDivisor:
        return ToricDivisor(self.fan, tuple(-a for a in self.coeffs))

    def scale(self, c) -> ToricDivisor:
        c = Fraction(c)
        return ToricDivisor(self.fan, tuple(c * a for a in self.coeffs))

    def _check(self, other: ToricDivisor) -> None:
        if other.fan != self.fan:
            raise DimensionMismatch("divisors live on different fans")

    @property
    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    @property
    def is_effective(self) -> bool:
        return all(c >= 0 for c in self.coeffs)

    def support(self) -> tuple[int, ...]:
        return tuple(i for i, c in enumerate(self.coeffs) if c != 0)

    def reduced(self) -> ToricDivisor:
        """Same support, all nonzero coefficients set to 1."""
        return ToricDivisor(
            self.fan, tuple(Fraction(1) if c != 0 else Fraction(0) for c in self.coeffs)
        )


def divisor(fan: Fan, coeffs: Sequence) -> ToricDivisor:
    return ToricDivisor.make(fan, coeffs)


def zero_divisor(fan: Fan) -> ToricDivisor:
    return ToricDivisor.make(fan, [0] * len(fan.rays))


def anticanonical(fan: Fan) -> ToricDivisor:
    return ToricDivisor.make(fan, [1] * len(fan.rays))


def ray_divisor(fan: Fan, index: int) -> ToricDivisor:
    coeffs = [0] * len(fan.rays)
    coeffs[index] = 1
    return ToricDivisor.make(fan, coeffs)


# --------------------------------------------------------------------------
# validation
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class FanDiagnostics:
    is_complete: bool
    is_smooth: bool
    is_simplicial: bool
    all_primitive: bool
    proper_intersections: bool
    messages: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return (
            self.is_complete
            and self.is_simplicial
            and self.all_primitive
            and self.proper_intersections
        )


def _cone_halfspaces(fan: Fan, cone: tuple[int, ...]) -> list[Halfspace] | None:
    """H-representation of a full-dimensional simplicial cone (rows of M^-1)."""
    n = fan.dimension
    cols = fan.cone_rays(cone)
    rows = []
    for i in range(n):
        unit = [Fraction(1) if j == i else Fraction(0) for j in range(n)]
        # solve M^T y = e_i gives row i of M^{-1}
        sol = solve_linear([[cols[j][k] for k in range(n)] for j in range(n)], unit)
        if sol is None:
            return None
        rows.append(sol)
    out = []
    for row in rows:
        denom = 1
        for a in row:
            denom = denom * a.denominator // gcd(denom, a.denominator)
        out.append(Halfspace(tuple(int(a * denom) for a in row), Fraction(0)))
    return out


def _extreme_rays(halfspaces: list[Halfspace], dim: int) -> list[LatticeVector]:
    """Extreme rays of a pointed cone given by homogeneous halfspaces."""
    rays: set[LatticeVector] = set()
    normals = [hs.normal for hs in halfspaces]
    for subset in itertools.combinations(normals, dim - 1):
        d = kernel_vector(subset, dim)
        if d is None:
            continue
        for cand in (d, tuple(-a for a in d)):
            if all(dot(u, cand) >= 0 for u in normals):
                rays.add(cand)
    return sorted(rays)


def validate_fan(fan: Fan) -> FanDiagnostics:
    """Exact completeness / smoothness / primitivity / face-intersection report."""
    messages: list[str] = []
    all_primitive = True
    for i, ray in enumerate(fan.rays):
        if content(ray) == 0:
            all_primitive = False
            messages.append(f"ray {i} is zero")
        elif not is_primitive(ray):
            all_primitive = False
            messages.append(f"ray {i} = {ray} is not primitive")

    is_simplicial = True
    is_smooth = True
    n = fan.dimension
    for cone in fan.max_cones:
        if len(cone) != n:
            is_simplicial = False
            is_smooth = False
            messages.append(f"cone {cone} does not have {n} rays")
            continue
        d = det(fan.cone_rays(cone))
        if d == 0:
            is_simplicial = False
            is_smooth = False
            messages.append(f"cone {cone} is degenerate")
        elif abs(d) != 1:
            is_smooth = False
            messages.append(f"cone {cone} has determinant {d} (not smooth)")

    # wall regularity: every facet of a maximal cone is shared by exactly 2 cones
    is_complete = is_simplicial and bool(fan.max_cones)
    if is_simplicial and fan.max_cones:
        wall_count: dict[tuple[int, ...], int] = {}
        for cone in fan.max_cones:
            for facet in itertools.combinations(cone, n - 1):
                wall_count[facet] = wall_count.get(facet, 0) + 1
        bad = {w: c for w, c in wall_count.items() if c != 2}
        if n == 1:
            # complete 1-dim fans are exactly {R>=0, R<=0}
            is_complete = len(fan.max_cones) == 2
            if not is_complete:
                messages.append("fan does not cover the line")
        elif bad:
            is_complete = False
            for wall, count in sorted(bad.items()):
                messages.append(f"wall {wall} lies on {count} cone(s), fan not complete")

    proper = True
    if is_simplicial and n > 1:
        for ca, cb in itertools.combinations(fan.max_cones, 2):
            ha = _cone_halfspaces(fan, ca)
            hb = _cone_halfspaces(fan, cb)
            if ha is None or hb is None:
                continue
            common = sorted(set(ca) & set(cb))
            for ray in _extreme_rays(ha + hb, n):
                lam = None
                if common:
                    # ray must be a nonnegative combination of the shared rays
                    cols = [fan.rays[i] for i in common]
                    rows = [[cols[j][i] for j in range(len(cols))] for i in range(n)]
                    sol = _nonneg_combination(rows, ray, len(common))
                    lam = sol
                if lam is None:
                    proper = False
                    messages.append(
                        f"cones {ca} and {cb} overlap beyond a common face (at {ray})"
                    )
                    break
    return FanDiagnostics(
        is_complete=is_complete,
        is_smooth=is_smooth and is_simplicial,
        is_simplicial=is_simplicial,
        all_primitive=all_primitive,
        proper_intersections=proper,
        messages=tuple(messages),
    )


def _nonneg_combination(rows, target, k) -> tuple | None:
    """Solve rows * lam = target with lam >= 0, rows an n x k column system."""
    # least-squares-free exact solve: the k columns are linearly independent here
    m = [list(r) + [Fraction(t)] for r, t in zip(rows, target)]
    # Gaussian elimination on an n x (k+1) system
    pivots = []
    row_idx = 0
    for col in range(k):
        pivot = next((r for r in range(row_idx, len(m)) if m[r][col] != 0), None)
        if pivot is None:
            continue
        m[row_idx], m[pivot] = m[pivot], m[row_idx]
        inv = Fraction(1) / m[row_idx][col]
        m[row_idx] = [a * inv for a in m[row_idx]]
        for r in range(len(m)):
            if r != row_idx and m[r][col] != 0:
                factor = m[r][col]
                m[r] = [a - factor * b for a, b in zip(m[r], m[row_idx])]
        pivots.append(col)
        row_idx += 1
    lam = [Fraction(0)] * k
    for r, col in enumerate(pivots):
        lam[col] = m[r][k]
    # consistency rows
    for r in range(row_idx, len(m)):
        if m[r][k] != 0:
            return None
    if any(c < 0 for c in lam):
        return None
    return tuple(lam)


# --------------------------------------------------------------------------
# polytopes of divisors, nefness, ampleness
# --------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _polytope_cached(fan: Fan, coeffs: tuple[Fraction, ...]) -> Polytope:
    return Polytope.from_halfspaces(
        [Halfspace(u, a) for u, a in zip(fan.rays, coeffs)]
    )


def polytope_of(fan: Fan, d: ToricDivisor) -> Polytope:
    """Section polytope {m : <m, u_rho> >= -a_rho}; may be empty."""
    return _polytope_cached(fan, d.coeffs)


def support_value(fan: Fan, d: ToricDivisor, u: Sequence) -> Fraction:
    """Value at u of the divisor's piecewise-linear function (phi(u_rho) = -a_rho)."""
    cone, lam = fan.containing_cone(u)
    return sum(
        (lam[j] * -d.coeffs[i] for j, i in enumerate(cone)), Fraction(0)
    )


def is_nef(fan: Fan, d: ToricDivisor) -> bool:
    """Support-function saturation against every ray, plus per-cone linearity.

    The divisor is nef exactly when its coefficients agree with the minima of
    its own section polytope against the rays and the per-cone solutions of
    those equalities land inside the polytope.
    """
    p = polytope_of(fan, d)
    if p.is_empty:
        return False
    for u, a in zip(fan.rays, d.coeffs):
        if p.support_min(u) != -a:
            return False
    for cone in fan.max_cones:
        rows = fan.cone_rays(cone)
        m = solve_linear(rows, [-d.coeffs[i] for i in cone])
        if m is None or not p.contains(m):
            return False
    return True


def is_ample(fan: Fan, d: ToricDivisor) -> bool:
    """Polarization check: nef with a full-dimensional section polytope.

    This accepts big and semi-ample classes such as pullbacks of ample
    divisors, which is exactly what the one-parameter constructions need.
    """
    p = polytope_of(fan, d)
    return (not p.is_empty) and p.is_full_dimensional and is_nef(fan, d)


def is_strictly_ample(fan: Fan, d: ToricDivisor) -> bool:
    """Ample in the strict sense: nef with one distinct vertex per maximal cone."""
    if not is_ample(fan, d):
        return False
    seen = set()
    for cone in fan.max_cones:
        m = solve_linear(fan.cone_rays(cone), [-d.coeffs[i] for i in cone])
        if m is None or m in seen:
            return False
        seen.add(m)
    return True


# --------------------------------------------------------------------------
# log discrepancy and star subdivisions
# --------------------------------------------------------------------------

def log_discrepancy(fan: Fan, u: Sequence[int]) -> Fraction:
    """The piecewise-linear function equal to 1 on every primitive ray, at u."""
    if all(a == 0 for a in u):
        raise ZeroVector("log discrepancy of the zero vector")
    _cone, lam = fan.containing_cone(u)
    return sum(lam, Fraction(0))


def star_subdivision(
    fan: Fan, u: Sequence[int]
) -> tuple[Fan, Callable[[ToricDivisor], ToricDivisor], ToricDivisor]:
    """Star subdivision at a primitive u: (new fan, pullback map, relative canonical).

    The pullback evaluates the support function of the input divisor at u, so
    section polytopes (hence volumes and intersection numbers) are preserved.
    The relative canonical divisor is supported on the new ray with
    coefficient log_discrepancy(u) - 1.
    """
    u = tuple(int(a) for a in u)
    if all(a == 0 for a in u):
        raise ZeroVector("cannot subdivide at the zero vector")
    if not is_primitive(u):
        raise NonPrimitive(f"{u} is not primitive")
    if u in fan.rays:
        raise AlreadyARay(f"{u} is already a ray")
    new_index = len(fan.rays)
    new_cones: list[tuple[int, ...]] = []
    touched = False
    for cone in fan.max_cones:
        lam = fan.cone_coordinates(cone, u)
        if lam is None:
            new_cones.append(cone)
            continue
        touched = True
        for j, i in enumerate(cone):
            if lam[j] > 0:
                replaced = tuple(sorted(set(cone) - {i} | {new_index}))
                new_cones.append(replaced)
    if not touched:
        raise ZeroVector(f"{u} lies outside the support of the fan")
    new_fan = Fan(fan.rays + (u,), tuple(new_cones), fan.dimension)
    a_new = log_discrepancy(fan, u)

    def pullback(d: ToricDivisor) -> ToricDivisor:
        if d.fan != fan:
            raise DimensionMismatch("divisor lives on a different fan")
        return ToricDivisor(new_fan, d.coeffs + (-support_value(fan, d, u),))

    k_rel = ToricDivisor(
        new_fan, (Fraction(0),) * new_index + (a_new - 1,)
    )
    return new_fan, pullback, k_rel


# --------------------------------------------------------------------------
# intersection numbers and Zariski decomposition
# --------------------------------------------------------------------------

def _nef_intersection(fan: Fan, divisors: Sequence[ToricDivisor]) -> Fraction:
    """Intersection number of nef divisors by polarization over coefficient sums.

    Minkowski sums of section polytopes of nef divisors are section polytopes
    of the coefficient sums, so no geometric Minkowski machinery is needed.
    """
    n = fan.dimension
    total = Fraction(0)
    for size in range(1, n + 1):
        sign = (-1) ** (n - size)
        for combo in itertools.combinations(range(n), size):
            acc = divisors[combo[0]]
            for i in combo[1:]:
                acc = acc + divisors[i]
            total += sign * volume(polytope_of(fan, acc))
    return total


def minimal_nef_shift(fan: Fan, d: ToricDivisor, ample_ref: ToricDivisor) -> Fraction | None:
    """Least c >= 0 with d + c * ample_ref nef, via per-cone linearity constraints.

    None when no multiple of the reference can shift d into the nef cone
    (the reference touches the nef boundary in a direction where d is
    negative).
    """
    c_min = Fraction(0)
    for cone in fan.max_cones:
        rows = fan.cone_rays(cone)
        m0 = solve_linear(rows, [-d.coeffs[i] for i in cone])
        m1 = solve_linear(rows, [-ample_ref.coeffs[i] for i in cone])
        if m0 is None or m1 is None:
            return None
        for i, u in enumerate(fan.rays):
            g0 = dot(u, m0) + d.coeffs[i]
            g1 = dot(u, m1) + ample_ref.coeffs[i]
            if g1 == 0:
                if g0 < 0:
                    return None
                continue
            if g1 < 0:
                return None
            if g0 < 0:
                c_min = max(c_min, -g0 / g1)
    return c_min


def _ample_generator(fan: Fan) -> ToricDivisor | None:
    """A strictly ample divisor on the fan, if one of the standard candidates works.

    Tries the anticanonical class, then the sum of the Zariski positive parts
    of the ray divisors (an interior point of the nef cone on the projective
    fans handled here).
    """
    candidates = [anticanonical(fan)]
    total = ToricDivisor(fan, (Fraction(0),) * len(fan.rays))
    ok = True
    for i in range(len(fan.rays)):
        coeffs = [Fraction(0)] * len(fan.rays)
        coeffs[i] = Fraction(1)
        ray_div = ToricDivisor(fan, tuple(coeffs))
        p = _polytope_cached(fan, ray_div.coeffs)
        if p.is_empty:
            ok = False
            break
        total = total + ToricDivisor(
            fan, tuple(-p.support_min(u) for u in fan.rays)
        )
    if ok:
        candidates.append(total)
    for cand in candidates:
        if is_strictly_ample(fan, cand):
            return cand
    return None


def intersection_number(
    fan: Fan,
    divisors: Sequence[ToricDivisor],
    ample_ref: ToricDivisor | None = None,
) -> Fraction:
    """Exact intersection number of n divisor classes.

    Nef inputs pair directly through polytope volumes; any other input D is
    rewritten as (D + c * ample_ref) - (c * ample_ref) with c minimal rational
    and the product expanded multilinearly.
    """
    n = fan.dimension
    if len(divisors) != n:
        raise DimensionMismatch(f"need exactly {n} divisors")
    for d in divisors:
        if d.fan != fan:
            raise DimensionMismatch("divisor lives on a different fan")
    split: list[list[tuple[Fraction, ToricDivisor]]] = []
    references: list[ToricDivisor] | None = None
    for d in divisors:
        if is_nef(fan, d):
            split.append([(Fraction(1), d)])
            continue
        if references is None:
            # a caller-supplied reference may sit on the nef boundary (for
            # example a pullback of an ample class), so keep a strictly ample
            # fallback; the expanded value is reference-independent
            references = [] if ample_ref is None else [ample_ref]
            fallback = _ample_generator(fan)
            if fallback is not None:
                references.append(fallback)
        shift: tuple[ToricDivisor, Fraction] | None = None
        for ref in references:
            c = minimal_nef_shift(fan, d, ref)
            if c is None or c == 0:
                continue
            shifted = d + ref.scale(c)
            if is_nef(fan, shifted):
                shift = (ref, c)
                break
        if shift is None:
            raise NotNefAndNotDecomposable(
                "non-nef argument and no usable ample reference"
            )
        ref, c = shift
        split.append([(Fraction(1), d + ref.scale(c)), (Fraction(-1), ref.scale(c))])
    total = Fraction(0)
    for combo in itertools.product(*split):
        sign = Fraction(1)
        parts = []
        for s, dv in combo:
            sign *= s
            parts.append(dv)
        total += sign * _nef_intersection(fan, parts)
    return total


@dataclass(frozen=True)
class ZariskiPair:
    """Divisorial Zariski decomposition: nef positive part plus effective negative part."""

    positive: ToricDivisor
    negative: ToricDivisor


def zariski_decompose(fan: Fan, m: ToricDivisor) -> ZariskiPair:
    """Toric divisorial Zariski decomposition of a pseudo-effective class.

    Positive part coefficients are the negated minima of the section polytope
    against the rays; the difference is the effective negative part and the
    volume of the input equals the top self-intersection of the positive part.
    """
    p = polytope_of(fan, m)
    if p.is_empty:
        raise NotPseudoEffective("empty section polytope")
    pos_coeffs = tuple(-p.support_min(u) for u in fan.rays)
    positive = ToricDivisor(fan, pos_coeffs)
    negative = m - positive
    assert negative.is_effective, "Zariski negative part must be effective"
    assert is_nef(fan, positive), "Zariski positive part must be nef"
    return ZariskiPair(positive, negative)
