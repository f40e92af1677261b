"""Exact rational polytope kernel.

Vertex enumeration, volumes, linear statistics, lattice points, mixed volumes
and one-parameter polytope families, all in exact rational arithmetic.
Polytopes are stored in H-representation with cached vertices; inputs are
desk-scale (dimension <= 4, a few dozen halfspaces), so every algorithm here
prefers exhaustive enumeration over clever pivoting.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Iterable, Sequence

from .errors import (
    DegeneratePolytope,
    DimensionMismatch,
    OutOfRange,
    UnboundedRegion,
)

Rational = Fraction
Point = tuple[Fraction, ...]
LatticeVector = tuple[int, ...]


# --------------------------------------------------------------------------
# small exact linear algebra
# --------------------------------------------------------------------------

def dot(u: Sequence, v: Sequence) -> Fraction:
    return sum((Fraction(a) * Fraction(b) for a, b in zip(u, v)), Fraction(0))


def vec_sub(u: Sequence, v: Sequence) -> Point:
    return tuple(Fraction(a) - Fraction(b) for a, b in zip(u, v))


def vec_scale(c, u: Sequence) -> Point:
    c = Fraction(c)
    return tuple(c * Fraction(a) for a in u)


def content(u: Sequence[int]) -> int:
    g = 0
    for a in u:
        g = gcd(g, abs(a))
    return g


def is_primitive(u: Sequence[int]) -> bool:
    return content(u) == 1


def make_primitive(u: Sequence[int]) -> LatticeVector:
    g = content(u)
    if g == 0:
        raise ValueError("zero vector has no primitive representative")
    return tuple(a // g for a in u)


def det(rows: Sequence[Sequence]) -> Fraction:
    n = len(rows)
    m = [[Fraction(x) for x in row] for row in rows]
    result = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            m[col], m[pivot] = m[pivot], m[col]
            result = -result
        result *= m[col][col]
        inv = Fraction(1) / m[col][col]
        for r in range(col + 1, n):
            if m[r][col] != 0:
                factor = m[r][col] * inv
                m[r] = [a - factor * b for a, b in zip(m[r], m[col])]
    return result


def solve_linear(rows: Sequence[Sequence], rhs: Sequence) -> Point | None:
    """Solve the square system rows * x = rhs; None if singular."""
    n = len(rows)
    m = [[Fraction(x) for x in row] + [Fraction(rhs[i])] for i, row in enumerate(rows)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col] != 0), None)
        if pivot is None:
            return None
        m[col], m[pivot] = m[pivot], m[col]
        inv = Fraction(1) / m[col][col]
        m[col] = [a * inv for a in m[col]]
        for r in range(n):
            if r != col and m[r][col] != 0:
                factor = m[r][col]
                m[r] = [a - factor * b for a, b in zip(m[r], m[col])]
    return tuple(m[r][n] for r in range(n))


def _row_reduce(m: list[list[Fraction]]) -> list[int]:
    """In-place reduced row echelon form; returns the pivot columns."""
    pivots: list[int] = []
    row_idx = 0
    ncols = len(m[0]) if m else 0
    for col in range(ncols):
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
        if row_idx == len(m):
            break
    return pivots


def matrix_rank(rows: Sequence[Sequence]) -> int:
    if not rows:
        return 0
    m = [[Fraction(x) for x in row] for row in rows]
    return len(_row_reduce(m))


def kernel_vector(rows: Sequence[Sequence], n: int) -> LatticeVector | None:
    """A primitive integer spanning vector of a one-dimensional kernel, else None."""
    if not rows:
        return None if n != 1 else (1,)
    m = [[Fraction(x) for x in row] for row in rows]
    pivots = _row_reduce(m)
    free = [c for c in range(n) if c not in pivots]
    if len(free) != 1:
        return None
    fc = free[0]
    x = [Fraction(0)] * n
    x[fc] = Fraction(1)
    for r, pc in enumerate(pivots):
        x[pc] = -m[r][fc]
    denom = 1
    for a in x:
        denom = denom * a.denominator // gcd(denom, a.denominator)
    return make_primitive([int(a * denom) for a in x])


def affine_rank(points: Sequence[Point]) -> int:
    """Dimension of the affine hull of the point set (-1 when empty)."""
    if not points:
        return -1
    base = points[0]
    diffs = [vec_sub(p, base) for p in points[1:]]
    if not diffs:
        return 0
    return matrix_rank(diffs)


# --------------------------------------------------------------------------
# halfspaces and polytopes
# --------------------------------------------------------------------------

def _as_int(a) -> int:
    f = Fraction(a)
    if f.denominator != 1:
        raise ValueError(f"halfspace normals must be integral, got {a}")
    return int(f)


@dataclass(frozen=True)
class Halfspace:
    """The set {x : <x, normal> >= -offset} with an integer normal."""

    normal: LatticeVector
    offset: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "normal", tuple(_as_int(a) for a in self.normal))
        object.__setattr__(self, "offset", Fraction(self.offset))
        if all(a == 0 for a in self.normal):
            raise ValueError("halfspace normal must be nonzero")

    def slack(self, x: Sequence) -> Fraction:
        return dot(self.normal, x) + self.offset

    def contains(self, x: Sequence) -> bool:
        return self.slack(x) >= 0

    def normalized(self) -> Halfspace:
        g = content(self.normal)
        return Halfspace(tuple(a // g for a in self.normal), self.offset / g)


def _dedupe_halfspaces(halfspaces: Iterable[Halfspace]) -> tuple[Halfspace, ...]:
    # same normal: the binding constraint is the one with the smallest offset
    best: dict[LatticeVector, Fraction] = {}
    order: list[LatticeVector] = []
    for hs in halfspaces:
        hs = hs.normalized()
        if hs.normal not in best:
            best[hs.normal] = hs.offset
            order.append(hs.normal)
        elif hs.offset < best[hs.normal]:
            best[hs.normal] = hs.offset
    return tuple(Halfspace(u, best[u]) for u in order)


class _Infeasible(Exception):
    """Internal marker: Fourier-Motzkin derived 0 >= positive."""


def _fm_eliminate_last(halfspaces: Sequence[Halfspace], dim: int) -> list[Halfspace]:
    """Fourier-Motzkin elimination of the last coordinate.

    Raises _Infeasible when a contradictory constant constraint appears.
    """
    lower, upper, rest = [], [], []
    for hs in halfspaces:
        c = hs.normal[dim - 1]
        if c > 0:
            lower.append(hs)
        elif c < 0:
            upper.append(hs)
        else:
            rest.append(Halfspace(hs.normal[: dim - 1], hs.offset))
    out = list(rest)
    for lo in lower:
        cl = lo.normal[dim - 1]
        for up in upper:
            cu = -up.normal[dim - 1]
            normal = tuple(
                cu * lo.normal[j] + cl * up.normal[j] for j in range(dim - 1)
            )
            offset = cu * lo.offset + cl * up.offset
            if all(a == 0 for a in normal):
                if offset < 0:
                    raise _Infeasible
                continue
            out.append(Halfspace(normal, offset))
    return list(_dedupe_halfspaces(out))


def _feasible(halfspaces: Sequence[Halfspace], dim: int) -> bool:
    """Exact feasibility of an H-representation via full FM elimination."""
    current = list(halfspaces)
    d = dim
    try:
        while d > 1:
            current = _fm_eliminate_last(current, d)
            d -= 1
    except _Infeasible:
        return False
    lo, hi = None, None
    for hs in current:
        c = hs.normal[0]
        bound = -hs.offset / c
        if c > 0:
            lo = bound if lo is None else max(lo, bound)
        else:
            hi = bound if hi is None else min(hi, bound)
    if lo is not None and hi is not None:
        return lo <= hi
    return True


def _recession_nontrivial(halfspaces: Sequence[Halfspace], dim: int) -> bool:
    """Whether {x : <x,u_i> >= 0 for all i} contains a nonzero vector."""
    normals = [hs.normal for hs in halfspaces]
    if matrix_rank(normals) < dim:
        return True  # a kernel direction lies in the recession cone
    if dim == 1:
        pos = any(u[0] > 0 for u in normals)
        neg = any(u[0] < 0 for u in normals)
        return not (pos and neg)
    for subset in itertools.combinations(normals, dim - 1):
        d = kernel_vector(subset, dim)
        if d is None:
            continue
        if all(dot(u, d) >= 0 for u in normals):
            return True
        nd = tuple(-a for a in d)
        if all(dot(u, nd) >= 0 for u in normals):
            return True
    return False


def vertices_of(halfspaces: Sequence[Halfspace]) -> list[Point]:
    """Exact vertex set of a bounded halfspace intersection.

    Solves every n-subset basis and keeps the feasible solutions.  Raises
    UnboundedRegion when the intersection is nonempty but unbounded; an empty
    list means the intersection is empty.
    """
    halfspaces = list(halfspaces)
    if not halfspaces:
        raise UnboundedRegion("no halfspaces given")
    dim = len(halfspaces[0].normal)
    if any(len(hs.normal) != dim for hs in halfspaces):
        raise DimensionMismatch("halfspaces of mixed dimension")
    found: set[Point] = set()
    for subset in itertools.combinations(halfspaces, dim):
        x = solve_linear([hs.normal for hs in subset], [-hs.offset for hs in subset])
        if x is None:
            continue
        if all(hs.slack(x) >= 0 for hs in halfspaces):
            found.add(x)
    if found:
        if _recession_nontrivial(halfspaces, dim):
            raise UnboundedRegion("halfspace intersection is unbounded")
        return sorted(found)
    if _feasible(halfspaces, dim):
        raise UnboundedRegion("nonempty intersection without vertices is unbounded")
    return []


@dataclass(frozen=True)
class Polytope:
    """Bounded rational polytope: deduplicated H-rep plus cached vertex set."""

    halfspaces: tuple[Halfspace, ...]
    vertices: tuple[Point, ...]
    dimension: int

    @classmethod
    def from_halfspaces(cls, halfspaces: Sequence[Halfspace]) -> Polytope:
        clean = _dedupe_halfspaces(halfspaces)
        verts = vertices_of(clean)
        dim = len(clean[0].normal)
        return cls(clean, tuple(verts), dim)

    @classmethod
    def from_points(cls, points: Sequence[Sequence]) -> Polytope:
        pts = [tuple(Fraction(c) for c in p) for p in points]
        if not pts:
            raise DegeneratePolytope("empty point set")
        dim = len(pts[0])
        if affine_rank(pts) < dim:
            raise DegeneratePolytope("point set is not full-dimensional")
        return cls.from_halfspaces(hull_halfspaces(pts))

    @property
    def is_empty(self) -> bool:
        return not self.vertices

    @property
    def affine_dimension(self) -> int:
        return affine_rank(self.vertices)

    @property
    def is_full_dimensional(self) -> bool:
        return self.affine_dimension == self.dimension

    def contains(self, x: Sequence) -> bool:
        return all(hs.contains(x) for hs in self.halfspaces)

    def support_min(self, u: Sequence) -> Fraction:
        """min over the polytope of <x, u>; attained at a vertex."""
        if self.is_empty:
            raise DegeneratePolytope("empty polytope has no support values")
        return min(dot(v, u) for v in self.vertices)

    def support_max(self, u: Sequence) -> Fraction:
        if self.is_empty:
            raise DegeneratePolytope("empty polytope has no support values")
        return max(dot(v, u) for v in self.vertices)


def hull_halfspaces(points: Sequence[Point]) -> list[Halfspace]:
    """Facet H-representation of the convex hull of a full-dimensional point set."""
    pts = [tuple(Fraction(c) for c in p) for p in points]
    dim = len(pts[0])
    seen: set[tuple[LatticeVector, Fraction]] = set()
    out: list[Halfspace] = []
    for subset in itertools.combinations(pts, dim):
        if dim > 1:
            diffs = [vec_sub(p, subset[0]) for p in subset[1:]]
            if matrix_rank(diffs) != dim - 1:
                continue
            normal = kernel_vector(diffs, dim)
            if normal is None:
                continue
        else:
            normal = (1,)
        level = dot(normal, subset[0])
        values = [dot(normal, p) - level for p in pts]
        if all(v >= 0 for v in values):
            hs = Halfspace(normal, -level).normalized()
        elif all(v <= 0 for v in values):
            hs = Halfspace(tuple(-a for a in normal), level).normalized()
        else:
            continue
        key = (hs.normal, hs.offset)
        if key not in seen:
            seen.add(key)
            out.append(hs)
    return out


# --------------------------------------------------------------------------
# triangulation, volume, linear statistics
# --------------------------------------------------------------------------

def _substitute_halfspace(other: Halfspace, facet: Halfspace, k: int) -> Halfspace | None:
    """Eliminate coordinate k from `other` using equality on `facet`."""
    u, a = facet.normal, facet.offset
    w, b = other.normal, other.offset
    s = 1 if u[k] > 0 else -1
    normal = tuple(s * (u[k] * w[j] - w[k] * u[j]) for j in range(len(u)) if j != k)
    if all(c == 0 for c in normal):
        return None
    offset = s * (b * u[k] - a * w[k])
    return Halfspace(normal, offset)


def _lift_point(y: Point, facet: Halfspace, k: int) -> Point:
    u, a = facet.normal, facet.offset
    others = [j for j in range(len(u)) if j != k]
    rest = sum((u[j] * y[i] for i, j in enumerate(others)), Fraction(0))
    xk = (-a - rest) / u[k]
    return y[:k] + (xk,) + y[k:]


def _triangulate(
    halfspaces: Sequence[Halfspace], vertices: Sequence[Point], dim: int
) -> list[tuple[Point, ...]]:
    """Simplices covering the polytope, via cones from the lex-least vertex."""
    if dim == 1:
        xs = sorted(v[0] for v in vertices)
        if xs[0] == xs[-1]:
            return []
        return [((xs[0],), (xs[-1],))]
    v0 = min(vertices)
    simplices: list[tuple[Point, ...]] = []
    seen: set[tuple[Point, ...]] = set()
    for hs in halfspaces:
        if hs.slack(v0) == 0:
            continue
        tight = tuple(sorted(v for v in vertices if hs.slack(v) == 0))
        if len(tight) < dim or tight in seen:
            continue
        seen.add(tight)
        if affine_rank(tight) != dim - 1:
            continue
        k = max(range(dim), key=lambda j: abs(hs.normal[j]))
        sub_hs = []
        for other in halfspaces:
            if other is hs:
                continue
            sub = _substitute_halfspace(other, hs, k)
            if sub is not None:
                sub_hs.append(sub)
        proj = [v[:k] + v[k + 1 :] for v in tight]
        for face_simplex in _triangulate(_dedupe_halfspaces(sub_hs), proj, dim - 1):
            lifted = tuple(_lift_point(y, hs, k) for y in face_simplex)
            simplices.append((v0,) + lifted)
    return simplices


@lru_cache(maxsize=None)
def triangulation(p: Polytope) -> tuple[tuple[Point, ...], ...]:
    """Deterministic exact triangulation of a full-dimensional polytope."""
    if not p.is_full_dimensional:
        return ()
    return tuple(_triangulate(p.halfspaces, p.vertices, p.dimension))


def simplex_volume(simplex: Sequence[Point]) -> Fraction:
    base = simplex[0]
    rows = [vec_sub(v, base) for v in simplex[1:]]
    return abs(det(rows)) / math.factorial(len(rows))


@lru_cache(maxsize=None)
def volume(p: Polytope) -> Fraction:
    """Exact Euclidean volume; 0 for empty or lower-dimensional polytopes."""
    if p.is_empty or not p.is_full_dimensional:
        return Fraction(0)
    return sum((simplex_volume(s) for s in triangulation(p)), Fraction(0))


def linear_moment(p: Polytope, u: Sequence) -> Fraction:
    """Exact integral of x -> <x, u> over the polytope."""
    total = Fraction(0)
    for simplex in triangulation(p):
        centroid = vec_scale(Fraction(1, len(simplex)), [sum(c) for c in zip(*simplex)])
        total += simplex_volume(simplex) * dot(centroid, u)
    return total


def linear_stats(p: Polytope, u: Sequence) -> tuple[Fraction, Fraction, Fraction]:
    """(min, volume-average, max) of x -> <x, u> over a full-dimensional polytope."""
    vol = volume(p)
    if vol == 0:
        raise DegeneratePolytope("linear_stats requires positive volume")
    lo = p.support_min(u)
    hi = p.support_max(u)
    mean = linear_moment(p, u) / vol
    return lo, mean, hi


def lattice_points(p: Polytope) -> list[LatticeVector]:
    """All integer points of the polytope, lexicographically sorted."""
    if p.is_empty:
        return []
    n = p.dimension
    ranges = []
    for j in range(n):
        coords = [v[j] for v in p.vertices]
        ranges.append(range(math.ceil(min(coords)), math.floor(max(coords)) + 1))
    return [pt for pt in itertools.product(*ranges) if p.contains(pt)]


# --------------------------------------------------------------------------
# Minkowski sums and mixed volume
# --------------------------------------------------------------------------

def minkowski_sum(p: Polytope, q: Polytope) -> Polytope:
    """Exact Minkowski sum, by eliminating y from {(z, y) : z - y in P, y in Q}."""
    if p.dimension != q.dimension:
        raise DimensionMismatch("Minkowski summands must share a dimension")
    n = p.dimension
    lifted: list[Halfspace] = []
    for hs in p.halfspaces:
        lifted.append(Halfspace(hs.normal + tuple(-a for a in hs.normal), hs.offset))
    for hs in q.halfspaces:
        lifted.append(Halfspace((0,) * n + hs.normal, hs.offset))
    current = lifted
    d = 2 * n
    try:
        while d > n:
            current = _fm_eliminate_last(current, d)
            d -= 1
    except _Infeasible as exc:
        raise DegeneratePolytope("Minkowski sum of an empty polytope") from exc
    return Polytope.from_halfspaces(current)


def mixed_volume(polytopes: Sequence[Polytope]) -> Fraction:
    """Normalized mixed volume with MV(P, ..., P) = n! * volume(P).

    Computed by inclusion-exclusion polarization over Minkowski sums of the
    input polytopes; exact, and exponential only in the ambient dimension.
    """
    n = len(polytopes)
    for p in polytopes:
        if p.dimension != n:
            raise DimensionMismatch(
                f"need {n} polytopes in dimension {n}, got dimension {p.dimension}"
            )
        if p.is_empty:
            raise DegeneratePolytope("mixed volume of an empty polytope")
    sums: dict[frozenset[int], Polytope] = {}

    def partial_sum(indices: frozenset[int]) -> Polytope:
        if indices not in sums:
            idx = sorted(indices)
            acc = polytopes[idx[0]]
            for i in idx[1:]:
                acc = minkowski_sum(acc, polytopes[i])
            sums[indices] = acc
        return sums[indices]

    total = Fraction(0)
    for size in range(1, n + 1):
        sign = (-1) ** (n - size)
        for combo in itertools.combinations(range(n), size):
            total += sign * volume(partial_sum(frozenset(combo)))
    return total


# --------------------------------------------------------------------------
# one-parameter families
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ParametricHalfspace:
    """The family {x : <x, normal> >= -(offset - t * rate)}."""

    normal: LatticeVector
    offset: Fraction
    rate: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "normal", tuple(_as_int(a) for a in self.normal))
        object.__setattr__(self, "offset", Fraction(self.offset))
        object.__setattr__(self, "rate", Fraction(self.rate))

    def at(self, t) -> Halfspace:
        return Halfspace(self.normal, self.offset - Fraction(t) * self.rate)


@dataclass(frozen=True)
class VertexPath:
    """An affine vertex trajectory t -> base + t * velocity."""

    base: Point
    velocity: Point

    def at(self, t) -> Point:
        t = Fraction(t)
        return tuple(b + t * v for b, v in zip(self.base, self.velocity))


@dataclass(frozen=True)
class Chamber:
    lo: Fraction
    hi: Fraction
    paths: tuple[VertexPath, ...]

    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def sample_points(self, count: int) -> list[Fraction]:
        """count rationals strictly inside the chamber."""
        width = self.hi - self.lo
        return [self.lo + width * Fraction(i + 1, count + 1) for i in range(count)]


@dataclass(frozen=True)
class ParametricPolytope:
    """A one-parameter halfspace family with its exact chamber decomposition.

    `chambers` cover [t_min, chamber_end]; `t_max` is the exact feasibility
    threshold of the family, or None when the family stays feasible for all
    large t (then the chambers stop at an arbitrary requested window end).
    """

    halfspaces: tuple[ParametricHalfspace, ...]
    chambers: tuple[Chamber, ...]
    t_min: Fraction
    t_max: Fraction | None
    dimension: int

    @property
    def chamber_end(self) -> Fraction:
        return self.chambers[-1].hi

    def polytope_at(self, t) -> Polytope:
        return Polytope.from_halfspaces([hs.at(t) for hs in self.halfspaces])

    def chamber_at(self, t) -> Chamber:
        t = Fraction(t)
        for ch in self.chambers:
            if ch.lo <= t <= ch.hi:
                return ch
        raise OutOfRange(f"parameter {t} lies outside [{self.t_min}, {self.chamber_end}]")


def _basis_paths(
    halfspaces: Sequence[ParametricHalfspace], dim: int
) -> list[tuple[VertexPath, Fraction | None, Fraction | None]]:
    """All basic solution paths with their exact feasibility t-intervals."""
    out = []
    for subset in itertools.combinations(halfspaces, dim):
        rows = [hs.normal for hs in subset]
        base = solve_linear(rows, [-hs.offset for hs in subset])
        if base is None:
            continue
        velocity = solve_linear(rows, [hs.rate for hs in subset])
        assert velocity is not None
        path = VertexPath(base, velocity)
        lo: Fraction | None = None
        hi: Fraction | None = None
        empty = False
        for hs in halfspaces:
            c0 = dot(hs.normal, base) + hs.offset
            c1 = dot(hs.normal, velocity) - hs.rate
            if c1 == 0:
                if c0 < 0:
                    empty = True
                    break
            elif c1 > 0:
                bound = -c0 / c1
                lo = bound if lo is None else max(lo, bound)
            else:
                bound = -c0 / c1
                hi = bound if hi is None else min(hi, bound)
        if empty or (lo is not None and hi is not None and lo > hi):
            continue
        out.append((path, lo, hi))
    return out


def parametric_family(
    halfspaces: Sequence[Halfspace],
    rates: Sequence,
    start=Fraction(0),
    stop=None,
) -> ParametricPolytope:
    """Exact chamber decomposition of {<x,u_i> >= -(a_i - t d_i)} from t = start.

    Without `stop`, the chambers run up to the feasibility threshold t_max,
    which must be finite (UnboundedRegion otherwise).  With `stop`, the window
    is truncated at min(stop, t_max), which permits families that grow with t;
    t_max is then recorded as None.  A zero-rate family gets a single window
    chamber with constant vertices.  Within each chamber every vertex follows
    a single affine path.
    """
    start = Fraction(start)
    if len(rates) != len(halfspaces):
        raise DimensionMismatch("one rate per halfspace required")
    phs = tuple(
        ParametricHalfspace(hs.normal, hs.offset, rate)
        for hs, rate in zip(halfspaces, rates)
    )
    dim = len(phs[0].normal)
    base_poly = Polytope.from_halfspaces([hs.at(start) for hs in phs])
    if base_poly.is_empty:
        raise DegeneratePolytope("family is infeasible at the start parameter")
    if all(hs.rate == 0 for hs in phs):
        end = Fraction(stop) if stop is not None else start + 1
        paths = tuple(VertexPath(v, (Fraction(0),) * dim) for v in base_poly.vertices)
        return ParametricPolytope(phs, (Chamber(start, end, paths),), start, None, dim)
    bases = _basis_paths(phs, dim)
    t_max: Fraction | None = None
    unbounded_above = False
    for _path, _lo, hi in bases:
        if hi is None:
            unbounded_above = True
        elif t_max is None or hi > t_max:
            t_max = hi
    if unbounded_above:
        t_max = None
        if stop is None:
            raise UnboundedRegion("family remains feasible for arbitrarily large t")
        end = Fraction(stop)
    else:
        assert t_max is not None
        if t_max < start:
            raise DegeneratePolytope("family has no feasible parameters beyond start")
        end = t_max if stop is None else min(Fraction(stop), t_max)
    walls = {start, end}
    for _path, lo, hi in bases:
        for w in (lo, hi):
            if w is not None and start < w < end:
                walls.add(w)
    ordered = sorted(walls)
    chambers = []
    for left, right in zip(ordered, ordered[1:]):
        active = []
        seen_path = set()
        for path, lo, hi in bases:
            if (lo is None or lo <= left) and (hi is None or right <= hi):
                key = (path.base, path.velocity)
                if key not in seen_path:
                    seen_path.add(key)
                    active.append(path)
        chambers.append(Chamber(left, right, tuple(active)))
    if not chambers:
        # start == end: a single point of feasibility
        chambers = [Chamber(start, end, tuple())]
    return ParametricPolytope(phs, tuple(chambers), start, t_max, dim)
