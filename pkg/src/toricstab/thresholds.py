"""Stability thresholds: expected vanishing orders, quotient searches, reports.

The candidate search runs over primitive lattice vectors in a sup-norm ball;
the reported minimum is exact over that candidate family and is a certified
upper bound for the infimum over all valuations (lattice candidates suffice
for toric data, an assumption every report records).
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import NotAmple, NotBigOnUnitInterval, ZeroDivisor, ZeroVector
from .filtrations import filtration_curve
from .geometry import is_primitive, linear_stats
from .toric import (
    Fan,
    ToricDivisor,
    intersection_number,
    is_ample,
    log_discrepancy,
    polytope_of,
)
from .test_curves import (
    entropy,
    extended_curve,
    g_pairing,
    jtilde,
    truncated_curve,
)
from .volume_fn import big_volume


STANDARD_ASSUMPTIONS = (
    "candidates are lattice (toric) valuations; the reported minimum certifies "
    "an upper bound for the infimum over all valuations",
    "expected vanishing orders are normalized by the total volume "
    "(S = mean - min of the support pairing over the section polytope)",
)


def s_invariant(fan: Fan, l: ToricDivisor, u: Sequence[int]) -> Fraction:
    """Normalized expected vanishing order (1/V) int_0^inf vol(L - t u) dt.

    Computed both as the slice-curve integral and as mean - min of the
    support pairing over the section polytope; the two exact routes must
    agree.
    """
    if all(a == 0 for a in u):
        raise ZeroVector("direction must be nonzero")
    if not is_ample(fan, l):
        raise NotAmple("polarization is not big and nef")
    p = polytope_of(fan, l)
    lo, mean, _hi = linear_stats(p, u)
    stats_route = mean - lo
    curve = filtration_curve(fan, l, u)
    v = big_volume(fan, l)
    integral_route = curve.integrate() / v
    assert stats_route == integral_route, "the two S routes must agree exactly"
    return stats_route


def delta_quotient(fan: Fan, l: ToricDivisor, u: Sequence[int]) -> Fraction:
    """log_discrepancy / s_invariant for one lattice direction."""
    return log_discrepancy(fan, u) / s_invariant(fan, l, u)


def primitive_candidates(dimension: int, radius: int) -> list[tuple[int, ...]]:
    """All primitive vectors with sup-norm at most radius, sorted by (norm, lex)."""
    out = []
    for v in itertools.product(range(-radius, radius + 1), repeat=dimension):
        if any(v) and is_primitive(v):
            out.append(v)
    return sorted(out, key=lambda v: (max(abs(a) for a in v), v))


@dataclass(frozen=True)
class CandidateRow:
    u: tuple[int, ...]
    log_discrepancy: Fraction
    s_value: Fraction
    quotient: Fraction


@dataclass(frozen=True)
class DirectionRow:
    name: str
    pp_quotient: Fraction | None
    prime_quotient: Fraction | None


@dataclass(frozen=True)
class Verdict:
    description: str
    left: Fraction
    right: Fraction
    holds: bool


@dataclass(frozen=True)
class ThresholdReport:
    delta_estimate: Fraction
    minimizer: tuple[int, ...]
    candidates: tuple[CandidateRow, ...]
    directions: tuple[DirectionRow, ...] = ()
    verdicts: tuple[Verdict, ...] = ()
    assumptions: tuple[str, ...] = STANDARD_ASSUMPTIONS

    def __post_init__(self) -> None:
        best = min(row.quotient for row in self.candidates)
        if best != self.delta_estimate:
            raise ValueError("delta estimate must be the minimum of the quotient column")


def _candidate_row(args) -> CandidateRow:
    fan, l, u = args
    a = log_discrepancy(fan, u)
    s = s_invariant(fan, l, u)
    return CandidateRow(u=u, log_discrepancy=a, s_value=s, quotient=a / s)


def delta_search(fan: Fan, l: ToricDivisor, radius: int, jobs: int = 1) -> ThresholdReport:
    """Exact minimum of the quotient over primitive lattice candidates in a ball.

    Candidate evaluation is embarrassingly parallel; rows are assembled in the
    deterministic (norm, lex) candidate order regardless of jobs.
    """
    if radius < 1:
        raise ValueError("radius must be at least 1")
    candidates = primitive_candidates(fan.dimension, radius)
    args = [(fan, l, u) for u in candidates]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_candidate_row, args, chunksize=8))
    else:
        rows = [_candidate_row(a) for a in args]
    best = min(rows, key=lambda row: row.quotient)
    return ThresholdReport(
        delta_estimate=best.quotient,
        minimizer=next(r.u for r in rows if r.quotient == best.quotient),
        candidates=tuple(rows),
    )


def delta_pp_quotient(
    fan: Fan,
    l: ToricDivisor,
    d: ToricDivisor,
    k_rel: ToricDivisor | None = None,
) -> Fraction:
    """entropy / jtilde of the extended curve along D; invariant under scaling D."""
    if d.is_zero:
        raise ZeroDivisor("direction divisor is zero")
    curve = extended_curve(fan, l, d, k_rel=k_rel)
    return entropy(curve) / jtilde(curve)


def delta_prime_quotient(
    fan: Fan,
    l: ToricDivisor,
    d: ToricDivisor,
    k_rel: ToricDivisor | None = None,
) -> Fraction:
    """The unit-interval quotient; not invariant under rescaling D.

    Numerator: (K_rel . (-D)^{n-1}) + n * (G_{n-1}(L, D) . Red D), with the
    averaging polynomial expanded multilinearly.  Denominator:
    n * int_0^1 ((L . P_tau^{n-1}) - P_tau^n) dtau = V * jtilde(truncated).
    """
    if d.is_zero:
        raise ZeroDivisor("direction divisor is zero")
    n = fan.dimension
    if k_rel is None:
        k_rel = ToricDivisor(fan, (Fraction(0),) * len(fan.rays))
    extended = extended_curve(fan, l, d, k_rel=k_rel)
    if extended.tau_plus < 1:
        raise NotBigOnUnitInterval(
            f"family degenerates at tau+ = {extended.tau_plus} < 1"
        )
    truncated = truncated_curve(extended)
    v = big_volume(fan, l)
    denominator = v * jtilde(truncated)
    numerator = Fraction(0)
    if not k_rel.is_zero:
        numerator += intersection_number(
            fan, [k_rel] + [-d] * (n - 1), ample_ref=l
        )
    numerator += n * g_pairing(fan, l, d, d.reduced(), ample_ref=l)
    return numerator / denominator


def inequality_report(
    fan: Fan,
    l: ToricDivisor,
    directions: Sequence[tuple[str, ToricDivisor]],
    radius: int,
    jobs: int = 1,
) -> ThresholdReport:
    """Candidate search plus per-direction quotients and exact inequality verdicts.

    For each direction D the report asserts delta <= pp-quotient(D) and
    delta <= prime-quotient(D); when the polarization is anticanonical and the
    minimizer is a ray of the fan, the minimum of the pp column over the
    directions extended by that ray divisor must equal delta exactly.
    """
    base = delta_search(fan, l, radius, jobs=jobs)
    if not directions:
        return base
    delta = base.delta_estimate
    rows: list[DirectionRow] = []
    verdicts: list[Verdict] = []
    for name, d in directions:
        pp = delta_pp_quotient(fan, l, d)
        try:
            prime = delta_prime_quotient(fan, l, d)
        except NotBigOnUnitInterval:
            prime = None
        rows.append(DirectionRow(name=name, pp_quotient=pp, prime_quotient=prime))
        verdicts.append(
            Verdict(
                description=f"pp-quotient({name}) >= delta",
                left=pp,
                right=delta,
                holds=pp >= delta,
            )
        )
        if prime is not None:
            verdicts.append(
                Verdict(
                    description=f"prime-quotient({name}) >= delta",
                    left=prime,
                    right=delta,
                    holds=prime >= delta,
                )
            )
    anti = ToricDivisor(fan, (Fraction(1),) * len(fan.rays))
    if l.coeffs == anti.coeffs and base.minimizer in fan.rays:
        index = fan.rays.index(base.minimizer)
        coeffs = [Fraction(0)] * len(fan.rays)
        coeffs[index] = Fraction(1)
        ray_dir = ToricDivisor(fan, tuple(coeffs))
        pp_values = [row.pp_quotient for row in rows if row.pp_quotient is not None]
        pp_values.append(delta_pp_quotient(fan, l, ray_dir))
        verdicts.append(
            Verdict(
                description="min pp-quotient over directions + minimizing ray equals delta",
                left=min(pp_values),
                right=delta,
                holds=min(pp_values) == delta,
            )
        )
    return ThresholdReport(
        delta_estimate=delta,
        minimizer=base.minimizer,
        candidates=base.candidates,
        directions=tuple(rows),
        verdicts=tuple(verdicts),
        assumptions=STANDARD_ASSUMPTIONS
        + (
            "pp- and prime-quotients are evaluated on the user-supplied direction "
            "family; an exhaustive search over all singularity data is not attempted",
        ),
    )
