from __future__ import annotations

import random
from fractions import Fraction as Q

import pytest

from toricstab import (
    anticanonical,
    delta_pp_quotient,
    delta_prime_quotient,
    delta_quotient,
    delta_search,
    divisor,
    inequality_report,
    ray_divisor,
    s_invariant,
    star_subdivision,
)
from toricstab.errors import NotBigOnUnitInterval, ZeroDivisor, ZeroVector
from toricstab.thresholds import primitive_candidates


def test_s_invariant_values(p2, f1):
    k2, kf1 = anticanonical(p2), anticanonical(f1)
    assert s_invariant(p2, k2, (1, 0)) == 1
    assert s_invariant(p2, k2, (1, 1)) == 2
    assert s_invariant(f1, kf1, (1, 1)) == Q(7, 6)
    assert s_invariant(f1, kf1, (1, 0)) == Q(13, 12)
    with pytest.raises(ZeroVector):
        s_invariant(p2, k2, (0, 0))


def test_delta_quotient_values(p2, f1):
    k2, kf1 = anticanonical(p2), anticanonical(f1)
    assert delta_quotient(p2, k2, (1, 0)) == 1
    assert delta_quotient(p2, k2, (1, 1)) == 1
    assert delta_quotient(f1, kf1, (1, 1)) == Q(6, 7)


def test_primitive_candidates():
    cands = primitive_candidates(2, 1)
    assert set(cands) == {(-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)}
    assert (2, 2) not in primitive_candidates(2, 2)
    assert (2, 1) in primitive_candidates(2, 2)


def test_delta_search_p2(p2):
    report = delta_search(p2, anticanonical(p2), 2)
    assert report.delta_estimate == 1
    # the anticanonical barycenter sits at the origin: every candidate ties
    assert all(row.quotient == 1 for row in report.candidates)


def test_delta_search_f1(f1):
    report = delta_search(f1, anticanonical(f1), 2)
    assert report.delta_estimate == Q(6, 7)
    assert report.minimizer == (1, 1)


def test_delta_search_p1xp1(p1xp1):
    report = delta_search(p1xp1, anticanonical(p1xp1), 2)
    assert report.delta_estimate == 1


def test_delta_search_monotone_in_radius(f1):
    kf1 = anticanonical(f1)
    r2 = delta_search(f1, kf1, 2).delta_estimate
    r3 = delta_search(f1, kf1, 3).delta_estimate
    assert r3 <= r2
    assert r3 == Q(6, 7)


def test_delta_search_parallel_matches_serial(f1):
    kf1 = anticanonical(f1)
    serial = delta_search(f1, kf1, 2, jobs=1)
    parallel = delta_search(f1, kf1, 2, jobs=2)
    assert serial == parallel


def test_delta_pp_quotient_values(p2, f1):
    k2, kf1 = anticanonical(p2), anticanonical(f1)
    h, e = ray_divisor(p2, 0), ray_divisor(f1, 3)
    assert delta_pp_quotient(p2, k2, h) == 1
    assert delta_pp_quotient(f1, kf1, e) == Q(6, 7)
    assert delta_pp_quotient(p2, k2, h.scale(2)) == 1
    with pytest.raises(ZeroDivisor):
        delta_pp_quotient(p2, k2, divisor(p2, [0, 0, 0]))


def test_delta_pp_scaling_invariance(f1):
    kf1 = anticanonical(f1)
    e = ray_divisor(f1, 3)
    base = delta_pp_quotient(f1, kf1, e)
    for c in (Q(1, 2), 2, 3):
        assert delta_pp_quotient(f1, kf1, e.scale(c)) == base


def test_delta_prime_quotient_p2(p2):
    three_h = ray_divisor(p2, 0).scale(3)
    h = ray_divisor(p2, 0)
    assert delta_prime_quotient(p2, three_h, h) == Q(15, 7)
    # not invariant under rescaling the direction
    assert delta_prime_quotient(p2, three_h, h.scale(2)) != Q(15, 7)
    with pytest.raises(NotBigOnUnitInterval):
        delta_prime_quotient(p2, three_h, h.scale(4))


def test_delta_prime_numerator_route(p2):
    # for K_rel = 0 and integral reduced direction, the numerator matches
    # n * int_0^1 ((L - tau D) . D) dtau exactly
    from toricstab import big_volume, g_pairing, jtilde, truncated_curve, extended_curve
    from toricstab.volume_fn import fit_polynomial
    from toricstab import intersection_number

    three_h = ray_divisor(p2, 0).scale(3)
    h = ray_divisor(p2, 0)
    xs = [Q(1, 5), Q(1, 2)]
    ys = [intersection_number(p2, [three_h - h.scale(x), h], ample_ref=three_h) for x in xs]
    integral_route = 2 * fit_polynomial(xs, ys).integrate(0, 1)
    g_route = 2 * g_pairing(p2, three_h, h, h.reduced(), ample_ref=three_h)
    assert integral_route == g_route == 5
    denominator = big_volume(p2, three_h) * jtilde(truncated_curve(extended_curve(p2, three_h, h)))
    assert g_route / denominator == Q(15, 7)


def test_delta_prime_invariant_under_log_resolution(p2):
    # same data computed on the blowup model with its relative canonical
    fan, pull, k_rel = star_subdivision(p2, (1, 1))
    three_h = ray_divisor(p2, 0).scale(3)
    h = ray_divisor(p2, 0)
    upstairs = delta_prime_quotient(fan, pull(three_h), pull(h), k_rel=k_rel)
    assert upstairs == Q(15, 7)


def random_effective(fan, rng: random.Random):
    while True:
        coeffs = [Q(rng.choice([0, 0, 1, 1, 2]), rng.choice([1, 2, 3])) for _ in fan.rays]
        if any(coeffs):
            return divisor(fan, coeffs)


def test_inequalities_random_directions(surfaces):
    rng = random.Random(47)
    for fan in surfaces.values():
        k = anticanonical(fan)
        delta = delta_search(fan, k, 2).delta_estimate
        for _ in range(5):
            d = random_effective(fan, rng)
            assert delta_pp_quotient(fan, k, d) >= delta
            try:
                assert delta_prime_quotient(fan, k, d) >= delta
            except NotBigOnUnitInterval:
                pass


def test_inequality_report(f1):
    kf1 = anticanonical(f1)
    e = ray_divisor(f1, 3)
    report = inequality_report(
        f1, kf1, [("E", e), ("EplusF", e + ray_divisor(f1, 0))], 2
    )
    assert report.delta_estimate == Q(6, 7)
    assert all(v.holds for v in report.verdicts)
    assert any("equals delta" in v.description for v in report.verdicts)
    names = [row.name for row in report.directions]
    assert names == ["E", "EplusF"]


def test_inequality_report_p2_directions(p2):
    k2 = anticanonical(p2)
    h = ray_divisor(p2, 0)
    h1_plus_h2 = h + ray_divisor(p2, 1)
    report = inequality_report(
        p2, k2, [("H", h), ("2H", h.scale(2)), ("H1+H2", h1_plus_h2)], 2
    )
    assert report.delta_estimate == 1
    assert all(row.pp_quotient >= 1 for row in report.directions)
    assert all(v.holds for v in report.verdicts)


def test_inequality_report_empty_directions(p2):
    report = inequality_report(p2, anticanonical(p2), [], 2)
    assert report.delta_estimate == 1
    assert report.directions == ()
    assert report.verdicts == ()
