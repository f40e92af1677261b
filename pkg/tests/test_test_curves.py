from __future__ import annotations

import random
from fractions import Fraction as Q

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from toricstab import (
    Polynomial,
    alpha_energy,
    anticanonical,
    big_volume,
    curve_summary,
    dh_measure,
    divisor,
    energy,
    energy_from_dh,
    entropy,
    entropy_at,
    extended_curve,
    filtration_curve,
    g_pairing,
    g_polynomial,
    intersection_number,
    jtilde,
    mass,
    positive_pairing,
    ray_divisor,
    ricci_energy,
    star_subdivision,
    truncated_curve,
    twisted_mabuchi,
    zariski_decompose,
    zero_divisor,
)
from toricstab.errors import OutOfRange, RangeTooShort, ZeroDivisor


@pytest.fixture(scope="module")
def p2_h_curve(p2):
    return extended_curve(p2, anticanonical(p2), ray_divisor(p2, 0))


@pytest.fixture(scope="module")
def f1_e_curve(f1):
    return extended_curve(f1, anticanonical(f1), ray_divisor(f1, 3))


@pytest.fixture(scope="module")
def f1_fiber_curve(f1):
    return extended_curve(f1, anticanonical(f1), ray_divisor(f1, 0))


def test_extended_curve_basic(p2_h_curve, f1_e_curve):
    assert p2_h_curve.tau_plus == 3
    assert f1_e_curve.tau_plus == 2
    assert p2_h_curve.mass_curve().normalized().pieces == (Polynomial.of(9, -6, 1),)
    assert f1_e_curve.mass_curve().normalized().pieces == (Polynomial.of(8, -2, -1),)


def test_extended_curve_rejects_zero_direction(p2):
    with pytest.raises(ZeroDivisor):
        extended_curve(p2, anticanonical(p2), zero_divisor(p2))


def test_mass_values(p2_h_curve, f1_e_curve):
    assert mass(p2_h_curve, 1) == 4
    assert mass(p2_h_curve, 0) == 9
    assert mass(p2_h_curve, -2) == 9
    assert mass(f1_e_curve, 2) == 0
    with pytest.raises(OutOfRange):
        mass(f1_e_curve, Q(5, 2))


def test_truncated_curve(p2_h_curve, f1_e_curve, f1):
    t = truncated_curve(p2_h_curve)
    assert t.tau_plus == 1 and t.kind == "truncated"
    assert mass(t, Q(1, 2)) == Q(25, 4)
    tf = truncated_curve(f1_e_curve)
    assert tf.mass_curve().normalized().pieces == (Polynomial.of(8, -2, -1),)
    short = extended_curve(f1, anticanonical(f1), ray_divisor(f1, 3).scale(4))
    assert short.tau_plus == Q(1, 2)
    with pytest.raises(RangeTooShort):
        truncated_curve(short)


def test_energy(p2_h_curve, f1_e_curve):
    assert energy(p2_h_curve) == 1
    assert energy(f1_e_curve) == Q(7, 6)


def test_energy_matches_mass_integral(p2_h_curve, f1_fiber_curve):
    for curve in (p2_h_curve, f1_fiber_curve):
        v = curve.total_volume
        integral = curve.mass_curve().integrate() / v
        assert energy(curve) == integral


def test_alpha_energy(p2, p2_h_curve):
    k2 = anticanonical(p2)
    assert alpha_energy(p2_h_curve, k2) == Q(3, 2)
    assert alpha_energy(p2_h_curve, ray_divisor(p2, 0).scale(3)) == Q(3, 2)
    assert alpha_energy(p2_h_curve, zero_divisor(p2)) == 0


def test_ricci_energy_and_mabuchi(p2_h_curve):
    assert ricci_energy(p2_h_curve) == -3
    assert twisted_mabuchi(p2_h_curve) == -2


def test_ricci_and_mabuchi_f1(f1, f1_e_curve):
    # E^omega = 7/4 by chamber integration: 2 + (1/8) int_0^2 (-tau) dtau
    assert alpha_energy(f1_e_curve, anticanonical(f1)) == Q(7, 4)
    assert ricci_energy(f1_e_curve) == Q(-7, 2)
    assert twisted_mabuchi(f1_e_curve) == Q(-5, 2)


def test_jtilde(p2_h_curve, f1_e_curve):
    assert jtilde(p2_h_curve) == 1
    assert jtilde(f1_e_curve) == Q(7, 6)


def test_jtilde_identity(surfaces):
    # n (E^omega - E) route must agree exactly
    rng = random.Random(19)
    for fan in surfaces.values():
        k = anticanonical(fan)
        for _ in range(3):
            d = divisor(fan, [rng.choice([0, 1, 2]) for _ in fan.rays])
            if d.is_zero:
                continue
            curve = extended_curve(fan, k, d)
            n = fan.dimension
            assert jtilde(curve) == n * (alpha_energy(curve, k) - energy(curve))
            assert jtilde(curve) >= 0


def test_jtilde_identity_for_truncated(p2, p2_h_curve):
    # E^omega(trunc) = 5/6 and E(trunc) = 19/27 by hand integration on [0,1]
    t = truncated_curve(p2_h_curve)
    assert energy(t) == Q(19, 27)
    assert alpha_energy(t, anticanonical(p2)) == Q(5, 6)
    assert jtilde(t) == 2 * (alpha_energy(t, anticanonical(p2)) - energy(t)) == Q(7, 27)


def test_entropy_at_values(p2_h_curve, f1_e_curve):
    assert entropy_at(p2_h_curve, 1) == Q(4, 9)
    # tau -> 0+ limit along samples approaches 2/3
    assert entropy_at(p2_h_curve, Q(1, 100)) == Q(2, 9) * (3 - Q(1, 100))
    for tau in (Q(1, 3), Q(1, 2), 1, Q(3, 2)):
        assert entropy_at(f1_e_curve, tau) == Q(1, 4) * (1 + tau)
    with pytest.raises(OutOfRange):
        entropy_at(p2_h_curve, 0)
    with pytest.raises(OutOfRange):
        entropy_at(p2_h_curve, 3)


def test_entropy(p2_h_curve, f1_e_curve, f1_fiber_curve):
    assert entropy(p2_h_curve) == 1
    assert entropy(f1_e_curve) == 1
    assert entropy(f1_fiber_curve) == 1


def test_entropy_at_matches_zariski_intersection(f1, f1_fiber_curve):
    # dual route: the derivative pairing equals the positive-part pairing
    kf1 = anticanonical(f1)
    curve = f1_fiber_curve
    for tau in (Q(1, 2), Q(3, 2), Q(5, 2)):
        ch = curve.chamber_at(tau)
        direction = zero_divisor(f1) + divisor(
            f1, [1 if i in ch.red_support else 0 for i in range(len(f1.rays))]
        )
        pair = zariski_decompose(f1, kf1 - ray_divisor(f1, 0).scale(tau))
        expected = 2 * intersection_number(
            f1, [pair.positive, direction], ample_ref=kf1
        ) / Q(8)
        assert entropy_at(curve, tau) == expected


def test_coefficient_one_identity(p2, f1):
    # entropy / jtilde equals log-discrepancy / expected-vanishing for
    # a single prime divisor with coefficient 1
    from toricstab import delta_quotient

    k2, kf1 = anticanonical(p2), anticanonical(f1)
    cases = [
        (p2, k2, 0, (1, 0)),
        (f1, kf1, 3, (1, 1)),
        (f1, kf1, 0, (1, 0)),
    ]
    for fan, k, ray_index, u in cases:
        curve = extended_curve(fan, k, ray_divisor(fan, ray_index))
        assert entropy(curve) / jtilde(curve) == delta_quotient(fan, k, u)


def test_scaling_invariance_of_entropy_jtilde_quotient(f1):
    kf1 = anticanonical(f1)
    e = ray_divisor(f1, 3)
    base = extended_curve(f1, kf1, e)
    quotient = entropy(base) / jtilde(base)
    for c in (Q(1, 2), 2, 3):
        scaled = extended_curve(f1, kf1, e.scale(c))
        assert entropy(scaled) / jtilde(scaled) == quotient


def test_energy_dh_consistency(surfaces):
    for fan in surfaces.values():
        k = anticanonical(fan)
        v = big_volume(fan, k)
        for i, ray in enumerate(fan.rays):
            curve = extended_curve(fan, k, ray_divisor(fan, i))
            nu = dh_measure(filtration_curve(fan, k, ray), v)
            assert energy(curve) == energy_from_dh(nu)


def test_functionals_invariant_under_pullback(p2, f1):
    # the P2 ray curve, recomputed on the blowup model with its relative canonical
    fan, pull, k_rel = star_subdivision(p2, (1, 1))
    k2 = anticanonical(p2)
    h = ray_divisor(p2, 0)
    downstairs = extended_curve(p2, k2, h)
    upstairs = extended_curve(fan, pull(k2), pull(h), k_rel=k_rel)
    assert upstairs.tau_plus == downstairs.tau_plus
    assert energy(upstairs) == energy(downstairs)
    assert jtilde(upstairs) == jtilde(downstairs)
    assert alpha_energy(upstairs, pull(k2)) == alpha_energy(downstairs, k2)
    assert entropy(upstairs) == entropy(downstairs)
    assert ricci_energy(upstairs) == ricci_energy(downstairs)
    assert twisted_mabuchi(upstairs) == twisted_mabuchi(downstairs)


def test_curve_summary(p2_h_curve):
    summary = curve_summary(p2_h_curve)
    assert summary.energy == 1
    assert summary.omega_energy == Q(3, 2)
    assert summary.jtilde == 1
    assert summary.entropy == 1
    assert summary.ricci_energy == -3
    assert summary.twisted_mabuchi == -2


def test_degenerate_direction_zero_functionals(p2):
    # mass identically V: curve with tau+ = 0 is rejected as a zero direction
    with pytest.raises(ZeroDivisor):
        extended_curve(p2, anticanonical(p2), zero_divisor(p2))


# ---- the averaging polynomial ----------------------------------------------

def test_g_polynomial_values():
    assert g_polynomial(3, 1, 2) == Q(5, 2)
    assert g_polynomial(1, 1, 3) == Q(1, 3)
    assert g_polynomial(5, 0, 4) == 125


rationals = st.fractions(
    min_value=-10, max_value=10, max_denominator=12
)


@settings(max_examples=100, deadline=None)
@given(a=rationals, b=rationals, n=st.integers(min_value=1, max_value=5))
def test_g_polynomial_is_average_of_powers(a, b, n):
    # int_0^1 (a - t b)^{n-1} dt computed symbolically
    base = Polynomial.of(a, -b)
    prod = Polynomial.of(1)
    for _ in range(n - 1):
        prod = prod * base
    assert prod.integrate(0, 1) == g_polynomial(a, b, n)


def test_g_pairing_divisor_route(p2):
    # 2 * int_0^1 ((3H - tau H) . H) dtau = 2 G_1(3,1) = 5
    k2 = anticanonical(p2)
    h = ray_divisor(p2, 0)
    val = g_pairing(p2, k2, h, h)
    assert 2 * val == 5
    samples = [
        intersection_number(p2, [k2 - h.scale(t), h], ample_ref=k2)
        for t in (Q(1, 4), Q(3, 4))
    ]
    from toricstab.volume_fn import fit_polynomial

    integral = fit_polynomial([Q(1, 4), Q(3, 4)], samples).integrate(0, 1)
    assert integral == val


def test_entropy_at_derivative_mechanism(p2, p2_h_curve):
    # entropy density = (1/V) d/deps vol(L - tau D + eps * sum A_X(F) F_red)
    k2 = anticanonical(p2)
    h = ray_divisor(p2, 0)
    for tau in (Q(1, 2), 1, 2):
        direction = h.reduced()  # A_X = 1 on the single component
        value = positive_pairing(p2, k2 - h.scale(tau), direction)
        assert entropy_at(p2_h_curve, tau) == 2 * value / 9
