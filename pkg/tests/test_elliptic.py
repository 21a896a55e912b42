"""Curve layer: group law over precision-aware scalars, point counts, the
formal disk, and the degree-2 isogeny with its exact point transport."""

import random

import pytest

from arithpvi.elliptic import EllipticCurve, Point, TwoIsogeny, padic_sqrt
from arithpvi.errors import (
    PoleError,
    UnsupportedRegimeError,
    ValidationError,
)
from arithpvi.padic import PadicScalar


def _curve(p=5, digits=12, roots=(0, 1, -1)):
    return EllipticCurve(p, digits, roots)


def _sample_points(E, rng, n):
    pts = [xy for xy in E.points_mod_p() if xy[1] % E.p != 0]
    out = []
    for _ in range(n):
        x, y = pts[rng.randrange(len(pts))]
        out.append(E.lift_point(x, y))
    return out


# -- construction and counting -------------------------------------------------

def test_coefficients_from_roots():
    E = _curve()
    # 4x(x-1)(x+1) = 4x^3 - 4x
    assert E.a.congruent(PadicScalar.from_int(-4, 5, 12), 12)
    assert E.b.is_zero or E.b.valuation() >= 12


def test_colliding_roots_rejected():
    with pytest.raises(ValidationError):
        EllipticCurve(5, 8, (1, 2, -3))


def test_roots_must_sum_to_zero():
    with pytest.raises(ValidationError):
        EllipticCurve(5, 8, (0, 1, 2))


def test_point_counts_and_traces():
    frozen = {
        (5, (0, 1, -1)): 8,
        (5, (0, 2, -2)): 4,
        (7, (1, 2, -3)): 4,
        (13, (0, 1, -1)): 8,
    }
    for (p, roots), n in frozen.items():
        E = EllipticCurve(p, 8, roots)
        assert E.count_points() == n
        assert E.trace() == p + 1 - n
        assert E.hasse_bound_holds()


def test_ordinary_and_supersingular_classification():
    assert _curve().is_ordinary()
    assert not EllipticCurve(7, 8, (0, 1, -1)).is_ordinary()
    # full rational 2-torsion forces 4 | #E, which together with the
    # Hasse bound rules out trace 1: no curve here is anomalous
    for p in (5, 7, 11, 13):
        for roots in ((0, 1, -1), (0, 2, -2), (1, 2, -3), (1, 3, -4)):
            try:
                E = EllipticCurve(p, 8, roots)
            except ValidationError:
                continue
            assert not E.is_anomalous()
            assert E.count_points() % 4 == 0


# -- group law -----------------------------------------------------------------

def test_lifted_points_satisfy_the_equation():
    rng = random.Random(5001)
    E = _curve()
    for P in _sample_points(E, rng, 10):
        assert P.on_curve(12)


def test_group_law_matches_residue_law():
    rng = random.Random(5002)
    E = _curve()
    for _ in range(25):
        P, Q = _sample_points(E, rng, 2)
        S = P + Q
        assert E.reduction(S) == E.fp_add(E.reduction(P), E.reduction(Q))


def test_group_law_associativity():
    rng = random.Random(5003)
    E = _curve()
    for _ in range(10):
        P, Q, R = _sample_points(E, rng, 3)
        lhs = (P + Q) + R
        rhs = P + (Q + R)
        assert lhs.congruent(rhs, 10)


def test_scalar_multiples_survive_near_torsion_chains():
    # multiples pass through the origin disk (the reduction has order 4),
    # so chords repeatedly divide by positive-valuation differences; the
    # fraction-field slopes must keep enough digits for the recursion
    # k P = (k-1) P + P to stay consistent
    rng = random.Random(5004)
    E = _curve(digits=16)
    P = _sample_points(E, rng, 1)[0]
    for k in range(2, 25):
        lhs = k * P
        rhs = (k - 1) * P + P
        dx = lhs.x - rhs.x
        dy = lhs.y - rhs.y
        # consistent to the full shared precision, which must stay usable
        assert dx.is_zero and dy.is_zero, k
        assert dx.nd >= 3 and dy.nd >= 3, k


def test_two_torsion_points():
    E = _curve()
    for j in range(3):
        T = E.two_torsion_point(j)
        assert T.on_curve()
        assert (T + T).is_infinity


def test_inverse_addition_gives_infinity():
    rng = random.Random(5005)
    E = _curve()
    P = _sample_points(E, rng, 1)[0]
    assert (P + (-P)).is_infinity


def test_fp_order_divides_group_order():
    E = _curve()
    for xy in E.points_mod_p():
        assert E.count_points() % E.fp_order(xy) == 0


# -- the formal disk --------------------------------------------------------------

def test_disk_series_satisfy_the_curve_equation():
    E = _curve()
    D = 14
    x = E.x_series(D)
    y = E.y_series(D)
    lhs = y * y
    rhs = x * x * x * 4 + x * E.a + LaurentSeries_const(E, D)
    diff = lhs - rhs
    for n, c in diff.coeffs.items():
        assert c.is_zero, (n, c)


def LaurentSeries_const(E, D):
    from arithpvi.jetring import LaurentSeries
    return LaurentSeries.constant(E.b, E.p, D)


def test_differential_is_even_integral_and_unital():
    E = _curve()
    om = E.omega_over_dt(12)
    c0 = om.coefficient(0)
    assert c0.residue(6) == 1
    for n, c in om.coeffs.items():
        if c.is_zero:
            continue
        assert n % 2 == 0
        assert c.v >= 0
    # frozen leading window: 1 + 0 T^2 - 2 T^4
    c4 = om.coefficient(4)
    assert c4.congruent(PadicScalar.from_int(-2, 5, 8), 6)


def test_log_numerators_are_integral():
    E = _curve(digits=10)
    for n in range(1, 30):
        b = E.b_coefficient(n)
        assert b.is_zero or b.v >= 0


def test_trace_congruence_for_the_p_th_log_numerator():
    for p, roots in ((5, (0, 1, -1)), (5, (0, 2, -2)), (7, (1, 2, -3)),
                     (13, (0, 1, -1))):
        E = EllipticCurve(p, 10, roots)
        bp = E.b_coefficient(p)
        assert bp.congruent(PadicScalar.from_int(E.trace(), p, 8), 1)


def test_disk_parameter_round_trip():
    E = _curve()
    t = PadicScalar.from_int(35, 5, 10)
    P = E.disk_point(t)
    assert P.on_curve()
    assert E.disk_parameter(P).congruent(t, 9)


def test_disk_point_rejects_unit_parameter():
    E = _curve()
    with pytest.raises(ValidationError):
        E.disk_point(PadicScalar.from_int(2, 5, 10))


def test_disk_parameter_rejects_far_points():
    rng = random.Random(5006)
    E = _curve()
    P = _sample_points(E, rng, 1)[0]
    with pytest.raises(PoleError):
        E.disk_parameter(P)


def test_log_is_additive_on_the_disk():
    rng = random.Random(5007)
    E = _curve()
    L = E.log_series(30)
    for _ in range(6):
        # parameters of valuation exactly 1 stay well inside the disk
        a = 5 * (5 * rng.randrange(5 ** 7) + rng.randrange(1, 5))
        b = 5 * (5 * rng.randrange(5 ** 7) + rng.randrange(1, 5))
        ta = PadicScalar.from_int(a, 5, 10)
        tb = PadicScalar.from_int(b, 5, 10)
        S = E.disk_point(ta) + E.disk_point(tb)
        lhs = L.eval_at(E.disk_parameter(S), tail_bound=25)
        rhs = L.eval_at(ta, tail_bound=25) + L.eval_at(tb, tail_bound=25)
        d = lhs - rhs
        assert d.is_zero or d.valuation() >= 8


def test_reduction_of_disk_points_is_the_origin():
    E = _curve()
    t = PadicScalar.from_int(5, 5, 10)
    assert E.reduction(E.disk_point(t)) is None


# -- translation by 2-torsion -------------------------------------------------------

def test_shift_closed_form_matches_group_law():
    rng = random.Random(5008)
    E = _curve()
    for _ in range(8):
        P = _sample_points(E, rng, 1)[0]
        for j in range(3):
            lhs = E.shift_by_two_torsion(j, P)
            rhs = P + E.two_torsion_point(j)
            assert lhs.congruent(rhs, 10)


def test_shift_of_infinity_and_involution():
    E = _curve()
    T = E.shift_by_two_torsion(2, E.infinity())
    assert T.congruent(E.two_torsion_point(2), 12)
    rng = random.Random(5009)
    P = _sample_points(E, rng, 1)[0]
    twice = E.shift_by_two_torsion(1, E.shift_by_two_torsion(1, P))
    assert twice.congruent(P, 10)


# -- square roots ----------------------------------------------------------------

def test_padic_sqrt_of_squares():
    rng = random.Random(5010)
    for _ in range(20):
        n = rng.randrange(1, 5 ** 8)
        c = PadicScalar.from_int(n * n, 5, 8)
        r = padic_sqrt(c)
        assert (r * r).congruent(c, 8)


def test_padic_sqrt_rejects_nonresidues():
    with pytest.raises(ValidationError):
        padic_sqrt(PadicScalar.from_int(2, 5, 8))
    with pytest.raises(ValidationError):
        padic_sqrt(PadicScalar.from_int(5, 5, 8))


def test_padic_sqrt_even_valuation():
    c = PadicScalar.from_int(9 * 25, 5, 8)
    r = padic_sqrt(c)
    assert r.valuation() == 1
    assert (r * r).congruent(c, 9)


# -- degree-2 isogeny ---------------------------------------------------------------

def test_isogeny_requires_square_tangent_datum():
    E = _curve()
    # t_1 = (1-0)(1+1) = 2, a non-residue mod 5
    with pytest.raises(UnsupportedRegimeError):
        TwoIsogeny(E, 1)


def test_isogeny_kernel_and_origin():
    E = _curve()
    iso = TwoIsogeny(E, 0)
    assert iso(E.two_torsion_point(0)).is_infinity
    assert iso(E.infinity()).is_infinity


def test_isogeny_is_a_homomorphism():
    rng = random.Random(5011)
    E = _curve(digits=16)
    iso = TwoIsogeny(E, 0)
    for _ in range(10):
        P, Q = _sample_points(E, rng, 2)
        assert iso(P + Q).congruent(iso(P) + iso(Q), 9)


def test_isogeny_images_are_on_the_codomain():
    rng = random.Random(5012)
    E = _curve()
    iso = TwoIsogeny(E, 0)
    for P in _sample_points(E, rng, 6):
        assert iso(P).on_curve(10)


def test_landin_offset_is_exact():
    # y'(pi Q) = y(Q) + y(Q + kernel point), with no error term at all
    rng = random.Random(5013)
    E = _curve()
    iso = TwoIsogeny(E, 0)
    for P in _sample_points(E, rng, 8):
        img = iso(P)
        shifted = E.shift_by_two_torsion(0, P)
        assert img.y.congruent(P.y + shifted.y, 11)


def test_isogeny_preserves_the_logarithm_on_the_disk():
    # the pullback of the codomain differential is the domain differential,
    # so the two logarithms agree along the isogeny on the origin disk
    E = _curve()
    iso = TwoIsogeny(E, 0)
    L = E.log_series(30)
    L2 = iso.codomain.log_series(30)
    for k in (1, 2, 3):
        t = PadicScalar.from_int(5 * k, 5, 10)
        Q = E.disk_point(t)
        lhs = L2.eval_at(iso.codomain.disk_parameter(iso(Q)), tail_bound=25)
        rhs = L.eval_at(t, tail_bound=25)
        d = lhs - rhs
        assert d.is_zero or d.valuation() >= 8


def test_composite_through_the_partner_kernel_is_doubling():
    # push through the image of a partner 2-torsion point: the composite
    # of the two degree-2 maps is multiplication by 2 up to the scaling
    # x -> 4x, y -> 8y
    rng = random.Random(5014)
    E = _curve()
    iso = TwoIsogeny(E, 0)
    j2 = iso.codomain_two_torsion_from(1)
    iso2 = TwoIsogeny(iso.codomain, j2)
    for P in _sample_points(E, rng, 5):
        comp = iso2(iso(P))
        twice = 2 * P
        assert comp.x.congruent(twice.x * 4, 9)
        assert comp.y.congruent(twice.y * 8, 9)
