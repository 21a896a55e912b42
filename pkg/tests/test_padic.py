"""Scalar layer: precision ledger, p-derivation primitives, Witt pairs,
Teichmuller lifts, the finite zero criterion, and the quadratic extension."""

import random

import pytest

from arithpvi import (
    PadicScalar,
    PrecisionError,
    UnramifiedScalar,
    ValidationError,
    ValuationFloorError,
    WittPair,
    Zp2,
    cp_term,
    delta_fermat,
    delta_valuation_certificate,
    teichmuller,
)


def test_from_residue_splits_valuation_and_unit():
    x = PadicScalar.from_residue(2 * 5 ** 3, 5, 8)
    assert x.v == 3
    assert x.u == 2
    assert x.nd == 5
    assert x.abs_prec == 8


def test_zero_tracks_certified_depth():
    z = PadicScalar.from_residue(5 ** 4, 5, 4)
    assert z.is_zero
    assert z.nd == 4
    with pytest.raises(PrecisionError):
        z.valuation()


def test_addition_cancellation_revalues():
    x = PadicScalar.from_int(7, 5, 6)
    y = PadicScalar.from_int(-7 + 5 ** 3, 5, 6)
    s = x + y
    assert s.v == 3
    assert s.u == 1
    # absolute precision is capped by the weaker input
    assert s.abs_prec == 6


def test_division_by_p_costs_one_absolute_digit():
    x = PadicScalar.from_int(50, 5, 6)       # v=2, abs 8
    q = x / PadicScalar.from_int(5, 5, 6)    # v=1, abs 7
    assert q.v == 1
    assert q.abs_prec == 7
    assert q.residue(3) == 10


def test_unit_division_keeps_digits():
    x = PadicScalar.from_int(7, 5, 6)
    y = PadicScalar.from_int(3, 5, 6)
    q = x / y
    assert q.abs_prec == 6
    assert (q * y).congruent(x, 6)


def test_valuation_floor_is_loud():
    from arithpvi.padic import VALUATION_FLOOR

    x = PadicScalar.from_int(1, 5, 6)
    p = PadicScalar.from_int(5, 5, 6)
    with pytest.raises(ValuationFloorError):
        x / p ** (-VALUATION_FLOOR + 1)


def test_congruent_raises_when_undecidable():
    x = PadicScalar.from_int(2, 5, 3)
    y = PadicScalar.from_int(2, 5, 3)
    with pytest.raises(PrecisionError):
        (x - y).is_zero and x.congruent(y, 10)


# -- Fermat quotient ----------------------------------------------------

def test_delta_of_two_at_p_five():
    # (2 - 2^5)/5 = -6
    d = delta_fermat(PadicScalar.from_int(2, 5, 6))
    assert d.residue() == (-6) % 5 ** 5


def test_delta_of_twentyfive():
    # (25 - 25^5)/5 = 5 - 5^9
    d = delta_fermat(PadicScalar.from_int(25, 5, 6))
    assert d.residue() == (5 - 5 ** 9) % 5 ** 7


def test_delta_precision_drop():
    x = PadicScalar.from_int(2, 5, 6)
    assert delta_fermat(x).abs_prec == x.abs_prec - 1


def test_delta_agrees_with_direct_quotient_p7():
    rng = random.Random(101)
    for _ in range(40):
        n = rng.randrange(1, 7 ** 6)
        d = delta_fermat(PadicScalar.from_int(n, 7, 6))
        want = (n - pow(n, 7, 7 ** 8)) // 7
        assert d.residue(5) == want % 7 ** 5


# -- Witt coordinates ----------------------------------------------------

def test_cp_term_values():
    one = PadicScalar.from_int(1, 5, 6)
    c = cp_term(one, one)
    assert c.residue() == (-6) % 5 ** 6
    c0 = cp_term(one, PadicScalar.from_int(-1, 5, 6))
    assert c0.is_zero and c0.nd == 6


def test_cp_term_no_precision_loss():
    x = PadicScalar.from_int(12, 5, 6)
    y = PadicScalar.from_int(31, 5, 6)
    assert cp_term(x, y).abs_prec == 6


def test_delta_sum_and_product_laws():
    # delta(x+y) = dx + dy + C_p(x,y);  delta(xy) = x^p dy + y^p dx + p dx dy
    rng = random.Random(20240817)
    p, n = 5, 6
    for _ in range(200):
        a = rng.randrange(1, p ** n)
        b = rng.randrange(1, p ** n)
        x = PadicScalar.from_int(a, p, n)
        y = PadicScalar.from_int(b, p, n)
        dx, dy = delta_fermat(x), delta_fermat(y)
        lhs = delta_fermat(x + y)
        rhs = dx + dy + cp_term(x, y)
        assert lhs.congruent(rhs, n - 1)
        lhs = delta_fermat(x * y)
        rhs = x ** p * dy + y ** p * dx + p * dx * dy
        assert lhs.congruent(rhs, n - 1)


def test_witt_pair_ring_homomorphism():
    rng = random.Random(9)
    p, n = 7, 5
    for _ in range(60):
        a = rng.randrange(1, p ** n)
        b = rng.randrange(1, p ** n)
        x = PadicScalar.from_int(a, p, n)
        y = PadicScalar.from_int(b, p, n)
        ws = WittPair.from_scalar(x) + WittPair.from_scalar(y)
        wd = WittPair.from_scalar(x + y)
        assert ws.a.congruent(wd.a, n - 1)
        assert ws.b.congruent(wd.b, n - 1)
        wm = WittPair.from_scalar(x) * WittPair.from_scalar(y)
        wp = WittPair.from_scalar(x * y)
        assert wm.a.congruent(wp.a, n - 1)
        assert wm.b.congruent(wp.b, n - 1)


def test_ghost_coordinates_are_componentwise():
    p, n = 5, 6
    x = PadicScalar.from_int(11, p, n)
    y = PadicScalar.from_int(8, p, n)
    wx, wy = WittPair.from_scalar(x), WittPair.from_scalar(y)
    gs = (wx + wy).ghost()
    gx, gy = wx.ghost(), wy.ghost()
    assert gs[0].congruent(gx[0] + gy[0], n - 1)
    assert gs[1].congruent(gx[1] + gy[1], n - 1)


# -- Teichmuller ---------------------------------------------------------

def test_teichmuller_of_two_mod_25():
    assert teichmuller(2, 5, 6).residue(2) == 7


def test_teichmuller_is_root_of_unity():
    for c in range(1, 5):
        t = teichmuller(c, 5, 8)
        assert (t ** 4).congruent(PadicScalar.one(5, 8), 8)
        assert t.residue(1) == c


def test_teichmuller_has_zero_delta():
    for c in range(1, 7):
        d = delta_fermat(teichmuller(c, 7, 6))
        assert d.is_zero and d.nd >= 5


def test_teichmuller_of_zero():
    t = teichmuller(10, 5, 6)
    assert t.is_zero and t.nd == 6


# -- finite zero criterion -------------------------------------------------

def test_zero_criterion_exhaustive_mod_5_to_5():
    # every residue class mod 5^5 with valuation <= 3, depth 3, 8 digits
    for r in range(1, 5 ** 5):
        v = 0
        n = r
        while n % 5 == 0:
            n //= 5
            v += 1
        if v > 3:
            continue
        b = PadicScalar.from_int(r, 5, 8)
        rep = delta_valuation_certificate(b, 3)
        assert rep["certified"] == v, (r, rep)


def test_zero_criterion_demands_depth_plus_two_digits():
    b = PadicScalar.from_int(3, 5, 4)
    with pytest.raises(PrecisionError):
        delta_valuation_certificate(b, 3)


# -- quadratic unramified extension ---------------------------------------

def test_zeta_has_full_order():
    R = Zp2(5, 6)
    z = R.zeta()
    one = R.element(1)
    assert (z ** 24).congruent(one, 6)
    for q in (2, 3):
        assert not (z ** (24 // q)).congruent(one, 1)


def test_frobenius_is_zeta_to_the_p_and_involutive():
    for p in (5, 7):
        R = Zp2(p, 5)
        z = R.zeta()
        assert z.frobenius().congruent(z ** p, 5)
        assert z.frobenius().frobenius().congruent(z, 5)


def test_frobenius_fixes_base_ring():
    R = Zp2(5, 6)
    x = R.element(1234)
    assert x.frobenius().congruent(x, 6)


def test_delta_of_zeta_vanishes():
    R = Zp2(5, 6)
    d = R.zeta().delta()
    assert d.is_zero and d.nd >= 5


def test_extension_arithmetic_inverse_and_norm():
    rng = random.Random(33)
    R = Zp2(5, 6)
    one = R.element(1)
    for _ in range(40):
        a = rng.randrange(5 ** 6)
        b = rng.randrange(5 ** 6)
        if a % 5 == 0 and b % 5 == 0:
            continue
        w = R.element(a, b)
        assert (w * w.inverse()).congruent(one, 5)


def test_extension_distributes():
    rng = random.Random(55)
    R = Zp2(7, 5)
    for _ in range(30):
        xs = [R.element(rng.randrange(7 ** 5), rng.randrange(7 ** 5))
              for _ in range(3)]
        x, y, z = xs
        lhs = x * (y + z)
        rhs = x * y + x * z
        assert lhs.congruent(rhs, 5)


def test_embed_round_trip():
    R = Zp2(5, 6)
    x = PadicScalar.from_int(42, 5, 6)
    w = R.embed(x)
    assert w.in_base_ring()
    assert w.coords()[0] == 42


def test_mixed_prime_operations_rejected():
    x = PadicScalar.from_int(2, 5, 4)
    y = PadicScalar.from_int(2, 7, 4)
    with pytest.raises(ValidationError):
        x + y
