"""The order-2 additive character of an elliptic curve over Z_p.

The formal logarithm ell linearizes the group law on the origin disk but
converges nowhere else.  Its arithmetic replacement is a jet series
psi(T, T', T'') built from the lifted Frobenius,

    psi = (phi^2(L) + lam1 phi(L) + p lam0 L) / p,

with L the logarithm viewed as a jet series, lam0 = 1, lam1 = -a_p.  The
division by p is the whole point: for exactly this choice of lam1 every
coefficient of the numerator is divisible by p, and the quotient is a
p-integral series defined on the entire curve.  Evaluated at the jet
(t, delta t, delta^2 t) of a point's disk parameter it is additive, kills
torsion, and pulls back along a 2-isogeny to itself.

This module builds the series (the division doubles as a proof check:
a unit numerator coefficient aborts loudly), evaluates the character two
independent ways, and packages the identity checks used by the test suite
and the command-line front end.
"""

import math

from .elliptic import EllipticCurve, TwoIsogeny
from .errors import (
    IntegralityError,
    UnsupportedRegimeError,
    ValidationError,
)
from .jetring import JetSeries, LaurentSeries, univariate_to_jet
from .padic import PadicScalar

__all__ = [
    "DeltaCharacter",
    "check_dpsi",
    "check_isogeny_pullback",
    "psi_eval",
    "psi_eval_jet",
    "psi_perturbation_report",
    "psi_series",
    "psi_univariate",
]


def _require_ordinary(curve):
    if not curve.is_ordinary():
        raise UnsupportedRegimeError(
            "supersingular reduction: the character of order 2 needs a_p "
            "to be a unit")


def _require_non_anomalous(curve):
    if curve.is_anomalous():
        raise UnsupportedRegimeError(
            "anomalous reduction: m = p + 1 - a_p is not a unit")


def _shift_coeff(c, k):
    if c.is_zero:
        return PadicScalar.zero(c.p, max(c.nd + k, 1))
    return c.shift(k)


def _divide_series_by_p(num):
    """Divide a jet series by p, insisting every coefficient allows it.

    A unit coefficient is not a precision accident, it falsifies the
    integrality statement the series is built on, so it aborts with the
    offending monomial."""
    out = {}
    for e, c in num.coeffs.items():
        if (not c.is_zero) and c.v < 1:
            raise IntegralityError(
                "character numerator has a unit coefficient at %r: %r"
                % (e, c))
        out[e] = _shift_coeff(c, -1)
    return JetSeries(num.p, num.nvars, num.degree, out, num.exact)


def psi_series(curve, degree=8, lam1=None):
    """The character as a jet series in (T, T', T'') to a total degree.

    lam1 defaults to -a_p; overriding it is for negative controls only
    and will normally abort with IntegralityError, since integrality of
    the quotient pins lam1 mod p^2 (see psi_perturbation_report for the
    version that measures the failure instead of aborting).
    """
    _require_ordinary(curve)
    if degree < 6:
        raise ValidationError("character series needs degree >= 6")
    if lam1 is None:
        lam1 = -curve.trace()
    key = ("psi", degree, int(lam1))
    if key in curve._series_cache:
        return curve._series_cache[key]
    L = univariate_to_jet(curve.log_series(degree))
    phi_L = L.phi()
    phi2_L = phi_L.phi()
    num = phi2_L + phi_L.raise_order(3) * lam1 \
        + L.raise_order(3) * curve.p
    out = _divide_series_by_p(num)
    curve._series_cache[key] = out
    return out


def psi_univariate(curve, degree, lam1=None):
    """The restriction of psi to the locus T' = T'' = 0.

    There phi^i(T) degenerates to T^(p^i), so the restriction has the
    closed form (L(T^(p^2)) + lam1 L(T^p) + p L(T)) / p and is cheap to
    carry to high degree.  Used as an independent check on psi_series and
    as the window where a perturbed lam1 first shows a denominator (at
    T^(p^2), beyond the reach of small jet truncations)."""
    _require_ordinary(curve)
    if lam1 is None:
        lam1 = -curve.trace()
    L = curve.log_series(degree)
    num = L.subst_power(curve.p ** 2) + L.subst_power(curve.p) * lam1 \
        + L * curve.p
    out = {}
    for n, c in num.coeffs.items():
        if (not c.is_zero) and c.v < 1:
            raise IntegralityError(
                "character numerator has a unit coefficient at T^%d: %r"
                % (n, c))
        out[n] = _shift_coeff(c, -1)
    return LaurentSeries(curve.p, out, num.degree, num.exact)


def psi_perturbation_report(curve, degree=None, shift=None):
    """Replace lam1 by lam1 + shift and measure how integrality fails.

    Works on the univariate restriction, where the first bad coefficient
    sits at T^(p^2).  Returns the minimal coefficient valuation, where it
    occurs, and the verdict for the unshifted series on the same window.
    """
    _require_ordinary(curve)
    p = curve.p
    if degree is None:
        degree = p * p + p
    if shift is None:
        shift = p
    lam1 = -curve.trace()
    L = curve.log_series(degree)
    num = L.subst_power(p ** 2) + L.subst_power(p) * (lam1 + shift) \
        + L * p
    coeffs = {n: _shift_coeff(c, -1) for n, c in num.coeffs.items()}
    worst = None
    where = None
    for n, c in sorted(coeffs.items()):
        if c.is_zero:
            continue
        if worst is None or c.v < worst:
            worst = c.v
            where = n
    return {
        "check": "lam1-perturbation",
        "shift": int(shift),
        "degree": degree,
        "min_valuation": worst,
        "at_power": where,
        "integral": worst is not None and worst >= 0,
    }


# ----------------------------------------------------------------------
# evaluation
# ----------------------------------------------------------------------

def _log_tail_bound(degree, vt, p, horizon=None):
    """Valuation floor for the omitted tail of ell(t), v(t) = vt >= 1.

    The degree-d coefficient of the logarithm is integral divided by d,
    so the tail term at degree d has valuation >= d*vt - v_p(d)."""
    if horizon is None:
        horizon = p * (degree + 2) + p ** 3
    best = None
    for d in range(degree + 1, horizon + 1):
        v = d * vt - _vp_int(d, p)
        if best is None or v < best:
            best = v
    return best


def _vp_int(n, p):
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def _psi_tail_bound(degree, vt, p):
    """Valuation floor for the omitted tail of psi at jet values with
    v(t) = vt, v(delta t) >= max(0, vt-1), v(delta^2 t) >= max(0, vt-2).

    Every monomial of the numerator pieces comes from products of the
    phi-image options of T; weighting each option's degree against its
    guaranteed valuation (coefficient plus substituted values) gives a
    slope, the worst of which is (1 + p v(delta t))/p from the T'^p term
    of phi^2(T).  The tail at truncation D is then the infimum over
    degrees d > D of slope*d minus the logarithm-denominator correction
    v_p(n) <= log_p(d) and minus 1 for the final division by p."""
    v1 = max(0, vt - 1)
    v2 = max(0, vt - 2)
    slopes = [
        float(vt),                      # T^(p^2) option, and the p L piece
        (1.0 + p * v1) / p,             # (p^p + p) T'^p
        2.0 + v2,                       # p^2 T''
        1.0 + v1,                       # p T' inside phi(T)
    ]
    for k in range(1, p):
        d = p * (p - k) + k
        slopes.append((k + 1.0 + p * (p - k) * vt + k * v1) / d)
    lam = min(slopes)
    horizon = p * (degree + 2) + p ** 3
    best = None
    for d in range(degree + 1, horizon + 1):
        v = lam * d - math.floor(math.log(d, p)) - 1.0
        if best is None or v < best:
            best = v
    return int(math.floor(best))


def _eval_log(curve, t):
    """ell(t) with an honest tail bound, t of valuation >= 1."""
    if t.is_zero:
        return PadicScalar.zero(curve.p, t.nd)
    vt = t.valuation()
    if vt < 1:
        raise ValidationError("logarithm argument must have valuation >= 1")
    target = t.abs_prec
    degree = max(12, -(-target // vt) + curve.p)
    while _log_tail_bound(degree, vt, curve.p) < target:
        degree += curve.p
    L = curve.log_series(degree)
    return L.eval_at(t, tail_bound=_log_tail_bound(degree, vt, curve.p))


def psi_eval(curve, P):
    """The character at a point, by the closed form ell(t(mP))/p.

    m = p + 1 - a_p kills the reduction, so mP lands on the origin disk
    where the logarithm converges; additivity then forces
    psi(P) = psi(mP)/m = (m/p) ell(t(mP)) / m = ell(t(mP))/p.
    The jet evaluation of the lifted Frobenius at a number collapses
    (phi fixes Z_p), which is what reduces the three-term series to the
    logarithm here; psi_eval_jet recomputes without the collapse and the
    two are cross-checked in the tests.
    """
    _require_ordinary(curve)
    _require_non_anomalous(curve)
    if P.inf:
        cap = curve.digits if P.inf_depth is None \
            else min(curve.digits, P.inf_depth)
        if cap < 2:
            raise PrecisionError(
                "character undecidable at an identity approximation "
                "of depth %d" % cap)
        return PadicScalar.zero(curve.p, cap - 1)
    m = curve.p + 1 - curve.trace()
    Q = curve.smul(m, P)
    t = curve.disk_parameter(Q)
    return _eval_log(curve, t).shift(-1)


def psi_eval_jet(curve, P, degree=None, min_prec=None, target_prec=None):
    """The character at a point through the jet series itself.

    Moves P into the origin disk by the prime-to-p order k of its
    reduction, evaluates psi(t, delta t, delta^2 t) term by term with an
    explicit tail bound, and divides by the unit k.  Independent of the
    collapse argument behind psi_eval.

    The truncation degree is chosen to push the tail under the value's
    own precision unless target_prec asks for less; the tail grows only
    like degree/p when v(t) = 1, so full precision is expensive and a
    caller that only needs a few digits should say so.
    """
    _require_ordinary(curve)
    _require_non_anomalous(curve)
    p = curve.p
    if P.inf:
        cap = curve.digits if P.inf_depth is None \
            else min(curve.digits, P.inf_depth)
        if cap < 2:
            raise PrecisionError(
                "character undecidable at an identity approximation "
                "of depth %d" % cap)
        return PadicScalar.zero(p, cap - 1)
    red = curve.reduction(P)
    if red is None:
        k = 1
        Q = P
    else:
        k = curve.fp_order(red)
        if k % p == 0:
            raise UnsupportedRegimeError(
                "reduction order divisible by p")
        Q = curve.smul(k, P)
    t = curve.disk_parameter(Q)
    if t.is_zero:
        if t.nd < 2:
            raise PrecisionError(
                "character undecidable: disk parameter is zero at O(p)")
        return PadicScalar.zero(p, t.nd - 1)
    vt = t.valuation()
    if degree is None:
        degree = 6
        target = t.abs_prec - 1
        if target_prec is not None:
            target = min(target, target_prec)
        target = min(target, curve.digits)
        while _psi_tail_bound(degree, vt, p) < target:
            degree += p
    tail = _psi_tail_bound(degree, vt, p)
    if min_prec is not None and tail < min_prec:
        raise ValidationError(
            "truncation degree %d leaves a tail of size p^%d, more than "
            "the requested p^%d" % (degree, tail, min_prec))
    S = psi_series(curve, degree)
    jets = (t, t.delta(), t.delta().delta())
    val = S.eval_at(jets, tail_bound=tail)
    if k == 1:
        return val
    return val / PadicScalar.from_int(k, p, val.nd)


class DeltaCharacter:
    """The additive character of a fixed curve, with caching.

    lam0 = 1 and lam1 = -a_p are forced by integrality; lam_minus1 = 0
    is the normalization in the chart centered at the origin, where the
    character of the zero point is zero.
    """

    def __init__(self, curve):
        _require_ordinary(curve)
        self.curve = curve
        self.lam0 = 1
        self.lam1 = -curve.trace()
        self.lam_minus1 = 0

    def series(self, degree=8):
        return psi_series(self.curve, degree)

    def eval(self, P):
        return psi_eval(self.curve, P)

    def eval_jet(self, P, degree=None, target_prec=None):
        return psi_eval_jet(self.curve, P, degree=degree,
                            target_prec=target_prec)

    def __repr__(self):
        return "DeltaCharacter(p=%d, lam1=%d)" % (self.curve.p, self.lam1)


# ----------------------------------------------------------------------
# identity checks
# ----------------------------------------------------------------------

def check_dpsi(curve, degree=8, tol=None):
    """d psi in the omega basis must be (lam0, lam1, p) = (1, -a_p, p).

    The differential of the character is constant in the frame of the
    twisted differentials: the omega^(2) coefficient is exactly p, the
    omega^(1) coefficient -a_p, the omega^(0) coefficient 1, all to the
    working degree."""
    from . import jetforms

    psi = psi_series(curve, degree)
    frame = jetforms.OmegaFrame(curve, order=2, degree=degree)
    form = frame.to_omega_basis(psi)
    want = [1, -curve.trace(), curve.p]
    if tol is None:
        tol = curve.digits - 2
    status = []
    for i, c in enumerate(want):
        const = JetSeries.constant(c, curve.p, form.coeffs[i].nvars,
                                   form.coeffs[i].degree,
                                   digits=curve.digits)
        ok = form.coeffs[i].congruent(const, tol)
        status.append(ok)
    return {
        "check": "dpsi",
        "expected": [str(w) for w in want],
        "coefficient_ok": status,
        "degree": degree,
        "modulus_exponent": tol,
        "status": "ok" if all(status) else "mismatch",
    }


def _random_point(curve, rng):
    """A uniformly random affine point with unit y coordinate.

    Draws x over the full residue range (not just a lift of a mod-p
    point, which would pin the higher digits to zero) and takes a square
    root; unit y keeps the sample away from the 2-torsion fibers, where
    additions genuinely cost digits."""
    from .elliptic import padic_sqrt

    p, nd = curve.p, curve.digits
    modulus = p ** nd
    a, b = curve._a_int(), curve._b_int()
    if not any((4 * r ** 3 + a * r + b) % p
               and pow((4 * r ** 3 + a * r + b) % p, (p - 1) // 2, p) == 1
               for r in range(p)):
        raise ValidationError(
            "every mod-%d point of the curve is two-torsion, so there "
            "is no affine point with unit y to sample" % p)
    while True:
        x = rng.randrange(modulus)
        fx = (4 * x ** 3 + a * x + b) % modulus
        if fx % p == 0 or pow(fx % p, (p - 1) // 2, p) != 1:
            continue
        y = padic_sqrt(PadicScalar.from_int(fx, p, nd))
        if rng.randrange(2):
            y = -y
        return curve.point(PadicScalar.from_int(x, p, nd), y)


def check_isogeny_pullback(curve, j=0, samples=20, seed=0, tol=None):
    """psi of the codomain, pulled back through the 2-isogeny with kernel
    (e_j, 0), equals psi of the domain: the comparison constant is 1.

    Verified at sampled points to the stated tolerance (default: four
    digits under the working precision, since the isogeny map and the
    two character evaluations each spend a little), with the constant
    recovered by division whenever the character value is p times a
    unit."""
    import random as _random

    _require_ordinary(curve)
    _require_non_anomalous(curve)
    iso = TwoIsogeny(curve, j)
    cod = iso.codomain
    _require_ordinary(cod)
    _require_non_anomalous(cod)
    rng = _random.Random(seed)
    if tol is None:
        tol = curve.digits - 4
    agreements = []
    ratio = None
    for _ in range(samples):
        Q = _random_point(curve, rng)
        lhs = psi_eval(cod, iso(Q))
        rhs = psi_eval(curve, Q)
        agreements.append(lhs.congruent(rhs, tol))
        if ratio is None and (not rhs.is_zero) and rhs.valuation() == 1:
            ratio = lhs / rhs
    torsion_ok = psi_eval(cod, iso(curve.two_torsion_point(j))).is_zero
    return {
        "check": "isogeny-pullback",
        "kernel_index": j,
        "samples": samples,
        "modulus_exponent": tol,
        "all_agree": all(agreements),
        "torsion_image_zero": bool(torsion_ok),
        "comparison_constant": str(ratio) if ratio is not None else None,
        "status": "ok" if all(agreements) and torsion_ok else "mismatch",
    }
