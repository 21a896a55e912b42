"""Elliptic curves y^2 = 4x^3 + a x + b with rational 2-torsion over Z_p.

The curve is pinned by its three roots e0, e1, e2 (summing to zero), so
a = 4 sigma2 and b = -4 sigma3.  Everything downstream needs three things
from this module: a group law that survives near-torsion precision loss
(slopes are fraction-field scalars, not residues), the formal disk at the
origin (parameter T = -2x/y, the w-recursion, the logarithm), and the
degree-2 isogeny with its closed-form point transport.
"""

from .errors import (
    PoleError,
    PrecisionError,
    UnsupportedRegimeError,
    ValidationError,
)
from .jetring import LaurentSeries
from .padic import PadicScalar, UnramifiedScalar


def padic_sqrt(c, digits=None):
    """Square root of a PadicScalar with even valuation and square unit.

    Scan for the mod-p root, then Newton-lift.  Raises ValidationError when
    no root exists."""
    if c.is_zero:
        raise ValidationError("square root of a certified zero")
    p = c.p
    if c.v % 2 != 0:
        raise ValidationError("odd valuation has no square root")
    nd = c.nd if digits is None else min(digits, c.nd)
    u = c.u % p ** nd
    r0 = None
    for r in range(1, p):
        if (r * r - u) % p == 0:
            r0 = r
            break
    if r0 is None:
        raise ValidationError("unit is not a quadratic residue")
    m = p ** nd
    r = r0
    for _ in range(nd.bit_length() + 1):
        r = (r - (r * r - u) * pow(2 * r, -1, m)) % m
    if (r * r - u) % m != 0:
        raise ValidationError("square root lift failed")
    return PadicScalar(p, c.v // 2, r, nd)


def _legendre(n, p):
    n %= p
    if n == 0:
        return 0
    return 1 if pow(n, (p - 1) // 2, p) == 1 else -1


class Point:
    """Affine point or the origin (point at infinity) on a fixed curve.

    inf_depth, meaningful only with inf=True, is a certified lower
    bound on the valuation of the true point's disk parameter: the
    value None marks the exact identity, while a finite depth d says
    only that the point is within O(p^d) of it on the origin disk.
    Approximate identities appear when a sum lands closer to the origin
    than the inputs' precision can separate; everything downstream must
    treat d as the cap on what is known."""

    __slots__ = ("curve", "x", "y", "inf", "inf_depth")

    def __init__(self, curve, x=None, y=None, inf=False, inf_depth=None):
        self.curve = curve
        self.x = x
        self.y = y
        self.inf = inf
        self.inf_depth = inf_depth

    @property
    def is_infinity(self):
        return self.inf

    def _require_same_curve(self, other):
        if self.curve is not other.curve:
            raise ValidationError("points live on different curve objects")

    def __neg__(self):
        if self.inf:
            return self  # the origin disk is stable under negation
        return Point(self.curve, self.x, -self.y)

    def __add__(self, other):
        if not isinstance(other, Point):
            return NotImplemented
        self._require_same_curve(other)
        return self.curve._add(self, other)

    def __sub__(self, other):
        if not isinstance(other, Point):
            return NotImplemented
        return self + (-other)

    def smul(self, k):
        return self.curve.smul(k, self)

    def __rmul__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        return self.curve.smul(k, self)

    def congruent(self, other, k):
        self._require_same_curve(other)
        if self.inf and other.inf:
            if self.inf_depth is None and other.inf_depth is None:
                return True
            raise PrecisionError(
                "congruence between approximate identities is undecidable")
        if self.inf or other.inf:
            at_inf, fin = (self, other) if self.inf else (other, self)
            if fin.x.is_zero or fin.x.valuation() >= 0:
                return False  # a finite-disk point is never the identity
            if at_inf.inf_depth is None:
                return False
            raise PrecisionError(
                "congruence between an approximate identity and an "
                "origin-disk point is undecidable")
        return self.x.congruent(other.x, k) and self.y.congruent(other.y, k)

    def on_curve(self, k=None):
        if self.inf:
            return True
        c = self.curve
        lhs = self.y * self.y
        rhs = self.x * self.x * self.x * 4 + c.a * self.x + c.b
        d = lhs - rhs
        if k is None:
            return d.is_zero or (d.valuation() >= min(lhs.abs_prec,
                                                      rhs.abs_prec))
        if d.is_zero:
            if d.nd >= k:
                return True
            raise PrecisionError("on-curve check undecidable at this depth")
        return d.valuation() >= k

    def __repr__(self):
        if self.inf:
            return "Point(infinity)"
        return "Point(%r, %r)" % (self.x, self.y)


class EllipticCurve:
    """y^2 = 4x^3 + ax + b pinned by three roots that sum to zero.

    Roots may be ints (wrapped exactly at the working precision) or
    precision-carrying scalars, e.g. from a square-root construction.
    Reduction mod p must keep the roots distinct (good reduction).
    """

    def __init__(self, p, digits, roots):
        if len(roots) != 3:
            raise ValidationError("need exactly three roots")
        self.p = p
        self.digits = digits
        es = []
        for r in roots:
            if isinstance(r, int):
                es.append(PadicScalar.from_int(r, p, digits))
            elif isinstance(r, PadicScalar):
                es.append(r)
            else:
                raise ValidationError("root must be int or PadicScalar")
        self.e = tuple(es)
        s = self.e[0] + self.e[1] + self.e[2]
        if not (s.is_zero or s.valuation() >= min(digits, s.abs_prec)):
            raise ValidationError("roots must sum to zero")
        for i in range(3):
            for j in range(i + 1, 3):
                d = self.e[i] - self.e[j]
                if d.is_zero or d.valuation() > 0:
                    raise ValidationError(
                        "roots %d and %d collide mod p: bad reduction"
                        % (i, j))
        sigma2 = (self.e[0] * self.e[1] + self.e[0] * self.e[2]
                  + self.e[1] * self.e[2])
        sigma3 = self.e[0] * self.e[1] * self.e[2]
        self.a = sigma2 * 4
        self.b = sigma3 * (-4)
        self._count = None
        self._series_cache = {}

    @classmethod
    def from_root_residues(cls, p, digits, roots):
        return cls(p, digits, tuple(int(r) for r in roots))

    # -- points ------------------------------------------------------------

    def infinity(self):
        return Point(self, inf=True)

    def point(self, x, y, check=True):
        if isinstance(x, int):
            x = PadicScalar.from_int(x, self.p, self.digits)
        if isinstance(y, int):
            y = PadicScalar.from_int(y, self.p, self.digits)
        pt = Point(self, x, y)
        if check and not pt.on_curve():
            raise ValidationError("point is not on the curve")
        return pt

    def two_torsion_point(self, j):
        return Point(self, self.e[j], PadicScalar.zero(self.p, self.digits))

    def lift_point(self, xbar, ybar):
        """Hensel-lift an affine mod-p point with ybar != 0."""
        p = self.p
        if ybar % p == 0:
            raise ValidationError("cannot Hensel-lift a 2-torsion residue")
        m = p ** self.digits
        x = xbar % m
        fx = (4 * x ** 3 + self._a_int() * x + self._b_int()) % m
        y = ybar % p
        for _ in range(self.digits.bit_length() + 1):
            y = (y - (y * y - fx) * pow(2 * y, -1, m)) % m
        if (y * y - fx) % m != 0:
            raise ValidationError("Hensel lift did not converge")
        return self.point(x, y, check=True)

    def _a_int(self):
        return self.a.residue(self.digits) if not self.a.is_zero else 0

    def _b_int(self):
        return self.b.residue(self.digits) if not self.b.is_zero else 0

    # -- the group law -------------------------------------------------------

    def _slope_double(self, P):
        num = P.x * P.x * 12 + self.a
        return num / (P.y * 2)

    def _identity_distance(self, P, dx, dy):
        """Certified valuation of t(P + Q) when the coordinates of Q and
        -P agree to the precision available (dx, dy certified zeros).

        On each residue disk at least one coordinate is an etale
        parameter: x where y is a unit (the invariant derivative of x is
        y itself), y where f'(x) is a unit.  Agreement to depth d on an
        etale channel pins the group-law distance to depth d; on a
        branched channel the quadratic term halves the certificate, and
        a channel whose derivative has valuation w only certifies d - w.
        The best channel wins."""
        dxc, dyc = dx.nd, dy.nd
        bounds = [dxc // 2, dyc // 2]
        if P.y.is_zero:
            wy = None
        else:
            wy = P.y.valuation()
            if wy >= 0:
                bounds.append(dxc if wy == 0 else min(dxc - wy, dxc // 2))
        fp = P.x * P.x * 12 + self.a
        if not fp.is_zero:
            wf = fp.valuation()
            if wf >= 0:
                bounds.append(dyc if wf == 0 else min(dyc - wf, dyc // 2))
        if wy is not None and wy < 0:
            # origin disk: both certificates pay for the pole order
            vt = -wy // 3
            bounds = [dxc + 2 * vt, dyc + 3 * vt]
        depth = max(bounds)
        if depth < 1:
            raise PrecisionError(
                "sum is near the origin but the inputs certify no digit "
                "of its disk parameter")
        return depth

    def _through_identity(self, R, depth):
        """R translated by an unknown point within O(p^depth) of the
        origin: the same point with its certificates capped.

        Translation moves a coordinate by ell(e)^k D^k(coord)/k! with
        D the invariant derivative.  For integral coordinates every
        D^k(coord) is integral and the k = 1 term dominates, so the
        error has valuation >= depth.  On the origin disk D adds one to
        the pole order: x (a double pole) keeps depth - 3 v(t) digits
        and y (a triple pole) keeps depth - 4 v(t)."""
        if depth is None or R.inf:
            return R
        if R.x.is_zero or R.x.valuation() >= 0:
            return Point(self, R.x.cap_abs(depth), R.y.cap_abs(depth))
        vt = -R.x.valuation() // 2
        if depth <= vt:
            raise PrecisionError(
                "translation by an origin approximation of depth %d "
                "cannot certify a point with pole depth %d" % (depth, vt))
        return Point(self, R.x.cap_abs(depth - 3 * vt),
                     R.y.cap_abs(depth - 4 * vt))

    def _add(self, P, Q):
        # Near-inverse inputs land closer to the origin than the digits
        # can separate: the sum is then an approximate identity carrying
        # the certified depth, and adding it to anything else costs the
        # other operand its digits beyond that depth.  Chains that keep
        # adding near-inverse points erode precision and must budget.
        if P.inf and Q.inf:
            if P.inf_depth is None:
                return Q
            if Q.inf_depth is None:
                return P
            return Point(self, inf=True,
                         inf_depth=min(P.inf_depth, Q.inf_depth))
        if P.inf:
            return self._through_identity(Q, P.inf_depth)
        if Q.inf:
            return self._through_identity(P, Q.inf_depth)
        dx = Q.x - P.x
        if dx.is_zero:
            dy = Q.y + P.y
            if dy.is_zero:
                return Point(self, inf=True,
                             inf_depth=self._identity_distance(P, dx, dy))
            dd = Q.y - P.y
            if dd.is_zero:
                m = self._slope_double(P)
            else:
                raise PrecisionError(
                    "x-coordinates agree to working precision but"
                    " y-coordinates differ: slope is undecidable")
        else:
            m = (Q.y - P.y) / dx
        # y^2 = 4x^3 + ... : chord meets the cubic where
        # 4x^3 - m^2 x^2 + ... = 0, so x1+x2+x3 = m^2/4
        x3 = m * m * PadicScalar.from_fraction(1, 4, self.p, self.digits) \
            - P.x - Q.x
        y3 = -(m * (x3 - P.x) + P.y)
        return Point(self, x3, y3)

    def smul(self, k, P):
        if k < 0:
            return self.smul(-k, -P)
        acc = self.infinity()
        add = P
        while k:
            if k & 1:
                acc = acc + add
            k >>= 1
            if k:
                add = add + add
        return acc

    # -- mod-p layer -----------------------------------------------------------

    def count_points(self):
        """#E(F_p) by direct enumeration (the curves here have small p)."""
        if self._count is None:
            p = self.p
            a, b = self._a_int() % p, self._b_int() % p
            n = 1
            for x in range(p):
                n += 1 + _legendre(4 * x ** 3 + a * x + b, p)
            self._count = n
        return self._count

    def trace(self):
        return self.p + 1 - self.count_points()

    def hasse_bound_holds(self):
        return self.trace() ** 2 <= 4 * self.p

    def is_ordinary(self):
        return self.trace() % self.p != 0

    def is_anomalous(self):
        return self.trace() % self.p == 1

    def points_mod_p(self):
        """All affine points over F_p as (x, y) pairs."""
        p = self.p
        a, b = self._a_int() % p, self._b_int() % p
        pts = []
        for x in range(p):
            f = (4 * x ** 3 + a * x + b) % p
            for y in range(p):
                if (y * y - f) % p == 0:
                    pts.append((x, y))
        return pts

    def fp_add(self, P, Q):
        """Group law over F_p; None is the origin."""
        p = self.p
        if P is None:
            return Q
        if Q is None:
            return P
        x1, y1 = P
        x2, y2 = Q
        if x1 == x2 and (y1 + y2) % p == 0:
            return None
        if x1 == x2:
            m = (12 * x1 * x1 + self._a_int()) * pow(2 * y1, -1, p) % p
        else:
            m = (y2 - y1) * pow(x2 - x1, -1, p) % p
        x3 = (m * m * pow(4, -1, p) - x1 - x2) % p
        y3 = (-(m * (x3 - x1) + y1)) % p
        return (x3, y3)

    def fp_smul(self, k, P):
        k %= self.count_points()
        acc = None
        add = P
        while k:
            if k & 1:
                acc = self.fp_add(acc, add)
            k >>= 1
            if k:
                add = self.fp_add(add, add)
        return acc

    def fp_order(self, P):
        n = 1
        q = P
        while q is not None:
            q = self.fp_add(q, P)
            n += 1
            if n > self.count_points() + 1:
                raise ValidationError("order search overran the group")
        return n

    def reduction(self, P):
        """Image of a point in E(F_p); None for the residue disk of the
        origin."""
        if P.inf:
            return None
        if not P.x.is_zero and P.x.valuation() < 0:
            return None
        return (P.x.residue(1), P.y.residue(1))

    # -- the formal disk ----------------------------------------------------------

    def _wrec(self, degree):
        """w(T) with x = (1+w)/T^2: the fixed point of

            w = -sigma2 (1+w)^{-1} T^4 + sigma3 (1+w)^{-2} T^6

        (integral coefficients; each pass gains four degrees)."""
        key = ("w", degree)
        if key in self._series_cache:
            return self._series_cache[key]
        p = self.p
        quarter = PadicScalar.from_fraction(1, 4, p, self.digits)
        s2 = self.a * quarter
        s3 = self.b * (-1) * quarter
        t4 = LaurentSeries.t_power(4, p, degree, digits=self.digits)
        t6 = LaurentSeries.t_power(6, p, degree, digits=self.digits)
        w = LaurentSeries.zero(p, degree, exact=False)
        one = LaurentSeries.constant(1, p, degree, digits=self.digits)
        for _ in range(degree // 4 + 2):
            opw = (one + w).truncate(degree)
            inv = opw.inverse().truncate(degree)
            w = (t4 * inv * (-1) * s2 + t6 * inv * inv * s3).truncate(degree)
            w.degree = degree
        self._series_cache[key] = w
        return w

    def x_series(self, degree):
        """x(T) = T^{-2} (1 + w), trusted through T^degree."""
        key = ("x", degree)
        if key not in self._series_cache:
            w = self._wrec(degree + 2)
            out = (LaurentSeries.constant(1, self.p, degree + 2,
                                          digits=self.digits)
                   + w).shifted(-2)
            self._series_cache[key] = out.truncate(degree)
        return self._series_cache[key]

    def y_series(self, degree):
        """y(T) = -2 x(T) / T."""
        key = ("y", degree)
        if key not in self._series_cache:
            out = self.x_series(degree + 1).shifted(-1) * (-2)
            self._series_cache[key] = out.truncate(degree)
        return self._series_cache[key]

    def omega_over_dt(self, degree):
        """The invariant differential divided by dT: x'(T)/y(T).

        A unit power series, even, congruent to 1 mod T^4, with integral
        coefficients."""
        key = ("om", degree)
        if key not in self._series_cache:
            xp = self.x_series(degree + 3).derivative()
            ys = self.y_series(degree + 2)
            out = (xp * ys.inverse()).truncate(degree)
            self._series_cache[key] = out
        return self._series_cache[key]

    def log_series(self, degree):
        """The formal logarithm: the primitive of omega/dT vanishing at 0.

        Coefficients acquire denominators at indices divisible by p."""
        key = ("log", degree)
        if key not in self._series_cache:
            self._series_cache[key] = \
                self.omega_over_dt(degree - 1).integrate()
        return self._series_cache[key]

    def b_coefficient(self, n):
        """Integral numerator b_n where log = sum b_n T^n / n."""
        c = self.omega_over_dt(n).coefficient(n - 1)
        if c is None:
            return PadicScalar.zero(self.p, self.digits)
        return c

    def disk_point(self, tval, degree=None):
        """The point with disk parameter T = tval (valuation >= 1)."""
        if degree is None:
            degree = 3 * self.digits
        vt = tval.nd if tval.is_zero else tval.valuation()
        if vt < 1:
            raise ValidationError("disk parameter must have valuation >= 1")
        if tval.is_zero:
            return Point(self, inf=True, inf_depth=tval.nd)
        x = self.x_series(degree).eval_at(tval)
        y = self.y_series(degree).eval_at(tval)
        return Point(self, x, y)

    def disk_parameter(self, P):
        """T(P) = -2 x / y for a point reducing to the origin."""
        if P.inf:
            if P.inf_depth is None:
                return PadicScalar.zero(self.p, self.digits)
            return PadicScalar.zero(self.p, min(self.digits, P.inf_depth))
        if P.x.is_zero or P.x.valuation() >= 0:
            raise PoleError("point does not reduce to the origin")
        return P.x * (-2) / P.y

    def in_origin_disk(self, P):
        return P.inf or ((not P.x.is_zero) and P.x.valuation() < 0)

    def torsion_point_above(self, qbar):
        """The prime-to-p torsion point reducing to a finite-order residue
        point.

        The reduction map has p-power kernel (the formal disk), so
        multiplying any lift by p^(digits-1) projects away the kernel
        component, and the inverse of p^(digits-1) modulo the residue
        order recovers the canonical lift.  2-torsion residues are their
        own lifts (e_j, 0)."""
        if qbar is None:
            return self.infinity()
        xb, yb = qbar
        if yb % self.p == 0:
            for j in range(3):
                ej = self.e[j]
                rj = 0 if ej.is_zero else ej.residue(1)
                if rj == xb % self.p:
                    return self.two_torsion_point(j)
            raise ValidationError("2-torsion residue matches no root")
        k = self.fp_order(qbar)
        if k % self.p == 0:
            raise UnsupportedRegimeError(
                "residue order divisible by p has no prime-to-p lift")
        Q = self.lift_point(xb, yb)
        proj = self.p ** (self.digits - 1)
        R = self.smul(proj, Q)
        return self.smul(pow(proj, -1, k), R)

    # -- translation by 2-torsion -----------------------------------------------

    def torsion_slope_product(self, j):
        """t_j = (e_j - e_i)(e_j - e_k): the tangent datum at root j."""
        i, k = [m for m in range(3) if m != j]
        return (self.e[j] - self.e[i]) * (self.e[j] - self.e[k])

    def shift_by_two_torsion(self, j, P):
        """P + (e_j, 0) in closed form:

            x -> e_j + t_j / (x - e_j),   y -> - t_j y / (x - e_j)^2
        """
        if P.inf:
            if P.inf_depth is not None:
                return self._through_identity(self.two_torsion_point(j),
                                              P.inf_depth)
            return self.two_torsion_point(j)
        dx = P.x - self.e[j]
        if dx.is_zero:
            if P.y.is_zero:
                # P is within reach of (e_j, 0); y is the etale
                # parameter there and x branches, so the y certificate
                # carries whole and the x certificate is halved
                return Point(self, inf=True,
                             inf_depth=max(P.y.nd, dx.nd // 2))
            raise PrecisionError("shift undecidable: x - e_j vanished")
        tj = self.torsion_slope_product(j)
        return Point(self, self.e[j] + tj / dx,
                     P.y * (-1) * tj / (dx * dx))

    def __repr__(self):
        return "EllipticCurve(p=%d, roots=%r)" % (self.p, self.e)


class TwoIsogeny:
    """Degree-2 isogeny with kernel (e_j, 0), in closed form.

    On the standard cubic x^3 + (a/4) x + (b/4) the kernel datum is
    t = f'(e_j); the codomain has roots (-2 e_j, e_j + 2 s, e_j - 2 s)
    with s = sqrt(t), and the transport is

        x  ->  x + t / (x - e_j)
        y  ->  y (1 - t / (x - e_j)^2).

    The codomain keeps rational 2-torsion only when t is a square; a
    non-square t is reported with a hint to permute the root labels.
    """

    def __init__(self, curve, j):
        self.domain = curve
        self.kernel_index = j
        self.x0 = curve.e[j]
        quarter = PadicScalar.from_fraction(1, 4, curve.p, curve.digits)
        self.t = curve.torsion_slope_product(j)
        try:
            self.sqrt_t = padic_sqrt(self.t)
        except ValidationError:
            raise UnsupportedRegimeError(
                "kernel datum t = f'(e_%d) is not a square; permute the"
                " root labels so the distinguished root has square tangent"
                " datum" % j)
        r0 = self.x0 * (-2)
        r1 = self.x0 + self.sqrt_t * 2
        r2 = self.x0 - self.sqrt_t * 2
        self.codomain = EllipticCurve(curve.p, curve.digits, (r0, r1, r2))
        # consistency: the root construction must reproduce the pushed
        # coefficients a' = a - 20 t, b' = b - 28 t e_j (4-model scaling)
        want_a = curve.a - self.t * 20
        want_b = curve.b - self.t * self.x0 * 28
        if not (self.codomain.a.congruent(want_a, curve.digits - 1)
                and self.codomain.b.congruent(want_b, curve.digits - 1)):
            raise ValidationError("isogenous curve coefficients disagree")
        del quarter

    def __call__(self, P):
        if P.inf:
            if P.inf_depth is not None:
                # the isogeny is etale on the origin disk
                return Point(self.codomain, inf=True,
                             inf_depth=P.inf_depth)
            return self.codomain.infinity()
        dx = P.x - self.x0
        if dx.is_zero:
            if P.y.is_zero:
                # near the kernel point: y is the etale parameter and
                # the kernel disk maps 2:1 onto the origin disk
                return Point(self.codomain, inf=True,
                             inf_depth=max(P.y.nd, dx.nd // 2))
            raise PrecisionError("image undecidable at the kernel")
        x = P.x + self.t / dx
        y = P.y * (1 - self.t / (dx * dx))
        return Point(self.codomain, x, y)

    def codomain_two_torsion_from(self, i):
        """Index of the codomain root that is the image of (e_i, 0)."""
        if i == self.kernel_index:
            raise ValidationError("the kernel maps to the origin")
        img = self(self.domain.two_torsion_point(i))
        for m in range(3):
            d = img.x - self.codomain.e[m]
            if d.is_zero or d.valuation() > 0:
                return m
        raise ValidationError("image of 2-torsion matches no codomain root")
