"""Truncated series rings carrying a lifted Frobenius and a p-derivation.

Two series types live here.

JetSeries is a sparse polynomial in the jet variables T, T', T'', ... with
PadicScalar coefficients, truncated at a total degree bound.  The lifted
Frobenius phi sends each variable to its p-th power plus p times the next
variable (and acts on coefficients through an optional twist); the
p-derivation is delta(F) = (phi(F) - F^p)/p, which is again a series with
integral coefficients whenever F has them.  Since phi never lowers total
degree, a degree-D truncation of the input determines the degree-D
truncation of phi(F) and delta(F).

LaurentSeries is univariate in T with a finite pole order, used for the
coordinate functions and the logarithm on the formal disk.

Precision model: a missing monomial is exactly zero; a stored coefficient
carries its own certified precision, including "zero to O(p^a)" states
that arise from cancellation.  Truncation is the only silent loss and is
recorded in the degree bound plus the exact flag.
"""

import json

from .errors import (
    ConvergenceError,
    IntegralityError,
    PoleError,
    PrecisionError,
    ValidationError,
)
from .padic import PadicScalar, UnramifiedScalar


def _var_names(n):
    return ["T" + "'" * i for i in range(n)]


def _as_coeff(c, p, digits):
    if isinstance(c, PadicScalar):
        return c
    if isinstance(c, int):
        return PadicScalar.from_int(c, p, digits)
    raise ValidationError("coefficient must be PadicScalar or int")


class JetSeries:
    """Sparse series in T, T', ..., T^(r) truncated at a total degree.

    coeffs maps exponent tuples (length nvars) to PadicScalar.  `exact`
    means the dict is the entire object: nothing was ever truncated away.
    """

    __slots__ = ("p", "nvars", "degree", "coeffs", "exact")

    def __init__(self, p, nvars, degree, coeffs, exact=False):
        self.p = p
        self.nvars = nvars
        self.degree = degree
        self.coeffs = coeffs
        self.exact = exact

    # -- constructors ---------------------------------------------------

    @classmethod
    def zero(cls, p, nvars, degree, exact=True):
        return cls(p, nvars, degree, {}, exact)

    @classmethod
    def constant(cls, c, p, nvars, degree, digits=None, exact=True):
        c = _as_coeff(c, p, digits if digits else 8)
        if c.is_zero and c.nd >= 10 ** 6:
            return cls.zero(p, nvars, degree, exact)
        return cls(p, nvars, degree, {(0,) * nvars: c}, exact)

    @classmethod
    def variable(cls, i, p, nvars, degree, digits=8):
        if not 0 <= i < nvars:
            raise ValidationError("variable index out of range")
        e = [0] * nvars
        e[i] = 1
        return cls(p, nvars, degree,
                   {tuple(e): PadicScalar.from_int(1, p, digits)}, True)

    def copy(self):
        return JetSeries(self.p, self.nvars, self.degree,
                         dict(self.coeffs), self.exact)

    # -- structure -------------------------------------------------------

    def min_total_degree(self):
        """Smallest total degree that might carry a nonzero term."""
        if not self.coeffs:
            return None if self.exact else self.degree + 1
        m = min(sum(e) for e in self.coeffs)
        if not self.exact:
            m = min(m, self.degree + 1)
        return m

    def coefficient(self, exps):
        exps = tuple(exps)
        if len(exps) != self.nvars:
            raise ValidationError("exponent arity mismatch")
        c = self.coeffs.get(exps)
        if c is not None:
            return c
        if self.exact or sum(exps) <= self.degree:
            return None  # exactly zero
        raise PrecisionError("coefficient beyond truncation degree")

    def _bound(self):
        return None if self.exact else self.degree

    def raise_order(self, nvars):
        """View in a jet ring with more variables."""
        if nvars < self.nvars:
            raise ValidationError("cannot drop variables")
        pad = (0,) * (nvars - self.nvars)
        return JetSeries(self.p, nvars, self.degree,
                         {e + pad: c for e, c in self.coeffs.items()},
                         self.exact)

    def truncate(self, degree):
        coeffs = {e: c for e, c in self.coeffs.items() if sum(e) <= degree}
        exact = self.exact and len(coeffs) == len(self.coeffs)
        return JetSeries(self.p, self.nvars, degree, coeffs, exact)

    # -- ring operations ---------------------------------------------------

    def _merge_arity(self, other):
        n = max(self.nvars, other.nvars)
        a = self if self.nvars == n else self.raise_order(n)
        b = other if other.nvars == n else other.raise_order(n)
        return a, b

    def _coerce(self, other):
        if isinstance(other, JetSeries):
            return other
        if isinstance(other, (int, PadicScalar)):
            return JetSeries.constant(other, self.p, self.nvars,
                                      self.degree,
                                      digits=_max_digits(self), exact=True)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        a, b = self._merge_arity(other)
        ba, bb = a._bound(), b._bound()
        if ba is None and bb is None:
            bound, exact = max([0] + [sum(e) for e in a.coeffs]
                               + [sum(e) for e in b.coeffs]), True
        else:
            bound = min(x for x in (ba, bb) if x is not None)
            exact = False
        out = dict(a.coeffs)
        for e, c in b.coeffs.items():
            if e in out:
                s = out[e] + c
                out[e] = s
            else:
                out[e] = c
        if not exact:
            out = {e: c for e, c in out.items() if sum(e) <= bound}
        return JetSeries(a.p, a.nvars, bound, out, exact)

    __radd__ = __add__

    def __neg__(self):
        return JetSeries(self.p, self.nvars, self.degree,
                         {e: -c for e, c in self.coeffs.items()}, self.exact)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, PadicScalar)):
            if isinstance(other, int) and other == 0:
                return JetSeries.zero(self.p, self.nvars, self.degree,
                                      self.exact)
            c0 = _as_coeff(other, self.p, _max_digits(self))
            return JetSeries(self.p, self.nvars, self.degree,
                             {e: c * c0 for e, c in self.coeffs.items()},
                             self.exact)
        if not isinstance(other, JetSeries):
            return NotImplemented
        a, b = self._merge_arity(other)
        ba, bb = a._bound(), b._bound()
        if ba is None and bb is None:
            bound = None
        else:
            cands = []
            mb, ma = b.min_total_degree(), a.min_total_degree()
            if ba is not None:
                cands.append(ba + (mb if mb is not None else 0))
            if bb is not None:
                cands.append(bb + (ma if ma is not None else 0))
            bound = min(cands)
        out = {}
        for e1, c1 in a.coeffs.items():
            d1 = sum(e1)
            for e2, c2 in b.coeffs.items():
                if bound is not None and d1 + sum(e2) > bound:
                    continue
                key = tuple(x + y for x, y in zip(e1, e2))
                prod = c1 * c2
                if key in out:
                    out[key] = out[key] + prod
                else:
                    out[key] = prod
        if bound is None:
            deg = max([0] + [sum(e) for e in out])
            return JetSeries(a.p, a.nvars, deg, out, True)
        return JetSeries(a.p, a.nvars, bound, out, False)

    __rmul__ = __mul__

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        r = JetSeries.constant(1, self.p, self.nvars, self.degree,
                               digits=_max_digits(self), exact=True)
        b = self
        while n:
            if n & 1:
                r = r * b
            b = b * b if n > 1 else b
            n >>= 1
        return r

    def scalar_div(self, c):
        c = _as_coeff(c, self.p, _max_digits(self))
        return self * c.inverse()

    def inverse_unit(self, degree=None):
        """Multiplicative inverse of a series with unit constant term.

        The inverse of a non-constant polynomial is an infinite series, so
        the result is truncated: at self.degree by default, or at the
        requested degree for an exact input.  Computed as a geometric
        series in h = F/c - 1, which has no constant term."""
        c0 = self.coeffs.get((0,) * self.nvars)
        if c0 is None or c0.is_zero or c0.valuation() != 0:
            raise ValidationError(
                "inverse needs a unit constant term")
        if degree is None:
            if self.exact and len(self.coeffs) > 1:
                raise ValidationError(
                    "exact non-constant series: choose a truncation degree")
            degree = self.degree
        ci = c0.inverse()
        one = JetSeries.constant(1, self.p, self.nvars, degree,
                                 digits=c0.nd, exact=True)
        h = (self * ci).truncate(degree) - one
        if all(c.is_zero for c in h.coeffs.values()):
            return JetSeries(self.p, self.nvars, degree,
                             {(0,) * self.nvars: ci},
                             self.exact and len(self.coeffs) == 1)
        nd = _max_digits(self)
        acc = JetSeries.constant(1, self.p, self.nvars, degree,
                                 digits=nd, exact=False)
        term = JetSeries.constant(1, self.p, self.nvars, degree,
                                  digits=nd, exact=False)
        # h's constant term is a certified zero, which still occupies a
        # slot in the dict; the geometric series needs the smallest degree
        # that can actually carry a nonzero term.
        live = [sum(e) for e, c in h.coeffs.items() if not c.is_zero]
        mh = min(live) if live else degree + 1
        k = 0
        while (k + 1) * mh <= degree:
            term = (term * h).truncate(degree)
            acc = acc - term if (k % 2 == 0) else acc + term
            k += 1
        out = (acc * ci).truncate(degree)
        out.exact = False
        out.degree = degree
        return out

    # -- the lifted Frobenius and the p-derivation --------------------------

    def phi(self, coeff_map=None):
        """T^(i) -> (T^(i))^p + p T^(i+1), coefficients twisted by coeff_map
        (identity when the base is Z_p).  Raises the jet order by one."""
        p = self.p
        nv = self.nvars + 1
        bound = self._bound()
        out = {}
        for exps, c in self.coeffs.items():
            if coeff_map is not None:
                c = coeff_map(c)
            # expand prod_i (X_i^p + p X_{i+1})^{e_i}
            parts = [((0,) * nv, 1)]
            for i, e in enumerate(exps):
                if e == 0:
                    continue
                # binomial expansion for this factor
                opts = []
                binom = 1
                for k in range(e + 1):
                    mono = [0] * nv
                    mono[i] = p * (e - k)
                    mono[i + 1] += k
                    opts.append((tuple(mono), binom * p ** k))
                    binom = binom * (e - k) // (k + 1)
                nxt = []
                for base, m in parts:
                    for mono, w in opts:
                        key = tuple(x + y for x, y in zip(base, mono))
                        if bound is not None and sum(key) > bound:
                            continue
                        nxt.append((key, m * w))
                parts = nxt
            for key, m in parts:
                term = c * m
                if key in out:
                    out[key] = out[key] + term
                else:
                    out[key] = term
        if bound is None:
            deg = max([0] + [sum(e) for e in out])
            return JetSeries(p, nv, deg, out, True)
        return JetSeries(p, nv, bound, out, False)

    def delta(self, coeff_map=None):
        """(phi(F) - F^p)/p.  Every coefficient of the numerator must be
        divisible by p; a unit coefficient there is reported loudly.

        Over Z_p no separate coefficient correction is needed: phi fixes
        scalars, and for a constant series the numerator c - c^p is p
        times the Fermat quotient of c, which this quotient reproduces."""
        num = self.phi(coeff_map=coeff_map) - (self ** self.p).raise_order(
            self.nvars + 1)
        out = {}
        for e, c in num.coeffs.items():
            if c.is_zero:
                out[e] = PadicScalar.zero(self.p, max(c.nd - 1, 1))
                continue
            if c.v < 1:
                raise IntegralityError(
                    "delta numerator coefficient at %r is a unit: %r"
                    % (e, c))
            out[e] = c.shift(-1)
        return JetSeries(self.p, num.nvars, num.degree, out, num.exact)

    def prolong(self, k):
        """Apply delta k times."""
        f = self
        for _ in range(k):
            f = f.delta()
        return f

    def partial(self, j):
        """Formal partial derivative in the j-th jet variable.

        For a truncated series the derivative is trusted one degree less:
        its degree-D terms come from degree D+1 of the original."""
        if not 0 <= j < self.nvars:
            raise ValidationError("variable index out of range")
        out = {}
        for e, c in self.coeffs.items():
            if e[j] == 0:
                continue
            key = e[:j] + (e[j] - 1,) + e[j + 1:]
            term = c * e[j]
            if key in out:
                out[key] = out[key] + term
            else:
                out[key] = term
        if self.exact:
            deg = max([0] + [sum(e) for e in out])
            return JetSeries(self.p, self.nvars, deg, out, True)
        deg = max(self.degree - 1, 0)
        out = {e: c for e, c in out.items() if sum(e) <= deg}
        return JetSeries(self.p, self.nvars, deg, out, False)

    # -- evaluation -----------------------------------------------------------

    def eval_at(self, values, tail_bound=None):
        """Substitute scalars for the jet variables.

        The truncated tail is accounted for as follows: an exact series has
        no tail; otherwise, if every substituted value has valuation >= 1
        and every kept coefficient is integral, the tail is O(p^((D+1) v))
        with v the smallest substituted valuation (the omitted coefficients
        are integral whenever the kept ones are, for every series this
        engine builds by integral operations).  A caller holding a sharper
        bound passes tail_bound explicitly; unit substitution into a
        truncated series without a caller bound is refused.
        """
        if len(values) != self.nvars:
            raise ValidationError("expected %d values" % self.nvars)
        p = self.p
        tail = None
        if not self.exact:
            if tail_bound is not None:
                tail = tail_bound
            else:
                vmin = None
                for x in values:
                    if x.is_zero:
                        vx = x.nd
                    else:
                        vx = x.valuation()
                    vmin = vx if vmin is None else min(vmin, vx)
                if vmin is None or vmin < 1:
                    raise ConvergenceError(
                        "unit substitution into a truncated series needs an"
                        " explicit tail bound")
                if any((not c.is_zero) and c.v < 0
                       for c in self.coeffs.values()):
                    raise ConvergenceError(
                        "non-integral coefficients: supply a tail bound")
                tail = (self.degree + 1) * vmin
        # cache powers per variable
        maxe = [0] * self.nvars
        for e in self.coeffs:
            for i, k in enumerate(e):
                if k > maxe[i]:
                    maxe[i] = k
        pows = []
        for i, x in enumerate(values):
            row = [None] * (maxe[i] + 1)
            row[0] = None  # handled by skipping
            cur = x
            for k in range(1, maxe[i] + 1):
                row[k] = cur
                cur = cur * x
            pows.append(row)
        acc = None
        for e, c in self.coeffs.items():
            term = c
            for i, k in enumerate(e):
                if k:
                    term = term * pows[i][k]
            acc = term if acc is None else acc + term
        if acc is None:
            acc = PadicScalar.zero(p, tail if tail is not None else 10 ** 6)
            if values and isinstance(values[0], UnramifiedScalar):
                acc = values[0].ring.embed(acc)
        if tail is not None:
            acc = acc + _zero_like(acc, tail)
        return acc

    # -- comparisons ------------------------------------------------------------

    def congruent(self, other, k, degree=None):
        """All coefficients congruent mod p^k up to the common degree."""
        other = self._coerce(other)
        a, b = self._merge_arity(other)
        ba, bb = a._bound(), b._bound()
        cap = degree
        for x in (ba, bb):
            if x is not None:
                cap = x if cap is None else min(cap, x)
        keys = set(a.coeffs) | set(b.coeffs)
        for e in keys:
            if cap is not None and sum(e) > cap:
                continue
            ca = a.coeffs.get(e)
            cb = b.coeffs.get(e)
            if ca is None:
                ca = PadicScalar.zero(a.p, 10 ** 6)
            if cb is None:
                cb = PadicScalar.zero(a.p, 10 ** 6)
            if not ca.congruent(cb, k):
                return False
        return True

    def max_coeff_valuation_defect(self):
        """Smallest coefficient valuation (None for the zero series)."""
        best = None
        for c in self.coeffs.values():
            if c.is_zero:
                continue
            best = c.v if best is None else min(best, c.v)
        return best

    def __repr__(self):
        names = _var_names(self.nvars)
        items = sorted(self.coeffs.items(), key=lambda kv: (sum(kv[0]), kv[0]))
        bits = []
        for e, c in items[:6]:
            mono = "*".join("%s^%d" % (names[i], k) if k > 1 else names[i]
                            for i, k in enumerate(e) if k) or "1"
            bits.append("(%r)*%s" % (c, mono))
        more = " + ..." if len(items) > 6 else ""
        tail = "" if self.exact else " + O(deg %d)" % (self.degree + 1)
        return "JetSeries[" + (" + ".join(bits) or "0") + more + tail + "]"

    # -- serialization ------------------------------------------------------------

    def to_json_dict(self):
        entries = []
        for e in sorted(self.coeffs):
            c = self.coeffs[e]
            entries.append({
                "exponents": list(e),
                "valuation": None if c.is_zero else c.v,
                "unit": c.u,
                "digits": c.nd,
            })
        return {
            "prime": self.p,
            "variables": self.nvars,
            "degree": self.degree,
            "exact": self.exact,
            "entries": entries,
        }

    @classmethod
    def from_json_dict(cls, d):
        p = d["prime"]
        coeffs = {}
        for ent in d["entries"]:
            e = tuple(ent["exponents"])
            if ent["valuation"] is None:
                coeffs[e] = PadicScalar.zero(p, ent["digits"])
            else:
                coeffs[e] = PadicScalar(p, ent["valuation"], ent["unit"],
                                        ent["digits"])
        return cls(p, d["variables"], d["degree"], coeffs, d["exact"])

    def to_json(self):
        return json.dumps(self.to_json_dict(), sort_keys=True,
                          separators=(",", ":"))

    @classmethod
    def from_json(cls, s):
        return cls.from_json_dict(json.loads(s))


def _zero_like(x, abs_prec):
    if isinstance(x, UnramifiedScalar):
        return UnramifiedScalar(x.ring, None, (0, 0), abs_prec)
    return PadicScalar.zero(x.p, abs_prec)


def _max_digits(f):
    best = 8
    for c in f.coeffs.values():
        best = max(best, c.nd)
    return best


def univariate_to_jet(ls, degree=None):
    """View a pole-free LaurentSeries as an order-0 JetSeries."""
    if ls.low() < 0:
        raise PoleError("series has a pole at the origin")
    deg = ls.degree if degree is None else min(degree, ls.degree)
    coeffs = {(n,): c for n, c in ls.coeffs.items() if 0 <= n <= deg}
    return JetSeries(ls.p, 1, deg, coeffs, ls.exact and deg == ls.degree)


def compose_into_jet(g, s):
    """g(s) for a pole-free univariate g and a JetSeries s with no constant
    term, by Horner evaluation.

    Trust bookkeeping: the unknown tail of g starts contributing at total
    degree (deg(g)+1) * mindeg(s), and the unknown tail of s never pollutes
    degrees at or below s's own bound, so the result is trusted to the
    smaller of those two cutoffs (exact when both inputs are exact)."""
    if g.low() < 0:
        raise PoleError("cannot substitute into a pole")
    if any(sum(e) == 0 for e in s.coeffs):
        raise ValidationError("substituted series has a constant term")
    ms = s.min_total_degree()
    if ms is None:
        ms = 1
    cands = []
    if not g.exact:
        cands.append((g.degree + 1) * ms - 1)
    if not s.exact:
        cands.append(s.degree)
    bound = min(cands) if cands else None
    top = max([0] + list(g.coeffs))
    if not g.exact:
        top = min(top, g.degree)
    acc = JetSeries.zero(s.p, s.nvars, 0, exact=True)
    for n in range(top, -1, -1):
        acc = acc * s
        if bound is not None:
            acc = acc.truncate(bound)
        c = g.coeffs.get(n)
        if c is not None:
            acc = acc + JetSeries.constant(c, s.p, s.nvars, acc.degree,
                                           exact=True)
    if bound is not None:
        acc = acc.truncate(bound)
        acc.degree = bound
        acc.exact = False
    return acc


# ----------------------------------------------------------------------
# the p-difference quotient and the depth certificate
# ----------------------------------------------------------------------

def partial_p(g, values, tail_bound=None):
    """The p-difference quotient of g at a point:

        (g^phi(values^p) - g(values)^p) / p

    with values^p taken componentwise.  Over Z_p the coefficient twist is
    the identity.  The numerator is divisible by p by the Frobenius
    congruence; failing that certification raises."""
    p = g.p
    vp = tuple(x ** p for x in values)
    num = g.eval_at(vp, tail_bound=tail_bound) \
        - g.eval_at(values, tail_bound=tail_bound) ** p
    if num.is_zero:
        return _zero_like(num, max(num.nd - 1, 1))
    if num.valuation() < 1:
        raise IntegralityError("p-difference quotient numerator is a unit")
    return num.shift(-1) if isinstance(num, PadicScalar) else \
        UnramifiedScalar(num.ring, num.v - 1, num.uc, num.nd)


def nabla_of(x, length):
    """(x, delta x, delta^2 x, ...) for a scalar x."""
    out = [x]
    for _ in range(length - 1):
        out.append(out[-1].delta())
    return out


def pfaffian_check(f, nabla, depth, tail_bound=None):
    """Depth certificate for a jet equation at a candidate solution.

    f is a series in T, ..., T^(r); nabla = (u, delta u, ..., delta^s u)
    with s >= r + depth + 1.  The certificate consists of

      (a)  f(nabla_r) = 0 mod p, and
      (b)  for 0 <= i <= depth, writing g = delta^i f and P the matching
           prefix of nabla,

             partial_p(g, P)  =  - sum_j  dg/dT^(j) (P^p) * delta(P_j)
             (mod p)

    which together certify v_p(f(nabla_r)) >= depth + 2.  The report also
    carries the directly computed valuation so callers can cross-check the
    equivalence."""
    r = f.nvars - 1
    if len(nabla) < r + depth + 2:
        raise ValidationError(
            "need %d jet coordinates, got %d" % (r + depth + 2, len(nabla)))
    p = f.p
    val0 = f.eval_at(tuple(nabla[:r + 1]), tail_bound=tail_bound)
    cond_a = val0.is_zero or val0.valuation() >= 1
    rows = []
    ok = cond_a
    g = f
    for i in range(depth + 1):
        if i > 0:
            g = g.delta()
        pref = tuple(nabla[:g.nvars])
        lhs = partial_p(g, pref, tail_bound=tail_bound)
        prefp = tuple(x ** p for x in pref)
        rhs = None
        for j in range(g.nvars):
            dj = g.partial(j)
            term = dj.eval_at(prefp, tail_bound=tail_bound) * nabla[j + 1]
            rhs = term if rhs is None else rhs + term
        rhs = -rhs
        diff = lhs - rhs
        holds = diff.is_zero or diff.valuation() >= 1
        rows.append({"i": i, "holds": bool(holds)})
        ok = ok and holds
    if val0.is_zero:
        direct = True if val0.nd >= depth + 2 else None
    else:
        direct = val0.valuation() >= depth + 2
    return {
        "check": "jet-depth-certificate",
        "depth": depth,
        "condition_a": bool(cond_a),
        "condition_b": rows,
        "passes": bool(ok),
        "direct_valuation_ok": direct if direct is None else bool(direct),
    }


def taylor_deformation_report(f, max_check_degree=None):
    """phi on an order-0 series is the deformation F(T^p + p T'): compare
    the substitution computed by phi() against the finite Taylor sum

        sum_k  p^k * F^[k](T^p) * (T')^k

    with F^[k] the k-th divided derivative.  Exact agreement is reported
    coefficient by coefficient."""
    if f.nvars != 1:
        raise ValidationError("deformation report wants an order-0 series")
    p = f.p
    lhs = f.phi()
    bound = lhs._bound()
    deg = bound if bound is not None else lhs.degree
    if max_check_degree is not None:
        deg = min(deg, max_check_degree)
    # divided derivatives of f
    acc = JetSeries.zero(p, 2, deg, exact=lhs.exact)
    k = 0
    cur = {e: c for e, c in f.coeffs.items()}
    while cur:
        part = {}
        for (n,), c in cur.items():
            key = (p * n, k)
            if sum(key) <= deg:
                part[key] = c * p ** k
        acc = acc + JetSeries(p, 2, deg, part, exact=False)
        # next divided derivative: coefficient c*T^n -> c*C(n, k+1) ... do
        # one step: divided derivative of order k -> k+1 multiplies by
        # (n - k) / (k + 1) on the monomial ladder; directly: F^[k+1]
        # coefficient at n-1 is F^[k] coefficient at n times n/(k+1)
        nxt = {}
        for (n,), c in cur.items():
            if n == 0:
                continue
            q, rem = divmod(n, k + 1)
            if rem == 0:
                nxt[(n - 1,)] = c * q
            else:
                nxt[(n - 1,)] = c * n * PadicScalar.from_int(
                    k + 1, p, c.nd).inverse()
        cur = nxt
        k += 1
        if k > deg and k > max([0] + [e[0] for e in f.coeffs]):
            break
    acc.exact = lhs.exact
    agree = lhs.congruent(acc, min(_ser_prec(lhs), _ser_prec(acc)),
                          degree=deg)
    return {
        "check": "frobenius-deformation",
        "degree": deg,
        "agrees": bool(agree),
    }


def _ser_prec(f):
    best = None
    for c in f.coeffs.values():
        a = c.abs_prec
        best = a if best is None else min(best, a)
    return best if best is not None else 10 ** 6


# ----------------------------------------------------------------------
# univariate Laurent series on the formal disk
# ----------------------------------------------------------------------

class LaurentSeries:
    """Finite-pole univariate series sum c_n T^n, truncated above degree D.

    Missing keys are exactly zero; `exact` means nothing was truncated.
    """

    __slots__ = ("p", "coeffs", "degree", "exact")

    def __init__(self, p, coeffs, degree, exact=False):
        self.p = p
        self.coeffs = coeffs
        self.degree = degree
        self.exact = exact

    @classmethod
    def zero(cls, p, degree, exact=True):
        return cls(p, {}, degree, exact)

    @classmethod
    def constant(cls, c, p, degree, digits=8, exact=True):
        c = _as_coeff(c, p, digits)
        return cls(p, {0: c}, degree, exact)

    @classmethod
    def t_power(cls, k, p, degree, digits=8):
        return cls(p, {k: PadicScalar.from_int(1, p, digits)}, degree, True)

    @classmethod
    def from_list(cls, items, p, degree, digits=8, exact=False):
        """items: iterable of (n, coefficient)."""
        coeffs = {}
        for n, c in items:
            coeffs[n] = _as_coeff(c, p, digits)
        return cls(p, coeffs, degree, exact)

    def low(self):
        if not self.coeffs:
            return 0
        return min(self.coeffs)

    def copy(self):
        return LaurentSeries(self.p, dict(self.coeffs), self.degree,
                             self.exact)

    def coefficient(self, n):
        c = self.coeffs.get(n)
        if c is not None:
            return c
        if self.exact or n <= self.degree:
            return None
        raise PrecisionError("coefficient beyond truncation degree")

    def truncate(self, degree):
        coeffs = {n: c for n, c in self.coeffs.items() if n <= degree}
        exact = self.exact and len(coeffs) == len(self.coeffs)
        return LaurentSeries(self.p, coeffs, degree, exact)

    def without_pole_part(self):
        """Drop negative exponents whose coefficients are certified
        zeros.

        Chord-formula compositions cancel their pole coefficients only
        up to the working digits, so a series that is a power series on
        paper can carry certified-zero entries at negative exponents.
        Evaluating the stripped series at v(t) >= 1 stays valid above
        certificate minus |n| v(t); callers compare far below that.
        A negative exponent with a nonzero coefficient is a real pole
        and raises."""
        coeffs = {}
        for n, c in self.coeffs.items():
            if n < 0:
                if not c.is_zero:
                    raise PoleError(
                        "coefficient at T^%d is not a certified zero" % n)
                continue
            coeffs[n] = c
        return LaurentSeries(self.p, coeffs, self.degree, self.exact)

    def _bound(self):
        return None if self.exact else self.degree

    # -- arithmetic --------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, LaurentSeries):
            return other
        if isinstance(other, (int, PadicScalar)):
            return LaurentSeries.constant(other, self.p, self.degree,
                                          digits=_max_digits(self),
                                          exact=True)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        ba, bb = self._bound(), other._bound()
        if ba is None and bb is None:
            bound, exact = max([0] + list(self.coeffs) + list(other.coeffs)), \
                True
        else:
            bound = min(x for x in (ba, bb) if x is not None)
            exact = False
        out = dict(self.coeffs)
        for n, c in other.coeffs.items():
            out[n] = out[n] + c if n in out else c
        if not exact:
            out = {n: c for n, c in out.items() if n <= bound}
        return LaurentSeries(self.p, out, bound, exact)

    __radd__ = __add__

    def __neg__(self):
        return LaurentSeries(self.p, {n: -c for n, c in self.coeffs.items()},
                             self.degree, self.exact)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, PadicScalar)):
            c0 = _as_coeff(other, self.p, _max_digits(self))
            return LaurentSeries(self.p,
                                 {n: c * c0 for n, c in self.coeffs.items()},
                                 self.degree, self.exact)
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        ba, bb = self._bound(), other._bound()
        if ba is None and bb is None:
            bound = None
        else:
            cands = []
            if ba is not None:
                cands.append(ba + other.low())
            if bb is not None:
                cands.append(bb + self.low())
            bound = min(cands)
        out = {}
        for n1, c1 in self.coeffs.items():
            for n2, c2 in other.coeffs.items():
                n = n1 + n2
                if bound is not None and n > bound:
                    continue
                prod = c1 * c2
                out[n] = out[n] + prod if n in out else prod
        if bound is None:
            deg = max([0] + list(out))
            return LaurentSeries(self.p, out, deg, True)
        return LaurentSeries(self.p, out, bound, False)

    __rmul__ = __mul__

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        r = LaurentSeries.constant(1, self.p, self.degree, exact=True)
        b = self
        while n:
            if n & 1:
                r = r * b
            b = b * b if n > 1 else b
            n >>= 1
        return r

    def shifted(self, k):
        """Multiply by T^k (exact reindex)."""
        return LaurentSeries(self.p,
                             {n + k: c for n, c in self.coeffs.items()},
                             self.degree + k, self.exact)

    def inverse(self):
        """Inverse of a series with unit leading coefficient."""
        l = self.low()
        lead = self.coeffs.get(l)
        if lead is None or lead.is_zero:
            raise PoleError("cannot invert: leading coefficient vanishes")
        if lead.v != 0:
            raise PoleError("cannot invert: leading coefficient not a unit")
        bound = self._bound()
        rel = (bound - l) if bound is not None else max(
            [0] + [n - l for n in self.coeffs])
        # write self = lead * T^l * (1 + h), invert the unit part
        inv_lead = lead.inverse()
        h = {}
        for n, c in self.coeffs.items():
            if n == l:
                continue
            h[n - l] = c * inv_lead
        # geometric series: (1+h)^{-1} = sum (-h)^k, h has positive order
        outc = {0: PadicScalar.one(self.p, lead.nd)}
        if h:
            hs = LaurentSeries(self.p, h, rel, False)
            term = LaurentSeries.constant(1, self.p, rel,
                                          digits=lead.nd, exact=True)
            acc = LaurentSeries.constant(1, self.p, rel,
                                         digits=lead.nd, exact=True)
            hmin = min(h)
            k = 1
            while k * hmin <= rel:
                term = (term * hs).truncate(rel)
                acc = acc + (term if k % 2 == 0 else -term)
                k += 1
            outc = acc.coeffs
        out = {n - l: c * inv_lead for n, c in outc.items()}
        deg = (rel - l) if bound is not None else None
        if deg is None:
            # the inverse of a polynomial is generally not one; only a
            # monomial stays exact
            if len(self.coeffs) == 1:
                return LaurentSeries(self.p, out, -l, True)
            deg = rel - l
        return LaurentSeries(self.p, out, deg, False)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self * other.inverse()

    # -- calculus ---------------------------------------------------------------

    def derivative(self):
        out = {}
        for n, c in self.coeffs.items():
            if n == 0:
                continue
            out[n - 1] = c * n
        return LaurentSeries(self.p, out, self.degree - 1, self.exact)

    def integrate(self):
        """Antiderivative with zero constant term.  Divides by exponents,
        so coefficients at multiples of p lose digits; a T^(-1) term has no
        primitive here and is refused."""
        out = {}
        for n, c in self.coeffs.items():
            if n == -1:
                if not c.is_zero:
                    raise PoleError("residue term has no series primitive")
                continue
            out[n + 1] = c * PadicScalar.from_int(n + 1, self.p,
                                                  c.nd + 2).inverse()
        return LaurentSeries(self.p, out, self.degree + 1, self.exact)

    def subst_power(self, k):
        """T -> T^k, exact reindex (k >= 1)."""
        if k < 1:
            raise ValidationError("power substitution wants k >= 1")
        return LaurentSeries(self.p,
                             {n * k: c for n, c in self.coeffs.items()},
                             self.degree * k, self.exact)

    def compose(self, f):
        """self(f) for power series self (low >= 0) and f with order >= 1."""
        if self.low() < 0:
            raise PoleError("cannot compose a pole")
        if f.low() < 1 or (0 in f.coeffs and not f.coeffs[0].is_zero):
            raise ValidationError("inner series needs positive order")
        bf = f._bound()
        bound = bf if bf is not None else f.degree
        bs = self._bound()
        if bs is not None:
            bound = min(bound, bs * max(f.low(), 1))
        top = max([0] + list(self.coeffs))
        acc = LaurentSeries.zero(self.p, bound, exact=False)
        for n in range(top, -1, -1):
            acc = (acc * f).truncate(bound)
            c = self.coeffs.get(n)
            if c is not None:
                acc = acc + LaurentSeries.constant(c, self.p, bound,
                                                   exact=False)
        acc.exact = False
        return acc

    # -- evaluation ----------------------------------------------------------------

    def eval_at(self, x, tail_bound=None):
        """Evaluate at a scalar.  Same tail policy as JetSeries: exact
        series need nothing; truncated series require integral
        coefficients and v(x) >= 1 for the default bound (D+1) v(x), or an
        explicit caller bound."""
        tail = None
        if not self.exact:
            if tail_bound is not None:
                tail = tail_bound
            else:
                vx = x.nd if x.is_zero else x.valuation()
                if vx < 1:
                    raise ConvergenceError(
                        "unit substitution into a truncated series")
                if any((not c.is_zero) and c.v < 0
                       for c in self.coeffs.values()):
                    raise ConvergenceError(
                        "non-integral coefficients: supply a tail bound")
                tail = (self.degree + 1) * vx
        acc = None
        if self.coeffs:
            lo = min(self.coeffs)
            hi = max(self.coeffs)
            pw = {1: x}
            def power(k):
                if k == 0:
                    return None
                if k in pw:
                    return pw[k]
                if k > 0:
                    pw[k] = power(k - 1) * x if k - 1 else x
                    return pw[k]
                pw[k] = power(-k).inverse()
                return pw[k]
            for n, c in self.coeffs.items():
                xp = power(n)
                term = c if xp is None else c * xp
                acc = term if acc is None else acc + term
        if acc is None:
            acc = PadicScalar.zero(self.p, tail if tail else 10 ** 6)
            if isinstance(x, UnramifiedScalar):
                acc = x.ring.embed(acc)
        if tail is not None:
            acc = acc + _zero_like(acc, tail)
        return acc

    def congruent(self, other, k, degree=None):
        other = self._coerce(other)
        ba, bb = self._bound(), other._bound()
        cap = degree
        for x in (ba, bb):
            if x is not None:
                cap = x if cap is None else min(cap, x)
        for n in set(self.coeffs) | set(other.coeffs):
            if cap is not None and n > cap:
                continue
            ca = self.coeffs.get(n, PadicScalar.zero(self.p, 10 ** 6))
            cb = other.coeffs.get(n, PadicScalar.zero(self.p, 10 ** 6))
            if not ca.congruent(cb, k):
                return False
        return True

    def __repr__(self):
        items = sorted(self.coeffs.items())
        bits = ["(%r)*T^%d" % (c, n) for n, c in items[:6]]
        more = " + ..." if len(items) > 6 else ""
        tail = "" if self.exact else " + O(T^%d)" % (self.degree + 1)
        return "LaurentSeries[" + (" + ".join(bits) or "0") + more + tail + "]"
