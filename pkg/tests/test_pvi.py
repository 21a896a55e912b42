"""The Painleve VI solver: the force term and its derivative, the
residual and its symmetries, disk-by-disk root finding against a
straight enumeration oracle, isogeny transfer, prime integral checks,
and the JSON/CSV formats."""

import json
import random

import pytest

from arithpvi.deltachar import _eval_log, _psi_tail_bound, psi_eval
from arithpvi.elliptic import EllipticCurve, TwoIsogeny
from arithpvi.errors import (
    BudgetError,
    PoleError,
    ValidationError,
)
from arithpvi.padic import PadicScalar, Zp2, teichmuller
from arithpvi.pvi import (
    PviProblem,
    chart_series,
    dr_over_omega,
    prime_integral_check,
    quadratic_point,
    r_eval,
    residual,
    rho_eval,
    solutions_to_csv,
    solve,
    transfer_solutions,
)

P5 = 5
ROOTS = (0, 1, -1)


def make_problem(alphas, N=3, guard=8, version="plain", p=P5, roots=ROOTS):
    return PviProblem(p, N, roots, alphas, version=version, guard=guard)


def base_points(problem, count, seed):
    """Sample affine unit-y points with a spread of disk parameters."""
    E = problem.curve
    rng = random.Random(seed)
    disks = [(x, y) for (x, y) in E.points_mod_p() if y % E.p]
    out = []
    for _ in range(count):
        xb, yb = rng.choice(disks)
        Q0 = E.lift_point(xb, yb)
        # keep the parameter at valuation exactly 1: chord additions
        # with deep disk points honestly cancel about 3 v(t) digits
        s = rng.randrange(E.p ** 3)
        if s % E.p == 0:
            s += 1
        t = PadicScalar.from_int(E.p * s, E.p, E.digits)
        out.append(Q0 + E.disk_point(t))
    return out


# ---------------------------------------------------------------------------
# the force term r and its derivative


def test_r_eval_zero_force_is_zero():
    prob = make_problem((0, 0, 0, 0))
    for Q in base_points(prob, 4, seed=11):
        val = r_eval(prob, Q)
        assert val.is_zero
        val2 = dr_over_omega(prob, Q)
        assert val2.is_zero


def test_r_eval_single_term_is_translated_y():
    # with only alpha_0 nonzero the force is y(Q) itself, and with only
    # alpha_2 nonzero it is y of the translate by the second root
    prob0 = make_problem((3, 0, 0, 0))
    prob2 = PviProblem.from_curve(prob0.curve, prob0.N, (0, 0, 3, 0))
    E = prob0.curve
    for Q in base_points(prob0, 4, seed=12):
        v0 = r_eval(prob0, Q)
        assert v0.congruent(Q.y * prob0.alphas[0], prob0.N)
        S = Q + E.two_torsion_point(1)
        v2 = r_eval(prob2, Q)
        assert v2.congruent(S.y * prob2.alphas[2], prob2.N)


def test_r_eval_is_odd():
    # translating -Q by the 2-torsion point P_j gives the negative of
    # the translate of Q, so r(-Q) = -r(Q) for every force vector
    prob = make_problem((1, 2, 0, 3))
    E = prob.curve
    for Q in base_points(prob, 4, seed=13):
        a = r_eval(prob, -Q)
        b = r_eval(prob, Q)
        assert a.congruent(-b, prob.N)


def test_r_eval_pole_detection():
    prob = make_problem((0, 1, 0, 0))
    E = prob.curve
    # the translate of P_1 by P_1 is the identity, where y has a pole
    with pytest.raises(PoleError):
        r_eval(prob, E.two_torsion_point(0))


def test_dr_over_omega_single_term_formula():
    # d(y o tau_j)/omega = f'(x(Q+P_j))/2 for the translation-invariant
    # differential; with one alpha the sum collapses to a single term
    prob = make_problem((0, 0, 2, 0))
    E = prob.curve
    half = PadicScalar.from_int(1, P5, E.digits) / 2
    for Q in base_points(prob, 4, seed=14):
        S = Q + E.two_torsion_point(1)
        fp = S.x * S.x * 12 + E.a
        want = fp * half * prob.alphas[2]
        got = dr_over_omega(prob, Q)
        assert got.congruent(want, prob.N)


def test_dr_over_omega_finite_difference():
    # independent check of the derivative (and of its sign): move Q by a
    # small disk increment D(h), divide the change in r by the logarithm
    # ell(h) of the increment, and compare with the closed form; the
    # deep guard pays for the ~3 v(h) digits the increment costs
    prob = PviProblem(P5, 4, ROOTS, (1, 2, 0, 1), guard=24)
    E = prob.curve
    h = PadicScalar.from_int(P5 ** 5, P5, E.digits)
    ell = _eval_log(E, h)
    for Q in base_points(prob, 3, seed=15):
        moved = Q + E.disk_point(h)
        diff = (r_eval(prob, moved) - r_eval(prob, Q)) / ell
        want = dr_over_omega(prob, Q)
        assert diff.congruent(want, 4)


# ---------------------------------------------------------------------------
# rho and the residual


def test_rho_versions_collapse_on_base_points():
    # over Z_p the Frobenius twist acts as the identity on values, so
    # the plain and twisted sides of the equation agree pointwise
    plain = make_problem((1, 0, 2, 1))
    twisted = PviProblem.from_curve(plain.curve, plain.N, (1, 0, 2, 1),
                                    version="twisted")
    for Q in base_points(plain, 5, seed=16):
        a = rho_eval(plain, Q)
        b = rho_eval(twisted, Q)
        assert a.congruent(b, plain.N)
        assert residual(plain, Q).congruent(residual(twisted, Q), plain.N)


def test_rho_versions_differ_off_the_base_ring():
    # negative control: at a point with y in the quadratic unramified
    # extension but not in Z_p, the twist moves the value
    plain = make_problem((1, 0, 0, 0))
    twisted = PviProblem.from_curve(plain.curve, plain.N, (1, 0, 0, 0),
                                    version="twisted")
    ring = Zp2(P5, plain.curve.digits)
    Q = quadratic_point(plain.curve, ring, rng=random.Random(17))
    assert not Q.y.in_base_ring()
    a = rho_eval(plain, Q)
    b = rho_eval(twisted, Q)
    d = a - b
    assert not d.is_zero
    assert d.valuation() < plain.N


def test_residual_is_odd():
    prob = make_problem((2, 1, 1, 0))
    E = prob.curve
    for Q in base_points(prob, 3, seed=18):
        a = residual(prob, -Q)
        b = residual(prob, Q)
        assert a.congruent(-b, prob.N - 1)


# ---------------------------------------------------------------------------
# the solver against a straight enumeration oracle


def enumeration_oracle(problem):
    """Accepted (disk, t) pairs by direct evaluation, no solver
    machinery: lift each unit-y residue disk, walk every t in the grid,
    and test the residual valuation against the same threshold."""
    E = problem.curve
    found = set()
    for (xb, yb) in sorted(E.points_mod_p()):
        if yb % E.p == 0:
            continue
        Q0 = E.lift_point(xb, yb)
        for s in range(E.p ** (problem.N - 1)):
            t = PadicScalar.from_int(E.p * s, E.p, E.digits)
            Q = Q0 + E.disk_point(t)
            res = psi_eval(E, Q) - rho_eval(problem, Q)
            if res.val_at_least(problem.N - 2):
                found.add(((xb, yb), E.p * s))
    return found


def record_set(records):
    return {(rec.disk, rec.t) for rec in records}


def test_solve_matches_enumeration_oracle():
    prob = make_problem((1, 0, 0, 0))
    details = {}
    records = solve(prob, details=details)
    assert record_set(records) == enumeration_oracle(prob)
    assert details["lifting_disagreements"] == []
    assert details["guard_digits"] >= prob.guard
    # acceptance reads a valuation against the grid level, so accepted
    # parameters come in full residue classes: multiples of p per disk
    per_disk = {}
    for rec in records:
        per_disk[rec.disk] = per_disk.get(rec.disk, 0) + 1
    assert all(n % prob.p == 0 for n in per_disk.values())


def test_solve_finds_torsion_for_zero_force():
    # with no force the residual is psi itself, which vanishes on
    # prime-to-p torsion; every unit-y residue disk on this curve
    # carries an order-4 torsion lift and it must be among the accepted
    # classes of its disk
    prob = make_problem((0, 0, 0, 0), N=4)
    records = solve(prob)
    E = prob.curve
    for (xb, yb) in E.points_mod_p():
        if yb % E.p == 0:
            continue
        T = E.torsion_point_above((xb, yb))
        hits = [rec for rec in records if rec.disk == (xb, yb)
                and rec.point.congruent(T, prob.N - 2)]
        assert len(hits) == prob.p


def test_solution_set_is_negation_stable():
    # the residual is odd, so Q is a solution iff -Q is; on the level of
    # records this swaps the disk with its mirror and negates t
    prob = make_problem((1, 0, 0, 0))
    records = solve(prob)
    got = record_set(records)
    grid = prob.p ** prob.N
    mirrored = {((x, (-y) % prob.p), (-t) % grid) for ((x, y), t) in got}
    assert mirrored == got


def test_solve_plain_and_twisted_agree_over_base():
    plain = make_problem((1, 0, 0, 0))
    twisted = make_problem((1, 0, 0, 0), version="twisted")
    assert record_set(solve(plain)) == record_set(solve(twisted))


def test_solve_budget_error():
    prob = make_problem((1, 0, 0, 0))
    with pytest.raises(BudgetError):
        solve(prob, budget=10)


def test_residual_valuations_reported():
    prob = make_problem((1, 0, 0, 0))
    for rec in solve(prob):
        assert rec.residual_valuation >= prob.N - 2
        fresh = residual(prob, rec.point)
        assert fresh.val_at_least(prob.N - 2)


# ---------------------------------------------------------------------------
# the residual as a series in the disk chart


def test_chart_series_matches_pointwise_residual():
    prob = PviProblem(P5, 6, ROOTS, (1, 0, 2, 0), guard=6)
    E = prob.curve
    Q0 = E.lift_point(2, 2)
    degree = 8
    chart = chart_series(prob, Q0, degree=degree)
    # evaluate at parameters of valuation 2 so the omitted tail of the
    # degree-8 chart sits below the comparison depth
    tail = _psi_tail_bound(degree, 2, P5)
    for tint in (25, 50, 175):
        t = PadicScalar.from_int(tint, P5, E.digits)
        jets = (t, t.delta(), t.delta().delta())
        via_series = chart.eval_at(jets, tail_bound=tail)
        direct = residual(prob, Q0 + E.disk_point(t))
        k = min(prob.N, via_series.abs_prec, direct.abs_prec)
        assert k >= 3
        assert via_series.congruent(direct, k)


def test_chart_series_twisted_collapses_at_base_jets():
    prob = PviProblem(P5, 6, ROOTS, (1, 0, 2, 0), guard=6)
    twisted = PviProblem.from_curve(prob.curve, prob.N, (1, 0, 2, 0),
                                    version="twisted")
    E = prob.curve
    Q0 = E.lift_point(3, 1)
    tail = _psi_tail_bound(8, 2, P5)
    t = PadicScalar.from_int(50, P5, E.digits)
    jets = (t, t.delta(), t.delta().delta())
    a = chart_series(prob, Q0).eval_at(jets, tail_bound=tail)
    b = chart_series(twisted, Q0).eval_at(jets, tail_bound=tail)
    k = min(prob.N, a.abs_prec, b.abs_prec)
    assert k >= 3
    assert a.congruent(b, k)


# ---------------------------------------------------------------------------
# transfer along a 2-isogeny


def test_transfer_solutions_report():
    # the kernel must sit at the root whose tangent datum is a square,
    # which for these roots is e_1 = 0, and the force must be paired
    # across the kernel translate
    prob = make_problem((1, 1, 2, 2), N=4)
    report = transfer_solutions(prob, kernel_index=1, samples=6, seed=3)
    assert report["status"] == "ok"
    assert report["unmatched_image_disks"] == []
    assert all(f["status"] == "ok" for f in report["forward"])
    assert all(m["status"] == "ok" for m in report["matched_disks"])
    assert all(c["psi_match"] and c["force_match"]
               for c in report["identity_chain"])
    assert report["upstairs_count"] > 0
    assert report["downstairs_count"] > 0


def test_transfer_requires_paired_force():
    prob = make_problem((1, 0, 0, 0), N=4)
    with pytest.raises(ValidationError):
        transfer_solutions(prob, kernel_index=1)
    with pytest.raises(ValidationError):
        transfer_solutions(make_problem((1, 1, 2, 2), N=4), kernel_index=4)


def test_isogeny_intertwines_force():
    # the algebraic identity behind the transfer: for the normalized
    # 2-isogeny with kernel (e_j, 0), y'(pi Q) = y(Q) + y(Q + P_j)
    prob = make_problem((1, 1, 2, 2))
    E = prob.curve
    iso = TwoIsogeny(E, 0)
    for Q in base_points(prob, 4, seed=19):
        S = Q + E.two_torsion_point(0)
        img = iso(Q)
        assert img.y.congruent(Q.y + S.y, prob.N)


# ---------------------------------------------------------------------------
# prime integral checks


def test_prime_integral_teichmuller_constant_passes():
    prob = make_problem((1, 0, 0, 0))
    records = solve(prob)
    c = teichmuller(3, P5, prob.curve.digits)

    def H(Q):
        return c

    report = prime_integral_check(H, prob, records)
    assert report["status"] == "ok"
    assert all(e["status"] == "ok" for e in report["entries"])


def test_prime_integral_x_coordinate_fails():
    prob = make_problem((1, 0, 0, 0))
    records = solve(prob)

    def H(Q):
        return Q.x

    report = prime_integral_check(H, prob, records)
    assert report["status"] == "fail"
    assert any(e["status"] == "fail" for e in report["entries"])


def test_prime_integral_empty_records():
    prob = make_problem((1, 0, 0, 0))
    report = prime_integral_check(lambda Q: Q.x, prob, [])
    assert report["status"] == "empty"


# ---------------------------------------------------------------------------
# problem validation and serialization


def test_problem_validation():
    with pytest.raises(ValidationError):
        PviProblem(P5, 2, ROOTS, (1, 0, 0, 0))
    with pytest.raises(ValidationError):
        PviProblem(P5, 3, ROOTS, (1, 0, 0))
    with pytest.raises(ValidationError):
        PviProblem(P5, 3, ROOTS, (1, 0, 0, 0), version="other")
    with pytest.raises(ValidationError):
        PviProblem(P5, 3, (0, 1, 2), (1, 0, 0, 0))


def test_with_guard_requires_root_data():
    prob = make_problem((1, 0, 0, 0))
    deeper = prob.with_guard(prob.guard + 4)
    assert deeper.curve.digits == prob.N + prob.guard + 4
    wrapped = PviProblem.from_curve(prob.curve, prob.N, (1, 0, 0, 0))
    with pytest.raises(ValidationError):
        wrapped.with_guard(12)


def test_json_round_trip_is_byte_stable():
    prob = make_problem((1, 0, 2, 3), version="twisted")
    blob = prob.to_json()
    again = PviProblem.from_json(blob)
    assert again.to_json() == blob
    data = json.loads(blob)
    assert data["curve"]["p"] == P5
    assert data["version"] == "twisted"


def test_csv_shape_and_determinism():
    prob = make_problem((1, 0, 0, 0))
    records = solve(prob)
    text = solutions_to_csv(prob, records)
    lines = text.split("\n")
    assert lines[0] == "disk,x,y,residual_valuation"
    assert lines[-1] == ""
    assert len(lines) == len(records) + 2
    for line in lines[1:-1]:
        disk, x, y, v = line.split(",")
        assert ":" in disk
        int(x), int(y), int(v)
    assert text == solutions_to_csv(prob, solve(prob))


def test_quadratic_point_lies_on_curve():
    prob = make_problem((1, 0, 0, 0))
    ring = Zp2(P5, prob.curve.digits)
    Q = quadratic_point(prob.curve, ring, rng=random.Random(23))
    E = prob.curve
    lhs = Q.y * Q.y
    want = Q.x * Q.x * Q.x * 4 + E.a * Q.x + E.b
    d = lhs - want
    assert d.is_zero or d.valuation() >= prob.N
