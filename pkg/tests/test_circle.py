"""Exponential sums, arc families, and the counting integrals."""

import random
from fractions import Fraction

import pytest

from ffcircle import circle
from ffcircle.circle import ArcParams, arc_membership, best_approx
from ffcircle.curves import BoxCensus, h0_twist
from ffcircle.cyclo import CycloValue
from ffcircle.fields import Fq
from ffcircle.forms import Form
from ffcircle.laurent import LaurentAtInfinity, RationalArcPoint
from ffcircle.polyring import PolyT, pdeg, pgcd, pmod, psub, ptrim

from oracles import brute_S_beta, brute_box_phase_sum, brute_torus_sum, polys_up_to

F5 = Fq.get(5)
CUBIC3 = Form.fermat(F5, 3, 3)
LINE3 = [(0, 1), (0, 4), ()]  # T, 4T, 0: on the cubic, content T


def seeded_tail(ctx, seed, prec=8, top=-1):
    rng = random.Random(seed)
    return LaurentAtInfinity.from_tail(
        ctx, {m: rng.randrange(ctx.q) for m in range(-prec, top + 1)}, prec
    )


# -- S_beta -----------------------------------------------------------------


def test_S_beta_matches_brute():
    for seed in (1, 2, 3):
        beta = seeded_tail(F5, seed)
        for rho in (0, -1):
            got = circle.S_beta(CUBIC3, LINE3, beta, rho, e=1)
            want = brute_S_beta(CUBIC3, LINE3, beta, rho, 1)
            assert got == want, (seed, rho)


def test_S_beta_empty_box_is_one():
    beta = seeded_tail(F5, 9)
    assert circle.S_beta(CUBIC3, LINE3, beta, rho=1, e=1) == CycloValue.integer(5, 5, 1)


def test_torus_integral_matches_brute():
    # exact once the tail precision covers every phase slot
    prec = 2 * 1 + 1  # (d-1)e + (e-rho) at rho = 0
    total = brute_torus_sum(CUBIC3, LINE3, 0, 1, prec)
    integral = circle.integral_S_beta_T(CUBIC3, LINE3, 0, e=1)
    assert total == CycloValue.integer(5, 5, integral * 5**prec)
    assert integral == 25


def test_torus_integral_equals_h0_route():
    for g, rho in [(LINE3, 0), (LINE3, -1), ([(1,), (4,), ()], 0)]:
        integral = circle.integral_S_beta_T(CUBIC3, g, rho, e=1)
        assert integral == 5 ** h0_twist(CUBIC3, g, 1, rho)


# -- the closed form at rational points -------------------------------------


def test_S_beta_closed_matches_direct():
    # denominators dividing content^(d-1) light up, others vanish
    theta0 = LaurentAtInfinity.zero(F5, 8)
    for r_coeffs, a_coeffs in [((0, 1), (1,)), ((0, 1), (2,)), ((1, 1), (3,))]:
        pt = RationalArcPoint(PolyT(F5, a_coeffs), PolyT(F5, r_coeffs), theta0)
        closed = circle.S_beta_closed(CUBIC3, LINE3, pt, j=0, rho=0, e=1)
        direct = circle.S_beta(CUBIC3, LINE3, pt, 0, e=1)
        assert direct == CycloValue.integer(5, 5, closed)
        expect_hit = not pmod(F5, (0, 0, 1), r_coeffs)  # r | T^2
        assert (closed == 125) == expect_hit and (closed in (0, 125))


def test_S_beta_closed_with_theta():
    # |theta| below the curve-dependent radius keeps the full value; at
    # the radius itself the sum vanishes (r = 1 keeps both admissible)
    small = LaurentAtInfinity.from_tail(F5, {-4: 1}, 8)
    big = LaurentAtInfinity.from_tail(F5, {-3: 1}, 8)
    one, zero = PolyT(F5, (1,)), PolyT(F5, ())
    hit = circle.S_beta_closed(CUBIC3, LINE3, RationalArcPoint(zero, one, small), 0, 0, 1)
    assert hit == 125
    assert circle.S_beta(CUBIC3, LINE3, small, 0, e=1) == CycloValue.integer(5, 5, 125)
    miss = circle.S_beta_closed(CUBIC3, LINE3, RationalArcPoint(zero, one, big), 0, 0, 1)
    assert miss == 0
    assert circle.S_beta(CUBIC3, LINE3, big, 0, e=1).is_zero


def test_S_beta_closed_needs_small_curve():
    # the lemma's box hypothesis |g| <= q^(e-j): at j = 1 a degree-1
    # curve is out of range, and the direct sum genuinely disagrees
    # with the would-be closed form there
    big = LaurentAtInfinity.from_tail(F5, {-2: 1}, 8)
    pt = RationalArcPoint(PolyT(F5, (1,)), PolyT(F5, (0, 1)), big)
    with pytest.raises(ValueError):
        circle.S_beta_closed(CUBIC3, LINE3, pt, 1, 0, 1)
    assert circle.S_beta(CUBIC3, LINE3, pt, 0, e=1) == CycloValue.integer(5, 5, 125)


def test_S_beta_closed_hypothesis_guards():
    theta0 = LaurentAtInfinity.zero(F5, 8)
    with pytest.raises(ValueError):  # |r| > q^(e-rho)
        circle.S_beta_closed(
            CUBIC3, LINE3, RationalArcPoint(PolyT(F5, (1,)), PolyT(F5, (0, 0, 1)), theta0), 0, 1, 1
        )
    with pytest.raises(ValueError):  # f(g) != 0
        circle.S_beta_closed(
            CUBIC3, [(1,), (1,), ()], RationalArcPoint(PolyT(F5, (1,)), PolyT(F5, (0, 1)), theta0), 0, 0, 1
        )
    wide = LaurentAtInfinity.from_tail(F5, {-1: 1}, 8)
    with pytest.raises(ValueError):  # |r theta| too large
        circle.S_beta_closed(
            CUBIC3, LINE3, RationalArcPoint(PolyT(F5, (1,)), PolyT(F5, (0, 1)), wide), 0, 0, 1
        )


# -- arc families -----------------------------------------------------------


def brute_member(x, cap, W):
    """Literal union-of-balls test over all reduced fractions."""
    if cap < 0:
        return False
    for r in polys_up_to(x.ctx, cap):
        if not r or r[-1] != 1:
            continue  # monic denominators only
        for a in polys_up_to(x.ctx, pdeg(r) - 1):
            if pdeg(pgcd(x.ctx, a, r)) != 0:
                continue
            err = x.mul_poly(r) - LaurentAtInfinity.from_poly(x.ctx, a, x.prec)
            if err.abs_lt(W):
                return True
    return False


def test_arc_membership_matches_brute():
    params = ArcParams(5, 3, 3, 1, 0, 0)
    for seed in range(12):
        x = seeded_tail(F5, seed)
        for J in (0, 1, 2):
            got = arc_membership(x, "M", params, J)
            want = brute_member(x, J, J - params.d * params.P0_deg)
            assert got["member"] == want, (seed, J)
            if got["member"]:
                pt = got["witness"]
                err = x.mul_poly(pt.r) - LaurentAtInfinity.from_poly(F5, pt.a.coeffs, x.prec)
                assert err.abs_lt(J - params.d * params.P0_deg)
        for K in (0, 1, 2):
            got = arc_membership(x, "N", params, K)
            want = brute_member(x, K, K - (params.d - 1) * params.P0_deg - params.Q_deg)
            assert got["member"] == want, (seed, K)


def test_arc_families_are_nested():
    params = ArcParams(5, 3, 3, 2, 1, 0)
    for seed in range(20):
        x = seeded_tail(F5, seed + 100)
        inside = [arc_membership(x, "M", params, J)["member"] for J in range(0, 4)]
        for a, b in zip(inside, inside[1:]):
            assert b or not a  # membership is monotone in the level


def test_rational_points_are_members():
    # a/r itself lies in every family whose cap admits r
    params = ArcParams(5, 3, 3, 1, 0, 0)
    theta = LaurentAtInfinity.from_tail(F5, {-7: 2}, 10)
    pt = RationalArcPoint(PolyT(F5, (2,)), PolyT(F5, (0, 1)), theta)
    x = pt.beta(10)
    assert arc_membership(x, "M", params, 1)["member"]
    assert not arc_membership(x, "M", params, 0)["member"]


# -- near-rational integrals ------------------------------------------------


def test_major_integral_for_content_line():
    res = circle.major_integral(CUBIC3, LINE3, j=0, rho=0, e=1)
    # content T of degree 1 = e(n-d)... the main term is q^((n-1)(e-rho))
    assert res["main"] == Fraction(25)
    assert res["value"] == res["main"] + res["discrepancy"]
    assert Fraction(-1) <= res["epsilon"] <= Fraction(1)


def test_major_integral_guards():
    with pytest.raises(ValueError):
        circle.major_integral(CUBIC3, [(1,), (1,), ()], 0, 0, 1)  # not on the cubic
    with pytest.raises(ValueError):
        circle.major_integral(CUBIC3, LINE3, 0, 2, 1)  # e < rho


def test_N_rho_split_frozen_n3():
    res = circle.N_rho_split(CUBIC3, 1, 0)
    assert res["n_rho"] == 0  # no coprime degree-1 curves on this surface
    assert res["major"] == -2880
    assert res["minor"] == 2880
    assert res["n_rho"] == res["major"] + res["minor"]
    assert res["main_cancellation_ok"]


def test_N_rho_split_frozen_f7(fermat7, box7_e1):
    res = circle.N_rho_split(fermat7, 1, 0, box=box7_e1)
    assert res["n_rho"] == 2667168
    assert res["major"] == -1016064
    assert res["minor"] == 3683232
    assert res["main_part"] == 381024
    assert res["by_j"] == {0: 613872, 1: 203742}
    assert res["spill_curves"] == 4752
    assert res["main_cancellation_ok"]


def test_n_rho_direct_equals_census_route(census5_e1):
    # per-row kernel sums against the orbit-weighted aggregate
    direct = circle.n_rho_direct(census5_e1.form, 1, 0, box=census5_e1.box)
    assert direct == census5_e1.N_rho(0) == 36000


# -- multilinear counts and the differencing inequalities -------------------

CUBIC2 = Form.fermat(F5, 2, 3)


def brute_N_alpha(form, gamma, r, box_deg):
    ctx = form.ctx
    cnt = 0
    vec_pool = list(polys_up_to(ctx, box_deg - 1))
    import itertools

    for combo in itertools.product(vec_pool, repeat=(form.d - 1) * form.n):
        vecs = [
            [combo[v * form.n + i] for i in range(form.n)] for v in range(form.d - 1)
        ]
        ok = True
        for i in range(form.n):
            phase = form.psi(i, vecs).coeffs
            prod = gamma.mul_poly(phase)
            if any(prod.coeff(-1 - t) != 0 for t in range(r)):
                ok = False
                break
        if ok:
            cnt += 1
    return cnt


def test_N_alpha_r_matches_brute():
    for seed in (4, 5):
        gamma = seeded_tail(F5, seed)
        got = circle.N_alpha_r(CUBIC2, gamma, 1, 1)
        assert got == brute_N_alpha(CUBIC2, gamma, 1, 1)


def test_N_alpha_r_zero_gamma_counts_everything():
    gamma = LaurentAtInfinity.zero(F5, 8)
    assert circle.N_alpha_r(CUBIC2, gamma, 2, 1) == 5 ** ((3 - 1) * 2 * 1)


def test_shrink_check():
    gamma = seeded_tail(F5, 6)
    res = circle.shrink_check(CUBIC2, gamma, r=1, box_deg=2, s=1)
    assert res["ok"] and res["n_full"] <= res["bound"] * res["n_shrunk"]
    with pytest.raises(ValueError):
        circle.shrink_check(CUBIC2, gamma, r=1, box_deg=3, s=1)


def test_weyl_at_zero():
    params = ArcParams(5, 3, 2, 2, 1, 1)
    zero = LaurentAtInfinity.zero(F5, 8)
    res = circle.weyl_checks(CUBIC2, zero, zero, params)
    # at alpha = beta = 0 the sum is the full double box and the
    # deviation from c = q^(n Q) is driven by the g-box alone
    assert res["S"] == CycloValue.integer(5, 5, 5 ** (2 * params.P_deg + 2 * params.Q_deg))
    assert res["weyl1_ok"] and res["weyl2_ok"]


def test_weyl_seeded():
    params = ArcParams(5, 3, 2, 2, 0, 1)
    for seed in (7, 8):
        alpha, beta = seeded_tail(F5, seed), seeded_tail(F5, seed + 50)
        res = circle.weyl_checks(CUBIC2, alpha, beta, params)
        assert res["weyl1_ok"] and res["weyl2_ok"] is not False


def test_structural_minor_arc():
    # level M = 2 covers the whole torus here, so minor arcs need J = 1
    params = ArcParams(5, 3, 2, 1, 0, 0)
    hits = 0
    for seed in range(30):
        gamma = seeded_tail(F5, seed)
        if arc_membership(gamma, "M", params, 1)["member"]:
            continue
        res = circle.structural_check(CUBIC2, gamma, params, "M", 1)
        assert res["ok"] and res["violations"] == 0
        hits += 1
    assert hits > 0


def test_structural_rejects_members():
    params = ArcParams(5, 3, 2, 1, 0, 0)
    zero = LaurentAtInfinity.zero(F5, 8)  # 0 = 0/1 lies in every family
    with pytest.raises(ValueError):
        circle.structural_check(CUBIC2, zero, params, "M", 2)


# -- the plain box sum and its average --------------------------------------


def test_S_BV_matches_brute():
    for seed in (1, 2):
        alpha = seeded_tail(F5, seed + 200)
        got = circle.S_BV(CUBIC2, alpha, 1)
        assert got == brute_box_phase_sum(CUBIC2, alpha, 1)
    zero = LaurentAtInfinity.zero(F5, 8)
    assert circle.S_BV(CUBIC2, zero, 1) == CycloValue.integer(5, 5, 5**4)


def test_bv_integral_check_small():
    res = circle.bv_integral_check(CUBIC2, 1)
    assert res["ok"]
    box = BoxCensus.build(CUBIC2, 1)
    assert res["n_hat"] == box.total_in_box(1)
