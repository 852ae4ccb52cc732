"""Laurent tails at the infinite place and rational approximation."""

import random

from hypothesis import given, strategies as st

from ffcircle.fields import Fq
from ffcircle.laurent import LaurentAtInfinity, RationalArcPoint, best_approx
from ffcircle.polyring import PolyT, pdeg, ptrim

F5 = Fq.get(5)


def tails(prec=6, top=2):
    return st.dictionaries(
        st.integers(min_value=-prec, max_value=top), st.sampled_from(range(1, 5)), max_size=5
    ).map(lambda d: LaurentAtInfinity.from_tail(F5, d, prec))


def test_from_poly_window():
    x = LaurentAtInfinity.from_poly(F5, (2, 0, 3), 4)
    assert x.coeff(2) == 3 and x.coeff(1) == 0 and x.coeff(0) == 2
    assert x.coeff(-3) == 0
    # window lists coefficients from the top exponent downward
    assert x.window(-2, 2) == [3, 0, 2, 0, 0]


@given(tails(), tails())
def test_add_sub_roundtrip(x, y):
    z = (x + y) - y
    lo = max(-x.prec, -y.prec)
    assert z.window(lo, max(z.top, x.top)) == x.window(lo, max(z.top, x.top))


@given(tails())
def test_mul_poly_shifts(x):
    y = x.mul_poly((0, 1))  # multiply by T
    for m in range(-x.prec + 1, x.top + 2):
        assert y.coeff(m) == x.coeff(m - 1)


def test_expand_ratio_recovers_numerator():
    rng = random.Random(7)
    for _ in range(20):
        r = PolyT(F5, ptrim((rng.randrange(5), rng.randrange(5), 1)))
        a = PolyT(F5, ptrim((rng.randrange(5), rng.randrange(1, 5))))
        x = LaurentAtInfinity.expand_ratio(F5, a, r, 10)
        back = x.mul_poly(r)
        err = back - LaurentAtInfinity.from_poly(F5, a.coeffs, 10)
        # r * (a/r) = a up to the tail truncation error
        assert err.abs_lt(pdeg(r.coeffs) - 10 + 1)


def test_norms():
    x = LaurentAtInfinity.from_tail(F5, {2: 1, -3: 4}, 5)
    assert not x.abs_norm().zero and x.abs_norm().exp == 2
    assert x.frac_norm().exp == -3
    assert x.abs_lt(3) and not x.abs_lt(2)
    assert x.frac_norm_lt(-2) and not x.frac_norm_lt(-3)
    assert LaurentAtInfinity.zero(F5, 3).abs_norm().zero


def test_torus_truncation():
    x = LaurentAtInfinity.from_tail(F5, {1: 2, 0: 3, -1: 4, -2: 1}, 4)
    t = x.truncate_to_torus()
    assert t.coeff(1) == 0 and t.coeff(0) == 0 and t.coeff(-1) == 4 and t.coeff(-2) == 1
    assert x.poly_part().coeffs == (3, 2)


@given(tails())
def test_json_roundtrip(x):
    y = LaurentAtInfinity.from_json(F5, x.to_json())
    assert y == x


def test_rational_arc_point_beta():
    theta = LaurentAtInfinity.from_tail(F5, {-4: 2}, 6)
    pt = RationalArcPoint(PolyT(F5, (3,)), PolyT(F5, (0, 1)), theta)
    b = pt.beta(6)
    # 3/T + 2 T^-4: coefficient -1 is 3, coefficient -4 is 2
    assert b.coeff(-1) == 3 and b.coeff(-4) == 2


@given(tails(prec=8, top=-1), st.integers(min_value=0, max_value=3))
def test_best_approx_quality(x, M):
    pt = best_approx(x, M)
    r, a = pt.r.coeffs, pt.a.coeffs
    assert r and pdeg(r) <= M
    err = x.mul_poly(r) - LaurentAtInfinity.from_poly(F5, a, x.prec)
    # Dirichlet quality: |r x - a| < q^(-M) at exponent -M-1 or deeper
    assert err.abs_lt(-M)
