"""Box censuses, the cancellation identity, and per-curve splitting data."""

import pytest

from ffcircle import curves
from ffcircle.curves import BoxCensus
from ffcircle.fields import Fq
from ffcircle.forms import Form

from oracles import brute_coprime_count, brute_solutions

F5 = Fq.get(5)


@pytest.fixture(scope="module")
def small_box():
    form = Form.fermat(F5, 3, 3)
    return BoxCensus.build(form, 1)


def test_box_counts_match_brute(small_box):
    form = small_box.form
    assert small_box.total_in_box(1) == len(brute_solutions(form, 1))
    for u in (0, 1):
        assert small_box.count_coprime(u) == brute_coprime_count(form, 1, exact_deg=u)
    assert small_box.count_exact(0) + small_box.count_exact(1) + 1 == small_box.total_in_box(1)


def test_coprime_rows_have_unit_content(small_box):
    rows = small_box.coprime_rows(1)
    assert len(rows) == small_box.count_coprime(1)
    ctx = small_box.form.ctx
    for row in rows[:50]:
        polys = [tuple(int(c) for c in row[i * 2 : (i + 1) * 2]) for i in range(3)]
        from ffcircle.polyring import pcontent, pdeg, ptrim

        assert pdeg(pcontent(ctx, [ptrim(g) for g in polys])) == 0


def test_box_rejects_oversized_query(small_box):
    with pytest.raises(ValueError):
        small_box.total_in_box(2)


def test_frozen_counts_f5(box5_e1):
    assert box5_e1.count_coprime(1) == 1440
    assert curves.tilde_N(box5_e1.form, 0, census=box5_e1) == 124
    assert curves.tilde_N(box5_e1.form, 1, census=box5_e1) == 16940


def test_frozen_counts_f7(box7_e1):
    assert box7_e1.count_coprime(1) == 54432
    assert box7_e1.total_in_box(1) == 59185
    assert curves.tilde_N(box7_e1.form, 0, census=box7_e1) == 594
    assert curves.tilde_N(box7_e1.form, 1, census=box7_e1) == 258174


def test_cancellation_identity(fermat5):
    res = curves.cancellation_check(fermat5, 1)
    assert res["ok"]
    assert res["tilde_e"] - 5**3 * res["tilde_e1"] == res["rhs"] == 1440


def test_content_groups(box7_e1):
    groups = box7_e1.content_groups(1)
    assert len(groups) == 9
    assert sum(k for _, _, k in groups) == box7_e1.total_in_box(1) - 1
    for u, content, k in groups:
        assert content and content[-1] == 1  # monic
        assert 0 <= u <= 1 and k > 0


# -- per-curve invariants on the standard line ------------------------------

F7 = Fq.get(7)
LINE = [(0, 1), (0, 6), (1,), (6,)]


def test_line_splitting_types(fermat7):
    assert curves.splitting_type_hat(fermat7, LINE, 1) == (1, 1, -1)
    assert curves.splitting_type_T(fermat7, LINE, 1) == (2, -1)


def test_line_h0_values(fermat7):
    assert curves.h0_twist(fermat7, LINE, 1, 0) == 2
    assert curves.h0_twist(fermat7, LINE, 1, -1) == 4


def test_line_freeness(fermat7):
    assert curves.rho_max(fermat7, LINE, 1) == -1
    assert curves.is_rho_free(fermat7, LINE, 1, -1)
    assert not curves.is_rho_free(fermat7, LINE, 1, 0)
    assert curves.is_strongly_rho_free(fermat7, LINE, 1, -1)
    assert not curves.is_strongly_rho_free(fermat7, LINE, 1, 0)


def test_line_tangent_dimension(fermat7):
    res = curves.tangent_dim_check(fermat7, LINE, 1)
    assert res["ok"] and res["h0"] == 4


def test_census_orbit_coherence(census5_e1):
    form, e = census5_e1.form, census5_e1.e
    n, d = form.n, form.d
    cap = e * (n - d) // (n - 2)
    for o in census5_e1.orbits:
        g = list(o.rep)
        assert curves.splitting_type_hat(form, g, e) == o.hat
        assert curves.splitting_type_T(form, g, e) == o.tsplit
        assert o.rho_max == min(o.tsplit) <= cap
        # strong freeness implies freeness at every level
        for rho in range(-1, e):
            if curves.is_strongly_rho_free(form, g, e, rho, hat=o.hat):
                assert curves.is_rho_free(form, g, e, rho, tsplit=o.tsplit)


def test_h0_lower_bound(census5_e1):
    form, e = census5_e1.form, census5_e1.e
    n, d = form.n, form.d
    for o in census5_e1.orbits:
        for rho in range(-1, e):
            h0 = census5_e1.h0(o, rho)
            assert h0 >= e * (n - d) - rho * (n - 1)
