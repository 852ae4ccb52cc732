"""Parameter-level bound reports: frozen values and hypothesis sweeps."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ffcircle.bounds import TheoremReport, gamma_j, report_to_dict, theorem_report


def test_frozen_report_d3_n25_e10():
    r = theorem_report(5, 3, 25, 10, 0, eps=Fraction(1, 50))
    assert r.n_range_ok
    assert r.expected_dim == 240
    assert r.main_bound_rhs == 237
    assert r.starr_codim == 3
    assert r.delta0 == 465
    assert r.gamma0 == 3
    assert r.gamma0_floorless == Fraction(5, 2)
    assert (r.D, r.M, r.N) == (5, 15, 15)
    assert r.eps_cutoff == Fraction(3, 44)
    assert r.eps_ok and r.final_e_ok and r.final_hyp_ok
    assert r.minor_arcs_exist == (True, True, True)
    assert r.e5_ok == (True, True, True)
    assert r.B == 220


def test_pinned_gamma0_counterexample():
    # final-e holds (threshold 6) yet the floored exponent is negative;
    # the floorless variant is negative too, since e is far below the
    # (d-1)^2 2^(d-1) rho regime
    r = theorem_report(5, 3, 25, 6, 1)
    assert r.final_e_ok and r.final_e_threshold == 6
    assert r.gamma0 == -3
    assert r.gamma0_floorless == -1
    assert not r.final_hyp_ok


def test_delta_j_progression():
    r = theorem_report(5, 3, 25, 10, 1)
    step = r.n - 2 * r.d + 1
    deltas = [r.delta0 - j * step for j in range(3)]
    assert deltas == [441, 421, 401]


def test_gamma_j_matches_report():
    for rho in (-1, 0, 1, 2):
        r = theorem_report(5, 3, 25, 8, rho)
        assert r.gamma_j == tuple(gamma_j(3, 25, 8, rho, j) for j in range(3))
        assert r.gamma0 == r.gamma_j[0]


def test_requires_d_at_least_3():
    with pytest.raises(ValueError):
        theorem_report(5, 2, 10, 3, 0)


def test_report_to_dict_encoding():
    r = theorem_report(5, 3, 25, 10, 0)
    d = report_to_dict(r)
    assert set(d) == set(TheoremReport.__dataclass_fields__)
    assert d["starr_codim"] == "3"
    assert d["eps_cutoff"] == "3/44"
    assert d["gamma_j"] == ["3", "3", "3"]
    assert d["delta0"] == 465 and isinstance(d["delta0"], int)


@st.composite
def n_in_range(draw, d):
    lo = 3 * (d - 1) * 2 ** (d - 1) + 1
    return draw(st.integers(min_value=lo, max_value=lo + 12))


@settings(max_examples=300)
@given(st.integers(3, 4), st.data(), st.integers(1, 60), st.integers(-1, 0))
def test_gamma0_positive_at_low_rho_under_final_e(d, data, e, rho):
    n = data.draw(n_in_range(d))
    r = theorem_report(5, d, n, e, rho)
    if r.final_e_ok:
        assert r.gamma0 > 0


@settings(max_examples=300)
@given(st.integers(3, 4), st.data(), st.integers(1, 300), st.integers(-1, 3))
def test_floorless_gamma0_positive_under_final_hyp(d, data, e, rho):
    n = data.draw(n_in_range(d))
    r = theorem_report(5, d, n, e, rho)
    if r.final_hyp_ok:
        assert r.gamma0_floorless > 0


@settings(max_examples=300)
@given(st.integers(3, 4), st.data(), st.integers(1, 80), st.integers(-1, 4))
def test_floor_error_is_bounded(d, data, e, rho):
    n = data.draw(n_in_range(d))
    r = theorem_report(5, d, n, e, rho)
    lead = Fraction(n, 2 ** (d - 2)) - 6 * (d - 1)
    assert abs(r.gamma0 - r.gamma0_floorless) <= lead + (d - 1)


@settings(max_examples=200)
@given(st.integers(3, 4), st.data(), st.integers(1, 40), st.integers(-1, 2))
def test_main_bound_consistency(d, data, e, rho):
    # the non-free dimension bound is the moduli dimension minus the
    # j = 0 saving plus the clamp correction, so it never exceeds the
    # moduli dimension when gamma0 is a genuine saving
    n = data.draw(n_in_range(d))
    r = theorem_report(5, d, n, e, rho)
    assert r.main_bound_rhs == r.expected_dim - r.gamma0
    if r.gamma0 > 0:
        assert r.main_bound_rhs < r.expected_dim
