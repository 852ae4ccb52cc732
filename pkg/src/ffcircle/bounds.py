"""Exact evaluation of the dimension and error-term bounds.

Everything here is rational arithmetic on the parameters (q, d, n, e,
rho, eps, B): the dimension bound for the non-free locus, the
smoothness codimension, the minor-arc exponents Delta_0 and Gamma_0,
and the hypothesis flags that gate them.  No enumeration happens; the
point is to make every displayed inequality checkable at concrete
parameters and to expose which hypotheses fail.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


def _floor(x: Fraction) -> int:
    return x.numerator // x.denominator


@dataclass(frozen=True)
class TheoremReport:
    q: int
    d: int
    n: int
    e: int
    rho: int
    eps: Fraction
    B: int
    n_range_ok: bool  # n > 3(d-1)2^(d-1)
    main_bound_rhs: Fraction  # dimension bound for the non-rho-free locus
    expected_dim: int  # (n-d)e + n - 5, the moduli dimension
    starr_codim: Fraction  # smoothness codimension bound
    delta0: int
    gamma0: Fraction
    gamma0_floorless: Fraction  # floors dropped; grows linearly in e once e >= (d-1)^2 2^(d-1) rho
    gamma_j: tuple[Fraction, ...]  # j = 0, 1, 2
    D: int
    M: int
    N: int
    e_condition_ok: bool  # e >= (rho+1)(2 + 1/(d-2))
    final_e_ok: bool
    final_e_threshold: Fraction
    minor_arcs_exist: tuple[bool, ...]  # j = 0, 1, 2
    e5_ok: tuple[bool, ...]  # j = 0, 1, 2
    final_hyp_ok: bool  # e >= (d-1)^2 2^(d-1) rho
    eps_cutoff: Fraction  # (n-1)/((n-d)(d-1)^2 2^(d-1))
    eps_ok: bool


def gamma_j(d: int, n: int, e: int, rho: int, j: int) -> Fraction:
    """Minor-arc saving exponent at differencing level j."""
    lead = Fraction(n, 2 ** (d - 2)) - 6 * (d - 1)
    sub = Fraction(n, 2 ** (d - 2)) - 4 * (d - 1)
    l2 = 1 + (e - rho) // (d - 1)
    cap = max(0, (rho - j + 1) // 2)
    return lead * l2 - sub * cap


def theorem_report(q: int, d: int, n: int, e: int, rho: int, eps=Fraction(0), B: int | None = None) -> TheoremReport:
    if d < 3:
        raise ValueError("the bounds assume d >= 3")
    eps = Fraction(eps)
    if B is None:
        B = e * (n - d)
    half = (rho + 1) // 2
    lead = Fraction(n, 2 ** (d - 2)) - 6 * (d - 1)
    expected = (n - d) * e + n - 5
    main_rhs = expected + 2 * (d - 1) * half - lead * (1 + (e - rho) // (d - 1) - half)
    starr = lead * (1 + (e + 1) // (d - 1))
    delta0 = 2 * e * (n - d) - rho * (n - 1) + n
    g0 = lead * (1 + (e - rho) // (d - 1) - half) - 2 * (d - 1) * half
    g0f = lead * (Fraction(e - rho, d - 1) - Fraction(rho, 2)) - (d - 1) * rho
    gj = tuple(gamma_j(d, n, e, rho, j) for j in range(3))
    e_cond = Fraction(rho + 1) * (2 + Fraction(1, d - 2))
    final_e_threshold = max(Fraction(rho + (d - 1) * half), e_cond)
    minor = tuple((d - 1) * (e - j) > e - rho for j in range(3))
    e5 = tuple(1 + (e - rho) // (d - 1) >= max(0, (rho - j + 1) // 2) for j in range(3))
    cutoff = Fraction(n - 1, (n - d) * (d - 1) ** 2 * 2 ** (d - 1))
    return TheoremReport(
        q=q,
        d=d,
        n=n,
        e=e,
        rho=rho,
        eps=eps,
        B=B,
        n_range_ok=n > 3 * (d - 1) * 2 ** (d - 1),
        main_bound_rhs=main_rhs,
        expected_dim=expected,
        starr_codim=starr,
        delta0=delta0,
        gamma0=g0,
        gamma0_floorless=g0f,
        gamma_j=gj,
        D=(e - rho) // (d - 1),
        M=(d * e + 1) // 2,
        N=(e * (d - 1) + e - rho + 1) // 2,
        e_condition_ok=e >= e_cond,
        final_e_ok=e >= final_e_threshold,
        final_e_threshold=final_e_threshold,
        minor_arcs_exist=minor,
        e5_ok=e5,
        final_hyp_ok=e >= (d - 1) ** 2 * 2 ** (d - 1) * rho,
        eps_cutoff=cutoff,
        eps_ok=eps < cutoff,
    )


def report_to_dict(r: TheoremReport) -> dict:
    """JSON-ready view with fractions rendered as strings."""
    def enc(v):
        if isinstance(v, Fraction):
            return str(v)
        if isinstance(v, tuple):
            return [enc(x) for x in v]
        return v

    return {k: enc(getattr(r, k)) for k in r.__dataclass_fields__}
