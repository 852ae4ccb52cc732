"""Exponential sums over the torus of tails in F_q((T^-1)).

The torus is the set of Laurent tails sum_{m>=1} b_m T^-m, carrying the
uniform probability measure on coefficient vectors.  Pairing polynomial
phases against the additive character psi (zeta_p to the trace of the
T^-1 coefficient) turns solution counts into torus integrals, and those
integrals localize near rational points a/r with small denominator.

This module evaluates the players exactly: the h-box gradient sum
S(beta) attached to a solution curve and its closed form near
rationals, the near-rational share of the weighted pair count N_rho,
the double sum S(alpha, beta) together with the two differencing
inequalities that bound its deviation, and the multilinear counting
functions N(alpha; r) those inequalities consume.

Every torus integral here is a finite average: the integrand only sees
beta down to an explicit coefficient depth, so averaging over the
q^depth truncations is exact.  Identity checks stay in exact
arithmetic (integers, Fractions, cyclotomic integers); inequality
checks on archimedean magnitudes use certified interval enclosures.
Real-valued integrals are returned as Fractions whose denominators are
powers of q.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import linalg, parallel
from .curves import BoxCensus, h0_twist
from .cyclo import CycloValue, charsums_for
from .enumeration import BudgetExceeded, DEFAULT_BUDGET
from .fields import Fq
from .forms import Form
from .laurent import LaurentAtInfinity, RationalArcPoint, best_approx
from .polyring import (
    PolyT,
    euler_phi,
    monic_divisors,
    pcontent,
    pdeg,
    pmod,
    pmul,
    poly_by_code,
    ppow,
    pscale,
    ptrim,
)


def psi_char(gamma: LaurentAtInfinity) -> CycloValue:
    """zeta_p raised to the trace of the T^-1 coefficient of gamma."""
    ctx = gamma.ctx
    return CycloValue.zeta_pow(ctx.p, ctx.q, ctx.trace(gamma.coeff(-1)))


def _phase_coeff(gamma: LaurentAtInfinity, fc: tuple, shift: int = 0) -> int:
    """Coefficient of T^-1 in gamma * T^shift * f, for a polynomial f
    given by its coefficient tuple.  Needs gamma down to
    T^-(shift + deg f + 1)."""
    ctx = gamma.ctx
    acc = 0
    for t, c in enumerate(fc):
        if c:
            acc = ctx.add(acc, ctx.mul(c, gamma.coeff(-1 - shift - t)))
    return acc


def _as_tuples(g) -> list[tuple]:
    return [x.coeffs if isinstance(x, PolyT) else ptrim(tuple(x)) for x in g]


# ---------------------------------------------------------------------------
# the gradient sum S(beta) of a fixed solution curve


def S_beta(form: Form, g, beta, rho: int, e: int | None = None) -> CycloValue:
    """Sum of psi(beta * h.grad f(g)) over the box |h| < q^(e-rho).

    Writing h = sum_{i,u} c_{i,u} T^u e_i, the phase is F_q-linear in
    the coefficients c, so the box sum is the product over slots (i,u)
    of the one-variable character sums from the literal table; no
    orthogonality shortcut is quoted.  e defaults to deg g.  beta may
    be a Laurent tail or a rational point a/r + theta.
    """
    ctx = form.ctx
    gs = _as_tuples(g)
    if e is None:
        e = max((pdeg(x) for x in gs if x), default=0)
    R = e - rho
    if R <= 0:
        return CycloValue.integer(ctx.p, ctx.q, 1)  # only h = 0 in the box
    grads = form.grad_eval(gs)
    if isinstance(beta, RationalArcPoint):
        top = max((P.degree for P in grads if not P.is_zero), default=0)
        beta = beta.beta(top + R + 1)
    table = charsums_for(ctx)
    acc = CycloValue.integer(ctx.p, ctx.q, 1)
    for G in grads:
        fc = G.coeffs
        for u in range(R):
            val = table[_phase_coeff(beta, fc, shift=u)]
            if val.is_zero:
                return CycloValue.zero(ctx.p, ctx.q)
            acc = acc * val
    return acc


def S_beta_closed(form: Form, g, point: RationalArcPoint, j: int, rho: int, e: int | None = None) -> int:
    """Closed form of S_beta at beta = a/r + theta.

    Valid when |g| <= q^(e-j), |r| <= q^(e-rho) and
    |r theta| < q^(-(d-1)(e-j)): the value is q^(n(e-rho)) when r
    divides gcd(g)^(d-1) and |theta| < q^(rho-e)/|g|^(d-1), and 0
    otherwise.  The first hypothesis keeps |r theta grad f(g)| < 1; for
    larger curves the v-sum need not collapse and the formula is false.
    Hypothesis violations raise ValueError rather than returning a
    wrong value.
    """
    ctx = form.ctx
    gs = _as_tuples(g)
    if not any(gs):
        raise ValueError("the closed form needs a nonzero curve")
    if not form.eval_poly(gs).is_zero:
        raise ValueError("the closed form needs f(g) = 0")
    if e is None:
        e = max(pdeg(x) for x in gs if x)
    d, n = form.d, form.n
    if point.r.degree > e - rho:
        raise ValueError("denominator too large: need |r| <= q^(e-rho)")
    rt = point.theta.mul_poly(point.r)
    if not rt.abs_lt(-(d - 1) * (e - j)):
        raise ValueError("need |r theta| < q^(-(d-1)(e-j))")
    u = max(pdeg(x) for x in gs if x)
    if u > e - j:
        raise ValueError("curve too large for this j: need |g| <= q^(e-j)")
    cont_pow = ppow(ctx, pcontent(ctx, gs), d - 1)
    divides = not pmod(ctx, cont_pow, point.r.coeffs)
    if divides and point.theta.abs_lt(rho - e - (d - 1) * u):
        return ctx.q ** (n * (e - rho))
    return 0


def _null_phase_chunk(state, chunk):
    ctx, A, depth = state
    start, stop = chunk
    codes = np.arange(start, stop, dtype=np.int64)
    q = ctx.q
    D = np.empty((depth, stop - start), dtype=np.int64)
    for m in range(depth):
        D[m] = codes % q
        codes = codes // q
    if ctx.k == 1:
        W = (A @ D) % ctx.p
    else:
        W = linalg.matmul(ctx, A, D)
    return int((~W.any(axis=0)).sum())


def integral_S_beta_T(form: Form, g, rho: int, e: int | None = None, jobs: int = 1) -> int:
    """Exact torus average of S_beta over all tails beta.

    The integrand depends on beta only through the coefficients of
    T^-1 .. T^-depth with depth = deg grad f(g) + (e - rho), so the
    average over the q^depth truncations is the integral.  Averaging
    the factored products directly reduces, once the character-sum
    table is verified entry by entry, to counting truncations whose
    phase-slot vector vanishes; that count is what the grid pass does.
    """
    ctx = form.ctx
    gs = _as_tuples(g)
    if e is None:
        e = max((pdeg(x) for x in gs if x), default=0)
    R = e - rho
    if R <= 0:
        return 1
    grads = [P.coeffs for P in form.grad_eval(gs)]
    rows = []
    top = max((len(fc) - 1 for fc in grads if fc), default=-1)
    depth = top + R  # deepest slot pairs T^(R-1)*G against b_depth
    for fc in grads:
        for u in range(R):
            row = [0] * depth
            for t, c in enumerate(fc):
                if c:
                    row[u + t] = c  # b_m pairs with the T^(m-1) coefficient
            rows.append(row)
    if not any(any(r) for r in rows):
        return ctx.q ** (form.n * R)
    # the factored integrand multiplies literal table entries; verify the
    # table once so the vectorized zero-slot count below computes the
    # same product-average
    table = charsums_for(ctx)
    assert table[0] == CycloValue.integer(ctx.p, ctx.q, ctx.q)
    assert all(v.is_zero for v in table[1:])
    A = np.array(rows, dtype=np.int64)
    total = ctx.q**depth
    pieces = max(1, min(jobs * 4, total // 4096)) if jobs > 1 else max(1, total // 500_000)
    counts = parallel.map_chunks(_null_phase_chunk, (ctx, A, depth), parallel.chunk_ranges(total, pieces), jobs)
    hits = sum(counts)
    val = Fraction(ctx.q ** (form.n * R) * hits, total)
    assert val.denominator == 1, "torus average of the h-box sum must be an integer"
    return int(val)


# ---------------------------------------------------------------------------
# rational-neighbourhood families and membership


@dataclass(frozen=True)
class ArcParams:
    """Degree bookkeeping for the decomposition at level (e, j, rho).

    The reference monomials are P0 = T^(e-j), P = T^(e-j+1) and
    Q = T^(e-rho).  M and N are the Dirichlet covering levels of the
    alpha- and beta-side families, D the divisor-degree cutoff in the
    near-rational count, and l1/l2 the shrunken box exponents paired
    with levels J and K.
    """

    q: int
    d: int
    n: int
    e: int
    j: int
    rho: int

    def __post_init__(self):
        if self.d < 2 or self.j < 0 or self.e < self.rho:
            raise ValueError("need d >= 2, j >= 0 and e >= rho")

    @property
    def P0_deg(self) -> int:
        return self.e - self.j

    @property
    def P_deg(self) -> int:
        return self.e - self.j + 1

    @property
    def Q_deg(self) -> int:
        return self.e - self.rho

    @property
    def M(self) -> int:
        return (self.d * (self.e - self.j) + 1) // 2

    @property
    def N(self) -> int:
        return ((self.e - self.j) * (self.d - 1) + self.e - self.rho + 1) // 2

    @property
    def D(self) -> int:
        return (self.e - self.rho) // (self.d - 1)

    @property
    def minor_arcs_exist(self) -> bool:
        return (self.d - 1) * (self.e - self.j) > self.e - self.rho

    def l1(self, J: int) -> int:
        return 1 + J // (self.d - 1)

    def l2(self, K: int) -> int:
        return 1 + K // (self.d - 1)

    def s1(self, J: int) -> int:
        return self.P_deg - self.l1(J)

    def s2(self, K: int) -> int:
        return self.P_deg - self.l2(K)


def arc_membership(x: LaurentAtInfinity, family: str, params: ArcParams, level: int | None = None) -> dict:
    """Decide x in M(J) / N(K) / N_j, with a witness a/r + theta.

    Each family is a union over monic r with |r| <= q^cap of balls
    |r x - a| < q^W around reduced fractions.  The continued-fraction
    convergent with the largest denominator degree <= cap minimizes
    |r x - a| over all admissible r, so one best_approx call decides
    membership.  Negative caps give the empty family.
    """
    if family == "M":
        if level is None:
            raise ValueError("family M needs a level J")
        cap, W = level, level - params.d * params.P0_deg
    elif family == "N":
        if level is None:
            raise ValueError("family N needs a level K")
        cap, W = level, level - (params.d - 1) * params.P0_deg - params.Q_deg
    elif family == "Nj":
        cap, W = params.Q_deg, -(params.d - 1) * params.P0_deg
        # the graded beta-side family at level K = e - rho has cap e - rho
        # and radius exponent (e-rho) - (d-1)(e-j) - (e-rho): identical
        assert (cap, W) == (params.Q_deg, params.Q_deg - (params.d - 1) * params.P0_deg - params.Q_deg)
    else:
        raise ValueError(f"unknown family {family!r}")
    if cap < 0:
        return {"member": False, "witness": None}
    pt = best_approx(x, cap)
    err = x.mul_poly(pt.r) - LaurentAtInfinity.from_poly(x.ctx, pt.a, x.prec)
    member = err.abs_lt(W)
    return {"member": member, "witness": pt if member else None}


# ---------------------------------------------------------------------------
# the near-rational share of N_rho


def _near_rational_value(ctx: Fq, n: int, d: int, e: int, j: int, rho: int, u: int, content: tuple) -> Fraction:
    """Integral of S_beta over the radius-q^(-(d-1)(e-j)) neighbourhood
    of the small-denominator rationals, for a curve of degree u and the
    given monic content.

    By the closed form, the integrand is q^(n(e-rho)) on the sub-ball
    around each a/r with r | content^(d-1) where both radius conditions
    hold, and 0 elsewhere; distinct contributing fractions have
    disjoint sub-balls, so the integral is a divisor sum of ball
    volumes.
    """
    q = ctx.q
    total = Fraction(0)
    cont_pow = ppow(ctx, content, d - 1)
    for r in monic_divisors(ctx, cont_pow):
        dr = pdeg(r)
        if dr > e - rho:
            continue
        expo = min(-dr - (d - 1) * (e - j), rho - e - (d - 1) * u)
        total += euler_phi(ctx, r) * Fraction(q) ** (n * (e - rho) + expo)
    return total


def major_integral(form: Form, g, j: int, rho: int, e: int | None = None) -> dict:
    """Near-rational integral of S_beta for one curve, with the exact
    discrepancy from its main term.

    The main term is q^((n-1)(e-rho)) |gcd g|^(d-1) / |g|^(d-1).  The
    discrepancy is asserted to vanish unless the curve meets one of the
    two spill conditions (degree condition j+D+1+deg g <= deg gcd + e,
    or deg gcd >= D+1), and the ratio discrepancy/main always lies in
    [-1, 1].
    """
    ctx = form.ctx
    gs = _as_tuples(g)
    if e is None:
        e = max((pdeg(x) for x in gs if x), default=0)
    if e < rho:
        raise ValueError("need e >= rho")
    if j < 0:
        raise ValueError("need j >= 0")
    if not any(gs):
        raise ValueError("need a nonzero curve")
    if not form.eval_poly(gs).is_zero:
        raise ValueError("need f(g) = 0")
    d, n, q = form.d, form.n, ctx.q
    u = max(pdeg(x) for x in gs if x)
    if u > e - j:
        raise ValueError("curve too large for this j: need |g| <= q^(e-j)")
    content = pcontent(ctx, gs)
    c = pdeg(content)
    value = _near_rational_value(ctx, n, d, e, j, rho, u, content)
    main = Fraction(q) ** ((n - 1) * (e - rho) + (d - 1) * (c - u))
    D = (e - rho) // (d - 1)
    one_j = (j + D + 1 + u <= c + e) or (c >= D + 1)
    disc = value - main
    if not one_j:
        assert disc == 0, f"discrepancy {disc} without a spill condition (u={u}, content deg {c}, j={j})"
    eps = disc / main
    assert -1 <= eps <= 1, f"discrepancy ratio {eps} outside [-1, 1]"
    return {"value": value, "main": main, "discrepancy": disc, "one_j": one_j, "epsilon": eps}


def _h0_sum_chunk(state, chunk):
    form, rows, w, e, rho = state
    start, stop = chunk
    q = form.ctx.q
    total = 0
    for idx in range(start, stop):
        row = rows[idx]
        gs = [ptrim(tuple(int(x) for x in row[i * w : (i + 1) * w])) for i in range(form.n)]
        total += q ** h0_twist(form, gs, e, rho)
    return total


def n_rho_direct(form: Form, e: int, rho: int, budget: int = DEFAULT_BUDGET, jobs: int = 1, box: BoxCensus | None = None) -> int:
    """N_rho by direct definition: over coprime solutions of degree
    exactly e, the number of h in the (e-rho)-box with h.grad f(g) = 0,
    computed per curve from the kernel dimension."""
    if box is None:
        box = BoxCensus.build(form, e, budget, jobs)
    rows = box.coprime_rows(e)
    w = box.max_deg + 1
    chunks = parallel.chunk_ranges(len(rows), jobs * 8 if jobs > 1 else 1)
    parts = parallel.map_chunks(_h0_sum_chunk, (form, rows, w, e, rho), chunks, jobs)
    return sum(parts)


def N_rho_split(form: Form, e: int, rho: int, budget: int = DEFAULT_BUDGET, jobs: int = 1, box: BoxCensus | None = None) -> dict:
    """Split N_rho into its near-rational part and the remainder.

    The weighted expansion runs over j in {0, 1, 2} with coefficients
    c_0 = 1, c_1 = -(q+1), c_2 = q, summing near-rational integrals of
    curves in the box |g| < q^(e-j+1).  N_rho itself is computed by the
    independent kernel-dimension route, and minor = N_rho - major is
    exact bookkeeping.  The j-sum of main terms telescopes to
    q^(e(n-d) - rho(n-1)) times the coprime count N; that cancellation
    is asserted (main_cancellation_ok) rather than assumed.
    """
    if e < rho:
        raise ValueError("need e >= rho")
    ctx = form.ctx
    q, d, n = ctx.q, form.d, form.n
    if box is None:
        box = BoxCensus.build(form, e, budget, jobs)
    cj = {0: 1, 1: -(q + 1), 2: q}
    major = Fraction(0)
    main_total = Fraction(0)
    spill_curves = 0
    by_j = {}
    for j in range(0, min(2, e) + 1):
        term = Fraction(0)
        term_main = Fraction(0)
        for u, content, count in box.content_groups(e - j):
            c = pdeg(content)
            val = _near_rational_value(ctx, n, d, e, j, rho, u, content)
            main = Fraction(q) ** ((n - 1) * (e - rho) + (d - 1) * (c - u))
            D = (e - rho) // (d - 1)
            one_j = (j + D + 1 + u <= c + e) or (c >= D + 1)
            if not one_j:
                assert val == main, f"discrepancy without spill at j={j}, u={u}, content deg {c}"
            else:
                spill_curves += count
            term += count * val
            term_main += count * main
        major += cj[j] * term
        main_total += cj[j] * term_main
        by_j[j] = term
    count_n = box.count_coprime(e)
    scale = Fraction(q) ** (rho * (n - 1) - e * (n - d))
    main_ok = main_total * scale == count_n
    n_rho = n_rho_direct(form, e, rho, budget, jobs, box=box)
    return {
        "major": major,
        "minor": n_rho - major,
        "n_rho": n_rho,
        "main_part": main_total,
        "main_cancellation_ok": main_ok,
        "count_N": count_n,
        "spill_curves": spill_curves,
        "by_j": by_j,
    }


# ---------------------------------------------------------------------------
# the double sum S(alpha, beta) and its differencing inequalities


def _h_factor(ctx: Fq, table, beta: LaurentAtInfinity, grads: list[tuple], R: int) -> CycloValue:
    acc = CycloValue.integer(ctx.p, ctx.q, 1)
    for fc in grads:
        for u in range(R):
            val = table[_phase_coeff(beta, fc, shift=u)]
            if val.is_zero:
                return CycloValue.zero(ctx.p, ctx.q)
            acc = acc * val
    return acc


def S_alpha_beta(form: Form, alpha: LaurentAtInfinity, beta: LaurentAtInfinity, params: ArcParams, budget: int = DEFAULT_BUDGET) -> CycloValue:
    """Double box sum of psi(alpha f(g) + beta h.grad f(g)) over
    |g| < q^(e-j+1), |h| < q^(e-rho).

    The h-sum factors through coefficient slots for every fixed g.  For
    diagonal f the g-box splits coordinatewise as well, collapsing the
    sum to n one-variable passes; otherwise the g-box is enumerated,
    subject to the q^(2n(e+1)) double-box cap and the caller's budget.
    """
    ctx = form.ctx
    p, q, n, d = ctx.p, ctx.q, form.n, form.d
    gdeg = params.P_deg  # coefficient slots per g coordinate
    R = max(params.Q_deg, 0)
    table = charsums_for(ctx)
    if form.is_diagonal:
        total = CycloValue.integer(p, q, 1)
        dcode = ctx.from_int(d)
        for ai in form.diagonal_coeffs():
            acc = CycloValue.zero(p, q)
            for code in range(q**gdeg):
                x = poly_by_code(ctx, code, gdeg)
                xd = ppow(ctx, x, d)
                w = _phase_coeff(alpha, pscale(ctx, ai, xd))
                zf = CycloValue.zeta_pow(p, q, ctx.trace(w))
                grad = pscale(ctx, ctx.mul(dcode, ai), ppow(ctx, x, d - 1))
                acc = acc + zf * _h_factor(ctx, table, beta, [grad], R)
            total = total * acc
        return total
    gsize = q ** (n * gdeg)
    if gsize * q ** (n * R) > q ** (2 * n * (params.e + 1)) or gsize > budget:
        raise BudgetExceeded("double box exceeds the enumeration cap")
    total = CycloValue.zero(p, q)
    for code in range(gsize):
        gs = [poly_by_code(ctx, (code // q ** (i * gdeg)) % q**gdeg, gdeg) for i in range(n)]
        w = _phase_coeff(alpha, form.eval_poly(gs).coeffs)
        zf = CycloValue.zeta_pow(p, q, ctx.trace(w))
        grads = [P.coeffs for P in form.grad_eval(gs)]
        total = total + zf * _h_factor(ctx, table, beta, grads, R)
    return total


def N_alpha_r(form: Form, gamma: LaurentAtInfinity, r: int, box_deg: int, s: int = 0, budget: int = DEFAULT_BUDGET) -> int:
    """Count (d-1)-tuples of vectors with |g_v| < q^(box_deg - s) whose
    multilinear phases all satisfy ||gamma Psi_i|| < q^(-r-(d-1)s).

    s = 0 is the plain count; s > 0 the shrunken variant, which divides
    the box and tightens the threshold in lockstep.  For diagonal f the
    forms Psi_i only involve the i-th coordinates, so the count is a
    product of per-coordinate tuple counts.
    """
    if r <= 0:
        raise ValueError("need r > 0")
    if s < 0:
        raise ValueError("need s >= 0")
    ctx = form.ctx
    q, d, n = ctx.q, form.d, form.n
    bdeg = box_deg - s
    if bdeg <= 0:
        return 1  # only the zero tuple, and ||0|| = 0 passes
    thresh = r + (d - 1) * s
    fact = ctx.from_int(math.factorial(d))
    if form.is_diagonal:
        total = 1
        for ai in form.diagonal_coeffs():
            m = ctx.mul(fact, ai)
            cnt = 0
            for codes in range(q ** ((d - 1) * bdeg)):
                prod = (1,)
                cc = codes
                for _ in range(d - 1):
                    prod = pmul(ctx, prod, poly_by_code(ctx, cc % q**bdeg, bdeg))
                    cc //= q**bdeg
                    if not prod:
                        break
                phase = pscale(ctx, m, prod)
                if all(_phase_coeff(gamma, phase, shift=t) == 0 for t in range(thresh)):
                    cnt += 1
            total *= cnt
        return total
    size = q ** ((d - 1) * n * bdeg)
    if size > budget:
        raise BudgetExceeded("multilinear tuple box exceeds the budget")
    cnt = 0
    for code in range(size):
        vecs = []
        cc = code
        for _ in range(d - 1):
            vec = []
            for _ in range(n):
                vec.append(PolyT(ctx, poly_by_code(ctx, cc % q**bdeg, bdeg)))
                cc //= q**bdeg
            vecs.append(vec)
        ok = True
        for i in range(n):
            phase = form.psi(i, vecs).coeffs
            if not all(_phase_coeff(gamma, phase, shift=t) == 0 for t in range(thresh)):
                ok = False
                break
        if ok:
            cnt += 1
    return cnt


def weyl_checks(form: Form, alpha: LaurentAtInfinity, beta: LaurentAtInfinity, params: ArcParams, budget: int = DEFAULT_BUDGET) -> dict:
    """Certify both differencing inequalities for |S(alpha,beta) - c|
    with c = q^(n(e-rho)).

    Raising each side to the power that clears the fractional exponent
    keeps the comparison between an exact cyclotomic real and an exact
    rational; the verdict uses interval-certified magnitudes.  The
    alpha-side inequality uses N(alpha; e-j+1), the beta side
    N(beta; e-rho) (skipped when e-rho <= 0 or d < 3).
    """
    ctx = form.ctx
    q, n, d = ctx.q, form.n, form.d
    S = S_alpha_beta(form, alpha, beta, params, budget)
    c = CycloValue.integer(ctx.p, q, q ** (n * max(params.Q_deg, 0)))
    u = (S - c).mag_sq()  # |S - c|^2, exact and real
    box_exp = n * params.P_deg + n * max(params.Q_deg, 0)
    out = {"S": S, "deviation_mag_sq": u}
    na = N_alpha_r(form, alpha, params.P_deg, params.P_deg, 0, budget)
    b1 = Fraction(2) ** (2 ** (d - 1)) * Fraction(q) ** (box_exp * 2 ** (d - 1) - (d - 1) * n * params.P_deg) * na
    out["N_alpha"] = na
    out["bound1"] = b1
    out["weyl1_ok"] = (u ** (2 ** (d - 2))).abs_le(b1)
    if d >= 3 and params.Q_deg > 0:
        nb = N_alpha_r(form, beta, params.Q_deg, params.P_deg, 0, budget)
        b2 = Fraction(2) ** (2 ** (d - 2)) * Fraction(q) ** (box_exp * 2 ** (d - 2) - (d - 1) * n * params.P_deg) * nb
        out["N_beta"] = nb
        out["bound2"] = b2
        out["weyl2_ok"] = (u ** (2 ** (d - 3))).abs_le(b2)
    else:
        out["N_beta"] = None
        out["bound2"] = None
        out["weyl2_ok"] = None
    return out


def shrink_check(form: Form, gamma: LaurentAtInfinity, r: int, box_deg: int, s: int, budget: int = DEFAULT_BUDGET) -> dict:
    """Verify the shrinking bound N(gamma;r)/N_s(gamma;r) <=
    q^((d-1)ns + n max(0, floor((box_deg - r)/2))) for admissible s,
    i.e. s >= max(0, box_deg - r)."""
    if s < max(0, box_deg - r):
        raise ValueError("need s >= max(0, box_deg - r)")
    d, n, q = form.d, form.n, form.ctx.q
    full = N_alpha_r(form, gamma, r, box_deg, 0, budget)
    small = N_alpha_r(form, gamma, r, box_deg, s, budget)
    bound = q ** ((d - 1) * n * s + n * max(0, (box_deg - r) // 2))
    return {"n_full": full, "n_shrunk": small, "bound": bound, "ok": full <= bound * small}


def structural_check(form: Form, gamma: LaurentAtInfinity, params: ArcParams, family: str, level: int, budget: int = DEFAULT_BUDGET) -> dict:
    """For gamma outside the level-J (resp. K) neighbourhood family,
    every tuple counted by the shrunken multilinear count must have all
    Psi_i identically zero as polynomials.

    family 'M' pairs the alpha-side count at threshold r = e-j+1 with
    box exponent l1(J); family 'N' pairs the beta side at r = e-rho
    with l2(K).  Verifies gamma is outside the family first, then
    examines every counted tuple; returns the tallies.
    """
    ctx = form.ctx
    q, d, n = ctx.q, form.d, form.n
    if family == "M":
        l = params.l1(level)
        r = params.P_deg
        assert level >= (d - 1) * (l - 1)
    elif family == "N":
        l = params.l2(level)
        r = params.Q_deg
        if r <= 0:
            raise ValueError("beta-side count needs e - rho > 0")
        if l > params.P_deg - max(0, params.rho - params.j + 1):
            raise ValueError("shrunken box too wide for the beta-side claim")
    else:
        raise ValueError(f"unknown family {family!r}")
    s = params.P_deg - l
    if l < 1 or s < 0:
        raise ValueError("level pairs with an empty shrunken box")
    if arc_membership(gamma, family, params, level)["member"]:
        raise ValueError("gamma lies inside the neighbourhood family")
    thresh = r + (d - 1) * s
    fact = ctx.from_int(math.factorial(d))
    counted = 0
    violations = 0
    if form.is_diagonal:
        # a global tuple is counted iff each coordinate's factor tuple is,
        # and Psi_i = d! a_i prod_v x_v,i vanishes iff that product does;
        # per-coordinate inspection therefore covers every counted tuple
        for ai in form.diagonal_coeffs():
            m = ctx.mul(fact, ai)
            for codes in range(q ** ((d - 1) * l)):
                prod = (1,)
                cc = codes
                for _ in range(d - 1):
                    prod = pmul(ctx, prod, poly_by_code(ctx, cc % q**l, l))
                    cc //= q**l
                phase = pscale(ctx, m, prod)
                if all(_phase_coeff(gamma, phase, shift=t) == 0 for t in range(thresh)):
                    counted += 1
                    if phase:
                        violations += 1
        return {"counted": counted, "violations": violations, "ok": violations == 0}
    size = q ** ((d - 1) * n * l)
    if size > budget:
        raise BudgetExceeded("structural tuple box exceeds the budget")
    for code in range(size):
        vecs = []
        cc = code
        for _ in range(d - 1):
            vec = []
            for _ in range(n):
                vec.append(PolyT(ctx, poly_by_code(ctx, cc % q**l, l)))
                cc //= q**l
            vecs.append(vec)
        phases = [form.psi(i, vecs).coeffs for i in range(n)]
        if all(all(_phase_coeff(gamma, ph, shift=t) == 0 for t in range(thresh)) for ph in phases):
            counted += 1
            if any(phases):
                violations += 1
    return {"counted": counted, "violations": violations, "ok": violations == 0}


# ---------------------------------------------------------------------------
# the plain box sum S_BV(alpha) and its torus average


def S_BV(form: Form, alpha: LaurentAtInfinity, e: int, budget: int = DEFAULT_BUDGET) -> CycloValue:
    """Sum of psi(alpha f(g)) over the full box |g| < q^(e+1)."""
    ctx = form.ctx
    p, q, n = ctx.p, ctx.q, form.n
    if form.is_diagonal:
        total = CycloValue.integer(p, q, 1)
        for ai in form.diagonal_coeffs():
            counts = [0] * p
            for code in range(q ** (e + 1)):
                x = poly_by_code(ctx, code, e + 1)
                w = _phase_coeff(alpha, pscale(ctx, ai, ppow(ctx, x, form.d)))
                counts[ctx.trace(w)] += 1
            total = total * CycloValue.from_counts(p, q, counts)
        return total
    size = q ** (n * (e + 1))
    if size > budget:
        raise BudgetExceeded("box exceeds the budget")
    counts = [0] * p
    for code in range(size):
        gs = [poly_by_code(ctx, (code // q ** (i * (e + 1))) % q ** (e + 1), e + 1) for i in range(n)]
        w = _phase_coeff(alpha, form.eval_poly(gs).coeffs)
        counts[ctx.trace(w)] += 1
    return CycloValue.from_counts(p, q, counts)


def _bv_grid_chunk(state, chunk):
    ctx, mats, depth = state
    start, stop = chunk
    p, q = ctx.p, ctx.q
    codes = np.arange(start, stop, dtype=np.int64)
    D = np.empty((depth, stop - start), dtype=np.int64)
    for m in range(depth):
        D[m] = codes % q
        codes = codes // q
    per_coord = []
    for P in mats:
        W = (P @ D) % p if ctx.k == 1 else linalg.matmul(ctx, P, D)
        if ctx.k > 1:
            W = ctx.trace_t[W]
        cnt = np.stack([(W == t).sum(axis=0) for t in range(p)])
        per_coord.append(cnt)
    total = CycloValue.zero(p, q)
    cache: dict = {}
    for col in range(stop - start):
        term = CycloValue.integer(p, q, 1)
        for cnt in per_coord:
            key = tuple(int(x) for x in cnt[:, col])
            val = cache.get(key)
            if val is None:
                val = CycloValue.from_counts(p, q, key)
                cache[key] = val
            term = term * val
        total = total + term
    return total


def bv_integral_check(form: Form, e: int, budget: int = DEFAULT_BUDGET, jobs: int = 1, box: BoxCensus | None = None) -> dict:
    """Exact torus average of S_BV against the direct box solution count.

    The phase alpha f(g) only sees alpha down to T^-(de+1), so the
    average over the q^(de+1) truncations is exact.  Per truncation the
    box sum is evaluated through coordinate histograms (diagonal f);
    the total divided by the grid size must equal the number of
    solutions in the box, zero tuple included.
    """
    ctx = form.ctx
    q, n = ctx.q, form.n
    depth = form.d * e + 1
    if not form.is_diagonal:
        raise BudgetExceeded("torus-average grid is only tabulated for diagonal forms")
    mats = []
    for ai in form.diagonal_coeffs():
        M = np.zeros((q ** (e + 1), depth), dtype=np.int64)
        for code in range(q ** (e + 1)):
            phase = pscale(ctx, ai, ppow(ctx, poly_by_code(ctx, code, e + 1), form.d))
            for t, cc in enumerate(phase):
                M[code, t] = cc  # b_m pairs with the T^(m-1) coefficient
        mats.append(M)
    total_cols = q**depth
    pieces = max(1, jobs * 4) if jobs > 1 else 1
    parts = parallel.map_chunks(_bv_grid_chunk, (ctx, mats, depth), parallel.chunk_ranges(total_cols, pieces), jobs)
    total = CycloValue.zero(ctx.p, q)
    for part in parts:
        total = total + part
    if box is None:
        box = BoxCensus.build(form, e, budget, jobs)
    n_hat = box.total_in_box(e)
    ok = total == CycloValue.integer(ctx.p, q, n_hat * total_cols)
    return {"sum_over_grid": total, "grid": total_cols, "n_hat": n_hat, "ok": ok}
