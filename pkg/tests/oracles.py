"""Brute-force reference implementations.

Everything here favours literal definitions over speed and stays
independent of the library's counting strategies: nested loops, no
value tables, no orbit decompositions, no reduction theory.  Expected
values frozen into the tests were produced by these oracles.
"""

from __future__ import annotations

import itertools

from ffcircle.cyclo import CycloValue
from ffcircle.fields import Fq
from ffcircle.forms import Form
from ffcircle.laurent import LaurentAtInfinity
from ffcircle.polyring import (
    padd,
    pcontent,
    pdeg,
    pmod,
    pmul,
    pneg,
    poly_by_code,
    ppow,
    pscale,
    ptrim,
)


def polys_up_to(ctx: Fq, deg: int):
    """Every polynomial of degree <= deg, as a trimmed coefficient tuple."""
    if deg < 0:
        return [()]
    return [ptrim(t) for t in itertools.product(ctx.elements(), repeat=deg + 1)]


# ---------------------------------------------------------------------------
# counting


def brute_solutions(form: Form, max_deg: int) -> list[tuple]:
    """All tuples g with every deg g_i <= max_deg and f(g) = 0."""
    ctx = form.ctx
    out = []
    for gs in itertools.product(polys_up_to(ctx, max_deg), repeat=form.n):
        if form.eval_poly(list(gs)).is_zero:
            out.append(gs)
    return out


def brute_coprime_count(form: Form, max_deg: int, exact_deg: int | None = None) -> int:
    ctx = form.ctx
    total = 0
    for gs in brute_solutions(form, max_deg):
        if not any(gs):
            continue
        if exact_deg is not None and max(pdeg(g) for g in gs if g) != exact_deg:
            continue
        if pdeg(pcontent(ctx, list(gs))) == 0:
            total += 1
    return total


# ---------------------------------------------------------------------------
# exponential sums


def brute_S_beta(form: Form, g, beta: LaurentAtInfinity, rho: int, e: int) -> CycloValue:
    """Literal h-box sum of psi(beta * grad f(g) . h)."""
    ctx = form.ctx
    p, q = ctx.p, ctx.q
    R = e - rho
    grads = [G.coeffs for G in form.grad_eval(list(g))]
    total = CycloValue.zero(p, q)
    for hs in itertools.product(polys_up_to(ctx, R - 1), repeat=form.n):
        dot = ()
        for G, h in zip(grads, hs):
            dot = padd(ctx, dot, pmul(ctx, G, h))
        phase = beta.mul_poly(dot).coeff(-1)
        total = total + CycloValue.zeta_pow(p, q, ctx.trace(phase))
    return total


def brute_torus_sum(form: Form, g, rho: int, e: int, prec: int) -> CycloValue:
    """Sum of brute_S_beta over every tail truncated at T^-prec.

    The torus integral is this divided by q^prec, exact once prec
    reaches the largest phase depth (d-1)e + (e-rho)."""
    ctx = form.ctx
    total = CycloValue.zero(ctx.p, ctx.q)
    for tail in itertools.product(ctx.elements(), repeat=prec):
        beta = LaurentAtInfinity.from_tail(ctx, {-(i + 1): c for i, c in enumerate(tail)}, prec)
        total = total + brute_S_beta(form, g, beta, rho, e)
    return total


def brute_box_phase_sum(form: Form, alpha: LaurentAtInfinity, e: int) -> CycloValue:
    """Literal sum of psi(alpha f(g)) over the full box |g| < q^(e+1)."""
    ctx = form.ctx
    total = CycloValue.zero(ctx.p, ctx.q)
    for gs in itertools.product(polys_up_to(ctx, e), repeat=form.n):
        phase = alpha.mul_poly(form.eval_poly(list(gs)).coeffs).coeff(-1)
        total = total + CycloValue.zeta_pow(ctx.p, ctx.q, ctx.trace(phase))
    return total


# ---------------------------------------------------------------------------
# polynomial matrices and lattices


def perm_det(ctx: Fq, pmat) -> tuple:
    """Determinant by the permutation expansion."""
    N = len(pmat)
    total = ()
    for perm in itertools.permutations(range(N)):
        inversions = sum(1 for i in range(N) for j in range(i + 1, N) if perm[i] > perm[j])
        term = (1,)
        for i in range(N):
            term = pmul(ctx, term, ptrim(tuple(pmat[i][perm[i]])))
        if inversions % 2:
            term = pneg(ctx, term)
        total = padd(ctx, total, term)
    return total


def poly_rank(ctx: Fq, rows) -> int:
    """Rank over F_q(T) via nonvanishing minors (rows of poly tuples)."""
    rows = [list(r) for r in rows]
    if not rows:
        return 0
    cols = range(len(rows[0]))
    for k in range(min(len(rows), len(rows[0])), 0, -1):
        for rsel in itertools.combinations(range(len(rows)), k):
            for csel in itertools.combinations(cols, k):
                sub = [[rows[i][j] for j in csel] for i in rsel]
                if any(perm_det(ctx, sub)):
                    return k
    return 0


def _lattice_vectors(basis, deg_cap: int):
    """(norm exponent, u, vector) for every nonzero combination with
    coefficient degrees <= deg_cap."""
    ctx = basis.ctx
    N = basis.N
    cols = [[basis.pmat[i][j] for i in range(N)] for j in range(N)]
    out = []
    for us in itertools.product(polys_up_to(ctx, deg_cap), repeat=N):
        if not any(us):
            continue
        vec = [() for _ in range(N)]
        for u, col in zip(us, cols):
            for i in range(N):
                vec[i] = padd(ctx, vec[i], pmul(ctx, u, col[i]))
        norm = max((pdeg(v) for v in vec if v), default=None)
        if norm is None:
            continue  # cannot happen for a nonsingular basis
        out.append((norm + basis.shift, us, vec))
    return out


def brute_norm_counts(basis, ms, deg_cap: int) -> list[int]:
    """Lattice points of norm < q^m for each m, zero included, from one
    enumeration pass.

    Only valid when deg_cap covers every solution; callers check
    stability against deg_cap + 1."""
    norms = [norm for norm, _, _ in _lattice_vectors(basis, deg_cap)]
    return [1 + sum(1 for norm in norms if norm < m) for m in ms]


def brute_minima(basis, deg_cap: int) -> list[int]:
    """Successive minima by greedy search over bounded combinations."""
    ctx = basis.ctx
    vecs = sorted(_lattice_vectors(basis, deg_cap), key=lambda t: t[0])
    chosen: list = []
    mins = []
    for norm, us, _ in vecs:
        if poly_rank(ctx, chosen + [list(us)]) > len(chosen):
            chosen.append(list(us))
            mins.append(norm)
            if len(chosen) == basis.N:
                break
    return mins


# ---------------------------------------------------------------------------
# local densities and heights


def brute_residue_count(form: Form, P, k: int) -> tuple[int, int]:
    """(solutions, imprimitive solutions) of f = 0 mod P^k by literal
    enumeration of all residue tuples."""
    ctx = form.ctx
    Pk = ppow(ctx, ptrim(tuple(P)), k)
    residues = polys_up_to(ctx, pdeg(Pk) - 1)
    full = sub = 0
    for gs in itertools.product(residues, repeat=form.n):
        if pmod(ctx, form.eval_poly(list(gs)).coeffs, Pk):
            continue
        full += 1
        if all(not pmod(ctx, g, ptrim(tuple(P))) for g in gs):
            sub += 1
    return full, sub


def brute_N_X(form: Form, B: int) -> int:
    """Height count by literal enumeration of coprime solutions."""
    ctx = form.ctx
    n, d = form.n, form.d
    if B < 0:
        return 0
    E = B // (n - d)
    total = 0
    for gs in brute_solutions(form, E):
        if not any(gs):
            continue
        if pdeg(pcontent(ctx, list(gs))) == 0:
            total += 1
    assert total % (ctx.q - 1) == 0
    return total // (ctx.q - 1)
