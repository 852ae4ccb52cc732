"""Counts of bounded-degree polynomial solutions and their sheaf invariants.

A degree-e curve on {f = 0} is a coprime tuple g in F_q[T]^n with
max deg g_i = e and f(g) = 0 identically.  This module tallies solution
boxes jointly by top degree and content degree, evaluates the weighted
count sum_g |gcd g|^(d-1) and its degree-lowering cancellation identity,
and computes cohomological invariants of a single curve: the dimension
h0_twist of twisted syzygies of the gradient, the splitting type of the
gradient kernel bundle, and the splitting type of the pulled-back
tangent sheaf (via a two-chart presentation with an explicit H^1
correction term).  Freeness thresholds are read off the splitting types.
"""

from __future__ import annotations

import numpy as np

from . import linalg, parallel
from .enumeration import DEFAULT_BUDGET, SolutionTable, solutions_up_to
from .fields import Fq
from .forms import Form
from .polyring import pcontent, pdeg, poly_by_code, ptrim


# ---------------------------------------------------------------------------
# content degrees over a solution table


def _gcd_deg_k1(a: list, b: list, p: int) -> list:
    """Euclid on trimmed coefficient lists over Z/p.  Destroys its inputs."""
    while b:
        if len(a) < len(b):
            a, b = b, a
            continue
        inv = pow(b[-1], p - 2, p)
        top = len(b) - 1
        for shift in range(len(a) - len(b), -1, -1):
            c = a[shift + top]
            if c:
                m = (c * inv) % p
                for i in range(top):
                    a[shift + i] = (a[shift + i] - m * b[i]) % p
                a[shift + top] = 0
        while a and a[-1] == 0:
            a.pop()
        a, b = b, a
    return a


def _content_chunk(state, chunk):
    ctx, rows, n, w = state
    start, stop = chunk
    out = np.empty(stop - start, dtype=np.int8)
    code = np.empty(stop - start, dtype=np.int64)
    q = ctx.q
    if ctx.k == 1:
        p = ctx.p
        for r in range(start, stop):
            row = rows[r].tolist()
            g = None
            for i in range(n):
                a = row[i * w : (i + 1) * w]
                while a and a[-1] == 0:
                    a.pop()
                if not a:
                    continue
                g = a if g is None else _gcd_deg_k1(g, a, p)
                if len(g) == 1:
                    break
            if g is None:
                out[r - start] = -1
                code[r - start] = 0
            else:
                out[r - start] = len(g) - 1
                inv = pow(g[-1], p - 2, p)
                acc = 0
                for c in reversed(g):
                    acc = acc * q + (c * inv) % p
                code[r - start] = acc
    else:
        for r in range(start, stop):
            row = rows[r]
            coords = [ptrim(row[i * w : (i + 1) * w]) for i in range(n)]
            c = pcontent(ctx, coords)
            out[r - start] = pdeg(c) if c else -1
            acc = 0
            for cf in reversed(c):
                acc = acc * q + cf
            code[r - start] = acc
    return out, code


class BoxCensus:
    """Per-row (top degree, content degree) classification of a solution box.

    Rows of the underlying table are kept so that downstream consumers
    (orbit decomposition, height counts) can slice by the same masks.
    The zero tuple is excluded from `rows`; `has_zero` records it.
    """

    def __init__(self, form: Form, max_deg: int, rows: np.ndarray, top_deg: np.ndarray, content_deg: np.ndarray, content_code: np.ndarray, has_zero: bool):
        self.form = form
        self.max_deg = max_deg
        self.rows = rows
        self.top_deg = top_deg
        self.content_deg = content_deg
        self.content_code = content_code
        self.has_zero = has_zero
        pairs = np.stack([top_deg.astype(np.int64), content_deg.astype(np.int64)], axis=1)
        if len(pairs):
            uniq, cnt = np.unique(pairs, axis=0, return_counts=True)
            self.counts = {(int(u), int(c)): int(k) for (u, c), k in zip(uniq, cnt)}
        else:
            self.counts = {}

    @classmethod
    def build(cls, form: Form, max_deg: int, budget: int = DEFAULT_BUDGET, jobs: int = 1, table: SolutionTable | None = None) -> "BoxCensus":
        if table is None:
            table = solutions_up_to(form, max_deg, budget)
        elif table.max_deg != max_deg or table.form != form:
            raise ValueError("table does not match the requested box")
        top = table.max_degree_per_row()
        nz = top >= 0
        rows = table.rows[nz]
        top = top[nz].astype(np.int8)
        w = table.width
        chunks = parallel.chunk_ranges(len(rows), jobs * 8 if jobs > 1 else 1)
        parts = parallel.map_chunks(_content_chunk, (form.ctx, rows, form.n, w), chunks, jobs)
        if parts:
            cdeg = np.concatenate([a for a, _ in parts])
            ccode = np.concatenate([b for _, b in parts])
        else:
            cdeg = np.zeros(0, np.int8)
            ccode = np.zeros(0, np.int64)
        return cls(form, max_deg, rows, top, cdeg, ccode, has_zero=bool((~nz).any()))

    def count_exact(self, u: int) -> int:
        """Solutions with max coordinate degree exactly u (content arbitrary)."""
        return sum(k for (t, c), k in self.counts.items() if t == u)

    def count_coprime(self, u: int) -> int:
        return self.counts.get((u, 0), 0)

    def coprime_rows(self, u: int) -> np.ndarray:
        return self.rows[(self.top_deg == u) & (self.content_deg == 0)]

    def total_in_box(self, m: int) -> int:
        """All solutions with every degree <= m, zero tuple included."""
        if m > self.max_deg:
            raise ValueError("box larger than the censused table")
        return int((self.top_deg <= m).sum()) + (1 if self.has_zero else 0)

    def content_groups(self, max_u: int) -> list[tuple[int, tuple[int, ...], int]]:
        """(top degree, monic content, multiplicity) for rows with top <= max_u.

        Groups the nonzero solutions in the sub-box so that per-solution
        quantities depending only on |g| and the content polynomial can be
        summed with one evaluation per group.
        """
        mask = self.top_deg <= max_u
        if not mask.any():
            return []
        pairs = np.stack([self.top_deg[mask].astype(np.int64), self.content_code[mask]], axis=1)
        uniq, cnt = np.unique(pairs, axis=0, return_counts=True)
        w = self.max_deg + 1
        ctx = self.form.ctx
        return [(int(u), poly_by_code(ctx, int(cc), w), int(k)) for (u, cc), k in zip(uniq, cnt)]


def count_N(form: Form, e: int, budget: int = DEFAULT_BUDGET, jobs: int = 1, census: BoxCensus | None = None) -> int:
    """Number of coprime solution tuples with max degree exactly e."""
    if census is None:
        census = BoxCensus.build(form, e, budget, jobs)
    return census.count_coprime(e)


def tilde_N(form: Form, u: int, budget: int = DEFAULT_BUDGET, jobs: int = 1, census: BoxCensus | None = None) -> int:
    """sum over solutions with max degree exactly u of |content|^(d-1).

    Computed from per-row content degrees; no coprimality stratification
    is assumed, so the cancellation identity below is a genuine check.
    """
    if u < 0:
        return 0
    if census is None or census.max_deg < u:
        census = BoxCensus.build(form, u, budget, jobs)
    q, d = form.ctx.q, form.d
    return sum(k * q ** ((d - 1) * c) for (t, c), k in census.counts.items() if t == u)


def cancellation_check(form: Form, e: int, budget: int = DEFAULT_BUDGET, jobs: int = 1) -> dict:
    """Verify tilde_N(e) - q^d * tilde_N(e-1) = #{coprime, max deg e}."""
    census = BoxCensus.build(form, e, budget, jobs)
    q, d = form.ctx.q, form.d
    lhs = tilde_N(form, e, census=census) - q**d * tilde_N(form, e - 1, census=census)
    rhs = census.count_coprime(e)
    return {"lhs": lhs, "rhs": rhs, "ok": lhs == rhs, "tilde_e": tilde_N(form, e, census=census), "tilde_e1": tilde_N(form, e - 1, census=census)}


# ---------------------------------------------------------------------------
# twisted syzygy dimensions


def _poly_coeff_matrix(ctx: Fq, polys: list, h_deg: int, out_len: int) -> np.ndarray:
    """Matrix of (h_1..h_n) -> sum h_i P_i on coefficient vectors.

    Columns are ordered coordinate-major, ascending shift; rows are the
    coefficients of the product polynomial up to degree out_len - 1.
    """
    cols = []
    for P in polys:
        for u in range(h_deg + 1):
            v = [0] * out_len
            for j, c in enumerate(P):
                if c:
                    if u + j >= out_len:
                        raise ValueError("output window too small")
                    v[u + j] = c
            cols.append(v)
    return np.array(cols, dtype=np.int64).T


def _as_coeff_tuples(form: Form, g) -> list[tuple[int, ...]]:
    out = []
    for x in g:
        out.append(ptrim(x.coeffs if hasattr(x, "coeffs") else x))
    return out


def h0_twist(form: Form, g, e: int, rho: int) -> int:
    """dim over F_q of {h : deg h_i <= e - 1 - rho, sum h_i (df/dx_i)(g) = 0}."""
    hd = e - 1 - rho
    if hd < 0:
        return 0
    G = [P.coeffs for P in form.grad_eval(_as_coeff_tuples(form, g))]
    top = max((pdeg(P) for P in G if P), default=-1)
    out_len = (int(top) if top >= 0 else 0) + hd + 1
    M = _poly_coeff_matrix(form.ctx, G, hd, out_len)
    return linalg.kernel_dim(form.ctx, M)


def _jacobian_dual(form: Form, g, e: int) -> np.ndarray:
    """Jacobian of (coeffs of g) -> (coeffs of f(g)) via dual numbers.

    Each column perturbs one coefficient slot by eps with eps^2 = 0 and
    reads off the eps-part of f(g + eps T^v e_i).  Deliberately does not
    reuse the gradient polynomials, so it cross-checks their assembly.
    """
    from .polyring import padd, pmul

    ctx = form.ctx
    gs = _as_coeff_tuples(form, g)
    de = form.d * e

    def dual_mul(a, b):
        (a0, a1), (b0, b1) = a, b
        return (pmul(ctx, a0, b0), padd(ctx, pmul(ctx, a0, b1), pmul(ctx, a1, b0)))

    cols = []
    for i in range(form.n):
        for v in range(e + 1):
            duals = [(gs[j], ()) for j in range(form.n)]
            bump = [0] * (v + 1)
            bump[v] = 1
            duals[i] = (gs[i], ptrim(bump))
            acc = ((), ())
            for exps, c in form.monomials.items():
                term = ((c % ctx.q,) if c % ctx.q else (), ())
                for j, ex in enumerate(exps):
                    for _ in range(ex):
                        term = dual_mul(term, duals[j])
                acc = (padd(ctx, acc[0], term[0]), padd(ctx, acc[1], term[1]))
            eps = list(acc[1]) + [0] * (de + 1 - len(acc[1]))
            cols.append(eps[: de + 1])
    return np.array(cols, dtype=np.int64).T


def tangent_dim_check(form: Form, g, e: int) -> dict:
    """First-order deformations of g inside {f = 0} vs the syzygy count.

    The kernel of the coefficient Jacobian of g -> f(g) must match the
    space of h with deg h_i <= e and h . grad f(g) = 0.
    """
    J = _jacobian_dual(form, g, e)
    jdim = linalg.kernel_dim(form.ctx, J)
    hdim = h0_twist(form, g, e, -1)
    return {"jacobian_kernel": jdim, "h0": hdim, "ok": jdim == hdim}


# ---------------------------------------------------------------------------
# splitting types


def _splitting_from_h0(phi, count: int, total: int, hi: int, lo_guard: int, what: str) -> tuple[int, ...]:
    """Recover a multiset {a_i} with phi(v) = sum_i max(0, a_i - v).

    Scans v downward from hi; m(v) = phi(v-1) - phi(v) counts parts >= v,
    so each increase of m contributes parts equal to that v.  Stops once
    all `count` parts are seen; validates the total.
    """
    if count == 0:
        if total != 0:
            raise ValueError(f"{what}: empty splitting cannot have nonzero degree")
        return ()
    if phi(hi) != 0:
        raise ValueError(f"{what}: scan window misses a large summand")
    parts: list[int] = []
    prev_phi = 0
    prev_m = 0
    v = hi
    while v >= lo_guard:
        cur = phi(v - 1)
        m = cur - prev_phi
        if m < prev_m or m > count:
            raise ValueError(f"{what}: section counts are not of split form")
        parts.extend([v] * (m - prev_m))
        if m == count:
            if sum(parts) != total:
                raise ValueError(f"{what}: degrees sum to {sum(parts)}, expected {total}")
            return tuple(sorted(parts, reverse=True))
        prev_phi, prev_m = cur, m
        v -= 1
    raise ValueError(f"{what}: scan hit the lower guard; invariants inconsistent")


def splitting_type_hat(form: Form, g, e: int) -> tuple[int, ...]:
    """Splitting degrees of the rank n-1 kernel of h -> h . grad f(g).

    Returns the n-1 twist degrees (descending); they sum to e(n-d).
    Requires a coprime solution tuple with nondegenerate gradient.
    """
    n, d = form.n, form.d
    phi = lambda rho: h0_twist(form, g, e, rho)
    # summands are at most e (the kernel sits inside O(e)^n up to twist)
    hi = max(e, e * (n - d)) + 1
    lo_guard = -(d - 1) * e - 2
    return _splitting_from_h0(phi, n - 1, e * (n - d), hi, lo_guard, "gradient kernel splitting")


def _h1_correction(form: Form, g, e: int, m: int, G: list) -> int:
    """dim of the part of H^1(O(m)) killed in H^1 of the tangent presentation.

    Unknowns are a Laurent representative a = sum_{m < i < 0} a_i T^i and a
    polynomial syzygy s with deg s_j <= e - 1.  The pair contributes iff
    a*g - s is supported in degrees <= e + m coordinatewise (then the tail
    lies in the chart at infinity and a*g is a coboundary).  Returns the
    dimension of the space of admissible a.
    """
    ctx, n = form.ctx, form.n
    na = -m - 1
    if na <= 0:
        return 0
    gs = _as_coeff_tuples(form, g)
    ns = n * e
    nvar = na + ns
    rows = []
    # coefficient of T^w in (a*g - s)_i must vanish for e+m < w <= e-1
    for i in range(n):
        gi = gs[i]
        for w in range(e + m + 1, e):
            row = [0] * nvar
            for j in range(na):
                adeg = m + 1 + j
                t = w - adeg
                if 0 <= t < len(gi):
                    row[j] = gi[t]
            if 0 <= w < e:
                row[na + i * e + w] = ctx.neg(1)
            rows.append(row)
    # s must be a syzygy: every coefficient of s . grad f(g) vanishes
    for w in range(form.d * e):
        row = [0] * nvar
        for i in range(n):
            Gi = G[i]
            for u in range(e):
                t = w - u
                if 0 <= t < len(Gi):
                    row[na + i * e + u] = Gi[t]
        rows.append(row)
    A = np.array(rows, dtype=np.int64) if rows else np.zeros((0, nvar), dtype=np.int64)
    dim_full = nvar - linalg.rank(ctx, A)
    dim_a0 = ns - linalg.rank(ctx, A[:, na:])
    return dim_full - dim_a0


def h0_tangent_twist(form: Form, g, e: int, m: int) -> int:
    """h^0 of the pulled-back tangent sheaf of {f = 0}, twisted by m.

    Two-chart computation: sections are degree <= e+m syzygies of the
    gradient modulo multiples of g, plus the part of H^1(O(m)) that dies
    in the presenting sheaf (nonzero only for m <= -2).
    """
    ctx = form.ctx
    gs = _as_coeff_tuples(form, g)
    if not form.eval_poly(gs).is_zero:
        raise ValueError("g does not solve f = 0")
    if pcontent(ctx, gs) != (1,):
        raise ValueError("g must be coprime")
    G = [P.coeffs for P in form.grad_eval(gs)]
    hd = e + m
    part1 = 0
    if hd >= 0:
        top = max((pdeg(P) for P in G if P), default=-1)
        out_len = (int(top) if top >= 0 else 0) + hd + 1
        M = _poly_coeff_matrix(ctx, G, hd, out_len)
        part1 = linalg.kernel_dim(ctx, M) - (m + 1 if m >= 0 else 0)
    return part1 + _h1_correction(form, g, e, m, G)


def splitting_type_T(form: Form, g, e: int) -> tuple[int, ...]:
    """Splitting degrees of the pulled-back tangent sheaf (n-2 parts).

    Descending tuple summing to e(n-d).  Needs n >= 3; the curve must be
    coprime and lie on {f = 0}.
    """
    n, d = form.n, form.d
    if n < 3:
        raise ValueError("tangent splitting needs at least 3 variables")
    phi = lambda rho: h0_tangent_twist(form, g, e, -1 - rho)
    # the tangent pullback is a quotient of the gradient kernel by O, so
    # its summands lie between the kernel minimum e(2-d) and the value
    # forced by the total degree; covers of lines realize the top at 2e
    hi = e * ((n - d) + max(0, (n - 3) * (d - 2))) + 1
    lo_guard = e * (2 - d) - 2
    return _splitting_from_h0(phi, n - 2, e * (n - d), hi, lo_guard, "tangent splitting")


# ---------------------------------------------------------------------------
# freeness


def rho_max(form: Form, g, e: int, tsplit: tuple[int, ...] | None = None) -> int:
    """Largest rho for which the curve is rho-free (min tangent degree)."""
    if tsplit is None:
        tsplit = splitting_type_T(form, g, e)
    return min(tsplit)


def is_rho_free(form: Form, g, e: int, rho: int, tsplit: tuple[int, ...] | None = None) -> bool:
    """True iff H^1 of the tangent pullback twisted by -1-rho vanishes."""
    return rho <= rho_max(form, g, e, tsplit)


def is_strongly_rho_free(form: Form, g, e: int, rho: int, hat: tuple[int, ...] | None = None) -> bool:
    """Stronger condition read off the gradient kernel splitting."""
    if hat is None:
        hat = splitting_type_hat(form, g, e)
    return rho <= min(hat)
