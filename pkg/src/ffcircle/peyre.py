"""Height counting on the hypersurface, weighted by freedom.

Points of X over F_q(T) are coprime polynomial tuples up to scalars;
the anticanonical height of a degree-e point is q^(e(n-d)).  Each
nonconstant point determines a map from the projective line whose
restricted tangent bundle splits, and the freedom of the point is

    ell(x) = (n-1) rho_max / (e(n-d)),

clamped to [0,1], where rho_max is the largest twist that leaves the
splitting globally generated.  The counting functions N_X and its
freedom-thresholded variant are exact finite sums over the solution
boxes; local densities at the finite and infinite places come from
residue counts with Hensel-certified stabilization.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .census import CurveCensus
from .curves import BoxCensus
from .enumeration import BudgetExceeded, DEFAULT_BUDGET
from .fields import Fq, batch_add
from .forms import Form
from .polyring import (
    factorise_monic,
    monic_polys,
    pcontent,
    pdeg,
    pmod,
    pmul,
    poly_by_code,
    ppow,
    pscale,
    ptrim,
)


@dataclass(frozen=True)
class HeightPoint:
    curve: tuple[tuple[int, ...], ...]
    e: int
    height_exp: int  # H = q^height_exp
    ell: Fraction
    rho_max: int | None  # None for constants
    clamped: bool
    constant: bool


def _ell_value(n: int, d: int, e: int, rm: int) -> tuple[Fraction, bool]:
    raw = Fraction((n - 1) * rm, e * (n - d))
    if raw < 0:
        return Fraction(0), True
    if raw > 1:
        return Fraction(1), True
    return raw, False


def height_and_ell(form: Form, g, constant_ell_one: bool = True) -> HeightPoint:
    """Height exponent and clamped freedom of a point given by a
    coprime solution tuple.

    Constants carry no parameterized curve; their ell is 1 by the
    convention switch (0 when disabled), flagged as constant either way.
    """
    from .curves import rho_max as curve_rho_max

    ctx = form.ctx
    coords = [ptrim(tuple(c)) for c in g]
    if len(coords) != form.n or not any(coords):
        raise ValueError("need a nonzero n-tuple")
    if not form.eval_poly(coords).is_zero:
        raise ValueError("tuple does not lie on the hypersurface")
    if pdeg(pcontent(ctx, coords)) != 0:
        raise ValueError("tuple is not coprime")
    e = max(pdeg(c) for c in coords if c)
    if e == 0:
        ell = Fraction(1) if constant_ell_one else Fraction(0)
        return HeightPoint(tuple(coords), 0, 0, ell, None, False, True)
    rm = curve_rho_max(form, coords, e)
    ell, clamped = _ell_value(form.n, form.d, e, rm)
    return HeightPoint(tuple(coords), e, e * (form.n - form.d), ell, rm, clamped, False)


# ---------------------------------------------------------------------------
# counting functions


def _box_for(form: Form, E: int, budget: int, jobs: int, box: BoxCensus | None) -> BoxCensus:
    if box is None:
        return BoxCensus.build(form, E, budget=budget, jobs=jobs)
    if box.max_deg < E:
        raise ValueError("box smaller than the height cutoff")
    return box


def N_X(form: Form, B: int, budget: int = DEFAULT_BUDGET, jobs: int = 1, box: BoxCensus | None = None) -> int:
    """Number of points of anticanonical height at most q^B.

    Computed by direct content filtering of the solution box and
    cross-checked against the sieve that detects coprimality through
    the squarefree-divisor counts (whose degree sums are 1, -q, 0, ...).
    """
    if form.n <= form.d:
        raise ValueError("need n > d")
    if B < 0:
        return 0
    q = form.ctx.q
    E = B // (form.n - form.d)
    box = _box_for(form, E, budget, jobs, box)
    direct = sum(box.count_coprime(e) for e in range(E + 1))
    nonzero_total = box.total_in_box(E) - 1
    smaller = box.total_in_box(E - 1) - 1 if E >= 1 else 0
    sieved = nonzero_total - q * smaller
    if direct != sieved:
        raise AssertionError(f"coprimality sieve mismatch: {direct} != {sieved}")
    if direct % (q - 1):
        raise AssertionError("scalar orbits do not divide the point count")
    return direct // (q - 1)


def _censuses_up_to(form: Form, E: int, budget: int, jobs: int, censuses: dict[int, CurveCensus] | None) -> dict[int, CurveCensus]:
    out = dict(censuses or {})
    for e in range(1, E + 1):
        if e not in out:
            out[e] = CurveCensus.build(form, e, budget=budget, jobs=jobs)
    return out


def rho_of_eps(B: int, eps, n: int) -> int:
    """Freeness level floor(eps B/(n-1)) + 2 separating eps-small
    freedom from non-free curves."""
    return int(Fraction(eps) * B // (n - 1)) + 2


def N_X_eps_free(
    form: Form,
    B: int,
    eps,
    budget: int = DEFAULT_BUDGET,
    jobs: int = 1,
    box: BoxCensus | None = None,
    censuses: dict[int, CurveCensus] | None = None,
    constant_ell_one: bool = True,
) -> int:
    """Points of height at most q^B whose freedom is at least eps.

    The threshold is capped at 1, so eps > 1 selects exactly the fully
    free points.  ell is constant on reparameterization orbits, so the
    count runs over census orbits; the complementary deficient count is
    accumulated independently and the partition against N_X (computed
    from the box with no orbit data) is asserted.
    """
    if form.n < 3:
        raise ValueError("freedom needs n >= 3")
    if B < 0:
        return 0
    q = form.ctx.q
    n, d = form.n, form.d
    eps_eff = min(Fraction(eps), Fraction(1))
    if eps_eff < 0:
        raise ValueError("eps must be >= 0")
    E = B // (n - d)
    box = _box_for(form, E, budget, jobs, box)
    censuses = _censuses_up_to(form, E, budget, jobs, censuses)
    const_points = box.count_coprime(0) // (q - 1)
    const_ell = Fraction(1) if constant_ell_one else Fraction(0)
    free = const_points if const_ell >= eps_eff else 0
    deficient = 0 if const_ell >= eps_eff else const_points
    orbit_total = const_points
    for e in range(1, E + 1):
        for o in censuses[e].orbits:
            ell, _ = _ell_value(n, d, e, o.rho_max)
            orbit_total += o.n_maps
            if ell >= eps_eff:
                free += o.n_maps
            else:
                deficient += o.n_maps
    total = N_X(form, B, budget=budget, jobs=jobs, box=box)
    if orbit_total != total:
        raise AssertionError("orbit decomposition does not cover the point count")
    if free + deficient != total:
        raise AssertionError("freedom partition lost points")
    return free


def E_eps(
    form: Form,
    B: int,
    eps,
    budget: int = DEFAULT_BUDGET,
    jobs: int = 1,
    box: BoxCensus | None = None,
    censuses: dict[int, CurveCensus] | None = None,
    constant_ell_one: bool = True,
) -> int:
    """Points of height at most q^B with freedom below eps."""
    nf = N_X_eps_free(form, B, eps, budget, jobs, box, censuses, constant_ell_one)
    return N_X(form, B, budget=budget, jobs=jobs, box=box) - nf


def not_rho_free_maps(
    form: Form,
    B: int,
    rho: int,
    budget: int = DEFAULT_BUDGET,
    jobs: int = 1,
    censuses: dict[int, CurveCensus] | None = None,
) -> int:
    """Maps of degree 1..B/(n-d) that are not rho-free, counted up to
    scalars; the comparison target for the freedom-deficient points."""
    E = B // (form.n - form.d)
    censuses = _censuses_up_to(form, E, budget, jobs, censuses)
    total = 0
    for e in range(1, E + 1):
        for o in censuses[e].orbits:
            if o.rho_max < rho:
                total += o.n_maps
    return total


# ---------------------------------------------------------------------------
# local densities


def zeta_rational(q: int, s: int) -> Fraction:
    """(1 - q^(1-s))^(-1), the zeta value of the rational function field."""
    if s < 2:
        raise ValueError("pole at s = 1")
    return Fraction(q ** (s - 1), q ** (s - 1) - 1)


def monic_irreducibles(ctx: Fq, deg: int) -> list[tuple[int, ...]]:
    if deg == 1:
        return [tuple(P) for P in monic_polys(ctx, 1)]
    out = []
    for P in monic_polys(ctx, deg):
        P = tuple(P)
        if factorise_monic(ctx, P) == {P: 1}:
            out.append(P)
    return out


@dataclass(frozen=True)
class PlaceDensity:
    place: tuple[int, ...] | str  # monic irreducible, or "infty"
    value: Fraction  # residue density at the certified depth
    limit: Fraction  # exact limit after the cone correction
    depth: int


@dataclass(frozen=True)
class DensityEstimate:
    sigma_p: tuple[PlaceDensity, ...]
    sigma_infty: PlaceDensity
    truncated_product: Fraction  # product of limits over the listed places
    zeta_value: Fraction
    leading_prediction: Fraction  # truncated_product / ((q-1) zeta)
    calibration_B: int | None
    empirical: Fraction | None  # N_X(B)/q^B at the calibration height
    calibration: Fraction | None  # empirical / leading_prediction


def _code_of(q: int, poly, width: int) -> int:
    acc = 0
    for i in range(width - 1, -1, -1):
        acc = acc * q + (poly[i] if i < len(poly) else 0)
    return acc


def _residue_counts(form: Form, P, k: int, budget: int) -> tuple[int, int]:
    """(all, imprimitive) counts of solutions of f = 0 in (F_q[T]/P^k)^n.

    Imprimitive means every coordinate divisible by P.  Diagonal forms
    convolve per-coordinate value histograms over the additive group of
    the residue ring; otherwise the full tuple box is enumerated under
    the budget.
    """
    ctx = form.ctx
    q, n = ctx.q, form.n
    w = k * pdeg(P)
    G = q**w
    Pk = ppow(ctx, P, k)
    polys = [poly_by_code(ctx, c, w) for c in range(G)]
    divisible = np.array([0 if pmod(ctx, pl, P) else 1 for pl in polys], dtype=bool)
    if form.is_diagonal:
        if G * G * n > budget:
            raise BudgetExceeded("residue ring too large for the histogram route")
        digits = np.empty((G, w), dtype=np.int64)
        codes = np.arange(G, dtype=np.int64)
        for i in range(w):
            digits[:, i] = codes % q
            codes = codes // q
        qpow = q ** np.arange(w, dtype=np.int64)
        ssum = batch_add(ctx, digits[:, None, :], digits[None, :, :])
        add_table = (ssum * qpow).sum(axis=2)
        coeffs = form.diagonal_coeffs()
        full_dp = None
        sub_dp = None
        for a in coeffs:
            vals = np.empty(G, dtype=np.int64)
            for c, pl in enumerate(polys):
                v = pmod(ctx, pscale(ctx, a, ppow(ctx, pl, form.d)), Pk)
                vals[c] = _code_of(q, v, w)
            hist = np.bincount(vals, minlength=G).astype(np.int64)
            hist_sub = np.bincount(vals[divisible], minlength=G).astype(np.int64)
            if full_dp is None:
                full_dp, sub_dp = hist, hist_sub
                continue
            new_full = np.zeros(G, dtype=np.int64)
            new_sub = np.zeros(G, dtype=np.int64)
            for v in range(G):
                row = add_table[v]
                if full_dp[v]:
                    np.add.at(new_full, row, full_dp[v] * hist)
                if sub_dp[v]:
                    np.add.at(new_sub, row, sub_dp[v] * hist_sub)
            full_dp, sub_dp = new_full, new_sub
        return int(full_dp[0]), int(sub_dp[0])
    if G**n > budget:
        raise BudgetExceeded("residue box too large for direct enumeration")
    full = sub = 0
    for code in range(G**n):
        tup = []
        c = code
        for _ in range(n):
            tup.append(polys[c % G])
            c //= G
        if not pmod(ctx, form.eval_poly(tup).coeffs, Pk):
            full += 1
            if all(not pmod(ctx, t, P) for t in tup):
                sub += 1
    return full, sub


def _place_density(form: Form, P, depth: int, budget: int, label) -> PlaceDensity:
    """Residue densities at one place with Hensel-certified depth.

    Primitive counts must satisfy prim(k+1) = |P|^(n-1) prim(k) from the
    certified depth on; the raw density converges only in the limit
    because the central point of the affine cone lifts with excess, and
    the exact limit closes the geometric series:
    sigma = prim density/(1 - |P|^(d-n)).
    """
    ctx = form.ctx
    q, n, d = ctx.q, form.n, form.d
    if n <= d:
        raise ValueError("cone correction needs n > d")
    np_abs = q ** pdeg(P)  # |P|
    counts = [_residue_counts(form, P, k, budget) for k in range(1, depth + 2)]
    prim = [full - sub for full, sub in counts]
    k_stab = None
    for k in range(1, depth + 1):
        if all(prim[j] == np_abs ** (n - 1) * prim[j - 1] for j in range(k, depth + 1)):
            k_stab = k
            break
    if k_stab is None:
        raise ValueError(f"density at {label} not stabilized by depth {depth}")
    value = Fraction(counts[k_stab - 1][0], np_abs ** (k_stab * (n - 1)))
    prim_density = Fraction(prim[k_stab - 1], np_abs ** (k_stab * (n - 1)))
    limit = prim_density / (1 - Fraction(1, np_abs ** (n - d)))
    return PlaceDensity(label, value, limit, k_stab)


def sigma_P(form: Form, P, depth: int = 2, budget: int = DEFAULT_BUDGET) -> PlaceDensity:
    """Density at one place; pass the string "infty" for the place at
    infinity, whose residue rings match those of the degree-one place T
    because the form has constant coefficients."""
    if P == "infty":
        return _place_density(form, (0, 1), depth, budget, "infty")
    return _place_density(form, ptrim(P), depth, budget, tuple(ptrim(P)))


def c_X_estimate(
    form: Form,
    prime_degree_cap: int,
    hensel_depth: int = 2,
    infty_depth: int = 2,
    budget: int = DEFAULT_BUDGET,
    jobs: int = 1,
    calibration_B: int | None = None,
    box: BoxCensus | None = None,
) -> DensityEstimate:
    """Truncated product of local densities with the zeta and scalar
    factors of the leading constant.

    The absolute normalization of the constant is not pinned down here;
    when a calibration height is supplied the ratio of the observed
    N_X(B)/q^B to the predicted leading term is reported so the reader
    can judge the truncation, rather than asserting a normalization.
    """
    ctx = form.ctx
    q, n, d = ctx.q, form.n, form.d
    if n - d < 2:
        raise ValueError("zeta factor needs n - d >= 2")
    places = []
    for deg in range(1, prime_degree_cap + 1):
        for P in monic_irreducibles(ctx, deg):
            places.append(_place_density(form, P, hensel_depth, budget, P))
    # the infinite place: residues modulo powers of 1/T form the same
    # kind of ring, so the T-adic counter applies verbatim in 1/T
    infty = _place_density(form, (0, 1), infty_depth, budget, "infty")
    product = infty.limit
    for pl in places:
        product *= pl.limit
    zeta = zeta_rational(q, n - d)
    leading = product / ((q - 1) * zeta)
    cal_B = empirical = calibration = None
    if calibration_B is not None:
        cal_B = calibration_B
        empirical = Fraction(N_X(form, cal_B, budget=budget, jobs=jobs, box=box), q**cal_B)
        calibration = empirical / leading
    return DensityEstimate(tuple(places), infty, product, zeta, leading, cal_B, empirical, calibration)
