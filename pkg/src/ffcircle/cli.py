"""Command-line driver: counts, censuses, arcs, lattices, heights, bounds.

Every subcommand prints a single JSON (or CSV) record on stdout.  Exit
codes: 0 all embedded checks pass, 2 a mathematical assertion failed,
3 the work budget was exceeded, 64 usage error.  Records carry no
timing or worker-count information, so the bytes are identical for any
--jobs value.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction
from pathlib import Path

from . import bounds as bounds_mod
from . import circle, curves, lattices, peyre
from .census import TOOL_VERSION, CurveCensus, census_record, form_hash, record_to_csv, record_to_json
from .curves import BoxCensus
from .enumeration import DEFAULT_BUDGET, BudgetExceeded
from .fields import Fq
from .forms import Form
from .laurent import LaurentAtInfinity
from .polyring import pdeg, ptrim


class UsageError(Exception):
    pass


def _enc(x):
    if isinstance(x, bool) or x is None:
        return x
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, int):
        return str(x)
    return x


def _req(value, flag):
    if value is None:
        raise UsageError(f"{flag} is required for this subcommand")
    return value


def _ctx(args) -> Fq:
    p = _req(args.p, "--p")
    return Fq.get(p, args.k)


def _form(args, ctx: Fq) -> Form:
    if args.form_file and args.fermat:
        raise UsageError("--fermat and --form-file are mutually exclusive")
    if args.form_file:
        data = json.loads(Path(args.form_file).read_text())
        form = Form.from_json(ctx, data)
        if args.n is not None and args.n != form.n:
            raise UsageError(f"--n {args.n} disagrees with the form file (n={form.n})")
        if args.d is not None and args.d != form.d:
            raise UsageError(f"--d {args.d} disagrees with the form file (d={form.d})")
        return form
    if args.fermat:
        return Form.fermat(ctx, _req(args.n, "--n"), _req(args.d, "--d"))
    raise UsageError("provide --fermat or --form-file")


def _meta(sub: str, ctx: Fq | None = None, form: Form | None = None, **extra) -> dict:
    m: dict = {"tool_version": TOOL_VERSION, "subcommand": sub}
    if ctx is not None:
        m.update(p=ctx.p, k=ctx.k, q=ctx.q)
    if form is not None:
        m.update(d=form.d, n=form.n, form_hash=form_hash(form))
    m.update({k: v for k, v in extra.items() if v is not None})
    return m


# ---------------------------------------------------------------------------
# subcommands


def cmd_count(args):
    ctx = _ctx(args)
    form = _form(args, ctx)
    e = _req(args.e, "--e")
    box = BoxCensus.build(form, e, args.budget, args.jobs)
    counts = {
        "N": _enc(curves.count_N(form, e, census=box)),
        "N_hat": _enc(box.total_in_box(e)),
        "tilde_N": {str(u): _enc(curves.tilde_N(form, u, census=box)) for u in range(e + 1)},
    }
    cc = curves.cancellation_check(form, e, args.budget, args.jobs)
    checks = [{"name": "box-cancellation", "verdict": bool(cc["ok"])}]
    if args.rho is not None:
        split = circle.N_rho_split(form, e, args.rho, args.budget, args.jobs, box=box)
        counts["N_rho"] = {str(args.rho): _enc(split["n_rho"])}
        counts["N_rho_major"] = _enc(split["major"])
        counts["N_rho_minor"] = _enc(split["minor"])
        checks.append({"name": "main-term-cancellation", "verdict": bool(split["main_cancellation_ok"])})
    rec = {"meta": _meta("count", ctx, form, e=e, rho=args.rho), "counts": counts, "checks": checks}
    return rec, all(c["verdict"] for c in rec["checks"])


def _cache_meta_ok(rec: dict, e: int, rho_list) -> bool:
    meta = rec.get("meta", {})
    if meta.get("tool_version") != TOOL_VERSION or meta.get("e") != e:
        return False
    have = set(rec.get("counts", {}).get("N_rho", {}))
    return {str(r) for r in rho_list} <= have


def cmd_census(args):
    ctx = _ctx(args)
    form = _form(args, ctx)
    e = _req(args.e, "--e")
    rho_list = [args.rho] if args.rho is not None else [0]
    cache_path = None
    if args.cache_dir:
        cache_path = Path(args.cache_dir) / f"census-{form_hash(form)}-e{e}.json"
        if cache_path.exists():
            rec = json.loads(cache_path.read_text())
            if _cache_meta_ok(rec, e, rho_list):
                return rec, all(c["verdict"] for c in rec["checks"])
    cen = CurveCensus.build(form, e, args.budget, args.jobs)
    rec = census_record(cen, rho_list)
    if cache_path is not None:
        cache_path.parent.mkdir(parents=True, exist_ok=True)
        cache_path.write_text(record_to_json(rec))
    return rec, all(c["verdict"] for c in rec["checks"])


def cmd_arcs(args):
    ctx = _ctx(args)
    d = _req(args.d, "--d")
    n = _req(args.n, "--n")
    e = _req(args.e, "--e")
    rho = args.rho if args.rho is not None else 0
    js = [args.j] if args.j is not None else list(range(min(2, e) + 1))
    rows = []
    for j in js:
        par = circle.ArcParams(ctx.q, d, n, e, j, rho)
        rows.append(
            {
                "j": j,
                "P0_deg": par.P0_deg,
                "P_deg": par.P_deg,
                "Q_deg": par.Q_deg,
                "M": par.M,
                "N": par.N,
                "D": par.D,
                "minor_arcs_exist": bool(par.minor_arcs_exist),
            }
        )
    rec = {"meta": _meta("arcs", ctx, e=e, rho=rho, d=d, n=n), "arcs": rows, "checks": []}
    return rec, True


def _json_entries(mat):
    """Matrix cells from JSON: ints stay ints, dicts get integer keys."""
    out = []
    for row in mat:
        cells = []
        for cell in row:
            if isinstance(cell, dict):
                cells.append({int(k): int(v) for k, v in cell.items()})
            else:
                cells.append(int(cell))
        out.append(cells)
    return out


def cmd_lattice(args):
    ctx = _ctx(args)
    path = _req(args.matrix_file, "--matrix-file")
    data = json.loads(Path(path).read_text())
    m = int(data.get("m", 0))
    checks = []
    if "gamma" in data:
        gamma = _json_entries(data["gamma"])
        a, c = int(data["a"]), int(data["c"])
        dual = lattices.duality_check(ctx, gamma, a, c)
        body = {
            "mode": "gamma",
            "a": a,
            "c": c,
            "minima": dual["minima"],
            "adjoint_minima": dual["adjoint_minima"],
            "box_count": _enc(lattices.gamma_box_count(ctx, gamma, a, c, args.budget)),
        }
        checks.append({"name": "adjoint-duality", "verdict": bool(dual["ok"])})
        if "s" in data:
            s = int(data["s"])
            shr = lattices.shrinking_check(ctx, gamma, a, c, s, args.budget)
            body["shrunk_count"] = _enc(shr["n_shrunk"])
            body["shrink_bound"] = _enc(shr["bound"])
            checks.append({"name": "shrinking-bound", "verdict": bool(shr["ok"])})
    else:
        basis = lattices.LatticeBasis.from_entries(ctx, _json_entries(data["entries"]), int(data.get("shift", 0)))
        lee = lattices.lee_product_check(basis, m, args.budget)
        body = {
            "mode": "basis",
            "det_degree": len(basis.det) - 1 + basis.N * basis.shift,
            "minima": lattices.successive_minima(basis),
            "count_below_m": _enc(lee["count"]),
            "minima_product": _enc(lee["product"]),
            "m": m,
        }
        checks.append({"name": "minima-product-count", "verdict": bool(lee["ok"])})
    rec = {"meta": _meta("lattice", ctx), "lattice": body, "checks": checks}
    return rec, all(c["verdict"] for c in checks)


def _place_json(place):
    return "infty" if isinstance(place, str) else list(place)


def cmd_peyre(args):
    ctx = _ctx(args)
    form = _form(args, ctx)
    B = _req(args.B, "--B")
    E = B // (form.n - form.d)
    box = BoxCensus.build(form, max(E, 0), args.budget, args.jobs)
    total = peyre.N_X(form, B, args.budget, args.jobs, box=box)
    counts = {"N_X": _enc(total)}
    checks = []
    if args.eps is not None:
        eps = Fraction(args.eps)
        censuses: dict[int, CurveCensus] = {}
        free = peyre.N_X_eps_free(form, B, eps, args.budget, args.jobs, box=box, censuses=censuses)
        rho = peyre.rho_of_eps(B, eps, form.n)
        bad = peyre.not_rho_free_maps(form, B, rho, args.budget, args.jobs, censuses=censuses)
        counts.update(
            N_X_eps_free=_enc(free),
            E_eps=_enc(total - free),
            rho_of_eps=_enc(rho),
            not_rho_free_maps=_enc(bad),
        )
        checks.append({"name": "deficiency-dominated-by-non-free", "verdict": total - free <= bad})
        if eps == 0:
            checks.append({"name": "eps-zero-identity", "verdict": free == total})
    rec = {"meta": _meta("peyre", ctx, form, B=B, eps=_enc(Fraction(args.eps)) if args.eps is not None else None), "counts": counts, "checks": checks}
    if args.prime_cap:
        est = peyre.c_X_estimate(
            form,
            args.prime_cap,
            args.depth,
            args.depth,
            args.budget,
            args.jobs,
            calibration_B=B,
            box=box,
        )
        rec["density"] = {
            "places": [
                {"place": _place_json(pl.place), "value": _enc(pl.value), "limit": _enc(pl.limit), "depth": pl.depth}
                for pl in (*est.sigma_p, est.sigma_infty)
            ],
            "zeta": _enc(est.zeta_value),
            "truncated_product": _enc(est.truncated_product),
            "leading_prediction": _enc(est.leading_prediction),
            "empirical": _enc(est.empirical),
            "calibration": _enc(est.calibration),
        }
    return rec, all(c["verdict"] for c in checks)


def cmd_bounds(args):
    q = args.p**args.k if args.p is not None else 0
    rep = bounds_mod.theorem_report(
        q,
        _req(args.d, "--d"),
        _req(args.n, "--n"),
        _req(args.e, "--e"),
        args.rho if args.rho is not None else 0,
        Fraction(args.eps) if args.eps is not None else Fraction(0),
        args.B,
    )
    rec = {"meta": _meta("bounds"), "report": bounds_mod.report_to_dict(rep), "checks": []}
    return rec, True


# ---------------------------------------------------------------------------
# the verify battery: quick cross-module identity checks


def _row_polys(box: BoxCensus, row):
    w = box.max_deg + 1
    return [ptrim(tuple(int(x) for x in row[i * w : (i + 1) * w])) for i in range(box.form.n)]


def _verify_battery(args):
    bud = args.budget
    rng = random.Random(args.seed)
    checks = []

    def add(name, ok):
        checks.append({"name": name, "verdict": bool(ok)})

    ctx = Fq.get(5)
    f4 = Form.fermat(ctx, 4, 3)
    box = BoxCensus.build(f4, 1, bud, args.jobs)

    cc = curves.cancellation_check(f4, 1, bud, args.jobs)
    add("count-cancellation", cc["ok"])

    rows = box.coprime_rows(1)
    sample = [_row_polys(box, rows[rng.randrange(len(rows))]) for _ in range(4)]
    ortho = all(
        circle.integral_S_beta_T(f4, gs, rho) == ctx.q ** curves.h0_twist(f4, gs, 1, rho)
        for gs in sample
        for rho in (-1, 0)
    )
    add("torus-orthogonality", ortho)

    near_ok = True
    for gs in sample:
        res = circle.major_integral(f4, gs, 0, 0)
        near_ok = near_ok and -1 <= res["epsilon"] <= 1
    add("near-rational-integral", near_ok)

    f3 = Form.fermat(ctx, 3, 3)
    par = circle.ArcParams(ctx.q, 3, 3, 2, 0, 0)
    weyl_ok = True
    for _ in range(2):
        alpha = LaurentAtInfinity.from_tail(ctx, {-t: rng.randrange(5) for t in range(1, 9)}, 8)
        beta = LaurentAtInfinity.from_tail(ctx, {-t: rng.randrange(5) for t in range(1, 9)}, 8)
        wc = circle.weyl_checks(f3, alpha, beta, par, bud)
        weyl_ok = weyl_ok and wc["weyl1_ok"] and (wc["weyl2_ok"] is not False)
    add("weyl-differencing", weyl_ok)

    lat_ok = True
    for nn in (1, 2):
        gamma = [[dict() for _ in range(nn)] for _ in range(nn)]
        for i in range(nn):
            for j in range(i, nn):
                entry = {-t: rng.randrange(5) for t in range(1, 6)}
                gamma[i][j] = entry
                gamma[j][i] = entry
        dual = lattices.duality_check(ctx, gamma, 1, 1)
        shr = lattices.shrinking_check(ctx, gamma, 2, 1, 1, bud)
        lat_ok = lat_ok and dual["ok"] and shr["ok"]
    add("lattice-duality-and-shrinking", lat_ok)

    total = peyre.N_X(f4, 1, bud, args.jobs, box=box)
    censuses: dict[int, CurveCensus] = {}
    free0 = peyre.N_X_eps_free(f4, 1, 0, bud, args.jobs, box=box, censuses=censuses)
    add("height-count-eps-zero", free0 == total)
    eps = Fraction(1, 2)
    free = peyre.N_X_eps_free(f4, 1, eps, bud, args.jobs, box=box, censuses=censuses)
    rho = peyre.rho_of_eps(1, eps, 4)
    add("deficiency-dominated-by-non-free", total - free <= peyre.not_rho_free_maps(f4, 1, rho, bud, args.jobs, censuses=censuses))

    pd = peyre.sigma_P(f4, (0, 1), depth=1, budget=bud)
    add("local-density-stabilized", pd.depth == 1)
    add("zeta-value", peyre.zeta_rational(5, 2) == Fraction(5, 4))

    r = bounds_mod.theorem_report(5, 3, 25, 10, 0)
    add("dimension-bound-value", r.main_bound_rhs == 237 and r.starr_codim == 3 and r.eps_cutoff == Fraction(24, 352))
    add("saving-exponent-counterexample", bounds_mod.theorem_report(5, 3, 25, 6, 1).gamma0 == -3)
    return checks


def cmd_verify(args):
    checks = _verify_battery(args)
    rec = {"meta": _meta("verify", seed=args.seed), "checks": checks}
    return rec, all(c["verdict"] for c in checks)


# ---------------------------------------------------------------------------
# parser and entry point


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(64)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--p", type=int, help="field characteristic")
    common.add_argument("--k", type=int, default=1, help="extension degree, q = p^k")
    common.add_argument("--d", type=int, help="form degree")
    common.add_argument("--n", type=int, help="number of variables")
    common.add_argument("--e", type=int, help="curve degree")
    common.add_argument("--rho", type=int, help="freeness level")
    common.add_argument("--eps", help="freedom threshold, a rational like 1/2")
    common.add_argument("--B", type=int, help="height exponent")
    common.add_argument("--fermat", action="store_true", help="use the Fermat form in n variables of degree d")
    common.add_argument("--form-file", help="JSON file describing the form")
    common.add_argument("--out", choices=("json", "csv"), default="json")
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--cache-dir", help="directory for census caches")
    common.add_argument("--budget", type=int, default=DEFAULT_BUDGET)

    parser = _Parser(prog="ffcircle", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("count", parents=[common], help="counting functions N, N_hat, tilde_N and the near-rational split")
    sp.set_defaults(handler=cmd_count)
    sp = sub.add_parser("census", parents=[common], help="orbit census with histogram, moduli count and non-free loci")
    sp.set_defaults(handler=cmd_census)
    sp = sub.add_parser("arcs", parents=[common], help="arc decomposition degree parameters per differencing level")
    sp.add_argument("--j", type=int, help="single differencing level (default 0..min(2,e))")
    sp.set_defaults(handler=cmd_arcs)
    sp = sub.add_parser("lattice", parents=[common], help="lattice minima, point counts, duality and shrinking checks")
    sp.add_argument("--matrix-file", help="JSON with entries/shift or gamma/a/c[/s]")
    sp.set_defaults(handler=cmd_lattice)
    sp = sub.add_parser("peyre", parents=[common], help="height counts weighted by freedom, with local densities")
    sp.add_argument("--prime-cap", type=int, default=0, help="include local densities over primes of degree <= cap")
    sp.add_argument("--depth", type=int, default=1, help="Hensel certification depth for densities")
    sp.set_defaults(handler=cmd_peyre)
    sp = sub.add_parser("bounds", parents=[common], help="exact evaluation of the dimension and saving bounds")
    sp.set_defaults(handler=cmd_bounds)
    sp = sub.add_parser("verify", parents=[common], help="quick cross-module identity battery")
    sp.set_defaults(handler=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        rec, ok = args.handler(args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 64
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return 3
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 64
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 64
    except (AssertionError, ArithmeticError, ValueError) as exc:
        print(f"mathematical check failed: {exc}", file=sys.stderr)
        return 2
    text = record_to_csv(rec) if args.out == "csv" else record_to_json(rec)
    sys.stdout.write(text)
    return 0 if ok else 2


if __name__ == "__main__":
    sys.exit(main())
