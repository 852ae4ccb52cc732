"""Orbit census of degree-e curves under source reparameterization.

Coprime solution tuples of top degree exactly e are grouped into orbits
of PGL_2(F_q) acting by substitution on degree-e binary forms, after
normalizing the scalar action.  Orbit representatives are the
lexicographically least members, so the census is deterministic; per
orbit we record the orbit size and both splitting types.  Orbits of
non-birational curves (covers) can carry a nontrivial stabilizer, in
which case moduli masses are genuine fractions; all aggregate counts are
therefore exact rationals with integrality recorded as a check, not
assumed.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import curves, parallel
from .curves import BoxCensus
from .enumeration import DEFAULT_BUDGET
from .fields import Fq
from .forms import Form
from .polyring import pmul, ppow, ptrim

TOOL_VERSION = "0.1.0"


# ---------------------------------------------------------------------------
# the reparameterization action


def pgl2_reps(ctx: Fq) -> list[tuple[int, int, int, int]]:
    """One matrix (a,b,c,d) per class, first nonzero entry normalized to 1."""
    q = ctx.q
    out = []
    for a in range(q):
        for b in range(q):
            for c in range(q):
                for d in range(q):
                    det = ctx.sub(ctx.mul(a, d), ctx.mul(b, c))
                    if det == 0:
                        continue
                    lead = next(x for x in (a, b, c, d) if x)
                    if lead != 1:
                        continue
                    out.append((a, b, c, d))
    if len(out) != q**3 - q:
        raise AssertionError("wrong PGL_2 class count")
    return out


def substitution_matrices(ctx: Fq, e: int, reps) -> np.ndarray:
    """Stack of (e+1)x(e+1) matrices acting on degree-e binary forms.

    Column u holds the coefficients of (aT+b)^u (cT+d)^(e-u), so the
    matrix sends the coefficient vector of g to that of the substituted
    form.
    """
    mats = np.zeros((len(reps), e + 1, e + 1), dtype=np.int64)
    for idx, (a, b, c, d) in enumerate(reps):
        for u in range(e + 1):
            col = pmul(ctx, ppow(ctx, (b, a), u), ppow(ctx, (d, c), e - u))
            for j, cf in enumerate(col):
                mats[idx, j, u] = cf
    return mats


def _normalize_scalars(ctx: Fq, flat: np.ndarray) -> np.ndarray:
    """Scale each nonzero row so its first nonzero code is 1."""
    nz = flat != 0
    first = nz.argmax(axis=1)
    lead = flat[np.arange(len(flat)), first]
    inv = ctx.inv_t[lead]
    return ctx.mul_t[inv[:, None], flat]


@dataclass(frozen=True)
class CurveOrbit:
    rep: tuple[tuple[int, ...], ...]  # n coefficient tuples, lex-least member
    n_maps: int  # tuples-up-to-scalar in the orbit; (q^3-q)/stabilizer order
    hat: tuple[int, ...]
    tsplit: tuple[int, ...] | None  # None when n < 3

    @property
    def rho_max(self) -> int | None:
        return min(self.tsplit) if self.tsplit else None


def _invariants_chunk(state, chunk):
    form, e, reps = state
    lo, hi = chunk
    out = []
    for rep in reps[lo:hi]:
        g = list(rep)
        hat = curves.splitting_type_hat(form, g, e)
        ts = curves.splitting_type_T(form, g, e) if form.n >= 3 else None
        out.append((hat, ts))
    return out


class CurveCensus:
    """All degree-e curves on {f = 0}, decomposed into reparameterization
    orbits with their splitting data."""

    def __init__(self, form: Form, e: int, box: BoxCensus, orbits: list[CurveOrbit]):
        self.form = form
        self.e = e
        self.box = box
        self.orbits = orbits
        self._h0_cache: dict = {}

    @classmethod
    def build(cls, form: Form, e: int, budget: int = DEFAULT_BUDGET, jobs: int = 1, box: BoxCensus | None = None) -> "CurveCensus":
        if e < 1:
            raise ValueError("census needs e >= 1")
        report = form.check_smooth()
        if report.smooth is not True:
            raise ValueError(f"census requires a certified-smooth form ({report.method})")
        ctx = form.ctx
        if box is None:
            box = BoxCensus.build(form, e, budget, jobs)
        rows = box.coprime_rows(e)
        n, w = form.n, e + 1
        if len(rows) == 0:
            return cls(form, e, box, [])
        flat = rows.astype(np.int64)
        normalized = _normalize_scalars(ctx, flat)
        uniq = np.unique(normalized, axis=0).astype(np.int16)
        if len(uniq) * (ctx.q - 1) != len(rows):
            raise AssertionError("scalar classes do not partition the tuples")
        reps = pgl2_reps(ctx)
        sym = substitution_matrices(ctx, e, reps)
        pairs = cls._walk_orbits(ctx, uniq, sym, n, w)
        chunks = parallel.chunk_ranges(len(pairs), jobs * 4 if jobs > 1 else 1)
        rep_tuples = [rep for rep, _ in pairs]
        results = parallel.map_chunks(_invariants_chunk, (form, e, rep_tuples), chunks, jobs)
        orbits = []
        i = 0
        for chunk_res in results:
            for hat, ts in chunk_res:
                rep, n_maps = pairs[i]
                orbits.append(CurveOrbit(rep, n_maps, hat, ts))
                i += 1
        return cls(form, e, box, orbits)

    @staticmethod
    def _walk_orbits(ctx: Fq, uniq: np.ndarray, sym: np.ndarray, n: int, w: int):
        """Greedy orbit decomposition in lex order of normalized tuples."""
        p, k = ctx.p, ctx.k
        seen: set[bytes] = set()
        pairs: list[tuple[tuple, int]] = []
        P = len(sym)
        for idx in range(len(uniq)):
            row = uniq[idx]
            key = row.tobytes()
            if key in seen:
                continue
            gmat = row.reshape(n, w).astype(np.int64)
            if k == 1:
                imgs = np.einsum("puv,nv->pnu", sym, gmat) % p
            else:
                imgs = np.zeros((P, n, w), dtype=np.int64)
                for pi in range(P):
                    for i in range(n):
                        for uo in range(w):
                            acc = 0
                            for v in range(w):
                                acc = ctx.add(acc, ctx.mul(int(sym[pi, uo, v]), int(gmat[i, v])))
                            imgs[pi, i, uo] = acc
            flat_imgs = imgs.reshape(P, n * w)
            norm = _normalize_scalars(ctx, flat_imgs)
            orbit = np.unique(norm, axis=0).astype(np.int16)
            if orbit[0].tobytes() != key:
                raise AssertionError("orbit representative is not lex-least")
            for r in orbit:
                seen.add(r.tobytes())
            rep = tuple(ptrim(tuple(int(c) for c in row[i * w : (i + 1) * w])) for i in range(n))
            pairs.append((rep, len(orbit)))
        return pairs

    # -- aggregates ---------------------------------------------------------

    @property
    def q(self) -> int:
        return self.form.ctx.q

    def N(self) -> int:
        return self.box.count_coprime(self.e)

    def N_hat(self) -> int:
        return self.box.total_in_box(self.e)

    def h0(self, orbit: CurveOrbit, rho: int) -> int:
        key = (orbit.rep, rho)
        if key not in self._h0_cache:
            self._h0_cache[key] = curves.h0_twist(self.form, list(orbit.rep), self.e, rho)
        return self._h0_cache[key]

    def N_rho(self, rho: int) -> int:
        """sum over curves of q^(h0 of the twisted gradient syzygies).

        Kernel dimensions are computed per orbit representative; h0 is
        invariant under reparameterization and scaling.
        """
        q = self.q
        return (q - 1) * sum(o.n_maps * q ** self.h0(o, rho) for o in self.orbits)

    def moduli_points(self) -> Fraction:
        q = self.q
        return Fraction(sum(o.n_maps for o in self.orbits), q**3 - q)

    def histogram(self) -> dict[tuple[int, ...], Fraction]:
        """Moduli mass per tangent splitting type (fractional for covers)."""
        q = self.q
        out: dict[tuple[int, ...], Fraction] = {}
        for o in self.orbits:
            key = o.tsplit if o.tsplit is not None else o.hat
            out[key] = out.get(key, Fraction(0)) + Fraction(o.n_maps, q**3 - q)
        return dict(sorted(out.items()))

    def z_rho_exact(self, rho: int) -> Fraction:
        """Moduli mass of the curves that are not rho-free."""
        q = self.q
        total = Fraction(0)
        for o in self.orbits:
            if o.rho_max is None:
                raise ValueError("rho-freeness undefined for n < 3")
            if o.rho_max < rho:
                total += Fraction(o.n_maps, q**3 - q)
        return total

    def z_rho_upper(self, rho: int) -> Fraction:
        q, n, d, e = self.q, self.form.n, self.form.d, self.e
        scale = Fraction(q) ** (rho * (n - 1) - e * (n - d))
        return (self.N_rho(rho) * scale - self.N()) / ((q - 1) ** 2 * (q**3 - q))

    def checks(self, rho_list=()) -> list[tuple[str, bool]]:
        q, n, d, e = self.q, self.form.n, self.form.d, self.e
        group = (q - 1) * (q**3 - q)
        out = []
        out.append(("N-divisible-by-group-order", self.N() % group == 0))
        out.append(("histogram-total-matches-N", sum(self.histogram().values(), Fraction(0)) * (q**3 - q) * (q - 1) == self.N()))
        out.append(("moduli-points-integral", self.moduli_points().denominator == 1))
        out.append(("hat-min-nonpositive", all(min(o.hat) <= 0 for o in self.orbits)))
        out.append(("hat-sum", all(sum(o.hat) == e * (n - d) and len(o.hat) == n - 1 for o in self.orbits)))
        if n >= 3:
            out.append(("tangent-sum", all(o.tsplit is not None and sum(o.tsplit) == e * (n - d) and len(o.tsplit) == n - 2 for o in self.orbits)))
            out.append(("strong-free-implies-free", all(min(o.tsplit) >= min(o.hat) for o in self.orbits)))
            cap = e * (n - d) // (n - 2) if n > 2 else None
            out.append(("never-free-beyond-threshold", all(o.rho_max <= cap for o in self.orbits)))
        for rho in rho_list:
            if e - 1 - rho >= 0:
                out.append((f"h0-lower-bound-rho={rho}", all(self.h0(o, rho) >= e * (n - d) - rho * (n - 1) for o in self.orbits)))
            if n >= 3:
                out.append((f"z-exact-le-upper-rho={rho}", self.z_rho_exact(rho) <= self.z_rho_upper(rho)))
        return out


# ---------------------------------------------------------------------------
# the moduli summary operation


def moduli_and_zrho(form: Form, e: int, rho: int, census: CurveCensus | None = None, budget: int = DEFAULT_BUDGET, jobs: int = 1) -> dict:
    """Moduli point count with the exact and bounded non-free loci.

    Raises if the moduli count fails to be an integer, which for
    birational-only censuses signals an upstream bug.
    """
    if census is None:
        census = CurveCensus.build(form, e, budget, jobs)
    mp = census.moduli_points()
    if mp.denominator != 1:
        raise ArithmeticError(f"non-integral moduli count {mp}")
    exact = census.z_rho_exact(rho)
    upper = census.z_rho_upper(rho)
    if exact > upper:
        raise AssertionError(f"exact non-free mass {exact} exceeds the bound {upper}")
    return {"moduli_points": int(mp), "z_rho_exact": exact, "z_rho_upper": upper}


# ---------------------------------------------------------------------------
# serialization


def _enc(x) -> str:
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    return str(int(x))


def form_hash(form: Form) -> str:
    ctx = form.ctx
    payload = {"p": ctx.p, "k": ctx.k, "modulus": list(ctx.modulus), "form": form.to_json()}
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def census_record(census: CurveCensus, rho_list=(0,)) -> dict:
    """The serializable summary: meta, counts, histogram, z_rho, checks."""
    form, e = census.form, census.e
    ctx = form.ctx
    tilde = {str(u): _enc(curves.tilde_N(form, u, census=census.box)) for u in range(e + 1)}
    rec = {
        "meta": {
            "p": ctx.p,
            "k": ctx.k,
            "q": ctx.q,
            "d": form.d,
            "n": form.n,
            "e": e,
            "form_hash": form_hash(form),
            "tool_version": TOOL_VERSION,
        },
        "counts": {
            "N": _enc(census.N()),
            "N_rho": {str(r): _enc(census.N_rho(r)) for r in rho_list},
            "N_hat": _enc(census.N_hat()),
            "tilde_N": tilde,
            "moduli_points": _enc(census.moduli_points()),
        },
        "histogram": [
            {"type": list(t), "bundle": "T" if form.n >= 3 else "hatT", "count": _enc(c)}
            for t, c in census.histogram().items()
        ],
        "z_rho": {
            str(r): {"exact": _enc(census.z_rho_exact(r)), "upper": _enc(census.z_rho_upper(r))}
            for r in rho_list
            if form.n >= 3
        },
        "checks": [{"name": name, "verdict": bool(v)} for name, v in census.checks(rho_list)],
    }
    return rec


def record_to_json(rec: dict) -> str:
    return json.dumps(rec, sort_keys=True, separators=(",", ":"), ensure_ascii=True) + "\n"


def record_to_csv(rec: dict) -> str:
    """Flat key,value export of the same record."""
    lines = ["key,value"]

    def walk(prefix, obj):
        if isinstance(obj, dict):
            for k in sorted(obj):
                walk(f"{prefix}.{k}" if prefix else str(k), obj[k])
        elif isinstance(obj, list):
            for i, v in enumerate(obj):
                walk(f"{prefix}[{i}]", v)
        else:
            lines.append(f"{prefix},{obj}")

    walk("", rec)
    return "\n".join(lines) + "\n"
