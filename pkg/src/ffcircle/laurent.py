"""Laurent tails at the infinite place of F_q(T).

A LaurentAtInfinity holds coefficients for degrees top down to -prec.
Degrees below -prec are unknown, unless exact=True, in which case the
tail is identically zero there.  Every operation tracks how far down the
result is certified; queries that would need unknown coefficients raise
PrecisionError rather than guess.  |sum c_i T^i| is q^(max nonzero i)
and the distance-to-integers norm only looks at degrees <= -1.
"""

from __future__ import annotations

from dataclasses import dataclass

from .cyclo import PrecisionError
from .fields import Fq
from .polyring import PolyT, QPow, ptrim


class LaurentAtInfinity:
    __slots__ = ("ctx", "top", "coeffs", "prec", "exact")

    def __init__(self, ctx: Fq, top: int, coeffs, prec: int, exact: bool = False):
        """coeffs[j] is the coefficient of T^(top - j); the window covers
        degrees top..-prec, so len(coeffs) == top + prec + 1."""
        if prec < 0:
            raise ValueError("prec must be >= 0")
        coeffs = tuple(int(c) for c in coeffs)
        if len(coeffs) != top + prec + 1:
            raise ValueError("coefficient window does not match top/prec")
        while coeffs and coeffs[0] == 0:
            coeffs = coeffs[1:]
            top -= 1
        self.ctx = ctx
        self.top = top
        self.coeffs = coeffs
        self.prec = prec
        self.exact = exact

    # -- constructors -----------------------------------------------------
    @staticmethod
    def zero(ctx: Fq, prec: int = 0) -> "LaurentAtInfinity":
        return LaurentAtInfinity(ctx, -prec - 1, (), prec, exact=True)

    @staticmethod
    def from_poly(ctx: Fq, f: PolyT | tuple, prec: int = 0) -> "LaurentAtInfinity":
        coeffs = f.coeffs if isinstance(f, PolyT) else ptrim(f)
        if not coeffs:
            return LaurentAtInfinity.zero(ctx, prec)
        top = len(coeffs) - 1
        window = tuple(reversed(coeffs)) + (0,) * prec
        return LaurentAtInfinity(ctx, top, window, prec, exact=True)

    @staticmethod
    def from_tail(ctx: Fq, tail: dict[int, int], prec: int, exact: bool = False) -> "LaurentAtInfinity":
        """tail maps degree -> coefficient; degrees must be >= -prec."""
        tail = {m: c % ctx.q if ctx.k == 1 else c for m, c in tail.items() if c}
        if any(m < -prec for m in tail):
            raise ValueError("tail coefficient below stated precision")
        top = max(tail, default=-prec - 1)
        window = tuple(tail.get(m, 0) for m in range(top, -prec - 1, -1))
        return LaurentAtInfinity(ctx, top, window, prec, exact=exact)

    @staticmethod
    def expand_ratio(ctx: Fq, a: PolyT, r: PolyT, prec: int) -> "LaurentAtInfinity":
        """Laurent expansion of a/r down to T^-prec, exact when the long
        division terminates."""
        if r.is_zero:
            raise ZeroDivisionError("expansion of a/0")
        if a.is_zero:
            return LaurentAtInfinity.zero(ctx, prec)
        # coefficients of a/r down to T^-prec are the coefficients of the
        # polynomial quotient (a * T^prec) // r, and the expansion is
        # exact precisely when that division leaves no remainder
        quot, rem = divmod(a.shift(prec), r)
        top = a.degree - r.degree
        width = top + prec + 1
        qc = quot.coeffs + (0,) * (width - len(quot.coeffs))
        window = tuple(reversed(qc[:width])) if width > 0 else ()
        return LaurentAtInfinity(ctx, max(top, -prec - 1), window, prec, exact=rem.is_zero)

    # -- accessors --------------------------------------------------------
    def coeff(self, m: int) -> int:
        """Coefficient of T^m, certified."""
        if m > self.top:
            return 0
        if m >= -self.prec:
            return self.coeffs[self.top - m]
        if self.exact:
            return 0
        raise PrecisionError(f"coefficient of T^{m} below precision {self.prec}")

    def window(self, lo: int, hi: int) -> list[int]:
        """Coefficients for degrees hi down to lo inclusive."""
        return [self.coeff(m) for m in range(hi, lo - 1, -1)]

    def with_prec(self, prec: int) -> "LaurentAtInfinity":
        if prec == self.prec:
            return self
        if prec < self.prec:
            dropped = self.coeffs[max(0, self.top + prec + 1):]
            still_exact = self.exact and not any(dropped)
            if self.top < -prec:
                return LaurentAtInfinity(self.ctx, -prec - 1, (), prec, exact=still_exact)
            return LaurentAtInfinity(self.ctx, self.top, self.coeffs[: self.top + prec + 1], prec, exact=still_exact)
        if not self.exact:
            raise PrecisionError("cannot extend a truncated tail")
        if not self.coeffs:
            return LaurentAtInfinity.zero(self.ctx, prec)
        return LaurentAtInfinity(self.ctx, self.top, self.coeffs + (0,) * (prec - self.prec), prec, exact=True)

    @property
    def is_zero_window(self) -> bool:
        return not self.coeffs

    # -- arithmetic -------------------------------------------------------
    def _aligned(self, other: "LaurentAtInfinity") -> tuple["LaurentAtInfinity", "LaurentAtInfinity", int]:
        if self.exact and other.exact:
            prec = max(self.prec, other.prec)
        elif self.exact:
            prec = other.prec
        elif other.exact:
            prec = self.prec
        else:
            prec = min(self.prec, other.prec)
        return self.with_prec(prec), other.with_prec(prec), prec

    def __add__(self, other: "LaurentAtInfinity") -> "LaurentAtInfinity":
        ctx = self.ctx
        a, b, prec = self._aligned(other)
        top = max(a.top, b.top, -prec - 1)
        window = []
        for m in range(top, -prec - 1, -1):
            window.append(ctx.add(a.coeff(m) if m <= a.top else 0, b.coeff(m) if m <= b.top else 0))
        return LaurentAtInfinity(ctx, top, window, prec, exact=a.exact and b.exact)

    def __neg__(self) -> "LaurentAtInfinity":
        return LaurentAtInfinity(self.ctx, self.top, tuple(self.ctx.neg(c) for c in self.coeffs), self.prec, self.exact)

    def __sub__(self, other: "LaurentAtInfinity") -> "LaurentAtInfinity":
        return self + (-other)

    def scale(self, c: int) -> "LaurentAtInfinity":
        if c == 0:
            return LaurentAtInfinity.zero(self.ctx, self.prec)
        return LaurentAtInfinity(self.ctx, self.top, tuple(self.ctx.mul(c, x) for x in self.coeffs), self.prec, self.exact)

    def mul_poly(self, f: PolyT | tuple) -> "LaurentAtInfinity":
        """Product with a polynomial; certified precision drops by deg f
        unless this tail is exact."""
        ctx = self.ctx
        fc = f.coeffs if isinstance(f, PolyT) else ptrim(f)
        if not fc:
            return LaurentAtInfinity.zero(ctx, self.prec)
        deg_f = len(fc) - 1
        src = self.with_prec(self.prec + deg_f) if self.exact else self
        prec = src.prec - deg_f
        if prec < 0:
            raise PrecisionError("insufficient precision for polynomial product")
        top = src.top + deg_f
        window = [0] * (top + prec + 1)
        for i, c in enumerate(fc):
            if not c:
                continue
            for j, x in enumerate(src.coeffs):
                m = (src.top - j) + i  # output degree of this product term
                if m <= top and m >= -prec and x:
                    window[top - m] = ctx.add(window[top - m], ctx.mul(c, x))
        return LaurentAtInfinity(ctx, top, window, prec, exact=self.exact)

    def truncate_to_torus(self) -> "LaurentAtInfinity":
        """Drop all coefficients in degrees >= 0 (reduce mod F_q[T])."""
        tail = {m: self.coeff(m) for m in range(min(-1, self.top), -self.prec - 1, -1)}
        return LaurentAtInfinity.from_tail(self.ctx, tail, self.prec, exact=self.exact)

    def poly_part(self) -> PolyT:
        """Coefficients in degrees >= 0 as a polynomial."""
        if self.top < 0:
            return PolyT(self.ctx)
        return PolyT(self.ctx, tuple(reversed(self.window(0, self.top))))

    # -- norms ------------------------------------------------------------
    def abs_norm(self) -> QPow:
        """|gamma| = q^deg; raises when the window is all zero but the
        tail is not known to vanish."""
        if self.coeffs:
            return QPow.of(self.top)
        if self.exact:
            return QPow.null()
        raise PrecisionError("absolute value not determined by window")

    def frac_norm(self) -> QPow:
        """Distance to the polynomial ring: size of the fractional tail."""
        for m in range(min(-1, self.top), -self.prec - 1, -1):
            if self.coeff(m):
                return QPow.of(m)
        if self.exact:
            return QPow.null()
        raise PrecisionError("fractional norm not determined by window")

    def abs_lt(self, exp: int) -> bool:
        """Certified |gamma| < q^exp."""
        if self.coeffs:
            return self.top < exp
        if self.exact:
            return True
        if -self.prec - 1 < exp:
            return True
        raise PrecisionError("|gamma| comparison not determined by window")

    def frac_norm_lt(self, exp: int) -> bool:
        """Certified ||gamma|| < q^exp; needs the window down to exp."""
        if exp >= 0:
            return True
        for m in range(-1, exp - 1, -1):
            if self.coeff(m):
                return False
        return True

    # -- misc -------------------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, LaurentAtInfinity):
            return NotImplemented
        if self.ctx is not other.ctx:
            return False
        prec = min(self.prec, other.prec)
        hi = max(self.top, other.top, -prec)
        same = all(
            (self.coeff(m) if m <= self.top else 0) == (other.coeff(m) if m <= other.top else 0)
            for m in range(hi, -prec - 1, -1)
        )
        return same and self.exact == other.exact and self.prec == other.prec

    def __hash__(self):
        return hash((self.top, self.coeffs, self.prec, self.exact))

    def __repr__(self):
        terms = []
        for j, c in enumerate(self.coeffs):
            if c:
                m = self.top - j
                terms.append(f"{c}*T^{m}" if c != 1 else f"T^{m}")
        body = " + ".join(terms) or "0"
        tag = "exact" if self.exact else f"prec={self.prec}"
        return f"Laurent({body}; {tag})"

    def to_json(self) -> dict:
        return {
            "top_degree": self.top,
            "coeffs": list(self.coeffs),
            "prec": self.prec,
            "exact": self.exact,
        }

    @staticmethod
    def from_json(ctx: Fq, data: dict) -> "LaurentAtInfinity":
        return LaurentAtInfinity(ctx, int(data["top_degree"]), data["coeffs"], int(data["prec"]), bool(data.get("exact", False)))


@dataclass(frozen=True)
class RationalArcPoint:
    """A point a/r + theta of the unit torus with r monic, gcd(a, r) = 1
    and |a| < |r|."""

    a: PolyT
    r: PolyT
    theta: LaurentAtInfinity

    def __post_init__(self):
        if not self.r.is_monic:
            raise ValueError("denominator must be monic")
        if not (self.a.abs() < self.r.abs()):
            raise ValueError("need |a| < |r|")
        if self.a.gcd(self.r) != PolyT.const(self.a.ctx, 1):
            raise ValueError("a and r must be coprime")

    @property
    def ctx(self) -> Fq:
        return self.r.ctx

    def beta(self, prec: int | None = None) -> LaurentAtInfinity:
        prec = self.theta.prec if prec is None else prec
        main = LaurentAtInfinity.expand_ratio(self.ctx, self.a, self.r, prec)
        return main + self.theta.with_prec(prec)


def best_approx(gamma: LaurentAtInfinity, M: int) -> RationalArcPoint:
    """Best rational approximation with |r| <= q^M, from the continued
    fraction of gamma; the result satisfies |r*gamma - a| < q^-M.
    Requires |gamma| < 1 and prec >= 2M + 2 (unless gamma is exact)."""
    ctx = gamma.ctx
    if M < 0:
        raise ValueError("M must be >= 0")
    if not (gamma.is_zero_window or gamma.top < 0):
        raise ValueError("best_approx expects a torus point, |gamma| < 1")
    if not gamma.exact and gamma.prec < 2 * M + 2:
        raise PrecisionError("best_approx needs prec >= 2M + 2")
    one = PolyT.const(ctx, 1)
    h_prev, h_cur = one, PolyT(ctx)  # numerators h_{-1}, h_0 (a_0 = 0)
    k_prev, k_cur = PolyT(ctx), one
    x = gamma
    while True:
        if x.is_zero_window:
            # remaining tail is zero (exact) or below q^-(prec+1); either
            # way deg k_cur + that depth exceeds M, so k_cur is final.
            break
        v = -x.top
        deg_k = k_cur.degree if not k_cur.is_zero else 0
        if deg_k + v > M:
            # next denominator would have degree deg_k + v > M and the
            # standard identity gives |k_cur gamma - h_cur| = q^-(deg_k+v)
            break
        inv = _invert_tail(x, pad=2 * (M + 2))
        a_part = inv.poly_part()
        h_cur, h_prev = a_part * h_cur + h_prev, h_cur
        k_cur, k_prev = a_part * k_cur + k_prev, k_cur
        x = inv - LaurentAtInfinity.from_poly(ctx, a_part, inv.prec)
    lead = k_cur.coeffs[-1]
    if lead != 1:
        u = ctx.inv(lead)
        h_cur = h_cur * u
        k_cur = k_cur * u
    theta = gamma - LaurentAtInfinity.expand_ratio(ctx, h_cur, k_cur, gamma.prec)
    point = RationalArcPoint(h_cur, k_cur, theta)
    # certified guarantee |r*gamma - a| < q^-M
    err = gamma.mul_poly(k_cur) - LaurentAtInfinity.from_poly(ctx, h_cur, gamma.prec)
    if not err.abs_lt(-M):
        raise ArithmeticError("continued fraction postcondition failed")
    return point


def _invert_tail(x: LaurentAtInfinity, pad: int = 8) -> LaurentAtInfinity:
    """1/x for a tail with |x| = q^-v, v >= 1; certified to prec - 2v."""
    ctx = x.ctx
    v = -x.top
    if v < 1:
        raise ValueError("only tails with |x| < 1 are inverted here")
    if x.exact:
        x = x.with_prec(max(x.prec, 2 * v + pad))
    prec_out = x.prec - 2 * v
    if prec_out < 0:
        raise PrecisionError("insufficient precision to invert tail")
    lead_inv = ctx.inv(x.coeffs[0])
    out = [lead_inv]
    for j in range(1, v + prec_out + 1):
        acc = 0
        for i in range(1, j + 1):
            xi = x.coeff(-v - i)
            if xi:
                acc = ctx.add(acc, ctx.mul(out[j - i], xi))
        out.append(ctx.mul(ctx.neg(acc), lead_inv))
    return LaurentAtInfinity(ctx, v, tuple(out), prec_out, exact=False)
