"""The ring F_q[T] with the absolute value |f| = q^deg(f), |0| = 0.

Two layers: free functions acting on bare coefficient tuples (ascending,
no trailing zeros, () is the zero polynomial) for the enumeration
kernels, and the immutable PolyT wrapper for everything else.  Absolute
values are QPow objects, an exponent plus a zero flag, so size
comparisons never touch floating point.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering

from .fields import Fq

NEG_INF = float("-inf")


@total_ordering
@dataclass(frozen=True)
class QPow:
    """Either 0 or q^exp; q itself lives with the caller."""

    zero: bool
    exp: int = 0

    @staticmethod
    def of(exp: int) -> "QPow":
        return QPow(False, exp)

    @staticmethod
    def null() -> "QPow":
        return QPow(True, 0)

    def __bool__(self) -> bool:
        return not self.zero

    def __lt__(self, other: "QPow") -> bool:
        if self.zero:
            return not other.zero
        if other.zero:
            return False
        return self.exp < other.exp

    def __mul__(self, other: "QPow") -> "QPow":
        if self.zero or other.zero:
            return QPow.null()
        return QPow(False, self.exp + other.exp)

    def fraction(self, q: int) -> Fraction:
        if self.zero:
            return Fraction(0)
        return Fraction(q) ** self.exp


# -- tuple core -----------------------------------------------------------


def ptrim(c) -> tuple[int, ...]:
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def pdeg(a) -> int | float:
    return len(a) - 1 if a else NEG_INF


def padd(ctx: Fq, a, b):
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, x in enumerate(b):
        out[i] = ctx.add(out[i], x)
    return ptrim(out)


def pneg(ctx: Fq, a):
    return tuple(ctx.neg(x) for x in a)


def psub(ctx: Fq, a, b):
    return padd(ctx, a, pneg(ctx, b))


def pscale(ctx: Fq, c: int, a):
    if c == 0:
        return ()
    return tuple(ctx.mul(c, x) for x in a)


def pmul(ctx: Fq, a, b):
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] = ctx.add(out[i + j], ctx.mul(x, y))
    return tuple(out)


def ppow(ctx: Fq, a, n: int):
    result = (1,)
    for _ in range(n):
        result = pmul(ctx, result, a)
    return result


def pshift(a, m: int):
    """Multiply by T^m, m >= 0."""
    if not a:
        return ()
    return (0,) * m + tuple(a)


def pdivmod(ctx: Fq, a, b):
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    r = list(a)
    q_out = [0] * max(0, len(a) - len(b) + 1)
    inv_lead = ctx.inv(b[-1])
    while len(r) >= len(b):
        c = ctx.mul(r[-1], inv_lead)
        shift = len(r) - len(b)
        if c:
            q_out[shift] = c
            for j, y in enumerate(b):
                r[shift + j] = ctx.sub(r[shift + j], ctx.mul(c, y))
        r.pop()
        while r and r[-1] == 0:
            r.pop()
    return ptrim(q_out), ptrim(r)


def pmod(ctx: Fq, a, b):
    return pdivmod(ctx, a, b)[1]


def pmonic(ctx: Fq, a):
    if not a:
        return ()
    return pscale(ctx, ctx.inv(a[-1]), a)


def pgcd(ctx: Fq, a, b):
    """Monic gcd; gcd(0, 0) = 0."""
    a, b = ptrim(a), ptrim(b)
    while b:
        a, b = b, pmod(ctx, a, b)
    return pmonic(ctx, a)


def pcontent(ctx: Fq, vec):
    """Monic gcd of a tuple of polynomials."""
    g = ()
    for a in vec:
        g = pgcd(ctx, g, a)
        if g == (1,):
            break
    return g


def peval(ctx: Fq, a, x: int) -> int:
    acc = 0
    for c in reversed(a):
        acc = ctx.add(ctx.mul(acc, x), c)
    return acc


def pcompose_binary(ctx: Fq, a, e: int, m) -> tuple[int, ...]:
    """Substitute the 2x2 matrix m into the degree-e binary form whose
    dehomogenised coefficients are a: returns coefficients of
    A(c11*S + c21*T, c12*S + c22*T) with A(S,T) = sum a_i S^(e-i) T^i."""
    (c11, c12), (c21, c22) = m
    row0 = (c11, c12)  # image of S as a linear form in (S, T)
    row1 = (c21, c22)  # image of T
    out = [0] * (e + 1)
    # Horner in the second variable over linear forms.
    spow = [(1,)]
    for _ in range(e):
        spow.append(pmul(ctx, spow[-1], row0))
    tpow = [(1,)]
    for _ in range(e):
        tpow.append(pmul(ctx, tpow[-1], row1))
    coeffs = tuple(a) + (0,) * (e + 1 - len(a))
    acc = ()
    for i in range(e + 1):
        if coeffs[i]:
            term = pscale(ctx, coeffs[i], pmul(ctx, spow[e - i], tpow[i]))
            acc = padd(ctx, acc, term)
    acc = tuple(acc) + (0,) * (e + 1 - len(acc))
    return acc[: e + 1]


# -- PolyT ----------------------------------------------------------------


class PolyT:
    """Immutable polynomial in F_q[T]."""

    __slots__ = ("ctx", "coeffs", "_hash")

    def __init__(self, ctx: Fq, coeffs=()):
        object.__setattr__(self, "ctx", ctx)
        object.__setattr__(self, "coeffs", ptrim(coeffs))
        object.__setattr__(self, "_hash", hash((id(ctx), self.coeffs)))

    def __setattr__(self, *a):
        raise AttributeError("PolyT is immutable")

    @staticmethod
    def T(ctx: Fq) -> "PolyT":
        return PolyT(ctx, (0, 1))

    @staticmethod
    def const(ctx: Fq, c: int) -> "PolyT":
        return PolyT(ctx, (c % ctx.q,) if c % ctx.q else ())

    @staticmethod
    def from_int_coeffs(ctx: Fq, coeffs) -> "PolyT":
        return PolyT(ctx, tuple(c % ctx.p for c in coeffs))

    @property
    def degree(self):
        return pdeg(self.coeffs)

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    def abs(self) -> QPow:
        return QPow.null() if self.is_zero else QPow.of(len(self.coeffs) - 1)

    def __add__(self, other):
        return PolyT(self.ctx, padd(self.ctx, self.coeffs, other.coeffs))

    def __sub__(self, other):
        return PolyT(self.ctx, psub(self.ctx, self.coeffs, other.coeffs))

    def __neg__(self):
        return PolyT(self.ctx, pneg(self.ctx, self.coeffs))

    def __mul__(self, other):
        if isinstance(other, int):
            return PolyT(self.ctx, pscale(self.ctx, other % self.ctx.q, self.coeffs))
        return PolyT(self.ctx, pmul(self.ctx, self.coeffs, other.coeffs))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        return PolyT(self.ctx, ppow(self.ctx, self.coeffs, n))

    def __divmod__(self, other):
        q_out, r = pdivmod(self.ctx, self.coeffs, other.coeffs)
        return PolyT(self.ctx, q_out), PolyT(self.ctx, r)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def gcd(self, other) -> "PolyT":
        return PolyT(self.ctx, pgcd(self.ctx, self.coeffs, other.coeffs))

    def monic(self) -> "PolyT":
        return PolyT(self.ctx, pmonic(self.ctx, self.coeffs))

    def shift(self, m: int) -> "PolyT":
        return PolyT(self.ctx, pshift(self.coeffs, m))

    def __eq__(self, other):
        return isinstance(other, PolyT) and self.ctx is other.ctx and self.coeffs == other.coeffs

    def __hash__(self):
        return self._hash

    def __repr__(self):
        if self.is_zero:
            return "0"
        parts = []
        for i, c in enumerate(self.coeffs):
            if not c:
                continue
            if i == 0:
                parts.append(str(c))
            elif i == 1:
                parts.append(f"{c}*T" if c != 1 else "T")
            else:
                parts.append(f"{c}*T^{i}" if c != 1 else f"T^{i}")
        return " + ".join(parts)


# -- enumeration, factorisation, arithmetic functions ---------------------


def monic_polys(ctx: Fq, deg: int):
    """All monic polynomials of exact degree deg, in code order."""
    for tail in itertools.product(ctx.elements(), repeat=deg):
        yield tail + (1,)


def all_polys(ctx: Fq, max_deg: int):
    """All polynomials of degree <= max_deg (including 0), in code order."""
    if max_deg < 0:
        yield ()
        return
    for c in itertools.product(ctx.elements(), repeat=max_deg + 1):
        yield ptrim(c)


def poly_by_code(ctx: Fq, code: int, width: int) -> tuple[int, ...]:
    out = []
    for _ in range(width):
        out.append(code % ctx.q)
        code //= ctx.q
    return ptrim(out)


def factorise_monic(ctx: Fq, a) -> dict[tuple[int, ...], int]:
    """Factor a monic polynomial by trial division over monic irreducibles
    in code order.  Fine for the small degrees this package handles."""
    a = ptrim(a)
    if not a or a[-1] != 1:
        raise ValueError("factorise_monic expects a monic polynomial")
    out: dict[tuple[int, ...], int] = {}
    deg = 1
    while len(a) > 1:
        if 2 * deg > len(a) - 1:
            out[a] = out.get(a, 0) + 1
            break
        found = False
        for cand in monic_polys(ctx, deg):
            q_out, r = pdivmod(ctx, a, cand)
            if not r:
                found = True
                mult = 0
                while not r:
                    a, mult = q_out, mult + 1
                    q_out, r = pdivmod(ctx, a, cand)
                out[cand] = mult
                break
        if not found:
            deg += 1
    return out


def is_squarefree(ctx: Fq, a) -> bool:
    return all(m == 1 for m in factorise_monic(ctx, a).values())


def mobius(ctx: Fq, a) -> int:
    """Mobius function of a monic polynomial: 0 unless squarefree, else
    (-1)^(number of irreducible factors)."""
    a = ptrim(a)
    if not a:
        raise ValueError("mobius(0) undefined")
    if len(a) == 1:
        return 1
    fac = factorise_monic(ctx, pmonic(ctx, a))
    if any(m > 1 for m in fac.values()):
        return 0
    return -1 if len(fac) % 2 else 1


def euler_phi(ctx: Fq, a) -> int:
    """Number of residues coprime to the monic polynomial a."""
    a = ptrim(a)
    if not a:
        raise ValueError("euler_phi(0) undefined")
    out = 1
    for irred, mult in factorise_monic(ctx, pmonic(ctx, a)).items():
        size = ctx.q ** (len(irred) - 1)
        out *= (size - 1) * size ** (mult - 1)
    return out


def monic_divisors(ctx: Fq, a):
    """All monic divisors of the monic polynomial a."""
    fac = list(factorise_monic(ctx, a).items())
    for mults in itertools.product(*[range(m + 1) for _, m in fac]):
        div = (1,)
        for (irred, _), m in zip(fac, mults):
            for _ in range(m):
                div = pmul(ctx, div, irred)
        yield div


def mobius_degree_sum(ctx: Fq, j: int) -> int:
    """Sum of mobius over all monic polynomials of exact degree j."""
    return sum(mobius(ctx, k) for k in monic_polys(ctx, j))


# -- serialisation --------------------------------------------------------


def poly_to_json(ctx: Fq, a) -> list:
    if ctx.k == 1:
        return [int(c) for c in a]
    from .fields import _digits

    return [list(_digits(c, ctx.p, ctx.k)) for c in a]


def poly_from_json(ctx: Fq, data) -> tuple[int, ...]:
    out = []
    for c in data:
        if isinstance(c, list):
            if len(c) > ctx.k:
                raise ValueError("coefficient vector longer than field degree")
            code = 0
            for digit in reversed(list(c) + [0] * (ctx.k - len(c))):
                code = code * ctx.p + int(digit) % ctx.p
            out.append(code)
        else:
            if not 0 <= int(c) < ctx.p:
                raise ValueError("bare integer coefficients must lie in [0, p)")
            out.append(int(c))
    return ptrim(out)
