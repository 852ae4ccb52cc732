"""Exact values of additive character sums: the ring Z[zeta_p][1/q].

A CycloValue is an integer vector in the power basis zeta^0..zeta^(p-2)
together with a scale exponent t, standing for (sum c_j zeta^j) * q^(-t).
The relation 1 + zeta + ... + zeta^(p-1) = 0 is applied eagerly, so two
values are equal exactly when their normal forms coincide.  Magnitude
comparisons against rationals go through interval arithmetic with the
precision raised until the comparison is certified; exact ties must be
settled by the caller through the exact predicates, never by rounding.
"""

from __future__ import annotations

from fractions import Fraction

import mpmath

from .polyring import QPow


class PrecisionError(ArithmeticError):
    """A comparison or expansion could not be certified at the available
    precision."""


class CycloValue:
    __slots__ = ("p", "q", "coords", "scale")

    def __init__(self, p: int, q: int, coords, scale: int = 0):
        if len(coords) != p - 1:
            raise ValueError("coordinate vector must have length p - 1")
        self.p = p
        self.q = q
        coords = tuple(int(c) for c in coords)
        # canonical scale: smallest t >= 0 with integral coordinates
        while scale > 0 and all(c % q == 0 for c in coords):
            coords = tuple(c // q for c in coords)
            scale -= 1
        if scale < 0:
            coords = tuple(c * q ** (-scale) for c in coords)
            scale = 0
        if all(c == 0 for c in coords):
            scale = 0
        self.coords = coords
        self.scale = scale

    # -- constructors -----------------------------------------------------
    @staticmethod
    def zero(p: int, q: int) -> "CycloValue":
        return CycloValue(p, q, (0,) * (p - 1))

    @staticmethod
    def integer(p: int, q: int, m: int) -> "CycloValue":
        return CycloValue(p, q, (m,) + (0,) * (p - 2))

    @staticmethod
    def zeta_pow(p: int, q: int, t: int) -> "CycloValue":
        t %= p
        if t < p - 1:
            coords = tuple(1 if j == t else 0 for j in range(p - 1))
        else:
            coords = (-1,) * (p - 1)
        return CycloValue(p, q, coords)

    @staticmethod
    def from_counts(p: int, q: int, counts) -> "CycloValue":
        """sum over t of counts[t] * zeta^t, counts indexed by 0..p-1."""
        counts = list(counts) + [0] * (p - len(counts))
        top = counts[p - 1]
        return CycloValue(p, q, tuple(counts[j] - top for j in range(p - 1)))

    # -- ring operations --------------------------------------------------
    def _check(self, other: "CycloValue"):
        if self.p != other.p or self.q != other.q:
            raise ValueError("mixed cyclotomic contexts")

    def __add__(self, other: "CycloValue") -> "CycloValue":
        self._check(other)
        t = max(self.scale, other.scale)
        fa = self.q ** (t - self.scale)
        fb = self.q ** (t - other.scale)
        return CycloValue(self.p, self.q, tuple(a * fa + b * fb for a, b in zip(self.coords, other.coords)), t)

    def __neg__(self) -> "CycloValue":
        return CycloValue(self.p, self.q, tuple(-c for c in self.coords), self.scale)

    def __sub__(self, other: "CycloValue") -> "CycloValue":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return CycloValue(self.p, self.q, tuple(c * other for c in self.coords), self.scale)
        self._check(other)
        p = self.p
        # multiply modulo zeta^p = 1, then fold zeta^(p-1) back into the basis
        full = [0] * p
        for i, a in enumerate(self.coords):
            if a:
                for j, b in enumerate(other.coords):
                    if b:
                        full[(i + j) % p] += a * b
        top = full[p - 1]
        coords = tuple(full[j] - top for j in range(p - 1))
        return CycloValue(p, self.q, coords, self.scale + other.scale)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "CycloValue":
        result = CycloValue.integer(self.p, self.q, 1)
        for _ in range(n):
            result = result * self
        return result

    def scaled(self, t: int) -> "CycloValue":
        """Multiply by q^(-t)."""
        return CycloValue(self.p, self.q, self.coords, self.scale + t)

    # -- predicates -------------------------------------------------------
    @property
    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = CycloValue.integer(self.p, self.q, other)
        return (
            isinstance(other, CycloValue)
            and self.p == other.p
            and self.q == other.q
            and self.coords == other.coords
            and self.scale == other.scale
        )

    def __hash__(self):
        return hash((self.p, self.coords, self.scale))

    def as_rational(self) -> Fraction | None:
        """Exact rational value if the element lies in Q, else None."""
        if any(self.coords[1:]):
            return None
        return Fraction(self.coords[0], self.q**self.scale)

    def conjugate(self) -> "CycloValue":
        p = self.p
        full = [0] * p
        for j, c in enumerate(self.coords):
            full[(-j) % p] += c
        top = full[p - 1]
        return CycloValue(p, self.q, tuple(full[j] - top for j in range(p - 1)), self.scale)

    def mag_sq(self) -> "CycloValue":
        """|value|^2 as an exact element of the real subfield."""
        return self * self.conjugate()

    # -- certified numerics ----------------------------------------------
    def mag_sq_bounds(self, prec: int = 80) -> tuple[Fraction, Fraction]:
        """Certified rational enclosure of |value|^2."""
        iv = mpmath.iv
        iv.prec = prec
        re = iv.mpf(0)
        im = iv.mpf(0)
        two_pi = 2 * iv.pi
        for j, c in enumerate(self.coords):
            if c:
                angle = (two_pi * j) / self.p
                re += c * iv.cos(angle)
                im += c * iv.sin(angle)
        box = re * re + im * im
        lo, hi = _iv_to_fractions(box)
        denom = Fraction(self.q) ** (2 * self.scale)
        return lo / denom, hi / denom

    def _mag_sq_cmp(self, target: Fraction, allow_equal: bool, max_prec: int) -> bool:
        exact = self.mag_sq().as_rational()
        if exact is not None:
            return exact <= target if allow_equal else exact < target
        prec = 80
        while prec <= max_prec:
            lo, hi = self.mag_sq_bounds(prec)
            if (hi <= target) if allow_equal else (hi < target):
                return True
            if (lo > target) if allow_equal else (lo >= target):
                return False
            prec *= 2
        raise PrecisionError("magnitude comparison not certified at max precision")

    def abs_le(self, bound, max_prec: int = 4000) -> bool:
        """Certified |value| <= bound for a rational bound >= 0."""
        return self._mag_sq_cmp(Fraction(bound) ** 2, True, max_prec)

    def abs_lt(self, bound, max_prec: int = 4000) -> bool:
        return self._mag_sq_cmp(Fraction(bound) ** 2, False, max_prec)

    def __repr__(self):
        body = " + ".join(f"{c}*z^{j}" for j, c in enumerate(self.coords) if c) or "0"
        if self.scale:
            return f"({body}) * {self.q}^-{self.scale}"
        return body


def _iv_to_fractions(box) -> tuple[Fraction, Fraction]:
    return _mpf_to_fraction(box.a), _mpf_to_fraction(box.b)


def _mpf_to_fraction(x) -> Fraction:
    sign, man, exp, _ = mpmath.mpf(x)._mpf_
    if man == 0 and exp != 0:
        raise PrecisionError("non-finite interval endpoint")
    val = Fraction(int(man)) * Fraction(2) ** int(exp)
    return -val if sign else val


def charsums_for(ctx) -> list[CycloValue]:
    """For each w in F_q (by code), the literal sum over c in F_q of
    zeta^trace(c*w), evaluated term by term.  Entry 0 is q; every other
    entry reduces to the zero vector.  Callers lean on this table instead
    of quoting character orthogonality, so their grid sums stay honest
    finite computations."""
    out = []
    for w in range(ctx.q):
        counts = [0] * ctx.p
        for c in range(ctx.q):
            counts[ctx.trace(ctx.mul(w, c))] += 1
        out.append(CycloValue.from_counts(ctx.p, ctx.q, counts))
    return out


def qpow_fraction(q: int, val: QPow) -> Fraction:
    return val.fraction(q)
