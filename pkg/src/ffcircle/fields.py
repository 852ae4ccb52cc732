"""Exact arithmetic in F_q with q = p^k.

Field elements are integer codes in [0, q).  The code sum(c_i * p^i)
stands for the residue sum(c_i * x^i) modulo a fixed irreducible monic
modulus of degree k over F_p; for k = 1 the code is just the residue
itself.  All operations are table driven, so enumeration kernels can
apply them to whole numpy arrays of codes at once, and every scalar
operation returns a plain Python int.
"""

from __future__ import annotations

import functools
import itertools

import numpy as np


def is_prime(m: int) -> bool:
    if m < 2:
        return False
    if m % 2 == 0:
        return m == 2
    f = 3
    while f * f <= m:
        if m % f == 0:
            return False
        f += 2
    return True


# -- F_p[x] helpers used only for modulus selection and validation --------
# Coefficients ascending, no trailing zeros.


def _pp_trim(c: list[int]) -> tuple[int, ...]:
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def _pp_reduce(a, mod, p):
    out = list(a)
    deg_m = len(mod) - 1
    while len(out) > deg_m:
        top = out.pop()
        if top:
            shift = len(out) - deg_m
            for j in range(deg_m):
                out[shift + j] = (out[shift + j] - top * mod[j]) % p
    return _pp_trim(out)


def _pp_mul(a, b, p):
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _pp_trim(out)


def _pp_powmod(a, n, mod, p):
    result = (1,)
    base = _pp_reduce(a, mod, p)
    while n:
        if n & 1:
            result = _pp_reduce(_pp_mul(result, base, p), mod, p)
        base = _pp_reduce(_pp_mul(base, base, p), mod, p)
        n >>= 1
    return result


def _pp_gcd(a, b, p):
    a, b = tuple(a), tuple(b)
    while b:
        # a mod b, b monic-normalised on the fly
        lead_inv = pow(b[-1], p - 2, p)
        r = list(a)
        while len(r) >= len(b) and r:
            factor = r[-1] * lead_inv % p
            shift = len(r) - len(b)
            for j, bj in enumerate(b):
                r[shift + j] = (r[shift + j] - factor * bj) % p
            r = list(_pp_trim(r))
        a, b = b, _pp_trim(r)
    return a


def _pp_is_irreducible(mod, p):
    """Rabin test for a monic polynomial over F_p."""
    k = len(mod) - 1
    if k < 1 or mod[-1] != 1:
        return False
    x = (0, 1)
    if _pp_powmod(x, p**k, mod, p) != _pp_reduce(x, mod, p):
        return False
    for ell in sorted({f for f in _factorise(k)}):
        h = _pp_powmod(x, p ** (k // ell), mod, p)
        diff = list(h) + [0] * max(0, 2 - len(h))
        diff[1] = (diff[1] - 1) % p
        if len(_pp_gcd(mod, _pp_trim(diff), p)) != 1:
            return False
    return True


def _factorise(m: int) -> list[int]:
    out = []
    f = 2
    while f * f <= m:
        while m % f == 0:
            out.append(f)
            m //= f
        f += 1
    if m > 1:
        out.append(m)
    return out


def _default_modulus(p: int, k: int) -> tuple[int, ...]:
    """First monic degree-k polynomial (in code order) that is irreducible
    and has x as a multiplicative generator.  Deterministic, so two runs
    always agree on the field model; callers may override."""
    q = p**k
    prime_factors = sorted(set(_factorise(q - 1)))
    for code in range(q):
        coeffs = _digits(code, p, k) + (1,)
        if not _pp_is_irreducible(coeffs, p):
            continue
        x = (0, 1)
        if any(_pp_powmod(x, (q - 1) // ell, coeffs, p) == (1,) for ell in prime_factors):
            continue
        return coeffs
    raise ValueError(f"no irreducible modulus found for p={p}, k={k}")


def _digits(code: int, p: int, k: int) -> tuple[int, ...]:
    out = []
    for _ in range(k):
        out.append(code % p)
        code //= p
    return tuple(out)


class Fq:
    """Context object for F_{p^k}; use Fq.get() so contexts are shared."""

    def __init__(self, p: int, k: int = 1, modulus: tuple[int, ...] | None = None):
        if not is_prime(p):
            raise ValueError(f"p={p} is not prime")
        if k < 1:
            raise ValueError("k must be >= 1")
        self.p = p
        self.k = k
        self.q = p**k
        if k == 1:
            self.modulus = (0, 1)  # unused; x - 0 placeholder
        else:
            if modulus is None:
                modulus = _default_modulus(p, k)
            modulus = tuple(int(c) % p for c in modulus)
            if len(modulus) != k + 1 or modulus[-1] != 1:
                raise ValueError("modulus must be monic of degree k")
            if not _pp_is_irreducible(modulus, p):
                raise ValueError(f"modulus {modulus} is reducible over F_{p}")
            self.modulus = modulus
        self._build_tables()

    # The tables make every field operation an array lookup.
    def _build_tables(self) -> None:
        p, k, q = self.p, self.k, self.q
        if k == 1:
            idx = np.arange(q, dtype=np.int64)
            self.add_t = (idx[:, None] + idx[None, :]) % p
            self.mul_t = (idx[:, None] * idx[None, :]) % p
            self.neg_t = (-idx) % p
            inv = np.zeros(q, dtype=np.int64)
            inv[1:] = [pow(int(a), p - 2, p) for a in range(1, q)]
            self.inv_t = inv
            self.trace_t = idx.copy()
        else:
            vecs = [_digits(c, p, k) for c in range(q)]
            add = np.zeros((q, q), dtype=np.int64)
            mul = np.zeros((q, q), dtype=np.int64)
            for a in range(q):
                va = vecs[a]
                for b in range(a, q):
                    vb = vecs[b]
                    s = tuple((x + y) % p for x, y in zip(va, vb))
                    add[a, b] = add[b, a] = self._encode(s)
                    pr = _pp_reduce(_pp_mul(_pp_trim(list(va)), _pp_trim(list(vb)), p), self.modulus, p)
                    mul[a, b] = mul[b, a] = self._encode(pr)
            self.add_t = add
            self.mul_t = mul
            self.neg_t = np.array([self._encode(tuple((-x) % p for x in v)) for v in vecs], dtype=np.int64)
            inv = np.zeros(q, dtype=np.int64)
            for a in range(1, q):
                inv[a] = self.pow_(a, q - 2)
            self.inv_t = inv
            tr = np.zeros(q, dtype=np.int64)
            for a in range(q):
                acc, cur = 0, a
                for _ in range(k):
                    acc = self.add_t[acc, cur]
                    cur = self.pow_(cur, p)
                tr[a] = acc  # element of the prime subfield: code < p
            self.trace_t = tr % p

    def _encode(self, coeffs) -> int:
        code = 0
        for c in reversed(tuple(coeffs) + (0,) * (self.k - len(coeffs))):
            code = code * self.p + c
        return code

    @staticmethod
    @functools.lru_cache(maxsize=None)
    def get(p: int, k: int = 1, modulus: tuple[int, ...] | None = None) -> "Fq":
        return Fq(p, k, modulus)

    # -- scalar operations ------------------------------------------------
    def add(self, a: int, b: int) -> int:
        return int(self.add_t[a, b])

    def sub(self, a: int, b: int) -> int:
        return int(self.add_t[a, self.neg_t[b]])

    def neg(self, a: int) -> int:
        return int(self.neg_t[a])

    def mul(self, a: int, b: int) -> int:
        return int(self.mul_t[a, b])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in F_q")
        return int(self.inv_t[a])

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow_(self, a: int, n: int) -> int:
        if n < 0:
            return self.pow_(self.inv(a), -n)
        result, base = 1, a
        while n:
            if n & 1:
                result = int(self.mul_t[result, base])
            base = int(self.mul_t[base, base])
            n >>= 1
        return result

    def trace(self, a: int) -> int:
        """Trace down to F_p, returned as an int in [0, p)."""
        return int(self.trace_t[a])

    def from_int(self, m: int) -> int:
        """Image of the rational integer m under Z -> F_q."""
        return m % self.p

    def elements(self) -> range:
        return range(self.q)

    def units(self):
        return range(1, self.q)

    def __repr__(self) -> str:
        if self.k == 1:
            return f"Fq({self.p})"
        return f"Fq({self.p}^{self.k}, modulus={self.modulus})"

    def __reduce__(self):
        return (Fq.get, (self.p, self.k, self.modulus if self.k > 1 else None))


def batch_add(ctx: Fq, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if ctx.k == 1:
        return (a + b) % ctx.p
    return ctx.add_t[a, b]


def batch_mul(ctx: Fq, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if ctx.k == 1:
        return (a * b) % ctx.p
    return ctx.mul_t[a, b]


def batch_neg(ctx: Fq, a: np.ndarray) -> np.ndarray:
    if ctx.k == 1:
        return (-a) % ctx.p
    return ctx.neg_t[a]
