"""Homogeneous forms of degree d in n variables over F_q, char > d.

The symmetric coefficient tensor (well defined because d! is a unit) is
stored alongside the monomial expansion; the multilinear forms Psi_i are
read off from it.  Smoothness certification is either immediate for
diagonal forms with unit coefficients or a bounded search for singular
points over small extensions.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from .fields import Fq
from .polyring import PolyT, padd, pmul, ppow, pscale, ptrim


@dataclass(frozen=True)
class SmoothnessReport:
    smooth: bool | None  # None = inconclusive within budget
    method: str
    witness: tuple | None = None
    searched_degrees: tuple[int, ...] = ()


class Form:
    """f = sum over monomials of coeff * x^exps with sum(exps) = d."""

    __slots__ = ("ctx", "n", "d", "monomials", "sym")

    def __init__(self, ctx: Fq, n: int, d: int, monomials: dict[tuple[int, ...], int]):
        if d < 2:
            raise ValueError("degree must be >= 2")
        if ctx.p <= d:
            raise ValueError(f"characteristic {ctx.p} must exceed the degree {d}")
        if n < 2:
            raise ValueError("need at least two variables")
        clean: dict[tuple[int, ...], int] = {}
        for exps, c in monomials.items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != n or any(e < 0 for e in exps) or sum(exps) != d:
                raise ValueError(f"bad exponent vector {exps}")
            c = int(c) % ctx.q if ctx.k == 1 else int(c)
            if c:
                clean[exps] = ctx.add(clean.get(exps, 0), c) if exps in clean else c
        clean = {e: c for e, c in clean.items() if c}
        if not clean:
            raise ValueError("the zero form is not allowed")
        self.ctx = ctx
        self.n = n
        self.d = d
        self.monomials = clean
        sym: dict[tuple[int, ...], int] = {}
        for exps, c in clean.items():
            idx = tuple(i for i in range(n) for _ in range(exps[i]))
            multinom = math.factorial(d)
            for e in exps:
                multinom //= math.factorial(e)
            sym[idx] = ctx.div(c, ctx.from_int(multinom))
        self.sym = sym

    # -- constructors -----------------------------------------------------
    @staticmethod
    def fermat(ctx: Fq, n: int, d: int) -> "Form":
        mono = {}
        for i in range(n):
            exps = [0] * n
            exps[i] = d
            mono[tuple(exps)] = 1
        return Form(ctx, n, d, mono)

    @staticmethod
    def diagonal(ctx: Fq, coeffs: list[int], d: int) -> "Form":
        mono = {}
        n = len(coeffs)
        for i, c in enumerate(coeffs):
            exps = [0] * n
            exps[i] = d
            mono[tuple(exps)] = c
        return Form(ctx, n, d, mono)

    # -- structure --------------------------------------------------------
    @property
    def is_diagonal(self) -> bool:
        return all(max(e) == self.d for e in self.monomials)

    def diagonal_coeffs(self) -> list[int]:
        out = [0] * self.n
        for exps, c in self.monomials.items():
            out[exps.index(self.d)] = c
        return out

    def gradient_monomials(self, i: int) -> dict[tuple[int, ...], int]:
        out: dict[tuple[int, ...], int] = {}
        for exps, c in self.monomials.items():
            if exps[i]:
                new = list(exps)
                new[i] -= 1
                out[tuple(new)] = self.ctx.add(out.get(tuple(new), 0), self.ctx.mul(c, self.ctx.from_int(exps[i])))
        return {e: c for e, c in out.items() if c}

    # -- evaluation -------------------------------------------------------
    def _eval_monos(self, monos: dict, g: list[tuple[int, ...]]) -> tuple[int, ...]:
        acc: tuple[int, ...] = ()
        for exps, c in monos.items():
            term = (c,)
            for i, e in enumerate(exps):
                if e:
                    term = pmul(self.ctx, term, ppow(self.ctx, g[i], e))
            acc = padd(self.ctx, acc, term)
        return acc

    def eval_poly(self, g) -> PolyT:
        gs = [x.coeffs if isinstance(x, PolyT) else ptrim(x) for x in g]
        return PolyT(self.ctx, self._eval_monos(self.monomials, gs))

    def eval_scalar(self, point: list[int]) -> int:
        acc = 0
        for exps, c in self.monomials.items():
            term = c
            for i, e in enumerate(exps):
                term = self.ctx.mul(term, self.ctx.pow_(point[i], e)) if e else term
            acc = self.ctx.add(acc, term)
        return acc

    def grad_eval(self, g) -> list[PolyT]:
        gs = [x.coeffs if isinstance(x, PolyT) else ptrim(x) for x in g]
        return [PolyT(self.ctx, self._eval_monos(self.gradient_monomials(i), gs)) for i in range(self.n)]

    def grad_eval_scalar(self, point: list[int]) -> list[int]:
        out = []
        for i in range(self.n):
            acc = 0
            for exps, c in self.gradient_monomials(i).items():
                term = c
                for j, e in enumerate(exps):
                    term = self.ctx.mul(term, self.ctx.pow_(point[j], e)) if e else term
                acc = self.ctx.add(acc, term)
            out.append(acc)
        return out

    def grad_dot(self, g, h) -> PolyT:
        """sum_i h_i * (df/dx_i)(g)."""
        hs = [x if isinstance(x, PolyT) else PolyT(self.ctx, x) for x in h]
        grads = self.grad_eval(g)
        acc = PolyT(self.ctx)
        for hi, gi in zip(hs, grads):
            acc = acc + hi * gi
        return acc

    def psi(self, i: int, vecs) -> PolyT:
        """The i-th multilinear form: d! * sum over index sequences
        (i_1..i_{d-1}) of sym[i_1..i_{d-1}, i] * prod vecs[m][i_m]."""
        if len(vecs) != self.d - 1:
            raise ValueError(f"psi needs {self.d - 1} vectors")
        ctx = self.ctx
        vs = [[x.coeffs if isinstance(x, PolyT) else ptrim(x) for x in vec] for vec in vecs]
        acc: tuple[int, ...] = ()
        fact = ctx.from_int(math.factorial(self.d))
        for seq in itertools.product(range(self.n), repeat=self.d - 1):
            c = self.sym.get(tuple(sorted(seq + (i,))))
            if not c:
                continue
            term = (ctx.mul(fact, c),)
            for m, im in enumerate(seq):
                term = pmul(ctx, term, vs[m][im])
                if not term:
                    break
            acc = padd(ctx, acc, term)
        return PolyT(ctx, acc)

    # -- smoothness -------------------------------------------------------
    def check_smooth(self, max_extension: int = 2, budget: int = 2_000_000) -> SmoothnessReport:
        ctx = self.ctx
        if self.is_diagonal:
            if all(self.diagonal_coeffs()):
                # char > d kills d * a_i * x_i^(d-1) only at x_i = 0
                return SmoothnessReport(True, "diagonal-unit-coefficients")
            # a vanishing diagonal coefficient leaves a coordinate point singular
            i = self.diagonal_coeffs().index(0)
            witness = tuple(1 if j == i else 0 for j in range(self.n))
            return SmoothnessReport(False, "diagonal-degenerate", witness)
        if ctx.k != 1:
            return SmoothnessReport(None, "search-unavailable-over-extension-base")
        searched = []
        for m in range(1, max_extension + 1):
            ext = Fq.get(ctx.p, m) if m > 1 else ctx
            size = ext.q**self.n
            if size > budget:
                break
            searched.append(m)
            ext_form = Form(ext, self.n, self.d, dict(self.monomials)) if ext is not ctx else self
            for point in itertools.product(range(ext.q), repeat=self.n):
                if not any(point):
                    continue
                grads = ext_form.grad_eval_scalar(list(point))
                if not any(grads):
                    return SmoothnessReport(False, f"singular-point-over-extension-{m}", point, tuple(searched))
        if searched:
            return SmoothnessReport(None, "no-singular-point-within-budget", None, tuple(searched))
        return SmoothnessReport(None, "budget-too-small", None, ())

    # -- serialisation ----------------------------------------------------
    def to_json(self) -> dict:
        terms = []
        for exps, c in sorted(self.monomials.items()):
            terms.append({"exps": list(exps), "coeff": int(c)})
        return {"n": self.n, "d": self.d, "terms": terms}

    @staticmethod
    def from_json(ctx: Fq, data: dict) -> "Form":
        mono = {}
        for term in data["terms"]:
            mono[tuple(term["exps"])] = int(term["coeff"])
        return Form(ctx, int(data["n"]), int(data["d"]), mono)

    def __repr__(self):
        return f"Form(n={self.n}, d={self.d}, {len(self.monomials)} monomials over {self.ctx!r})"

    def __eq__(self, other):
        return (
            isinstance(other, Form)
            and self.ctx is other.ctx
            and self.n == other.n
            and self.d == other.d
            and self.monomials == other.monomials
        )

    def __hash__(self):
        return hash((id(self.ctx), self.n, self.d, tuple(sorted(self.monomials.items()))))
