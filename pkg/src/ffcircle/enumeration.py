"""Exhaustive solution listing for f(g) = 0 over boxes of polynomial
tuples.

The diagonal fast path splits the coordinates in half, tabulates partial
sums of a_i * g_i^d on each half and matches them through a hash join,
so the cost is two half-boxes plus the output rather than the full box.
Generic forms fall back to plain iteration.  Both paths produce the same
deterministic, lexicographically sorted row array; budgets cap the
estimated work and raise instead of silently truncating.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .fields import Fq
from .forms import Form
from .polyring import pdeg, ppow, pscale, ptrim

DEFAULT_BUDGET = 200_000_000


class BudgetExceeded(RuntimeError):
    pass


@dataclass
class SolutionTable:
    """All g in F_q[T]^n with deg g_i <= max_deg and f(g) = 0, as rows of
    coefficient codes (coordinate-major, ascending within a coordinate).
    Includes the zero row."""

    form: Form
    max_deg: int
    rows: np.ndarray  # (N, n * (max_deg + 1)) int16, lexicographically sorted

    @property
    def width(self) -> int:
        return self.max_deg + 1

    def coord_degrees(self) -> np.ndarray:
        """Per-row, per-coordinate degrees (-1 for the zero polynomial)."""
        n, w = self.form.n, self.width
        r = self.rows.reshape(len(self.rows), n, w)
        nonzero = r != 0
        idx = np.arange(w, dtype=np.int16)
        return np.where(nonzero.any(axis=2), (nonzero * (idx + 1)).max(axis=2) - 1, -1)

    def max_degree_per_row(self) -> np.ndarray:
        return self.coord_degrees().max(axis=1)

    def rows_with_max_deg_leq(self, m: int) -> np.ndarray:
        return self.rows[self.max_degree_per_row() <= m]

    def count_box(self, m: int) -> int:
        """#solutions with all degrees <= m (the |g| < q^(m+1) box)."""
        if m > self.max_deg:
            raise ValueError("box larger than enumerated table")
        return int((self.max_degree_per_row() <= m).sum())

    def row_polys(self, row: np.ndarray) -> list[tuple[int, ...]]:
        n, w = self.form.n, self.width
        return [ptrim(row[i * w : (i + 1) * w]) for i in range(n)]


def value_tables(form: Form, max_deg: int) -> list[np.ndarray]:
    """For each coordinate, the table of a_i * g^d over all q^(max_deg+1)
    polynomials g (by code), as coefficient arrays of length
    d * max_deg + 1.  Diagonal forms only."""
    ctx = form.ctx
    if not form.is_diagonal:
        raise ValueError("value tables need a diagonal form")
    w = max_deg + 1
    out_len = form.d * max_deg + 1
    tables = []
    for a in form.diagonal_coeffs():
        tab = np.zeros((ctx.q**w, out_len), dtype=np.int16)
        for code in range(ctx.q**w):
            g = _poly_of_code(ctx, code, w)
            val = pscale(ctx, a, ppow(ctx, g, form.d))
            tab[code, : len(val)] = val
        tables.append(tab)
    return tables


def _poly_of_code(ctx: Fq, code: int, width: int) -> tuple[int, ...]:
    out = []
    for _ in range(width):
        out.append(code % ctx.q)
        code //= ctx.q
    return ptrim(out)


def _code_grid(q: int, count: int) -> np.ndarray:
    """(q^count, count) array of digit vectors, row r = digits of r."""
    codes = np.arange(q**count, dtype=np.int64)
    cols = []
    for _ in range(count):
        cols.append(codes % q)
        codes //= q
    return np.stack(cols, axis=1).astype(np.int16) if cols else np.zeros((1, 0), dtype=np.int16)


def _half_sums(ctx: Fq, tables: list[np.ndarray]) -> np.ndarray:
    """Sum of the value tables over all code combinations; row index is
    the mixed-radix code (first table least significant)."""
    acc = tables[0]
    for tab in tables[1:]:
        if ctx.k == 1:
            acc = (acc[None, :, :] + tab[:, None, :]) % ctx.p
        else:
            acc = ctx.add_t[acc[None, :, :], tab[:, None, :]].astype(np.int16)
        acc = acc.reshape(-1, acc.shape[-1])
    return acc


def solutions_up_to(form: Form, max_deg: int, budget: int = DEFAULT_BUDGET) -> SolutionTable:
    """Full solution table for the box deg g_i <= max_deg."""
    ctx = form.ctx
    n, w = form.n, max_deg + 1
    if max_deg < 0:
        return SolutionTable(form, max_deg, np.zeros((1, 0), dtype=np.int16))
    if form.is_diagonal:
        half = ctx.q ** ((n - n // 2) * w)
        if half * (form.d * max_deg + 1) > budget:
            raise BudgetExceeded(f"half box {half} exceeds budget {budget}")
        rows = _diagonal_rows(form, max_deg)
    else:
        total = ctx.q ** (n * w)
        if total > budget:
            raise BudgetExceeded(f"full box {total} exceeds budget {budget}")
        rows = _generic_rows(form, max_deg)
    order = np.lexsort(rows.T[::-1])
    return SolutionTable(form, max_deg, np.ascontiguousarray(rows[order]))


def _diagonal_rows(form: Form, max_deg: int) -> np.ndarray:
    ctx = form.ctx
    n, w = form.n, max_deg + 1
    tables = value_tables(form, max_deg)
    na = n // 2
    a_sums = _half_sums(ctx, tables[:na])
    b_sums = _half_sums(ctx, tables[na:])
    if ctx.k == 1:
        b_keys = (-b_sums) % ctx.p
    else:
        b_keys = ctx.neg_t[b_sums].astype(np.int16)
    a_sums = np.ascontiguousarray(a_sums)
    b_keys = np.ascontiguousarray(b_keys)
    index: dict[bytes, list[int]] = {}
    for i, row in enumerate(a_sums):
        index.setdefault(row.tobytes(), []).append(i)
    matches_a: list[int] = []
    matches_b: list[int] = []
    for jb, row in enumerate(b_keys):
        hit = index.get(row.tobytes())
        if hit:
            matches_a.extend(hit)
            matches_b.extend([jb] * len(hit))
    a_codes = np.asarray(matches_a, dtype=np.int64)
    b_codes = np.asarray(matches_b, dtype=np.int64)
    cols = []
    for _ in range(na):
        cols.append(a_codes % ctx.q**w)
        a_codes //= ctx.q**w
    for _ in range(n - na):
        cols.append(b_codes % ctx.q**w)
        b_codes //= ctx.q**w
    rows = np.zeros((len(matches_a), n * w), dtype=np.int16)
    for i, col in enumerate(cols):
        digs = col.copy()
        for j in range(w):
            rows[:, i * w + j] = digs % ctx.q
            digs //= ctx.q
    return rows


def _generic_rows(form: Form, max_deg: int) -> np.ndarray:
    ctx = form.ctx
    n, w = form.n, max_deg + 1
    rows = []
    for codes in itertools.product(range(ctx.q**w), repeat=n):
        g = [_poly_of_code(ctx, c, w) for c in codes]
        if form.eval_poly(g).is_zero:
            row = []
            for c in codes:
                for _ in range(w):
                    row.append(c % ctx.q)
                    c //= ctx.q
            rows.append(row)
    return np.asarray(rows, dtype=np.int16) if rows else np.zeros((0, n * w), dtype=np.int16)
