"""Solution tables versus literal brute force."""

import numpy as np
import pytest

from ffcircle.enumeration import BudgetExceeded, solutions_up_to, value_tables
from ffcircle.fields import Fq
from ffcircle.forms import Form
from ffcircle.polyring import ppow, pscale

from oracles import brute_solutions

F5 = Fq.get(5)


def table_as_set(table):
    return {tuple(table.row_polys(row)) for row in table.rows}


def test_diagonal_route_matches_brute():
    f = Form.diagonal(F5, [1, 2, 1], 3)
    table = solutions_up_to(f, 1)
    assert table_as_set(table) == {tuple(g) for g in brute_solutions(f, 1)}


def test_generic_route_matches_brute():
    f = Form(F5, 3, 3, {(2, 1, 0): 1, (0, 0, 3): 1, (1, 1, 1): 3})
    table = solutions_up_to(f, 1)
    assert table_as_set(table) == {tuple(g) for g in brute_solutions(f, 1)}


def test_degree_bookkeeping():
    f = Form.fermat(F5, 4, 3)
    table = solutions_up_to(f, 1)
    assert table.count_box(1) == len(table.rows)
    assert table.count_box(0) == len(table.rows_with_max_deg_leq(0))
    # the zero row reports degree -1 in every coordinate
    zero = table.coord_degrees()[(table.rows == 0).all(axis=1)]
    assert len(zero) == 1 and (zero == -1).all()
    with pytest.raises(ValueError):
        table.count_box(2)


def test_rows_sorted_and_unique():
    f = Form.fermat(F5, 4, 3)
    rows = solutions_up_to(f, 1).rows
    as_tuples = [tuple(int(x) for x in r) for r in rows]
    assert as_tuples == sorted(as_tuples)
    assert len(set(as_tuples)) == len(as_tuples)


def test_budget_guard():
    f = Form.fermat(F5, 4, 3)
    with pytest.raises(BudgetExceeded):
        solutions_up_to(f, 2, budget=100)


def test_value_tables_spot_check():
    f = Form.diagonal(F5, [1, 3, 2], 3)
    tables = value_tables(f, 1)
    assert len(tables) == 3 and tables[0].shape == (25, 4)
    # code 7 = 2 + T, cubed and scaled by the diagonal coefficient
    for i, a in enumerate([1, 3, 2]):
        want = pscale(F5, a, ppow(F5, (2, 1), 3))
        row = tables[i][7]
        assert tuple(int(x) for x in row[: len(want)]) == want
        assert not row[len(want) :].any()


def test_value_tables_reject_generic():
    f = Form(F5, 3, 3, {(2, 1, 0): 1, (0, 0, 3): 1})
    with pytest.raises(ValueError):
        value_tables(f, 1)
