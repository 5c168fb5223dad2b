"""The acceptance gate: every exit criterion at its stated tolerance.

Each test prints the criterion's pass/fail line (visible with pytest -s and
in the CLI `qdmoment selftest`, which runs the same functions).  Runtimes
are dominated by criteria 4, 9, and 13; the whole module is sized for a
two-core box.
"""

import numpy as np
import pytest

from qdmoment import acceptance
from qdmoment.arith import FactorTable

WORKERS = 2


@pytest.fixture(scope="module")
def table():
    return FactorTable(2_600_000)


def _run(fn, *args):
    res = fn(*args)
    print()
    print(res.line())
    assert res.passed, res.line()
    return res


def test_criterion_01_characters_and_gauss_sums(table):
    _run(acceptance.criterion_1, table)


def test_criterion_02_lvalue_dual_method(table):
    _run(acceptance.criterion_2, table)


def test_criterion_03_nonprimitive_fe(table):
    _run(acceptance.criterion_3, table)


def test_criterion_04_cross_representation(table):
    _run(acceptance.criterion_4, table, WORKERS)


def test_criterion_05_fe_in_s(table):
    _run(acceptance.criterion_5, table, WORKERS)


def test_criterion_06_euler_recurrence(table):
    _run(acceptance.criterion_6, table)


def test_criterion_07_b_decomposition(table):
    _run(acceptance.criterion_7, table)


def test_criterion_08_residue_w1(table):
    _run(acceptance.criterion_8, table, WORKERS)


def test_criterion_09_residue_lemma(table):
    _run(acceptance.criterion_9, table, WORKERS)


def test_criterion_10_euler_products(table):
    _run(acceptance.criterion_10, table)


def test_criterion_11_pole_cancellation():
    _run(acceptance.criterion_11)


def test_criterion_12_main_term(table):
    _run(acceptance.criterion_12, table, WORKERS)


def test_criterion_13_secondary_band(table):
    _run(acceptance.criterion_13, table, WORKERS)


def test_criterion_14_determinism(table):
    _run(acceptance.criterion_14, table)
