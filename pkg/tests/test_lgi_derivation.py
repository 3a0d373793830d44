"""Symbolic check of the Leggett-Garg correlator used by ``lgi_value``."""

import itertools
from fractions import Fraction as F

import sympy as sp

from threebox.classicality import lgi_value
from threebox.stats import stats_from_tables

BOXES = (1, 2, 3)
RESULTS = ("A", "~A")


def _q_value(box, result):
    # +1 before Bob, +1 for boxes 1 or 2 at Bob's step, +1 for A at the end
    q1, q2, q3 = 1, (-1 if box in (1, 2) else 1), (1 if result == "A" else -1)
    return q1 * q2 + q2 * q3 + q1 * q3


def _joint_symbols():
    return {(b, r): sp.Symbol(f"p_{b}_{r.replace('~', 'not')}", nonnegative=True) for b in BOXES for r in RESULTS}


def test_value_table():
    values = {(b, r): _q_value(b, r) for b in BOXES for r in RESULTS}
    assert values[(3, "A")] == 3
    assert all(v == -1 for k, v in values.items() if k != (3, "A"))


def test_expectation_reduces_to_box3_and_a():
    p = _joint_symbols()
    mean = sum(_q_value(b, r) * p[(b, r)] for b, r in p)
    expected = 3 * p[(3, "A")] - sum(v for k, v in p.items() if k != (3, "A"))
    assert sp.simplify(mean - expected) == 0


def test_bounds_hold_for_every_distribution():
    values = [_q_value(b, r) for b, r in itertools.product(BOXES, RESULTS)]
    assert min(values) == -1 and max(values) == 3


def test_non_invasive_substitution_gives_observable_form():
    p = _joint_symbols()
    m1a, m1n, m2a, m2n, pna = sp.symbols("m1a m1n m2a m2n pna", nonnegative=True)
    # non-invasiveness identifies the hidden joint with Bob's observed one
    subs = {
        p[(1, "A")]: m1a, p[(1, "~A")]: m1n,
        p[(2, "A")]: m2a, p[(2, "~A")]: m2n,
        p[(3, "A")]: pna - m1a - m2a,
        p[(3, "~A")]: (1 - pna) - m1n - m2n,
    }
    mean = sum(_q_value(b, r) * p[(b, r)] for b, r in p).subs(subs)
    assert sp.expand(mean - (4 * (pna - m1a - m2a) - 1)) == 0


def test_library_matches_symbolic_form():
    m1a, m2a, pna = sp.Rational(1, 9), sp.Rational(1, 9), sp.Rational(1, 9)
    symbolic = 4 * (pna - m1a - m2a) - 1
    t1 = {("1", "A"): F(1, 9), ("~1", "A"): F(0), ("1", "~A"): F(2, 9), ("~1", "~A"): F(2, 3)}
    t2 = {("2", "A"): F(1, 9), ("~2", "A"): F(0), ("2", "~A"): F(2, 9), ("~2", "~A"): F(2, 3)}
    value = lgi_value(stats_from_tables(t1, t2, F(1, 9)))
    assert sp.Rational(value.numerator, value.denominator) == symbolic == sp.Rational(-13, 9)


def test_violation_iff_pps_condition():
    # 4x - 1 < -1 exactly when x = P_N(A) - P_M1(A,1) - P_M2(A,2) < 0
    x = sp.Symbol("x", real=True)
    assert sp.solve_univariate_inequality(4 * x - 1 < -1, x) == (x < 0)
