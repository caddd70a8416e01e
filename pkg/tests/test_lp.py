import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from unknownlp.lp import (NEG_INF, Feasible, LPInstance, binary_size, d_extreme, dot,
                          linprog, lp_feasible_strict, rat, round_to_precision)


def fm_feasible(constraints, n):
    """Fourier-Motzkin elimination for a.x > b; independent of the simplex."""
    cons = [(list(map(Fraction, a)), Fraction(b)) for a, b in constraints]
    for k in range(n):
        lower, upper, rest = [], [], []
        for a, b in cons:
            (lower if a[k] > 0 else upper if a[k] < 0 else rest).append((a, b))
        for (a1, b1), (a2, b2) in itertools.product(lower, upper):
            s1, s2 = a1[k], -a2[k]
            a = [s2 * u + s1 * v for u, v in zip(a1, a2)]
            rest.append((a, s2 * b1 + s1 * b2))
        cons = rest
    return all(b < 0 for _, b in cons)


def test_rat_and_size():
    assert rat("3/6") == Fraction(1, 2)
    with pytest.raises(ValueError):
        rat(float("inf"))
    inst = LPInstance([[1, 0], [0, 1]], [0, 0])
    assert inst.L == binary_size(inst.A, inst.b)
    assert inst.N == 1


def test_zero_row_rejected_unless_flagged():
    with pytest.raises(ValueError):
        LPInstance([[0, 0]], [1])
    assert LPInstance([[0, 0]], [1], degenerate_ok=True).m == 1


def test_strict_examples():
    res = lp_feasible_strict([((1,), 0), ((-1,), -1)])
    assert res and 0 < res.x[0] < 1
    assert not lp_feasible_strict([((1,), 0), ((-1,), 0)])
    assert lp_feasible_strict([], 3).x == (0, 0, 0)


def test_linprog_statuses():
    assert linprog([1], [[1]], [2]).value == 2
    assert linprog([1], [[-1]], [0]).status == "unbounded"
    assert linprog([1], [[1], [-1]], [-1, 0]).status == "infeasible"


def test_solution_bit_bound():
    rng = random.Random(3)
    checked = 0
    while checked < 20:
        A = [[rng.randint(-15, 15) for _ in range(2)] for _ in range(3)]
        b = [rng.randint(-15, 15) for _ in range(3)]
        if not any(all(v == 0 for v in r) for r in A):
            res = lp_feasible_strict(list(zip(A, b)))
            if res:
                inst = LPInstance(A, b)
                cap = (inst.n * inst.N) ** inst.n
                assert all(abs(v.numerator) <= cap and v.denominator <= cap for v in res.x)
                checked += 1


small_rows = st.lists(st.integers(-6, 6), min_size=1, max_size=3)


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 3).flatmap(lambda n: st.lists(
    st.tuples(st.lists(st.integers(-6, 6), min_size=n, max_size=n), st.integers(-6, 6)),
    min_size=1, max_size=5)))
def test_strict_matches_fourier_motzkin(cons):
    n = len(cons[0][0])
    res = lp_feasible_strict(cons, n)
    assert bool(res) == fm_feasible(cons, n)
    if res:
        assert all(dot(a, res.x) > b for a, b in cons)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 4).flatmap(lambda n: st.lists(
    st.tuples(st.lists(st.integers(-2 ** 15, 2 ** 15), min_size=n, max_size=n),
              st.integers(-2 ** 15, 2 ** 15)), min_size=1, max_size=8)))
def test_simplex_never_hits_cap(cons):
    # IterationCapExceeded would propagate out of lp_feasible_strict
    lp_feasible_strict(cons, len(cons[0][0]))


def test_extreme_examples():
    r = d_extreme([[1], [-1]], [1, 0])
    assert (r.d, r.p, r.support) == (Fraction(1, 2), (Fraction(1, 2),), frozenset({0, 1}))
    r = d_extreme([[1]], [0])
    assert r.d == NEG_INF and r.p is None and not r.support
    r = d_extreme([[1, 0], [-1, 0], [0, 1]], [1, 0, 0])
    assert r.d == Fraction(1, 2) and r.support == {0, 1}
    assert r.p[0] == Fraction(1, 2) and r.p[1] >= Fraction(-1, 2)


def grid_min(A, b, lo=-3, hi=3, step=Fraction(1, 4)):
    pts = [lo + k * step for k in range(int((hi - lo) / step) + 1)]
    n = len(A[0])
    return min(max(bi - dot(a, x) for a, bi in zip(A, b))
               for x in itertools.product(pts, repeat=n))


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.integers(-3, 3), st.integers(-3, 3), st.integers(-3, 3)),
                min_size=3, max_size=4))
def test_extreme_vs_grid(rows):
    A = [r[:2] for r in rows]
    b = [r[2] for r in rows]
    r = d_extreme(A, b)
    if r.d == NEG_INF:
        # unbounded below: the grid value keeps dropping as the box grows
        assert grid_min(A, b, -6, 6, Fraction(1)) < grid_min(A, b, -1, 1, Fraction(1))
        return
    assert max(bi - dot(a, r.p) for a, bi in zip(A, b)) == r.d
    assert r.support == {i for i in range(len(A)) if b[i] - dot(A[i], r.p) == r.d}
    assert r.d <= grid_min(A, b)
    if not lp_feasible_strict(list(zip(A, b))):
        assert r.d >= 0


def test_rounding_examples():
    assert round_to_precision([0.5], 10) == [Fraction(1, 2)]
    assert round_to_precision([0.3333334], 10) == [Fraction(1, 3)]
    assert round_to_precision([3.14159265], 120) == [Fraction(355, 113)]
    with pytest.raises(ValueError):
        round_to_precision([float("nan")], 10)


def test_rounding_matches_enumeration():
    x = Fraction(314159265, 10 ** 8)
    best = min((Fraction(round(x * q), q) for q in range(1, 121)), key=lambda f: abs(f - x))
    assert round_to_precision([x], 120) == [best]


@settings(max_examples=200, deadline=None)
@given(st.fractions(min_value=-100, max_value=100, max_denominator=10 ** 9),
       st.integers(1, 10 ** 4))
def test_rounding_error_bound(x, bound):
    (q,) = round_to_precision([x], bound)
    assert q.denominator <= bound
    assert abs(x - q) <= Fraction(1, q.denominator * bound)
