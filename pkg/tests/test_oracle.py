from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from unknownlp.lp import LPInstance, dot, lp_feasible_strict
from unknownlp.oracle import (AdversaryCallback, FirstIndex, FurthestOracle,
                              HomogenizedOracle, RandomSeeded, WorstCaseOracle,
                              furthest_indices, furthest_query, homogenize,
                              worst_case_query)

QUAD = LPInstance([[1, 0], [0, 1]], [0, 0])


def test_worst_case_examples():
    assert worst_case_query(QUAD, (1, 1)).feasible
    assert worst_case_query(QUAD, (-1, -1), FirstIndex()).index == 0
    for pol in (FirstIndex(), RandomSeeded(5), AdversaryCallback(lambda x, c: c[-1])):
        assert worst_case_query(QUAD, (-1, 1), pol).index == 0


def test_boundary_counts_as_violated():
    assert worst_case_query(QUAD, (0, 1)).index == 0


def test_adversary_callback_must_pick_violated():
    with pytest.raises(ValueError):
        worst_case_query(QUAD, (-1, 1), AdversaryCallback(lambda x, c: 1))


def test_furthest_examples():
    assert furthest_query(QUAD, (-3, -1)).index == 0
    line = LPInstance([[1], [-1]], [1, 0])
    assert furthest_indices(line, (Fraction(1, 2),)) == [0, 1]
    assert furthest_query(line, (Fraction(1, 2),), FirstIndex()).index == 0
    # (3,4).x > 5 has distance 5/5 = 1 at the origin, beating x1 > 1/2 at 1/2
    inst = LPInstance([[1, 0], [3, 4]], [Fraction(1, 2), 5])
    assert furthest_query(inst, (0, 0)).index == 1


def test_zero_row_is_configuration_error():
    inst = LPInstance([[0, 0], [1, 0]], [1, 0], degenerate_ok=True)
    with pytest.raises(ValueError):
        furthest_query(inst, (0, 0))


def test_homogenize_examples():
    inner = WorstCaseOracle(LPInstance([[1]], [1]))
    inst, h = homogenize(LPInstance([[1]], [1]), inner)
    assert inst.m == 2 and inst.n == 2
    assert h.query((5, 0)).index == 1
    assert h.query((5, -2)).index == 1
    assert h.query((3, 2)).feasible
    assert inner.queries == 1 and h.queries == 3


def test_transcript_lines(tmp_path):
    o = WorstCaseOracle(QUAD)
    o.query((Fraction(1, 2), -1))
    o.query((1, 1))
    assert list(o.transcript.lines()) == ["1/2 -1/1 -> ViolatedIndex(1)", "1/1 1/1 -> Feasible"]
    p = tmp_path / "t.log"
    o.transcript.dump(p)
    assert p.read_text().count("\n") == 2


rows = st.lists(st.tuples(st.integers(-5, 5), st.integers(-5, 5), st.integers(-5, 5))
                .filter(lambda r: r[0] or r[1]), min_size=1, max_size=5)
points = st.tuples(st.fractions(-5, 5, max_denominator=7), st.fractions(-5, 5, max_denominator=7))


@settings(max_examples=200, deadline=None)
@given(rows, points, st.integers(0, 100))
def test_sound_and_complete(rs, x, seed):
    inst = LPInstance([r[:2] for r in rs], [r[2] for r in rs])
    for o in (WorstCaseOracle(inst, RandomSeeded(seed)), FurthestOracle(inst, RandomSeeded(seed))):
        reply = o.query(x)
        if reply.feasible:
            assert inst.satisfied_strictly(x)
        else:
            assert dot(inst.A[reply.index], x) <= inst.b[reply.index]
        assert o.queries == len(o.transcript) == 1


@settings(max_examples=200, deadline=None)
@given(rows, points, st.integers(1, 9))
def test_furthest_scale_invariance(rs, x, lam):
    inst = LPInstance([r[:2] for r in rs], [r[2] for r in rs])
    scaled = LPInstance([(lam * r[0], lam * r[1]) for r in rs], [lam * r[2] for r in rs])
    assert furthest_indices(inst, x) == furthest_indices(scaled, x)
    top = furthest_indices(inst, x)
    if len(top) == 1:
        picks = {furthest_query(inst, x, RandomSeeded(s)).index for s in range(4)}
        assert picks == set(top)


@settings(max_examples=100, deadline=None)
@given(rows, points, st.fractions(-3, 3, max_denominator=5))
def test_homogenized_feasibility_matches(rs, x, y):
    inst = LPInstance([r[:2] for r in rs], [r[2] for r in rs])
    hom, h = homogenize(inst, WorstCaseOracle(inst))
    z = tuple(x) + (y,)
    assert h.query(z).feasible == hom.satisfied_strictly(z)
    assert bool(lp_feasible_strict(inst.constraints())) == bool(lp_feasible_strict(hom.constraints()))
