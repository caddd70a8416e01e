import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from unknownlp.geometry import (ConeH, ConeV, MonteCarloVolume, ResourceBudgetError,
                                UnsupportedShape, canonical_ray, cone_facets,
                                cone_membership, conv_union_rays, generators,
                                normalized_volume, polar_cone)
from unknownlp.lp import dot


def members_equal(c1, c2, pts):
    return all((p in c1) == (p in c2) for p in pts)


def rand_points(rng, dim, k=100, lo=-5, hi=5):
    return [tuple(Fraction(rng.randint(lo, hi)) for _ in range(dim)) for _ in range(k)]


def test_polar_examples():
    h = polar_cone(ConeV(2, [(1, 0)]))
    assert h.halfspaces == ((1, 0),)
    assert (-1, 5) in h and (1, 0) not in h
    full = ConeV(2, [(1, 0), (-1, 0), (0, 1), (0, -1)])
    assert generators(polar_cone(full)).rays == ()
    quad = polar_cone(ConeV(2, [(1, 0), (0, 1)]))
    assert (-1, -2) in quad and (1, -2) not in quad
    # polar of the empty cone is everything
    assert (3, -7) in polar_cone(ConeV(2))


def test_membership_examples():
    c = ConeV(2, [(1, 0), (0, 1)])
    assert cone_membership((1, 1), c)
    assert not cone_membership((-1, 0), c)
    assert cone_membership((2, 1), ConeV(2, [(1, 1), (1, 0)]))
    with pytest.raises(ValueError):
        cone_membership((1, 1, 1), c)


def test_facet_examples():
    assert set(cone_facets(ConeV(2, [(1, 0), (0, 1)])).halfspaces) == {(-1, 0), (0, -1)}
    ray = cone_facets(ConeV(2, [(1, 0)]))
    rng = random.Random(1)
    assert members_equal(ray, ConeV(2, [(1, 0)]), rand_points(rng, 2))
    empty = cone_facets(ConeV(2))
    assert all(p not in empty for p in rand_points(rng, 2) if any(p))


def test_conv_union_examples():
    assert conv_union_rays(ConeV(2), (1, 0)).rays == ((1, 0),)
    c = ConeV(2, [(1, 0), (0, 1)])
    assert conv_union_rays(c, (1, 1)).rays == c.rays
    both = conv_union_rays(ConeV(2, [(1, 0)]), (-1, 1))
    assert len(both.rays) == 2
    with pytest.raises(ValueError):
        conv_union_rays(c, (0, 0))


def test_canonical_ray():
    assert canonical_ray((0, -3, 6)) == (0, -1, 2)


def test_ray_budget():
    rays = [(1, Fraction(k), Fraction(k * k)) for k in range(70)]
    with pytest.raises(ResourceBudgetError):
        cone_facets(ConeV(3, rays))


def test_volumes():
    assert normalized_volume(ConeH(3, [(1, 0, 0)])) == 1
    assert normalized_volume(ConeH(2, [(-1, 0), (0, -1)])) == Fraction(1, 2)
    assert normalized_volume((Fraction(0), Fraction(1, 2))) == Fraction(1, 4)
    with pytest.raises(UnsupportedShape):
        normalized_volume(ConeH(2, [(1, 1), (1, -2)]))
    mc = normalized_volume(ConeH(2, [(-1, 0), (0, -1)]), mode="mc", samples=4000, seed=2)
    assert isinstance(mc, MonteCarloVolume)
    assert abs(mc.estimate - 0.5) < 4 * mc.stderr


vec = lambda d: st.tuples(*[st.integers(-4, 4)] * d).filter(any)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 4).flatmap(lambda d: st.lists(vec(d), min_size=1, max_size=5)),
       st.integers(0, 10 ** 6))
def test_bipolar(rays, seed):
    d = len(rays[0])
    c = ConeV(d, rays)
    pts = rand_points(random.Random(seed), d)
    assert members_equal(c, polar_cone(polar_cone(c)), pts)
    assert members_equal(c, cone_facets(c), pts)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 3).flatmap(lambda d: st.lists(
    st.lists(vec(d), min_size=1, max_size=3), min_size=1, max_size=3)), st.integers(0, 10 ** 6))
def test_polar_of_intersection(cones, seed):
    d = len(cones[0][0])
    hs = [ConeH(d, c) for c in cones]
    meet = ConeH(d, [h for c in hs for h in c.halfspaces])
    union = ConeV(d)
    for c in hs:
        for r in polar_cone(c).rays:
            union = conv_union_rays(union, r)
    # polar of the intersection, computed from its generators
    lhs = polar_cone(generators(meet))
    pts = rand_points(random.Random(seed), d)
    assert members_equal(lhs, union, pts)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 3).flatmap(lambda d: st.tuples(st.lists(vec(d), min_size=1, max_size=4),
                                                     vec(d))), st.integers(0, 10 ** 6))
def test_conv_union_monotone_idempotent(data, seed):
    rays, r = data
    d = len(r)
    c = ConeV(d, rays)
    grown = conv_union_rays(c, r)
    pts = rand_points(random.Random(seed), d, 50)
    assert all(p in grown for p in pts if p in c)
    assert r in grown
    member = rays[0]
    assert members_equal(conv_union_rays(c, member), c, pts)
