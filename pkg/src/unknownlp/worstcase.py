"""Convex-hull-covering solver for the worst-case oracle.

Angles are kept as exact dyadic rationals in units of pi. The direction for
an angle is a fixed-precision rational approximation of (cos, sin), cached so
that a cylinder boundary and the subspace searched on it are the very same
rational vectors; every membership decision is therefore exact.
"""

import math
import time
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .geometry import (ConeV, ResourceBudgetError, _double_description,
                       cone_facets, conv_union_rays, is_zero)
from .lp import dot, lp_feasible_strict, rat_vec
from .oracle import HomogenizedOracle

MAX_CHECK_DIM = 4
_DIRECTIONS = {}


def _to_fraction(v):
    sign, man, exp, _ = v._mpf_
    man = -int(man) if sign else int(man)
    return Fraction(man * 2 ** exp) if exp >= 0 else Fraction(man, 2 ** -exp)


def direction(theta):
    """Rational (cos, sin) of theta * pi, exact at multiples of pi/2."""
    theta = Fraction(theta) % 2
    hit = _DIRECTIONS.get(theta)
    if hit is not None:
        return hit
    if theta >= 1:
        c, s = direction(theta - 1)
        out = (-c, -s)
    elif theta == 0:
        out = (Fraction(1), Fraction(0))
    elif theta == Fraction(1, 2):
        out = (Fraction(0), Fraction(1))
    else:
        bits = theta.denominator.bit_length() + 64
        with mpmath.workprec(bits):
            t = mpmath.pi * mpmath.mpf(theta.numerator) / theta.denominator
            out = (_to_fraction(mpmath.cos(t)), _to_fraction(mpmath.sin(t)))
    _DIRECTIONS[theta] = out
    return out


def cutoff(n, L):
    """Cylinders narrower than this (in units of pi) cannot hold a feasible cone."""
    return Fraction(1, 2 ** ((2 * n + 3) * L))


def iteration_bound(m, n, L):
    total = 1
    for d in range(n + 1):
        total *= sum(math.comb(m, i) for i in range(d + 1)) * (2 * n + 3) * L
    return total


class Found(Exception):
    def __init__(self, x):
        self.x = x


@dataclass
class Solution:
    x: tuple

    def __bool__(self):
        return True


@dataclass
class NoSolution:
    def __bool__(self):
        return False


@dataclass
class RunStats:
    queries: int = 0
    max_depth: int = 0
    cylinders_created: int = 0
    cylinders_removed: int = 0
    skipped_subspaces: int = 0
    wall_time: float = 0.0


class RegionState:
    """Region(i)* for every index, shared across recursion levels."""

    def __init__(self, m, dim):
        self.m, self.dim = m, dim
        self.regions = [ConeV(dim) for _ in range(m)]
        self._facets = {}
        self._restricted = {}

    def facets(self, i):
        c = self.regions[i]
        hit = self._facets.get(i)
        if hit is None or hit[0] is not c:
            hit = (c, cone_facets(c).halfspaces)
            self._facets[i] = hit
        return hit[1]


def update_region(state, i, x):
    if not 0 <= i < state.m:
        raise IndexError("index %r out of range" % i)
    state.regions[i] = conv_union_rays(state.regions[i], x)


@dataclass(frozen=True)
class SectorCylinder:
    basis: tuple
    alpha: Fraction
    beta: Fraction

    @property
    def width(self):
        return self.beta - self.alpha


def _restricted(state, basis):
    """Facet normals of each nonempty Region(i)*, in subspace coordinates."""
    out = []
    for i in range(state.m):
        c = state.regions[i]
        if not c.rays:
            continue
        hit = state._restricted.get((i, id(basis)))
        if hit is None or hit[0] is not c or hit[1] is not basis:
            rows = [tuple(dot(h, b) for b in basis) for h in state.facets(i)]
            hit = [c, basis, rows, None]
            state._restricted[(i, id(basis))] = hit
        out.append(hit)
    return out


def _plane_generators(entry):
    """Boundary rays of a restricted cone in a 2-D subspace, cached."""
    if entry[3] is None:
        rays, lin = _double_description([g for g in entry[2] if not is_zero(g)], 2)
        entry[3] = list(rays) + list(lin) + [tuple(-v for v in l) for l in lin]
    return entry[3]


def _in_cone(rows, x):
    return all(dot(g, x) <= 0 for g in rows)


def _cross(u, v):
    return u[0] * v[1] - u[1] * v[0]


def _contained_2d(cyl, entries):
    ua, ub = direction(cyl.alpha), direction(cyl.beta)
    cones = [e[2] for e in entries]
    cuts = []
    for e in entries:
        for r in _plane_generators(e):
            if _cross(ua, r) > 0 and (cyl.width == 1 or _cross(r, ub) > 0):
                cuts.append(r)
    # sort strictly inside the open arc (width <= pi) by angle
    ordered = []
    for r in cuts:
        k = 0
        while k < len(ordered) and _cross(ordered[k], r) > 0:
            k += 1
        if k < len(ordered) and _cross(ordered[k], r) == 0:
            continue
        ordered.insert(k, r)
    if cyl.width == 1:
        ends = [ua] + ordered + [(-ua[0], -ua[1])]
    else:
        ends = [ua] + ordered + [ub]
    for u, v in zip(ends, ends[1:]):
        if _cross(u, v) > 0:
            probe = (u[0] + v[0], u[1] + v[1])
        else:
            probe = (-u[1], u[0])
        if not any(_in_cone(rows, probe) for rows in cones):
            return False
    return True


def _uncovered_witness(strict, cones, start=0):
    """Depth-first search over facet sign choices for a point of the open
    polyhedral cone ``strict`` outside every closed cone in ``cones``."""
    res = lp_feasible_strict([(g, 0) for g in strict])
    if not res:
        return None
    w = res.x
    for j in range(start, len(cones)):
        if _in_cone(cones[j], w):
            break
    else:
        return w
    for g in cones[j]:
        if is_zero(g):
            continue
        found = _uncovered_witness(strict + [g], cones, j + 1)
        if found is not None:
            return found
    return None


def cylinder_contained(cyl, state):
    """True iff the open sector cylinder lies in the union of Region(i)*."""
    d = len(cyl.basis)
    if d > MAX_CHECK_DIM:
        raise ResourceBudgetError("containment check capped at dimension %d" % MAX_CHECK_DIM)
    entries = _restricted(state, cyl.basis)
    if not entries:
        return False
    if d == 2:
        return _contained_2d(cyl, entries)
    cones = [e[2] for e in entries]
    ua, ub = direction(cyl.alpha), direction(cyl.beta)
    pad = (0,) * (d - 2)
    strict = [(-ua[1], ua[0]) + pad]
    if cyl.width < 1:
        strict.append((ub[1], -ub[0]) + pad)
    return _uncovered_witness(strict, cones) is None


def _rotate(basis, gamma):
    c, s = direction(gamma)
    b1 = tuple(c * x + s * y for x, y in zip(basis[0], basis[1]))
    return (b1,) + tuple(basis[2:])


class CoveringSolver:
    """Algorithm state for one run over the homogeneous system Ax > 0."""

    def __init__(self, oracle, m, n, L, max_queries=None, max_seconds=None):
        self.oracle, self.m, self.n, self.L = oracle, m, n, L
        self.state = RegionState(m, n)
        self.limit = cutoff(n, L)
        self.max_queries, self.max_seconds = max_queries, max_seconds
        self.stats = RunStats()
        self._t0 = None

    def _query(self, x):
        if self.max_queries is not None and self.stats.queries >= self.max_queries:
            raise ResourceBudgetError("query budget %d exhausted" % self.max_queries)
        if self.max_seconds is not None and time.perf_counter() - self._t0 > self.max_seconds:
            raise ResourceBudgetError("time budget %.1fs exhausted" % self.max_seconds)
        self.stats.queries += 1
        return self.oracle.query(x)

    def run(self, basis=None):
        self._t0 = time.perf_counter()
        if basis is None:
            basis = tuple(tuple(Fraction(int(i == j)) for j in range(self.n))
                          for i in range(self.n))
        try:
            self.search(basis, 1)
            result = NoSolution()
        except Found as hit:
            result = Solution(hit.x)
        finally:
            self.stats.wall_time = time.perf_counter() - self._t0
        return result

    def search(self, basis, depth):
        """AlgUnknownLP on span(basis); raises Found or returns normally (NO)."""
        self.stats.max_depth = max(self.stats.max_depth, depth)
        if len(basis) == 1:
            b = basis[0]
            answers = []
            for x in (b, tuple(-v for v in b)):
                reply = self._query(x)
                if reply.feasible:
                    raise Found(x)
                answers.append((reply.index, x))
            for i, x in answers:
                update_region(self.state, i, x)
            return
        self.search(_rotate(basis, 0), depth + 1)
        searched = {Fraction(0)}
        cylinders = [(Fraction(0), Fraction(2))]
        self.stats.cylinders_created += 1
        while cylinders:
            alpha, beta = max(cylinders, key=lambda ab: (ab[1] - ab[0], -ab[0]))
            if beta - alpha < self.limit:
                return
            gamma = (alpha + beta) / 2
            if gamma % 1 in searched:
                self.stats.skipped_subspaces += 1
            else:
                self.search(_rotate(basis, gamma), depth + 1)
                searched.add(gamma % 1)
            cylinders.remove((alpha, beta))
            cylinders += [(alpha, gamma), (gamma, beta)]
            self.stats.cylinders_created += 2
            kept = []
            for a, b in cylinders:
                if cylinder_contained(SectorCylinder(basis, a, b), self.state):
                    self.stats.cylinders_removed += 1
                else:
                    kept.append((a, b))
            cylinders = kept
        return


def alg_unknown_lp(basis, state, oracle, n, L, **budget):
    """Run AlgUnknownLP on span(basis) sharing ``state``."""
    solver = CoveringSolver(oracle, state.m, n, L, **budget)
    solver.state = state
    return solver.run(tuple(rat_vec(b) for b in basis))


def solve_homogeneous(oracle, m, n, L, **budget):
    solver = CoveringSolver(oracle, m, n, L, **budget)
    return solver.run(), solver


def solve_worstcase(oracle, **budget):
    """Homogenize, run the covering algorithm on R^(n+1), map back x / y."""
    h = HomogenizedOracle(oracle)
    result, solver = solve_homogeneous(h, h.m, h.n, h.L, **budget)
    if result:
        z = result.x
        y = z[-1]
        result = Solution(tuple(v / y for v in z[:-1]))
    return result, solver


def solve_2d(oracle, m, L, max_queries=None):
    """Warm-up solver for a homogeneous system in the plane.

    Queries the middle of the widest arc not yet covered by the Region(i)*
    sectors until some query is feasible or every arc is too narrow.
    """
    state = RegionState(m, 2)
    plane = ((Fraction(1), Fraction(0)), (Fraction(0), Fraction(1)))
    limit = cutoff(2, L)
    angles = []
    queries = 0
    while True:
        if not angles:
            arcs = [(Fraction(0), Fraction(2))]
        else:
            pts = sorted(angles)
            arcs = list(zip(pts, pts[1:])) + [(pts[-1], pts[0] + 2)]
            cones = [e[2] for e in _restricted(state, plane)]
            open_arcs = []
            for a, b in arcs:
                probe = direction((a + b) / 2)
                if not any(_in_cone(rows, probe) for rows in cones):
                    open_arcs.append((a, b))
            arcs = open_arcs
        if not arcs:
            return NoSolution(), queries
        alpha, beta = max(arcs, key=lambda ab: (ab[1] - ab[0], -ab[0]))
        if (beta - alpha) < limit:
            return NoSolution(), queries
        if max_queries is not None and queries >= max_queries:
            raise ResourceBudgetError("query budget %d exhausted" % max_queries)
        gamma = ((alpha + beta) / 2) % 2
        x = direction(gamma)
        reply = oracle.query(x)
        queries += 1
        if reply.feasible:
            return Solution(x), queries
        update_region(state, reply.index, x)
        angles.append(gamma)
