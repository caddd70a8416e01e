"""Cyclic-polytope instance family and the adversary that defers every pocket.

The dual of the cyclic polytope C(n, m) has one vertex per facet of C(n, m).
Cutting a thin pocket off each vertex gives k pairwise disjoint candidate
feasible regions; the adversary answers as if every pocket the algorithm has
not yet touched might still be the hidden one.
"""

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .lp import LPInstance, dot, lp_feasible_strict, rat_vec
from .oracle import FEASIBLE, Transcript, violated


@dataclass(frozen=True)
class CyclicPolytope:
    n: int
    m: int
    params: tuple
    facets: tuple

    def vertex(self, i):
        t = self.params[i]
        return tuple(Fraction(t) ** e for e in range(1, self.n + 1))

    @property
    def vertices(self):
        return [self.vertex(i) for i in range(self.m)]


def gale_evenness(n, m):
    """n-subsets of range(m) satisfying Gale's evenness condition."""
    out = []
    for S in itertools.combinations(range(m), n):
        inside = set(S)
        gaps = [j for j in range(m) if j not in inside]
        if all(sum(1 for s in S if a < s < b) % 2 == 0 for a, b in zip(gaps, gaps[1:])):
            out.append(S)
    return out


def cyclic_polytope(n, m):
    if n < 2 or m <= n:
        raise ValueError("need m > n >= 2")
    return CyclicPolytope(n, m, tuple(range(1, m + 1)), tuple(gale_evenness(n, m)))


def ubt_count(n, m):
    """Facet count of C(n, m), the most any n-polytope with m vertices has."""
    if m <= n:
        raise ValueError("need m > n")
    return math.comb(m - (n + 1) // 2, m - n) + math.comb(m - (n + 2) // 2, m - n)


def solve_linear(M, rhs):
    """Exact Gaussian elimination for a square nonsingular system."""
    k = len(M)
    T = [list(map(Fraction, row)) + [Fraction(r)] for row, r in zip(M, rhs)]
    for c in range(k):
        p = next((r for r in range(c, k) if T[r][c] != 0), None)
        if p is None:
            raise ValueError("singular system")
        T[c], T[p] = T[p], T[c]
        for r in range(k):
            if r != c and T[r][c] != 0:
                f = T[r][c] / T[c][c]
                T[r] = [x - f * y for x, y in zip(T[r], T[c])]
    return tuple(T[r][k] / T[r][r] for r in range(k))


def _det(M):
    M = [list(map(Fraction, row)) for row in M]
    k, det = len(M), Fraction(1)
    for c in range(k):
        p = next((r for r in range(c, k) if M[r][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            M[c], M[p] = M[p], M[c]
            det = -det
        det *= M[c][c]
        for r in range(c + 1, k):
            f = M[r][c] / M[c][c]
            M[r] = [x - f * y for x, y in zip(M[r], M[c])]
    return det


def brute_force_facets(points):
    """n-subsets whose affine hull leaves every other point strictly on one side."""
    n = len(points[0])
    out = []
    for S in itertools.combinations(range(len(points)), n):
        base = points[S[0]]
        rows = [tuple(p - q for p, q in zip(points[s], base)) for s in S[1:]]
        signs = set()
        for j, pt in enumerate(points):
            if j in S:
                continue
            d = _det(rows + [tuple(p - q for p, q in zip(pt, base))])
            signs.add((d > 0) - (d < 0))
        if len(signs) == 1 and 0 not in signs:
            out.append(S)
    return out


@dataclass
class AdversarialFamily:
    n: int
    m: int
    center: tuple        # centroid of C(n, m); the dual is taken about it, so 0 is inside P
    normals: list        # P = {y : normals[j].y <= 1}
    vertices: list       # vertex of P for each facet of C(n, m)
    facets: list
    pocket_normals: list  # H'_i = {y : pocket_normals[i].y > n - delta}
    delta: Fraction

    @property
    def k(self):
        return len(self.facets)

    @property
    def pocket_offset(self):
        return self.n - self.delta

    def base_constraints(self):
        """P' as strict constraints a.y > b, indices 0 .. m-1."""
        return [(tuple(-v for v in a), Fraction(-1)) for a in self.normals]

    def instance(self, i):
        """LP_i: the m base constraints plus the pocket constraint at index m."""
        rows = self.base_constraints() + [(self.pocket_normals[i], self.pocket_offset)]
        return LPInstance([a for a, _ in rows], [b for _, b in rows])

    def in_base(self, y):
        return all(dot(a, y) > b for a, b in self.base_constraints())

    def in_pocket(self, i, y):
        return self.in_base(y) and dot(self.pocket_normals[i], y) > self.pocket_offset

    def to_json(self):
        def s(q):
            return "%d/%d" % (q.numerator, q.denominator)

        return {"n": self.n, "m": self.m, "k": self.k, "delta": s(self.delta),
                "center": [s(v) for v in self.center],
                "A": [[s(v) for v in a] for a, _ in self.base_constraints()],
                "b": [s(b) for _, b in self.base_constraints()],
                "pockets": [[s(v) for v in c] for c in self.pocket_normals],
                "facets": [list(F) for F in self.facets]}


def pockets_certified(fam):
    """Every pocket nonempty and every pair disjoint, by exact LP."""
    base = fam.base_constraints()
    for c in fam.pocket_normals:
        if not lp_feasible_strict(base + [(c, fam.pocket_offset)]):
            return False
    for i, j in itertools.combinations(range(fam.k), 2):
        sys = base + [(fam.pocket_normals[i], fam.pocket_offset),
                      (fam.pocket_normals[j], fam.pocket_offset)]
        if lp_feasible_strict(sys):
            return False
    return True


def build_adversarial_family(n, m, delta=Fraction(1, 2 ** 8), retries=16):
    poly = cyclic_polytope(n, m)
    pts = poly.vertices
    center = tuple(sum(p[e] for p in pts) / m for e in range(n))
    normals = [tuple(p - c for p, c in zip(pt, center)) for pt in pts]
    verts, pocket = [], []
    for F in poly.facets:
        verts.append(solve_linear([normals[i] for i in F], [1] * n))
        # sum of the normals tight at the vertex: maximised over P only there
        pocket.append(tuple(sum(normals[i][e] for i in F) for e in range(n)))
    delta = Fraction(delta)
    for _ in range(retries):
        fam = AdversarialFamily(n, m, center, normals, verts, list(poly.facets), pocket, delta)
        if pockets_certified(fam):
            return fam
        delta /= 2
    raise RuntimeError("no certified pocket depth after %d halvings" % retries)


@dataclass
class AdversaryState:
    queries: int = 0
    touched: set = field(default_factory=set)
    committed: int = None


class AdversaryOracle:
    """Worst-case oracle whose hidden instance is chosen as late as possible.

    Until the k-th query every point of P' gets index m, and a pocket that was
    queried is crossed off. At the k-th query the adversary commits to the
    lowest-numbered untouched pocket and answers as that LP from then on.
    """

    def __init__(self, family, seed=0):
        self.family = family
        self.rng = random.Random(seed)
        self.state = AdversaryState()
        self.transcript = Transcript(seed)
        self.m, self.n = family.m + 1, family.n
        self.L = max(family.instance(i).L for i in range(family.k))

    def _base_violation(self, y):
        bad = [j for j, (a, b) in enumerate(self.family.base_constraints()) if dot(a, y) <= b]
        return self.rng.choice(bad) if bad else None

    def query(self, y):
        y = rat_vec(y)
        reply = adversary_query(self.family, y, self.state, self._base_violation)
        self.transcript.append(y, reply)
        return reply

    @property
    def queries(self):
        return len(self.transcript)

    def surviving(self):
        if self.state.committed is not None:
            return [self.state.committed]
        return [i for i in range(self.family.k) if i not in self.state.touched]


def adversary_query(family, y, state, base_violation=None):
    fam = family
    state.queries += 1
    if state.committed is None and state.queries >= fam.k:
        state.committed = min(i for i in range(fam.k) if i not in state.touched)
    if base_violation is not None:
        j = base_violation(y)
    else:
        j = next((j for j, (a, b) in enumerate(fam.base_constraints()) if dot(a, y) <= b), None)
    if j is not None:
        return violated(j)
    if state.committed is not None:
        if dot(fam.pocket_normals[state.committed], y) > fam.pocket_offset:
            return FEASIBLE
        return violated(fam.m)
    for i in range(fam.k):
        if dot(fam.pocket_normals[i], y) > fam.pocket_offset:
            state.touched.add(i)
    return violated(fam.m)


def replay_consistent(family, transcript, i):
    """True iff every reply in the transcript is a valid answer for LP_i."""
    inst = family.instance(i)
    for y, reply in transcript:
        bad = [j for j, (a, b) in enumerate(zip(inst.A, inst.b)) if dot(a, y) <= b]
        if reply.feasible:
            if bad:
                return False
        elif reply.index not in bad:
            return False
    return True


@dataclass(frozen=True)
class LowerBoundRun:
    seed: int
    queries: int
    committed: int
    verdict_ok: bool


@dataclass(frozen=True)
class LowerBoundRow:
    n: int
    m: int
    k: int
    runs: tuple

    @property
    def min_queries(self):
        return min(r.queries for r in self.runs)

    @property
    def mean_queries(self):
        return sum(r.queries for r in self.runs) / len(self.runs)

    def line(self, sep="\t"):
        return sep.join(map(str, (self.n, self.m, self.k, self.min_queries,
                                  "%.1f" % self.mean_queries)))


class SolverDisagrees(AssertionError):
    pass


def run_lowerbound_experiment(solver, n, m, seeds=(0,), family=None):
    """Run ``solver(oracle) -> point or None`` against the adversary per seed.

    The family is feasible whatever pocket survives, so ``None`` or a point
    outside the committed pocket is a solver bug.
    """
    fam = family or build_adversarial_family(n, m)
    runs = []
    for seed in seeds:
        oracle = AdversaryOracle(fam, seed)
        x = solver(oracle)
        committed = oracle.state.committed
        ok = x is not None and committed is not None and fam.in_pocket(committed, rat_vec(x))
        if not ok:
            raise SolverDisagrees("seed %d: solver returned %r, committed pocket %r"
                                  % (seed, x, committed))
        if oracle.queries < fam.k - 1:
            raise AssertionError("seed %d: only %d queries, floor %d"
                                 % (seed, oracle.queries, fam.k - 1))
        runs.append(LowerBoundRun(seed, oracle.queries, committed, ok))
    return LowerBoundRow(n, m, fam.k, tuple(runs))


def covering_solver(**budget):
    """Adapter running the covering algorithm on an adversary oracle."""
    from .worstcase import solve_worstcase

    def run(oracle):
        result, _ = solve_worstcase(oracle, **budget)
        return result.x if result else None

    return run


def pocket_sweep_solver(oracle):
    """Reference solver that queries a point deep in each pocket in turn.

    It knows the family's geometry, so it isolates the adversary's deferral:
    no strategy can beat it by more than the floor.
    """
    fam = oracle.family
    for i in range(fam.k):
        x = pocket_point(fam, i)
        if oracle.query(x).feasible:
            return x
    return None


def pocket_point(fam, i):
    """An interior point of pocket i on the segment from its vertex to 0."""
    v = fam.vertices[i]
    for e in range(1, 64):
        y = tuple(vv * (1 - Fraction(1, 2 ** e)) for vv in v)
        if fam.in_pocket(i, y):
            return y
    raise RuntimeError("pocket %d has no point on the segment to the origin" % i)
