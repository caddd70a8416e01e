"""Ellipsoid search for a hidden LP seen through the furthest oracle.

The hidden point is (a_i, b_i) with every row scaled to unit Euclidean norm,
flattened row by row into R^(m(n+1)) (or R^(mn) for Ax > 0). The center of
the current ellipsoid is a rational candidate (A', b'). Every cut comes from
a query point q and the oracle's reply r: the hidden values
v_k(q) = b_k - a_k.q satisfy v_r(q) >= 0 and v_r(q) >= v_k(q) for all k, so
whenever the candidate disagrees at q we get a halfspace holding the hidden
point but not the center.
"""

import itertools
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from .geometry import ResourceBudgetError
from .lp import (NegInfinity, d_extreme, dot, linprog, lp_feasible_strict,
                 rat_vec, round_to_precision)


class PrecisionExhausted(RuntimeError):
    pass


class NonRecoverable(RuntimeError):
    pass


class DegenerateInput(ValueError):
    pass


class FeasibleFound(Exception):
    """An oracle reply of Feasible; carries the point."""

    def __init__(self, x):
        self.x = x


class _Cut(Exception):
    def __init__(self, g, h=Fraction(0)):
        self.g, self.h = g, h


# ---------------------------------------------------------------- ellipsoid

def _mp_to_fraction(v):
    if not isinstance(v, mpmath.mpf):
        v = mpmath.mpf(v)
    sign, man, exp, _ = v._mpf_
    man = -int(man) if sign else int(man)
    return Fraction(man * 2 ** exp) if exp >= 0 else Fraction(man, 2 ** -exp)


def _mpf(q):
    q = Fraction(q)
    return mpmath.mpf(q.numerator) / q.denominator


class Ellipsoid:
    """E = {c + J u : |u| <= 1}, i.e. shape P = J J^T.

    Center and factor are mpmath numbers at ``prec`` bits; keeping the factor
    instead of P keeps the shape positive definite by construction. The
    center is handed out as exact dyadic Fractions.
    """

    def __init__(self, center, J, prec=128):
        self.prec = prec
        with mpmath.workprec(prec):
            self._c = [_mpf(v) if isinstance(v, (int, Fraction)) else mpmath.mpf(v) for v in center]
            self.J = [[_mpf(v) if isinstance(v, (int, Fraction)) else mpmath.mpf(v) for v in row]
                      for row in J]

    @classmethod
    def box(cls, halfwidths, prec=128):
        """Axis-aligned ellipsoid through the corners of the given box."""
        d = len(halfwidths)
        with mpmath.workprec(prec):
            root = mpmath.sqrt(d)
            J = [[root * _mpf(halfwidths[i]) if i == j else mpmath.mpf(0) for j in range(d)]
                 for i in range(d)]
        return cls([0] * d, J, prec)

    @property
    def dim(self):
        return len(self._c)

    @property
    def center(self):
        return [_mp_to_fraction(v) for v in self._c]

    def log2_halfwidth(self):
        """log2 of the largest half-width of the bounding box."""
        with mpmath.workprec(self.prec):
            top = max(mpmath.sqrt(mpmath.fsum(v * v for v in row)) for row in self.J)
            return float(mpmath.log(top, 2)) if top > 0 else float("-inf")

    def log_volume(self):
        with mpmath.workprec(self.prec):
            det = mpmath.det(mpmath.matrix(self.J))
            if det == 0:
                raise PrecisionExhausted("ellipsoid factor degenerated")
            return float(mpmath.log(abs(det)))

    def contains(self, z):
        with mpmath.workprec(self.prec):
            diff = mpmath.matrix([_mpf(v) - c for v, c in zip(z, self._c)])
            u = mpmath.lu_solve(mpmath.matrix(self.J), diff)
            return float(mpmath.fsum(x * x for x in u)) <= 1 + 1e-9


def ellipsoid_cut(e, g, h=0):
    """Minimal ellipsoid containing e & {z : g.z <= h}.

    Returns e itself when the halfspace contains e. Raises ValueError when the
    halfspace misses e entirely.
    """
    d = e.dim
    if not any(Fraction(v) for v in g):
        raise ValueError("zero cut normal")
    with mpmath.workprec(e.prec):
        gm = [_mpf(v) for v in g]
        a = [mpmath.fsum(e.J[i][k] * gm[i] for i in range(d)) for k in range(d)]
        root = mpmath.sqrt(mpmath.fsum(v * v for v in a))
        if root == 0:
            raise PrecisionExhausted("cut normal vanishes in the ellipsoid metric")
        excess = mpmath.fsum(x * y for x, y in zip(gm, e._c)) - _mpf(h)
        alpha = excess / root
        if alpha >= 1:
            raise ValueError("halfspace misses the ellipsoid")
        if alpha <= mpmath.mpf(-1) / d:
            return e
        u = [v / root for v in a]
        Ju = [mpmath.fsum(e.J[i][k] * u[k] for k in range(d)) for i in range(d)]
        if d == 1:
            # the kept part of an interval is again an interval
            tau, shrink, delta = (1 + alpha) / 2, mpmath.mpf(0), ((1 - alpha) / 2) ** 2
        else:
            tau = (1 + d * alpha) / (d + 1)
            sigma = 2 * (1 + d * alpha) / ((d + 1) * (1 + alpha))
            delta = mpmath.mpf(d * d) * (1 - alpha * alpha) / (d * d - 1)
            shrink = 1 - mpmath.sqrt(1 - sigma)
        rd = mpmath.sqrt(delta)
        center = [c - tau * v for c, v in zip(e._c, Ju)]
        J = [[rd * (e.J[i][k] - shrink * Ju[i] * u[k]) for k in range(d)] for i in range(d)]
    return Ellipsoid(center, J, e.prec)


# ---------------------------------------------------------------- diagrams

@dataclass
class VorCell:
    index: int
    inequalities: list  # (j, lhs, rhs): lhs.x <= rhs, i.e. cell i beats j
    empty: bool = False


def values(rows, offs, x):
    return [o - dot(a, x) for a, o in zip(rows, offs)]


def argmax_set(rows, offs, x, among=None):
    vals = values(rows, offs, x)
    idx = range(len(rows)) if among is None else among
    top = max(vals[i] for i in idx)
    return {i for i in idx if vals[i] == top}, vals


def build_gvor(A, b):
    """Cells {x : b_i - a_i.x >= b_j - a_j.x for all j}, emptiness by LP."""
    A = [rat_vec(r) for r in A]
    b = rat_vec(b)
    m = len(A)
    if m < 2:
        raise ValueError("need at least two sites")
    cells = []
    for i in range(m):
        ineq = [(j, tuple(x - y for x, y in zip(A[i], A[j])), b[i] - b[j])
                for j in range(m) if j != i]
        res = linprog([0] * len(A[i]), [q[1] for q in ineq], [q[2] for q in ineq])
        cells.append(VorCell(i, ineq, res.status == "infeasible"))
    return cells


@dataclass
class Confirmed:
    probes: int = 0

    def __bool__(self):
        return True


@dataclass
class SeparatingHyperplane:
    g: tuple
    h: Fraction = Fraction(0)
    probes: int = 0

    def __bool__(self):
        return False


def _orthogonal_complement(w):
    """Exact orthogonal basis of w^perp, each vector scaled to max-norm 1."""
    n = len(w)
    basis = []
    for k in range(n):
        v = [Fraction(int(k == j)) for j in range(n)]
        for u in [w] + basis:
            uu = dot(u, u)
            if uu:
                f = dot(v, u) / uu
                v = [x - f * y for x, y in zip(v, u)]
        if any(v):
            top = max(abs(x) for x in v)
            basis.append([x / top for x in v])
    return basis[:n - 1]


class Prober:
    """Query wrapper comparing oracle replies with the candidate's argmax."""

    def __init__(self, oracle, rows, offs, layout, budget):
        self.oracle, self.rows, self.offs = oracle, rows, offs
        self.layout = layout
        self.budget = budget
        self.count = 0
        self.fallback = None

    def probe(self, q):
        """Raise _Cut when the candidate disagrees with the reply at q.

        Boundary agreement (a tie, or v_r(q) = 0) is remembered as a central
        cut in ``fallback``; it is valid but only used when nothing deeper
        is available.
        """
        self.budget.tick()
        self.count += 1
        reply = self.oracle.query(q)
        if reply.feasible:
            raise FeasibleFound(tuple(q))
        r = reply.index
        top, vals = argmax_set(self.rows, self.offs, q)
        if vals[r] < 0:
            # hidden: v_r(q) >= 0; candidate: v_r(q) < 0
            raise _Cut(self.layout.neg_phi(r, q))
        if r not in top:
            k = min(top)
            raise _Cut(self.layout.diff(k, r, q))
        if self.fallback is None:
            if len(top) > 1:
                k = min(top - {r})
                self.fallback = self.layout.diff(k, r, q)
            elif vals[r] == 0:
                self.fallback = self.layout.neg_phi(r, q)
        return r


class Layout:
    """Coordinates of (A, b) inside the flat ellipsoid vector."""

    def __init__(self, m, n, with_b=True):
        self.m, self.n, self.with_b = m, n, with_b
        self.width = n + 1 if with_b else n

    @property
    def dim(self):
        return self.m * self.width

    def split(self, z):
        rows, offs = [], []
        for i in range(self.m):
            block = z[i * self.width:(i + 1) * self.width]
            rows.append(tuple(block[:self.n]))
            offs.append(block[self.n] if self.with_b else Fraction(0))
        return rows, offs

    def phi(self, i, q):
        """Vector f with f.z = b_i - a_i.q."""
        f = [Fraction(0)] * self.dim
        base = i * self.width
        for j, v in enumerate(q):
            f[base + j] = -v
        if self.with_b:
            f[base + self.n] = Fraction(1)
        return f

    def neg_phi(self, i, q):
        return [-v for v in self.phi(i, q)]

    def neg_phi_row(self, i, x):
        """Normal of -(a_i . x) <= 0, i.e. keep a_i . x >= 0."""
        f = [Fraction(0)] * self.dim
        for j, v in enumerate(x):
            f[i * self.width + j] = -v
        return f

    def diff(self, k, r, q):
        """Normal of v_k(q) - v_r(q) <= 0."""
        return [x - y for x, y in zip(self.phi(k, q), self.phi(r, q))]


def same_vor(A, b, oracle, L, prober=None, indices=None, margin=None, bound=None,
             to_query=None):
    """Probe every facet of the candidate diagram on both sides.

    ``to_query`` maps a diagram point y to the point sent to the oracle
    (identity for the global diagram, p + scale * y inside a small ball).
    Returns Confirmed or SeparatingHyperplane; raises FeasibleFound on Feasible.
    """
    A = [rat_vec(r) for r in A]
    b = rat_vec(b)
    m, n = len(A), len(A[0])
    margin = Fraction(1, 2 ** (10 * L)) if margin is None else margin
    bound = Fraction(1, 2 ** (2 * L)) if bound is None else bound
    to_query = to_query or (lambda y: y)
    if prober is None:
        prober = Prober(oracle, A, b, Layout(m, n), _Budget())
    if indices is None:
        indices = [c.index for c in build_gvor(A, b) if not c.empty] if m > 1 else [0]
    start = prober.count
    for i, j in itertools.combinations(indices, 2):
        w = tuple(x - y for x, y in zip(A[i], A[j]))
        if not any(w):
            continue
        # facet point: v_i = v_j > v_k + margin for the other live k
        cons = [(tuple(y - x for x, y in zip(A[i], A[k])), b[k] - b[i] + margin)
                for k in indices if k not in (i, j)]
        eq = [(w, b[i] - b[j])]
        res = lp_feasible_strict(cons, n, eq) if cons else lp_feasible_strict([], n, eq)
        if not res:
            continue
        ys = [res.x] + [tuple(v + margin * z for v, z in zip(res.x, zk))
                        for zk in _orthogonal_complement(w)]
        for y in ys:
            eps = _side_offset(A, b, i, j, y, bound, indices)
            if eps is None:
                continue
            plus = tuple(v + e for v, e in zip(y, eps))
            minus = tuple(v - e for v, e in zip(y, eps))
            try:
                prober.probe(to_query(plus))
                prober.probe(to_query(minus))
            except _Cut as cut:
                return SeparatingHyperplane(tuple(cut.g), cut.h, prober.count - start)
    return Confirmed(prober.count - start)


def _side_offset(A, b, i, j, y, bound, indices):
    """eps with |eps_c| < bound, y + eps strictly in cell i, y - eps in cell j."""
    n = len(y)
    cons = []
    for l in indices:
        if l != i:
            # v_i(y+e) > v_l(y+e):  (a_l - a_i).e > (b_l - b_i) - (a_l - a_i).y
            d = tuple(x - z for x, z in zip(A[l], A[i]))
            cons.append((d, b[l] - b[i] - dot(d, y)))
        if l != j:
            # v_j(y-e) > v_l(y-e):  (a_j - a_l).e > (b_l - b_j) - (a_l - a_j).y
            d = tuple(x - z for x, z in zip(A[l], A[j]))
            cons.append((tuple(-v for v in d), b[l] - b[j] - dot(d, y)))
    for c in range(n):
        e = tuple(Fraction(int(c == k)) for k in range(n))
        cons.append((e, -bound))
        cons.append((tuple(-v for v in e), -bound))
    res = lp_feasible_strict(cons, n)
    return res.x if res else None


# ---------------------------------------------------------------- recognition

def _adjacent_pairs(rows):
    """Pairs (i, j) whose spherical weighted cells share a facet."""
    m, n = len(rows), len(rows[0])
    pairs = []
    for i, j in itertools.combinations(range(m), 2):
        w = tuple(x - y for x, y in zip(rows[i], rows[j]))
        if not any(w):
            continue
        cons = [(tuple(x - y for x, y in zip(rows[i], rows[k])), 0)
                for k in range(m) if k not in (i, j)]
        if not cons:
            pairs.append((i, j))
            continue
        if lp_feasible_strict(cons, n, [(w, 0)]):
            pairs.append((i, j))
    return pairs


def recognize_sites(rows, pairs=None, init=None, tol_bits=64):
    """Unit sites generating the same spherical diagram as the weighted rows.

    Facet (i, j) forces site_i - site_j to be parallel to rows_i - rows_j.
    Gauss-Newton on those linear conditions plus the unit-norm equations,
    started from the normalized rows, then verified to 2^-tol_bits.
    """
    rows = [rat_vec(r) for r in rows]
    m, n = len(rows), len(rows[0])
    if pairs is None:
        pairs = _adjacent_pairs(rows)
    prec = max(64, 2 * tol_bits + 32)
    with mpmath.workprec(prec):
        perp = {}
        for i, j in pairs:
            w = tuple(x - y for x, y in zip(rows[i], rows[j]))
            perp[(i, j)] = [[mpmath.mpf(v.numerator) / v.denominator for v in z]
                            for z in _orthogonal_complement(w)]
        if init is None:
            init = []
            for r in rows:
                v = [mpmath.mpf(x.numerator) / x.denominator for x in r]
                nr = mpmath.sqrt(sum(t * t for t in v))
                if nr == 0:
                    raise NonRecoverable("zero row")
                init.append([t / nr for t in v])
        z = [mpmath.mpf(v) for row in init for v in row]

        def residual(z):
            res = []
            for (i, j), zs in perp.items():
                for zk in zs:
                    res.append(sum(zk[c] * (z[i * n + c] - z[j * n + c]) for c in range(n)))
            for i in range(m):
                res.append(sum(z[i * n + c] ** 2 for c in range(n)) - 1)
            return res

        def jacobian(z):
            J = []
            for (i, j), zs in perp.items():
                for zk in zs:
                    row = [mpmath.mpf(0)] * (m * n)
                    for c in range(n):
                        row[i * n + c] = zk[c]
                        row[j * n + c] = -zk[c]
                    J.append(row)
            for i in range(m):
                row = [mpmath.mpf(0)] * (m * n)
                for c in range(n):
                    row[i * n + c] = 2 * z[i * n + c]
                J.append(row)
            return J

        tol = mpmath.mpf(2) ** (-tol_bits)
        for _ in range(200):
            r = residual(z)
            worst = max(abs(v) for v in r) if r else 0
            if worst <= tol:
                break
            J = jacobian(z)
            Jf = np.array([[float(v) for v in row] for row in J])
            keep = _independent_rows(Jf)
            Jm = mpmath.matrix([J[k] for k in keep])
            rm = mpmath.matrix([r[k] for k in keep])
            try:
                y = mpmath.lu_solve(Jm * Jm.T, rm)
            except ZeroDivisionError:
                raise NonRecoverable("singular recognition system")
            step = Jm.T * y
            z = [z[k] - step[k] for k in range(m * n)]
        else:
            raise NonRecoverable("recognition did not converge")
        r = residual(z)
        if r and max(abs(v) for v in r) > tol:
            raise NonRecoverable("recognition residual above tolerance")
        sites = [tuple(z[i * n:(i + 1) * n]) for i in range(m)]
    for (i, j) in pairs:
        w = [float(x - y) for x, y in zip(rows[i], rows[j])]
        s = [float(x - y) for x, y in zip(sites[i], sites[j])]
        if float(np.dot(w, s)) <= 0:
            raise NonRecoverable("recovered facet has the wrong orientation")
    return sites


def _independent_rows(J):
    keep, basis = [], np.zeros((0, J.shape[1]))
    for k, row in enumerate(J):
        trial = np.vstack([basis, row])
        if np.linalg.matrix_rank(trial, tol=1e-10 * max(1.0, np.abs(J).max())) > len(keep):
            keep.append(k)
            basis = trial
    return keep


def check_nondegenerate(A, bits=128):
    """True iff no unit vector has equal inner product with n+1 normalized rows.

    Such a vector exists exactly when the n differences of some (n+1)-subset
    of normalized rows have rank below n; the rank test uses a determinant
    evaluated to ``bits`` bits.
    """
    A = [rat_vec(r) for r in A]
    m, n = len(A), len(A[0])
    if any(not any(r) for r in A):
        raise ValueError("zero row")
    if m <= n:
        return True
    with mpmath.workprec(bits + 32):
        unit = []
        for r in A:
            v = [mpmath.mpf(x.numerator) / x.denominator for x in r]
            nr = mpmath.sqrt(sum(t * t for t in v))
            unit.append([t / nr for t in v])
        tiny = mpmath.mpf(2) ** (-bits)
        for sub in itertools.combinations(range(m), n + 1):
            base = unit[sub[0]]
            M = mpmath.matrix([[unit[k][c] - base[c] for c in range(n)] for k in sub[1:]])
            if abs(mpmath.det(M)) <= tiny:
                return False
    return True


# ---------------------------------------------------------------- driver

@dataclass
class FurthestReport:
    status: str = "running"
    iterations: int = 0
    samevor_probes: int = 0
    queries: int = 0
    nonconformant: bool = False
    ball_exponent: int = 0
    stop_exponent: int = 0
    wall_time: float = 0.0
    note: str = ""


@dataclass
class FurthestResult:
    feasible: bool
    x: tuple = None
    report: FurthestReport = field(default_factory=FurthestReport)

    def __bool__(self):
        return self.feasible


class _Budget:
    def __init__(self, max_queries=None, max_seconds=None):
        self.max_queries, self.max_seconds = max_queries, max_seconds
        self.queries = 0
        self.t0 = time.perf_counter()

    def tick(self):
        if self.max_queries is not None and self.queries >= self.max_queries:
            raise ResourceBudgetError("query budget %d exhausted" % self.max_queries)
        if self.max_seconds is not None and time.perf_counter() - self.t0 > self.max_seconds:
            raise ResourceBudgetError("time budget %.1fs exhausted" % self.max_seconds)
        self.queries += 1


def _rational_sites(sites, L):
    return [tuple(round_to_precision([_mp_to_fraction(v) for v in s], 2 ** (4 * L)))
            for s in sites]


class FurthestSolver:
    """FurthestAlg (with_b=True) or the Ax > 0 variant (with_b=False)."""

    def __init__(self, oracle, m, n, L, with_b=True, max_iterations=None,
                 max_queries=None, max_seconds=None):
        self.oracle, self.m, self.n, self.L = oracle, m, n, L
        self.layout = Layout(m, n, with_b)
        self.max_iterations = max_iterations
        self.budget = _Budget(max_queries, max_seconds)
        self.report = FurthestReport(ball_exponent=6 * L, stop_exponent=4 * L + 4)
        widths = []
        for _ in range(m):
            widths += [1] * n
            if with_b:
                widths.append(2 ** L)
        self.ellipsoid = Ellipsoid.box(widths, prec=6 * L + 96)

    # one candidate ------------------------------------------------------
    def _candidate(self, z):
        return self.layout.split(z)

    def _step(self, rows, offs):
        """Probe around candidate (rows, offs); raise _Cut, FeasibleFound or return
        an Infeasible verdict."""
        prober = Prober(self.oracle, rows, offs, self.layout, self.budget)
        try:
            cons = list(zip(rows, offs))
            res = lp_feasible_strict(cons, self.n)
            if res:
                prober.probe(res.x)
                # consistent only if the reply says some row is violated
                raise AssertionError("unreachable: feasible candidate point")
            if self.layout.with_b:
                live = [c.index for c in build_gvor(rows, offs) if not c.empty] \
                    if self.m > 1 else [0]
                sv = same_vor(rows, offs, self.oracle, self.L, prober, live)
                if not sv:
                    raise _Cut(sv.g, sv.h)
                ext = d_extreme(rows, offs)
                if isinstance(ext.d, NegInfinity):
                    raise AssertionError("infeasible candidate has a finite extreme value")
                p, S = ext.p, sorted(ext.support)
                prober.probe(p)
                support = [rows[i] for i in S]
                verdict = self._support_check(prober, p, S, support)
            else:
                S = list(range(self.m))
                verdict = self._support_check(prober, None, S, rows)
            return verdict
        finally:
            self.report.samevor_probes += prober.count

    def _support_check(self, prober, p, S, support):
        """Check the homogeneous diagram of the support rows (inside the ball
        B(p, 2^-6L) when p is given) and recover the support system."""
        n, L = self.n, self.L
        if len(S) >= 2:
            if p is None:
                to_query = None
            else:
                radius = Fraction(1, 2 ** (6 * L))

                def to_query(y):
                    top = max(abs(v) for v in y) or Fraction(1)
                    return tuple(pv + radius * v / (top * n) for pv, v in zip(p, y))
            sv = same_vor(support, [Fraction(0)] * len(S), None, L,
                          prober, list(range(len(S))),
                          margin=Fraction(1, 2 ** 16), bound=Fraction(1, 2 ** 20),
                          to_query=to_query)
            if not sv:
                raise _Cut(sv.g, sv.h)
        if any(not any(r) for r in support):
            self._sweep(prober, p)
        try:
            sites = recognize_sites(support, tol_bits=min(2 * L, 400))
        except NonRecoverable:
            if prober.fallback is not None:
                raise _Cut(prober.fallback)
            self._sweep(prober, p)
        rec = _rational_sites(sites, L)
        res = lp_feasible_strict([(a, 0) for a in rec], n)
        if not res:
            return "infeasible"
        x_star = res.x
        if p is not None:
            step = Fraction(1, 2 ** (6 * L))
            top = max(abs(v) for v in x_star) or Fraction(1)
            prober.probe(tuple(pv + step * v / top for pv, v in zip(p, x_star)))
        else:
            prober.probe(x_star)
        # the recovered system is feasible but the candidate's is not
        for k, i in enumerate(S):
            if dot(support[k], x_star) <= 0:
                raise _Cut(self.layout.neg_phi_row(i, x_star))
        raise AssertionError("candidate support system unexpectedly feasible")

    def _sweep(self, prober, p):
        """Probe far out along each axis; a candidate that is flat in some
        direction disagrees with the hidden replies out there."""
        R = Fraction(2 ** (self.L + 1))
        base = p if p is not None else (Fraction(0),) * self.n
        for c in range(self.n):
            for sign in (1, -1):
                q = list(base)
                q[c] += sign * R
                prober.probe(tuple(q))
        if prober.fallback is not None:
            raise _Cut(prober.fallback)
        raise NonRecoverable("no separating probe for a degenerate candidate")

    # main loop ----------------------------------------------------------
    def run(self):
        t0 = time.perf_counter()
        rep = self.report
        try:
            while True:
                if self.max_iterations is not None and rep.iterations >= self.max_iterations:
                    raise ResourceBudgetError("iteration budget %d exhausted" % self.max_iterations)
                if self.ellipsoid.log2_halfwidth() < -(4 * self.L + 4):
                    return self._finish()
                rows, offs = self._candidate(self.ellipsoid.center)
                try:
                    verdict = self._step(rows, offs)
                except NonRecoverable as err:
                    rep.note = str(err)
                    return self._finish()
                except _Cut as cut:
                    rep.iterations += 1
                    try:
                        self.ellipsoid = ellipsoid_cut(self.ellipsoid, cut.g, cut.h)
                    except (ValueError, PrecisionExhausted) as err:
                        rep.note = str(err)
                        return self._finish()
                    continue
                rep.status = "infeasible"
                return FurthestResult(False, None, rep)
        except FeasibleFound as hit:
            rep.status = "feasible"
            return FurthestResult(True, hit.x, rep)
        finally:
            rep.queries = self.budget.queries
            rep.wall_time = time.perf_counter() - t0

    def _finish(self):
        """Round the center and confirm its verdict with the oracle."""
        rep = self.report
        z = round_to_precision(self.ellipsoid.center, 2 ** (2 * self.L))
        rows, offs = self._candidate(z)
        if any(not any(r) for r in rows):
            rep.nonconformant = True
            rep.status = "infeasible"
            rep.note = rep.note or "rounded candidate has a zero row"
            return FurthestResult(False, None, rep)
        try:
            self._step(rows, offs)
        except (_Cut, NonRecoverable):
            rep.nonconformant = True
            feasible = bool(lp_feasible_strict(list(zip(rows, offs)), self.n))
            rep.status = "feasible" if feasible else "infeasible"
            rep.note = rep.note or "rounded candidate not confirmed"
            return FurthestResult(feasible, None, rep)
        rep.status = "infeasible"
        return FurthestResult(False, None, rep)


def solve_homogeneous(oracle, m, n, L, **kw):
    """Ellipsoid over R^(mn) for Ax > 0 using the weighted spherical diagram."""
    solver = FurthestSolver(oracle, m, n, L, with_b=False, **kw)
    return solver.run()


def solve_furthest(oracle, **kw):
    solver = FurthestSolver(oracle, oracle.m, oracle.n, oracle.L, **kw)
    return solver.run()


def solve_small_m(oracle, max_iterations=None, max_queries=None, max_seconds=None):
    """m <= n: a full-rank A x > b is always feasible, so keep querying a
    solution of a slightly perturbed full-rank candidate."""
    m, n, L = oracle.m, oracle.n, oracle.L
    if m > n:
        raise ValueError("solve_small_m needs m <= n")
    layout = Layout(m, n)
    widths = []
    for _ in range(m):
        widths += [1] * n + [2 ** L]
    e = Ellipsoid.box(widths, prec=6 * L + 96)
    budget = _Budget(max_queries, max_seconds)
    rep = FurthestReport(ball_exponent=6 * L, stop_exponent=4 * L + 4)
    t0 = time.perf_counter()
    try:
        while True:
            if max_iterations is not None and rep.iterations >= max_iterations:
                raise ResourceBudgetError("iteration budget %d exhausted" % max_iterations)
            rows, offs = layout.split(e.center)
            res = lp_feasible_strict(list(zip(rows, offs)), n)
            if not res:
                # small against the ellipsoid, so the cut passes near the center
                eps = Fraction(2) ** (math.floor(e.log2_halfwidth()) - 8)
                rows = _full_rank_perturb(rows, eps)
                res = lp_feasible_strict(list(zip(rows, offs)), n)
            x = res.x
            budget.tick()
            reply = oracle.query(x)
            if reply.feasible:
                rep.status = "feasible"
                return FurthestResult(True, tuple(x), rep)
            rep.iterations += 1
            try:
                e = ellipsoid_cut(e, layout.neg_phi(reply.index, x))
            except (ValueError, PrecisionExhausted) as err:
                rep.nonconformant = True
                rep.note = str(err)
                rep.status = "unresolved"
                return FurthestResult(False, None, rep)
    finally:
        rep.queries = budget.queries
        rep.wall_time = time.perf_counter() - t0


def _full_rank_perturb(rows, eps):
    """Add eps * e_(k) to rows until they are linearly independent."""
    rows = [list(r) for r in rows]
    n = len(rows[0])
    for i in range(len(rows)):
        if _exact_rank(rows[:i + 1]) == i + 1:
            continue
        for c in range(n):
            trial = rows[:i] + [[v + (eps if k == c else 0) for k, v in enumerate(rows[i])]]
            if _exact_rank(trial) == i + 1:
                rows[i] = trial[-1]
                break
    return [tuple(r) for r in rows]


def _exact_rank(rows):
    M = [list(r) for r in rows]
    rank, cols = 0, len(M[0]) if M else 0
    for c in range(cols):
        piv = next((r for r in range(rank, len(M)) if M[r][c] != 0), None)
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        for r in range(len(M)):
            if r != rank and M[r][c] != 0:
                f = M[r][c] / M[rank][c]
                M[r] = [x - f * y for x, y in zip(M[r], M[rank])]
        rank += 1
    return rank
