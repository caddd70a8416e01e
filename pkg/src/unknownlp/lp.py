"""Exact rational LP: a two-phase simplex with Bland's rule and the
feasibility / extreme-point routines built on top of it.

Everything here works over ``fractions.Fraction``; no tolerances.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction

ITERATION_CAP = 100000


class IterationCapExceeded(RuntimeError):
    pass


def rat(x):
    """Coerce ints, Fractions, floats and "p/q" strings to Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ValueError("non-finite value %r" % x)
    return Fraction(x)


def rat_vec(xs):
    return tuple(rat(x) for x in xs)


def dot(u, v):
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def rat_size(q):
    """Binary size of a rational: sign bit plus numerator and denominator bits."""
    q = rat(q)
    return 1 + abs(q.numerator).bit_length() + q.denominator.bit_length()


def binary_size(A, b):
    """Size of (A, b): one bit per entry plus the entry sizes."""
    total = len(b)
    for row, bi in zip(A, b):
        total += len(row) + sum(rat_size(x) for x in row) + rat_size(bi)
    return total


@dataclass(frozen=True)
class LPInstance:
    A: tuple
    b: tuple
    L: int = 0
    degenerate_ok: bool = False

    def __post_init__(self):
        A = tuple(rat_vec(r) for r in self.A)
        b = rat_vec(self.b)
        if not A or len(A) != len(b):
            raise ValueError("A and b must be non-empty and of matching length")
        n = len(A[0])
        if n < 1 or any(len(r) != n for r in A):
            raise ValueError("ragged or empty rows")
        if not self.degenerate_ok and any(all(x == 0 for x in r) for r in A):
            raise ValueError("zero row in A")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        size = binary_size(A, b)
        if self.L == 0:
            object.__setattr__(self, "L", size)
        elif self.L < size:
            raise ValueError("L=%d is below the binary size %d" % (self.L, size))

    @property
    def m(self):
        return len(self.A)

    @property
    def n(self):
        return len(self.A[0])

    @property
    def N(self):
        return max(max(abs(x.numerator), x.denominator)
                   for row in self.A + (self.b,) for x in row)

    def constraints(self):
        return list(zip(self.A, self.b))

    def satisfied_strictly(self, x):
        return all(dot(a, x) > bi for a, bi in zip(self.A, self.b))


@dataclass
class LPResult:
    status: str  # "optimal", "infeasible" or "unbounded"
    x: tuple = None
    value: Fraction = None
    ray: tuple = None
    iterations: int = 0


def _pivot(T, basis, r, c):
    row = T[r]
    p = row[c]
    if p != 1:
        T[r] = row = [v / p for v in row]
    for i, other in enumerate(T):
        if i != r:
            f = other[c]
            if f:
                T[i] = [u - f * v for u, v in zip(other, row)]
    basis[r] = c


def _run(T, basis, obj, allowed, counter):
    """Maximise obj over the tableau, Bland's rule. Returns None or the
    entering column of an unbounded ray."""
    width = len(T[0]) - 1
    while True:
        counter[0] += 1
        if counter[0] > ITERATION_CAP:
            raise IterationCapExceeded("simplex iteration cap hit")
        # reduced costs: obj_j - sum over basis of obj_b * T[i][j]
        enter = None
        for j in range(width):
            if j in allowed and j not in basis:
                rc = obj[j] - sum((obj[basis[i]] * T[i][j] for i in range(len(T))
                                   if T[i][j]), Fraction(0))
                if rc > 0:
                    enter = j
                    break
        if enter is None:
            return None
        leave = None
        best = None
        for i, row in enumerate(T):
            if row[enter] > 0:
                ratio = row[-1] / row[enter]
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best, leave = ratio, i
        if leave is None:
            return enter
        _pivot(T, basis, leave, enter)


def simplex_max(c, A_eq, b_eq):
    """Maximise c.x subject to A_eq x = b_eq, x >= 0 (exact, Bland's rule)."""
    m = len(A_eq)
    n = len(c)
    c = [rat(v) for v in c]
    rows = []
    for a, bi in zip(A_eq, b_eq):
        a = [rat(v) for v in a]
        bi = rat(bi)
        if bi < 0:
            a = [-v for v in a]
            bi = -bi
        rows.append((a, bi))
    counter = [0]
    # phase one with one artificial per row
    T = []
    for i, (a, bi) in enumerate(rows):
        art = [Fraction(0)] * m
        art[i] = Fraction(1)
        T.append(a + art + [bi])
    basis = [n + i for i in range(m)]
    obj1 = [Fraction(0)] * n + [Fraction(-1)] * m
    _run(T, basis, obj1, set(range(n + m)), counter)
    if sum((T[i][-1] for i in range(m) if basis[i] >= n), Fraction(0)) > 0:
        return LPResult("infeasible", iterations=counter[0])
    # drive remaining artificials out; drop redundant rows
    i = 0
    while i < len(T):
        if basis[i] >= n:
            col = next((j for j in range(n) if T[i][j] != 0), None)
            if col is None:
                del T[i]
                del basis[i]
                continue
            _pivot(T, basis, i, col)
        i += 1
    T = [row[:n] + [row[-1]] for row in T]
    enter = _run(T, basis, c, set(range(n)), counter)
    x = [Fraction(0)] * n
    for i, bv in enumerate(basis):
        x[bv] = T[i][-1]
    if enter is not None:
        ray = [Fraction(0)] * n
        ray[enter] = Fraction(1)
        for i, bv in enumerate(basis):
            ray[bv] = -T[i][enter]
        return LPResult("unbounded", x=tuple(x), ray=tuple(ray), iterations=counter[0])
    return LPResult("optimal", x=tuple(x), value=dot(c, x), iterations=counter[0])


def linprog(c, A_ub=(), b_ub=(), A_eq=(), b_eq=(), nonneg=()):
    """Maximise c.x with A_ub x <= b_ub and A_eq x = b_eq.

    Variables are free unless their index is listed in ``nonneg``.
    """
    n = len(c)
    nonneg = set(nonneg)
    free = [j for j in range(n) if j not in nonneg]
    # column layout: x_j (>= 0 part), then x_j^- for free j, then slacks
    neg_col = {j: n + k for k, j in enumerate(free)}
    width = n + len(free) + len(A_ub)

    def expand(row):
        out = [Fraction(0)] * width
        for j, v in enumerate(row):
            v = rat(v)
            out[j] = v
            if j in neg_col:
                out[neg_col[j]] = -v
        return out

    rows, rhs = [], []
    for k, (a, bi) in enumerate(zip(A_ub, b_ub)):
        r = expand(a)
        r[n + len(free) + k] = Fraction(1)
        rows.append(r)
        rhs.append(rat(bi))
    for a, bi in zip(A_eq, b_eq):
        rows.append(expand(a))
        rhs.append(rat(bi))
    cc = expand(c)
    res = simplex_max(cc, rows, rhs)
    if res.status == "infeasible":
        return res

    def collapse(v):
        return tuple(v[j] - (v[neg_col[j]] if j in neg_col else 0) for j in range(n))

    x = collapse(res.x)
    ray = collapse(res.ray) if res.ray is not None else None
    value = dot([rat(v) for v in c], x) if res.status == "optimal" else None
    return LPResult(res.status, x=x, value=value, ray=ray, iterations=res.iterations)


@dataclass
class Feasible:
    x: tuple

    def __bool__(self):
        return True


@dataclass
class Infeasible:
    def __bool__(self):
        return False


def lp_feasible_strict(constraints, n=None, equalities=()):
    """Decide a_i.x > b_i for all i exactly.

    Maximises the common slack t (capped at 1) in a_i.x - b_i >= t; the system
    is feasible iff the optimum is positive. Optional ``equalities`` are pairs
    (e, f) meaning e.x = f.
    """
    constraints = [(rat_vec(a), rat(b)) for a, b in constraints]
    equalities = [(rat_vec(e), rat(f)) for e, f in equalities]
    if n is None:
        if constraints:
            n = len(constraints[0][0])
        elif equalities:
            n = len(equalities[0][0])
        else:
            raise ValueError("dimension unknown for an empty system")
    if not constraints:
        if not equalities:
            return Feasible(tuple(Fraction(0) for _ in range(n)))
        res = linprog([0] * n, A_eq=[e for e, _ in equalities],
                      b_eq=[f for _, f in equalities])
        return Feasible(res.x) if res.status != "infeasible" else Infeasible()
    c = [0] * n + [1]
    A_ub = [[-v for v in a] + [1] for a, _ in constraints]
    b_ub = [-b for _, b in constraints]
    A_ub.append([0] * n + [1])
    b_ub.append(1)
    A_eq = [list(e) + [0] for e, _ in equalities]
    b_eq = [f for _, f in equalities]
    res = linprog(c, A_ub, b_ub, A_eq, b_eq)
    if res.status == "optimal" and res.value > 0:
        return Feasible(res.x[:n])
    return Infeasible()


class NegInfinity:
    def __repr__(self):
        return "NegInfinity"

    def __eq__(self, other):
        return isinstance(other, NegInfinity)

    def __hash__(self):
        return hash("NegInfinity")


NEG_INF = NegInfinity()


@dataclass
class ExtremeResult:
    d: object
    p: tuple = None
    support: frozenset = field(default_factory=frozenset)


def d_extreme(A, b=None, weights=None):
    """Minimise max_i (b_i - a_i.x) / w_i over x.

    Accepts an LPInstance or (A, b). ``weights`` (positive rationals, default 1)
    give weighted distances. The returned point lies in the relative interior
    of the optimal face, so ``support`` is the smallest possible tie set.
    """
    if b is None:
        A, b = A.A, A.b
    A = [rat_vec(r) for r in A]
    b = rat_vec(b)
    m, n = len(A), len(A[0])
    w = [Fraction(1)] * m if weights is None else rat_vec(weights)
    # variables (x, z): maximise -z, -a_i x - w_i z <= -b_i
    A_ub = [[-v for v in A[i]] + [-w[i]] for i in range(m)]
    b_ub = [-bi for bi in b]
    res = linprog([0] * n + [-1], A_ub, b_ub)
    if res.status == "unbounded":
        return ExtremeResult(NEG_INF)
    d = -res.value
    # indices that can be slack somewhere on the optimal face
    base = [[-v for v in A[i]] for i in range(m)]
    rhs = [-(b[i] - w[i] * d) for i in range(m)]
    witnesses = [res.x[:n]]
    slack = {i for i in range(m) if b[i] - dot(A[i], res.x[:n]) < w[i] * d}
    for i in range(m):
        if i in slack:
            continue
        rows = [r + [0] for r in base]
        rows[i] = base[i] + [1]
        r2 = linprog([0] * n + [1], rows + [[0] * n + [1]], rhs + [1])
        if r2.status == "optimal" and r2.value > 0:
            x = r2.x[:n]
            witnesses.append(x)
            slack |= {k for k in range(m) if b[k] - dot(A[k], x) < w[k] * d}
    k = len(witnesses)
    p = tuple(sum((wv[j] for wv in witnesses), Fraction(0)) / k for j in range(n))
    support = frozenset(i for i in range(m) if b[i] - dot(A[i], p) == w[i] * d)
    return ExtremeResult(d, p, support)


def _convergent(x, bound):
    """Last continued-fraction convergent of x with denominator <= bound."""
    p0, q0, p1, q1 = 0, 1, 1, 0
    r = x
    while True:
        a = math.floor(r)
        p2, q2 = a * p1 + p0, a * q1 + q0
        if q2 > bound:
            break
        p0, q0, p1, q1 = p1, q1, p2, q2
        if r == a:
            break
        r = 1 / (r - a)
    return Fraction(p1, q1)


def round_to_precision(xs, denom_bound):
    """Round each coordinate to a rational p/q, q <= denom_bound, with
    |x - p/q| <= 1/(q * denom_bound)."""
    if denom_bound < 1:
        raise ValueError("denom_bound must be >= 1")
    out = []
    for x in xs:
        if isinstance(x, float) and not math.isfinite(x):
            raise ValueError("non-finite input %r" % x)
        try:
            fx = Fraction(x)
        except (TypeError, ValueError):
            fx = Fraction(str(x))
        best = fx.limit_denominator(denom_bound)
        if abs(fx - best) > Fraction(1, best.denominator * denom_bound):
            best = _convergent(fx, denom_bound)
        out.append(best)
    return out
