"""Simulated verification oracles over a hidden instance.

Constraint indices are 0-based. The homogenization wrapper reserves index m
for its extra constraint y > 0.
"""

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .lp import LPInstance, dot, rat_vec


@dataclass(frozen=True)
class OracleReply:
    index: int = None

    @property
    def feasible(self):
        return self.index is None

    def __str__(self):
        return "Feasible" if self.index is None else "ViolatedIndex(%d)" % self.index


FEASIBLE = OracleReply()


def violated(i):
    return OracleReply(i)


class FirstIndex:
    def choose(self, x, candidates):
        return min(candidates)

    def __repr__(self):
        return "FirstIndex()"


class RandomSeeded:
    def __init__(self, seed):
        self.seed = seed
        self.rng = random.Random(seed)

    def choose(self, x, candidates):
        return self.rng.choice(sorted(candidates))

    def __repr__(self):
        return "RandomSeeded(%r)" % self.seed


class AdversaryCallback:
    def __init__(self, handle):
        self.handle = handle

    def choose(self, x, candidates):
        i = self.handle(x, sorted(candidates))
        if i not in candidates:
            raise ValueError("adversary picked %r outside %r" % (i, sorted(candidates)))
        return i


def fmt_rat(q):
    q = Fraction(q)
    return "%d/%d" % (q.numerator, q.denominator)


@dataclass
class Transcript:
    seed: int = 0
    entries: list = field(default_factory=list)

    def append(self, x, reply):
        self.entries.append((tuple(x), reply))

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def lines(self):
        for x, reply in self.entries:
            yield " ".join(fmt_rat(v) for v in x) + " -> " + str(reply)

    def dump(self, path):
        with open(path, "w") as fh:
            for line in self.lines():
                fh.write(line + "\n")


def violated_indices(hidden, x):
    return [i for i, (a, b) in enumerate(zip(hidden.A, hidden.b)) if dot(a, x) <= b]


def worst_case_query(hidden, x, policy=None):
    x = rat_vec(x)
    if len(x) != hidden.n:
        raise ValueError("query has dimension %d, expected %d" % (len(x), hidden.n))
    bad = violated_indices(hidden, x)
    if not bad:
        return FEASIBLE
    return violated((policy or FirstIndex()).choose(x, bad))


def furthest_indices(hidden, x):
    """Indices of violated rows at maximal Euclidean distance from x.

    Compares v_i^2 * |a_j|^2 against v_j^2 * |a_i|^2, v_i = b_i - a_i.x >= 0.
    """
    best, best_v, best_n = [], None, None
    for i, (a, b) in enumerate(zip(hidden.A, hidden.b)):
        norm2 = dot(a, a)
        if norm2 == 0:
            raise ValueError("row %d is zero" % i)
        v = b - dot(a, x)
        if v < 0:
            continue
        if not best:
            best, best_v, best_n = [i], v, norm2
            continue
        lhs, rhs = v * v * best_n, best_v * best_v * norm2
        if lhs > rhs:
            best, best_v, best_n = [i], v, norm2
        elif lhs == rhs:
            best.append(i)
    return best


def furthest_query(hidden, x, tie=None):
    x = rat_vec(x)
    if len(x) != hidden.n:
        raise ValueError("query has dimension %d, expected %d" % (len(x), hidden.n))
    best = furthest_indices(hidden, x)
    if not best:
        return FEASIBLE
    return violated((tie or FirstIndex()).choose(x, best))


class Oracle:
    """Owns a hidden instance; solvers see query(), m, n and L only."""

    def __init__(self, hidden, policy=None, seed=0):
        if not isinstance(hidden, LPInstance):
            hidden = LPInstance(*hidden)
        self._hidden = hidden
        self.policy = policy or FirstIndex()
        self.transcript = Transcript(seed)
        self.m, self.n, self.L = hidden.m, hidden.n, hidden.L

    def _answer(self, x):
        raise NotImplementedError

    def query(self, x):
        x = rat_vec(x)
        reply = self._answer(x)
        self.transcript.append(x, reply)
        return reply

    @property
    def queries(self):
        return len(self.transcript)


class WorstCaseOracle(Oracle):
    def _answer(self, x):
        return worst_case_query(self._hidden, x, self.policy)


class FurthestOracle(Oracle):
    def _answer(self, x):
        return furthest_query(self._hidden, x, self.policy)


def homogeneous_instance(hidden):
    """(A, -b; 0, 1) > 0 over n+1 variables."""
    rows = [tuple(a) + (-b,) for a, b in zip(hidden.A, hidden.b)]
    rows.append(tuple(Fraction(0) for _ in range(hidden.n)) + (Fraction(1),))
    return LPInstance(rows, [0] * (hidden.m + 1))


class HomogenizedOracle:
    """Oracle for Ax - by > 0, y > 0 built on an oracle for Ax > b."""

    def __init__(self, inner):
        self.inner = inner
        self.m, self.n = inner.m + 1, inner.n + 1
        # bound on the size of the homogeneous system given the size of (A, b)
        self.L = inner.L + 3 * inner.m + 3 * inner.n + 7
        self.transcript = Transcript(inner.transcript.seed)

    def query(self, z):
        z = rat_vec(z)
        x, y = z[:-1], z[-1]
        if y <= 0:
            reply = violated(self.m - 1)
        else:
            reply = self.inner.query(tuple(v / y for v in x))
        self.transcript.append(z, reply)
        return reply

    @property
    def queries(self):
        return len(self.transcript)


def homogenize(hidden, inner):
    return homogeneous_instance(hidden), HomogenizedOracle(inner)
