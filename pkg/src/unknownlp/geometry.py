"""Convex cones over the rationals.

A ConeV is the conic hull of its rays; a ConeH is the set of x with
h.x <= 0 for each stored normal h. Conversions go through an incremental
double description.
"""

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .lp import dot, linprog, rat_vec

MAX_RAYS = 64
MAX_DIM = 5


class ResourceBudgetError(RuntimeError):
    pass


class UnsupportedShape(ValueError):
    pass


def canonical_ray(v):
    """Scale v so its first nonzero coordinate is +1 or -1."""
    v = rat_vec(v)
    for x in v:
        if x != 0:
            s = abs(x)
            return tuple(y / s for y in v)
    raise ValueError("zero vector has no direction")


def is_zero(v):
    return all(x == 0 for x in v)


def _dedupe(vectors):
    seen, out = set(), []
    for v in vectors:
        c = canonical_ray(v)
        if c not in seen:
            seen.add(c)
            out.append(c)
    return out


@dataclass(frozen=True)
class ConeV:
    dim: int
    rays: tuple = ()

    def __post_init__(self):
        rays = tuple(_dedupe(self.rays))
        if any(len(r) != self.dim for r in rays):
            raise ValueError("ray of wrong dimension")
        object.__setattr__(self, "rays", rays)

    def __contains__(self, x):
        return cone_membership(x, self)


@dataclass(frozen=True)
class ConeH:
    dim: int
    halfspaces: tuple = ()

    def __post_init__(self):
        hs = tuple(_dedupe(h for h in self.halfspaces if not is_zero(h)))
        if any(len(h) != self.dim for h in hs):
            raise ValueError("normal of wrong dimension")
        object.__setattr__(self, "halfspaces", hs)

    def __contains__(self, x):
        x = rat_vec(x)
        if len(x) != self.dim:
            raise ValueError("dimension mismatch")
        return all(dot(h, x) <= 0 for h in self.halfspaces)

    def is_origin_only(self):
        return not generators(self).rays


def polar_cone(c):
    """Polar of a ConeV (a ConeH) or of a ConeH (a ConeV)."""
    if isinstance(c, ConeV):
        return ConeH(c.dim, c.rays)
    return ConeV(c.dim, c.halfspaces)


def cone_membership(x, c):
    x = rat_vec(x)
    if len(x) != c.dim:
        raise ValueError("dimension mismatch")
    if isinstance(c, ConeH):
        return x in c
    if is_zero(x):
        return True
    if not c.rays:
        return False
    k = len(c.rays)
    A_eq = [[r[i] for r in c.rays] for i in range(c.dim)]
    res = linprog([0] * k, A_eq=A_eq, b_eq=list(x), nonneg=range(k))
    return res.status != "infeasible"


def _double_description(normals, dim):
    """Generators of {x : a.x <= 0 for a in normals} as (rays, lineality)."""
    if dim > MAX_DIM:
        raise ResourceBudgetError("dimension %d above the budget %d" % (dim, MAX_DIM))
    lin = [tuple(Fraction(int(i == j)) for j in range(dim)) for i in range(dim)]
    rays = []  # (vector, set of tight constraint indices)
    for k, a in enumerate(normals):
        idx = next((i for i, l in enumerate(lin) if dot(a, l) != 0), None)
        if idx is not None:
            pivot = lin.pop(idx)
            ap = dot(a, pivot)
            if ap > 0:
                pivot = tuple(-x for x in pivot)
                ap = -ap
            lin = [tuple(x - (dot(a, l) / ap) * y for x, y in zip(l, pivot)) for l in lin]
            new = []
            for r, z in rays:
                ar = dot(a, r)
                r2 = tuple(x - (ar / ap) * y for x, y in zip(r, pivot))
                new.append((r2, z | {k}))
            new.append((pivot, set(range(k))))
            rays = new
            continue
        plus, zero, minus = [], [], []
        for r, z in rays:
            ar = dot(a, r)
            (plus if ar > 0 else minus if ar < 0 else zero).append((r, z, ar))
        out = [(r, z | {k}) for r, z, _ in zero] + [(r, z) for r, z, _ in minus]
        for rp, zp, ap_ in plus:
            for rm, zm, am in minus:
                common = zp & zm
                adjacent = True
                for r, z in rays:
                    if r is not rp and r is not rm and common <= z:
                        adjacent = False
                        break
                if adjacent:
                    v = tuple(ap_ * y - am * x for x, y in zip(rp, rm))
                    out.append((canonical_ray(v), common | {k}))
        rays = out
        if len(rays) > MAX_RAYS:
            raise ResourceBudgetError("ray budget %d exceeded" % MAX_RAYS)
    return [canonical_ray(r) for r, _ in rays], lin


def generators(c):
    """V-representation of a ConeH."""
    rays, lin = _double_description(c.halfspaces, c.dim)
    return ConeV(c.dim, list(rays) + list(lin) + [tuple(-x for x in l) for l in lin])


def cone_facets(c):
    """Minimal H-representation of a ConeV via the polar's generators."""
    if len(c.rays) > MAX_RAYS:
        raise ResourceBudgetError("ray budget %d exceeded" % MAX_RAYS)
    rays, lin = _double_description(c.rays, c.dim)
    return ConeH(c.dim, list(rays) + list(lin) + [tuple(-x for x in l) for l in lin])


def conv_union_rays(c, r):
    """Conic hull of c and the ray through r, with redundant rays dropped."""
    r = rat_vec(r)
    if is_zero(r):
        raise ValueError("zero ray")
    if c.rays and cone_membership(r, c):
        return c
    rays = list(c.rays) + [canonical_ray(r)]
    j = 0
    while j < len(rays):
        others = rays[:j] + rays[j + 1:]
        if others and cone_membership(rays[j], ConeV(c.dim, others)):
            del rays[j]
        else:
            j += 1
    return ConeV(c.dim, rays)


@dataclass(frozen=True)
class MonteCarloVolume:
    hits: int
    samples: int

    @property
    def estimate(self):
        return 2.0 * self.hits / self.samples

    @property
    def stderr(self):
        p = self.hits / self.samples
        return 2.0 * (p * (1 - p) / self.samples) ** 0.5


def sector_volume(alpha, beta):
    """Normalized volume of a sector cylinder; angles are in units of pi."""
    return (Fraction(beta) - Fraction(alpha)) / 2


def normalized_volume(c, mode="exact", samples=10000, seed=0):
    """Normalized volume vol(C & B) / (vol(B) / 2).

    Exact mode handles the full space, halfspaces, orthant-like cones and
    sector cylinders given as (alpha, beta) in units of pi. Monte-Carlo mode
    returns the raw hit count.
    """
    if isinstance(c, tuple) and len(c) == 2 and not isinstance(c, ConeH):
        return sector_volume(*c)
    if mode == "exact":
        hs = c.halfspaces
        if not hs:
            return Fraction(2)
        if len(hs) == 1:
            return Fraction(1)
        axes = set()
        for h in hs:
            nz = [i for i, x in enumerate(h) if x != 0]
            if len(nz) != 1 or nz[0] in axes:
                raise UnsupportedShape("exact volume needs an orthant-like cone")
            axes.add(nz[0])
        return Fraction(2, 2 ** len(hs))
    rng = np.random.default_rng(seed)
    hits = 0
    for _ in range(samples):
        g = rng.standard_normal(c.dim)
        x = g / np.linalg.norm(g) * rng.random() ** (1.0 / c.dim)
        if tuple(Fraction(float(v)) for v in x) in c:
            hits += 1
    return MonteCarloVolume(hits, samples)
