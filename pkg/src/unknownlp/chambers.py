"""Chamber counts for unions of convex sets, and exterior-angle identities."""

import functools
import math
import random
from dataclasses import dataclass
from fractions import Fraction

import numpy as np


def chamber_bound(m, n):
    if m < 0 or n < 1:
        raise ValueError("need m >= 0 and n >= 1")
    return sum(math.comb(m, i) for i in range(n + 1))


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


@dataclass(frozen=True)
class ConvexPolygon2D:
    vertices: tuple

    def __post_init__(self):
        vs = tuple((Fraction(x), Fraction(y)) for x, y in self.vertices)
        if len(vs) < 3:
            raise ValueError("a polygon needs at least 3 vertices")
        k = len(vs)
        for i in range(k):
            if _cross(vs[i], vs[(i + 1) % k], vs[(i + 2) % k]) <= 0:
                raise ValueError("vertices are not strictly convex and counterclockwise")
        object.__setattr__(self, "vertices", vs)

    def edges(self):
        k = len(self.vertices)
        return [(self.vertices[i], self.vertices[(i + 1) % k]) for i in range(k)]

    def strictly_contains(self, p):
        return all(_cross(a, b, p) > 0 for a, b in self.edges())

    def contains(self, p):
        return all(_cross(a, b, p) >= 0 for a, b in self.edges())


def convex_hull(points):
    """Counterclockwise hull with collinear points dropped."""
    pts = sorted(set((Fraction(x), Fraction(y)) for x, y in points))
    if len(pts) < 3:
        return pts
    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def thin_slab(p, q, width=Fraction(1, 2 ** 20)):
    """Rectangle of the given width around the segment pq."""
    p = (Fraction(p[0]), Fraction(p[1]))
    q = (Fraction(q[0]), Fraction(q[1]))
    dx, dy = q[0] - p[0], q[1] - p[1]
    # rational normal with max-norm half the width, so the slab is at most width wide
    top = max(abs(dx), abs(dy))
    nx, ny = -dy / top * width / 2, dx / top * width / 2
    return ConvexPolygon2D([(p[0] - nx, p[1] - ny), (q[0] - nx, q[1] - ny),
                            (q[0] + nx, q[1] + ny), (p[0] + nx, p[1] + ny)])


# ------------------------------------------------------------ arrangement

def _segment_points(s, t):
    """Points shared by closed segments s and t (0, 1 or 2 points)."""
    (p, p2), (q, q2) = s, t
    r = (p2[0] - p[0], p2[1] - p[1])
    u = (q2[0] - q[0], q2[1] - q[1])
    den = r[0] * u[1] - r[1] * u[0]
    w = (q[0] - p[0], q[1] - p[1])
    if den != 0:
        a = (w[0] * u[1] - w[1] * u[0]) / den
        b = (w[0] * r[1] - w[1] * r[0]) / den
        if 0 <= a <= 1 and 0 <= b <= 1:
            return [(p[0] + a * r[0], p[1] + a * r[1])]
        return []
    if w[0] * r[1] - w[1] * r[0] != 0:
        return []
    # collinear: keep the endpoints of each lying on the other
    rr = r[0] * r[0] + r[1] * r[1]
    out = []
    for x in (q, q2):
        a = ((x[0] - p[0]) * r[0] + (x[1] - p[1]) * r[1]) / rr
        if 0 <= a <= 1:
            out.append(x)
    uu = u[0] * u[0] + u[1] * u[1]
    for x in (p, p2):
        b = ((x[0] - q[0]) * u[0] + (x[1] - q[1]) * u[1]) / uu
        if 0 <= b <= 1:
            out.append(x)
    return out


def _half(v):
    return 0 if (v[1] > 0 or (v[1] == 0 and v[0] > 0)) else 1


def _ccw_sorted(origin, targets):
    def cmp(a, b):
        va = (a[0] - origin[0], a[1] - origin[1])
        vb = (b[0] - origin[0], b[1] - origin[1])
        ha, hb = _half(va), _half(vb)
        if ha != hb:
            return ha - hb
        c = va[0] * vb[1] - va[1] * vb[0]
        return -1 if c > 0 else (1 if c < 0 else 0)

    return sorted(targets, key=functools.cmp_to_key(cmp))


@dataclass
class Arrangement2D:
    vertices: list
    edges: list  # undirected sub-edges (u, v) as vertex pairs
    faces: list  # half-edge cycles as lists of vertices, face on the left

    def euler_ok(self, components):
        # every component contributes its own outer boundary cycle
        return len(self.vertices) - len(self.edges) + len(self.faces) == 2 * components


def build_arrangement(polygons):
    segs = [e for poly in polygons for e in poly.edges()]
    on_seg = [set(s) for s in segs]
    for i in range(len(segs)):
        for j in range(i + 1, len(segs)):
            for x in _segment_points(segs[i], segs[j]):
                on_seg[i].add(x)
                on_seg[j].add(x)
    edges = set()
    for (p, q), pts in zip(segs, on_seg):
        d = (q[0] - p[0], q[1] - p[1])
        order = sorted(pts, key=lambda x: (x[0] - p[0]) * d[0] + (x[1] - p[1]) * d[1])
        for a, b in zip(order, order[1:]):
            if a != b:
                edges.add((a, b) if a < b else (b, a))
    adj = {}
    for a, b in edges:
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)
    order = {v: _ccw_sorted(v, ns) for v, ns in adj.items()}
    pos = {v: {w: k for k, w in enumerate(ns)} for v, ns in order.items()}
    seen, faces = set(), []
    for a, b in edges:
        for start in ((a, b), (b, a)):
            if start in seen:
                continue
            cyc, h = [], start
            while h not in seen:
                seen.add(h)
                u, v = h
                cyc.append(u)
                ns = order[v]
                # next edge clockwise from v->u keeps the face on the left
                w = ns[(pos[v][u] - 1) % len(ns)]
                h = (v, w)
            faces.append(cyc)
    return Arrangement2D(list(adj), sorted(edges), faces)


def _signed_area2(cyc):
    return sum(cyc[i][0] * cyc[(i + 1) % len(cyc)][1] - cyc[(i + 1) % len(cyc)][0] * cyc[i][1]
               for i in range(len(cyc)))


def _left_covered(u, v, polygons):
    mid = ((u[0] + v[0]) / 2, (u[1] + v[1]) / 2)
    for poly in polygons:
        if poly.strictly_contains(mid):
            return True
        for a, b in poly.edges():
            # sub-edge on this polygon edge, same direction: interior is on the left
            if _cross(a, b, u) == 0 and _cross(a, b, v) == 0:
                d = (b[0] - a[0], b[1] - a[1])
                e = (v[0] - u[0], v[1] - u[1])
                if d[0] * e[0] + d[1] * e[1] > 0 and poly.contains(mid):
                    return True
    return False


def _components(arr):
    parent = {v: v for v in arr.vertices}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in arr.edges:
        parent[find(a)] = find(b)
    return len({find(v) for v in arr.vertices})


def count_chambers_2d(polygons, window=None):
    """Connected components of the plane minus the union of closed polygons.

    Every sub-edge of the arrangement lies on some polygon boundary, so an
    uncovered face never borders another uncovered face; the count is the
    unbounded face plus every bounded face not covered by a polygon.

    With a convex ``window`` the count is taken inside the open window
    instead, which is how long slabs stand in for full lines.
    """
    polygons = [p if isinstance(p, ConvexPolygon2D) else ConvexPolygon2D(p) for p in polygons]
    if window is not None and not isinstance(window, ConvexPolygon2D):
        window = ConvexPolygon2D(window)
    if not polygons:
        return 1
    frame = [] if window is None else [window]
    arr = build_arrangement(polygons + frame)
    count = 1 if window is None else 0
    for cyc in arr.faces:
        if _signed_area2(cyc) <= 0 or _left_covered(cyc[0], cyc[1], polygons):
            continue
        if window is not None and not _left_covered(cyc[0], cyc[1], frame):
            continue
        count += 1
    return count


# ------------------------------------------------------------ angles

def _segments_cross(p1, p2, q1, q2):
    d1, d2 = _cross(q1, q2, p1), _cross(q1, q2, p2)
    d3, d4 = _cross(p1, p2, q1), _cross(p1, p2, q2)
    if ((d1 > 0) != (d2 > 0)) and d1 != 0 and d2 != 0 and \
            ((d3 > 0) != (d4 > 0)) and d3 != 0 and d4 != 0:
        return True
    return bool(_segment_points((p1, p2), (q1, q2)))


def is_simple(vertices):
    vs = [(Fraction(x), Fraction(y)) for x, y in vertices]
    k = len(vs)
    if k < 3 or len(set(vs)) != k:
        return False
    for i in range(k):
        for j in range(i + 1, k):
            if j == i + 1 or (i == 0 and j == k - 1):
                continue
            if _segments_cross(vs[i], vs[(i + 1) % k], vs[j], vs[(j + 1) % k]):
                return False
    return True


def exterior_angles(poly):
    """Signed turning angle at every vertex, oriented so they sum to 2*pi."""
    vs = poly.vertices if isinstance(poly, ConvexPolygon2D) else \
        [(Fraction(x), Fraction(y)) for x, y in poly]
    if not is_simple(vs):
        raise ValueError("polygon is not simple")
    k = len(vs)
    sign = 1 if _signed_area2(vs) > 0 else -1
    out = []
    for i in range(k):
        a, b, c = vs[i - 1], vs[i], vs[(i + 1) % k]
        din = (b[0] - a[0], b[1] - a[1])
        dout = (c[0] - b[0], c[1] - b[1])
        cr = din[0] * dout[1] - din[1] * dout[0]
        dt = din[0] * dout[0] + din[1] * dout[1]
        out.append(sign * math.atan2(float(cr), float(dt)))
    return out


@dataclass(frozen=True)
class MCEstimate:
    value: float
    stderr: float
    samples: int


def direction_indicator_integral(p, poly, samples=20000, seed=0):
    """Fraction of directions w for which p is the unique maximizer of <w, x>."""
    p = (Fraction(p[0]), Fraction(p[1]))
    if p not in poly.vertices:
        raise ValueError("point is not a vertex of the polygon")
    rng = np.random.default_rng(seed)
    theta = rng.uniform(0, 2 * math.pi, samples)
    w = np.stack([np.cos(theta), np.sin(theta)], axis=1)
    others = np.array([[float(x) - float(p[0]), float(y) - float(p[1])]
                       for x, y in poly.vertices if (x, y) != p])
    hits = np.all(w @ others.T < 0, axis=1)
    f = float(hits.mean())
    return MCEstimate(f, math.sqrt(f * (1 - f) / samples), samples)


# ------------------------------------------------------------ grid counter

@dataclass(frozen=True)
class HPolytope:
    """{x : a.x <= b for (a, b) in halfspaces}."""
    halfspaces: tuple

    def _arrays(self):
        A = np.array([[float(v) for v in a] for a, _ in self.halfspaces])
        b = np.array([float(v) for _, v in self.halfspaces])
        return A, b

    def contains(self, pts):
        A, b = self._arrays()
        return np.all(pts @ A.T <= b, axis=1)

    def blocks(self, P, Q):
        """For point pairs (P[k], Q[k]), does the segment meet the polytope?"""
        A, b = self._arrays()
        sp = P @ A.T - b
        sq = Q @ A.T - b
        lo = np.zeros(len(P))
        hi = np.ones(len(P))
        slope = sq - sp
        with np.errstate(divide="ignore", invalid="ignore"):
            t = -sp / slope
        for k in range(A.shape[0]):
            s, sl, tk = sp[:, k], slope[:, k], t[:, k]
            flat = sl == 0
            dead = flat & (s > 0)
            hi = np.where(dead, -1.0, hi)
            up = (~flat) & (sl > 0)
            down = (~flat) & (sl < 0)
            hi = np.where(up, np.minimum(hi, tk), hi)
            lo = np.where(down, np.maximum(lo, tk), lo)
        return lo <= hi


@dataclass(frozen=True)
class Ball:
    center: tuple
    radius: float

    def contains(self, pts):
        c = np.array(self.center, dtype=float)
        return np.sum((pts - c) ** 2, axis=1) <= self.radius ** 2

    def blocks(self, P, Q):
        c = np.array(self.center, dtype=float)
        d = Q - P
        dd = np.sum(d * d, axis=1)
        t = np.clip(np.sum((c - P) * d, axis=1) / np.where(dd == 0, 1, dd), 0, 1)
        closest = P + t[:, None] * d
        return np.sum((closest - c) ** 2, axis=1) <= self.radius ** 2


def slab3(normal, offset, width=2.0 ** -20):
    """{x : |normal.x - offset| <= width / 2}, normal scaled to unit length."""
    nrm = math.sqrt(sum(float(v) ** 2 for v in normal))
    a = tuple(float(v) / nrm for v in normal)
    neg = tuple(-v for v in a)
    return HPolytope(((a, offset + width / 2), (neg, -offset + width / 2)))


@dataclass(frozen=True)
class GridCount:
    count: int
    resolution: int
    stable: bool = True


def _grid_components(sets, n, resolution, box):
    lo, hi = box
    axes = [np.linspace(lo, hi, resolution) for _ in range(n)]
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n)
    free = np.ones(len(mesh), dtype=bool)
    for s in sets:
        free &= ~s.contains(mesh)
    parent = np.arange(len(mesh))

    def find(x):
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    idx = np.arange(len(mesh)).reshape((resolution,) * n)
    for axis in range(n):
        a = np.take(idx, range(resolution - 1), axis=axis).ravel()
        b = np.take(idx, range(1, resolution), axis=axis).ravel()
        ok = free[a] & free[b]
        a, b = a[ok], b[ok]
        blocked = np.zeros(len(a), dtype=bool)
        for s in sets:
            blocked |= s.blocks(mesh[a], mesh[b])
        for x, y in zip(a[~blocked], b[~blocked]):
            rx, ry = find(x), find(y)
            if rx != ry:
                parent[rx] = ry
    return len({find(i) for i in np.flatnonzero(free)})


def count_chambers_grid(sets, n=3, resolution=16, box=(-1.0, 1.0), check=True):
    """Complement components on a grid; grid edges crossing a set are cut.

    With ``check`` the count is repeated at double resolution and the result
    is flagged unstable when the two disagree.
    """
    count = _grid_components(sets, n, resolution, box)
    if not check:
        return GridCount(count, resolution)
    finer = _grid_components(sets, n, 2 * resolution, box)
    return GridCount(count, resolution, finer == count)


# ------------------------------------------------------------ generators

def random_polygon(rng, scale=10, max_vertices=6):
    while True:
        k = rng.randint(3, max_vertices)
        cx, cy = rng.randint(-scale, scale), rng.randint(-scale, scale)
        r = rng.randint(1, scale)
        pts = []
        for _ in range(k + 2):
            # small rational jitter keeps incidences generic
            pts.append((Fraction(cx + rng.randint(-r, r)) + Fraction(rng.randint(1, 997), 7919),
                        Fraction(cy + rng.randint(-r, r)) + Fraction(rng.randint(1, 997), 7919)))
        hull = convex_hull(pts)
        if len(hull) >= 3:
            return ConvexPolygon2D(hull)


def random_configuration(seed, m=None, max_m=6):
    rng = random.Random(seed)
    m = rng.randint(1, max_m) if m is None else m
    return [random_polygon(rng) for _ in range(m)]


LINE_WINDOW = ConvexPolygon2D([(-32, -32), (32, -32), (32, 32), (-32, 32)])


def _line_meet(l1, l2):
    (p, d), (q, e) = l1, l2
    den = d[0] * e[1] - d[1] * e[0]
    t = ((q[0] - p[0]) * e[1] - (q[1] - p[1]) * e[0]) / den
    return (p[0] + t * d[0], p[1] + t * d[1])


def generic_lines(m, seed=0, length=64):
    """m thin slabs along lines in general position; each crosses LINE_WINDOW.

    Lines are redrawn until no two are parallel, no three meet in a point and
    every crossing lies well inside the window.
    """
    rng = random.Random(seed)
    lines = []
    while len(lines) < m:
        dx, dy = rng.randint(-9, 9), rng.randint(-9, 9)
        if (dx, dy) == (0, 0):
            continue
        cand = ((Fraction(rng.randint(-4, 4)), Fraction(rng.randint(-4, 4))), (dx, dy))
        if any(dx * e[1] - dy * e[0] == 0 for _, e in lines):
            continue
        meets = [_line_meet(cand, l) for l in lines]
        if any(max(abs(x), abs(y)) >= 16 for x, y in meets):
            continue
        old = [_line_meet(a, b) for i, a in enumerate(lines) for b in lines[i + 1:]]
        if len(set(meets)) < len(meets) or set(meets) & set(old):
            continue
        lines.append(cand)
    out = []
    for (cx, cy), (dx, dy) in lines:
        top = max(abs(dx), abs(dy))
        ux, uy = Fraction(dx, top) * length, Fraction(dy, top) * length
        out.append(thin_slab((cx - ux, cy - uy), (cx + ux, cy + uy)))
    return out


def generic_slabs3(m, seed=0):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(m):
        nrm = rng.normal(size=3)
        out.append(slab3(nrm, float(rng.uniform(-0.3, 0.3))))
    return out
