"""Lattice geometry of Newton polytopes and the constants derived from them."""
from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from zeta_engine.errors import DimensionTooLow, GenusZero

logger = logging.getLogger(__name__)

LatticePoint = Tuple[int, int]


def _cross(o: LatticePoint, a: LatticePoint, b: LatticePoint) -> int:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _convex_hull(points: Iterable[LatticePoint]) -> List[LatticePoint]:
    """Counter-clockwise hull without collinear points (monotone chain)."""
    pts = sorted(set((int(x), int(y)) for x, y in points))
    if len(pts) <= 2:
        return pts
    lower: List[LatticePoint] = []
    for pt in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], pt) <= 0:
            lower.pop()
        lower.append(pt)
    upper: List[LatticePoint] = []
    for pt in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], pt) <= 0:
            upper.pop()
        upper.append(pt)
    return lower[:-1] + upper[:-1]


@dataclass(frozen=True)
class Edge:
    start: LatticePoint
    end: LatticePoint
    normal: Tuple[int, int]  # primitive, pointing inward
    N: int  # normal . start
    length: int  # arithmetic length

    @property
    def a(self) -> int:
        return self.normal[0]

    @property
    def b(self) -> int:
        return self.normal[1]


@dataclass(frozen=True)
class UnimodularMap:
    """Exponent map e -> U e + shift with |det U| = 1."""

    matrix: Tuple[Tuple[int, int], Tuple[int, int]] = ((1, 0), (0, 1))
    shift: Tuple[int, int] = (0, 0)

    def __post_init__(self):
        if abs(self.det) != 1:
            raise ValueError(f"matrix {self.matrix} is not unimodular")

    @property
    def det(self) -> int:
        (a, b), (c, d) = self.matrix
        return a * d - b * c

    def apply(self, e: Sequence[int]) -> LatticePoint:
        (a, b), (c, d) = self.matrix
        return (a * e[0] + b * e[1] + self.shift[0], c * e[0] + d * e[1] + self.shift[1])

    def inverse(self) -> "UnimodularMap":
        (a, b), (c, d) = self.matrix
        det = self.det
        inv = ((d * det, -b * det), (-c * det, a * det))
        (ia, ib), (ic, id_) = inv
        s = self.shift
        return UnimodularMap(inv, (-(ia * s[0] + ib * s[1]), -(ic * s[0] + id_ * s[1])))

    def compose(self, other: "UnimodularMap") -> "UnimodularMap":
        """self after other."""
        (a, b), (c, d) = self.matrix
        (e, f), (g, h) = other.matrix
        mat = ((a * e + b * g, a * f + b * h), (c * e + d * g, c * f + d * h))
        return UnimodularMap(mat, self.apply(other.shift))

    @property
    def is_identity(self) -> bool:
        return self.matrix == ((1, 0), (0, 1)) and self.shift == (0, 0)


@dataclass(frozen=True)
class PolytopeConstants:
    chi1: int
    chi2: int
    kappa1: int
    kappa2: int
    M: int
    Delta: int
    lam: int


class NewtonPolytope:
    """Two-dimensional lattice polygon with clockwise vertices starting at the top."""

    def __init__(self, vertices: Sequence[LatticePoint]):
        self.vertices: List[LatticePoint] = [tuple(v) for v in vertices]
        self.edges: List[Edge] = []
        k = len(self.vertices)
        for i in range(k):
            v, w = self.vertices[i], self.vertices[(i + 1) % k]
            dx, dy = w[0] - v[0], w[1] - v[1]
            length = math.gcd(abs(dx), abs(dy))
            normal = (dy // length, -dx // length)
            self.edges.append(Edge(v, w, normal, normal[0] * v[0] + normal[1] * v[1], length))
        xs = [v[0] for v in self.vertices]
        ys = [v[1] for v in self.vertices]
        self.x_min, self.x_max = min(xs), max(xs)
        self.d_b, self.d_t = min(ys), max(ys)
        self.width = self.x_max - self.x_min
        self.height = self.d_t - self.d_b
        self.c_t = min(v[0] for v in self.vertices if v[1] == self.d_t)
        self.c_b = min(v[0] for v in self.vertices if v[1] == self.d_b)

    def __repr__(self) -> str:
        return f"NewtonPolytope({self.vertices})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, NewtonPolytope) and other.vertices == self.vertices

    def __hash__(self) -> int:
        return hash(tuple(self.vertices))

    @property
    def w(self) -> int:
        return self.width

    @property
    def h(self) -> int:
        return self.height

    @cached_property
    def _normals(self) -> Tuple[np.ndarray, np.ndarray]:
        normals = np.array([e.normal for e in self.edges], dtype=np.int64)
        consts = np.array([e.N for e in self.edges], dtype=np.int64)
        return normals, consts

    def lattice_points(self, m: int = 1, strict: bool = False) -> List[LatticePoint]:
        """Points of mΓ ∩ Z² sorted by y, then x."""
        if m == 0:
            return [(0, 0)] if not strict and self.contains((0, 0)) else []
        normals, consts = self._normals
        xs = np.arange(m * self.x_min, m * self.x_max + 1, dtype=np.int64)
        ys = np.arange(m * self.d_b, m * self.d_t + 1, dtype=np.int64)
        gy, gx = np.meshgrid(ys, xs, indexing="ij")
        pts = np.stack([gx.ravel(), gy.ravel()], axis=1)
        vals = pts @ normals.T
        bound = m * consts
        mask = np.all(vals > bound, axis=1) if strict else np.all(vals >= bound, axis=1)
        return [(int(x), int(y)) for x, y in pts[mask]]

    def interior_points(self, m: int = 1) -> List[LatticePoint]:
        return self.lattice_points(m, strict=True)

    def contains(self, q: Sequence[int], m: int = 1, strict: bool = False) -> bool:
        for e in self.edges:
            val = e.a * q[0] + e.b * q[1]
            if val < m * e.N or (strict and val == m * e.N):
                return False
        return True

    @cached_property
    def genus(self) -> int:
        return len(self.interior_points())

    @cached_property
    def boundary_count(self) -> int:
        return sum(e.length for e in self.edges)

    @cached_property
    def volume(self) -> Fraction:
        k = len(self.vertices)
        twice = 0
        for i in range(k):
            (x0, y0), (x1, y1) = self.vertices[i], self.vertices[(i + 1) % k]
            twice += x0 * y1 - x1 * y0
        return Fraction(abs(twice), 2)

    @property
    def volume_x2(self) -> int:
        return int(2 * self.volume)

    def dilate(self, m: int) -> "NewtonPolytope":
        return newton_polytope([(m * x, m * y) for x, y in self.vertices])

    def transform(self, U: UnimodularMap) -> "NewtonPolytope":
        return newton_polytope([U.apply(v) for v in self.vertices])

    def level(self, q: Sequence[int]) -> Fraction:
        return polytope_level(self, q)

    @property
    def unique_top(self) -> bool:
        return sum(1 for v in self.vertices if v[1] == self.d_t) == 1

    @property
    def unique_bottom(self) -> bool:
        return sum(1 for v in self.vertices if v[1] == self.d_b) == 1

    def is_normalized(self) -> bool:
        return self.unique_top and self.unique_bottom and self.contains((0, 0), strict=True)

    def scott_bound_ok(self) -> bool:
        g = self.genus
        return g < 1 or len(self.lattice_points()) <= 3 * g + 7

    def mirrored(self) -> "NewtonPolytope":
        return newton_polytope([(-x, y) for x, y in self.vertices])


def newton_polytope(support: Iterable[Sequence[int]]) -> NewtonPolytope:
    pts = [tuple(int(c) for c in s) for s in support]
    if not pts:
        raise ValueError("support must be nonempty")
    hull = _convex_hull(pts)
    if len(hull) < 3:
        raise DimensionTooLow(f"Newton polytope of {len(set(pts))} points has dimension < 2")
    hull.reverse()
    top = max(hull, key=lambda v: (v[1], -v[0]))
    i = hull.index(top)
    return NewtonPolytope(hull[i:] + hull[:i])


def minkowski_sum(P: NewtonPolytope, Q: NewtonPolytope) -> NewtonPolytope:
    return newton_polytope([(a[0] + b[0], a[1] + b[1]) for a in P.vertices for b in Q.vertices])


def minkowski_contains(P: NewtonPolytope, Q: NewtonPolytope, q: Sequence[int]) -> bool:
    return minkowski_sum(P, Q).contains(q)


def genus(P: NewtonPolytope) -> int:
    return P.genus


def boundary_count(P: NewtonPolytope) -> int:
    return P.boundary_count


def volume(P: NewtonPolytope) -> Fraction:
    return P.volume


def lattice_points(P: NewtonPolytope, m: int = 1) -> List[LatticePoint]:
    return P.lattice_points(m)


def interior_points(P: NewtonPolytope, m: int = 1) -> List[LatticePoint]:
    return P.interior_points(m)


def dilate(P: NewtonPolytope, m: int) -> NewtonPolytope:
    return P.dilate(m)


def polytope_level(P: NewtonPolytope, q: Sequence[int]) -> Fraction:
    """Smallest m >= 0 with q in mΓ; needs the origin strictly inside."""
    best = Fraction(0)
    for e in P.edges:
        if e.N >= 0:
            raise ValueError("polytope_level needs the origin in the interior")
        val = Fraction(e.a * q[0] + e.b * q[1], e.N)
        if val > best:
            best = val
    return best


def _ext_gcd(a: int, b: int) -> Tuple[int, int, int]:
    if b == 0:
        return (abs(a), (1 if a >= 0 else -1), 0)
    g, s, t = _ext_gcd(b, a % b)
    return g, t, s - (a // b) * t


def _t_sequence() -> Iterable[int]:
    yield 0
    for k in itertools.count(1):
        yield k
        yield -k


def normalize(P: NewtonPolytope) -> UnimodularMap:
    """Unimodular map giving unique top and bottom vertices and the origin inside.

    Deterministic: the lexicographically smallest farthest vertex pair, then
    the first t in 0, 1, -1, 2, ... that separates top and bottom, then a shift
    by the lexicographically smallest interior point.
    """
    if P.genus < 1:
        raise GenusZero(f"{P!r} has no interior lattice point")
    if P.unique_top and P.unique_bottom:
        linear = UnimodularMap()
    else:
        best: Optional[Tuple[int, Tuple[LatticePoint, LatticePoint]]] = None
        for u, v in itertools.combinations(sorted(P.vertices), 2):
            dist = (u[0] - v[0]) ** 2 + (u[1] - v[1]) ** 2
            if best is None or dist > best[0]:
                best = (dist, (u, v))
        u, v = best[1]
        d1, d2 = v[0] - u[0], v[1] - u[1]
        g = math.gcd(abs(d1), abs(d2))
        d1, d2 = d1 // g, d2 // g
        alpha = (-d2, d1)
        _, s, t = _ext_gcd(d1, d2)
        linear = None
        for k in _t_sequence():
            beta = (s + k * alpha[0], t + k * alpha[1])
            cand = UnimodularMap((alpha, beta))
            image = P.transform(cand)
            if image.unique_top and image.unique_bottom:
                linear = cand
                break
    image = P.transform(linear)
    if image.contains((0, 0), strict=True):
        logger.debug("normalize: linear part %s, no shift", linear.matrix)
        return linear
    centre = min(image.interior_points())
    shifted = UnimodularMap(linear.matrix, (-centre[0], -centre[1]))
    logger.debug("normalize: linear part %s, shift %s", shifted.matrix, shifted.shift)
    return shifted


def _upper_bound_x(P: NewtonPolytope) -> Fraction:
    """Bound on the x-extent of strip forms of L(D_C), on the positive side."""
    verts = P.vertices
    k = len(verts)
    top_idx = verts.index((P.c_t, P.d_t))
    bot_idx = verts.index((P.c_b, P.d_b))
    a, b = verts[(top_idx + 1) % k]
    s_t = Fraction(a - P.c_t, P.d_t - b) if P.d_t != b else Fraction(0)
    a2, b2 = verts[(bot_idx - 1) % k]
    s_b = Fraction(a2 - P.c_b, b2 - P.d_b) if b2 != P.d_b else Fraction(0)
    t_top = P.c_t + max(s_t, 0) * P.d_t
    t_bot = P.c_b + max(s_b, 0) * (-P.d_b)
    return max(t_top, t_bot, Fraction(P.x_max))


def constants(P: NewtonPolytope) -> PolytopeConstants:
    """χ, κ, M and Δ for a normalized polytope."""
    if not P.is_normalized():
        raise ValueError(f"{P!r} is not normalized")
    chi2 = math.ceil(_upper_bound_x(P))
    chi1 = -math.ceil(_upper_bound_x(P.mirrored()))
    M = max(abs(e.a) for e in P.edges)
    E_y = [max(0, -(P.d_t - 1) * e.b, -P.d_b * e.b) for e in P.edges]
    Delta = max(E_y)
    lam = 1
    for e, ey in zip(P.edges, E_y):
        lam = max(lam, -((-(-e.N + abs(e.a) + ey)) // (-e.N)))
    consts = PolytopeConstants(chi1, chi2, lam * chi1, lam * chi2, M, Delta, lam)
    logger.debug("polytope constants %s", consts)
    return consts
