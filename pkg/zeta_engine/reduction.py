"""Reduction of strip forms modulo exact differentials, and the cohomology basis.

A strip form h with x-degrees in [-m, m] is rewritten as

    p^ε h = r + D(g) + f q     (mod p^N)

with r supported on 2Γ. Phase 1 peels the top x-degrees in blocks of c, Phase 2
does the same from below and a final system clears the remaining window while
solving for r. Every block is a Z_q linear system solved through a Smith form
at precision N + θ. The block matrices depend only on (m, step) so a
``ReductionContext`` builds each of them once and shares it across monomials.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

from zeta_engine.arith import Raw, ZqRing, ceil_log, floor_log
from zeta_engine.errors import DimensionMismatch, Inconsistent
from zeta_engine.laurent import D_operator, LaurentPolynomial, StripReducer, strip_reducer
from zeta_engine.linalg import LinearSolver, Matrix, mat_sigma, reduce_matrix, smith_diagonalize, vec_mat
from zeta_engine.polytope import NewtonPolytope, PolytopeConstants

logger = logging.getLogger(__name__)

Exponent = Tuple[int, int]


@dataclass(frozen=True)
class ReductionPlan:
    p: int
    N: int
    m: int
    consts: PolytopeConstants
    c: int
    eps: int
    theta: int
    t1: int
    t2: int

    @property
    def n1(self) -> int:
        return self.m - self.t2 * self.c

    @property
    def n2(self) -> int:
        return self.m - self.t1 * self.c


def reduction_plan(consts: PolytopeConstants, p: int, N: int, m: int) -> ReductionPlan:
    k1, k2 = consts.kappa1, consts.kappa2
    c = max(k2, 1)
    eps = ceil_log(p, m * consts.M + consts.Delta)
    theta = ceil_log(p, (m + 2 * (k2 - k1 + 1)) * consts.M + consts.Delta)
    t1 = max(0, min(m + k1 - k2 + 1, m - 2 * consts.chi2) // c)
    t2 = max(0, min(m + k1 - k2 + 1, m + 2 * consts.chi1) // c)
    return ReductionPlan(p, N, m, consts, c, eps, theta, t1, t2)


@dataclass
class _Block:
    """One linear system: columns are strip forms, rows the positions to clear."""

    labels: List[Tuple[str, Exponent]]  # ("g", (a, l)) or ("r", s)
    columns: List[Dict[Exponent, Raw]]
    rows: List[Exponent]
    selects: Callable[[Exponent], bool]
    solver: Optional[LinearSolver]
    frontier: Optional[List[Exponent]] = None  # positions newly cleared; None means all


@dataclass
class ReductionResult:
    r: LaurentPolynomial
    eps: int
    g: LaurentPolynomial


class ReductionContext:
    """Shared state for every reduction against one f at one precision and one m."""

    def __init__(self, f: LaurentPolynomial, polytope: NewtonPolytope, consts: PolytopeConstants, m: int):
        self.f = f
        self.ring: ZqRing = f.ring
        self.polytope = polytope
        self.plan = reduction_plan(consts, self.ring.p, self.ring.N, m)
        self.reducer: StripReducer = strip_reducer(f)
        self.points2 = polytope.lattice_points(2)
        self._blocks: Dict[Tuple[str, int], _Block] = {}
        self._columns: Dict[Tuple[str, Exponent], Dict[Exponent, Raw]] = {}
        logger.info(
            "reduction plan: m=%d c=%d eps=%d theta=%d t1=%d t2=%d",
            m, self.plan.c, self.plan.eps, self.plan.theta, self.plan.t1, self.plan.t2,
        )

    # -- columns ------------------------------------------------------
    def _column(self, kind: str, e: Exponent) -> Dict[Exponent, Raw]:
        key = (kind, e)
        col = self._columns.get(key)
        if col is None:
            mono = LaurentPolynomial.monomial(self.ring, e)
            src = D_operator(mono, self.f) if kind == "g" else mono
            col = dict(self.reducer.reduce(src).terms)
            self._columns[key] = col
        return col

    def _build(self, labels: List[Tuple[str, Exponent]], selects: Callable[[Exponent], bool]) -> _Block:
        ring = self.ring
        columns = [self._column(kind, e) for kind, e in labels]
        row_set = {pos for col in columns for pos in col if selects(pos)}
        rows = sorted(row_set, key=lambda t: (t[1], t[0]))
        index = {pos: i for i, pos in enumerate(rows)}
        A: Matrix = [[ring.zero] * len(columns) for _ in rows]
        for k, col in enumerate(columns):
            for pos, v in col.items():
                i = index.get(pos)
                if i is not None:
                    A[i][k] = v
        solver = LinearSolver(A, ring, self.plan.theta) if rows and columns else None
        return _Block(labels, columns, rows, selects, solver)

    def _block(self, phase: str, i: int) -> _Block:
        key = (phase, i)
        block = self._blocks.get(key)
        if block is None:
            block = self._blocks[key] = self._make_block(phase, i)
        return block

    def _make_block(self, phase: str, i: int) -> _Block:
        plan = self.plan
        m, c = plan.m, plan.c
        k1, k2 = plan.consts.kappa1, plan.consts.kappa2
        strip_rows = range(self.polytope.d_b, self.polytope.d_t)
        if phase == "top":
            lo, hi = m - i * c - k2 + 2, m - (i - 1) * c + k2 - 1
            cut = m - i * c
            selects = lambda pos, cut=cut: pos[0] > cut  # noqa: E731
        elif phase == "bottom":
            lo, hi = -m + (i - 1) * c + k1 + 1, -m + i * c - k1 - 2
            cut = -m + i * c
            selects = lambda pos, cut=cut: pos[0] < cut  # noqa: E731
        else:
            lo, hi = -plan.n1 + 1 + k1, plan.n2 - 1 + k2
            selects = lambda pos: True  # noqa: E731
        labels: List[Tuple[str, Exponent]] = [("g", (a, l)) for a in range(lo, hi + 1) for l in strip_rows]
        if phase == "final":
            labels += [("r", s) for s in self.points2]
        block = self._build(labels, selects)
        if phase == "top":
            block.frontier = [(x, l) for x in range(cut + 1, cut + c + 1) for l in strip_rows]
        elif phase == "bottom":
            block.frontier = [(x, l) for x in range(cut - c, cut) for l in strip_rows]
        logger.debug("block %s/%d: %d x %d", phase, i, len(block.rows), len(labels))
        return block

    # -- solving ------------------------------------------------------
    def _apply(self, block: _Block, residual: Dict[Exponent, Raw],
               g: Dict[Exponent, Raw], r: Dict[Exponent, Raw]) -> None:
        ring = self.ring
        index = {pos: i for i, pos in enumerate(block.rows)}
        candidates = residual.keys() if block.frontier is None else [e for e in block.frontier if e in residual]
        for pos in candidates:
            if block.selects(pos) and pos not in index and not ring.is_zero(residual[pos]):
                raise Inconsistent(f"residual term at {pos} is outside the span of the block")
        if block.solver is None:
            return
        b = [residual.get(pos, ring.zero) for pos in block.rows]
        if all(ring.is_zero(v) for v in b):
            return
        x = block.solver.solve(b)
        touched = set()
        for (kind, e), col, xk in zip(block.labels, block.columns, x):
            if ring.is_zero(xk):
                continue
            target = g if kind == "g" else r
            target[e] = ring.add(target[e], xk) if e in target else xk
            for pos, v in col.items():
                cur = residual.get(pos, ring.zero)
                residual[pos] = ring.sub(cur, ring.mul(xk, v))
                touched.add(pos)
        for pos in touched:
            if ring.is_zero(residual[pos]):
                del residual[pos]

    def reduce(self, h: LaurentPolynomial, with_g: bool = True) -> ReductionResult:
        """r, ε and g with p^ε h ≡ r + D(g) (mod f, p^N); h must be a strip form."""
        ring = self.ring
        plan = self.plan
        h = h.change_ring(ring)
        if h.terms and max(abs(e[0]) for e in h.terms) > plan.m:
            raise ValueError(f"input x-degree exceeds the planned level m={plan.m}")
        scale = ring.p ** plan.eps
        residual: Dict[Exponent, Raw] = {}
        for e, c in h.terms.items():
            v = ring.scale(c, scale)
            if not ring.is_zero(v):
                residual[e] = v
        g: Dict[Exponent, Raw] = {}
        r: Dict[Exponent, Raw] = {}
        for i in range(1, plan.t1 + 1):
            self._apply(self._block("top", i), residual, g, r)
        for i in range(1, plan.t2 + 1):
            self._apply(self._block("bottom", i), residual, g, r)
        self._apply(self._block("final", 0), residual, g, r)
        if any(not ring.is_zero(v) for v in residual.values()):
            raise Inconsistent(f"{len(residual)} residual terms left after the final system")
        return ReductionResult(
            LaurentPolynomial(ring, r),
            plan.eps,
            LaurentPolynomial(ring, g) if with_g else LaurentPolynomial.zero(ring),
        )


def reduce_cohomology(h: LaurentPolynomial, f: LaurentPolynomial, polytope: NewtonPolytope,
                      consts: PolytopeConstants, m: Optional[int] = None) -> ReductionResult:
    """One-shot reduction; pipelines share a ``ReductionContext`` instead."""
    if m is None:
        m = max((abs(e[0]) for e in h.terms), default=0)
    return ReductionContext(f, polytope, consts, m).reduce(h)


def recombination_defect(h: LaurentPolynomial, result: ReductionResult, f: LaurentPolynomial) -> LaurentPolynomial:
    """Strip form of p^ε h - r - D(g); zero when the reduction is exact."""
    ring = f.ring
    h = h.change_ring(ring)
    lhs = h.scale_int(ring.p ** result.eps) - result.r - D_operator(result.g, f)
    return strip_reducer(f).reduce(lhs)


@dataclass
class CohomologyBasis:
    ring: ZqRing
    points2: List[Exponent]
    N2: Matrix
    N2inv: Matrix
    ell: int
    elements: List[LaurentPolynomial] = field(default_factory=list)

    @property
    def dimension(self) -> int:
        return len(self.points2) - self.ell

    def vector(self, r: LaurentPolynomial) -> List[Raw]:
        ring = self.ring
        index = {s: k for k, s in enumerate(self.points2)}
        vec = [ring.zero] * len(self.points2)
        for e, c in r.terms.items():
            if e not in index:
                raise ValueError(f"{e} is not a lattice point of 2Γ")
            vec[index[e]] = ring.reduce(c)
        return vec

    def coordinates(self, r: LaurentPolynomial) -> List[Raw]:
        return express_in_basis(self, r)

    def basis_rows(self, sigma: int = 0) -> Matrix:
        rows = self.N2inv[self.ell:]
        return mat_sigma(self.ring, rows, sigma) if sigma else rows


def basis_extra_precision(polytope: NewtonPolytope, p: int, n: int) -> int:
    points = len(polytope.lattice_points(1))
    points2 = len(polytope.lattice_points(2))
    ell = min(2 * points, points2)
    X = ell * polytope.width * polytope.height * n * p
    return floor_log(p, X ** (ell * n)) + 1


def cohomology_basis(f: LaurentPolynomial, polytope: NewtonPolytope, N: Optional[int] = None) -> CohomologyBasis:
    """Basis of the quotient of the 2Γ monomials by D(x^s) and f x^s for s in Γ."""
    ring = f.ring if N is None else f.ring.with_precision(N)
    N0 = basis_extra_precision(polytope, ring.p, ring.n)
    wide = ring.with_precision(ring.N + N0)
    fw = f.change_ring(wide)
    points = polytope.lattice_points(1)
    points2 = polytope.lattice_points(2)
    index = {s: k for k, s in enumerate(points2)}
    gens: List[LaurentPolynomial] = []
    for s in points:
        mono = LaurentPolynomial.monomial(wide, s)
        gens.append(D_operator(mono, fw))
        gens.append(fw * mono)
    A: Matrix = []
    for gen in gens:
        row = [wide.zero] * len(points2)
        for e, c in gen.terms.items():
            row[index[e]] = c
        A.append(row)
    smith = smith_diagonalize(wide, A)
    ell = smith.rank
    dim = len(points2) - ell
    expected = polytope.volume_x2 + 1
    if dim != expected:
        raise DimensionMismatch(f"cohomology has rank {dim}, expected 2Vol + 1 = {expected}")
    N2 = reduce_matrix(ring, smith.N2)
    N2inv = reduce_matrix(ring, smith.N2inv)
    elements = [
        LaurentPolynomial(ring, {points2[k]: v for k, v in enumerate(row)})
        for row in N2inv[ell:]
    ]
    logger.info("cohomology basis: dimension %d from %d generators (N0=%d)", dim, len(gens), N0)
    return CohomologyBasis(ring, points2, N2, N2inv, ell, elements)


def express_in_basis(basis: CohomologyBasis, r: LaurentPolynomial) -> List[Raw]:
    """Coordinates of r (support in 2Γ) in the basis, read off through N2."""
    full = vec_mat(basis.ring, basis.vector(r), basis.N2)
    return full[basis.ell:]
