"""Nondegeneracy of f̄ with respect to its Newton polytope, and input validation.

A face γ passes when f_γ, x ∂f_γ/∂x and y ∂f_γ/∂y have no common zero on the
torus over the algebraic closure. Vertices always pass. Edges reduce to a
univariate squarefreeness test. The 2-face is certified with a Gröbner basis
over GF(p); a bounded search then looks for an explicit witness.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from sympy import Integer, groebner, symbols

from config import Config
from zeta_engine.arith import (
    ExtensionField,
    Raw,
    upoly_deriv,
    upoly_eval,
    upoly_gcd,
    upoly_trim,
)
from zeta_engine.errors import Degenerate, ExceedsSearchBound, GenusZero, NonUnitVertex
from zeta_engine.laurent import LaurentPolynomial, apply_unimodular
from zeta_engine.polytope import Edge, NewtonPolytope, UnimodularMap, newton_polytope, normalize

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Witness:
    face: str
    x: Tuple[int, ...]  # coefficients over F_p of the extension's basis
    y: Tuple[int, ...]
    degree: int  # k with the point in F_{q^k}

    def raw_point(self, ext: ExtensionField) -> Tuple[Raw, Raw]:
        F = ext.field
        return F.from_coeffs(self.x), F.from_coeffs(self.y)


@dataclass(frozen=True)
class FaceCheck:
    kind: str  # vertex / edge / face
    index: int
    passed: bool
    detail: str = ""


@dataclass
class NondegeneracyReport:
    verdict: bool
    faces: List[FaceCheck] = field(default_factory=list)
    witness: Optional[Witness] = None

    def failed_faces(self) -> List[FaceCheck]:
        return [fc for fc in self.faces if not fc.passed]


def face_polynomials(fbar: LaurentPolynomial) -> Tuple[LaurentPolynomial, LaurentPolynomial, LaurentPolynomial]:
    return fbar, fbar.x_dx(), fbar.y_dy()


def _edge_polynomial(fbar: LaurentPolynomial, edge: Edge) -> Tuple[list, Tuple[int, int]]:
    dx = (edge.end[0] - edge.start[0]) // edge.length
    dy = (edge.end[1] - edge.start[1]) // edge.length
    g = [fbar.coefficient((edge.start[0] + t * dx, edge.start[1] + t * dy)) for t in range(edge.length + 1)]
    return upoly_trim(fbar.ring, g), (dx, dy)


def _ext_gcd(a: int, b: int) -> Tuple[int, int]:
    if b == 0:
        return (1 if a >= 0 else -1), 0
    s, t = _ext_gcd(b, a % b)
    return t, s - (a // b) * t


def _edge_witness(fbar: LaurentPolynomial, h: list, d: Tuple[int, int], label: str, bound: int) -> Optional[Witness]:
    """Torus point on an edge with f_γ and both scaled partials vanishing."""
    base = fbar.ring.spec
    s1, s2 = _ext_gcd(d[0], d[1])
    for k in range(1, bound + 1):
        ext = base.extension(k)
        F = ext.field
        if F.spec.q > Config.WITNESS_SEARCH_POINTS:
            break
        hk = [ext.embed(c) for c in h]
        for code in range(1, F.spec.q):
            u = F.decode(code)
            if F.is_zero(upoly_eval(F, hk, u)):
                x, y = F.pow(u, s1), F.pow(u, s2)
                return Witness(label, F.coeffs(x), F.coeffs(y), k)
    return None


def _face_is_certified_nondegenerate(fbar: LaurentPolynomial) -> bool:
    """True when f̄, x f̄_x, y f̄_y, xyz - 1 (and r̄(a)) generate the unit ideal over GF(p)."""
    ring = fbar.ring
    spec = ring.spec
    x, y, z, a = symbols("x y z a")
    i0 = min(e[0] for e in fbar.terms)
    j0 = min(e[1] for e in fbar.terms)

    def coeff_expr(c: Raw):
        return sum(Integer(ck) * a ** k for k, ck in enumerate(ring.coeffs(c)))

    polys = []
    for weight in (None, 0, 1):
        expr = Integer(0)
        for (i, j), c in fbar.terms.items():
            scale = 1 if weight is None else (i if weight == 0 else j)
            if scale % spec.p == 0:
                continue
            expr += Integer(scale) * coeff_expr(c) * x ** (i - i0) * y ** (j - j0)
        if expr != 0:
            polys.append(expr.expand())
    polys.append(x * y * z - 1)
    gens = [x, y, z]
    if spec.n > 1:
        polys.append(sum(Integer(ck) * a ** k for k, ck in enumerate(spec.rbar)))
        gens.append(a)
    basis = groebner(polys, *gens, modulus=spec.p, order="grevlex")
    return any(e.is_Number and e != 0 for e in basis.exprs)


def find_witness(fbar: LaurentPolynomial, bound: Optional[int] = None,
                 max_points: Optional[int] = None) -> Witness:
    """Search (F_{q^k}^*)² for k <= bound for a common zero of the three face polynomials."""
    bound = Config.SEARCH_BOUND if bound is None else bound
    max_points = Config.WITNESS_SEARCH_POINTS if max_points is None else max_points
    ring = fbar.ring
    polys = face_polynomials(fbar)
    j0 = min(e[1] for e in fbar.terms)
    scanned = 0
    for k in range(1, bound + 1):
        ext = ring.spec.extension(k)
        F = ext.field
        if scanned + F.spec.q - 1 > max_points:
            break
        rows = []
        for poly in polys:
            terms = [(i, j - j0, ext.embed(ring.residue_field.reduce(c))) for (i, j), c in poly.terms.items()]
            rows.append(terms)
        for code in range(1, F.spec.q):
            xv = F.decode(code)
            scanned += 1
            powers = {}
            ys = []
            for terms in rows:
                coeffs: dict = {}
                for i, j, c in terms:
                    if i not in powers:
                        powers[i] = F.pow(xv, i)
                    coeffs[j] = F.add(coeffs.get(j, F.zero), F.mul(c, powers[i]))
                deg = max(coeffs) if coeffs else -1
                ys.append(upoly_trim(F, [coeffs.get(t, F.zero) for t in range(deg + 1)]))
            g = ys[0]
            for other in ys[1:]:
                g = upoly_gcd(F, g, other)
            if len(g) <= 1:
                continue
            for ycode in range(1, F.spec.q):
                yv = F.decode(ycode)
                scanned += 1
                if F.is_zero(upoly_eval(F, g, yv)):
                    return Witness("face", F.coeffs(xv), F.coeffs(yv), k)
            if scanned > max_points:
                break
    raise ExceedsSearchBound(f"no witness over F_(q^k), k <= {bound}, within {max_points} points")


def is_nondegenerate(fbar: LaurentPolynomial, search_witness: bool = True) -> NondegeneracyReport:
    ring = fbar.ring
    if ring.N != 1:
        fbar = fbar.reduce_mod_p()
        ring = fbar.ring
    P = newton_polytope(fbar.terms)
    report = NondegeneracyReport(True)
    for idx, v in enumerate(P.vertices):
        report.faces.append(FaceCheck("vertex", idx, True))
    for idx, edge in enumerate(P.edges):
        g, d = _edge_polynomial(fbar, edge)
        common = upoly_gcd(ring, g, upoly_deriv(ring, g))
        passed = len(common) <= 1
        detail = "" if passed else f"repeated root, gcd degree {len(common) - 1}"
        report.faces.append(FaceCheck("edge", idx, passed, detail))
        if not passed:
            report.verdict = False
            if report.witness is None and search_witness:
                report.witness = _edge_witness(fbar, common, d, f"edge {idx}", degree_bound(P))
    face_ok = _face_is_certified_nondegenerate(fbar)
    report.faces.append(FaceCheck("face", 0, face_ok, "" if face_ok else "common torus zero over the closure"))
    if not face_ok:
        report.verdict = False
        if report.witness is None and search_witness:
            try:
                report.witness = find_witness(fbar, bound=degree_bound(P))
            except ExceedsSearchBound as exc:
                logger.warning("degenerate 2-face but no explicit witness: %s", exc)
    logger.info("nondegeneracy verdict %s (%d faces checked)", report.verdict, len(report.faces))
    return report


@dataclass
class ValidatedCurve:
    poly: LaurentPolynomial  # normalized f̄
    polytope: NewtonPolytope
    transform: UnimodularMap
    report: NondegeneracyReport


def normalize_input(fbar: LaurentPolynomial) -> Tuple[LaurentPolynomial, NewtonPolytope, UnimodularMap]:
    """f̄ moved by a unimodular map so its polytope has unique top/bottom vertices and 0 inside."""
    if fbar.is_zero():
        raise ValueError("f̄ must be nonzero")
    fbar = fbar.reduce_mod_p()
    P = newton_polytope(fbar.terms)
    if P.genus < 1:
        raise GenusZero(f"polytope {P.vertices} has no interior lattice point")
    U = normalize(P)
    g = apply_unimodular(fbar, U)
    Q = newton_polytope(g.terms)
    if not Q.is_normalized():
        raise AssertionError(f"normalization failed for {P.vertices}")
    for v in Q.vertices:
        if g.ring.is_zero(g.coefficient(v)):
            raise NonUnitVertex(f"vertex {v} has a zero coefficient")
    return g, Q, U


def require_nondegenerate(g: LaurentPolynomial) -> NondegeneracyReport:
    report = is_nondegenerate(g)
    if not report.verdict:
        raise Degenerate(f"f̄ is degenerate; witness {report.witness}", report)
    return report


def validate_input(fbar: LaurentPolynomial) -> ValidatedCurve:
    """Normalize f̄ and check every precondition of the pipeline."""
    g, Q, U = normalize_input(fbar)
    report = require_nondegenerate(g)
    logger.info("validated curve: genus %d, %d boundary points, map %s", Q.genus, Q.boundary_count, U)
    return ValidatedCurve(g, Q, U, report)


def face_restriction(fbar: LaurentPolynomial, label: str) -> LaurentPolynomial:
    """f_γ for a face label ('face' or 'edge k')."""
    if not label.startswith("edge"):
        return fbar
    edge = newton_polytope(fbar.terms).edges[int(label.split()[1])]
    on_edge = {
        e: c for e, c in fbar.terms.items()
        if edge.a * e[0] + edge.b * e[1] == edge.N
    }
    return LaurentPolynomial(fbar.ring, on_edge, clean=True)


def witness_residuals(fbar: LaurentPolynomial, witness: Witness) -> List[Raw]:
    """Values of f_γ, x ∂f_γ/∂x, y ∂f_γ/∂y at the witness (all zero for a valid witness)."""
    fbar = fbar.reduce_mod_p()
    ext = fbar.ring.spec.extension(witness.degree)
    x, y = witness.raw_point(ext)
    return [poly.evaluate(ext, x, y) for poly in face_polynomials(face_restriction(fbar, witness.face))]


def degree_bound(P: NewtonPolytope) -> int:
    return min(2 * P.width * P.height, Config.SEARCH_BOUND)
