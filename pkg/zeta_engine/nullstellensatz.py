"""Certificates 1 = γ f + α x f_x + β y f_y with supports in 2Γ."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional

from zeta_engine.arith import Raw
from zeta_engine.errors import NoUnitPivot
from zeta_engine.laurent import LaurentPolynomial
from zeta_engine.polytope import NewtonPolytope, newton_polytope

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class NssCertificate:
    gamma: LaurentPolynomial
    alpha: LaurentPolynomial
    beta: LaurentPolynomial
    precision: int

    def residual(self, f: LaurentPolynomial) -> LaurentPolynomial:
        return self.gamma * f + self.alpha * f.x_dx() + self.beta * f.y_dy()

    def within(self, P: NewtonPolytope, m: int = 2) -> bool:
        return all(P.contains(e, m) for poly in (self.gamma, self.alpha, self.beta) for e in poly.terms)


def solve_nss(f: LaurentPolynomial, N: Optional[int] = None) -> NssCertificate:
    """Solve for the certificate by Gauss-Jordan elimination with unit pivots only."""
    ring = f.ring if N is None else f.ring.with_precision(N)
    f = f.change_ring(ring)
    P = newton_polytope(f.terms)
    cols = P.lattice_points(2)
    rows = P.lattice_points(3)
    row_index = {pt: k for k, pt in enumerate(rows)}
    blocks = (f, f.x_dx(), f.y_dy())
    ncols = 3 * len(cols)

    # dense augmented matrix, one dict per row for sparsity
    matrix: List[Dict[int, Raw]] = [dict() for _ in rows]
    for b, poly in enumerate(blocks):
        for k, s in enumerate(cols):
            col = b * len(cols) + k
            for (i, j), c in poly.terms.items():
                matrix[row_index[(i + s[0], j + s[1])]][col] = c
    rhs: List[Raw] = [ring.zero] * len(rows)
    rhs[row_index[(0, 0)]] = ring.one

    pivots: Dict[int, int] = {}  # row -> column
    for r in range(len(rows)):
        row = matrix[r]
        pivot = next((c for c in sorted(row) if c not in pivots.values() and ring.is_unit(row[c])), None)
        if pivot is None:
            raise NoUnitPivot(f"no unit pivot in row {rows[r]} of the Nullstellensatz system", row=rows[r])
        inv = ring.inv(row[pivot])
        matrix[r] = row = {c: ring.mul(v, inv) for c, v in row.items()}
        rhs[r] = ring.mul(rhs[r], inv)
        for other in range(len(rows)):
            if other == r:
                continue
            factor = matrix[other].get(pivot)
            if factor is None or ring.is_zero(factor):
                continue
            target = matrix[other]
            for c, v in row.items():
                val = ring.sub(target.get(c, ring.zero), ring.mul(factor, v))
                if ring.is_zero(val):
                    target.pop(c, None)
                else:
                    target[c] = val
            rhs[other] = ring.sub(rhs[other], ring.mul(factor, rhs[r]))
        pivots[r] = pivot

    solution: Dict[int, Raw] = {pivots[r]: rhs[r] for r in pivots}
    parts = []
    for b in range(3):
        terms = {s: solution[b * len(cols) + k] for k, s in enumerate(cols) if b * len(cols) + k in solution}
        parts.append(LaurentPolynomial(ring, terms))
    cert = NssCertificate(parts[0], parts[1], parts[2], ring.N)
    residual = cert.residual(f)
    if residual != LaurentPolynomial.constant(ring):
        raise AssertionError("Nullstellensatz residual check failed")
    logger.info("Nullstellensatz certificate: %d x %d system at precision %d", len(rows), ncols, ring.N)
    return cert
