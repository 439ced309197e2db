"""Overconvergent lift of the p-th power Frobenius and the differential kernel E.

The lift sends x -> x^p Z_x and y -> y^p Z_y with Z_x = 1 + δ_x Z, Z_y = 1 + δ_y Z
where δ_x, δ_y lift the p-th powers of the Nullstellensatz coefficients ᾱ, β̄.
Z solves G(Z) = X^a Y^b f^σ(x^p X, y^p Y) = 0 in Z_q[x^±, y^±]/(f), found by
Newton iteration from Z = 0 with doubling precision. Everything is kept as
strip forms truncated to the x-window of the current support budget.
"""
from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from zeta_engine.arith import Raw, ZqRing
from zeta_engine.errors import NonUnitDerivative
from zeta_engine.laurent import LaurentPolynomial, StripAlgebra
from zeta_engine.nullstellensatz import NssCertificate

logger = logging.getLogger(__name__)

Z_SLACK = 5  # budget 9pN + 5p for Z-objects
E_SLACK = 3  # budget 9pN + 3p for the kernel


def support_budget(p: int, N: int, slack: int = Z_SLACK) -> int:
    return 9 * p * N + slack * p


def _p_power_lift(poly: LaurentPolynomial, ring: ZqRing) -> LaurentPolynomial:
    """Lift of the p-th power of poly mod p: exponents times p, digits through σ."""
    return poly.reduce_mod_p().change_ring(ring).frobenius_power_p()


@dataclass
class FrobeniusLift:
    ring: ZqRing
    algebra: StripAlgebra
    Z: LaurentPolynomial
    Zx: LaurentPolynomial
    Zy: LaurentPolynomial
    Zx_inv: LaurentPolynomial
    Zy_inv: LaurentPolynomial
    delta_x: LaurentPolynomial
    delta_y: LaurentPolynomial
    budget: int
    _powers: Dict[Tuple[str, int], LaurentPolynomial] = field(default_factory=dict, repr=False)
    _images: Dict[Tuple[int, int], LaurentPolynomial] = field(default_factory=dict, repr=False)

    @property
    def p(self) -> int:
        return self.ring.p

    def _power(self, which: str, e: int) -> LaurentPolynomial:
        key = (which, e)
        hit = self._powers.get(key)
        if hit is not None:
            return hit
        base = {"x": self.Zx, "y": self.Zy, "xi": self.Zx_inv, "yi": self.Zy_inv}[which]
        value = self.algebra.power(base, e, self.budget)
        self._powers[key] = value
        return value

    def image(self, s: Tuple[int, int]) -> LaurentPolynomial:
        """Strip form of F(x^s1 y^s2) = x^{p s} Z_x^{s1} Z_y^{s2}."""
        hit = self._images.get(s)
        if hit is not None:
            return hit
        zx = self._power("x" if s[0] >= 0 else "xi", abs(s[0]))
        zy = self._power("y" if s[1] >= 0 else "yi", abs(s[1]))
        prod = self.algebra.mul(zx, zy, None)
        value = self.algebra.reduce(prod.shift((self.p * s[0], self.p * s[1])), self.budget)
        self._images[s] = value
        return value

    def apply(self, h: LaurentPolynomial) -> LaurentPolynomial:
        """F(h): σ on coefficients, x -> x^p Z_x, y -> y^p Z_y, reduced to the strip."""
        ring = self.ring
        h = h.change_ring(ring)
        acc: Dict[Tuple[int, int], Raw] = {}
        for s, c in h.terms.items():
            sc = ring.sigma(c, 1)
            for e, v in self.image(s).terms.items():
                prod = ring.mul(sc, v)
                acc[e] = ring.add(acc[e], prod) if e in acc else prod
        return LaurentPolynomial(ring, acc)

    def residual(self, f: LaurentPolynomial) -> LaurentPolynomial:
        """f^σ(x^p Z_x, y^p Z_y) reduced to the strip; zero for a correct lift."""
        return self.apply(f)


@dataclass
class FrobeniusKernel:
    E: LaurentPolynomial
    budget: int


class _GEvaluator:
    """G(Z) and its partial derivatives in X and Y through power tables."""

    def __init__(self, f: LaurentPolynomial):
        self.p = f.ring.p
        self.a = -min(e[0] for e in f.terms)
        self.b = -min(e[1] for e in f.terms)
        self.terms = [(s, c) for s, c in f.terms.items()]

    def evaluate(self, algebra: StripAlgebra, ring: ZqRing, X: LaurentPolynomial, Y: LaurentPolynomial,
                 budget: int) -> Tuple[LaurentPolynomial, LaurentPolynomial, LaurentPolynomial]:
        a, b, p = self.a, self.b, self.p
        max_x = max(s[0] for s, _ in self.terms) + a
        max_y = max(s[1] for s, _ in self.terms) + b
        one = LaurentPolynomial.constant(ring)
        xpow = [one]
        for _ in range(max_x):
            xpow.append(algebra.mul(xpow[-1], X, budget))
        ypow = [one]
        for _ in range(max_y):
            ypow.append(algebra.mul(ypow[-1], Y, budget))

        # (s2, x-exponent, y-exponent) groups for G, G_X, G_Y
        groups: List[Dict[Tuple[int, int], LaurentPolynomial]] = [defaultdict(lambda: None) for _ in range(3)]
        for (s1, s2), c in self.terms:
            sc = ring.sigma(ring.reduce(c), 1)
            ex, ey = s1 + a, s2 + b
            parts = [(0, sc, ex, ey)]
            if ex > 0:
                parts.append((1, ring.scale(sc, ex), ex - 1, ey))
            if ey > 0:
                parts.append((2, ring.scale(sc, ey), ex, ey - 1))
            for which, coeff, kx, ky in parts:
                piece = xpow[kx].scale(coeff).shift((p * s1, 0))
                key = (s2, ky)
                cur = groups[which][key]
                groups[which][key] = piece if cur is None else cur + piece

        results = []
        for which in range(3):
            total = LaurentPolynomial.zero(ring)
            for (s2, ky), inner in groups[which].items():
                prod = inner * ypow[ky]
                total = total + algebra.reduce(prod.shift((0, p * s2)), budget)
            results.append(total)
        return results[0], results[1], results[2]


def lift_frobenius(f: LaurentPolynomial, cert: NssCertificate, N: int, algebra: StripAlgebra,
                   slack: int = Z_SLACK) -> FrobeniusLift:
    """Newton iteration for Z with precisions 2, 4, ..., N."""
    ring = f.ring.with_precision(N)
    p = ring.p
    f = f.change_ring(ring)
    delta_x = _p_power_lift(cert.alpha, ring)
    delta_y = _p_power_lift(cert.beta, ring)
    sdx = algebra.reduce(delta_x)
    sdy = algebra.reduce(delta_y)
    evaluator = _GEvaluator(f)

    Z = LaurentPolynomial.zero(ring.with_precision(1))
    u = LaurentPolynomial.constant(ring.with_precision(1))
    prec = 1
    while prec < N:
        prec = min(2 * prec, N)
        R = ring.with_precision(prec)
        budget = support_budget(p, prec, slack)
        one = LaurentPolynomial.constant(R)
        Z, u = Z.change_ring(R), u.change_ring(R)
        dx, dy = sdx.change_ring(R), sdy.change_ring(R)
        X = one + algebra.mul(dx, Z, budget)
        Y = one + algebra.mul(dy, Z, budget)
        G, GX, GY = evaluator.evaluate(algebra, R, X, Y, budget)
        Gp = algebra.mul(dx, GX, budget) + algebra.mul(dy, GY, budget)
        if (Gp - one).valuation() < 1:
            raise NonUnitDerivative(f"G'(Z) is not 1 mod p at precision {prec}")
        res = one - algebra.mul(Gp, u, budget)
        rounds = 0
        while res.valuation() < prec:
            rounds += 1
            if rounds > prec.bit_length() + 2:
                raise NonUnitDerivative(f"inverse of G'(Z) does not converge at precision {prec}")
            u = u + algebra.mul(u, res, budget)
            res = one - algebra.mul(Gp, u, budget)
        Z = Z - algebra.mul(u, G, budget)
        logger.debug("Frobenius Newton step: precision %d, %d terms in Z", prec, len(Z))

    budget = support_budget(p, N, slack)
    one = LaurentPolynomial.constant(ring)
    Z = Z.change_ring(ring)
    Zx = one + algebra.mul(sdx, Z, budget)
    Zy = one + algebra.mul(sdy, Z, budget)
    Zx_inv = algebra.inverse(Zx, budget)
    Zy_inv = algebra.inverse(Zy, budget)
    logger.info("Frobenius lift at precision %d: budget %d, %d terms in Z_x", N, budget, len(Zx))
    return FrobeniusLift(ring, algebra, Z, Zx, Zy, Zx_inv, Zy_inv, delta_x, delta_y, budget)


def precompute_E(lift: FrobeniusLift, cert: NssCertificate, f: LaurentPolynomial,
                 slack: int = E_SLACK) -> FrobeniusKernel:
    """E = y f_y (F(β) A1 - F(α) A2) - x f_x (F(β) B1 - F(α) B2).

    A1 = p + x∂_x Z_x / Z_x, A2 = x∂_x Z_y / Z_y, B1 = y∂_y Z_x / Z_x,
    B2 = p + y∂_y Z_y / Z_y, the logarithmic derivatives of x^p Z_x and y^p Z_y.
    """
    ring = lift.ring
    alg = lift.algebra
    B = lift.budget
    f = f.change_ring(ring)
    p_const = LaurentPolynomial.constant(ring, ring.p)
    A1 = p_const + alg.mul(lift.Zx.x_dx(), lift.Zx_inv, B)
    A2 = alg.mul(lift.Zy.x_dx(), lift.Zy_inv, B)
    B1 = alg.mul(lift.Zx.y_dy(), lift.Zx_inv, B)
    B2 = p_const + alg.mul(lift.Zy.y_dy(), lift.Zy_inv, B)
    F_alpha = lift.apply(cert.alpha)
    F_beta = lift.apply(cert.beta)
    first = alg.mul(F_beta, A1, B) - alg.mul(F_alpha, A2, B)
    second = alg.mul(F_beta, B1, B) - alg.mul(F_alpha, B2, B)
    budget = support_budget(ring.p, ring.N, slack)
    E = alg.reduce(f.y_dy() * first - f.x_dx() * second, budget)
    logger.info("kernel E: %d terms, budget %d", len(E), budget)
    return FrobeniusKernel(E, budget)


def kernel_window_ok(kernel: FrobeniusKernel, algebra: StripAlgebra) -> bool:
    lo, hi = algebra.window(kernel.budget)
    return all(lo <= e[0] <= hi for e in kernel.E.terms)


def frobenius_action(lift: FrobeniusLift, kernel: FrobeniusKernel, s: Tuple[int, int],
                     budget: Optional[int] = None) -> LaurentPolynomial:
    """F(x^s)·E in the strip."""
    budget = lift.budget if budget is None else budget
    return lift.algebra.mul(lift.image(s), kernel.E, budget)
