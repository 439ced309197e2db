"""Pipeline orchestration: precision plan, Frobenius matrix, norm, characteristic
polynomial and the zeta function of the torus part of the curve.
"""
from __future__ import annotations

import logging
import math
import multiprocessing
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from config import Config
from utils.timing import StageTimer
from zeta_engine.arith import ZqRing, ceil_log
from zeta_engine.errors import PrecisionExhausted, WeilViolation
from zeta_engine.frobenius import (
    FrobeniusKernel,
    FrobeniusLift,
    frobenius_action,
    lift_frobenius,
    precompute_E,
    support_budget,
)
from zeta_engine.laurent import LaurentPolynomial, StripAlgebra
from zeta_engine.linalg import Matrix, char_poly, mat_mul, mat_sigma
from zeta_engine.nondegen import normalize_input, require_nondegenerate
from zeta_engine.nullstellensatz import solve_nss
from zeta_engine.polytope import NewtonPolytope, constants
from zeta_engine.reduction import (
    CohomologyBasis,
    ReductionContext,
    cohomology_basis,
    recombination_defect,
)

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Precision
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PrecisionPlan:
    N: int
    eps_bound: int
    first_term: int


def _twist(P: NewtonPolytope) -> int:
    """g + R - 1, the power of q dividing χ(qt)."""
    return P.genus + P.boundary_count - 1


def coefficient_bound(P: NewtonPolytope, q: int) -> int:
    """Bound on |χ_i| used to lift coefficients from Z/p^k."""
    d = P.volume_x2 + 1
    return math.comb(d, d // 2) * q ** _twist(P)


def weil_window(P: NewtonPolytope, q: int) -> int:
    return 2 ** (P.volume_x2 + 1) * q ** _twist(P)


def _eps_bound(P: NewtonPolytope, p: int, N: int) -> int:
    consts = constants(P)
    reach = max(-consts.chi1, consts.chi2)
    return ceil_log(p, support_budget(p, N) * reach * P.height + P.height * P.width)


def precision_satisfied(P: NewtonPolytope, p: int, n: int, N: int) -> bool:
    first = ceil_log(p, 2 * coefficient_bound(P, p ** n))
    return N >= first + n * (P.volume_x2 + 1) * _eps_bound(P, p, N)


def determine_precision(P: NewtonPolytope, p: int, n: int) -> PrecisionPlan:
    """Least N with N >= first term + n(2Vol+1)·ε(N), by fixed-point iteration."""
    first = ceil_log(p, 2 * coefficient_bound(P, p ** n))
    d = P.volume_x2 + 1
    N = first
    for _ in range(Config.FIXED_POINT_LIMIT):
        eps = _eps_bound(P, p, N)
        nxt = first + n * d * eps
        if nxt == N:
            logger.info("precision plan: N=%d (first term %d, eps %d)", N, first, eps)
            return PrecisionPlan(N, eps, first)
        N = nxt
    raise RuntimeError(f"precision iteration did not settle within {Config.FIXED_POINT_LIMIT} steps")


# ---------------------------------------------------------------------------
# Frobenius matrix and norm
# ---------------------------------------------------------------------------

@dataclass
class FrobeniusMatrix:
    """Rows are the images of the basis elements, scaled by p^eps."""

    matrix: Matrix
    eps: int
    N: int


# Inputs of the per-monomial map; set before the pool forks so workers inherit them.
_MONOMIAL_JOB: Optional[tuple] = None


def _reduce_monomial(s: Tuple[int, int]) -> List:
    f, lift, kernel, basis, context, check = _MONOMIAL_JOB
    h = frobenius_action(lift, kernel, s)
    result = context.reduce(h, with_g=check)
    if check and not recombination_defect(h, result, f).is_zero():
        raise AssertionError(f"recombination failed for x^{s}")
    return basis.vector(result.r)


def _fork_context():
    try:
        return multiprocessing.get_context("fork")
    except ValueError:
        return None


def frobenius_matrix(f: LaurentPolynomial, lift: FrobeniusLift, kernel: FrobeniusKernel,
                     basis: CohomologyBasis, context: ReductionContext,
                     threads: int = 1, check: Optional[bool] = None) -> FrobeniusMatrix:
    """Reduce F(x^s)·E for every s in 2Γ; `threads` > 1 forks that many worker processes."""
    global _MONOMIAL_JOB
    ring = basis.ring
    check = Config.CHECK_RECOMBINATION if check is None else check

    points = basis.points2
    mp_context = _fork_context() if threads > 1 else None
    if threads > 1 and mp_context is None:
        logger.warning("fork is unavailable on this platform; reducing %d monomials serially", len(points))
    _MONOMIAL_JOB = (f, lift, kernel, basis, context, check)
    try:
        if mp_context is not None:
            with ProcessPoolExecutor(max_workers=threads, mp_context=mp_context) as pool:
                R = list(pool.map(_reduce_monomial, points))
        else:
            R = [_reduce_monomial(s) for s in points]
    finally:
        _MONOMIAL_JOB = None
    images = mat_mul(ring, basis.basis_rows(sigma=1), R)
    full = mat_mul(ring, images, basis.N2)
    matrix = [row[basis.ell:] for row in full]
    logger.info("Frobenius matrix %dx%d, eps=%d", len(matrix), len(matrix), context.plan.eps)
    return FrobeniusMatrix(matrix, context.plan.eps, ring.N)


def norm_matrix(ring: ZqRing, M: Matrix, n: int) -> Matrix:
    """M^{σ^{n-1}} ··· M^σ · M by doubling over the bits of n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    acc = [list(row) for row in M]
    k = 1
    for bit in bin(n)[3:]:
        acc = mat_mul(ring, mat_sigma(ring, acc, k), acc)
        k *= 2
        if bit == "1":
            acc = mat_mul(ring, mat_sigma(ring, M, k), acc)
            k += 1
    return acc


# ---------------------------------------------------------------------------
# Assembly
# ---------------------------------------------------------------------------

@dataclass
class ZetaResult:
    p: int
    n: int
    chi: List[int]
    P: List[int]
    genus: int
    boundary_points: int
    volume_x2: int
    precision_N: int
    eps: int = 0
    timings_ms: Dict[str, float] = field(default_factory=dict)

    @property
    def q(self) -> int:
        return self.p ** self.n

    def power_sums(self, kmax: int) -> List[int]:
        """Σ α_i^k for k = 1..kmax where P(t) = Π(1 - α_i t)."""
        a = self.P + [0] * max(0, kmax + 1 - len(self.P))
        sums: List[int] = []
        for k in range(1, kmax + 1):
            s = -k * a[k] - sum(a[i] * sums[k - i - 1] for i in range(1, k))
            sums.append(s)
        return sums

    def point_count(self, k: int) -> int:
        return self.point_counts(k)[-1]

    def point_counts(self, kmax: int) -> List[int]:
        q = self.q
        return [q ** k - s for k, s in enumerate(self.power_sums(kmax), start=1)]

    def to_dict(self, kmax: Optional[int] = None) -> dict:
        kmax = Config.DEFAULT_KMAX if kmax is None else kmax
        return {
            "p": self.p,
            "n": self.n,
            "q": self.q,
            "chi": list(self.chi),
            "P": list(self.P),
            "genus": self.genus,
            "boundary_points": self.boundary_points,
            "volume_x2": self.volume_x2,
            "precision_N": self.precision_N,
            "point_counts": [[k, nk] for k, nk in enumerate(self.point_counts(kmax), start=1)],
            "timings_ms": dict(self.timings_ms),
        }


def assemble_zeta(charpoly: List, eps: int, N: int, P: NewtonPolytope, ring: ZqRing) -> ZetaResult:
    """χ from det(tI - M_n) with M_n = p^{nε}·(norm matrix), lifted to Z."""
    p, n = ring.p, ring.n
    q = p ** n
    d = len(charpoly) - 1
    twist = _twist(P)
    bound = coefficient_bound(P, q)
    window = weil_window(P, q)
    # det(tI - p^{nε}·M) is only known to N - nε·d digits, in every coefficient
    prec = N - n * eps * d
    if p ** max(prec, 0) < 2 * bound:
        raise PrecisionExhausted(f"{prec} correct digits cannot separate |χ_i| <= {bound}")
    mod = p ** prec
    chi: List[int] = []
    for i, c in enumerate(charpoly):
        shift = n * eps * (d - i)
        coeffs = ring.coeffs(ring.reduce(c))
        if any(ck % p ** N for ck in coeffs[1:]):
            raise PrecisionExhausted(f"coefficient {i} is not in Z_p at precision {N}")
        if coeffs[0] % p ** shift:
            raise PrecisionExhausted(f"coefficient {i} is not divisible by p^{shift}")
        value = (coeffs[0] // p ** shift) % mod
        if value > mod // 2:
            value -= mod
        if abs(value) > window:
            raise WeilViolation(f"|χ_{i}| = {abs(value)} exceeds {window}")
        chi.append(value)

    qt = q ** twist
    if abs(chi[0]) != qt:
        raise WeilViolation(f"χ(0) = {chi[0]} is not ±q^{twist}")
    if chi[0] < 0:
        chi = [-c for c in chi]
    Pcoeffs: List[int] = []
    for i, c in enumerate(chi):
        num = c * q ** i
        if num % qt:
            raise WeilViolation(f"P has a non-integral coefficient at degree {i}")
        Pcoeffs.append(num // qt)
    result = ZetaResult(p, n, chi, Pcoeffs, P.genus, P.boundary_count, P.volume_x2, N, eps)
    counts = result.point_counts(Config.DEFAULT_KMAX)
    for k, nk in enumerate(counts, start=1):
        if not 0 <= nk <= (q ** k - 1) ** 2:
            raise WeilViolation(f"N_{k} = {nk} is outside [0, (q^{k} - 1)^2]")
    logger.info("zeta assembled: chi=%s N_1=%d", chi, counts[0])
    return result


# ---------------------------------------------------------------------------
# Entry points
# ---------------------------------------------------------------------------

def run_pipeline(fbar: LaurentPolynomial, precision_override: Optional[int] = None,
                 threads: int = 1, check_recombination: Optional[bool] = None) -> ZetaResult:
    timer = StageTimer()
    spec = fbar.ring.spec
    p, n = spec.p, spec.n

    with timer.stage("polytope"):
        g, Q, U = normalize_input(fbar)
        consts = constants(Q)
    with timer.stage("nondegen"):
        require_nondegenerate(g)
    with timer.stage("precision"):
        if precision_override is not None:
            logger.warning("precision override N=%d bypasses the precision plan", precision_override)
            N = precision_override
        else:
            N = determine_precision(Q, p, n).N
    ring = spec.ring(N)
    f = g.change_ring(ring)
    with timer.stage("nullstellensatz"):
        cert = solve_nss(f, N)
    with timer.stage("frobenius"):
        algebra = StripAlgebra(f, Q, consts)
        lift = lift_frobenius(f, cert, N, algebra)
    with timer.stage("kernel"):
        kernel = precompute_E(lift, cert, f)
    with timer.stage("basis"):
        basis = cohomology_basis(f, Q, N)
    with timer.stage("matrix"):
        m = lift.budget * max(-consts.chi1, consts.chi2)
        context = ReductionContext(f, Q, consts, m)
        fm = frobenius_matrix(f, lift, kernel, basis, context, threads, check_recombination)
    with timer.stage("norm"):
        Mn = norm_matrix(ring, fm.matrix, n)
    with timer.stage("charpoly"):
        cp = char_poly(ring, Mn)
    with timer.stage("zeta"):
        result = assemble_zeta(cp, fm.eps, N, Q, ring)
    result.timings_ms = dict(timer.timings_ms)
    logger.info("pipeline finished in %.0f ms", timer.total_ms())
    return result


def compute_zeta(fbar: LaurentPolynomial, precision_override: Optional[int] = None,
                 threads: Optional[int] = None) -> ZetaResult:
    return run_pipeline(fbar, precision_override, Config.THREADS if threads is None else threads)
