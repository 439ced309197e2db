"""Brute-force torus point counts over F_{q^k}, and counts read off a zeta function.

Field elements are handled as discrete logarithms to a fixed generator; zero is
the sentinel L = Q - 1. Sums go through the Zech table zech[d] = log(1 + g^d).
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

import numpy as np

from config import Config
from zeta_engine.arith import FieldSpec, primitive_element
from zeta_engine.errors import TooLarge
from zeta_engine.laurent import LaurentPolynomial
from zeta_engine.zeta import ZetaResult, compute_zeta

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ZechTables:
    Q: int
    exp: np.ndarray    # log -> code
    log: np.ndarray    # code -> log, zero maps to L
    zech: np.ndarray   # d -> log(1 + g^d), L when 1 + g^d = 0
    trace: Optional[np.ndarray] = None  # log -> absolute trace (characteristic 2 only)

    @property
    def L(self) -> int:
        return self.Q - 1

    def add(self, a: int, b: int) -> int:
        L = self.L
        if a == L:
            return b
        if b == L:
            return a
        z = int(self.zech[(b - a) % L])
        return L if z == L else (a + z) % L

    def add_vec(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        L = self.L
        a_zero, b_zero = a == L, b == L
        d = np.where(a_zero | b_zero, 0, (b - a) % L)
        z = self.zech[d]
        out = np.where(z == L, L, (a + z) % L)
        out = np.where(a_zero, b, out)
        return np.where(b_zero, a, out)

    def neg(self, a: int) -> int:
        if a == self.L:
            return a
        # -1 = g^{L/2} for odd p, 1 in characteristic 2
        half = self.L // 2 if self.Q % 2 else 0
        return (a + half) % self.L


@lru_cache(maxsize=32)
def zech_tables(spec: FieldSpec) -> ZechTables:
    F = spec.residue_field
    Q = spec.q
    L = Q - 1
    g = primitive_element(F)
    exp = np.zeros(L, dtype=np.int64)
    log = np.full(Q, L, dtype=np.int64)
    cur = F.one
    for i in range(L):
        code = F.encode(cur)
        exp[i] = code
        log[code] = i
        cur = F.mul(cur, g)
    zech = np.empty(L, dtype=np.int64)
    for d in range(L):
        zech[d] = log[F.encode(F.add(F.one, F.decode(int(exp[d]))))]
    trace = None
    if spec.p == 2:
        trace = np.empty(L, dtype=np.int64)
        for i in range(L):
            a = F.decode(int(exp[i]))
            acc, t = F.zero, a
            for _ in range(spec.n):
                acc = F.add(acc, t)
                t = F.mul(t, t)
            trace[i] = F.coeffs(acc)[0] % 2
    logger.debug("Zech tables for F_%d built", Q)
    return ZechTables(Q, exp, log, zech, trace)


def _term_logs(fbar: LaurentPolynomial, k: int) -> Tuple[ZechTables, List[Tuple[int, int, int]]]:
    ext = fbar.ring.spec.extension(k)
    F = ext.field
    tables = zech_tables(ext.spec)
    small = fbar.ring.residue_field
    terms = []
    for (i, j), c in fbar.terms.items():
        code = F.encode(ext.embed(small.reduce(c)))
        lc = int(tables.log[code])
        if lc != tables.L:
            terms.append((lc, i, j))
    return tables, terms


def _quadratic_rows(terms: List[Tuple[int, int, int]]) -> Optional[Dict[int, List[Tuple[int, int]]]]:
    """Group by y-degree (shifted to start at 0) when f̄ has at most three y-degrees 0..2."""
    j0 = min(j for _, _, j in terms)
    rows: Dict[int, List[Tuple[int, int]]] = {}
    for lc, i, j in terms:
        if j - j0 > 2:
            return None
        rows.setdefault(j - j0, []).append((lc, i))
    return rows


def _count_quadratic(tables: ZechTables, rows: Dict[int, List[Tuple[int, int]]], p: int) -> int:
    L = tables.L

    def value(row: List[Tuple[int, int]], x: int) -> int:
        acc = L
        for lc, i in row:
            acc = tables.add(acc, (lc + i * x) % L)
        return acc

    total = 0
    for x in range(L):
        A, B, C = (value(rows.get(d, []), x) for d in (2, 1, 0))
        if A == L:
            if B == L:
                total += L if C == L else 0
            else:
                total += 0 if C == L else 1
            continue
        if C == L:
            total += 0 if B == L else 1
            continue
        if p == 2:
            if B == L:
                total += 1
            else:
                # z^2 + z + AC/B^2 has roots iff its trace vanishes
                t = (A + C - 2 * B) % L
                total += 2 if tables.trace[t] == 0 else 0
            continue
        four_ac = (int(tables.log[4 % p]) + A + C) % L
        disc = tables.add((2 * B) % L if B != L else L, tables.neg(four_ac))
        if disc == L:
            total += 1
        else:
            total += 2 if disc % 2 == 0 else 0
    return total


def _count_full(tables: ZechTables, terms: List[Tuple[int, int, int]]) -> int:
    L = tables.L
    J = np.arange(L, dtype=np.int64)
    total = 0
    for x in range(L):
        acc = np.full(L, L, dtype=np.int64)
        for lc, i, j in terms:
            acc = tables.add_vec(acc, (lc + i * x + J * j) % L)
        total += int(np.count_nonzero(acc == L))
    return total


def brute_force_count(fbar: LaurentPolynomial, k: int) -> int:
    """#{(x, y) in (F_{q^k}^*)² : f̄(x, y) = 0}."""
    spec = fbar.ring.spec
    Q = spec.q ** k
    if (Q - 1) ** 2 > Config.ORACLE_GUARD:
        raise TooLarge(f"(q^{k} - 1)^2 = {(Q - 1) ** 2} exceeds the oracle guard {Config.ORACLE_GUARD}")
    tables, terms = _term_logs(fbar, k)
    if not terms:
        return (Q - 1) ** 2
    rows = _quadratic_rows(terms)
    if rows is not None:
        count = _count_quadratic(tables, rows, spec.p)
    else:
        count = _count_full(tables, terms)
    logger.debug("brute force over F_%d: %d points", Q, count)
    return count


def counts_from_zeta(result: ZetaResult, kmax: int) -> List[int]:
    """N_1..N_kmax from P(t) through Newton's identities."""
    if kmax < 1:
        raise ValueError("kmax must be >= 1")
    return result.point_counts(kmax)


@dataclass
class CountReport:
    rows: List[Tuple[int, int, int, bool]] = field(default_factory=list)  # (k, oracle, zeta, match)

    @property
    def all_match(self) -> bool:
        return all(row[3] for row in self.rows)

    def to_dict(self) -> dict:
        return {
            "all_match": self.all_match,
            "rows": [{"k": k, "oracle": o, "zeta": z, "match": m} for k, o, z, m in self.rows],
        }


def compare_counts(fbar: LaurentPolynomial, result: ZetaResult, kmax: int) -> CountReport:
    report = CountReport()
    for k, nk in enumerate(counts_from_zeta(result, kmax), start=1):
        oracle = brute_force_count(fbar, k)
        report.rows.append((k, oracle, nk, oracle == nk))
        logger.info("k=%d: oracle %d, zeta %d", k, oracle, nk)
    return report


def verify(fbar: LaurentPolynomial, kmax: int, precision_override: Optional[int] = None,
           threads: Optional[int] = None) -> CountReport:
    result = compute_zeta(fbar, precision_override=precision_override, threads=threads)
    return compare_counts(fbar, result, kmax)
