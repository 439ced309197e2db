"""Matrices over Z_q mod p^N: Smith diagonalization, bounded-denominator solving,
characteristic polynomials.

Matrices are plain lists of rows of raw ring values. Pivots are always chosen
with minimal p-adic valuation, so every elimination factor is integral and the
transforms stay exact modulo p^N.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import List, Sequence

from zeta_engine.arith import Raw, ZqRing
from zeta_engine.errors import Inconsistent

logger = logging.getLogger(__name__)

Matrix = List[List[Raw]]


def identity(ring: ZqRing, n: int) -> Matrix:
    return [[ring.one if i == j else ring.zero for j in range(n)] for i in range(n)]


def zeros(ring: ZqRing, rows: int, cols: int) -> Matrix:
    return [[ring.zero] * cols for _ in range(rows)]


def reduce_matrix(ring: ZqRing, A: Sequence[Sequence[Raw]]) -> Matrix:
    return [[ring.reduce(a) for a in row] for row in A]


def mat_mul(ring: ZqRing, A: Matrix, B: Matrix) -> Matrix:
    if not A:
        return []
    inner, cols = len(B), len(B[0]) if B else 0
    if ring.n == 1:
        M = ring.modulus
        return [[sum(row[k] * B[k][j] for k in range(inner)) % M for j in range(cols)] for row in A]
    out = zeros(ring, len(A), cols)
    for i, row in enumerate(A):
        for k in range(inner):
            a = row[k]
            if ring.is_zero(a):
                continue
            Bk = B[k]
            out_row = out[i]
            for j in range(cols):
                out_row[j] = ring.add(out_row[j], ring.mul(a, Bk[j]))
    return out


def mat_vec(ring: ZqRing, A: Matrix, v: Sequence[Raw]) -> List[Raw]:
    return [row[0] for row in mat_mul(ring, A, [[x] for x in v])] if A else []


def vec_mat(ring: ZqRing, v: Sequence[Raw], A: Matrix) -> List[Raw]:
    return mat_mul(ring, [list(v)], A)[0]


def mat_sigma(ring: ZqRing, A: Matrix, i: int = 1) -> Matrix:
    if ring.n == 1 or i % ring.n == 0:
        return [list(row) for row in A]
    return [[ring.sigma(a, i) for a in row] for row in A]


@dataclass
class SmithData:
    """N1 · A · N2 = diag(p^v_0, ..., p^v_{rank-1}, 0, ...) at ``ring`` precision."""

    ring: ZqRing
    N1: Matrix
    N1inv: Matrix
    N2: Matrix
    N2inv: Matrix
    diagonal: Matrix
    valuations: List[int]  # one per pivot, nondecreasing

    @property
    def rank(self) -> int:
        return len(self.valuations)


def smith_diagonalize(ring: ZqRing, A: Sequence[Sequence[Raw]]) -> SmithData:
    work = reduce_matrix(ring, A)
    rows = len(work)
    cols = len(work[0]) if rows else 0
    N1, N1inv = identity(ring, rows), identity(ring, rows)
    N2, N2inv = identity(ring, cols), identity(ring, cols)
    valuations: List[int] = []
    N = ring.N

    for s in range(min(rows, cols)):
        best_v, bi, bj = N, -1, -1
        for i in range(s, rows):
            row = work[i]
            for j in range(s, cols):
                v = ring.valuation(row[j])
                if v < best_v:
                    best_v, bi, bj = v, i, j
                    if v == 0:
                        break
            if best_v == 0:
                break
        if bi < 0:
            break
        if bi != s:
            work[s], work[bi] = work[bi], work[s]
            N1[s], N1[bi] = N1[bi], N1[s]
            for row in N1inv:
                row[s], row[bi] = row[bi], row[s]
        if bj != s:
            for row in work:
                row[s], row[bj] = row[bj], row[s]
            for row in N2:
                row[s], row[bj] = row[bj], row[s]
            N2inv[s], N2inv[bj] = N2inv[bj], N2inv[s]

        v, unit = ring.split(work[s][s])
        uinv = ring.inv(unit)
        work[s] = [ring.mul(a, uinv) for a in work[s]]
        N1[s] = [ring.mul(a, uinv) for a in N1[s]]
        for row in N1inv:
            row[s] = ring.mul(row[s], unit)

        for i in range(s + 1, rows):
            a = work[i][s]
            if ring.is_zero(a):
                continue
            c = ring.exact_div_p(a, v)
            work[i] = [ring.sub(x, ring.mul(c, y)) for x, y in zip(work[i], work[s])]
            N1[i] = [ring.sub(x, ring.mul(c, y)) for x, y in zip(N1[i], N1[s])]
            for row in N1inv:
                row[s] = ring.add(row[s], ring.mul(c, row[i]))

        pivot_row = work[s]
        for j in range(s + 1, cols):
            a = pivot_row[j]
            if ring.is_zero(a):
                continue
            c = ring.exact_div_p(a, v)
            for row in work:
                row[j] = ring.sub(row[j], ring.mul(c, row[s]))
            for row in N2:
                row[j] = ring.sub(row[j], ring.mul(c, row[s]))
            N2inv[s] = [ring.add(x, ring.mul(c, y)) for x, y in zip(N2inv[s], N2inv[j])]
        valuations.append(v)

    logger.debug("smith: %dx%d, rank %d, max valuation %s", rows, cols, len(valuations), max(valuations, default=0))
    return SmithData(ring, N1, N1inv, N2, N2inv, work, valuations)


class LinearSolver:
    """Solves A x = b mod p^N through a Smith form computed at precision N + θ."""

    def __init__(self, A: Sequence[Sequence[Raw]], ring: ZqRing, theta: int = 0):
        self.ring = ring
        self.theta = theta
        self.smith = smith_diagonalize(ring.with_precision(ring.N + theta), A)
        self.A = reduce_matrix(ring, A)
        self.N1 = reduce_matrix(ring, self.smith.N1)
        self.N2 = reduce_matrix(ring, self.smith.N2)

    def solve(self, b: Sequence[Raw], verify: bool = True) -> List[Raw]:
        ring = self.ring
        y = mat_vec(ring, self.N1, b)
        z: List[Raw] = []
        for i, yi in enumerate(y):
            vy = ring.valuation(yi)
            if i < self.smith.rank:
                vi = self.smith.valuations[i]
                if vy >= ring.N:
                    z.append(ring.zero)
                elif vy >= vi:
                    z.append(ring.exact_div_p(ring.reduce(yi), vi))
                else:
                    raise Inconsistent(f"entry {i}: valuation {vy} below invariant factor p^{vi}")
            elif vy < ring.N:
                raise Inconsistent(f"entry {i} outside the image (valuation {vy})")
        cols = len(self.N2)
        x = [ring.zero] * cols
        for k, zk in enumerate(z):
            if ring.is_zero(zk):
                continue
            for j in range(cols):
                x[j] = ring.add(x[j], ring.mul(self.N2[j][k], zk))
        if verify:
            check = mat_vec(ring, self.A, x)
            if any(not ring.is_zero(ring.sub(u, w)) for u, w in zip(check, b)):
                raise Inconsistent("solution does not reproduce the right-hand side")
        return x


def solve_zq(A: Sequence[Sequence[Raw]], b: Sequence[Raw], ring: ZqRing, theta: int = 0) -> List[Raw]:
    return LinearSolver(A, ring, theta).solve(b)


def hessenberg(ring: ZqRing, A: Sequence[Sequence[Raw]]) -> Matrix:
    """Similar upper Hessenberg matrix; subdiagonal pivots of minimal valuation."""
    H = reduce_matrix(ring, A)
    n = len(H)
    for j in range(n - 2):
        best_v, best_i = ring.N, -1
        for i in range(j + 1, n):
            v = ring.valuation(H[i][j])
            if v < best_v:
                best_v, best_i = v, i
        if best_i < 0:
            continue
        k = j + 1
        if best_i != k:
            H[k], H[best_i] = H[best_i], H[k]
            for row in H:
                row[k], row[best_i] = row[best_i], row[k]
        v, unit = ring.split(H[k][j])
        uinv = ring.inv(unit)
        for i in range(k + 1, n):
            a = H[i][j]
            if ring.is_zero(a):
                continue
            u = ring.mul(ring.exact_div_p(a, v), uinv)
            H[i] = [ring.sub(x, ring.mul(u, y)) for x, y in zip(H[i], H[k])]
            for row in H:
                row[k] = ring.add(row[k], ring.mul(u, row[i]))
    return H


def char_poly(ring: ZqRing, A: Sequence[Sequence[Raw]]) -> List[Raw]:
    """det(tI - A) mod p^N, ascending coefficients (monic)."""
    H = hessenberg(ring, A)
    n = len(H)
    polys: List[List[Raw]] = [[ring.one]]
    for k in range(1, n + 1):
        prev = polys[k - 1]
        cur = [ring.zero] + list(prev)
        diag = H[k - 1][k - 1]
        for d, c in enumerate(prev):
            cur[d] = ring.sub(cur[d], ring.mul(diag, c))
        prod = ring.one
        for i in range(k - 1, 0, -1):
            prod = ring.mul(prod, H[i][i - 1])
            if ring.is_zero(prod):
                break
            factor = ring.mul(H[i - 1][k - 1], prod)
            for d, c in enumerate(polys[i - 1]):
                cur[d] = ring.sub(cur[d], ring.mul(factor, c))
        polys.append(cur)
    return polys[n]


def norm_product(ring: ZqRing, M: Matrix, n: int) -> Matrix:
    """Direct twisted product M^{σ^{n-1}} ··· M^σ · M."""
    acc = [list(row) for row in M]
    for i in range(1, n):
        acc = mat_mul(ring, mat_sigma(ring, M, i), acc)
    return acc
