import os, sys
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

import itertools
import random

import pytest

from zeta_engine.arith import FieldSpec, upoly_eval
from zeta_engine.errors import Inconsistent
from zeta_engine.linalg import (
    LinearSolver,
    char_poly,
    identity,
    mat_mul,
    mat_vec,
    smith_diagonalize,
    solve_zq,
)


def _det(A):
    """Cofactor (Leibniz) expansion over the integers."""
    n = len(A)
    total = 0
    for perm in itertools.permutations(range(n)):
        sign = 1
        for i in range(n):
            for j in range(i + 1, n):
                if perm[i] > perm[j]:
                    sign = -sign
        prod = sign
        for i in range(n):
            prod *= A[i][perm[i]]
        total += prod
    return total


def _random_matrix(rng, rows, cols, modulus, p=None, skew=0.0):
    out = []
    for _ in range(rows):
        row = []
        for _ in range(cols):
            a = rng.randrange(modulus)
            if p is not None and rng.random() < skew:
                a = (a * p) % modulus
            row.append(a)
        out.append(row)
    return out


def test_char_poly_matches_cofactor_oracle():
    rng = random.Random(4242)
    ring = FieldSpec.default(7).ring(4)
    mod = ring.modulus
    for case in range(200):
        n = 1 + case % 5
        A = _random_matrix(rng, n, n, mod, p=7, skew=0.4)
        cp = char_poly(ring, A)
        assert len(cp) == n + 1 and cp[-1] == 1
        for t in range(n + 1):
            tI_minus_A = [[(t if i == j else 0) - A[i][j] for j in range(n)] for i in range(n)]
            assert upoly_eval(ring, cp, t) == _det(tI_minus_A) % mod


def test_char_poly_over_extension_has_trace_and_det():
    rng = random.Random(8)
    ring = FieldSpec.default(3, 2).ring(3)
    for _ in range(20):
        A = [[ring.from_coeffs([rng.randrange(27), rng.randrange(27)]) for _ in range(3)] for _ in range(3)]
        cp = char_poly(ring, A)
        trace = ring.add(ring.add(A[0][0], A[1][1]), A[2][2])
        assert cp[2] == ring.neg(trace)


def test_smith_reconstruction():
    rng = random.Random(31)
    ring = FieldSpec.default(5).ring(6)
    for _ in range(200):
        rows, cols = rng.randint(1, 5), rng.randint(1, 5)
        A = _random_matrix(rng, rows, cols, ring.modulus, p=5, skew=0.6)
        smith = smith_diagonalize(ring, A)
        assert mat_mul(ring, mat_mul(ring, smith.N1, A), smith.N2) == smith.diagonal
        assert mat_mul(ring, smith.N1inv, smith.N1) == identity(ring, rows)
        assert mat_mul(ring, smith.N2, smith.N2inv) == identity(ring, cols)
        back = mat_mul(ring, mat_mul(ring, smith.N1inv, smith.diagonal), smith.N2inv)
        assert back == [[a % ring.modulus for a in row] for row in A]
        assert smith.valuations == sorted(smith.valuations)


def test_solver_round_trip():
    rng = random.Random(12)
    ring = FieldSpec.default(7).ring(5)
    for _ in range(50):
        n = rng.randint(1, 4)
        x = [rng.randrange(ring.modulus) for _ in range(n)]
        A = _random_matrix(rng, n, n, ring.modulus)
        b = mat_vec(ring, A, x)
        y = solve_zq(A, b, ring, theta=2)
        assert mat_vec(ring, A, y) == b


def test_inconsistent_system():
    ring = FieldSpec.default(7).ring(3)
    with pytest.raises(Inconsistent):
        LinearSolver([[7]], ring).solve([1])
    with pytest.raises(Inconsistent):
        LinearSolver([[1], [1]], ring).solve([1, 2])
