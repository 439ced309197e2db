import os, sys
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

import random

import pytest

from zeta_engine.arith import FieldSpec
from zeta_engine.errors import PrecisionExhausted, StageError, WeilViolation
from zeta_engine.laurent import LaurentPolynomial
from zeta_engine.linalg import norm_product
from zeta_engine.oracle import brute_force_count
from zeta_engine.polytope import newton_polytope
from zeta_engine.zeta import (
    ZetaResult,
    assemble_zeta,
    compute_zeta,
    determine_precision,
    norm_matrix,
    precision_satisfied,
    run_pipeline,
)

from utils.curve_io import parse_curve

DIAMOND = {(1, 0): 1, (-1, 0): 1, (0, 1): 1, (0, -1): 1, (0, 0): 1}
DIAMOND_P = newton_polytope(list(DIAMOND))
TRIANGLE = {(1, 0): 1, (0, 1): 1, (-1, -1): 1, (0, 0): 1}
CURVES = os.path.abspath(os.path.join(os.path.dirname(__file__), '..', 'curves'))

# (1 - 2t + 7t^2)(1 - t)^3 and chi(t) = q^4 P(t/q) for q = 7
SAMPLE_P = [1, -5, 16, -28, 23, -7]
SAMPLE_CHI = [2401, -1715, 784, -196, 23, -1]


def _diamond(p):
    return LaurentPolynomial.from_int_terms(FieldSpec.default(p).residue_field, DIAMOND)


@pytest.mark.parametrize("p,expected", [(7, 31), (2, 69)])
def test_precision_plan(p, expected):
    plan = determine_precision(DIAMOND_P, p, 1)
    assert plan.N == expected
    assert precision_satisfied(DIAMOND_P, p, 1, expected)
    assert not precision_satisfied(DIAMOND_P, p, 1, expected - 1)


def test_norm_matrix_matches_direct_product():
    rng = random.Random(6)
    for n in range(1, 7):
        ring = FieldSpec.default(2, n).ring(3)
        M = [[ring.from_coeffs([rng.randrange(8) for _ in range(n)]) for _ in range(3)] for _ in range(3)]
        assert norm_matrix(ring, M, n) == norm_product(ring, M, n)


def test_counts_from_p_equal_one_minus_t():
    result = ZetaResult(7, 1, [7, -1], [1, -1], 0, 2, 1, 10)
    assert result.point_counts(3) == [6, 48, 342]
    assert result.point_count(2) == 48


def _charpoly(ring, eps, chi=SAMPLE_CHI):
    d = len(chi) - 1
    # monic in t, so the sign is flipped relative to chi
    return [ring.from_int(-c * 7 ** (eps * (d - i))) for i, c in enumerate(chi)]


@pytest.mark.parametrize("eps,N", [(0, 8), (1, 11)])
def test_assemble_recovers_integer_chi(eps, N):
    ring = FieldSpec.default(7).ring(N)
    result = assemble_zeta(_charpoly(ring, eps), eps, N, DIAMOND_P, ring)
    assert result.chi == SAMPLE_CHI
    assert result.P == SAMPLE_P
    assert result.point_counts(1) == [2]
    data = result.to_dict(3)
    assert [row[0] for row in data["point_counts"]] == [1, 2, 3]
    assert data["q"] == 7


def test_assemble_rejects_short_precision():
    ring = FieldSpec.default(7).ring(5)
    with pytest.raises(PrecisionExhausted):
        assemble_zeta(_charpoly(ring, 0), 0, 5, DIAMOND_P, ring)
    # 10 - 5 = 5 correct digits, and 7^5 < 2 * 10 * 7^4
    ring = FieldSpec.default(7).ring(10)
    with pytest.raises(PrecisionExhausted):
        assemble_zeta(_charpoly(ring, 1), 1, 10, DIAMOND_P, ring)


def test_assemble_ignores_digits_past_the_correct_precision():
    eps, N = 1, 11
    ring = FieldSpec.default(7).ring(N)
    d = len(SAMPLE_CHI) - 1
    correct = N - eps * d
    # garbage above digit `correct` of each scaled coefficient
    noisy = [
        ring.add(c, ring.from_int(3 * 7 ** (correct + eps * (d - i))))
        for i, c in enumerate(_charpoly(ring, eps))
    ]
    result = assemble_zeta(noisy, eps, N, DIAMOND_P, ring)
    assert result.chi == SAMPLE_CHI
    assert result.P == SAMPLE_P


def test_assemble_rejects_bad_leading_coefficient():
    ring = FieldSpec.default(7).ring(8)
    bad = [2400] + SAMPLE_CHI[1:]
    with pytest.raises(WeilViolation):
        assemble_zeta(_charpoly(ring, 0, bad), 0, 8, DIAMOND_P, ring)


def test_degenerate_input_fails_at_nondegen_stage():
    with pytest.raises(StageError) as excinfo:
        run_pipeline(_diamond(5))
    assert excinfo.value.stage == "nondegen"


def test_triangle_over_f3_end_to_end():
    # x + y + 1/(xy) + 1: smallest genus-one polytope, singular over F_3 only for constant 0
    fbar = LaurentPolynomial.from_int_terms(FieldSpec.default(3).residue_field, TRIANGLE)
    result = compute_zeta(fbar)
    assert result.genus == 1 and result.boundary_points == 3
    assert result.chi[0] == 3 ** 3
    assert len(result.P) == 5 and result.P[0] == 1
    counts = result.point_counts(3)
    assert counts == [brute_force_count(fbar, k) for k in (1, 2, 3)]
    assert set(result.timings_ms) >= {"polytope", "nondegen", "frobenius", "matrix", "zeta"}


@pytest.mark.slow
def test_diamond_over_f7_end_to_end():
    fbar = _diamond(7)
    result = compute_zeta(fbar, threads=2)
    assert result.precision_N == 31
    assert result.chi == [2401, -1029, 490, -154, 21, -1]
    assert result.P == [1, -3, 10, -22, 21, -7]
    counts = result.point_counts(4)
    assert counts == [4, 60, 340, 2300]
    assert counts == [brute_force_count(fbar, k) for k in range(1, 5)]


@pytest.mark.slow
def test_diamond_over_f2_end_to_end():
    fbar = _diamond(2)
    result = run_pipeline(fbar, check_recombination=True)
    counts = result.point_counts(6)
    assert counts == [brute_force_count(fbar, k) for k in range(1, 7)]


@pytest.mark.slow
def test_diamond_over_f4_end_to_end():
    curve = parse_curve(os.path.join(CURVES, 'diamond_f4.txt'))
    result = compute_zeta(curve.poly)
    assert (result.p, result.n) == (2, 2)
    counts = result.point_counts(3)
    assert counts == [brute_force_count(curve.poly, k) for k in (1, 2, 3)]


@pytest.mark.slow
def test_genus_two_over_f5_end_to_end():
    curve = parse_curve(os.path.join(CURVES, 'genus2_f5.txt'))
    result = compute_zeta(curve.poly, threads=4)
    assert result.genus == 2
    counts = result.point_counts(3)
    assert counts == [brute_force_count(curve.poly, k) for k in (1, 2, 3)]
