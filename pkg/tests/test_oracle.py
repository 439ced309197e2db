import os, sys
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

import random
from unittest.mock import patch

import pytest

from config import Config
from zeta_engine.arith import FieldSpec
from zeta_engine.errors import TooLarge
from zeta_engine.laurent import LaurentPolynomial, apply_unimodular
from zeta_engine.oracle import brute_force_count, compare_counts, counts_from_zeta
from zeta_engine.polytope import UnimodularMap
from zeta_engine.zeta import ZetaResult

DIAMOND = {(1, 0): 1, (-1, 0): 1, (0, 1): 1, (0, -1): 1, (0, 0): 1}


def _naive_count(fbar, k):
    ext = fbar.ring.spec.extension(k)
    F = ext.field
    total = 0
    for xc in range(1, F.spec.q):
        x = F.decode(xc)
        for yc in range(1, F.spec.q):
            if F.is_zero(fbar.evaluate(ext, x, F.decode(yc))):
                total += 1
    return total


def test_diamond_over_f7():
    fbar = LaurentPolynomial.from_int_terms(FieldSpec.default(7).residue_field, DIAMOND)
    assert brute_force_count(fbar, 1) == 4


def test_line_over_f2():
    fbar = LaurentPolynomial.from_int_terms(FieldSpec.default(2).residue_field, {(1, 0): 1, (0, 1): 1, (0, 0): 1})
    assert brute_force_count(fbar, 1) == 0
    assert brute_force_count(fbar, 2) == 2


def test_fast_and_full_paths_match_naive_evaluation():
    rng = random.Random(77)
    specs = [FieldSpec.default(5), FieldSpec.default(2, 2), FieldSpec.default(3)]
    for case in range(30):
        spec = specs[case % len(specs)]
        F = spec.residue_field
        terms = {}
        # y-degree span up to 3 exercises both counting paths
        for _ in range(rng.randint(2, 5)):
            e = (rng.randint(-2, 2), rng.randint(-1, 2))
            terms[e] = F.from_coeffs([rng.randrange(spec.p) for _ in range(spec.n)])
        fbar = LaurentPolynomial(F, terms)
        if fbar.is_zero():
            continue
        k = 1 if spec.q > 4 else 2
        assert brute_force_count(fbar, k) == _naive_count(fbar, k)


def test_counts_are_invariant_under_torus_automorphisms():
    F = FieldSpec.default(5).residue_field
    fbar = LaurentPolynomial.from_int_terms(F, {(0, 2): 1, (5, 0): 4, (1, 0): 4, (0, 0): 4})
    U = UnimodularMap(((1, 2), (0, 1)), (-1, 1))
    moved = apply_unimodular(fbar, U)
    for k in (1, 2):
        assert brute_force_count(moved, k) == brute_force_count(fbar, k)


def test_guard():
    fbar = LaurentPolynomial.from_int_terms(FieldSpec.default(7).residue_field, DIAMOND)
    with patch.object(Config, "ORACLE_GUARD", 100):
        with pytest.raises(TooLarge):
            brute_force_count(fbar, 2)


def test_compare_counts_against_known_zeta():
    # x + y + 1 on the torus has q^k - 2 points, so P(t) = (1 - t)^2
    fbar = LaurentPolynomial.from_int_terms(FieldSpec.default(2).residue_field, {(1, 0): 1, (0, 1): 1, (0, 0): 1})
    result = ZetaResult(2, 1, [1, -2, 1], [1, -2, 1], 0, 3, 1, 4)
    assert counts_from_zeta(result, 3) == [0, 2, 6]
    report = compare_counts(fbar, result, 3)
    assert report.all_match
    assert report.to_dict()["rows"][1] == {"k": 2, "oracle": 2, "zeta": 2, "match": True}

    wrong = ZetaResult(2, 1, [1, -1], [1, -1], 0, 3, 1, 4)
    assert not compare_counts(fbar, wrong, 2).all_match
    with pytest.raises(ValueError):
        counts_from_zeta(result, 0)
