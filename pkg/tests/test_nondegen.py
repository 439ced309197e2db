import os, sys
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

import pytest

from zeta_engine.arith import FieldSpec
from zeta_engine.errors import Degenerate, GenusZero
from zeta_engine.laurent import LaurentPolynomial
from zeta_engine.nondegen import is_nondegenerate, validate_input, witness_residuals

DIAMOND = {(1, 0): 1, (-1, 0): 1, (0, 1): 1, (0, -1): 1, (0, 0): 1}


def _diamond(p):
    return LaurentPolynomial.from_int_terms(FieldSpec.default(p).residue_field, DIAMOND)


def test_diamond_over_f7_is_nondegenerate():
    report = is_nondegenerate(_diamond(7))
    assert report.verdict
    assert not report.failed_faces()
    curve = validate_input(_diamond(7))
    assert curve.transform.is_identity
    assert curve.polytope.genus == 1


def test_diamond_over_f5_has_witness_at_one_one():
    fbar = _diamond(5)
    report = is_nondegenerate(fbar)
    assert not report.verdict
    assert [fc.kind for fc in report.failed_faces()] == ["face"]
    w = report.witness
    assert w is not None
    assert (w.x, w.y, w.degree) == ((1,), (1,), 1)
    F = fbar.ring
    assert all(F.is_zero(v) for v in witness_residuals(fbar, w))


def test_validate_rejects_degenerate_with_report():
    with pytest.raises(Degenerate) as excinfo:
        validate_input(_diamond(5))
    assert excinfo.value.report is not None
    assert excinfo.value.report.witness.x == (1,)


def test_diamond_over_f2_is_nondegenerate():
    assert is_nondegenerate(_diamond(2)).verdict


def test_repeated_root_on_an_edge():
    F = FieldSpec.default(7).residue_field
    # bottom edge polynomial 1 + 2x + x^2 = (1 + x)^2
    fbar = LaurentPolynomial.from_int_terms(F, {(0, 0): 1, (1, 0): 2, (2, 0): 1, (0, 2): 1})
    report = is_nondegenerate(fbar)
    assert not report.verdict
    assert any(fc.kind == "edge" for fc in report.failed_faces())
    assert report.witness is not None
    assert all(F.is_zero(v) for v in witness_residuals(fbar, report.witness))


def test_genus_zero_input_is_rejected():
    F = FieldSpec.default(7).residue_field
    with pytest.raises(GenusZero):
        validate_input(LaurentPolynomial.from_int_terms(F, {(1, 0): 1, (0, 1): 1, (0, 0): 1}))
