import os, sys
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

import glob

import pytest

from utils.curve_io import curve_from_poly, emit_curve, parse_curve, parse_curve_text
from zeta_engine.errors import DuplicateTerm, ParseError

CURVES = os.path.abspath(os.path.join(os.path.dirname(__file__), '..', 'curves'))


@pytest.mark.parametrize("path", sorted(glob.glob(os.path.join(CURVES, '*.txt'))), ids=os.path.basename)
def test_round_trip(path):
    curve = parse_curve(path)
    again = parse_curve_text(emit_curve(curve))
    assert again.spec == curve.spec
    assert again.terms == curve.terms
    assert again.poly == curve.poly
    assert curve_from_poly(curve.poly).terms == curve.terms


def test_f4_modulus_and_digits():
    curve = parse_curve(os.path.join(CURVES, 'diamond_f4.txt'))
    assert (curve.spec.p, curve.spec.n, curve.spec.rbar) == (2, 2, (1, 1, 1))
    assert curve.explicit_modulus
    assert curve.terms[(1, 0)] == (1, 0)


def test_defaults_and_comments():
    curve = parse_curve_text("# comment only\np 3   # prime\nterm 1 0 2\nterm 0 1 1\nterm -1 -1 1\n")
    assert curve.spec.n == 1
    assert curve.terms == {(1, 0): (2,), (0, 1): (1,), (-1, -1): (1,)}


def test_zero_digits_drop_the_term():
    curve = parse_curve_text("p 5\nterm 0 0 5\nterm 1 1 1\n")
    assert curve.terms == {(1, 1): (1,)}


@pytest.mark.parametrize("text,message", [
    ("p 4\nterm 0 0 1\n", "p not prime"),
    ("term 0 0 1\n", "missing p"),
    ("p 2\np 3\n", "given twice"),
    ("p 2\nn 2\nmodulus 1 0 1\nterm 0 0 1\n", "not irreducible"),
    ("p 2\nterm 0 0 1 1\n", "digits"),
    ("p 2\nfoo 1\n", "unknown directive"),
    ("p 2\nterm a 0 1\n", "expected integers"),
    ("p 2\n", "no nonzero terms"),
])
def test_parse_errors(text, message):
    with pytest.raises(ParseError) as excinfo:
        parse_curve_text(text)
    assert message in str(excinfo.value)


def test_duplicate_term_reports_both_lines():
    with pytest.raises(DuplicateTerm) as excinfo:
        parse_curve_text("p 7\nterm 1 0 1\nterm 1 0 2\n")
    assert excinfo.value.line == 3
    assert "line 2" in str(excinfo.value)
