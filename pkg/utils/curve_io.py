"""Curve files: one directive per line.

    # diamond over F_7
    p 7
    n 1
    term 1 0 1
    term -1 0 1

``modulus c0 .. c_n`` (ascending; the leading 1 may be left out) fixes F_q,
otherwise the lexicographically first irreducible polynomial is used.
``term i j c0 .. c_{n-1}`` adds c·x^i·y^j with c given by its digits.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from sympy import isprime

from zeta_engine.arith import FieldSpec, check_irreducible, find_irreducible
from zeta_engine.errors import DuplicateTerm, ParseError
from zeta_engine.laurent import LaurentPolynomial

Exponent = Tuple[int, int]


@dataclass
class Curve:
    spec: FieldSpec
    terms: Dict[Exponent, Tuple[int, ...]] = field(default_factory=dict)
    explicit_modulus: bool = False
    source: Optional[str] = None

    @property
    def poly(self) -> LaurentPolynomial:
        F = self.spec.residue_field
        return LaurentPolynomial(F, {e: F.from_coeffs(c) for e, c in self.terms.items()})


def _ints(tokens: List[str], lineno: int) -> List[int]:
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise ParseError(f"expected integers, got {' '.join(tokens)!r}", lineno) from None


def parse_curve_text(text: str, source: Optional[str] = None) -> Curve:
    p: Optional[int] = None
    n: Optional[int] = None
    modulus: Optional[Tuple[List[int], int]] = None
    raw_terms: List[Tuple[int, List[int]]] = []
    seen: Dict[str, int] = {}

    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        head, *rest = line.split()
        head = head.lower()
        if head in ("p", "n", "modulus"):
            if head in seen:
                raise ParseError(f"{head} given twice (first on line {seen[head]})", lineno)
            seen[head] = lineno
        if head == "p":
            values = _ints(rest, lineno)
            if len(values) != 1:
                raise ParseError("p takes one integer", lineno)
            if not isprime(values[0]):
                raise ParseError("p not prime", lineno)
            p = values[0]
        elif head == "n":
            values = _ints(rest, lineno)
            if len(values) != 1 or values[0] < 1:
                raise ParseError("n takes one positive integer", lineno)
            n = values[0]
        elif head == "modulus":
            modulus = (_ints(rest, lineno), lineno)
        elif head == "term":
            values = _ints(rest, lineno)
            if len(values) < 3:
                raise ParseError("term needs i j and at least one coefficient digit", lineno)
            raw_terms.append((lineno, values))
        else:
            raise ParseError(f"unknown directive {head!r}", lineno)

    if p is None:
        raise ParseError("missing p")
    n = 1 if n is None else n

    if modulus is not None:
        coeffs, lineno = modulus
        coeffs = [c % p for c in coeffs]
        if len(coeffs) == n:
            coeffs.append(1)
        if len(coeffs) != n + 1 or coeffs[-1] != 1:
            raise ParseError(f"modulus needs {n + 1} coefficients ending in 1", lineno)
        if not check_irreducible(p, coeffs):
            raise ParseError("modulus is not irreducible over F_p", lineno)
        spec = FieldSpec(p, n, tuple(coeffs))
    else:
        spec = FieldSpec(p, n, find_irreducible(p, n))

    curve = Curve(spec, explicit_modulus=modulus is not None, source=source)
    first_seen: Dict[Exponent, int] = {}
    for lineno, values in raw_terms:
        e = (values[0], values[1])
        digits = values[2:]
        if len(digits) > n:
            raise ParseError(f"term has {len(digits)} digits, field degree is {n}", lineno)
        if e in first_seen:
            raise DuplicateTerm(f"exponent {e} already given on line {first_seen[e]}", lineno)
        first_seen[e] = lineno
        padded = tuple(d % p for d in digits) + (0,) * (n - len(digits))
        if any(padded):
            curve.terms[e] = padded
    if not curve.terms:
        raise ParseError("curve has no nonzero terms")
    return curve


def parse_curve(path: Union[str, Path]) -> Curve:
    path = Path(path)
    return parse_curve_text(path.read_text(encoding="utf-8"), source=str(path))


def emit_curve(curve: Curve) -> str:
    spec = curve.spec
    lines = [f"p {spec.p}", f"n {spec.n}"]
    if curve.explicit_modulus or spec.n > 1:
        lines.append("modulus " + " ".join(str(c) for c in spec.rbar))
    for (i, j), digits in sorted(curve.terms.items(), key=lambda t: (t[0][1], t[0][0])):
        lines.append(f"term {i} {j} " + " ".join(str(d) for d in digits))
    return "\n".join(lines) + "\n"


def curve_from_poly(poly: LaurentPolynomial) -> Curve:
    F = poly.ring.residue_field
    terms = {e: F.coeffs(F.reduce(c)) for e, c in poly.terms.items()}
    return Curve(poly.ring.spec, {e: tuple(c) for e, c in terms.items() if any(c)})
