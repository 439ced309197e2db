"""Sparse Laurent polynomials over Z_q (or F_q at precision 1) and strip reduction."""
from __future__ import annotations

import logging
from functools import lru_cache
from typing import Callable, Dict, Mapping, Optional, Tuple

from zeta_engine.arith import ExtensionField, Raw, ZqRing
from zeta_engine.errors import NonUnitVertex
from zeta_engine.polytope import NewtonPolytope, PolytopeConstants, UnimodularMap, newton_polytope

logger = logging.getLogger(__name__)

Exponent = Tuple[int, int]

# Products with more term pairs than this go through Kronecker packing.
KRONECKER_THRESHOLD = 2048


class LaurentPolynomial:
    """Immutable map from exponents (i, j) to nonzero raw coefficients of ``ring``."""

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: ZqRing, terms: Optional[Mapping[Exponent, Raw]] = None, *, clean: bool = False):
        self.ring = ring
        if clean:
            self.terms: Dict[Exponent, Raw] = dict(terms or {})
        else:
            self.terms = {}
            for e, c in (terms or {}).items():
                c = ring.reduce(c)
                if not ring.is_zero(c):
                    self.terms[(int(e[0]), int(e[1]))] = c
        self._hash = None

    @classmethod
    def monomial(cls, ring: ZqRing, e: Exponent, coeff: Optional[Raw] = None) -> "LaurentPolynomial":
        return cls(ring, {e: ring.one if coeff is None else coeff})

    @classmethod
    def constant(cls, ring: ZqRing, k: int = 1) -> "LaurentPolynomial":
        return cls(ring, {(0, 0): ring.from_int(k)})

    @classmethod
    def zero(cls, ring: ZqRing) -> "LaurentPolynomial":
        return cls(ring, {}, clean=True)

    @classmethod
    def from_int_terms(cls, ring: ZqRing, terms: Mapping[Exponent, int]) -> "LaurentPolynomial":
        return cls(ring, {e: ring.from_int(c) for e, c in terms.items()})

    # -- basic protocol -----------------------------------------------
    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = [f"{self.ring.coeffs(c)}*x^{i}*y^{j}" for (i, j), c in self.sorted_terms()]
        return " + ".join(parts)

    def __len__(self) -> int:
        return len(self.terms)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LaurentPolynomial):
            return NotImplemented
        return self.ring.N == other.ring.N and self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self.terms.items())))
        return self._hash

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, e: Exponent) -> Raw:
        return self.terms.get(e, self.ring.zero)

    @property
    def support(self) -> set:
        return set(self.terms)

    def sorted_terms(self) -> list:
        return sorted(self.terms.items(), key=lambda t: (t[0][1], t[0][0]))

    def support_window(self) -> Optional[Tuple[int, int, int, int]]:
        """(x_min, x_max, y_min, y_max) or None for zero."""
        if not self.terms:
            return None
        xs = [e[0] for e in self.terms]
        ys = [e[1] for e in self.terms]
        return min(xs), max(xs), min(ys), max(ys)

    def newton_polytope(self) -> NewtonPolytope:
        return newton_polytope(self.terms)

    def valuation(self) -> int:
        if not self.terms:
            return self.ring.N
        return min(self.ring.valuation(c) for c in self.terms.values())

    # -- arithmetic ---------------------------------------------------
    def _check(self, other: "LaurentPolynomial") -> None:
        if self.ring != other.ring:
            raise ValueError(f"mismatched coefficient rings {self.ring!r} and {other.ring!r}")

    def __add__(self, other: "LaurentPolynomial") -> "LaurentPolynomial":
        self._check(other)
        ring = self.ring
        out = dict(self.terms)
        for e, c in other.terms.items():
            if e in out:
                s = ring.add(out[e], c)
                if ring.is_zero(s):
                    del out[e]
                else:
                    out[e] = s
            else:
                out[e] = c
        return LaurentPolynomial(ring, out, clean=True)

    def __neg__(self) -> "LaurentPolynomial":
        ring = self.ring
        return LaurentPolynomial(ring, {e: ring.neg(c) for e, c in self.terms.items()}, clean=True)

    def __sub__(self, other: "LaurentPolynomial") -> "LaurentPolynomial":
        return self + (-other)

    def __mul__(self, other: "LaurentPolynomial") -> "LaurentPolynomial":
        self._check(other)
        if not self.terms or not other.terms:
            return LaurentPolynomial.zero(self.ring)
        if len(self.terms) * len(other.terms) > KRONECKER_THRESHOLD:
            return _kronecker_multiply(self, other)
        ring = self.ring
        acc: Dict[Exponent, Raw] = {}
        if ring.n == 1:
            for (i1, j1), c1 in self.terms.items():
                for (i2, j2), c2 in other.terms.items():
                    e = (i1 + i2, j1 + j2)
                    acc[e] = acc.get(e, 0) + c1 * c2
            M = ring.modulus
            return LaurentPolynomial(ring, {e: c % M for e, c in acc.items() if c % M}, clean=True)
        for (i1, j1), c1 in self.terms.items():
            for (i2, j2), c2 in other.terms.items():
                e = (i1 + i2, j1 + j2)
                prod = ring.mul(c1, c2)
                acc[e] = ring.add(acc[e], prod) if e in acc else prod
        return LaurentPolynomial(ring, acc)

    def __pow__(self, e: int) -> "LaurentPolynomial":
        if e < 0:
            raise ValueError("negative powers are not defined for Laurent polynomials in general")
        result = LaurentPolynomial.constant(self.ring)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def scale(self, c: Raw) -> "LaurentPolynomial":
        ring = self.ring
        return LaurentPolynomial(ring, {e: ring.mul(v, c) for e, v in self.terms.items()})

    def scale_int(self, k: int) -> "LaurentPolynomial":
        ring = self.ring
        return LaurentPolynomial(ring, {e: ring.scale(v, k) for e, v in self.terms.items()})

    def shift(self, s: Exponent) -> "LaurentPolynomial":
        return LaurentPolynomial(self.ring, {(i + s[0], j + s[1]): c for (i, j), c in self.terms.items()}, clean=True)

    def x_dx(self) -> "LaurentPolynomial":
        ring = self.ring
        return LaurentPolynomial(ring, {e: ring.scale(c, e[0]) for e, c in self.terms.items()})

    def y_dy(self) -> "LaurentPolynomial":
        ring = self.ring
        return LaurentPolynomial(ring, {e: ring.scale(c, e[1]) for e, c in self.terms.items()})

    def map_coefficients(self, fn: Callable[[Raw], Raw], ring: Optional[ZqRing] = None) -> "LaurentPolynomial":
        return LaurentPolynomial(ring or self.ring, {e: fn(c) for e, c in self.terms.items()})

    def sigma(self, i: int = 1) -> "LaurentPolynomial":
        ring = self.ring
        if ring.n == 1:
            return self
        return self.map_coefficients(lambda c: ring.sigma(c, i))

    def change_ring(self, ring: ZqRing) -> "LaurentPolynomial":
        """Same representatives read in another precision of the same field."""
        if ring.spec != self.ring.spec:
            raise ValueError("change_ring keeps the field, only the precision may change")
        return LaurentPolynomial(ring, self.terms)

    def reduce_mod_p(self) -> "LaurentPolynomial":
        return self.change_ring(self.ring.residue_field)

    def truncate_window(self, x_lo: int, x_hi: int) -> "LaurentPolynomial":
        return LaurentPolynomial(
            self.ring, {e: c for e, c in self.terms.items() if x_lo <= e[0] <= x_hi}, clean=True
        )

    def frobenius_power_p(self) -> "LaurentPolynomial":
        """Lift of the p-th power in characteristic p: exponents times p, coefficients through σ."""
        p = self.ring.p
        return LaurentPolynomial(
            self.ring, {(p * i, p * j): self.ring.sigma(c, 1) for (i, j), c in self.terms.items()}, clean=True
        )

    def evaluate(self, ext: ExtensionField, x: Raw, y: Raw) -> Raw:
        """Value at a torus point of the extension ``ext`` (coefficients reduced mod p)."""
        big = ext.field
        cache: Dict[Tuple[int, int], Raw] = {}

        def power(base: Raw, k: int, tag: int) -> Raw:
            key = (tag, k)
            if key not in cache:
                cache[key] = big.pow(base, k)
            return cache[key]

        acc = big.zero
        small = self.ring.residue_field
        for (i, j), c in self.terms.items():
            cf = ext.embed(small.reduce(c))
            if big.is_zero(cf):
                continue
            term = big.mul(cf, big.mul(power(x, i, 0), power(y, j, 1)))
            acc = big.add(acc, term)
        return acc


def _rows(poly: LaurentPolynomial) -> Dict[int, Dict[int, Raw]]:
    rows: Dict[int, Dict[int, Raw]] = {}
    for (i, j), c in poly.terms.items():
        rows.setdefault(j, {})[i] = c
    return rows


def _kronecker_multiply(a: LaurentPolynomial, b: LaurentPolynomial) -> LaurentPolynomial:
    """Product by packing both operands into one integer each."""
    ring = a.ring
    n, M = ring.n, ring.modulus
    ax0, ax1, ay0, ay1 = a.support_window()
    bx0, bx1, by0, by1 = b.support_window()
    stride = (ax1 - ax0 + 1) + (bx1 - bx0 + 1) - 1
    block = 1 if n == 1 else 2 * n - 1
    bits = 2 * M.bit_length() + (min(len(a), len(b)) * n).bit_length() + 1
    slot = (bits + 7) // 8

    def pack(poly: LaurentPolynomial, x0: int, y0: int, rows: int) -> int:
        buf = bytearray(rows * stride * block * slot)
        for (i, j), c in poly.terms.items():
            base = ((j - y0) * stride + (i - x0)) * block
            for k, ck in enumerate(ring.coeffs(c)):
                if ck:
                    pos = (base + k) * slot
                    buf[pos:pos + slot] = ck.to_bytes(slot, "little")
        return int.from_bytes(buf, "little")

    ra, rb = ay1 - ay0 + 1, by1 - by0 + 1
    prod = pack(a, ax0, ay0, ra) * pack(b, bx0, by0, rb)
    out_rows = ra + rb - 1
    total = out_rows * stride * block
    raw_bytes = prod.to_bytes(total * slot, "little")
    x0, y0 = ax0 + bx0, ay0 + by0
    out: Dict[Exponent, Raw] = {}
    zero_slot = bytes(slot)
    if n == 1:
        for idx in range(total):
            chunk = raw_bytes[idx * slot:(idx + 1) * slot]
            if chunk == zero_slot:
                continue
            c = int.from_bytes(chunk, "little") % M
            if c:
                r, i = divmod(idx, stride)
                out[(x0 + i, y0 + r)] = c
    else:
        width = block * slot
        for cell in range(out_rows * stride):
            chunk = raw_bytes[cell * width:(cell + 1) * width]
            if chunk.count(0) == width:
                continue
            conv = [int.from_bytes(chunk[k * slot:(k + 1) * slot], "little") for k in range(block)]
            c = ring.fold(conv)
            if not ring.is_zero(c):
                r, i = divmod(cell, stride)
                out[(x0 + i, y0 + r)] = c
    return LaurentPolynomial(ring, out, clean=True)


def apply_unimodular(h: LaurentPolynomial, U: UnimodularMap) -> LaurentPolynomial:
    return LaurentPolynomial(h.ring, {U.apply(e): c for e, c in h.terms.items()}, clean=True)


def D_operator(h: LaurentPolynomial, f: LaurentPolynomial) -> LaurentPolynomial:
    """D(h) = xy(f_y h_x - f_x h_y) = (y f_y)(x h_x) - (x f_x)(y h_y)."""
    return f.y_dy() * h.x_dx() - f.x_dx() * h.y_dy()


class StripReducer:
    """Reduction modulo f to the strip d_b <= y < d_t."""

    def __init__(self, f: LaurentPolynomial):
        self.f = f
        self.ring = f.ring
        self.polytope = f.newton_polytope()
        P = self.polytope
        if not (P.unique_top and P.unique_bottom):
            raise ValueError("strip reduction needs unique top and bottom vertices")
        self.d_t, self.d_b = P.d_t, P.d_b
        self.top = (P.c_t, P.d_t)
        self.bottom = (P.c_b, P.d_b)
        ring = self.ring
        c_top, c_bot = f.coefficient(self.top), f.coefficient(self.bottom)
        if not ring.is_unit(c_top) or not ring.is_unit(c_bot):
            raise NonUnitVertex("top or bottom vertex coefficient of f is not a unit")
        self.inv_top = ring.inv(c_top)
        self.inv_bottom = ring.inv(c_bot)
        self.f_terms = list(f.terms.items())

    def in_strip(self, h: LaurentPolynomial) -> bool:
        return all(self.d_b <= j < self.d_t for _, j in h.terms)

    def reduce(self, h: LaurentPolynomial, with_quotient: bool = False):
        ring = self.ring
        if h.ring != ring:
            raise ValueError("strip reduction needs matching coefficient rings")
        rows = _rows(h)
        quotient: Dict[Exponent, Raw] = {}
        fast = ring.n == 1
        M = ring.modulus

        def eliminate(j: int, vertex: Exponent, inv: Raw) -> None:
            row = rows.pop(j)
            dy = j - vertex[1]
            for i, c in row.items():
                if fast:
                    c %= M
                    if not c:
                        continue
                    q = (c * inv) % M
                else:
                    if ring.is_zero(c):
                        continue
                    q = ring.mul(c, inv)
                dx = i - vertex[0]
                if with_quotient:
                    quotient[(dx, dy)] = q
                for (u, v), cf in self.f_terms:
                    if (u, v) == vertex:
                        continue
                    target = rows.setdefault(v + dy, {})
                    key = u + dx
                    if fast:
                        target[key] = target.get(key, 0) - cf * q
                    else:
                        prod = ring.mul(cf, q)
                        target[key] = ring.sub(target[key], prod) if key in target else ring.neg(prod)

        while rows and max(rows) >= self.d_t:
            eliminate(max(rows), self.top, self.inv_top)
        # top elimination only feeds rows >= d_b
        while rows and min(rows) < self.d_b:
            eliminate(min(rows), self.bottom, self.inv_bottom)

        out: Dict[Exponent, Raw] = {}
        for j, row in rows.items():
            for i, c in row.items():
                c = ring.reduce(c)
                if not ring.is_zero(c):
                    out[(i, j)] = c
        r = LaurentPolynomial(ring, out, clean=True)
        if with_quotient:
            return r, LaurentPolynomial(ring, quotient)
        return r


@lru_cache(maxsize=64)
def strip_reducer(f: LaurentPolynomial) -> StripReducer:
    return StripReducer(f)


def reduce_to_strip(h: LaurentPolynomial, f: LaurentPolynomial, with_quotient: bool = False):
    """r with r = h - f*q and y-support in [d_b, d_t - 1]; (r, q) when asked."""
    return strip_reducer(f).reduce(h, with_quotient=with_quotient)


class StripAlgebra:
    """Arithmetic in Z_q[x^±, y^±]/(f) on strip forms with x-window truncation.

    A budget B keeps x-exponents in [B*chi1, B*chi2].
    """

    def __init__(self, f: LaurentPolynomial, polytope: NewtonPolytope, consts: PolytopeConstants):
        self.f = f
        self.polytope = polytope
        self.consts = consts
        self._reducers: Dict[int, StripReducer] = {}

    def reducer(self, ring: ZqRing) -> StripReducer:
        red = self._reducers.get(ring.N)
        if red is None:
            red = self._reducers[ring.N] = strip_reducer(self.f.change_ring(ring))
        return red

    def window(self, budget: Optional[int]) -> Optional[Tuple[int, int]]:
        if budget is None:
            return None
        return budget * self.consts.chi1, budget * self.consts.chi2

    def reduce(self, h: LaurentPolynomial, budget: Optional[int] = None) -> LaurentPolynomial:
        r = self.reducer(h.ring).reduce(h)
        win = self.window(budget)
        return r if win is None else r.truncate_window(*win)

    def mul(self, a: LaurentPolynomial, b: LaurentPolynomial, budget: Optional[int] = None) -> LaurentPolynomial:
        return self.reduce(a * b, budget)

    def power(self, a: LaurentPolynomial, e: int, budget: Optional[int] = None) -> LaurentPolynomial:
        result = LaurentPolynomial.constant(a.ring)
        base = a
        while e:
            if e & 1:
                result = self.mul(result, base, budget)
            e >>= 1
            if e:
                base = self.mul(base, base, budget)
        return result

    def inverse(self, a: LaurentPolynomial, budget: Optional[int] = None) -> LaurentPolynomial:
        """Inverse of an element that is 1 mod p, by u <- u(2 - a u)."""
        ring = a.ring
        one = LaurentPolynomial.constant(ring)
        u = one
        acc = 1
        while acc < ring.N:
            u = self.mul(u, one + one - self.mul(a, u, budget), budget)
            acc *= 2
        return u

