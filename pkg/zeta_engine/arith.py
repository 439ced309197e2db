"""Arithmetic in F_q = F_p[X]/(rbar) and in Z_q = Z_p[X]/(r) truncated mod p^N.

Elements are stored "raw" for speed: a plain ``int`` when n == 1 and a tuple of
n ints otherwise. A ``ZqRing`` carries the context (p, n, N, modulus) and does
all the arithmetic on raw values. F_q is the same ring at precision 1, which
also makes the digit-wise canonical lift the identity on raw values.

``FqElement`` and ``ZqElement`` wrap raw values for the public API.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Sequence

from sympy import factorint, isprime
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_gcd, gf_gcdex, gf_pow_mod, gf_sub

from zeta_engine.errors import NonUnit

logger = logging.getLogger(__name__)

Raw = Any  # int when n == 1, tuple[int, ...] otherwise


def ceil_log(p: int, x: int) -> int:
    """Smallest e >= 0 with p**e >= x."""
    e, acc = 0, 1
    while acc < x:
        acc *= p
        e += 1
    return e


def floor_log(p: int, x: int) -> int:
    """Largest e with p**e <= x (x >= 1)."""
    if x < 1:
        raise ValueError("floor_log needs x >= 1")
    e, acc = 0, p
    while acc <= x:
        acc *= p
        e += 1
    return e


def int_valuation(c: int, p: int, cap: int) -> int:
    if c == 0:
        return cap
    v = 0
    while c % p == 0:
        c //= p
        v += 1
    return v


def _desc(coeffs_asc: Sequence[int]) -> list[int]:
    out = list(reversed([int(c) for c in coeffs_asc]))
    while len(out) > 1 and out[0] == 0:
        out.pop(0)
    return out


def _pad(coeffs_asc: Sequence[int], n: int) -> tuple[int, ...]:
    c = [int(x) for x in coeffs_asc][:n]
    return tuple(c + [0] * (n - len(c)))


def check_irreducible(p: int, rbar: Sequence[int]) -> bool:
    """gcd(rbar, X^(p^i) - X mod rbar) == 1 for 1 <= i <= n // 2."""
    n = len(rbar) - 1
    if n < 1 or rbar[-1] % p != 1:
        return False
    if n == 1:
        return True
    g = _desc([c % p for c in rbar])
    x = [1, 0]
    for i in range(1, n // 2 + 1):
        xp = gf_pow_mod(x, p ** i, g, p, ZZ)
        if gf_gcd(g, gf_sub(xp, x, p, ZZ), p, ZZ) != [1]:
            return False
    return True


@lru_cache(maxsize=128)
def find_irreducible(p: int, n: int) -> tuple[int, ...]:
    """Monic irreducible polynomial of degree n over F_p, ascending coefficients.

    Deterministic: the lexicographically smallest vector (c_0, ..., c_{n-1}).
    """
    if not isprime(p):
        raise ValueError(f"p={p} is not prime")
    if n < 1:
        raise ValueError("degree must be >= 1")
    for low in itertools.product(range(p), repeat=n):
        cand = tuple(low) + (1,)
        if check_irreducible(p, cand):
            return cand
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


@dataclass(frozen=True)
class FieldSpec:
    p: int
    n: int
    rbar: tuple[int, ...]

    def __post_init__(self):
        if not isprime(self.p):
            raise ValueError(f"p={self.p} is not prime")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        rbar = tuple(int(c) % self.p for c in self.rbar)
        object.__setattr__(self, "rbar", rbar)
        if len(rbar) != self.n + 1 or rbar[-1] != 1:
            raise ValueError("rbar must be monic of degree n")
        if not check_irreducible(self.p, rbar):
            raise ValueError("rbar is not irreducible over F_p")

    @classmethod
    def default(cls, p: int, n: int = 1) -> "FieldSpec":
        return cls(p, n, find_irreducible(p, n))

    @property
    def q(self) -> int:
        return self.p ** self.n

    def ring(self, precision: int) -> "ZqRing":
        return _ring_for(self, precision)

    @property
    def residue_field(self) -> "ZqRing":
        return _ring_for(self, 1)

    def extension(self, k: int) -> "ExtensionField":
        return _extension_for(self, k)


@lru_cache(maxsize=256)
def _ring_for(spec: FieldSpec, precision: int) -> "ZqRing":
    return ZqRing(spec, precision)


class ZqRing:
    """Z_q mod p^N; at N = 1 this is F_q."""

    def __init__(self, spec: FieldSpec, precision: int):
        if precision < 1:
            raise ValueError("precision must be >= 1")
        self.spec = spec
        self.p = spec.p
        self.n = spec.n
        self.N = precision
        self.modulus = spec.p ** precision
        self.r = tuple(spec.rbar[: spec.n])
        self.zero: Raw = 0 if self.n == 1 else (0,) * self.n
        self.one: Raw = 1 if self.n == 1 else (1,) + (0,) * (self.n - 1)
        self._sigma_images: dict[int, Raw] = {}

    def __repr__(self) -> str:
        return f"ZqRing(p={self.p}, n={self.n}, N={self.N})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ZqRing) and other.spec == self.spec and other.N == self.N

    def __hash__(self) -> int:
        return hash((self.spec, self.N))

    def with_precision(self, precision: int) -> "ZqRing":
        return self.spec.ring(precision)

    @property
    def residue_field(self) -> "ZqRing":
        return self.spec.residue_field

    # -- construction -------------------------------------------------
    def from_int(self, k: int) -> Raw:
        if self.n == 1:
            return k % self.modulus
        return (k % self.modulus,) + (0,) * (self.n - 1)

    def from_coeffs(self, coeffs: Sequence[int]) -> Raw:
        if self.n == 1:
            return int(coeffs[0]) % self.modulus if len(coeffs) else 0
        return tuple(c % self.modulus for c in _pad(coeffs, self.n))

    def coeffs(self, a: Raw) -> tuple[int, ...]:
        return (a,) if self.n == 1 else tuple(a)

    def reduce(self, a: Raw) -> Raw:
        """Bring a raw value from another precision into this ring."""
        M = self.modulus
        if self.n == 1:
            return a % M
        return tuple(c % M for c in a)

    # -- ring operations ----------------------------------------------
    def add(self, a: Raw, b: Raw) -> Raw:
        M = self.modulus
        if self.n == 1:
            return (a + b) % M
        return tuple((x + y) % M for x, y in zip(a, b))

    def sub(self, a: Raw, b: Raw) -> Raw:
        M = self.modulus
        if self.n == 1:
            return (a - b) % M
        return tuple((x - y) % M for x, y in zip(a, b))

    def neg(self, a: Raw) -> Raw:
        M = self.modulus
        if self.n == 1:
            return (-a) % M
        return tuple((-x) % M for x in a)

    def scale(self, a: Raw, k: int) -> Raw:
        M = self.modulus
        if self.n == 1:
            return (a * k) % M
        return tuple((x * k) % M for x in a)

    def mul(self, a: Raw, b: Raw) -> Raw:
        if self.n == 1:
            return (a * b) % self.modulus
        return self.fold(self.convolve(a, b))

    @staticmethod
    def convolve(a: Sequence[int], b: Sequence[int]) -> list[int]:
        t = [0] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    t[i + j] += ai * bj
        return t

    def fold(self, t: Sequence[int]) -> Raw:
        """Reduce an integer coefficient list (any length) modulo r and p^N."""
        n, r, M = self.n, self.r, self.modulus
        if n == 1:
            acc = 0
            # X = -r_0 in Z_q when n == 1
            root = -r[0]
            for c in reversed(t):
                acc = acc * root + c
            return acc % M
        t = list(t)
        for k in range(len(t) - 1, n - 1, -1):
            c = t[k]
            if c:
                base = k - n
                for j in range(n):
                    t[base + j] -= c * r[j]
        t = t[:n] + [0] * (n - len(t[:n]))
        return tuple(c % M for c in t)

    def pow(self, a: Raw, e: int) -> Raw:
        if e < 0:
            return self.pow(self.inv(a), -e)
        result, base = self.one, a
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def is_zero(self, a: Raw) -> bool:
        if self.n == 1:
            return a % self.modulus == 0
        return all(c % self.modulus == 0 for c in a)

    def is_unit(self, a: Raw) -> bool:
        p = self.p
        if self.n == 1:
            return a % p != 0
        return any(c % p for c in a)

    def inv(self, a: Raw) -> Raw:
        if not self.is_unit(a):
            raise NonUnit(f"{a!r} is not a unit in {self!r}")
        if self.n == 1:
            return pow(a, -1, self.modulus)
        p = self.p
        s, _t, h = gf_gcdex(_desc([c % p for c in a]), _desc(self.spec.rbar), p, ZZ)
        if h != [1]:
            raise NonUnit(f"{a!r} is not invertible mod rbar")
        x = self.from_coeffs(list(reversed(s)))
        two = self.from_int(2)
        acc = 1
        while acc < self.N:
            x = self.mul(x, self.sub(two, self.mul(a, x)))
            acc *= 2
        return x

    def valuation(self, a: Raw) -> int:
        """p-adic valuation; the truncated zero reports N (meaning ">= N")."""
        N, p = self.N, self.p
        if self.n == 1:
            return min(int_valuation(a % self.modulus, p, N), N)
        return min(int_valuation(c % self.modulus, p, N) for c in a)

    def exact_div_p(self, a: Raw, v: int) -> Raw:
        if v == 0:
            return a
        d = self.p ** v
        if self.n == 1:
            return a // d
        return tuple(c // d for c in a)

    def split(self, a: Raw) -> tuple[int, Raw]:
        v = self.valuation(a)
        return v, self.exact_div_p(a, v)

    # -- Frobenius ----------------------------------------------------
    def _sigma_image(self, i: int) -> Raw:
        img = self._sigma_images.get(i)
        if img is not None:
            return img
        p = self.p
        start = gf_pow_mod([1, 0], p ** i, _desc(self.spec.rbar), p, ZZ)
        x = self.from_coeffs(list(reversed(start)))
        rfull = self.spec.rbar
        deriv = [k * rfull[k] for k in range(1, len(rfull))]
        acc = 1
        while acc < 2 * self.N:
            num = self._horner(rfull, x)
            den = self._horner(deriv, x)
            x = self.sub(x, self.mul(num, self.inv(den)))
            acc *= 2
        logger.debug("sigma^%d image of [X] at N=%d computed", i, self.N)
        self._sigma_images[i] = x
        return x

    def _horner(self, coeffs_asc: Sequence[int], x: Raw) -> Raw:
        acc = self.zero
        for c in reversed(coeffs_asc):
            acc = self.add(self.mul(acc, x), self.from_int(c))
        return acc

    def sigma(self, a: Raw, i: int = 1) -> Raw:
        i %= self.n
        if i == 0:
            return a
        img = self._sigma_image(i)
        acc = self.zero
        for c in reversed(self.coeffs(a)):
            acc = self.add(self.mul(acc, img), self.from_int(c))
        return acc

    # -- encodings ----------------------------------------------------
    def encode(self, a: Raw) -> int:
        """Base-p^N digit encoding, used as a dictionary key for field elements."""
        out, M = 0, self.modulus
        for c in reversed(self.coeffs(a)):
            out = out * M + c % M
        return out

    def decode(self, k: int) -> Raw:
        M, cs = self.modulus, []
        for _ in range(self.n):
            k, c = divmod(k, M)
            cs.append(c)
        return self.from_coeffs(cs)


# -- univariate polynomials over a ring (ascending raw lists) -----------
def upoly_trim(ring: ZqRing, f: list) -> list:
    f = list(f)
    while f and ring.is_zero(f[-1]):
        f.pop()
    return f


def upoly_deriv(ring: ZqRing, f: Sequence) -> list:
    return upoly_trim(ring, [ring.scale(c, k) for k, c in enumerate(f)][1:])


def upoly_eval(ring: ZqRing, f: Sequence, x: Raw) -> Raw:
    acc = ring.zero
    for c in reversed(f):
        acc = ring.add(ring.mul(acc, x), c)
    return acc


def upoly_rem(ring: ZqRing, f: Sequence, g: Sequence) -> list:
    """Remainder of f by g over a field (precision-1 ring)."""
    f = upoly_trim(ring, f)
    g = upoly_trim(ring, g)
    if not g:
        raise ZeroDivisionError("polynomial division by zero")
    lead_inv = ring.inv(g[-1])
    dg = len(g) - 1
    while len(f) - 1 >= dg and f:
        c = ring.mul(f[-1], lead_inv)
        shift = len(f) - 1 - dg
        for k, gc in enumerate(g):
            f[shift + k] = ring.sub(f[shift + k], ring.mul(c, gc))
        f = upoly_trim(ring, f)
    return f


def upoly_gcd(ring: ZqRing, f: Sequence, g: Sequence) -> list:
    """Monic gcd over a field."""
    a, b = upoly_trim(ring, f), upoly_trim(ring, g)
    while b:
        a, b = b, upoly_rem(ring, a, b)
    if not a:
        return []
    lead_inv = ring.inv(a[-1])
    return [ring.mul(c, lead_inv) for c in a]


# -- extension fields ---------------------------------------------------
def primitive_element(ring: ZqRing) -> Raw:
    """Smallest (by encoding) generator of the multiplicative group of a field."""
    if ring.N != 1:
        raise ValueError("primitive_element needs a field (precision 1)")
    order = ring.spec.q - 1
    if order == 1:
        return ring.one
    factors = list(factorint(order))
    for k in range(1, ring.spec.q):
        g = ring.decode(k)
        if all(ring.pow(g, order // ell) != ring.one for ell in factors):
            return g
    raise AssertionError("field has no generator")  # pragma: no cover


@dataclass(frozen=True)
class ExtensionField:
    """F_{q^k} as F_p[Y]/(s) together with the embedding of F_q."""

    base: FieldSpec
    degree: int
    spec: FieldSpec
    image: Raw  # image of [X] of the base field

    @property
    def field(self) -> ZqRing:
        return self.spec.residue_field

    @property
    def q(self) -> int:
        return self.spec.q

    def embed(self, a: Raw) -> Raw:
        small = self.base.residue_field
        big = self.field
        acc = big.zero
        for c in reversed(small.coeffs(a)):
            acc = big.add(big.mul(acc, self.image), big.from_int(c))
        return acc


@lru_cache(maxsize=32)
def _extension_for(base: FieldSpec, k: int) -> ExtensionField:
    if k < 1:
        raise ValueError("extension degree must be >= 1")
    spec = base if k == 1 else FieldSpec.default(base.p, base.n * k)
    big = spec.residue_field
    if k == 1:
        image = big.decode(base.p) if base.n > 1 else big.zero
        return ExtensionField(base, 1, spec, image)
    if base.n == 1:
        return ExtensionField(base, k, spec, big.zero)
    gen = primitive_element(big)
    h = big.pow(gen, (spec.q - 1) // (base.q - 1))
    z = big.one
    for _ in range(base.q - 1):
        if big.is_zero(big._horner(base.rbar, z)):
            return ExtensionField(base, k, spec, z)
        z = big.mul(z, h)
    raise AssertionError("rbar has no root in the extension")  # pragma: no cover


# -- public value types -------------------------------------------------
@dataclass(frozen=True)
class FqElement:
    spec: FieldSpec
    coeffs: tuple[int, ...]

    def __post_init__(self):
        cs = tuple(int(c) for c in self.coeffs)
        if len(cs) != self.spec.n or any(c < 0 or c >= self.spec.p for c in cs):
            raise ValueError("FqElement needs n coefficients in [0, p)")
        object.__setattr__(self, "coeffs", cs)

    @classmethod
    def from_raw(cls, spec: FieldSpec, raw: Raw) -> "FqElement":
        return cls(spec, spec.residue_field.coeffs(spec.residue_field.reduce(raw)))

    @property
    def raw(self) -> Raw:
        return self.spec.residue_field.from_coeffs(self.coeffs)

    def _wrap(self, raw: Raw) -> "FqElement":
        return FqElement.from_raw(self.spec, raw)

    def __add__(self, other: "FqElement") -> "FqElement":
        return self._wrap(self.spec.residue_field.add(self.raw, other.raw))

    def __sub__(self, other: "FqElement") -> "FqElement":
        return self._wrap(self.spec.residue_field.sub(self.raw, other.raw))

    def __mul__(self, other: "FqElement") -> "FqElement":
        return self._wrap(self.spec.residue_field.mul(self.raw, other.raw))

    def inverse(self) -> "FqElement":
        return self._wrap(self.spec.residue_field.inv(self.raw))

    def is_zero(self) -> bool:
        return not any(self.coeffs)


@dataclass(frozen=True)
class ZqElement:
    ring: ZqRing
    raw: Raw

    def __post_init__(self):
        object.__setattr__(self, "raw", self.ring.reduce(self.raw))

    @classmethod
    def from_int(cls, spec: FieldSpec, k: int, N: int) -> "ZqElement":
        ring = spec.ring(N)
        return cls(ring, ring.from_int(k))

    @property
    def N(self) -> int:
        return self.ring.N

    @property
    def coeffs(self) -> tuple[int, ...]:
        return self.ring.coeffs(self.raw)

    def _check(self, other: "ZqElement") -> None:
        if self.ring != other.ring:
            raise ValueError("Z_q elements must share field and precision")

    def __add__(self, other: "ZqElement") -> "ZqElement":
        self._check(other)
        return ZqElement(self.ring, self.ring.add(self.raw, other.raw))

    def __sub__(self, other: "ZqElement") -> "ZqElement":
        self._check(other)
        return ZqElement(self.ring, self.ring.sub(self.raw, other.raw))

    def __mul__(self, other: "ZqElement") -> "ZqElement":
        self._check(other)
        return ZqElement(self.ring, self.ring.mul(self.raw, other.raw))

    def __neg__(self) -> "ZqElement":
        return ZqElement(self.ring, self.ring.neg(self.raw))

    def invert(self) -> "ZqElement":
        return ZqElement(self.ring, self.ring.inv(self.raw))

    def valuation(self) -> int:
        return self.ring.valuation(self.raw)

    def is_zero(self) -> bool:
        return self.ring.is_zero(self.raw)

    def reduce_mod_p(self) -> FqElement:
        return FqElement.from_raw(self.ring.spec, self.raw)


def canonical_lift(a: FqElement, N: int) -> ZqElement:
    """Digit-wise lift: coefficients in {0, ..., p-1} read as elements of Z/p^N."""
    ring = a.spec.ring(N)
    return ZqElement(ring, ring.from_coeffs(a.coeffs))


def invert(a: ZqElement) -> ZqElement:
    return a.invert()


def valuation(a: ZqElement) -> int:
    return a.valuation()


def frobenius_substitution(a: ZqElement, i: int) -> ZqElement:
    if not 0 <= i < a.ring.n:
        raise ValueError("power must satisfy 0 <= i < n")
    return ZqElement(a.ring, a.ring.sigma(a.raw, i))


