import os, sys
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

import random

import pytest

from zeta_engine.arith import FieldSpec
from zeta_engine.errors import NoUnitPivot
from zeta_engine.laurent import LaurentPolynomial
from zeta_engine.nullstellensatz import solve_nss

# Normalized supports (unique top and bottom vertex, origin inside), vertices first.
SUPPORTS = (
    (3, ((0, 1), (1, 0), (-1, -1), (0, 0))),
    (4, ((0, 1), (1, 0), (0, -1), (-1, 0), (0, 0))),
    (4, ((0, 1), (1, 0), (0, -1), (-2, 0), (0, 0), (-1, 0))),
)


def _random_curve(rng, p, N):
    n_vertices, support = rng.choice(SUPPORTS)
    ring = FieldSpec.default(p).ring(N)
    terms = {}
    for k, e in enumerate(support):
        digit = rng.randrange(1, p) if k < n_vertices else rng.randrange(p)
        terms[e] = digit + p * rng.randrange(p ** (N - 1))
    return LaurentPolynomial.from_int_terms(ring, terms)


def certified_curves(seed, count, primes, N):
    """Seeded random curves that admit a Nullstellensatz certificate, with the certificate."""
    rng = random.Random(seed)
    cases = []
    while len(cases) < count:
        f = _random_curve(rng, rng.choice(primes), N)
        try:
            cases.append((f, solve_nss(f)))
        except NoUnitPivot:
            continue
    return cases


@pytest.fixture(scope="session")
def random_certified_curves():
    return certified_curves
