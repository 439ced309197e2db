import os, sys
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

import random
from fractions import Fraction

import pytest

from zeta_engine.arith import FieldSpec
from zeta_engine.errors import DimensionTooLow, GenusZero
from zeta_engine.laurent import LaurentPolynomial, strip_reducer
from zeta_engine.polytope import (
    UnimodularMap,
    boundary_count,
    constants,
    dilate,
    genus,
    minkowski_contains,
    newton_polytope,
    normalize,
    polytope_level,
)

DIAMOND = [(1, 0), (-1, 0), (0, 1), (0, -1)]


def test_diamond_invariants():
    P = newton_polytope(DIAMOND)
    assert P.vertices[0] == (0, 1)
    assert P.genus == 1
    assert P.boundary_count == 4
    assert P.volume_x2 == 4
    assert P.is_normalized()
    assert len(P.lattice_points()) == 5
    assert len(P.lattice_points(2)) == 13
    assert P.interior_points() == [(0, 0)]


def test_diamond_constants():
    consts = constants(newton_polytope(DIAMOND))
    assert consts.chi1 == -1
    assert consts.chi2 == 1
    assert consts.M == 1
    assert consts.kappa1 == consts.lam * consts.chi1
    assert consts.kappa2 == consts.lam * consts.chi2


def test_pick_identity_on_random_polytopes():
    rng = random.Random(20240501)
    checked = 0
    while checked < 200:
        pts = [(rng.randint(-6, 6), rng.randint(-6, 6)) for _ in range(rng.randint(3, 8))]
        try:
            P = newton_polytope(pts)
        except DimensionTooLow:
            continue
        assert P.volume == Fraction(P.genus) + Fraction(P.boundary_count, 2) - 1
        assert len(P.lattice_points()) == P.genus + P.boundary_count
        for pt in pts:
            assert P.contains(pt)
        checked += 1


def test_normalize_gives_unique_top_and_bottom():
    rng = random.Random(7)
    checked = 0
    while checked < 50:
        pts = [(rng.randint(-4, 4), rng.randint(-4, 4)) for _ in range(rng.randint(3, 7))]
        try:
            P = newton_polytope(pts)
        except DimensionTooLow:
            continue
        if P.genus < 1:
            with pytest.raises(GenusZero):
                normalize(P)
            continue
        U = normalize(P)
        Q = P.transform(U)
        assert abs(U.det) == 1
        assert Q.is_normalized()
        assert Q.genus == P.genus and Q.volume == P.volume
        checked += 1


def test_square_needs_a_shear():
    P = newton_polytope([(0, 0), (2, 0), (0, 2), (2, 2)])
    assert not P.unique_top
    U = normalize(P)
    assert not U.is_identity
    assert P.transform(U).is_normalized()


def test_degenerate_supports():
    with pytest.raises(DimensionTooLow):
        newton_polytope([(0, 0), (1, 1), (2, 2)])
    with pytest.raises(GenusZero):
        normalize(newton_polytope([(0, 0), (1, 0), (0, 1)]))


def test_unimodular_inverse_and_compose():
    U = UnimodularMap(((2, 1), (1, 1)), (3, -1))
    V = U.inverse()
    assert U.compose(V).is_identity
    assert V.apply(U.apply((5, -2))) == (5, -2)
    with pytest.raises(ValueError):
        UnimodularMap(((2, 0), (0, 1)))


def test_minkowski_membership_matches_dilation():
    P = newton_polytope(DIAMOND)
    for pt in P.lattice_points(2):
        assert minkowski_contains(P, P, pt)
    assert not minkowski_contains(P, P, (2, 1))


def _random_normalized(rng, count, span=3):
    out = []
    while len(out) < count:
        pts = [(rng.randint(-span, span), rng.randint(-span, span)) for _ in range(rng.randint(3, 7))]
        try:
            P = newton_polytope(pts)
        except DimensionTooLow:
            continue
        if P.genus < 1:
            continue
        out.append(P.transform(normalize(P)))
    return out


def test_diamond_reduction_constants():
    consts = constants(newton_polytope(DIAMOND))
    assert consts.Delta == 1
    assert consts.lam == 3
    assert (consts.kappa1, consts.kappa2) == (-3, 3)


def test_level_on_the_diamond():
    P = newton_polytope(DIAMOND)
    assert polytope_level(P, (3, 0)) == 3
    assert polytope_level(P, (0, 0)) == 0
    assert polytope_level(P, (2, 1)) == 3
    assert P.level((1, -1)) == 2


def test_level_matches_dilated_membership():
    rng = random.Random(404)
    for P in _random_normalized(rng, 40):
        for m in range(1, 6):
            for _ in range(10):
                q = (rng.randint(m * P.x_min - 2, m * P.x_max + 2), rng.randint(m * P.d_b - 2, m * P.d_t + 2))
                assert (polytope_level(P, q) <= m) == P.contains(q, m)
    with pytest.raises(ValueError):
        polytope_level(newton_polytope([(0, 0), (1, 0), (0, 1)]), (1, 1))


def test_dilation_and_counts():
    rng = random.Random(31)
    for P in _random_normalized(rng, 30):
        assert genus(P) == P.genus
        assert boundary_count(P) == P.boundary_count
        for m in (2, 3):
            assert dilate(P, m).lattice_points() == P.lattice_points(m)
            assert dilate(P, m).volume == m * m * P.volume


def test_scott_bound_on_random_polytopes():
    rng = random.Random(1960)
    checked = 0
    while checked < 200:
        pts = [(rng.randint(-5, 5), rng.randint(-5, 5)) for _ in range(rng.randint(3, 9))]
        try:
            P = newton_polytope(pts)
        except DimensionTooLow:
            continue
        assert P.scott_bound_ok()
        if P.genus >= 1:
            assert len(P.lattice_points()) <= 3 * P.genus + 7
        checked += 1
    # 3 times the unit triangle meets the bound with equality
    T = newton_polytope([(0, 0), (3, 0), (0, 3)])
    assert (T.genus, len(T.lattice_points())) == (1, 10)


def test_strip_forms_of_dilates_stay_in_the_chi_window():
    rng = random.Random(2718)
    ring = FieldSpec.default(7).residue_field
    for P in _random_normalized(rng, 20, span=2) + [newton_polytope(DIAMOND)]:
        consts = constants(P)
        vertices = set(P.vertices)
        terms = {e: rng.randrange(1 if e in vertices else 0, 7) for e in P.lattice_points()}
        f = LaurentPolynomial.from_int_terms(ring, terms)
        reducer = strip_reducer(f)
        for m in range(1, 5):
            for e in P.lattice_points(m):
                r = reducer.reduce(LaurentPolynomial.monomial(ring, e))
                assert reducer.in_strip(r)
                assert all(m * consts.chi1 <= i <= m * consts.chi2 for i, _ in r.terms)
