import os, sys
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

import random

import pytest

from zeta_engine.arith import FieldSpec
from zeta_engine.laurent import LaurentPolynomial
from zeta_engine.nondegen import normalize_input
from zeta_engine.polytope import constants
from zeta_engine.reduction import (
    ReductionContext,
    cohomology_basis,
    express_in_basis,
    recombination_defect,
    reduce_cohomology,
    reduction_plan,
)

from utils.curve_io import parse_curve

CURVES = os.path.abspath(os.path.join(os.path.dirname(__file__), '..', 'curves'))


def _curve(name, N):
    curve = parse_curve(os.path.join(CURVES, name))
    g, Q, _ = normalize_input(curve.poly)
    return g.change_ring(curve.spec.ring(N)), Q


@pytest.fixture(scope="module", params=["diamond_f7.txt", "genus2_f5.txt"])
def curve(request):
    return _curve(request.param, 4)


def _random_strip_form(rng, f, Q, m, n_terms=10):
    ring = f.ring
    terms = {}
    for _ in range(n_terms):
        e = (rng.randint(-m, m), rng.randint(Q.d_b, Q.d_t - 1))
        terms[e] = rng.randrange(ring.modulus)
    return LaurentPolynomial.from_int_terms(ring, terms)


def test_basis_dimensions():
    for name, dim in (("diamond_f7.txt", 5), ("genus2_f5.txt", 11)):
        f, Q = _curve(name, 3)
        basis = cohomology_basis(f, Q)
        assert basis.dimension == dim == Q.volume_x2 + 1 == 2 * Q.genus + Q.boundary_count - 1
        assert len(basis.elements) == dim


def test_basis_coordinates_are_unit_vectors(curve):
    f, Q = curve
    basis = cohomology_basis(f, Q)
    ring = basis.ring
    for k, element in enumerate(basis.elements):
        coords = express_in_basis(basis, element)
        assert coords == [ring.one if i == k else ring.zero for i in range(basis.dimension)]
        assert basis.coordinates(element) == coords


def test_recombination_on_random_strip_forms(curve):
    f, Q = curve
    rng = random.Random(2718)
    m = 6
    context = ReductionContext(f, Q, constants(Q), m)
    points2 = set(Q.lattice_points(2))
    for _ in range(100):
        h = _random_strip_form(rng, f, Q, m)
        result = context.reduce(h)
        assert set(result.r.terms) <= points2
        assert recombination_defect(h, result, f).is_zero()


def test_one_shot_reduction_matches_context(curve):
    f, Q = curve
    rng = random.Random(31)
    consts = constants(Q)
    h = _random_strip_form(rng, f, Q, 4)
    expected = ReductionContext(f, Q, consts, 4).reduce(h)
    result = reduce_cohomology(h, f, Q, consts, 4)
    assert result.r == expected.r
    assert result.eps == expected.eps
    # level taken from h itself
    assert recombination_defect(h, reduce_cohomology(h, f, Q, consts), f).is_zero()


def test_reduce_rejects_wide_input(curve):
    f, Q = curve
    context = ReductionContext(f, Q, constants(Q), 3)
    h = LaurentPolynomial.monomial(f.ring, (4, Q.d_b))
    with pytest.raises(ValueError):
        context.reduce(h)


def test_plan_constants():
    f, Q = _curve("diamond_f7.txt", 3)
    consts = constants(Q)
    plan = reduction_plan(consts, 7, 3, 20)
    assert plan.c == max(consts.kappa2, 1)
    assert 7 ** plan.eps >= 20 * consts.M + consts.Delta
    assert plan.theta >= plan.eps
    assert plan.n1 == 20 - plan.t2 * plan.c
    assert plan.n2 == 20 - plan.t1 * plan.c
