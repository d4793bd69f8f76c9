#!/usr/bin/env python3
"""Presented algebras, maps, heights and the big-height test"""
import itertools
from functools import reduce
from operator import mul

import pytest
from hypothesis import given, settings, strategies as st
from sympy import Matrix

from algebra import (
    AlgebraError, AlgebraMap, AssertionMissingError, IdealInAlgebra, MapError,
    PresentedAlgebra, algebra_dimension, bight_leq_one, check_map, extend_ideal,
    ideal_height, laurent_algebra,
)
from groebner import IdealGens, groebner_basis
from polycore import ArityMismatchError, PolyRing

QR = PolyRing(("R", "S", "T", "Z"))
R_, S_, T_, Z_ = QR.gens()
QUADRIC = PresentedAlgebra(QR, IdealGens(QR, (R_ * S_ - T_ * Z_,)), is_domain=True, name="A")

PR = PolyRing(("R", "T"))
PLANE = PresentedAlgebra.polynomial(PR, "P")

K3 = PolyRing(("x", "y", "z"))
x, y, z = K3.gens()
SPACE = PresentedAlgebra.polynomial(K3, "K3")


def ideal(A, *gens, name=""):
    return IdealInAlgebra.generated_by(A, gens, name)


def test_quadric_dimension_and_height():
    assert algebra_dimension(QUADRIC) == 3
    a = ideal(QUADRIC, R_, T_, name="a")
    assert ideal_height(QUADRIC, a) == 1


def test_height_needs_domain_assertion():
    A = PresentedAlgebra(QR, QUADRIC.ideal, name="A")
    with pytest.raises(AssertionMissingError):
        ideal_height(A, ideal(A, R_))


def test_witness_map_extends_to_height_two():
    phi = AlgebraMap.from_assignments(
        QUADRIC, PLANE, {"R": PR.gen("R"), "S": PR.zero(), "T": PR.gen("T"), "Z": PR.zero()}, "phi")
    assert check_map(phi)
    ext = extend_ideal(phi, ideal(QUADRIC, R_, T_, name="a"))
    assert ext.label == "a·P"
    assert ideal_height(PLANE, ext) == 2


def test_ill_defined_map_is_rejected():
    bad = AlgebraMap.from_assignments(
        QUADRIC, PLANE, {"R": PR.gen("R"), "S": PR.one(), "T": PR.gen("T"), "Z": PR.zero()}, "bad")
    assert not check_map(bad)


def test_map_arity_and_composition():
    with pytest.raises(ArityMismatchError):
        AlgebraMap(QUADRIC, PLANE, (PR.gen("R"),), "short")
    with pytest.raises(ArityMismatchError):
        AlgebraMap.from_assignments(QUADRIC, PLANE, {"R": PR.gen("R")}, "partial")
    ident = AlgebraMap.identity(PLANE)
    swap = AlgebraMap(PLANE, PLANE, (PR.gen("T"), PR.gen("R")), "swap")
    both = swap.then(swap)
    assert both.images == ident.images
    with pytest.raises(MapError):
        swap.then(AlgebraMap.identity(QUADRIC))


def test_reduce_and_generated_by_drop_zero_generators():
    a = ideal(QUADRIC, R_ * S_ - T_ * Z_, R_)
    assert len(a) == 1
    assert QUADRIC.contains(R_ * S_ - T_ * Z_)
    assert not QUADRIC.contains(R_)


def test_unit_ideal_and_zero_ring_conventions():
    assert ideal_height(SPACE, ideal(SPACE, x - 1, x)) == 1
    degenerate = PresentedAlgebra(K3, IdealGens(K3, (K3.one(),)), is_domain=True)
    with pytest.raises(AlgebraError):
        algebra_dimension(degenerate)
    zero = PresentedAlgebra(K3, IdealGens(K3, (K3.one(),)), is_domain=True, zero_ring=True)
    assert algebra_dimension(zero) == -1
    assert ideal_height(zero, IdealInAlgebra(zero, IdealGens(K3), "a")) == 0


def test_bight_in_polynomial_ring():
    assert bight_leq_one(SPACE, ideal(SPACE, x * y))
    assert not bight_leq_one(SPACE, ideal(SPACE, x, y))
    assert bight_leq_one(SPACE, ideal(SPACE, x ** 2 * y, x * y ** 2))
    assert not bight_leq_one(SPACE, ideal(SPACE, x * (y - 1), x * z))
    assert bight_leq_one(SPACE, ideal(SPACE))
    assert bight_leq_one(SPACE, ideal(SPACE, x + 1, x))


def test_bight_in_laurent_ring():
    B = laurent_algebra(["V1"], ["T1"], name="B")
    V, W, T = (B.ring.gen(n) for n in ("V1", "_W1", "T1"))
    assert B.ring.variables == ("V1", "_W1", "T1")
    assert bight_leq_one(B, ideal(B, V * T))
    assert bight_leq_one(B, ideal(B, W * T))
    assert not bight_leq_one(B, ideal(B, V - 1, T))
    assert bight_leq_one(B, ideal(B, V * T - T, W * T ** 2))


def test_bight_needs_factorial_presentation():
    with pytest.raises(AssertionMissingError):
        bight_leq_one(QUADRIC, ideal(QUADRIC, R_))
    fake = PresentedAlgebra(QR, QUADRIC.ideal, is_domain=True, is_factorial_ambient=True)
    with pytest.raises(AlgebraError):
        bight_leq_one(fake, ideal(fake, R_))




# Hyperplanes c.(x, y, z) = d, pairwise distinct.
HYPERPLANES = [
    ((1, 0, 0), 0), ((0, 1, 0), 0), ((0, 0, 1), 0), ((1, 1, 0), 0),
    ((0, 1, -1), 0), ((1, 0, 0), 1), ((1, 1, 1), 1), ((0, 0, 1), -2),
]
factor_lists = st.lists(st.lists(st.integers(0, len(HYPERPLANES) - 1), min_size=1, max_size=3),
                        min_size=1, max_size=3)


def linear_form(i):
    (a, b, c), d = HYPERPLANES[i]
    return a * x + b * y + c * z - d


def product_of_factors(choices):
    return [reduce(mul, (linear_form(i) for i in c), K3.one()) for c in choices]


def bight_by_factor_enumeration(choices):
    """Every nonempty V(L_1, ..., L_k), one factor per generator, lies on a common factor."""
    common = set.intersection(*(set(c) for c in choices))

    def row(i):
        coeffs, d = HYPERPLANES[i]
        return list(coeffs) + [d]

    for pick in itertools.product(*(sorted(set(c)) for c in choices)):
        system = Matrix([row(i) for i in sorted(set(pick))])
        if system[:, :3].rank() != system.rank():
            continue
        if not any(Matrix.vstack(system, Matrix([row(h)])).rank() == system.rank() for h in common):
            return False
    return True


@settings(max_examples=100, deadline=None)
@given(factor_lists)
def test_bight_agrees_with_factor_enumeration(choices):
    gens = product_of_factors(choices)
    assert bight_leq_one(SPACE, ideal(SPACE, *gens)) == bight_by_factor_enumeration(choices)


def test_extension_is_functorial():
    phi = AlgebraMap.from_assignments(
        QUADRIC, PLANE, {"R": PR.gen("R"), "S": PR.zero(), "T": PR.gen("T"), "Z": PR.zero()}, "phi")
    swap = AlgebraMap(PLANE, PLANE, (PR.gen("T") + PR.gen("R"), PR.gen("R") ** 2), "swap")
    for gens in [(R_, T_), (R_ + S_, T_ * Z_), (R_ ** 2 - T_,)]:
        a = ideal(QUADRIC, *gens, name="a")
        direct = extend_ideal(phi.then(swap), a)
        stepwise = extend_ideal(swap, extend_ideal(phi, a))
        assert direct.algebra == stepwise.algebra == PLANE
        assert groebner_basis(direct.ambient()).basis == groebner_basis(stepwise.ambient()).basis


@settings(max_examples=30, deadline=None)
@given(factor_lists)
def test_identity_extension_keeps_height(choices):
    a = ideal(SPACE, *product_of_factors(choices), name="a")
    assert ideal_height(SPACE, extend_ideal(AlgebraMap.identity(SPACE), a)) == ideal_height(SPACE, a)


def test_identity_extension_keeps_height_in_a_quotient():
    for gens in [(R_, T_), (R_, S_, T_, Z_), (R_ * S_,)]:
        a = ideal(QUADRIC, *gens, name="a")
        ext = extend_ideal(AlgebraMap.identity(QUADRIC), a)
        assert ideal_height(QUADRIC, ext) == ideal_height(QUADRIC, a)
