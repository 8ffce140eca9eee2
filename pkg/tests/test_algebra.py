import random
from fractions import Fraction

import pytest

from ncdef.algebra import (
    AlgebraError,
    AlgebraMorphism,
    Derivation,
    NegativeExponent,
    PresentedAlgebra,
    TruncationEscape,
    UndeclaredVariable,
    buchberger,
    identity_morphism,
    p_leading,
    parse_polynomial,
    reduce_poly,
    s_polynomial,
    truncated_operator_matrix,
)
from ncdef.linalg import DenseMatrix, kernel_basis, rank


def chart_A1(a, b):
    A = PresentedAlgebra(["x", "z"], [f"z - x^3 - {a}*x*z^2 - {b}*z^3"], name="A1")
    d = Derivation(A, {"x": f"1 - 2*{a}*x*z - 3*{b}*z^2", "z": f"3*x^2 + {a}*z^2"}, "d1")
    return A, d


def chart_A2(a, b):
    A = PresentedAlgebra(["x", "y"], [f"y^2 - x^3 - {a}*x - {b}"], name="A2")
    d = Derivation(A, {"x": "-2*y", "y": f"-3*x^2 - {a}"}, "d2")
    return A, d


def chart_A3(a, b):
    A = PresentedAlgebra(["x", "y"], [f"y^2 - x^3 - {a}*x - {b}"], inverted="y", name="A3")
    d = Derivation(A, {"x": "-2*y", "y": f"-3*x^2 - {a}"}, "d3")
    return A, d


def restriction_13(A1, A3):
    return AlgebraMorphism(A1, A3, {"x": "x*y^-1", "z": "y^-1"}, name="r13")


def restriction_23(A2, A3):
    return AlgebraMorphism(A2, A3, {"x": "x", "y": "y"}, name="r23")


# --- normal forms ----------------------------------------------------------


def test_relation_reduces_to_zero_in_A2():
    A, _ = chart_A2(0, 1)
    assert A.normal_form("y^2 - x^3 - 1").is_zero()


def test_x_cubed_rewrites_in_A3():
    A, _ = chart_A3(0, 1)
    assert A.normal_form("x^3") == A.normal_form("y^2 - 1")


def test_relation_reduces_to_zero_in_A1():
    A, _ = chart_A1(1, 1)
    assert A.normal_form("z - x^3 - x*z^2 - z^3").is_zero()


def test_normal_form_idempotent():
    A, _ = chart_A3(1, 1)
    e = A.normal_form("x^5*y^-3 + 7*x^4 - 2/3*y^2")
    assert A.normal_form(e) == e
    assert all(A._reducible(m) is None for m in e.terms)


def test_laurent_degree_uses_absolute_value():
    A, _ = chart_A3(1, 1)
    assert A.degree((2, -3)) == 5
    assert A.degree((1, 2)) == 3


def test_nf_monomial_slices_are_finite_and_sorted():
    A, _ = chart_A3(0, 1)
    monos = A.nf_monomials(3)
    assert all(m[0] <= 2 for m in monos)
    assert all(A.degree(m) <= 3 for m in monos)
    degs = [A.degree(m) for m in monos]
    assert degs == sorted(degs)
    # x^i y^j with 0 <= i <= 2, i + |j| <= 3
    assert len(monos) == 7 + 5 + 3


def test_undeclared_variable_rejected():
    A, _ = chart_A2(1, 1)
    with pytest.raises(UndeclaredVariable):
        A.normal_form("x + w")


def test_negative_exponent_on_non_inverted_rejected():
    A, _ = chart_A2(1, 1)
    with pytest.raises(NegativeExponent):
        A.normal_form("y^-1")
    A3, _ = chart_A3(1, 1)
    with pytest.raises(NegativeExponent):
        A3.normal_form("x^-1")


# --- derivations -----------------------------------------------------------


def test_derivation_on_generators_and_constants():
    _, d2 = chart_A2(1, 1)
    A = d2.algebra
    assert d2(A.generator("x")) == A.normal_form("-2*y")
    assert d2(A.one()).is_zero()
    assert d2(A.normal_form("x^2")) == A.normal_form("-4*x*y")


def test_derivation_rejects_bad_images():
    A, _ = chart_A2(1, 1)
    with pytest.raises(AlgebraError):
        Derivation(A, {"x": "1", "y": "1"})


def test_derivation_on_inverted_variable():
    A, d3 = chart_A3(1, 1)
    # d(y^-1) = -y^-2 d(y) = (3x^2 + a) y^-2
    got = d3(A.normal_form("y^-1"))
    assert got == A.normal_form("3*x^2*y^-2 + y^-2")


def _random_element(A, rng, deg=3, nterms=4):
    monos = A.nf_monomials(deg)
    terms = {}
    for _ in range(nterms):
        m = rng.choice(monos)
        terms[m] = Fraction(rng.randint(-6, 6), rng.randint(1, 3))
    return A.normal_form(terms)


@pytest.mark.parametrize("ab", [(1, 1), (0, 1)])
def test_multiplication_commutative_associative_randomized(ab):
    rng = random.Random(42)
    for A, _ in (chart_A1(*ab), chart_A3(*ab)):
        for _ in range(10):
            e1, e2, e3 = (_random_element(A, rng) for _ in range(3))
            assert e1 * e2 == e2 * e1
            assert (e1 * e2) * e3 == e1 * (e2 * e3)


@pytest.mark.parametrize("make", [chart_A1, chart_A2, chart_A3])
def test_leibniz_randomized(make):
    rng = random.Random(99)
    A, d = make(1, 1)
    for _ in range(12):
        e1 = _random_element(A, rng)
        e2 = _random_element(A, rng)
        assert d(e1 * e2) == d(e1) * e2 + e1 * d(e2)


# --- morphisms ---------------------------------------------------------------


def test_morphism_is_ring_hom_and_commutes_with_normal_form():
    rng = random.Random(5)
    A1, _ = chart_A1(1, 1)
    A3, _ = chart_A3(1, 1)
    rho = restriction_13(A1, A3)
    for _ in range(12):
        e1 = _random_element(A1, rng)
        e2 = _random_element(A1, rng)
        assert rho(e1 * e2) == rho(e1) * rho(e2)
        assert rho(e1 + e2) == rho(e1) + rho(e2)
    assert rho(A1.one()) == A3.one()


def test_morphism_rejects_non_relation_preserving_images():
    A1, _ = chart_A1(1, 1)
    A3, _ = chart_A3(1, 1)
    with pytest.raises(AlgebraError):
        AlgebraMorphism(A1, A3, {"x": "x", "z": "y"})


def test_morphism_from_laurent_source_needs_unit_inverse():
    A3, _ = chart_A3(1, 1)
    with pytest.raises(AlgebraError):
        AlgebraMorphism(A3, A3, {"x": "x", "y": "y"})
    ident = identity_morphism(A3)
    assert ident(A3.normal_form("x*y^-5")) == A3.normal_form("x*y^-5")


@pytest.mark.parametrize("ab", [(1, 1), (0, 1)])
def test_restrictions_intertwine_derivations(ab):
    # transporting the U1 derivation along x -> x/y, z -> 1/y gives the U3 one
    A1, d1 = chart_A1(*ab)
    A2, d2 = chart_A2(*ab)
    A3, d3 = chart_A3(*ab)
    r13 = restriction_13(A1, A3)
    r23 = restriction_23(A2, A3)
    for g in ("x", "z"):
        assert r13(d1(A1.generator(g))) == d3(r13(A1.generator(g)))
    for g in ("x", "y"):
        assert r23(d2(A2.generator(g))) == d3(r23(A2.generator(g)))


# --- Groebner ---------------------------------------------------------------


def test_buchberger_on_nonprincipal_ideal():
    # x^2 - y, x*y - 1 in Q[x, y]: reduced deglex basis has the relation y^2 - x
    gens = [parse_polynomial("x^2 - y", ("x", "y")), parse_polynomial("x*y - 1", ("x", "y"))]
    gb = buchberger(gens)
    for f in gens:
        assert not reduce_poly(f, gb)
    for i, g in enumerate(gb):
        for j in range(i):
            assert not reduce_poly(s_polynomial(gb[i], gb[j]), gb)


@pytest.mark.parametrize("ab", [(1, 1), (0, 1), (Fraction(-3, 2), 2)])
def test_stored_groebner_s_polynomials_reduce_to_zero(ab):
    for make in (chart_A1, chart_A2, chart_A3):
        A, _ = make(*ab)
        for i in range(len(A.groebner)):
            for j in range(i):
                s = s_polynomial(A.groebner[i], A.groebner[j])
                assert not reduce_poly(s, A.groebner)
        for rel in A.relations:
            assert not reduce_poly(rel, A.groebner)


def test_groebner_leading_terms_avoid_inverted_variable():
    A, _ = chart_A3(1, 1)
    for g in A.groebner:
        lm, _ = p_leading(g)
        assert lm[A._inv_index] == 0


# --- truncated matrices -------------------------------------------------------


def test_multiplication_by_one_is_identity():
    A, _ = chart_A2(1, 1)
    for d in (2, 4):
        m = truncated_operator_matrix(lambda e: e, A, A, d, d)
        n = len(A.nf_monomials(d))
        assert m == DenseMatrix.identity(n)


def test_multiplication_by_x_is_injective_below_relation_degree():
    A, _ = chart_A2(1, 1)
    x = A.generator("x")
    m = truncated_operator_matrix(lambda e: x * e, A, A, 3, 4)
    assert rank(m) == len(A.nf_monomials(3))


def test_derivation_truncation_kernel_is_constants():
    A, d2 = chart_A2(0, 1)
    m = truncated_operator_matrix(d2, A, A, 3, 5)
    ker = kernel_basis(m)
    assert len(ker) == 1
    # the kernel vector is supported on the constant monomial
    monos = A.nf_monomials(3)
    (v,) = ker
    support = [monos[i] for i, c in enumerate(v) if c]
    assert support == [(0, 0)]


def test_truncation_escape_reported():
    A, d2 = chart_A2(1, 1)
    with pytest.raises(TruncationEscape):
        truncated_operator_matrix(d2, A, A, 3, 3)
