import random
from fractions import Fraction

import pytest

from ncdef.matric import (
    MatricError,
    MatricGeneratorSet,
    MatricMorphism,
    MatricTruncatedFree,
    SmallSurjection,
    commutativization,
    make_test_algebra,
    quotient,
    radical_power,
)


def free_on(p, names_positions, N):
    return MatricTruncatedFree(MatricGeneratorSet(p, names_positions), N)


def two_var_free(N):
    return free_on(1, [("t1", 1, 1), ("t2", 1, 1)], N)


# --- test objects k^p[eps_ij] -------------------------------------------------


def test_dual_numbers():
    R = make_test_algebra(1, 1, 1)
    assert R.dim == 2
    eps = R.generator("eps")
    assert (eps * eps).is_zero()


def test_pointed_test_algebra_p2():
    R = make_test_algebra(2, 1, 2)
    assert R.dim == 3
    eps = R.generator("eps")
    e1, e2 = R.idempotent(1), R.idempotent(2)
    assert e1 * eps == eps
    assert eps * e2 == eps
    assert (eps * e1).is_zero()
    assert (e2 * eps).is_zero()
    assert (eps * eps).is_zero()


def test_index_out_of_range():
    with pytest.raises(MatricError):
        make_test_algebra(2, 1, 3)


# --- quotients ----------------------------------------------------------------


def test_commutator_quotient_dims():
    free = two_var_free(3)
    c = free.generator("t1") * free.generator("t2") - free.generator("t2") * free.generator("t1")
    R = quotient(free, [c])
    # commutative monomials of degree 0,1,2 in two variables: 1, 2, 3
    assert R.radical_dims_by_order() == [1, 2, 3]


def test_zero_ideal_gives_free_algebra():
    free = two_var_free(3)
    R = quotient(free, [])
    assert R.dim == free.dim == 1 + 2 + 4


def test_killing_one_generator():
    free = two_var_free(3)
    R = quotient(free, [free.generator("t1")])
    # k[t2]/(t2^3) pattern
    assert R.dim == 3
    t2 = R.generator("t2")
    assert not (t2 * t2).is_zero()
    assert (t2 * t2 * t2).is_zero()


def test_ideal_generator_outside_radical_rejected():
    free = two_var_free(3)
    with pytest.raises(MatricError):
        quotient(free, [free.one()])


def test_quotient_multiplication_associative_on_basis():
    free = two_var_free(4)
    c = free.generator("t1") * free.generator("t2") - free.generator("t2") * free.generator("t1")
    R = quotient(free, [c])
    elems = [R.element({w: Fraction(1)}) for w in R.qbasis]
    for a in elems:
        for b in elems:
            for cc in elems[:4]:
                assert (a * b) * cc == a * (b * cc)


def test_radical_power_vanishes_at_truncation():
    free = two_var_free(4)
    R = quotient(free, [])
    assert radical_power(R, 4) == []
    assert len(radical_power(R, 3)) == 8


# --- matric structure -----------------------------------------------------------


def _random_artin(rng, p, N=3):
    names = []
    for k in range(rng.randint(1, 3)):
        names.append((f"g{k}", rng.randint(1, p), rng.randint(1, p)))
    free = free_on(p, names, N)
    rad = free.radical_words(1)
    gens = []
    for _ in range(rng.randint(0, 2)):
        coeffs = {}
        for w in rng.sample(rad, min(len(rad), rng.randint(1, 3))):
            coeffs[w] = Fraction(rng.randint(-3, 3))
        g = free.element(coeffs)
        if not g.is_zero():
            gens.append(g)
    return quotient(free, gens)


def test_matric_components_decompose_randomized():
    rng = random.Random(2024)
    for _ in range(15):
        p = rng.randint(1, 3)
        R = _random_artin(rng, p)
        # e_i R e_j decompose R: dimensions add up and components are disjoint
        total = 0
        for i in range(1, p + 1):
            for j in range(1, p + 1):
                comp = [
                    w for w in R.qbasis
                    if R.free.word_row(w) == i and R.free.word_col(w) == j
                ]
                total += len(comp)
                for w in comp:
                    e = R.element({w: Fraction(1)})
                    assert R.component(e, i, j) == e
        assert total == R.dim


def test_idempotents_orthogonal_and_sum_to_one():
    R = make_test_algebra(3, 2, 3)
    s = R.zero()
    for i in range(1, 4):
        for j in range(1, 4):
            prod = R.idempotent(i) * R.idempotent(j)
            if i == j:
                assert prod == R.idempotent(i)
            else:
                assert prod.is_zero()
        s = s + R.idempotent(i)
    assert s == R.one()


# --- commutativization ------------------------------------------------------------


def test_commutativization_kills_off_diagonal_generator():
    free = free_on(2, [("x12", 1, 2)], 2)
    R = quotient(free, [])
    assert R.dim == 3
    Rc = commutativization(R)
    assert Rc.dim == 2
    assert Rc.generator("x12").is_zero()


def test_commutativization_of_commutative_algebra_is_isomorphic():
    free = free_on(1, [("t", 1, 1)], 4)
    R = quotient(free, [])
    Rc = commutativization(R)
    assert Rc.dim == R.dim == 4


def test_commutativization_of_free_two_vars():
    free = two_var_free(3)
    R = quotient(free, [])
    Rc = commutativization(R)
    assert Rc.radical_dims_by_order() == [1, 2, 3]
    assert Rc.is_commutative()


def test_commutativization_functorial_on_quotient_maps():
    # a further quotient S of R induces R^c -> S^c: the commutativized ideal
    # of R lands inside that of S
    rng = random.Random(123)
    for _ in range(10):
        p = rng.randint(1, 3)
        R = _random_artin(rng, p)
        extra = []
        rad = R.free.radical_words(1)
        for w in rng.sample(rad, min(len(rad), 2)):
            extra.append(R.free.element({w: Fraction(rng.randint(1, 3))}))
        S = quotient(R.free, R.ideal_generators + extra)
        Rc, Sc = commutativization(R), commutativization(S)
        for g in Rc.ideal_generators:
            assert Sc.in_ideal(S.free.element(dict(g.coeffs)))


def test_commutativization_idempotent_and_kills_offdiagonal_randomized():
    rng = random.Random(77)
    for _ in range(12):
        p = rng.randint(1, 3)
        R = _random_artin(rng, p)
        Rc = commutativization(R)
        assert Rc.is_commutative()
        Rcc = commutativization(Rc)
        assert Rcc.dim == Rc.dim
        for i in range(1, p + 1):
            for j in range(1, p + 1):
                if i != j:
                    for w in Rc.qbasis:
                        e = Rc.element({w: Fraction(1)})
                        assert Rc.component(e, i, j).is_zero()


# --- small surjections ---------------------------------------------------------


def test_small_surjection_accepted():
    free = two_var_free(3)
    R = quotient(free, [])            # k<t1,t2>/m^3
    words2 = [free.element({w: Fraction(1)}) for w in free.radical_words(2)]
    S = quotient(free, words2)        # k<t1,t2>/m^2
    u = SmallSurjection(R, S)
    assert len(u.kernel_basis) == 4   # the four length-2 words
    t1 = R.generator("t1")
    assert u.apply(t1 * t1).is_zero()
    assert not u.apply(t1).is_zero()


def test_non_small_surjection_rejected():
    # k[t]/t^4 -> k[t]/t^2 has kernel (t^2, t^3) with t^2 * t = t^3 != 0
    free = free_on(1, [("t", 1, 1)], 4)
    R = quotient(free, [])
    t = free.generator("t")
    S = quotient(free, [t * t])
    with pytest.raises(MatricError):
        SmallSurjection(R, S)


def test_surjection_requires_ideal_inclusion():
    free = two_var_free(3)
    t1 = free.generator("t1")
    R = quotient(free, [t1])
    S = quotient(free, [])
    with pytest.raises(MatricError):
        SmallSurjection(R, S)


def test_kernel_coordinates_roundtrip():
    free = two_var_free(3)
    R = quotient(free, [])
    words2 = [free.element({w: Fraction(1)}) for w in free.radical_words(2)]
    S = quotient(free, words2)
    u = SmallSurjection(R, S)
    t1, t2 = R.generator("t1"), R.generator("t2")
    k = t1 * t2 - t2 * t1
    coords = u.kernel_coordinates(k)
    rebuilt = R.zero()
    for c, b in zip(coords, u.kernel_basis):
        rebuilt = rebuilt + b.scale(c)
    assert rebuilt == k


# --- morphisms -------------------------------------------------------------------


def test_morphism_pushes_words():
    free = two_var_free(4)
    R = quotient(free, [])
    t1, t2 = R.generator("t1"), R.generator("t2")
    u = MatricMorphism(R, R, {"t1": t1 + t2 * t2, "t2": t2})
    img = u.apply(t1 * t2)
    assert img == t1 * t2 + t2 * t2 * t2


def test_morphism_must_kill_source_ideal():
    free = two_var_free(3)
    c = free.generator("t1") * free.generator("t2") - free.generator("t2") * free.generator("t1")
    R = quotient(free, [c])
    F = quotient(free, [])
    t1, t2 = F.generator("t1"), F.generator("t2")
    with pytest.raises(MatricError):
        MatricMorphism(R, F, {"t1": t1, "t2": t2})
