from fractions import Fraction

import pytest

from hse.complexes import StrictComplex
from hse.descent import (
    augmentation_power,
    augmentation_quotient,
    bockstein,
    check_mrs,
    compare_in_Q,
    make_datum,
    norm_image_in_nu,
    norm_operator,
    nu_embedding,
)
from hse.groupring import FiniteAbelianGroup, GroupRingElement
from hse.linalg import PreconditionError
from hse.oracle import mrs_instance
from hse.special import LambdaMap, random_lambda

Z2 = FiniteAbelianGroup((2,))
Z3 = FiniteAbelianGroup((3,))
Z4 = FiniteAbelianGroup((4,))
V4 = FiniteAbelianGroup((2, 2))


def _z2_datum():
    one = GroupRingElement.one(Z2)
    g = GroupRingElement.basis(Z2, (1,))
    C = StrictComplex(Z2, [[one - g]])
    datum = make_datum(C, Z2.elements, [], [[GroupRingElement.one(FiniteAbelianGroup(()))]])
    return C, datum


def test_augmentation_quotients():
    q = augmentation_quotient(Z2, Z2.elements, 1)
    assert q.invariants == [2] and q.generators[1] == [1, -1]
    assert augmentation_quotient(Z2, Z2.elements, 0).invariants == [0]
    assert augmentation_quotient(Z3, Z3.elements, 1).invariants == [3]
    assert augmentation_quotient(Z4, [(0,)], 1).order == 1
    with pytest.raises(PreconditionError):
        augmentation_quotient(Z2, Z2.elements, -1)


def test_augmentation_powers_decrease():
    for G in (Z2, Z4, V4):
        for J in G.all_subgroups():
            for k in range(3):
                assert augmentation_power(G, J, k).contains(augmentation_power(G, J, k + 1))


def test_bockstein_z2_example():
    C, datum = _z2_datum()
    one_q = GroupRingElement.one(datum.quotient.Q)
    b = bockstein(datum, 0, [one_q])
    assert list(b.coeffs) == [1, -1]
    # the class of 1 - g generates I/I^2 = Z/2
    I2 = augmentation_power(Z2, Z2.elements, 2)
    assert not I2.contains_vector(b.coeffs)
    assert augmentation_power(Z2, Z2.elements, 1).contains_vector(b.coeffs)


def test_bockstein_vanishes_deep_in_the_filtration():
    # psi row in I(J)^2 gives a Bockstein in I^2, which dies in Q_1
    one = GroupRingElement.one(Z2)
    g = GroupRingElement.basis(Z2, (1,))
    C = StrictComplex(Z2, [[(one - g) * 2]])
    datum = make_datum(C, Z2.elements, [], [[GroupRingElement.one(FiniteAbelianGroup(()))]])
    b = bockstein(datum, 0, [GroupRingElement.one(datum.quotient.Q)])
    assert augmentation_power(Z2, Z2.elements, 2).contains_vector(b.coeffs)


def test_norm_operator_examples():
    one = GroupRingElement.one(Z2)
    g = GroupRingElement.basis(Z2, (1,))
    N = norm_operator([one - g], Z2, Z2.elements)
    assert N == [[[1, -1], [-1, 1]]]
    eta = [one * 3 + g, g * 2]
    assert norm_operator(eta, Z2, [(0,)]) == [[[3, 0], [1, 0]], [[0, 0], [2, 0]]]


def test_nu_embedding_trivial_cases():
    from hse.complexes import QuotientGroup
    qg = QuotientGroup(Z4, [(0,)])
    x = [GroupRingElement(Z4, [1, 2, 0, -1])]
    assert nu_embedding(x, qg) == norm_operator(x, Z4, [(0,)])
    qg = QuotientGroup(Z4, [(0,), (2,)])
    zero = nu_embedding([GroupRingElement.zero(Z4)], qg)
    assert all(not any(v) for per in zero for v in per)


def test_norm_lands_in_image_of_nu_on_free_inputs():
    for G in (Z2, Z4, V4):
        for J in G.all_subgroups():
            for k in (1, 2):
                assert norm_image_in_nu(G, J, 2, 1, k)


def test_compare_in_Q_has_teeth():
    G, J = Z2, Z2.elements
    lhs = [[[1, -1], [-1, 1]]]
    assert compare_in_Q(lhs, lhs, 1, G, J, 1)[0]
    assert not compare_in_Q(lhs, [[[0, 0], [0, 0]]], 1, G, J, 1)[0]
    assert compare_in_Q(lhs, [[[-1, 1], [1, -1]]], -1, G, J, 1)[0]


def test_mrs_z2_example():
    C, datum = _z2_datum()
    for lam in (LambdaMap.identity(C), LambdaMap(Z2, [[[Fraction(3)]], []])):
        r = check_mrs(datum, lam)
        assert r.passed(), r.checks
        assert r.k == 1 and r.sign == 1


def test_mrs_trivial_subgroup_and_equal_sizes():
    for seed in range(4):
        inst = mrs_instance(seed, (4,), d=3, a=1, ap=1, J=[(0,)])
        datum = make_datum(inst.complex, [(0,)], inst.X, inst.extra["Xp"])
        assert check_mrs(datum, inst.lam).passed()
        inst = mrs_instance(seed, (2, 2), d=3, a=1, ap=1, J=[(0, 0), (1, 0)])
        datum = make_datum(inst.complex, inst.extra["J"], inst.X, inst.extra["Xp"])
        r = check_mrs(datum, inst.lam)
        assert r.passed() and r.k == 0


def test_mrs_random_sample():
    for seed in range(10):
        grp = [(2,), (4,), (2, 2)][seed % 3]
        G = FiniteAbelianGroup(grp)
        J = G.all_subgroups()[seed % len(G.all_subgroups())]
        a = seed % 2
        inst = mrs_instance(seed, grp, d=3, a=a, ap=a + 1, J=J)
        datum = make_datum(inst.complex, J, inst.X, inst.extra["Xp"])
        r = check_mrs(datum, inst.lam)
        assert r.passed(), (seed, r.checks)
        assert r.checks["receptor_injective"] is not None


def test_mrs_with_random_lambda_rescaling():
    inst = mrs_instance(3, (2, 2), d=3, a=1, ap=2)
    datum = make_datum(inst.complex, inst.extra["J"], inst.X, inst.extra["Xp"])
    import random
    lam = random_lambda(inst.complex, random.Random(9))
    assert check_mrs(datum, lam).passed()


def test_make_datum_validates():
    C, _ = _z2_datum()
    with pytest.raises(PreconditionError):
        make_datum(C, Z2.elements, [[GroupRingElement.one(Z2)]], [])
