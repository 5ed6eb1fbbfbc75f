from fractions import Fraction

import pytest
from hypothesis import given, settings

from hse.cyclotomic import Cyc
from hse.groupring import (
    FiniteAbelianGroup,
    GroupRingElement,
    StructuralError,
    char_coords,
    from_char_coords,
    idempotent_from_rank_classes,
    integrality_test,
)
from hse.oracle import direct_integrality

from conftest import E, group_and_elements

Z1 = FiniteAbelianGroup(())
Z2 = FiniteAbelianGroup((2,))
Z3 = FiniteAbelianGroup((3,))


def test_group_validation():
    with pytest.raises(StructuralError):
        FiniteAbelianGroup((2, 3))
    with pytest.raises(StructuralError):
        FiniteAbelianGroup((1,))
    G = FiniteAbelianGroup((2, 4))
    assert G.order == 8 and G.exponent == 4 and G.index((0, 0)) == 0


def test_ring_ops_small_cases():
    one_plus_g = E(Z2, ((0,), 1), ((1,), 1))
    one_minus_g = E(Z2, ((0,), 1), ((1,), -1))
    assert (one_plus_g * one_minus_g).is_zero()
    x = E(Z2, ((0,), 2), ((1,), 3))
    assert x.involution() == x
    assert E(Z3, ((0,), 1), ((1,), 2), ((2,), 3)).augmentation() == 6


def test_char_coords_small_cases():
    a, b = Fraction(4), Fraction(-7)
    assert char_coords(E(Z2, ((0,), a), ((1,), b))) == [a + b, a - b]
    assert char_coords(GroupRingElement.scalar(Z1, 5)) == [5]
    z = Cyc.zeta(3)
    got = char_coords(E(Z3, ((0,), 1), ((1,), 1)))
    assert got[0] == 2 and got[1] == 1 + z and got[2] == 1 + z * z


def test_integrality_small_cases():
    assert integrality_test(Z2, [1, 2]) is False
    assert direct_integrality(Z2, [1, 2]) is False
    assert integrality_test(Z2, [1, 1]) is True
    z = Cyc.zeta(3)
    assert integrality_test(Z3, [0, z, z]) is False


def test_idempotent_small_cases():
    e1, e_ge1, N1 = idempotent_from_rank_classes(Z2, [1, 0], 1)
    assert e1 == E(Z2, ((0,), Fraction(1, 2)), ((1,), Fraction(1, 2)))
    assert N1 == 2 and e_ge1 == e1
    e0, _, _ = idempotent_from_rank_classes(Z2, [1, 0], 0)
    assert e0 == E(Z2, ((0,), Fraction(1, 2)), ((1,), Fraction(-1, 2)))
    e0, _, N0 = idempotent_from_rank_classes(Z1, [0], 0)
    assert e0 == GroupRingElement.one(Z1) and N0 == 1
    G = FiniteAbelianGroup((2, 2))
    assert idempotent_from_rank_classes(G, [2] * 4, 2)[0] == GroupRingElement.one(G)


def test_rank_map_must_be_galois_constant():
    G = FiniteAbelianGroup((3,))
    with pytest.raises(StructuralError):
        idempotent_from_rank_classes(G, [0, 1, 0], 1)


@settings(max_examples=60, deadline=None)
@given(group_and_elements(count=1, den=3))
def test_char_coords_round_trip(data):
    G, x = data
    assert from_char_coords(G, char_coords(x)) == x


@settings(max_examples=100, deadline=None)
@given(group_and_elements(count=1, bound=8, den=16))
def test_integrality_matches_coefficients(data):
    G, x = data
    coords = char_coords(x)
    assert integrality_test(G, coords) == x.is_integral()
    assert direct_integrality(G, coords) == x.is_integral()


@settings(max_examples=60, deadline=None)
@given(group_and_elements(count=2))
def test_involution_is_multiplicative(data):
    G, x, y = data
    assert (x * y).involution() == x.involution() * y.involution()
    cx, ci = char_coords(x), char_coords(x.involution())
    for c, g in enumerate(G.elements):
        assert ci[c] == cx[G.index(G.inv(g))]


@settings(max_examples=40, deadline=None)
@given(group_and_elements(count=1, bound=1))
def test_idempotents_orthogonal_and_complete(data):
    G, x = data
    # any Galois-constant rank map; take ranks from the element's coefficients
    ranks = [0] * G.order
    for orb in G.galois_orbits:
        r = int(abs(x.coeffs[orb[0]]))
        for i in orb:
            ranks[i] = r
    es = [idempotent_from_rank_classes(G, ranks, a)[0] for a in range(3)]
    for a in range(3):
        assert es[a] * es[a] == es[a]
        for b in range(3):
            if a != b:
                assert (es[a] * es[b]).is_zero()
    assert sum(es, GroupRingElement.zero(G)) == GroupRingElement.one(G)


def test_integrality_batch_1000_seeded():
    import random
    rng = random.Random(5)
    from conftest import GROUPS
    for i in range(1000):
        G = FiniteAbelianGroup(GROUPS[i % len(GROUPS)])
        den = G.order ** 2
        x = GroupRingElement(G, [Fraction(rng.randint(-9, 9), rng.randint(1, den)) for _ in G.elements])
        assert integrality_test(G, char_coords(x)) == x.is_integral()
