import random
from fractions import Fraction

import pytest

from hse.complexes import cohomology
from hse.gmodule import (
    GLattice,
    IdealLattice,
    PresentedModule,
    annihilator,
    bidual,
    exterior_power,
    fitting_ideal,
    is_reflexive,
    separability_test,
    transport,
    wedge_vectors,
    zg_dual,
)
from hse.groupring import FiniteAbelianGroup, GroupRingElement
from hse.linalg import PreconditionError, ZLattice
from hse.oracle import (
    InstanceSpec,
    _mm,
    bidual_agrees,
    brute_force_bidual,
    random_instance,
    random_unimodular,
)

from conftest import GROUPS, E

Z1 = FiniteAbelianGroup(())
Z2 = FiniteAbelianGroup((2,))


def _s(G, c):
    return GroupRingElement.scalar(G, c)


def _ideal(G, rows):
    return IdealLattice(G, ZLattice(G.order, rows))


def test_fitting_small_cases():
    M = PresentedModule(Z1, 2, [[_s(Z1, 0), _s(Z1, 0)], [_s(Z1, 0), _s(Z1, 2)]])
    assert fitting_ideal(M, 0).is_zero()
    assert fitting_ideal(M, 1) == _ideal(Z1, [[2]])
    assert fitting_ideal(M, 2).is_whole()
    one_minus_g = E(Z2, ((0,), 1), ((1,), -1))
    N = PresentedModule(Z2, 1, [[one_minus_g]])
    assert fitting_ideal(N, 0) == IdealLattice.generated_by(Z2, [one_minus_g])
    assert fitting_ideal(N, 0) == _ideal(Z2, [[1, -1]])


def test_fitting_of_free_modules():
    for inv in GROUPS:
        G = FiniteAbelianGroup(inv)
        F = PresentedModule(G, 2, [])
        assert fitting_ideal(F, 0).is_zero() and fitting_ideal(F, 1).is_zero()
        assert fitting_ideal(F, 2).is_whole() and fitting_ideal(F, 5).is_whole()


def test_annihilator_small_cases():
    M = PresentedModule(Z2, 1, [[_s(Z2, 2)]])
    assert annihilator(M) == _ideal(Z2, [[2, 0], [0, 2]])
    assert annihilator(PresentedModule(Z2, 1, [])).is_zero()
    one_minus_g = E(Z2, ((0,), 1), ((1,), -1))
    assert annihilator(PresentedModule(Z2, 1, [[one_minus_g]])) == IdealLattice.generated_by(Z2, [one_minus_g])


def test_separability_small_cases():
    M = PresentedModule(Z1, 2, [[_s(Z1, 0), _s(Z1, 2)]])
    assert separability_test(M, [])[0]
    ok, r = separability_test(M, [[_s(Z1, 1), _s(Z1, 0)]])
    assert ok and r[0][0] == _s(Z1, 1)
    one_minus_g = E(Z2, ((0,), 1), ((1,), -1))
    N = PresentedModule(Z2, 1, [[one_minus_g]])
    assert not separability_test(N, [[_s(Z2, 1)]])[0]


def test_torsion_decomposition_small_cases():
    M = PresentedModule(Z1, 2, [[_s(Z1, 0), _s(Z1, 6)]])
    inv, tf = M.torsion_decomp()
    assert inv == [6] and tf.rank == 1
    F = PresentedModule(Z1, 1, [[_s(Z1, 5)]])
    assert F.torsion_decomp()[1].rank == 0
    D = PresentedModule(Z1, 2, [[_s(Z1, 0), _s(Z1, 0)], [_s(Z1, 0), _s(Z1, 2)]])
    inv, tf = D.torsion_decomp()
    assert inv == [2] and tf.rank == 1


def test_dual_small_cases():
    for inv in GROUPS:
        G = FiniteAbelianGroup(inv)
        assert zg_dual(GLattice.free(G, 1)).rank == G.order
    M = GLattice.from_sublattice(Z2, 1, ZLattice(2, [[1, 1]]))
    D = zg_dual(M)
    assert D.rank == 1
    assert transport(M, [1]) == [E(Z2, ((0,), 1), ((1,), 1))]
    zero = GLattice.from_sublattice(Z2, 1, ZLattice.zero(2))
    assert zg_dual(zero).rank == 0


def test_exterior_power_small_cases():
    F = PresentedModule(Z2, 2, [])
    W = exterior_power(F, 2)
    assert W.m == 1 and W.relations == []
    M = PresentedModule(Z2, 2, [[_s(Z2, 2), _s(Z2, 0)]])
    W1 = exterior_power(M, 1)
    assert W1.m == M.m and W1.relation_lattice() == M.relation_lattice()
    u = [_s(Z1, 1), _s(Z1, 0)]
    v = [_s(Z1, 0), _s(Z1, 1)]
    s = [a + b for a, b in zip(u, v)]
    d = [a - b for a, b in zip(u, v)]
    assert wedge_vectors([s, d], 2, Z1) == [_s(Z1, -2)]


def test_bidual_small_cases():
    M = GLattice.from_sublattice(Z2, 1, ZLattice(2, [[1, 1]]))
    assert bidual(M, 1).lattice == ZLattice(2, [[1, 1]])
    assert bidual_agrees(brute_force_bidual(M, 1), bidual(M, 1).lattice)
    F = GLattice.free(Z2, 2)
    assert bidual(F, 0).lattice == ZLattice.standard(2)
    assert bidual(F, 2).lattice == ZLattice.standard(2)
    assert bidual(F, 1).lattice == ZLattice.standard(4)


def _random_module(G, rng, m=None):
    m = m or rng.randint(1, 3)
    s = rng.randint(0, m + 1)
    rels = [[GroupRingElement(G, [rng.randint(-2, 2) for _ in G.elements]) for _ in range(m)] for _ in range(s)]
    return PresentedModule(G, m, rels)


def _re_present(M, rng):
    """Equivalent presentation: row/column operations over Z[G] and one extra generator."""
    G = M.group
    m = M.m
    U, _ = random_unimodular(G, m, rng)
    rels = _mm(M.relations, U, G) if M.relations else []
    if len(rels) > 1:
        V, _ = random_unimodular(G, len(rels), rng)
        rels = _mm(V, rels, G)
    # new generator f = sum c_j e_j, relation f - sum c_j e_j
    c = [GroupRingElement(G, [rng.randint(-1, 1) for _ in G.elements]) for _ in range(m)]
    rels = [list(r) + [GroupRingElement.zero(G)] for r in rels]
    rels.append([(-x).simplified() for x in c] + [GroupRingElement.one(G)])
    return PresentedModule(G, m + 1, rels)


def test_fitting_presentation_independence():
    rng = random.Random(21)
    for i in range(100):
        G = FiniteAbelianGroup(GROUPS[i % 4])
        M = _random_module(G, rng, m=rng.randint(1, 2))
        N = _re_present(M, rng)
        for a in range(4):
            assert fitting_ideal(M, a) == fitting_ideal(N, a), (i, a)


def test_fitting_monotone_and_free_shift():
    rng = random.Random(22)
    for i in range(40):
        G = FiniteAbelianGroup(GROUPS[i % 5])
        M = _random_module(G, rng)
        fits = [fitting_ideal(M, a) for a in range(M.m + 2)]
        for a in range(len(fits) - 1):
            assert fits[a + 1].contains(fits[a])
        r = rng.randint(1, 2)
        z = GroupRingElement.zero(G)
        Mr = PresentedModule(G, M.m + r, [list(row) + [z] * r for row in M.relations])
        for a in range(r, r + 3):
            assert fitting_ideal(Mr, a) == fitting_ideal(M, a - r)


def _random_glattices(count, seed):
    out = []
    for s in range(seed, seed + count):
        inst = random_instance(InstanceSpec(s, GROUPS[s % 5], d=2 + s % 2))
        H1 = cohomology(inst.complex).H1
        if H1.rank:
            out.append(H1)
    return out


def test_transport_is_equivariant_and_recovers_phi():
    rng = random.Random(23)
    for M in _random_glattices(30, 100):
        G = M.group
        phi = [rng.randint(-3, 3) for _ in range(M.rank)]
        Phi = transport(M, phi)
        assert [p.coeffs[0] for p in Phi] == phi
        for g in G.elements:
            A = M.element_matrix(g)
            gx = GroupRingElement.basis(G, g)
            for j in range(M.rank):
                lhs = sum((Phi[k] * A[j][k] for k in range(M.rank)), GroupRingElement.zero(G))
                assert lhs == gx * Phi[j]


def test_torsion_free_modules_are_reflexive():
    for M in _random_glattices(40, 200):
        assert is_reflexive(M)
    rng = random.Random(24)
    for i in range(20):
        G = FiniteAbelianGroup(GROUPS[1 + i % 4])
        x = GroupRingElement(G, [rng.randint(-2, 2) for _ in G.elements])
        I = IdealLattice.generated_by(G, [x])
        if I.is_zero():
            continue
        assert is_reflexive(GLattice.from_sublattice(G, 1, I.lattice))


def test_bidual_matches_oracle():
    checked = 0
    for M in _random_glattices(60, 300):
        if M.rank > 6:
            continue
        for a in (1, 2):
            if a > M.rank:
                continue
            try:
                rows = brute_force_bidual(M, a)
            except PreconditionError:
                continue
            assert bidual_agrees(rows, bidual(M, a).lattice)
            checked += 1
    assert checked >= 20


def test_fitting_rejects_negative_a():
    with pytest.raises(PreconditionError):
        fitting_ideal(PresentedModule(Z1, 1, []), -1)
