import random
from fractions import Fraction

import pytest

from hse.complexes import FreeComplex, StrictComplex, cohomology
from hse.gmodule import IdealLattice, bidual, fitting_ideal, wedge_flat
from hse.groupring import FiniteAbelianGroup, GroupRingElement, char_coords
from hse.linalg import PreconditionError, ZLattice
from hse.oracle import InstanceSpec, pairing_oracle, random_instance, random_unimodular, random_X
from hse.special import (
    LambdaMap,
    characteristic_element,
    check_charels,
    default_x,
    eta_via_minors,
    evaluation_lattice,
    finite_case_identity,
    pairing,
    random_lambda,
    report_passes,
    special_element,
    theta_det,
    transport_lambda,
)

from conftest import GROUPS, E

Z1 = FiniteAbelianGroup(())
Z2 = FiniteAbelianGroup((2,))


def s(x, G=Z1):
    return GroupRingElement.scalar(G, x)


def _diag02():
    return StrictComplex(Z1, [[s(0), s(0)], [s(0), s(2)]])


def _z2():
    g = GroupRingElement.basis(Z2, (1,))
    return StrictComplex(Z2, [[s(1, Z2) - g]])


def _ideal(G, rows, den=1):
    return IdealLattice(G, ZLattice(G.order, rows, den))


# characteristic elements ---------------------------------------------------------

def test_theta_of_acyclic_complex():
    for inv in GROUPS:
        G = FiniteAbelianGroup(inv)
        C = StrictComplex(G, [[s(1, G)]])
        lat, u = theta_det(C, LambdaMap.identity(C), verify=True)
        assert u == s(1, G) and lat.is_whole()


def test_theta_of_psi_3():
    C = StrictComplex(Z1, [[s(3)]])
    lat, u = theta_det(C, LambdaMap.identity(C), verify=True)
    assert abs(u.coeffs[0]) == Fraction(1, 3)
    assert lat == _ideal(Z1, [[1]], 3)
    H2 = cohomology(C).H2
    assert IdealLattice.generated_by(Z1, [s(1 / u.coeffs[0])]) == fitting_ideal(H2, 0)


def test_theta_of_diag02():
    C = _diag02()
    lat, u = theta_det(C, LambdaMap.identity(C), verify=True)
    # kernel-adapted convention: W = <b2>, so u = -1/2
    assert u == s(Fraction(-1, 2))


def test_theta_of_z2_example():
    C = _z2()
    lam = LambdaMap(Z2, [[[Fraction(1, 2)]], []])
    L = characteristic_element(C, lam, verify=True)
    # chi_1 is the acyclic character: det chi_1(psi)^-1 = 1/2
    assert char_coords(L)[1] == Fraction(1, 2)
    assert char_coords(L)[0] == 2


# special elements -----------------------------------------------------------------

def test_special_element_rank_zero():
    C = StrictComplex(Z1, [[s(3)]])
    lam = LambdaMap.identity(C)
    L = characteristic_element(C, lam)
    sd = special_element(C, lam, L, [])
    assert sd.eta == [s(3)]
    assert sd.I_eta == IdealLattice.generated_by(Z1, [s(3)])


def test_special_element_diag02():
    C = _diag02()
    lam = LambdaMap.identity(C)
    L = characteristic_element(C, lam)
    sd = special_element(C, lam, L, [[s(1), s(0)]])
    assert sd.eta == [s(-2), s(0)]
    assert sd.I_eta == _ideal(Z1, [[2]]) == fitting_ideal(cohomology(C).H2, 1)
    assert evaluation_lattice([s(2), s(0)], cohomology(C).H1, 1) == _ideal(Z1, [[2]])


def test_special_element_z2():
    C = _z2()
    one = s(1, Z2)
    lam = LambdaMap.identity(C)
    L = characteristic_element(C, lam)
    sd = special_element(C, lam, L, [[one]])
    half = E(Z2, ((0,), "1/2"), ((1,), "1/2"))
    assert sd.eta == [half]
    x = default_x(C, 1)
    assert x == E(Z2, ((0,), 1), ((1,), 1))
    xeta = [(e * x).simplified() for e in sd.eta]
    assert xeta == [x]
    assert bidual(cohomology(C).H1, 1).contains(wedge_flat(xeta))
    # the only functional up to Z[G] sends 1+g to 1+g, so I(eta) = Z (1+g)/2
    assert sd.I_eta == _ideal(Z2, [[1, 1]], 2)
    assert sd.I_eta.times_element(x) == _ideal(Z2, [[1, 1]])


def test_check_charels_small_cases():
    C = _diag02()
    lam = LambdaMap.identity(C)
    L = characteristic_element(C, lam)
    r = check_charels(C, lam, L, [[s(1), s(0)]])
    assert r["separable"] and r["I_eta_equals_Fit"] and report_passes(r)
    C = StrictComplex(Z1, [[s(3)]])
    lam = LambdaMap.identity(C)
    r = check_charels(C, lam, characteristic_element(C, lam), [])
    assert r["xI_in_Fit"] and r["I_eta"] == r["Fit"] == _ideal(Z1, [[3]])
    for inv in GROUPS:
        G = FiniteAbelianGroup(inv)
        A = StrictComplex(G, [[s(1, G)]])
        lam = LambdaMap.identity(A)
        r = check_charels(A, lam, characteristic_element(A, lam), [])
        assert r["I_eta"].is_whole() and r["Fit"].is_whole() and report_passes(r)


def test_user_x_must_be_supported_on_e_geq_a():
    C = _z2()
    lam = LambdaMap.identity(C)
    L = characteristic_element(C, lam)
    with pytest.raises(PreconditionError):
        check_charels(C, lam, L, [[s(1, Z2)]], x_element=s(1, Z2))
    r = check_charels(C, lam, L, [[s(1, Z2)]], x_element=E(Z2, ((0,), 3), ((1,), 3)))
    assert report_passes(r)


# pairing --------------------------------------------------------------------------

def test_pairing_diag02():
    C = _diag02()
    lam = LambdaMap.identity(C)
    L = characteristic_element(C, lam)
    p = pairing(C, lam, L, [[s(1), s(0)]])
    assert p.left_invariants == [2] and p.right_invariants == [2]
    assert p.matrix == [[Fraction(1, 2)]] and p.perfect
    assert pairing_oracle(p.left_invariants, p.right_invariants, p.matrix)


def test_pairing_trivial_when_I_eta_is_whole():
    C = StrictComplex(Z1, [[s(0), s(0)], [s(0), s(1)]])
    lam = LambdaMap.identity(C)
    L = characteristic_element(C, lam)
    p = pairing(C, lam, L, [[s(1), s(0)]])
    assert p.left_invariants == [] and p.right_invariants == [] and p.perfect


# finite case ----------------------------------------------------------------------

def test_finite_case_small_cases():
    D = FreeComplex(Z1, 0, [0, 1, 1], [[], [[s(3)]]])
    r = finite_case_identity(D)
    assert r["equal"] and r["rhs"] == _ideal(Z1, [[3]]) and r["lhs"] == _ideal(Z1, [[3]])
    A = FreeComplex(Z2, 0, [0, 1, 1], [[], [[s(1, Z2)]]])
    assert finite_case_identity(A)["equal"]
    M = FreeComplex(Z1, 0, [1, 1, 0], [[[s(2)]], []])
    r = finite_case_identity(M)
    assert r["equal"] and r["H1_invariants"] == [2]


def test_finite_case_random():
    for seed in range(15):
        D = random_instance(InstanceSpec(seed, GROUPS[seed % 5], shape="finite")).complex
        assert finite_case_identity(D)["equal"], seed


# properties -----------------------------------------------------------------------

def test_theta_lattice_stable_under_base_change():
    for k in range(20):
        inst = random_instance(InstanceSpec(k, GROUPS[k % 5], d=2 + k % 2))
        C = inst.complex
        rng = random.Random(k)
        U, _ = random_unimodular(C.group, C.s1, rng)
        V, _ = random_unimodular(C.group, C.s1, rng)
        C2, lam2 = transport_lambda(C, inst.lam, U, V)
        assert theta_det(C2, lam2)[0] == theta_det(C, inst.lam)[0]


def test_theta_lattice_detects_rescaled_lambda():
    seen = 0
    for k in range(20):
        inst = random_instance(InstanceSpec(k, GROUPS[k % 5], d=2))
        C = inst.complex
        if not any(cohomology(C).ranks):
            continue
        assert theta_det(C, inst.lam.scaled(2))[0] != theta_det(C, inst.lam)[0]
        seen += 1
    assert seen


def test_eta_matches_minor_formula():
    for seed in range(20):
        a = 1 + seed % 2
        inst = random_instance(InstanceSpec(seed, GROUPS[seed % 5], d=3, separable=a))
        C = inst.complex
        L = characteristic_element(C, inst.lam)
        sd = special_element(C, inst.lam, L, inst.X)
        assert eta_via_minors(C, sd).agrees


def test_scaling_by_units():
    for seed in range(10):
        G = FiniteAbelianGroup(GROUPS[1 + seed % 4])
        inst = random_instance(InstanceSpec(seed, G.invariant_factors, d=3))
        C = inst.complex
        a = seed % 2
        X = random_X(C, a, random.Random(seed))
        L = characteristic_element(C, inst.lam)
        w = -GroupRingElement.basis(G, G.elements[1])
        winv = -GroupRingElement.basis(G, G.inv(G.elements[1]))
        sd = special_element(C, inst.lam, L, X)
        sw = special_element(C, inst.lam, (w * L).simplified(), X)
        assert sw.eta == [(winv * e).simplified() for e in sd.eta]
        r1 = check_charels(C, inst.lam, L, X)
        r2 = check_charels(C, inst.lam, (w * L).simplified(), X)
        assert {k: v for k, v in r1.items() if isinstance(v, bool)} == {k: v for k, v in r2.items() if isinstance(v, bool)}


def test_random_lambda_is_galois_equivariant():
    for seed in range(10):
        inst = random_instance(InstanceSpec(seed, (4,), d=2))
        lam = random_lambda(inst.complex, random.Random(seed))
        assert lam.is_galois_equivariant()
        lam.check(inst.complex)


def test_lambda_shape_is_checked():
    C = _diag02()
    with pytest.raises(PreconditionError):
        LambdaMap(Z1, [[[1, 0], [0, 1]]]).check(C)
    with pytest.raises(PreconditionError):
        LambdaMap(Z1, [[[0]]]).check(C)


def test_general_x_containments_and_pairing_sample():
    for seed in range(15):
        inst = random_instance(InstanceSpec(seed, GROUPS[seed % 5], d=3))
        C = inst.complex
        a = seed % 3
        X = random_X(C, a, random.Random(seed))
        L = characteristic_element(C, inst.lam)
        r = check_charels(C, inst.lam, L, X)
        assert report_passes(r), seed
        p = pairing(C, inst.lam, L, X, sd=r["_data"])
        assert p.perfect and p.details["ses_exact"]
