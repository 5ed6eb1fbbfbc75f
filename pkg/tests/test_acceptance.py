"""Acceptance suite: nine property criteria, each run at its stated size and time limit.

Every criterion prints one `criterion N: PASS|FAIL ...` line (visible with or
without -s) and then asserts.  Run alone with `pytest tests/test_acceptance.py -v`.
"""

import random
import time
from fractions import Fraction
from math import prod

import pytest

from hse.complexes import adapted_basis, cohomology, dual_complex, reduce_to_strict
from hse.descent import compare_in_Q, make_datum, check_mrs
from hse.gmodule import bidual, fitting_ideal, is_reflexive, separability_test
from hse.groupring import FiniteAbelianGroup, char_coords, integrality_test
from hse.linalg import PreconditionError
from hse.oracle import (
    InstanceSpec,
    bidual_agrees,
    brute_force_bidual,
    brute_force_fitting,
    direct_integrality,
    mrs_instance,
    pairing_oracle,
    random_instance,
    random_unimodular,
    random_X,
)
from hse.special import (
    characteristic_element,
    check_charels,
    eta_via_minors,
    finite_case_identity,
    pairing,
    special_element,
    theta_det,
    transport_lambda,
)
from hse.cyclotomic import simplify

GROUPS = [(), (2,), (3,), (4,), (2, 2)]


class Tally:
    def __init__(self, n, capsys, label, limit):
        self.n, self.capsys, self.label, self.limit = n, capsys, label, limit
        self.passed = 0
        self.failures = []
        self.start = time.perf_counter()

    def record(self, key, ok, note=""):
        if ok:
            self.passed += 1
        else:
            self.failures.append((key, note))

    def finish(self):
        elapsed = time.perf_counter() - self.start
        ok = self.passed == self.n and not self.failures and elapsed < self.limit
        with self.capsys.disabled():
            print("\n%s: %s (%d/%d, %.1fs, limit %ds)%s" % (
                self.label, "PASS" if ok else "FAIL", self.passed, self.n, elapsed, self.limit,
                "" if not self.failures else " first failure %r" % (self.failures[0],)))
        assert not self.failures, self.failures[:3]
        assert self.passed == self.n
        assert elapsed < self.limit


def _strict_family(n, separable):
    """Seeded strict complexes over the five small groups, d <= 4, a <= 2."""
    for seed in range(n):
        group = GROUPS[seed % 5]
        a = seed % 3
        d = 2 + seed % 3
        if separable:
            inst = random_instance(InstanceSpec(seed, group, d=d, separable=a))
            yield seed, inst, inst.X
        else:
            # a >= 1 and X forced off every free summand: 2X never splits off
            a = 1 + seed % 2
            inst = random_instance(InstanceSpec(seed, group, d=d, ranks=_ranks_at_least(group, d, a, seed)))
            X = random_X(inst.complex, a, random.Random(10_000 + seed))
            if separability_test(cohomology(inst.complex).H2, X)[0]:
                X = [[(2 * x).simplified() for x in v] for v in X]
            yield seed, inst, X


def _ranks_at_least(group, d, a, seed):
    from hse.oracle import random_rank_vector
    return random_rank_vector(FiniteAbelianGroup(group), d, random.Random(seed), a)


def test_criterion_1_fitting_equality(capsys):
    t = Tally(100, capsys, "criterion 1 fitting equality", 60)
    for seed, inst, X in _strict_family(100, separable=True):
        C = inst.complex
        L = characteristic_element(C, inst.lam)
        rep = check_charels(C, inst.lam, L, X)
        sep = rep["separable"]
        t.record(seed, sep and rep["I_eta_equals_Fit"] and rep["I_eta"] == fitting_ideal(cohomology(C).H2, len(X)),
                 "separable=%s" % sep)
    t.finish()


def test_criterion_2_general_containments(capsys):
    t = Tally(100, capsys, "criterion 2 general-X containments", 60)
    for seed, inst, X in _strict_family(100, separable=False):
        C = inst.complex
        L = characteristic_element(C, inst.lam)
        rep = check_charels(C, inst.lam, L, X)
        nonsep = not separability_test(cohomology(C).H2, X)[0]
        t.record(seed, nonsep and rep["xI_in_Fit"] and rep["xI_in_Ann_tor"] and rep["x_eta_in_bidual"],
                 "non-separable=%s" % nonsep)
    t.finish()


def test_criterion_3_pairing(capsys):
    t = Tally(100, capsys, "criterion 3 perfect pairing", 120)
    checked = 0
    for seed, inst, X in _strict_family(100, separable=False):
        C = inst.complex
        L = characteristic_element(C, inst.lam)
        p = pairing(C, inst.lam, L, X)
        ok = p.perfect and prod(p.left_invariants) == prod(p.right_invariants)
        if prod(p.left_invariants) <= 10 ** 4:
            checked += 1
            ok = ok and pairing_oracle(p.left_invariants, p.right_invariants, p.matrix)
        t.record(seed, ok)
    with capsys.disabled():
        print("  (%d pairings cross-checked by the oracle)" % checked)
    t.finish()


def test_criterion_4_finite_case(capsys):
    t = Tally(50, capsys, "criterion 4 finite-case Fit^0 identity", 30)
    for seed in range(50):
        D = random_instance(InstanceSpec(seed, GROUPS[seed % 5], shape="finite")).complex
        t.record(seed, finite_case_identity(D)["equal"])
    t.finish()


def _primes_dividing(n):
    return [p for p in range(2, n + 1) if n % p == 0 and all(p % q for q in range(2, p))]


def test_criterion_5_reduction(capsys):
    t = Tally(50, capsys, "criterion 5 reduction to strict", 60)
    local = 0
    for seed in range(50):
        C = random_instance(InstanceSpec(seed, GROUPS[seed % 5], d=2, shape="three", s3=1 + seed % 2)).complex
        try:
            reports = [reduce_to_strict(C)]
        except PreconditionError:
            local += 1
            reports = [reduce_to_strict(C, prime=p) for p in _primes_dividing(cohomology(C).H3.order())]
        t.record(seed, bool(reports) and all(all(r.checks.values()) for r in reports))
    with capsys.disabled():
        print("  (%d used the p-local fallback)" % local)
    t.finish()


def _invariants(K):
    d = cohomology(K)
    return d.H1.rank, d.H2.free_rank(), d.H2.torsion_invariants()


def test_criterion_6_duality(capsys):
    t = Tally(100, capsys, "criterion 6 duality", 30)
    for seed in range(100):
        C = random_instance(InstanceSpec(seed, GROUPS[seed % 5], d=2 + seed % 3)).complex
        t.record(seed, is_reflexive(cohomology(C).H1) and _invariants(dual_complex(dual_complex(C))) == _invariants(C))
    t.finish()


def test_criterion_7_mrs(capsys):
    t = Tally(50, capsys, "criterion 7 MRS congruence", 120)
    groups = [(2,), (4,), (2, 2)]
    cases = []
    for grp in groups:
        for J in FiniteAbelianGroup(grp).all_subgroups():
            cases.append((grp, J))
    for seed in range(50):
        grp, J = cases[seed % len(cases)]
        a = seed % 2
        ap = a + 1 + (seed // 2) % 2
        inst = mrs_instance(seed, grp, d=3, a=a, ap=ap, J=J)
        C = inst.complex
        _, L = theta_det(C, inst.lam)
        datum = make_datum(C, J, inst.X, inst.extra["Xp"])
        r = check_mrs(datum, inst.lam, L=L)
        same, _, _ = compare_in_Q(r.lhs, r.rhs, r.sign, C.group, datum.J, r.k)
        t.record(seed, r.passed() and r.checks["L_J_is_projection"] and same, (grp, len(J), a, ap))
    t.finish()


def _bidual_family(n):
    """The first n seeded instances whose H1 is within the bidual oracle bound (Z-rank <= 6)."""
    seed = 0
    while n:
        inst = random_instance(InstanceSpec(seed, GROUPS[seed % 5], d=2 + seed % 2))
        H1 = cohomology(inst.complex).H1
        if H1.rank <= 6:
            n -= 1
            yield seed, H1
        seed += 1


def test_criterion_8_oracles(capsys):
    t = Tally(300, capsys, "criterion 8 oracle equivalence", 120)
    for seed in range(100):
        inst = random_instance(InstanceSpec(seed, GROUPS[seed % 5], d=2 + seed % 2))
        C = inst.complex
        H2 = cohomology(C).H2
        a = seed % 3
        t.record(("fit", seed), brute_force_fitting(H2, a, seed=seed).agrees_with(fitting_ideal(H2, a)))
        L = characteristic_element(C, inst.lam)
        coords = char_coords(L) if seed % 2 else [simplify(1 / v) for v in char_coords(L)]
        if seed % 4 == 3:
            coords = [simplify(c / 2) for c in coords]
        t.record(("integrality", seed), integrality_test(C.group, coords) == direct_integrality(C.group, coords))
    for seed, H1 in _bidual_family(100):
        a = min(seed % 3, H1.rank)
        t.record(("bidual", seed), bidual_agrees(brute_force_bidual(H1, a), bidual(H1, a).lattice))
    t.finish()


def test_criterion_9_convention_stability(capsys):
    t = Tally(240, capsys, "criterion 9 convention stability", 60)
    for k in range(200):
        seed = k // 4
        inst = random_instance(InstanceSpec(seed, GROUPS[seed % 5], d=2 + seed % 2))
        C = inst.complex
        rng = random.Random(1000 + k)
        I, _ = theta_det(C, inst.lam)
        U, _ = random_unimodular(C.group, C.s1, rng)
        V, _ = random_unimodular(C.group, C.s1, rng)
        C2, lam2 = transport_lambda(C, inst.lam, U, V)
        I2, _ = theta_det(C2, lam2)
        t.record(("theta", k), I == I2)
    for seed in range(40):
        a = 1 + seed % 2
        inst = random_instance(InstanceSpec(seed, GROUPS[seed % 5], d=3, separable=a))
        C = inst.complex
        sd = special_element(C, inst.lam, characteristic_element(C, inst.lam), inst.X)
        try:
            ab = adapted_basis(C, inst.X)
        except PreconditionError:
            t.n -= 1
            continue
        t.record(("minors", seed), eta_via_minors(C, sd, ab).agrees)
    t.finish()
