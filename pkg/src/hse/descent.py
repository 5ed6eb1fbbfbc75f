"""Descent along a subgroup J: augmentation quotients, Bockstein maps, norm operators
and the congruence between special elements of C and of C_J."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .complexes import QuotientGroup, StrictComplex, cohomology, coinvariants
from .cyclotomic import is_zero, simplify
from .gmodule import bidual, separability_test, subsets, wedge_flat
from .groupring import GroupRingElement, from_char_coords, gr_det
from .linalg import PreconditionError, ZLattice, snf_diagonal
from .special import LambdaMap, characteristic_element, special_element, theta_values


# augmentation filtration ---------------------------------------------------

def augmentation_power(G, J_elements, k):
    """I(J)^k as a Z-lattice in Z[G] coordinates, supported on J."""
    n = G.order
    J = [tuple(j) for j in J_elements]
    vecs = [[int(G.index(j) == i) for i in range(n)] for j in J]
    cur = ZLattice(n, vecs)
    for _ in range(k):
        new = []
        for v in cur.vectors():
            x = GroupRingElement(G, [Fraction(c) for c in v])
            for j in J:
                y = x - x.shift(j)
                new.append([int(c) for c in y.coeffs])
        cur = ZLattice.from_vectors(n, new)
    return cur


@dataclass
class AugmentationQuotient:
    J: list
    k: int
    invariants: list
    generators: list
    big: ZLattice
    small: ZLattice

    @property
    def order(self):
        out = 1
        for q in self.invariants:
            out *= q
        return out


def augmentation_quotient(G, J_elements, k):
    """Q_k = I(J)^k / I(J)^(k+1)."""
    if k < 0:
        raise PreconditionError("k must be non-negative")
    big = augmentation_power(G, J_elements, k)
    small = augmentation_power(G, J_elements, k + 1)
    if k == 0 and len(J_elements) >= 1:
        # Z[J]/I(J) = Z: infinite cyclic
        gens = [[int(i == 0) for i in range(G.order)]]
        return AugmentationQuotient(list(J_elements), 0, [0], gens, big, small)
    invs = big.quotient_invariants(small)
    gens = []
    for j in J_elements:
        x = GroupRingElement.basis(G, j)
        e = GroupRingElement.one(G)
        gens.append([int(c) for c in ((e - x) ** k).coeffs])
    return AugmentationQuotient(list(J_elements), k, invs, gens, big, small)


# descent data --------------------------------------------------------------------

@dataclass
class DescentDatum:
    C: StrictComplex
    J: list
    quotient: QuotientGroup
    C_J: StrictComplex
    X: list
    X_J: list
    Xp: list
    a: int
    ap: int
    retraction_X: list
    retraction_Xp: list
    checks: dict = field(default_factory=dict)


def project_vector(qg, v):
    return [qg.project_element(x) for x in v]


def lift_element(qg, x, rng=None):
    """Lift x in Z[G/J] to Z[G]; rng perturbs the lift by elements of ker(Z[G] -> Z[G/J])."""
    G = qg.G
    out = [Fraction(0)] * G.order
    for q, c in zip(qg.Q.elements, x.coeffs):
        if is_zero(c):
            continue
        coset = qg.coset(q)
        out[G.index(coset[0])] += c
        if rng is not None and len(coset) > 1:
            t = rng.randint(-2, 2)
            out[G.index(coset[0])] -= t
            out[G.index(coset[1])] += t
    return GroupRingElement(G, out)


def make_datum(C, J_elements, X, Xp):
    """Assemble and validate the data X in H2(C), X' in H2(C_J) with X' starting with X_J."""
    G = C.group
    J = sorted({tuple(j) for j in J_elements}, key=G.index)
    cd = coinvariants(C, J)
    qg = cd.quotient
    CJ = cd.C_J
    X = [list(x) for x in X]
    Xp = [list(x) for x in Xp]
    a, ap = len(X), len(Xp)
    if ap < a:
        raise PreconditionError("X' must contain the image of X")
    XJ = [project_vector(qg, x) for x in X]
    if [[y.simplified() for y in v] for v in XJ] != [[y.simplified() for y in v] for v in Xp[:a]]:
        raise PreconditionError("X' must begin with the image of X")
    okX, rX = separability_test(cohomology(C).H2, X)
    if not okX:
        raise PreconditionError("X is not separable: %s" % rX.get("reason"))
    okXp, rXp = separability_test(cohomology(CJ).H2, Xp)
    if not okXp:
        raise PreconditionError("X' is not separable: %s" % rXp.get("reason"))
    okXJ, _ = separability_test(cohomology(CJ).H2, XJ)
    checks = dict(cd.checks)
    checks["X_J_separable"] = okXJ
    return DescentDatum(C, J, qg, CJ, X, XJ, Xp, a, ap, rX, rXp, checks)


# Bockstein maps -------------------------------------------------------------------

def is_adapted(datum):
    """The standard basis is adapted: X = b_1..b_a, X' = b_1..b_a', rows 1..a of psi vanish
    and rows a+1..a' have entries in the kernel of Z[G] -> Z[G/J]."""
    C = datum.C
    G = C.group
    d = C.d
    one, zero = GroupRingElement.one(G), GroupRingElement.zero(G)
    for i, x in enumerate(datum.X):
        if [y.simplified() for y in x] != [one if j == i else zero for j in range(d)]:
            return False
    Q = datum.quotient.Q
    qone, qzero = GroupRingElement.one(Q), GroupRingElement.zero(Q)
    for i, x in enumerate(datum.Xp):
        if [y.simplified() for y in x] != [qone if j == i else qzero for j in range(d)]:
            return False
    psi = C.psi
    if any(not psi[i][j].is_zero() for i in range(datum.a) for j in range(d)):
        return False
    for i in range(datum.a, datum.ap):
        for j in range(d):
            if not datum.quotient.project_element(psi[i][j]).simplified().is_zero():
                return False
    return True


def bockstein_functionals(datum, route="adapted", retraction=None):
    """Row functionals f_j on P (j = a+1..a') whose values on lifts represent Boc_{x'_j}.

    route 'adapted' reads the rows a+1..a' of psi in an adapted basis;
    route 'connecting' composes psi with a lifted retraction of X' (any basis).
    """
    C = datum.C
    G = C.group
    d = C.d
    qg = datum.quotient
    if route == "adapted":
        if not is_adapted(datum):
            raise PreconditionError("no adapted basis over Z[G] for (X, X'); use a p-local computation "
                                    "or the connecting-map route")
        return [list(C.psi[j]) for j in range(datum.a, datum.ap)]
    r = retraction if retraction is not None else datum.retraction_Xp
    out = []
    for j in range(datum.a, datum.ap):
        row = []
        for t in range(d):
            s = GroupRingElement.zero(G)
            for i in range(d):
                s = s + lift_element(qg, r[i][j]) * C.psi[i][t]
            row.append(s.simplified())
        if any(not qg.project_element(x).simplified().is_zero() for x in row):
            raise AssertionError("retraction does not kill the relations of H2(C_J)")
        out.append(row)
    return out


def bockstein(datum, j, c, route="adapted", rng=None):
    """Boc_{x'_j}(c) for c in H1(C_J) (a vector over Z[G/J]), as an element of
    ker(Z[G]->Z[G/J]) representing a class modulo its square."""
    f = bockstein_functionals(datum, route)[j - datum.a]
    lift = [lift_element(datum.quotient, x, rng) for x in c]
    s = GroupRingElement.zero(datum.C.group)
    for fi, ci in zip(f, lift):
        s = s + fi * ci
    return s.simplified()


def _sign(S, T):
    """Sign of the shuffle placing T before S (both sorted, disjoint)."""
    inv = sum(1 for t in T for s in S if s < t)
    return -1 if inv % 2 else 1


def bockstein_product(datum, eta_p, route="adapted", rng=None, functionals=None):
    """Contract eta' in wedge^a' P_J with f_{a+1}, ..., f_{a'} (front contraction).

    Returns one element of I^k in Z[G] per a-subset S (k = a' - a).
    """
    C = datum.C
    G = C.group
    d = C.d
    a, ap = datum.a, datum.ap
    f = functionals if functionals is not None else bockstein_functionals(datum, route)
    k = ap - a
    idx = {S: i for i, S in enumerate(subsets(d, ap))}
    out = []
    for S in subsets(d, a):
        total = GroupRingElement.zero(G)
        rest = [t for t in range(d) if t not in S]
        for T in subsets(len(rest), k):
            T = tuple(rest[i] for i in T)
            Sp = tuple(sorted(S + T))
            coef = eta_p[idx[Sp]]
            if coef.is_zero():
                continue
            det = gr_det([[f[i][t] for t in T] for i in range(k)], G)
            total = total + det * lift_element(datum.quotient, coef, rng) * _sign(S, T)
        out.append(total.simplified())
    return out


# norm operator and nu ------------------------------------------------------------

def norm_operator(eta, G, J_elements):
    """N_J(eta)[S][h] = sum_{tau in J} eta_S[tau h] tau, a Z[J]-coefficient per (S, h).

    Coefficients are vectors in Z[G] coordinates supported on J.
    """
    J = [tuple(j) for j in J_elements]
    out = []
    for e in eta:
        per_h = []
        for h in G.elements:
            v = [Fraction(0)] * G.order
            for tau in J:
                v[G.index(tau)] += Fraction(simplify(e.coeffs[G.index(G.mul(tau, h))]))
            per_h.append(v)
        out.append(per_h)
    return out


def nu_embedding(xi, qg):
    """nu_J on coordinates: y in I^k (Z[G], one per S) -> per (S, h) the J-component of y
    on the coset of h, translated back to J."""
    G = qg.G
    out = []
    for y in xi:
        per_coset = {}
        for q in qg.Q.elements:
            coset = qg.coset(q)
            r = coset[0]
            rinv = G.inv(r)
            v = [Fraction(0)] * G.order
            for g in coset:
                c = y.coeffs[G.index(g)]
                if not is_zero(c):
                    v[G.index(G.mul(rinv, g))] += Fraction(simplify(c))
            per_coset[q] = v
        out.append([per_coset[qg.project(h)] for h in G.elements])
    return out


def nu_injective(datum, k):
    """Instance-wise injectivity of the bidual map (tensored with Q_k) induced by H1(C)^J in H1(C)."""
    qg = datum.quotient
    G = qg.G
    Q = qg.Q
    a = datum.a
    Bq = bidual(cohomology(datum.C_J).H1, a).lattice
    B = bidual(cohomology(datum.C).H1, a).lattice
    if Bq.rank == 0:
        return True
    aug = augmentation_quotient(G, datum.J, k)
    rows = []
    nS = len(subsets(datum.C.d, a))
    for v in Bq.vectors():
        w = []
        for s in range(nS):
            for g in G.elements:
                w.append(v[s * Q.order + Q.index(qg.project(g))])
        c = B.coordinates(w)
        if c is None or any(Fraction(x).denominator != 1 for x in c):
            return False
        rows.append([int(x) for x in c])
    diag = snf_diagonal(rows)
    if len([x for x in diag if x]) < len(rows):
        return False
    from math import gcd
    return all(gcd(x, q) == 1 for x in diag for q in (aug.invariants or [1]) if q)


def _in_power(vec, lattice):
    return lattice.contains_vector(vec)


def compare_in_Q(lhs, rhs, sign, G, J, k):
    """Is lhs - sign * rhs in the I(J)^(k+1)-coefficient part (and lhs in I(J)^k)?"""
    hi = augmentation_power(G, J, k + 1)
    lo = augmentation_power(G, J, k)
    lhs_ok = True
    equal = True
    witness = None
    for s, (ls, rs) in enumerate(zip(lhs, rhs)):
        for h, (lv, rv) in enumerate(zip(ls, rs)):
            if not lo.contains_vector(lv):
                lhs_ok = False
            diff = [x - sign * y for x, y in zip(lv, rv)]
            if not hi.contains_vector(diff) and equal:
                equal = False
                witness = (s, h, diff)
    return equal, lhs_ok, witness


def norm_image_in_nu(G, J_elements, d, a, k):
    """N_J maps I(J)^k wedge^a P into the image of nu_J (values mod I^(k+1) constant on cosets)."""
    qg = QuotientGroup(G, J_elements)
    base = augmentation_power(G, J_elements, k)
    hi = augmentation_power(G, J_elements, k + 1)
    nS = len(subsets(d, a))
    for s in range(min(nS, 2)):
        for v in base.vectors():
            for g in G.elements:
                y = GroupRingElement(G, [Fraction(c) for c in v]).shift(g)
                eta = [y if t == s else GroupRingElement.zero(G) for t in range(nS)]
                N = norm_operator(eta, G, J_elements)
                for per_h in N:
                    for h, vh in enumerate(per_h):
                        if not base.contains_vector(vh):
                            return False
                        h0 = G.index(qg.coset(qg.project(G.elements[h]))[0])
                        diff = [x - y for x, y in zip(vh, per_h[h0])]
                        if not hi.contains_vector(diff):
                            return False
    return True


# the congruence -------------------------------------------------------------------

def descended_lambda(datum, lam):
    """lambda_J at the characters of G/J, via the identification H1(C_J) = H1(C)^J."""
    G = datum.C.group
    qg = datum.quotient
    Q = qg.Q
    blocks = []
    for cq in Q.elements:
        # the character of G that factors through G/J as cq
        for ci, c in enumerate(G.elements):
            if all(G.character_value(c, j) == 0 for j in datum.J) and \
                    all(_char_match(G, Q, qg, c, cq, g) for g in G.generators()):
                blocks.append(lam[ci])
                break
        else:
            raise AssertionError("no character lifts the quotient character")
    return LambdaMap(Q, blocks)


def _char_match(G, Q, qg, c, cq, g):
    from .cyclotomic import Cyc
    v1 = G.zeta_power(G.character_value(c, g))
    v2 = Q.zeta_power(Q.character_value(cq, qg.project(g)))
    return is_zero(simplify(v1 - v2) if not (isinstance(v1, int) and isinstance(v2, int)) else v1 - v2)


def projected_L(datum, L):
    return datum.quotient.project_element(L).simplified()


def _norm_factor_chars(datum, lam):
    """|J|^r at each character of G/J: the factor by which the literal norm composite rescales lambda."""
    ranks = cohomology(datum.C_J).ranks
    return [len(datum.J) ** r for r in ranks]


@dataclass
class MRSReport:
    checks: dict
    lhs: list
    rhs: list
    sign: int
    k: int
    eta_X: list
    eta_Xp: list
    bockstein: list
    witness: object = None

    CORE = ("L_J_is_projection", "eta_X_integral", "eta_Xp_integral", "norm_in_I_k",
            "congruence", "lift_independent")

    def passed(self):
        return all(self.checks.get(key, False) for key in self.CORE)


def check_mrs(datum, lam, L=None, route=None, second_lift_seed=7):
    C = datum.C
    G = C.group
    qg = datum.quotient
    a, ap = datum.a, datum.ap
    k = ap - a
    checks = {}
    if L is None:
        L = characteristic_element(C, lam)
    # (i) descent of the characteristic element
    lamJ = descended_lambda(datum, lam)
    wJ = theta_values(datum.C_J, lamJ)
    LJ = from_char_coords(qg.Q, [simplify(1 / w) for w in wJ])
    LJp = projected_L(datum, L)
    checks["L_J_is_projection"] = LJ == LJp
    checks["lambda_J_norm_factor"] = max(_norm_factor_chars(datum, lam)) if k or a else 1
    if not checks["L_J_is_projection"]:
        return MRSReport(checks, [], [], 1, k, [], [], [], "hypothesis (i) fails; congruence not asserted")
    # (ii) integrality of both special elements
    sX = special_element(C, lam, L, datum.X, with_ideal=False)
    sXp = special_element(datum.C_J, lamJ, LJ, datum.Xp, with_ideal=False)
    BX = bidual(cohomology(C).H1, a)
    BXp = bidual(cohomology(datum.C_J).H1, ap)
    checks["eta_X_integral"] = BX.contains(wedge_flat(sX.eta))
    checks["eta_Xp_integral"] = BXp.contains(wedge_flat(sXp.eta))
    # (iii) the congruence
    if route is None:
        route = "adapted" if is_adapted(datum) else "connecting"
    f = bockstein_functionals(datum, route)
    boc = bockstein_product(datum, sXp.eta, functionals=f)
    boc2 = bockstein_product(datum, sXp.eta, functionals=f, rng=random.Random(second_lift_seed))
    rhs = nu_embedding(boc, qg)
    rhs2 = nu_embedding(boc2, qg)
    lhs = norm_operator(sX.eta, G, datum.J)
    sign = -1 if (a * k) % 2 else 1
    eq, lhs_ok, wit = compare_in_Q(lhs, rhs, sign, G, datum.J, k)
    checks["norm_in_I_k"] = lhs_ok
    checks["congruence"] = eq
    checks["lift_independent"] = compare_in_Q(rhs, rhs2, 1, G, datum.J, k)[0]
    if route == "adapted":
        fa = bockstein_functionals(datum, "connecting")
        rhsa = nu_embedding(bockstein_product(datum, sXp.eta, functionals=fa), qg)
        checks["retraction_verdict_agrees"] = compare_in_Q(rhs, rhsa, 1, G, datum.J, k)[0]
    checks["receptor_injective"] = nu_injective(datum, k) if k else True
    return MRSReport(checks, lhs, rhs, sign, k, sX.eta, sXp.eta, boc, wit)
