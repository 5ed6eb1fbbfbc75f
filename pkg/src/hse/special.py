"""Characteristic elements, higher special elements and their integrality checks."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .complexes import (
    StrictComplex,
    ThreeTermComplex,
    adapted_basis,
    all_character_data,
    char_matrix,
    cohomology,
    theta_char_value,
)
from .cyclotomic import Cyc, is_zero, scalar_galois, simplify
from .groupring import (
    GroupRingElement,
    StructuralError,
    char_coords,
    character_eval,
    from_char_coords,
    gr_det,
    is_galois_equivariant,
)
from .gmodule import (
    IdealLattice,
    annihilator,
    bidual,
    dual_basis_functionals,
    evaluate_wedge_functional,
    extend_functionals,
    fitting_ideal,
    separability_test,
    subsets,
    wedge_flat,
    wedge_matrix,
)
from .linalg import (
    PreconditionError,
    ZLattice,
    dual_lattice,
    field_det,
    field_solve,
    int_left_kernel,
    rational_preimage,
    snf_diagonal,
    transpose,
    vecmat,
)


# lambda ------------------------------------------------------------------

class LambdaMap:
    """An isomorphism Q(zeta)(x)H1 -> Q(zeta)(x)H2, one square block per character.

    blocks[ci][i][j] is the i-th coordinate (canonical H2 basis) of the image
    of the j-th canonical kernel vector.
    """

    def __init__(self, group, blocks):
        self.group = group
        self.blocks = [[list(r) for r in b] for b in blocks]

    def __getitem__(self, ci):
        return self.blocks[ci]

    @classmethod
    def identity(cls, C):
        ranks = cohomology(C).ranks
        return cls(C.group, [[[Fraction(int(i == j)) for j in range(r)] for i in range(r)] for r in ranks])

    def check(self, C):
        ranks = cohomology(C).ranks
        if len(self.blocks) != C.group.order:
            raise PreconditionError("lambda needs one block per character")
        for ci, (b, r) in enumerate(zip(self.blocks, ranks)):
            if len(b) != r or any(len(row) != r for row in b):
                raise PreconditionError("lambda block %d has the wrong shape (rank %d)" % (ci, r))
            if r and is_zero(field_det(b)):
                raise PreconditionError("lambda is not an isomorphism at character %d" % ci)
        return True

    def is_galois_equivariant(self):
        G = self.group
        for a in G.galois_units():
            for ci, c in enumerate(G.elements):
                tgt = self.blocks[G.character_power(c, a)]
                src = self.blocks[ci]
                for r1, r2 in zip(src, tgt):
                    for x, y in zip(r1, r2):
                        if not is_zero(scalar_galois(x, a) - y):
                            return False
        return True

    def scaled(self, s):
        return LambdaMap(self.group, [[[x * s for x in r] for r in b] for b in self.blocks])


def transport_lambda(C, lam, U, V):
    """lambda on the strict complex with psi' = V psi U, through H1' = U^-1 H1 and H2' = V H2."""
    G = C.group
    C2 = StrictComplex(G, _matmul3(V, C.psi, U, G))
    blocks = []
    for cd, cd2 in zip(all_character_data(C), all_character_data(C2)):
        ci = cd.index
        r = cd.rank
        if r != cd2.rank:
            raise StructuralError("base change altered a character rank")
        Uc, Vc = char_matrix(U, ci), char_matrix(V, ci)
        Kmat = [[cd.K[j][i] for j in range(r)] for i in range(len(Uc))]
        block = [[None] * r for _ in range(r)]
        for j, k2 in enumerate(cd2.K):
            v = [simplify(sum((Uc[i][s] * k2[s] for s in range(len(k2))), Fraction(0))) for i in range(len(Uc))]
            _, coords = field_solve(Kmat, v)
            img = [Fraction(0)] * len(Vc)
            for i in range(r):
                c = sum((lam[ci][i][s] * coords[s] for s in range(r)), Fraction(0))
                img = [simplify(x + c * h) for x, h in zip(img, cd.H2basis[i])]
            w = [simplify(sum((Vc[i][s] * img[s] for s in range(len(img))), Fraction(0))) for i in range(len(Vc))]
            for i, c in enumerate(cd2.h2_coordinates(w)):
                block[i][j] = simplify(c)
        blocks.append(block)
    return C2, LambdaMap(G, blocks)


def _matmul3(A, B, Cm, G):
    from .gmodule import zg_matmul
    return [[x.simplified() for x in row] for row in zg_matmul(zg_matmul(A, B, G), Cm, G)]


def _random_scalar(G, ci, rng, bound=3):
    c = G.elements[ci]
    order = G.element_order(c)
    a = rng.randint(-bound, bound)
    if order <= 2:
        return Fraction(a)
    b = rng.randint(-bound, bound)
    return simplify(G.zeta_power(G.exponent // order) * b + a)


def random_lambda(C, rng=None, bound=3):
    """A random Galois-equivariant invertible lambda."""
    rng = rng or random.Random(0)
    G = C.group
    ranks = cohomology(C).ranks
    blocks = [None] * G.order
    for orb in G.galois_orbits:
        rep = orb[0]
        r = ranks[rep]
        while True:
            B = [[_random_scalar(G, rep, rng, bound) for _ in range(r)] for _ in range(r)]
            if r == 0 or not is_zero(field_det(B)):
                break
        c = G.elements[rep]
        for a in G.galois_units():
            ci = G.character_power(c, a)
            if blocks[ci] is None:
                blocks[ci] = [[scalar_galois(x, a) for x in row] for row in B]
    return LambdaMap(G, blocks)


def lambda_lifts(cd, block):
    """Vectors in the degree-2 term lifting lambda(K_j)."""
    r = len(cd.K)
    out = []
    n2 = len(cd.d1)
    for j in range(r):
        v = [Fraction(0)] * n2
        for i in range(r):
            c = block[i][j]
            if is_zero(c):
                continue
            v = [simplify(x + c * h) for x, h in zip(v, cd.H2basis[i])]
        out.append(v)
    return out


# theta and L ------------------------------------------------------------------

def theta_values(C, lam):
    """w_chi with theta_lambda(Det C) = Z[G] / w, for each character."""
    out = []
    for cd in all_character_data(C):
        lifts = lambda_lifts(cd, lam[cd.index])
        w = theta_char_value(cd, lifts)
        if is_zero(w):
            raise PreconditionError("lambda is not an isomorphism at character %d" % cd.index)
        out.append(w)
    return out


def _random_alternative(cd, block, rng):
    """theta at one character with a random complement and random lifts."""
    n1 = len(cd.K[0]) if cd.K else (len(cd.d1[0]) if cd.d1 and cd.d1[0] else 0)
    K = cd.K
    W = []
    # W' = W A + K B with A unitriangular (invertible) and B random
    base = [[Fraction(int(i == p)) for i in range(n1)] for p in cd.W]
    for idx, w in enumerate(base):
        v = list(w)
        for jdx, u in enumerate(base):
            if jdx > idx:
                t = rng.randint(-2, 2)
                v = [a + t * b for a, b in zip(v, u)]
        for k in K:
            t = rng.randint(-2, 2)
            v = [simplify(a + t * b) for a, b in zip(v, k)]
        W.append(v)
    lifts = lambda_lifts(cd, block)
    img = [list(r) for r in cd.image_rref]
    new_lifts = []
    for v in lifts:
        for r in img:
            t = rng.randint(-2, 2)
            v = [simplify(a + t * b) for a, b in zip(v, r)]
        new_lifts.append(v)
    S = []
    if cd.S:
        from .linalg import nullspace
        N2 = nullspace(cd.d2, len(cd.d1))
        for s in cd.S:
            v = list(s)
            for k in N2:
                t = rng.randint(-2, 2)
                v = [simplify(a + t * b) for a, b in zip(v, k)]
            S.append(v)
    return theta_char_value(cd, new_lifts, W=W, S=S if cd.S else None)


def theta_det(C, lam, verify=False, rng=None):
    """Return (IdealLattice Z[G] u, u) with u = theta_lambda value on the canonical basis."""
    lam.check(C)
    ws = theta_values(C, lam)
    if verify:
        rng = rng or random.Random(1)
        for cd, w in zip(all_character_data(C), ws):
            w2 = _random_alternative(cd, lam[cd.index], rng)
            if not is_zero(w2 - w):
                raise AssertionError("theta value depends on choices at character %d" % cd.index)
    u = from_char_coords(C.group, [simplify(1 / w) for w in ws])
    return IdealLattice.generated_by(C.group, [u]), u


def characteristic_element(C, lam, verify=False):
    return theta_det(C, lam, verify=verify)[1]


# special elements -----------------------------------------------------------------

@dataclass
class SpecialElementData:
    L: GroupRingElement
    eta: list
    a: int
    X: list
    x_element: GroupRingElement
    t: int
    I_eta: IdealLattice = None
    char_eta: list = field(default_factory=list)

    def flat(self):
        return wedge_flat(self.eta)


def _gvec_char(v, ci):
    return [character_eval(x, ci) for x in v]


def default_x(C, a):
    data = cohomology(C)
    e_ge = data.e_geq(a)
    N = data.N(a)
    return (e_ge * N).simplified()


def _top_wedge(K, t, a):
    if a == 0:
        return [Fraction(1)]
    return [field_det([[K[j][s] for j in range(a)] for s in S]) for S in subsets(t, a)]


def special_element(C, lam, L, X, x_element=None, with_ideal=True):
    """eta with (wedge^a lambda)(eta) = e_a L^-1 wedge(X), per character."""
    if not isinstance(C, ThreeTermComplex) or C.s3:
        raise PreconditionError("special elements are computed for strict complexes")
    G = C.group
    d = C.s1
    X = [list(x) for x in X]
    a = len(X)
    for x in X:
        if len(x) != C.s2:
            raise PreconditionError("element of X has the wrong length", witness=x)
    data = cohomology(C)
    Lc = char_coords(L)
    per_char = []
    nsub = len(subsets(d, a))
    for cd in all_character_data(C):
        ci = cd.index
        if data.ranks[ci] != a:
            per_char.append([Fraction(0)] * nsub)
            continue
        if is_zero(Lc[ci]):
            raise PreconditionError("L is not invertible")
        coords = [cd.h2_coordinates(_gvec_char(x, ci)) for x in X]
        dx = field_det([[coords[j][i] for j in range(a)] for i in range(a)]) if a else Fraction(1)
        dl = field_det(lam[ci]) if a else Fraction(1)
        c = simplify(dx / (Lc[ci] * dl))
        per_char.append([simplify(c * m) for m in _top_wedge(cd.K, d, a)])
    eta = []
    for s in range(nsub):
        e = from_char_coords(G, [per_char[ci][s] for ci in range(G.order)])
        if any(isinstance(simplify(v), Cyc) for v in e.coeffs):
            raise PreconditionError("eta is not rational; lambda or L is not Galois equivariant")
        eta.append(e)
    if x_element is None:
        x_element = default_x(C, a)
    sd = SpecialElementData(L, eta, a, X, x_element, d, char_eta=per_char)
    if with_ideal:
        sd.I_eta = evaluation_lattice(eta, data.H1, a)
    return sd


def check_defining_equation(C, lam, sd):
    """Recompute (wedge lambda)(eta) per character and compare with e_a L^-1 wedge(X)."""
    data = cohomology(C)
    Lc = char_coords(sd.L)
    a = sd.a
    d = C.s1
    for cd in all_character_data(C):
        ci = cd.index
        vals = [character_eval(e, ci) for e in sd.eta]
        if data.ranks[ci] != a:
            if any(not is_zero(v) for v in vals):
                return False
            continue
        top = _top_wedge(cd.K, d, a)
        # coefficient of eta_chi on wedge K
        k = next(i for i, m in enumerate(top) if not is_zero(m))
        c = simplify(vals[k] / top[k])
        if any(not is_zero(v - c * m) for v, m in zip(vals, top)):
            return False
        coords = [cd.h2_coordinates(_gvec_char(x, ci)) for x in sd.X]
        dx = field_det([[coords[j][i] for j in range(a)] for i in range(a)]) if a else Fraction(1)
        lhs = c * (field_det(lam[ci]) if a else 1)
        if not is_zero(lhs - dx / Lc[ci]):
            return False
    return True


def idempotent_fixes(C, sd):
    e = cohomology(C).e(sd.a)
    return all((x * e).simplified() == x for x in sd.eta)


def evaluation_lattice(eta, H1, a):
    """I(eta): the ideal of values of wedges of a functionals on eta."""
    G = H1.group
    if a == 0:
        return IdealLattice.generated_by(G, [eta[0]])
    if H1.rank == 0:
        return IdealLattice.zero(G)
    cs = extend_functionals(H1, dual_basis_functionals(H1))
    t = H1.ambient_rank
    vals = []
    for K in itertools.combinations(range(len(cs)), a):
        v = evaluate_wedge_functional([cs[k] for k in K], eta, t, G)
        if not v.is_zero():
            vals.append(v)
    return IdealLattice.generated_by(G, vals)


def minor_formula(psi, a, group):
    """(-1)^(a(d-a)) sum over shuffles of det(psi rows a.., columns T) e_S."""
    d = len(psi)
    sign0 = -1 if (a * (d - a)) % 2 else 1
    out = []
    for S in subsets(d, a):
        T = [j for j in range(d) if j not in S]
        inv = sum(s - i for i, s in enumerate(S))
        sgn = -1 if inv % 2 else 1
        sub = [[psi[i][j] for j in T] for i in range(a, d)]
        out.append((gr_det(sub, group) * (sign0 * sgn)).simplified())
    return out


@dataclass
class MinorCheck:
    agrees: bool
    basis: object
    eta_defining: list
    eta_minor: list


def eta_via_minors(C, sd, ab=None):
    """Compare eta with the minor formula in an adapted basis."""
    G = C.group
    a = sd.a
    if ab is None:
        ab = adapted_basis(C, sd.X)
    N = len(ab.psi_new)
    zero = GroupRingElement.zero(G)
    # pad eta with zeros on the stabilizing summands
    old = subsets(C.s1, a)
    idx = {S: i for i, S in enumerate(old)}
    padded = []
    for S in subsets(N, a):
        padded.append(sd.eta[idx[S]] if S in idx else zero)
    if a == 0:
        transformed = padded
    else:
        W = wedge_matrix(ab.Binv, a, G)
        transformed = [sum((W[r][c] * padded[c] for c in range(len(padded))), zero).simplified()
                       for r in range(len(W))]
    minors = minor_formula(ab.psi_new, a, G)
    agrees = all(x == y for x, y in zip(transformed, minors))
    return MinorCheck(agrees, ab, transformed, minors)


def charels_expansion(C, sd, ab=None):
    """The shuffle expansion of eta in the adapted basis (identical to the minor formula)."""
    return eta_via_minors(C, sd, ab).eta_minor


# integrality checks -----------------------------------------------------------

def _validate_x(C, a, x):
    e_ge = cohomology(C).e_geq(a)
    if not x.is_integral():
        raise PreconditionError("x is not in Z[G]", witness=x)
    if not ((x * e_ge).simplified() == x):
        raise PreconditionError("x is not supported on e_(a)", witness=x)


def check_charels(C, lam, L, X, quotient=None, x_element=None, extended=True):
    """Containments of the characteristic-element theorem as a report dict."""
    G = C.group
    data = cohomology(C)
    a = len(X)
    x = x_element if x_element is not None else default_x(C, a)
    _validate_x(C, a, x)
    sd = special_element(C, lam, L, X, x_element=x)
    H2 = data.H2
    fit = fitting_ideal(H2, a)
    H2q = quotient if quotient is not None else H2
    ann = annihilator(H2q, torsion=True)
    xI = sd.I_eta.times_element(x)
    rep = {}
    rep["x"] = x
    rep["I_eta"] = sd.I_eta
    rep["Fit"] = fit
    rep["xI_in_Fit"] = fit.contains(xI)
    rep["xI_in_Ann_tor"] = ann.contains(xI)
    sep, _ = separability_test(H2, X)
    rep["separable"] = sep
    if sep:
        rep["e_geq_a_is_one"] = data.e_geq(a) == GroupRingElement.one(G)
        rep["I_eta_equals_Fit"] = sd.I_eta == fit
    B = bidual(data.H1, a)
    xeta = [(e * x).simplified() for e in sd.eta]
    rep["x_eta_in_bidual"] = B.contains(wedge_flat(xeta))
    if extended:
        ok = True
        for Y in itertools.combinations(range(C.s2), a):
            gens = [[GroupRingElement.one(G) if i == j else GroupRingElement.zero(G) for i in range(C.s2)] for j in Y]
            sy = special_element(C, lam, L, gens, x_element=x, with_ideal=False)
            if not B.contains(wedge_flat([(e * x).simplified() for e in sy.eta])):
                ok = False
                break
        rep["wedge_H2_inclusion"] = ok
    rep["defining_equation"] = check_defining_equation(C, lam, sd)
    rep["e_a_eta_is_eta"] = idempotent_fixes(C, sd)
    rep["_data"] = sd
    rep["_bidual"] = B
    return rep


def report_passes(rep):
    return all(v for k, v in rep.items() if isinstance(v, bool) and k != "separable")


# pairing ---------------------------------------------------------------------------

@dataclass
class PairingData:
    left_invariants: list
    right_invariants: list
    left_generators: list
    right_generators: list
    matrix: list
    perfect: bool
    details: dict


def _regular(x):
    from .groupring import regular_matrix
    return regular_matrix(x)


def _support_lattice(G, e):
    """Z[G] intersected with Q[G] e."""
    n = G.order
    R = _regular((GroupRingElement.one(G) - e).simplified())
    Rint = [[Fraction(simplify(a)) for a in r] for r in R]
    from .linalg import integerize
    Ri, _ = integerize(Rint)
    K = int_left_kernel(Ri, nrows=n)
    return ZLattice(n, K) if K else ZLattice.zero(n)


def _generators_of_quotient(big, sub):
    """Invariant factors > 1 of big/sub and matching generators (as vectors)."""
    from .linalg import snf
    M = big.relative_matrix(sub)
    if not M:
        return [], []
    S, U, V = snf(M)
    # sub basis in big coordinates: rows of M; U M V = S, so the rows of V^-1 give adapted big basis
    from .linalg import integer_inverse
    Vinv = integer_inverse(V)
    bv = big.vectors()
    invs, gens = [], []
    for i in range(len(Vinv)):
        dii = S[i][i] if i < len(S) else 0
        if dii > 1:
            invs.append(dii)
            gens.append([sum(Fraction(c) * Fraction(b[k]) for c, b in zip(Vinv[i], bv)) for k in range(big.dim)])
    return invs, gens


def _gre_from(G, v):
    return GroupRingElement(G, [Fraction(simplify(a)) for a in v])


def pairing(C, lam, L, X, x_element=None, sd=None):
    """The canonical pairing between the torsion of bidual/<x eta> and Z[G]/x I(eta)."""
    G = C.group
    n = G.order
    data = cohomology(C)
    a = len(X)
    x = x_element if x_element is not None else default_x(C, a)
    _validate_x(C, a, x)
    if sd is None:
        sd = special_element(C, lam, L, X, x_element=x)
    ea = data.e(a)
    cx = char_coords(x)
    ranks = data.ranks
    for ci in range(n):
        if ranks[ci] == a:
            if is_zero(cx[ci]):
                raise PreconditionError("x e_a is not invertible in Q[G] e_a: x vanishes at character %d" % ci, witness=x)
            if all(is_zero(v) for v in sd.char_eta[ci]):
                raise PreconditionError("eta vanishes at a character of rank a")
    B = bidual(data.H1, a)
    xeta = [(e * x).simplified() for e in sd.eta]
    # map c -> c x eta on Q[G] e_a, parametrised by a Z-basis of Z[G] e_a
    Zea = ZLattice.from_vectors(n, [[Fraction(simplify(v)) for v in (ea.shift(g)).coeffs] for g in G.elements])
    basis = Zea.vectors()
    k = len(basis)
    if k == 0:
        return PairingData([], [], [], [], [], True, {
            "left_order": 1, "right_order": 1, "left_radical_trivial": True, "right_radical_trivial": True,
            "orders_equal": True, "ses_orders": (1, 1, 1), "ses_exact": True})
    rows = []
    for b in basis:
        c = _gre_from(G, b)
        rows.append(wedge_flat([(c * e).simplified() for e in xeta]))
    Y = rational_preimage(rows, B.lattice)
    Lam = ZLattice.from_vectors(n, [vecmat(y, basis) for y in Y.vectors()])
    right_big = _support_lattice(G, ea)
    xI = sd.I_eta.times_element(x)
    right_sub = xI.lattice
    if not Lam.contains(Zea):
        raise AssertionError("x eta does not lie in the bidual")
    if not right_big.contains(right_sub):
        raise AssertionError("x I(eta) is not inside Z[G] e_a")
    linv, lgens = _generators_of_quotient(Lam, Zea)
    rinv, rgens = _generators_of_quotient(right_big, right_sub)

    def value(c, v):
        prod = (_gre_from(G, v) * _gre_from(G, c)).simplified()
        return Fraction(simplify(prod.coeffs[0])) % 1

    matrix = [[value(c, v) for v in rgens] for c in lgens]
    # radicals via lattices: left radical {c in Lam : c v in Z[G] for v in right_big}
    left_rad = _radical(G, Lam, right_big.vectors())
    right_rad = _radical(G, right_big, Lam.vectors())
    lo = _prod(linv)
    ro = _prod(rinv)
    fit = fitting_ideal(data.H2, a)
    span_ea = _rational_span_intersection(fit.lattice, ea)
    ses_first = span_ea.index(right_sub) if span_ea.contains(right_sub) else None
    ses_last = right_big.index(span_ea) if right_big.contains(span_ea) else None
    details = {
        "left_order": lo,
        "right_order": ro,
        "left_radical_trivial": left_rad == Zea,
        "right_radical_trivial": right_rad == right_sub,
        "orders_equal": lo == ro,
        "ses_orders": (ses_first, lo, ses_last),
        "ses_exact": ses_first is not None and ses_last is not None and ses_first * ses_last == lo,
    }
    perfect = details["left_radical_trivial"] and details["right_radical_trivial"] and details["orders_equal"]
    return PairingData(linv, rinv, lgens, rgens, matrix, perfect, details)


def _prod(xs):
    out = 1
    for x in xs:
        out *= x
    return out


def _radical(G, lat, others):
    """{c in lat : c v in Z[G] for all v in others}."""
    n = G.order
    cols = []
    for v in others:
        R = _regular(_gre_from(G, v))
        # c -> c * v has matrix R with vec(c) R = vec(c v)
        for k in range(n):
            cols.append([Fraction(simplify(R[i][k])) for i in range(n)])
    basis = lat.vectors()
    # coordinates y of c in lat: c = y basis; need y (basis R) integral
    M = [[sum(Fraction(b[i]) * col[i] for i in range(n)) for col in cols] for b in basis]
    from .linalg import lattice_preimage
    Y = lattice_preimage(M, ZLattice.standard(len(cols)))
    return ZLattice.from_vectors(n, [vecmat(y, basis) for y in Y.vectors()]) if Y.rank else ZLattice.zero(n)


def _rational_span_intersection(lat, e):
    """lat intersected with Q[G] e."""
    G = e.group
    n = G.order
    vecs = lat.vectors()
    if not vecs:
        return ZLattice.zero(n)
    R = _regular((GroupRingElement.one(G) - e).simplified())
    M = [[sum(Fraction(v[i]) * Fraction(simplify(R[i][k])) for i in range(n)) for k in range(n)] for v in vecs]
    from .linalg import integerize
    Mi, _ = integerize(M)
    K = int_left_kernel(Mi, nrows=len(vecs))
    return ZLattice.from_vectors(n, [vecmat(k, vecs) for k in K]) if K else ZLattice.zero(n)


# finite case -----------------------------------------------------------------------

def _left_inverse_rows(M):
    """Canonical left inverse of an injective matrix over a field (as rows)."""
    rows = len(M)
    cols = len(M[0]) if M else 0
    from .linalg import rref
    _, piv = rref([list(c) for c in zip(*M)]) if cols else ([], [])
    if len(piv) < cols:
        raise PreconditionError("first differential is not injective")
    sub = [[M[p][j] for j in range(cols)] for p in piv]
    from .linalg import field_inverse
    inv = field_inverse(sub)
    out = []
    for i in range(cols):
        r = [Fraction(0)] * rows
        for k, p in enumerate(piv):
            r[p] = inv[i][k]
        out.append(r)
    return out


def finite_case_values(D):
    """w_chi = det [phi ; chi(delta1)] for a complex D0 -> D1 -> D2 with finite cohomology."""
    G = D.group
    r0, r1, r2 = D.ranks[:3]
    out = []
    for ci in range(G.order):
        d0 = char_matrix(D.diffs[0], ci) if r0 else []
        d1 = char_matrix(D.diffs[1], ci) if r2 else []
        phi = _left_inverse_rows(d0) if r0 else []
        M = [list(r) for r in phi] + [list(r) for r in d1]
        w = field_det(M) if M else Fraction(1)
        if is_zero(w):
            raise PreconditionError("cohomology is not finite at character %d" % ci)
        out.append(w)
    return out


def pontryagin_dual(M):
    """Hom(M, Q/Z) for a finite presented module, with (g f)(m) = f(g m)."""
    from .gmodule import PresentedModule, shift_flat
    G = M.group
    N = M.ambient_dim
    R = M.relation_lattice()
    if R.rank != N:
        raise PreconditionError("module is not finite")
    # R* = {y : y . r in Z for r in R}; action y -> y A_g^T where A_g is g on Z^N
    Rstar = dual_lattice(R.vectors())
    basis = Rstar.vectors()
    from .linalg import field_inverse
    Binv = field_inverse(basis)
    action_all = []
    for gi in range(G.order):
        rows = []
        for y in basis:
            # (A_g y^T)^T: A_g maps e_k to shift(e_k); (y A_g^T)_k = y . shift(e_k)
            img = []
            for k in range(N):
                e = [0] * N
                e[k] = 1
                s = shift_flat(G, e, gi)
                img.append(sum(Fraction(a) * b for a, b in zip(y, s)))
            rows.append([int(c) for c in vecmat(img, Binv)])
        action_all.append(rows)
    std = [[int(c) for c in vecmat([Fraction(int(i == j)) for j in range(N)], Binv)] for i in range(N)]
    return PresentedModule.from_lattice_quotient(G, N, action_all, ZLattice(N, std))


def finite_case_identity(D):
    """Fit0(H1 dual) * w = Fit0(H2) for D0 -> D1 -> D2 with finite cohomology."""
    G = D.group
    if D.start != 0 or len(D.ranks) != 3:
        raise PreconditionError("expected a complex D0 -> D1 -> D2 starting in degree 0")
    H1 = D.cohomology_module(1)
    H2 = D.cohomology_module(2)
    H0 = D.cohomology_module(0)
    if not (H1.is_finite() and H2.is_finite()):
        raise PreconditionError("cohomology is infinite")
    if H0.m and H0.free_rank():
        raise PreconditionError("first differential is not injective")
    ws = finite_case_values(D)
    w = from_char_coords(G, ws)
    if any(isinstance(simplify(c), Cyc) for c in w.coeffs):
        raise AssertionError("theta value is not rational")
    dual = pontryagin_dual(H1) if H1.m else H1
    lhs = fitting_ideal(dual, 0).times_element(w)
    rhs = fitting_ideal(H2, 0)
    return {"equal": lhs == rhs, "w": w, "lhs": lhs, "rhs": rhs, "H1_invariants": H1.torsion_invariants(),
            "H2_invariants": H2.torsion_invariants()}
