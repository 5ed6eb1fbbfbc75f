"""Seeded instance generation and brute-force oracles.

The oracles re-derive Fitting ideals, biduals, integrality and pairing
perfectness with their own group-ring arithmetic, determinants and lattice
reduction; only scalar arithmetic (Fraction, Cyc) is shared with the main path.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

import numpy as np

from .complexes import FreeComplex, StrictComplex, ThreeTermComplex, cohomology
from .cyclotomic import Cyc, is_zero, simplify
from .groupring import (
    FiniteAbelianGroup,
    GroupRingElement,
    idempotent_for,
    minimal_denominator,
)
from .linalg import PreconditionError


# instance generation -----------------------------------------------------------

@dataclass
class InstanceSpec:
    seed: int
    group: tuple = ()
    d: int = 2
    bound: int = 2
    ranks: list = None
    shape: str = "strict"
    separable: int = None
    s3: int = 1


@dataclass
class Instance:
    spec: InstanceSpec
    complex: object
    X: list = field(default_factory=list)
    lam: object = None
    U: list = None
    extra: dict = field(default_factory=dict)


def _rand_elem(G, rng, bound):
    return GroupRingElement(G, [Fraction(rng.randint(-bound, bound)) for _ in range(G.order)])


def _rand_unit(G, rng):
    g = rng.choice(G.elements)
    return GroupRingElement.basis(G, g) * rng.choice([1, -1])


def random_unimodular(G, n, rng, bound=1, steps=None):
    """A product of elementary matrices, permutations and trivial units, with its inverse."""
    one, zero = GroupRingElement.one(G), GroupRingElement.zero(G)
    U = [[one if i == j else zero for j in range(n)] for i in range(n)]
    Ui = [[one if i == j else zero for j in range(n)] for i in range(n)]
    if n == 0:
        return U, Ui
    for _ in range(steps if steps is not None else 2 * n):
        kind = rng.random()
        if n >= 2 and kind < 0.7:
            i, j = rng.sample(range(n), 2)
            c = _rand_elem(G, rng, bound)
            # U <- U E with E = I + c e_ij (adds c * column i to column j); inverse uses -c
            for r in range(n):
                U[r][j] = (U[r][j] + U[r][i] * c).simplified()
            Ui[i] = [(x - c * y).simplified() for x, y in zip(Ui[i], Ui[j])]
        elif n >= 2 and kind < 0.85:
            i, j = rng.sample(range(n), 2)
            for r in range(n):
                U[r][i], U[r][j] = U[r][j], U[r][i]
            Ui[i], Ui[j] = Ui[j], Ui[i]
        else:
            i = rng.randrange(n)
            u = _rand_unit(G, rng)
            uinv = u.involution()
            for r in range(n):
                U[r][i] = (U[r][i] * u).simplified()
            Ui[i] = [(uinv * x).simplified() for x in Ui[i]]
    return U, Ui


def _mm(A, B, G):
    n, k, m = len(A), len(B), len(B[0]) if B else 0
    zero = GroupRingElement.zero(G)
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            s = zero
            for t in range(k):
                if not A[i][t].is_zero() and not B[t][j].is_zero():
                    s = s + A[i][t] * B[t][j]
            row.append(s.simplified())
        out.append(row)
    return out


def _nonzero_divisor(G, rng, bound):
    """A random element with nonzero value at every character."""
    from .groupring import char_coords
    while True:
        x = _rand_elem(G, rng, bound)
        if all(not is_zero(c) for c in char_coords(x)):
            return x


def _diag_entry(G, zero_set, rng, bound):
    """delta with chi(delta) = 0 exactly for chi in zero_set (a Galois-stable set)."""
    from .groupring import char_coords
    if len(zero_set) == G.order:
        return GroupRingElement.zero(G)
    e = idempotent_for(G, zero_set)
    m = minimal_denominator(e)
    base = ((GroupRingElement.one(G) - e) * m).simplified()
    while True:
        u = _rand_elem(G, rng, bound)
        x = (base * u).simplified()
        cc = char_coords(x)
        if all(is_zero(cc[i]) == (i in zero_set) for i in range(G.order)):
            return x


def random_rank_vector(G, d, rng, low=0):
    """A Galois-stable rank vector with low <= r_chi <= d."""
    ranks = [0] * G.order
    for orb in G.galois_orbits:
        r = rng.randint(low, d)
        for i in orb:
            ranks[i] = r
    return ranks


def random_strict(G, d, ranks, rng, bound=1):
    """psi = U D V with D diagonal realising the rank vector; returns (psi, U, Uinv, D)."""
    for orb in G.galois_orbits:
        if len({ranks[i] for i in orb}) != 1:
            raise PreconditionError("rank vector is not Galois stable", witness=ranks)
    if any(r < 0 or r > d for r in ranks):
        raise PreconditionError("rank vector out of range", witness=ranks)
    zero = GroupRingElement.zero(G)
    D = [[zero] * d for _ in range(d)]
    for i in range(d):
        Z = [c for c in range(G.order) if ranks[c] > i]
        D[i][i] = _diag_entry(G, Z, rng, bound)
    U, Ui = random_unimodular(G, d, rng, bound)
    V, _ = random_unimodular(G, d, rng, bound)
    psi = _mm(_mm(U, D, G), V, G)
    return psi, U, Ui, D


def random_instance(spec):
    """Deterministic in spec.seed."""
    from .special import random_lambda
    rng = random.Random(spec.seed)
    G = FiniteAbelianGroup(spec.group)
    if spec.shape == "strict":
        ranks = spec.ranks if spec.ranks is not None else random_rank_vector(G, spec.d, rng, spec.separable or 0)
        psi, U, Ui, D = random_strict(G, spec.d, ranks, rng, spec.bound)
        C = StrictComplex(G, psi)
        X = []
        if spec.separable:
            if min(ranks) < spec.separable:
                raise PreconditionError("separable X needs r_chi >= a everywhere")
            for i in range(spec.separable):
                col = [U[r][i] for r in range(spec.d)]
                # perturb the representative by an element of the image
                y = [_rand_elem(G, rng, 1) for _ in range(spec.d)]
                img = [sum((psi[r][c] * y[c] for c in range(spec.d)), GroupRingElement.zero(G)) for r in range(spec.d)]
                X.append([(u + v).simplified() for u, v in zip(col, img)])
        lam = random_lambda(C, rng)
        return Instance(spec, C, X, lam, U, {"ranks": ranks, "D": D})
    if spec.shape == "finite":
        return _random_finite(G, spec, rng)
    if spec.shape == "three":
        return _random_three(G, spec, rng)
    raise PreconditionError("unknown shape %r" % spec.shape)


def random_X(C, a, rng, bound=2, generic=True):
    """a random elements of H2; generic ones have independent images at every character of rank a."""
    from .complexes import all_character_data
    from .groupring import character_eval
    from .linalg import field_det
    G = C.group
    ranks = cohomology(C).ranks
    for _ in range(50):
        X = [[_rand_elem(G, rng, bound) for _ in range(C.s2)] for _ in range(a)]
        if not generic or a == 0:
            return X
        good = True
        for cd in all_character_data(C):
            if ranks[cd.index] != a:
                continue
            coords = [cd.h2_coordinates([character_eval(x, cd.index) for x in v]) for v in X]
            if is_zero(field_det(coords)):
                good = False
                break
        if good:
            return X
    raise PreconditionError("could not draw a generic X")


def _random_finite(G, spec, rng):
    """D0 -> D1 -> D2 with finite H1, H2 and injective first map."""
    r0 = rng.randint(0, 2)
    r2 = rng.randint(0, 2)
    if r0 + r2 == 0:
        r0 = 1
    r1 = r0 + r2
    zero, one = GroupRingElement.zero(G), GroupRingElement.one(G)
    U, Ui = random_unimodular(G, r1, rng)
    W, _ = random_unimodular(G, r0, rng)
    V, _ = random_unimodular(G, r2, rng)
    alpha = [_nonzero_divisor(G, rng, spec.bound) for _ in range(r0)]
    beta = [_nonzero_divisor(G, rng, spec.bound) for _ in range(r2)]
    A = [[alpha[i] if i == j else zero for j in range(r0)] for i in range(r0)] + \
        [[zero] * r0 for _ in range(r2)]
    B = [[zero] * r0 + [beta[i] if i == j else zero for j in range(r2)] for i in range(r2)]
    d0 = _mm(_mm(U, A, G), W, G) if r0 else [[] for _ in range(r1)]
    d1 = _mm(_mm(V, B, G), Ui, G) if r2 else []
    D = FreeComplex(G, 0, [r0, r1, r2], [d0, d1])
    return Instance(spec, D, extra={"alpha": alpha, "beta": beta})


def _random_three(G, spec, rng):
    """Three-term complex with finite H3: d2 = V [beta | 0] U^-1, d1 = U [0; psi1] W."""
    s3 = spec.s3
    s1 = spec.d
    s2 = s1 + s3
    zero = GroupRingElement.zero(G)
    ranks = spec.ranks if spec.ranks is not None else random_rank_vector(G, s1, rng)
    psi1, _, _, _ = random_strict(G, s1, ranks, rng, spec.bound)
    U, Ui = random_unimodular(G, s2, rng)
    V, _ = random_unimodular(G, s3, rng)
    beta = [_nonzero_divisor(G, rng, spec.bound) for _ in range(s3)]
    B = [[beta[i] if i == j else zero for j in range(s3)] + [zero] * s1 for i in range(s3)]
    d2 = _mm(_mm(V, B, G), Ui, G)
    L = [[zero] * s1 for _ in range(s3)] + psi1
    d1 = _mm(U, L, G)
    C = ThreeTermComplex(G, s1, s2, s3, d1, d2)
    return Instance(spec, C, extra={"ranks": ranks, "beta": beta})


def mrs_instance(seed, group, d=3, a=1, ap=2, J=None, bound=1):
    """A strict complex in adapted form for (X, X') = (b_1..b_a, b_1..b_a') over J."""
    from .complexes import QuotientGroup
    from .special import random_lambda
    rng = random.Random(seed)
    G = FiniteAbelianGroup(group)
    J = [tuple(j) for j in (J if J is not None else G.elements)]
    qg = QuotientGroup(G, J)
    zero, one = GroupRingElement.zero(G), GroupRingElement.one(G)
    aug = [(one - GroupRingElement.basis(G, j)).simplified() for j in J if G.index(j) != 0]
    if not aug:
        ap = a
    psi0 = [[zero] * d for _ in range(a)]
    for _ in range(a, ap):
        psi0.append([sum((_rand_elem(G, rng, bound) * y for y in aug), zero).simplified() for _ in range(d)])
    for _ in range(ap, d):
        psi0.append([_rand_elem(G, rng, bound) for _ in range(d)])
    # conjugate by B = [[I, 0], [M, U]], which preserves the adapted shape
    Uu, Uui = random_unimodular(G, d - ap, rng)
    M = [[_rand_elem(G, rng, bound) for _ in range(ap)] for _ in range(d - ap)]
    B = [[one if i == j else zero for j in range(ap)] + [zero] * (d - ap) for i in range(ap)] + \
        [M[i] + Uu[i] for i in range(d - ap)]
    UiM = _mm(Uui, M, G) if d > ap else []
    Binv = [[one if i == j else zero for j in range(ap)] + [zero] * (d - ap) for i in range(ap)] + \
        [[(-x).simplified() for x in UiM[i]] + Uui[i] for i in range(d - ap)]
    psi = _mm(_mm(Binv, psi0, G), B, G)
    C = StrictComplex(G, psi)
    Q = qg.Q
    X = [[one if j == i else zero for j in range(d)] for i in range(a)]
    Xp = [[GroupRingElement.one(Q) if j == i else GroupRingElement.zero(Q) for j in range(d)] for i in range(ap)]
    lam = random_lambda(C, rng)
    return Instance(InstanceSpec(seed, tuple(group), d), C, X, lam, extra={"J": J, "Xp": Xp})


# private arithmetic for the oracles ------------------------------------------------

class _Ring:
    """Z[G] arithmetic on coefficient tuples, independent of GroupRingElement."""

    def __init__(self, invariants):
        self.inv = tuple(invariants)
        self.els = list(itertools.product(*(range(n) for n in self.inv)))
        self.idx = {g: i for i, g in enumerate(self.els)}
        self.n = len(self.els)
        self.table = [[self.idx[tuple((x + y) % m for x, y, m in zip(g, h, self.inv))] for h in self.els]
                      for g in self.els]

    def mul(self, x, y):
        out = [0] * self.n
        for i, a in enumerate(x):
            if a:
                row = self.table[i]
                for j, b in enumerate(y):
                    if b:
                        out[row[j]] += a * b
        return out

    def add(self, x, y, s=1):
        return [a + s * b for a, b in zip(x, y)]

    def det(self, M):
        """Leibniz expansion."""
        k = len(M)
        total = [0] * self.n
        if k == 0:
            total[0] = 1
            return total
        for perm in itertools.permutations(range(k)):
            inv = sum(1 for i in range(k) for j in range(i + 1, k) if perm[i] > perm[j])
            term = M[0][perm[0]]
            for i in range(1, k):
                if not any(term):
                    break
                term = self.mul(term, M[i][perm[i]])
            total = self.add(total, term, -1 if inv % 2 else 1)
        return total

    def shifts(self, x):
        """The Z-basis vectors g * x for all g."""
        out = []
        for gi in range(self.n):
            v = [0] * self.n
            for j, a in enumerate(x):
                if a:
                    v[self.table[gi][j]] += a
            out.append(v)
        return out


def _hnf_rows(rows):
    """Row-style Hermite basis of the integer row span (own elimination)."""
    rows = [list(r) for r in rows if any(r)]
    if not rows:
        return []
    ncols = len(rows[0])
    out = []
    col = 0
    while rows and col < ncols:
        nz = [r for r in rows if r[col]]
        if not nz:
            col += 1
            continue
        while len([r for r in rows if r[col]]) > 1:
            nz = sorted([r for r in rows if r[col]], key=lambda r: abs(r[col]))
            p = nz[0]
            for r in nz[1:]:
                q = r[col] // p[col]
                for j in range(ncols):
                    r[j] -= q * p[j]
            rows = [r for r in rows if any(r)]
        p = next(r for r in rows if r[col])
        rows.remove(p)
        if p[col] < 0:
            p = [-x for x in p]
        for r in out:
            q = r[col] // p[col]
            if q:
                for j in range(ncols):
                    r[j] -= q * p[j]
        out.append(p)
        col += 1
    return out


def _in_span(basis, v):
    """Membership of an integer vector in the row span of an own-HNF basis."""
    v = list(v)
    for r in basis:
        piv = next(j for j, x in enumerate(r) if x)
        if any(v[j] for j in range(piv)):
            return False
        if v[piv] % r[piv]:
            return False
        q = v[piv] // r[piv]
        v = [a - q * b for a, b in zip(v, r)]
    return not any(v)


def _to_int_vec(x):
    return [int(Fraction(simplify(c))) for c in x.coeffs]


# Fitting ideals -------------------------------------------------------------------------

@dataclass
class OracleIdeal:
    basis: list
    n: int

    def contains_vector(self, v):
        den = 1
        for x in v:
            den = den * Fraction(x).denominator // gcd(den, Fraction(x).denominator)
        if den != 1:
            return False
        return _in_span(self.basis, [int(x) for x in v])

    def agrees_with(self, ideal):
        """Mutual containment with an IdealLattice from the main path."""
        mine = all(ideal.lattice.contains_vector(v) for v in self.basis)
        theirs = all(self.contains_vector(v) for v in ideal.lattice.vectors())
        return mine and theirs


def brute_force_fitting(M, a, seed=0, max_m=5):
    """Fit^a(M) from a doubled, re-randomised presentation with all minors enumerated."""
    if M.m > max_m:
        raise PreconditionError("module too large for the oracle (m = %d)" % M.m)
    R = _Ring(M.group.invariant_factors)
    n = R.n
    rng = random.Random(seed)
    m = M.m
    if a >= m:
        return OracleIdeal([[int(i == j) for i in range(n)] for j in range(n)], n)
    rel = [[_to_int_vec(x) for x in r] for r in M.relations]
    zero = [0] * n

    def rnd():
        return [rng.randint(-1, 1) for _ in range(n)]

    # re-randomise by elementary row operations (unimodular over Z[G])
    new = [list(r) for r in rel]
    for _ in range(2 * len(new)):
        if len(new) < 2:
            break
        i, j = rng.sample(range(len(new)), 2)
        c = rnd()
        new[i] = [R.add(x, R.mul(c, y)) for x, y in zip(new[i], new[j])]
    # doubled generators f_i = e_i + sum_j c_ij e_j: relation f_i - e_i - sum c_ij e_j = 0
    rows = [row + [zero] * m for row in new]
    for i in range(m):
        row = [[0] * n for _ in range(2 * m)]
        row[m + i][0] = 1
        row[i] = R.add(row[i], [int(k == 0) for k in range(n)], -1)
        for j in range(m):
            if j != i and rng.random() < 0.5:
                row[j] = R.add(row[j], rnd(), -1)
        rows.append(row)
    k = 2 * m - a
    vecs = []
    if k <= len(rows):
        for Rs in itertools.combinations(range(len(rows)), k):
            for Cs in itertools.combinations(range(2 * m), k):
                det = R.det([[rows[i][j] for j in Cs] for i in Rs])
                if any(det):
                    vecs.extend(R.shifts(det))
    return OracleIdeal(_hnf_rows(vecs), n)


# integrality ---------------------------------------------------------------------------

def direct_integrality(group, coords):
    """Invert the character transform coefficient by coefficient and test each is in Z."""
    inv = group.invariant_factors
    e = inv[-1] if inv else 1
    els = list(itertools.product(*(range(m) for m in inv)))
    n = len(els)

    def zeta(k):
        k %= e
        if e <= 2:
            return 1 if k == 0 else -1
        return Cyc.zeta(e, k)

    for g in els:
        s = 0
        for c, xc in zip(els, coords):
            if is_zero(xc):
                continue
            k = -sum(ci * gi * (e // m) for ci, gi, m in zip(c, g, inv))
            s = s + zeta(k) * xc
        s = simplify(s)
        if isinstance(s, Cyc):
            return False
        if Fraction(s) % n != 0:
            return False
    return True


# biduals ----------------------------------------------------------------------------------

def _frac_solve(A, b):
    """One solution x of x A = b over Q (A given as rows), or None."""
    m = len(A)
    ncols = len(b)
    # columns of the system: sum_i x_i A[i][j] = b[j]
    M = [[Fraction(A[i][j]) for i in range(m)] + [Fraction(b[j])] for j in range(ncols)]
    piv = []
    r = 0
    for c in range(m):
        p = next((i for i in range(r, ncols) if M[i][c] != 0), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        pv = M[r][c]
        M[r] = [x / pv for x in M[r]]
        for i in range(ncols):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [x - f * y for x, y in zip(M[i], M[r])]
        piv.append(c)
        r += 1
    if any(M[i][m] != 0 for i in range(r, ncols)):
        return None
    x = [Fraction(0)] * m
    for i, c in enumerate(piv):
        x[c] = M[i][m]
    return x


def _frac_det(M):
    M = [[Fraction(x) for x in r] for r in M]
    n = len(M)
    det = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if M[i][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            M[c], M[p] = M[p], M[c]
            det = -det
        det *= M[c][c]
        for i in range(c + 1, n):
            f = M[i][c] / M[c][c]
            if f:
                M[i] = [x - f * y for x, y in zip(M[i], M[c])]
    return det


def _primes(n):
    n = abs(n)
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def _rat_hnf(vectors):
    den = 1
    for v in vectors:
        for x in v:
            q = Fraction(x).denominator
            den = den * q // gcd(den, q)
    B = _hnf_rows([[int(Fraction(x) * den) for x in v] for v in vectors])
    return [[Fraction(x, den) for x in r] for r in B], den


def brute_force_bidual(M, a, max_points=10 ** 6):
    """Bidual of wedge^a M by box enumeration; returns rational basis rows (flat coordinates)."""
    if M.embedding is None:
        raise PreconditionError("bidual oracle needs an embedding")
    if M.rank > 6 or a > 2:
        raise PreconditionError("bidual oracle bound exceeded (rank %d, a %d)" % (M.rank, a))
    R = _Ring(M.group.invariant_factors)
    n = R.n
    t = M.ambient_rank
    Ss = list(itertools.combinations(range(t), a))
    if a == 0:
        return [[Fraction(int(i == j)) for i in range(n)] for j in range(n)]
    den = 1
    for v in M.embedding:
        for x in v:
            den = den * Fraction(x).denominator // gcd(den, Fraction(x).denominator)
    basis = [[[int(Fraction(v[s * n + g]) * den) for g in range(n)] for s in range(t)] for v in M.embedding]
    r0 = len(basis)

    def wedge(vs):
        out = []
        for S in Ss:
            out.extend(R.det([[v[s] for s in S] for v in vs]))
        return out

    scale = den ** a
    gens = [wedge([basis[i] for i in K]) for K in itertools.combinations(range(r0), a)]
    L0, _ = _rat_hnf([[Fraction(x, scale) for x in g] for g in gens])
    if not L0:
        return []
    # Z[G]-linear functionals f_k with f_k(m_i) = delta-transport of the dual basis
    flat_basis = [[Fraction(x, den) for s in range(t) for x in b[s]] for b in basis]
    funcs = []
    for k in range(r0):
        # f_k(m_i) = sum_g phi_k(g^-1 m_i) g; rows of shifts give g^-1 m_i coordinates
        rhs_rows = []
        for i in range(r0):
            val = [Fraction(0)] * n
            for gi in range(n):
                ginv = R.idx[tuple((-x) % m for x, m in zip(R.els[gi], R.inv))]
                w = _shift(R, flat_basis[i], ginv, t)
                coords = _frac_solve(flat_basis, w)
                val[gi] = coords[k]
            rhs_rows.append(val)
        # c in Q[G]^t with sum_s c_s m_i[s] = f_k(m_i); unknowns c (t*n), equations per (i, h)
        A = []
        for s in range(t):
            for g in range(n):
                row = []
                for i in range(r0):
                    prod = [0] * n
                    for h in range(n):
                        coef = flat_basis[i][s * n + h]
                        if coef:
                            prod[R.table[g][h]] += coef
                    row.extend(prod)
                A.append(row)
        b = [x for i in range(r0) for x in rhs_rows[i]]
        c = _frac_solve(A, b)
        if c is None:
            raise AssertionError("functional does not extend")
        funcs.append([c[s * n:(s + 1) * n] for s in range(t)])
    # wedge functionals: value at e_S is det of c_{k}[s]
    cols = []
    for K in itertools.combinations(range(r0), a):
        dets = [_det_frac(R, [[funcs[k][s] for s in S] for k in K]) for S in Ss]
        # x -> sum_S x_S dets_S, coefficient h
        for h in range(n):
            col = []
            for si in range(len(Ss)):
                for g in range(n):
                    # coefficient of h in g * dets_S
                    acc = Fraction(0)
                    for u in range(n):
                        if R.table[g][u] == h:
                            acc += dets[si][u]
                    col.append(acc)
            cols.append(col)
    lattice = [list(v) for v in L0]
    for _ in range(8):
        Gm = [[sum(x * y for x, y in zip(v, col)) for col in cols] for v in lattice]
        rk = len(lattice)
        sub = _nonsingular_minor(Gm, rk)
        D0 = _frac_det(sub)
        dd = 1
        for r in Gm:
            for x in r:
                dd = dd * x.denominator // gcd(dd, x.denominator)
        found = []
        for p in _primes(int(D0 * dd ** rk)):
            if p ** rk > max_points:
                raise PreconditionError("bidual oracle box too large")
            Gi = np.array([[int(x * dd) for x in r] for r in Gm], dtype=object)
            box = np.array(list(itertools.product(range(p), repeat=rk)), dtype=object)
            vals = box.dot(Gi) % (p * dd)
            hits = np.nonzero(~(vals != 0).any(axis=1))[0]
            for h in hits:
                c = [int(x) for x in box[h]]
                if any(c):
                    found.append([sum(Fraction(ci, p) * v[j] for ci, v in zip(c, lattice))
                                  for j in range(len(lattice[0]))])
        if not found:
            break
        lattice, _ = _rat_hnf(lattice + found)
    return lattice


def _shift(R, flat, gi, t):
    n = R.n
    out = [Fraction(0)] * (t * n)
    for s in range(t):
        for h in range(n):
            c = flat[s * n + h]
            if c:
                out[s * n + R.table[gi][h]] += c
    return out


def _det_frac(R, M):
    """Determinant over Q[G] with Fraction coefficients (Leibniz)."""
    k = len(M)
    n = R.n
    total = [Fraction(0)] * n
    for perm in itertools.permutations(range(k)):
        inv = sum(1 for i in range(k) for j in range(i + 1, k) if perm[i] > perm[j])
        term = list(M[0][perm[0]])
        for i in range(1, k):
            term = R.mul(term, M[i][perm[i]])
        sgn = -1 if inv % 2 else 1
        total = [x + sgn * y for x, y in zip(total, term)]
    return total


def _nonsingular_minor(Gm, rk):
    cols = []
    for j in range(len(Gm[0])):
        trial = cols + [j]
        sub = [[Gm[i][c] for c in trial] for i in range(rk)]
        if _rank(sub) == len(trial):
            cols = trial
        if len(cols) == rk:
            break
    return [[Gm[i][c] for c in cols] for i in range(rk)]


def _rank(M):
    M = [[Fraction(x) for x in r] for r in M]
    rank = 0
    ncols = len(M[0]) if M else 0
    for c in range(ncols):
        p = next((i for i in range(rank, len(M)) if M[i][c] != 0), None)
        if p is None:
            continue
        M[rank], M[p] = M[p], M[rank]
        for i in range(len(M)):
            if i != rank and M[i][c] != 0:
                f = M[i][c] / M[rank][c]
                M[i] = [x - f * y for x, y in zip(M[i], M[rank])]
        rank += 1
    return rank


def bidual_agrees(oracle_rows, main_lattice):
    from .linalg import ZLattice
    if not oracle_rows:
        return main_lattice.rank == 0
    L = ZLattice.from_vectors(main_lattice.dim, oracle_rows)
    return L == main_lattice


# pairings --------------------------------------------------------------------------------

def pairing_oracle(left, right, matrix, bound=10 ** 4):
    """Perfectness of a Q/Z-valued bilinear pairing of finite abelian groups by enumeration.

    left, right: invariant factors of the cyclic decompositions; matrix[i][j] = <u_i, v_j>.
    """
    lo = 1
    for q in left:
        lo *= q
    ro = 1
    for q in right:
        ro *= q
    if lo > bound or ro > bound:
        raise PreconditionError("pairing oracle bound exceeded")
    if lo != ro:
        return False
    M = [[Fraction(x) for x in r] for r in matrix]
    for i, q in enumerate(left):
        for j, p in enumerate(right):
            if (M[i][j] * q) % 1 or (M[i][j] * p) % 1:
                return False

    def radical_trivial(A, B, Mt):
        for u in itertools.product(*(range(q) for q in A)):
            if not any(u):
                continue
            if all(sum(ui * Mt[i][j] for i, ui in enumerate(u)) % 1 == 0 for j in range(len(B))):
                return False
        return True

    Mt = [list(r) for r in zip(*M)] if M else [[] for _ in right]
    return radical_trivial(left, right, M) and radical_trivial(right, left, Mt)
