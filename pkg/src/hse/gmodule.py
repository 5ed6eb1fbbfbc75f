"""Finitely generated Z[G]-modules through restriction of scalars to Z.

A free module Z[G]^t is identified with Z^(t|G|); coordinate i*|G| + k
holds the coefficient of the k-th group element in the i-th component.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from math import comb

from .cyclotomic import simplify
from .groupring import GroupRingElement, StructuralError, gr_det, regular_matrix
from .linalg import (
    PreconditionError,
    ZLattice,
    common_denominator,
    field_solve,
    identity,
    int_left_kernel,
    int_solve_left,
    lattice_preimage,
    rref,
    snf_diagonal,
    transpose,
    vecmat,
)


# vectors over Z[G] ------------------------------------------------------

def gvec_to_flat(vec):
    out = []
    for x in vec:
        out.extend(x.coeffs)
    return out


def flat_to_gvec(group, flat):
    n = group.order
    return [GroupRingElement(group, flat[i * n:(i + 1) * n]).simplified() for i in range(len(flat) // n)]


def shift_flat(group, flat, gi):
    """Coordinates of g * v where g has index gi."""
    n = group.order
    row = group.mul_index[gi]
    out = [0] * len(flat)
    for b in range(0, len(flat), n):
        for k in range(n):
            out[b + row[k]] = flat[b + k]
    return out


def orbit_vectors(group, flat):
    return [shift_flat(group, flat, gi) for gi in range(group.order)]


def zg_matrix_to_int(A, group, ncols=None):
    """Restriction of scalars of a Z[G]-matrix A (column convention, m x n).

    Returns B of size (n|G|) x (m|G|) with flat(v) B = flat(A v).
    """
    m = len(A)
    n = len(A[0]) if A else (ncols or 0)
    N = group.order
    B = [[0] * (m * N) for _ in range(n * N)]
    for i in range(m):
        for j in range(n):
            R = regular_matrix(A[i][j])
            for h in range(N):
                Rh = R[h]
                Bj = B[j * N + h]
                for k in range(N):
                    if Rh[k]:
                        Bj[i * N + k] = Rh[k]
    return B


def zg_matvec(A, v):
    return [sum((a * x for a, x in zip(row, v)), GroupRingElement.zero(v[0].group)) for row in A]


def zg_matmul(A, B, group):
    m = len(A)
    n = len(B[0]) if B else 0
    k = len(B)
    zero = GroupRingElement.zero(group)
    return [[sum((A[i][t] * B[t][j] for t in range(k)), zero) for j in range(n)] for i in range(m)]


def zg_identity(group, n):
    one = GroupRingElement.one(group)
    zero = GroupRingElement.zero(group)
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def zg_transpose(A):
    return [list(r) for r in zip(*A)] if A else []


# ideals ------------------------------------------------------------------

class IdealLattice:
    """A G-stable Z-lattice inside Q[G]."""

    __slots__ = ("group", "lattice")

    def __init__(self, group, lattice, check=True):
        self.group = group
        self.lattice = lattice
        if check:
            for v in lattice.vectors():
                for gi in range(group.order):
                    if not lattice.contains_vector(shift_flat(group, v, gi)):
                        raise StructuralError("lattice is not G-stable")

    @classmethod
    def generated_by(cls, group, elements):
        vecs = []
        for x in elements:
            flat = [Fraction(simplify(a)) for a in x.coeffs]
            vecs.extend(orbit_vectors(group, flat))
        return cls(group, ZLattice.from_vectors(group.order, vecs), check=False)

    @classmethod
    def whole(cls, group):
        return cls(group, ZLattice.standard(group.order), check=False)

    @classmethod
    def zero(cls, group):
        return cls(group, ZLattice.zero(group.order), check=False)

    def elements(self):
        return [GroupRingElement(self.group, v).simplified() for v in self.lattice.vectors()]

    def __eq__(self, other):
        return isinstance(other, IdealLattice) and self.group == other.group and self.lattice == other.lattice

    def __hash__(self):
        return hash(self.lattice)

    def __repr__(self):
        return "IdealLattice(%r, basis=%r, den=%d)" % (self.group, self.lattice.basis, self.lattice.denominator)

    def contains(self, other):
        return self.lattice.contains(other.lattice)

    def contains_element(self, x):
        return self.lattice.contains_vector([Fraction(simplify(a)) for a in x.coeffs])

    def __add__(self, other):
        return IdealLattice(self.group, self.lattice + other.lattice, check=False)

    def intersection(self, other):
        return IdealLattice(self.group, self.lattice.intersection(other.lattice), check=False)

    def times_element(self, x):
        return IdealLattice.generated_by(self.group, [y * x for y in self.elements()])

    def __mul__(self, other):
        if isinstance(other, GroupRingElement):
            return self.times_element(other)
        return IdealLattice.generated_by(self.group, [y * z for y in self.elements() for z in other.elements()])

    def is_zero(self):
        return self.lattice.rank == 0

    def is_whole(self):
        return self == IdealLattice.whole(self.group)

    def canonical_basis(self):
        return self.lattice.basis, self.lattice.denominator


# G-lattices -------------------------------------------------------------

class GLattice:
    """A Z-free Z[G]-module of rank m given by action matrices.

    action[i] is the m x m integer matrix of the i-th standard generator in
    the row convention (v -> v A).  When the lattice sits inside a free
    module Q[G]^t, `embedding` holds its Z-basis as flat rational rows.
    """

    def __init__(self, group, rank, action, embedding=None, ambient_rank=None):
        self.group = group
        self.rank = rank
        self.action = [list(map(list, A)) for A in action]
        self.embedding = embedding
        self.ambient_rank = ambient_rank
        self._elem_cache = {}
        if len(self.action) != len(group.generators()):
            raise StructuralError("need one action matrix per generator")

    @classmethod
    def from_sublattice(cls, group, t, lattice):
        """A G-stable lattice inside Q[G]^t (flat coordinates)."""
        basis = lattice.vectors()
        action = []
        for g in group.generators():
            gi = group.index(g)
            rows = []
            for v in basis:
                c = lattice.coordinates(shift_flat(group, v, gi))
                if c is None or any(x.denominator != 1 for x in c):
                    raise StructuralError("sublattice is not G-stable")
                rows.append([int(x) for x in c])
            action.append(rows)
        return cls(group, len(basis), action, embedding=basis, ambient_rank=t)

    @classmethod
    def free(cls, group, t):
        return cls.from_sublattice(group, t, ZLattice.standard(t * group.order))

    def element_matrix(self, g):
        """Action matrix of an arbitrary group element."""
        g = tuple(g)
        if g in self._elem_cache:
            return self._elem_cache[g]
        M = identity(self.rank)
        for k, A in zip(g, self.action):
            for _ in range(k):
                M = [vecmat(r, A) for r in M] if M else M
        self._elem_cache[g] = M
        return M

    def all_matrices(self):
        return [self.element_matrix(g) for g in self.group.elements]

    def check(self):
        """Action matrices commute and have the prescribed orders."""
        from .linalg import matmul
        mats = self.action
        for A in mats:
            for B in mats:
                if matmul(A, B) != matmul(B, A):
                    return False
        for A, n in zip(mats, self.group.invariant_factors):
            P = identity(self.rank)
            for _ in range(n):
                P = matmul(P, A) if self.rank else P
            if P != identity(self.rank):
                return False
        return True

    def orbit_generators(self):
        """A small set of Z[G]-generators, chosen greedily from the Z-basis."""
        gens = []
        span = ZLattice.zero(self.rank)
        mats = self.all_matrices()
        for i in range(self.rank):
            e = [0] * self.rank
            e[i] = 1
            if span.contains_vector(e):
                continue
            gens.append(e)
            span = span + ZLattice(self.rank, [vecmat(e, M) for M in mats])
        return gens


def transport(M, phi):
    """Hom_Z(M, Z) -> Hom_Z[G](M, Z[G]): values on the Z-basis of M.

    phi is a vector of length M.rank (values on the basis).  Returns the list
    of group-ring elements Phi(m_j) = sum_g phi(g^-1 m_j) g.
    """
    G = M.group
    out = []
    inv = G.inv_index
    for j in range(M.rank):
        coeffs = [0] * G.order
        for gi, g in enumerate(G.elements):
            ginv = G.elements[inv[gi]]
            row = M.element_matrix(ginv)[j]
            coeffs[gi] = sum(a * b for a, b in zip(row, phi))
        out.append(GroupRingElement(G, coeffs))
    return out


def zg_dual(M):
    """The dual Hom_Z[G](M, Z[G]) as a G-lattice inside Z[G]^(rank M).

    Its Z-basis is the transport of the dual Z-basis of M; Phi is embedded
    as (Phi(m_1), ..., Phi(m_rank)).
    """
    G = M.group
    if M.rank == 0:
        return GLattice(G, 0, [[] for _ in G.generators()], embedding=[], ambient_rank=0)
    vecs = []
    for k in range(M.rank):
        phi = [0] * M.rank
        phi[k] = 1
        vecs.append(gvec_to_flat(transport(M, phi)))
    lat = ZLattice.from_vectors(M.rank * G.order, vecs)
    return GLattice.from_sublattice(G, M.rank, lat)


def hom_to_group_ring(M):
    """Z-basis of Hom_Z[G](M, Z[G]) computed directly as equivariant maps.

    A map is given by the values f(m_j) in Z[G]; equivariance demands
    f(g m_j) = g f(m_j) for every generator g.  Returns flat vectors in
    Z^(rank |G|).
    """
    G = M.group
    n = G.order
    m = M.rank
    cols = []
    for A, g in zip(M.action, G.generators()):
        gi = G.index(g)
        for j in range(m):
            # sum_k A[j][k] f(m_k) - g f(m_j) = 0, one equation per group element
            for h in range(n):
                col = [0] * (m * n)
                for k in range(m):
                    if A[j][k]:
                        col[k * n + h] += A[j][k]
                # (g f(m_j))_h = f(m_j)_{g^-1 h}
                src = G.mul_index[G.inv_index[gi]][h]
                col[j * n + src] -= 1
                cols.append(col)
    if not cols:
        return identity(m * n)
    return int_left_kernel(transpose(cols), nrows=m * n)


def is_reflexive(M):
    """Check the evaluation map M -> M** is bijective.

    M** is computed through two applications of the transport dual; the
    double dual of the Z-basis must match M under the evaluation pairing,
    and the directly computed module of equivariant maps must agree with
    the transported one.
    """
    G = M.group
    D = zg_dual(M)
    direct = ZLattice(M.rank * G.order, hom_to_group_ring(M)) if M.rank else ZLattice.zero(0)
    if M.rank and direct != ZLattice.from_vectors(M.rank * G.order, D.embedding):
        return False
    # evaluation m -> (Psi -> Psi(m)), read through coefficients at the identity
    ev = []
    for j in range(M.rank):
        ev.append([int(D.embedding[k][j * G.order]) for k in range(D.rank)])
    return D.rank == M.rank and (M.rank == 0 or abs(_int_det(ev)) == 1)


def _int_det(M):
    from .linalg import field_det
    return field_det(M)


# presented modules --------------------------------------------------------

class PresentedModule:
    """cok of Q : Z[G]^s -> Z[G]^m, with the s relations given as rows of Q."""

    def __init__(self, group, m, relations):
        self.group = group
        self.m = m
        self.relations = [list(r) for r in relations]
        for r in self.relations:
            if len(r) != m:
                raise StructuralError("relation of length %d, expected %d" % (len(r), m))
        self._rel_lattice = None

    @property
    def ambient_dim(self):
        return self.m * self.group.order

    def relation_lattice(self):
        if self._rel_lattice is None:
            vecs = []
            for r in self.relations:
                flat = gvec_to_flat(r)
                vecs.extend(orbit_vectors(self.group, flat))
            self._rel_lattice = ZLattice.from_vectors(self.ambient_dim, vecs)
        return self._rel_lattice

    @classmethod
    def from_lattice_quotient(cls, group, k, action_all, sub):
        """Present Z^k / sub where every group element acts by action_all[g_index]."""
        gens = []
        span = sub
        for i in range(k):
            e = [0] * k
            e[i] = 1
            if span.contains_vector(e):
                continue
            gens.append(e)
            span = span + ZLattice(k, [vecmat(e, A) for A in action_all])
        u = len(gens)
        n = group.order
        if u == 0:
            return cls(group, 0, [])
        Mp = []
        for gen in gens:
            for gi in range(n):
                Mp.append(vecmat(gen, action_all[gi]))
        rel = lattice_preimage(Mp, sub)
        rows = []
        rspan = ZLattice.zero(u * n)
        for v in rel.vectors():
            if rspan.contains_vector(v):
                continue
            rows.append(flat_to_gvec(group, [int(a) for a in v]))
            rspan = rspan + ZLattice(u * n, orbit_vectors(group, [int(a) for a in v]))
        mod = cls(group, u, rows)
        mod._generator_images = gens
        return mod

    @classmethod
    def from_glattice(cls, M):
        return cls.from_lattice_quotient(M.group, M.rank, M.all_matrices(), ZLattice.zero(M.rank))

    def torsion_invariants(self):
        R = self.relation_lattice()
        return [d for d in snf_diagonal(R.basis) if d > 1] if R.rank else []

    def free_rank(self):
        return self.ambient_dim - self.relation_lattice().rank

    def is_finite(self):
        return self.free_rank() == 0

    def order(self):
        if not self.is_finite():
            raise PreconditionError("module is infinite")
        out = 1
        for d in self.torsion_invariants():
            out *= d
        return out

    def contains_relation(self, flat):
        return self.relation_lattice().contains_vector(flat)

    def torsion_free_quotient(self):
        """M_tf as a GLattice together with the projection matrix F (v -> v F)."""
        G = self.group
        N = self.ambient_dim
        R = self.relation_lattice()
        if R.rank:
            F = transpose(int_left_kernel(transpose(R.basis), nrows=N), ncols=N)
        else:
            F = identity(N)
        k = len(F[0]) if F else 0
        if k == 0:
            return GLattice(G, 0, [[] for _ in G.generators()]), F
        # a left inverse S of F over Z: S F = I
        S = []
        for i in range(k):
            e = [0] * k
            e[i] = 1
            x = int_solve_left(F, e)
            S.append(x)
        action = []
        for g in G.generators():
            gi = G.index(g)
            rows = []
            for s in S:
                rows.append(vecmat(shift_flat(G, s, gi), F))
            action.append(rows)
        return GLattice(G, k, action), F

    def torsion_decomp(self):
        tf, F = self.torsion_free_quotient()
        return self.torsion_invariants(), tf


def fitting_ideal(M, a):
    """Fit^a(M): the ideal generated by the (m - a)-minors of the presentation."""
    G = M.group
    if a < 0:
        raise PreconditionError("a must be nonnegative")
    k = M.m - a
    if k <= 0:
        return IdealLattice.whole(G)
    rows = M.relations
    if k > len(rows):
        return IdealLattice.zero(G)
    minors = []
    for R in itertools.combinations(range(len(rows)), k):
        for C in itertools.combinations(range(M.m), k):
            sub = [[rows[i][j] for j in C] for i in R]
            d = gr_det(sub, G)
            if not d.is_zero():
                minors.append(d)
    return IdealLattice.generated_by(G, minors)


def _annihilator_of(M, generators):
    G = M.group
    n = G.order
    R = M.relation_lattice()
    ann = ZLattice.standard(n)
    for v in generators:
        A = [shift_flat(G, v, gi) for gi in range(n)]
        ann = ann.intersection(lattice_preimage(A, R))
        if ann.rank == 0:
            break
    return IdealLattice(G, ann, check=False)


def annihilator(M, torsion=False):
    """Ann_Z[G](M), or of its Z-torsion submodule when torsion is set."""
    N = M.ambient_dim
    if torsion:
        sat = M.relation_lattice().saturation()
        gens = [list(map(int, v)) for v in sat.vectors()]
    else:
        gens = []
        for j in range(M.m):
            e = [0] * N
            e[j * M.group.order] = 1
            gens.append(e)
    return _annihilator_of(M, gens)


def element_lattice_map(group, xs):
    """Rows g * x_i (flat), as the Z-matrix of Z[G]^|X| -> ambient."""
    rows = []
    for x in xs:
        flat = gvec_to_flat(x)
        rows.extend(orbit_vectors(group, flat))
    return rows


def separability_test(M, X):
    """Decide whether X spans a free direct summand of rank |X| of M.

    Returns (separable, retraction or witness).  The retraction is an m x |X|
    matrix of group-ring elements r with r(gen_j) = row j, r(x_i) = e_i.
    """
    G = M.group
    n = G.order
    X = [list(x) for x in X]
    for x in X:
        if len(x) != M.m:
            raise PreconditionError("element of X has wrong length", witness=x)
    if not X:
        return True, []
    R = M.relation_lattice()
    A = element_lattice_map(G, X)
    ker = lattice_preimage(A, R)
    if ker.rank:
        return False, {"reason": "relation among X", "relation": ker.vectors()[0]}
    t = len(X)
    m = M.m
    nunk = m * t * n

    def unk(j, k, g):
        return (j * t + k) * n + g

    cols = []
    rhs = []
    regs = {}

    def reg(x):
        key = id(x)
        if key not in regs:
            regs[key] = (x, regular_matrix(x))
        return regs[key][1]

    for q in M.relations:
        Rq = [reg(qj) for qj in q]
        for k in range(t):
            for h in range(n):
                col = [0] * nunk
                for j in range(m):
                    Rj = Rq[j]
                    for g in range(n):
                        if Rj[g][h]:
                            col[unk(j, k, g)] = Rj[g][h]
                cols.append(col)
                rhs.append(0)
    for i, x in enumerate(X):
        Rx = [reg(xj) for xj in x]
        for k in range(t):
            for h in range(n):
                col = [0] * nunk
                for j in range(m):
                    Rj = Rx[j]
                    for g in range(n):
                        if Rj[g][h]:
                            col[unk(j, k, g)] = Rj[g][h]
                cols.append(col)
                rhs.append(1 if (i == k and h == 0) else 0)
    sol = int_solve_left(transpose(cols), rhs)
    if sol is None:
        return False, {"reason": "inclusion does not split"}
    retraction = [[GroupRingElement(G, sol[unk(j, k, 0):unk(j, k, 0) + n]) for k in range(t)] for j in range(m)]
    return True, retraction


# exterior powers ----------------------------------------------------------

def subsets(n, a):
    return list(itertools.combinations(range(n), a))


def wedge_sign(j, T):
    """Sign of moving e_j to its sorted place in e_j ^ e_T."""
    return -1 if sum(1 for t in T if t < j) % 2 else 1


def exterior_power(M, a):
    """Standard presentation of the a-th exterior power of a presented module."""
    if a < 0:
        raise PreconditionError("a must be nonnegative")
    if isinstance(M, GLattice):
        M = PresentedModule.from_glattice(M)
    G = M.group
    if a == 0:
        return PresentedModule(G, 1, [])
    S = subsets(M.m, a)
    idx = {s: i for i, s in enumerate(S)}
    zero = GroupRingElement.zero(G)
    rels = []
    for q in M.relations:
        for T in subsets(M.m, a - 1):
            row = [zero] * len(S)
            for j in range(M.m):
                if j in T or q[j].is_zero():
                    continue
                U = tuple(sorted(T + (j,)))
                row[idx[U]] = row[idx[U]] + q[j] * wedge_sign(j, T)
            if any(not r.is_zero() for r in row):
                rels.append(row)
    return PresentedModule(G, len(S), rels)


def wedge_vectors(vectors, t, group):
    """v_1 ^ ... ^ v_a in the lexicographic basis of the a-th power of Q[G]^t."""
    a = len(vectors)
    out = []
    for S in subsets(t, a):
        mat = [[vectors[j][s] for j in range(a)] for s in S]
        out.append(gr_det(mat, group))
    return out


def wedge_matrix(A, a, group):
    """Matrix of the a-th exterior power of the Z[G]-matrix A (column convention)."""
    m = len(A)
    n = len(A[0]) if A else 0
    rows = subsets(m, a)
    cols = subsets(n, a)
    return [[gr_det([[A[i][j] for j in C] for i in R], group) for C in cols] for R in rows]


# biduals -------------------------------------------------------------------

def _basis_vectors_as_gvec(M):
    G = M.group
    return [flat_to_gvec_q(G, v) for v in M.embedding]


def flat_to_gvec_q(group, flat):
    n = group.order
    return [GroupRingElement(group, [Fraction(simplify(a)) for a in flat[i * n:(i + 1) * n]]) for i in range(len(flat) // n)]


def extend_functionals(M, Phis):
    """Extend Z[G]-maps M -> Z[G] to Q[G]-linear maps on the ambient Q[G]^t.

    Each Phi is given by its values on the Z-basis of M.  Returns vectors
    c in Q[G]^t with Phi(v) = sum_i c_i v_i.
    """
    G = M.group
    n = G.order
    t = M.ambient_rank
    basis = _basis_vectors_as_gvec(M)
    # c -> (sum_i c_i m_{j,i})_j is c_flat @ T with T of size (t n) x (rank n)
    T = [[Fraction(0)] * (M.rank * n) for _ in range(t * n)]
    for j, mj in enumerate(basis):
        for i in range(t):
            R = regular_matrix(mj[i])
            for g in range(n):
                for h in range(n):
                    if R[g][h]:
                        T[i * n + g][j * n + h] = Fraction(R[g][h])
    Tt = transpose(T)
    out = []
    for Phi in Phis:
        b = []
        for val in Phi:
            b.extend(Fraction(simplify(x)) for x in val.coeffs)
        _, c = field_solve(Tt, b)
        if c is None:
            raise PreconditionError("functional does not extend")
        out.append(flat_to_gvec_q(G, c))
    return out


def dual_basis_functionals(M):
    """Transported dual basis of M, as values on the Z-basis of M."""
    out = []
    for k in range(M.rank):
        phi = [0] * M.rank
        phi[k] = 1
        out.append(transport(M, phi))
    return out


def evaluate_wedge_functional(cs, x_wedge, t, group):
    """(Phi_1 ^ ... ^ Phi_a)(x) for x in the lexicographic basis of the a-th power."""
    a = len(cs)
    total = GroupRingElement.zero(group)
    for S, xs in zip(subsets(t, a), x_wedge):
        if xs.is_zero():
            continue
        d = gr_det([[cs[i][s] for s in S] for i in range(a)], group)
        total = total + xs * d
    return total


def wedge_flat(gvec):
    return [Fraction(simplify(a)) for x in gvec for a in x.coeffs]


class Bidual:
    """The exterior power bidual of a G-lattice M (embedded in Q[G]^t).

    lattice is a ZLattice in the flat coordinates of the a-th exterior power
    of Q[G]^t.  wedge_basis lists the subsets J of the Z-basis of M whose
    wedges form a Q-basis of Q (x) wedge^a M.
    """

    def __init__(self, M, a, lattice, wedge_basis, wedge_rows):
        self.M = M
        self.a = a
        self.lattice = lattice
        self.wedge_basis = wedge_basis
        self.wedge_rows = wedge_rows

    def wedge_coordinates(self, flat):
        """Coordinates of an ambient vector in the canonical wedge basis."""
        R = self.wedge_rows
        _, c = field_solve(transpose(R), list(flat))
        if c is None:
            raise PreconditionError("vector outside the rational exterior power")
        return c

    def in_wedge_coordinates(self):
        dim = len(self.wedge_basis)
        return ZLattice.from_vectors(dim, [self.wedge_coordinates(v) for v in self.lattice.vectors()])

    def contains(self, flat):
        return self.lattice.contains_vector(flat)


def independent_wedges(M, a):
    """The canonical Q-basis of Q (x) wedge^a M made of wedges of basis vectors."""
    G = M.group
    t = M.ambient_rank
    basis = _basis_vectors_as_gvec(M)
    chosen = []
    rows = []
    echelon = []
    for J in subsets(M.rank, a):
        w = wedge_flat(wedge_vectors([basis[j] for j in J], t, G))
        if not any(w):
            continue
        trial = echelon + [w]
        R, piv = rref(trial)
        if len(piv) > len(echelon):
            echelon = [r for r in R if any(r)]
            chosen.append(J)
            rows.append(w)
    return chosen, rows


def bidual(M, a):
    """The bidual of wedge^a M as a lattice in Q (x) wedge^a Q[G]^t."""
    G = M.group
    n = G.order
    if M.embedding is None:
        raise PreconditionError("bidual needs an embedding into a free module")
    t = M.ambient_rank
    if a == 0:
        lat = ZLattice.standard(n)
        return Bidual(M, 0, lat, [()], [[Fraction(int(k == 0)) for k in range(n)]])
    chosen, rows = independent_wedges(M, a)
    dimN = comb(t, a) * n
    if not rows:
        return Bidual(M, a, ZLattice.zero(dimN), [], [])
    Phis = dual_basis_functionals(M)
    cs = extend_functionals(M, Phis)
    # determinant blocks D_{K,S}
    Ss = subsets(t, a)
    func_cols = []
    for K in subsets(M.rank, a):
        blocks = [gr_det([[cs[k][s] for s in S] for k in K], G) for S in Ss]
        if all(b.is_zero() for b in blocks):
            continue
        # functional x -> sum_S x_S D_S; coefficient h of the result
        Rb = [regular_matrix(b) for b in blocks]
        for h in range(n):
            col = [Fraction(0)] * dimN
            for si, Rs in enumerate(Rb):
                for g in range(n):
                    v = Rs[g][h]
                    if v:
                        col[si * n + g] = Fraction(simplify(v))
            func_cols.append(col)
    # restrict to V (rows) : values y -> y rows F
    V = rows
    restricted = [[sum((vi * ci for vi, ci in zip(v, col) if vi and ci), Fraction(0)) for v in V] for col in func_cols]
    from .linalg import dual_lattice
    dual = dual_lattice(restricted)
    ambient = [vecmat(y, V) for y in dual.vectors()]
    lat = ZLattice.from_vectors(dimN, ambient)
    return Bidual(M, a, lat, chosen, rows)
