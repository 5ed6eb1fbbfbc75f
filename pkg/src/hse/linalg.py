"""Exact linear algebra: integer normal forms, lattices and field elimination.

Integer matrices are lists of lists of Python ints.  Lattices use the row
convention: basis vectors are rows, and a matrix M acts on row vectors by
v -> v M.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm

from .cyclotomic import Cyc, is_zero, simplify


class PreconditionError(ValueError):
    """Raised when an input violates a documented precondition."""

    def __init__(self, msg, witness=None):
        super().__init__(msg)
        self.witness = witness


def identity(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def zeros(m, n):
    return [[0] * n for _ in range(m)]


def transpose(M, ncols=None):
    if not M:
        return [[] for _ in range(ncols or 0)]
    return [list(col) for col in zip(*M)]


def matmul(A, B):
    if not A:
        return []
    if not B:
        return [[] for _ in A]
    Bt = list(zip(*B))
    out = []
    for row in A:
        nz = [(k, a) for k, a in enumerate(row) if not is_zero(a)]
        out.append([sum((a * col[k] for k, a in nz), 0) for col in Bt])
    return out


def vecmat(v, M):
    n = len(M[0]) if M else 0
    out = [0] * n
    for a, row in zip(v, M):
        if is_zero(a):
            continue
        for j, b in enumerate(row):
            if not is_zero(b):
                out[j] = out[j] + a * b
    return out


def matvec(M, v):
    return [sum((a * b for a, b in zip(row, v) if not is_zero(a) and not is_zero(b)), 0) for row in M]


# integer normal forms ----------------------------------------------------

def hnf(M, transform=False, ncols=None):
    """Row Hermite normal form.

    Returns (H, U) with H = U M, U unimodular and H in canonical echelon form:
    positive pivots, entries above a pivot reduced into [0, pivot), zero rows
    at the bottom.  When transform is False, U is None.
    """
    A = [list(r) for r in M]
    m = len(A)
    n = len(A[0]) if A else (ncols or 0)
    U = identity(m) if transform else None
    r = 0
    for c in range(n):
        if r == m:
            break
        while True:
            best = None
            for i in range(r, m):
                x = A[i][c]
                if x and (best is None or abs(x) < abs(A[best][c])):
                    best = i
            if best is None:
                break
            if best != r:
                A[r], A[best] = A[best], A[r]
                if U is not None:
                    U[r], U[best] = U[best], U[r]
            p = A[r][c]
            rowr = A[r]
            clean = True
            for i in range(r + 1, m):
                x = A[i][c]
                if x:
                    q = x // p
                    rowi = A[i]
                    for j in range(c, n):
                        if rowr[j]:
                            rowi[j] -= q * rowr[j]
                    if U is not None:
                        Ui, Ur = U[i], U[r]
                        for j in range(m):
                            if Ur[j]:
                                Ui[j] -= q * Ur[j]
                    if rowi[c]:
                        clean = False
            if clean:
                break
        if r < m and A[r][c]:
            if A[r][c] < 0:
                A[r] = [-x for x in A[r]]
                if U is not None:
                    U[r] = [-x for x in U[r]]
            p = A[r][c]
            rowr = A[r]
            for i in range(r):
                q = A[i][c] // p
                if q:
                    rowi = A[i]
                    for j in range(c, n):
                        if rowr[j]:
                            rowi[j] -= q * rowr[j]
                    if U is not None:
                        Ui, Ur = U[i], U[r]
                        for j in range(m):
                            if Ur[j]:
                                Ui[j] -= q * Ur[j]
            r += 1
    return A, U


def hnf_basis(rows, ncols):
    """Nonzero rows of the HNF of the row lattice."""
    rows = [list(r) for r in rows if any(r)]
    if not rows:
        return []
    H, _ = hnf(rows, ncols=ncols)
    return [r for r in H if any(r)]


def pivots_of(H):
    out = []
    for row in H:
        for j, x in enumerate(row):
            if x:
                out.append(j)
                break
    return out


def snf(M):
    """Smith normal form (S, U, V) with S = U M V diagonal, d_i | d_(i+1)."""
    A = [list(r) for r in M]
    m = len(A)
    n = len(A[0]) if A else 0
    U = identity(m)
    V = identity(n)

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):
        # row dst -= q * row src
        A[dst] = [a - q * b for a, b in zip(A[dst], A[src])]
        U[dst] = [a - q * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, q):
        for row in A:
            row[dst] -= q * row[src]
        for row in V:
            row[dst] -= q * row[src]

    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if A[i][j] and (best is None or abs(A[i][j]) < abs(A[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        while True:
            p = A[t][t]
            dirty = False
            for i in range(t + 1, m):
                if A[i][t]:
                    add_row(i, t, A[i][t] // p)
                    if A[i][t]:
                        dirty = True
            for j in range(t + 1, n):
                if A[t][j]:
                    add_col(j, t, A[t][j] // p)
                    if A[t][j]:
                        dirty = True
            if dirty:
                best = None
                for i in range(t, m):
                    if A[i][t] and (best is None or abs(A[i][t]) < abs(A[best[0]][best[1]])):
                        best = (i, t)
                for j in range(t, n):
                    if A[t][j] and (best is None or abs(A[t][j]) < abs(A[best[0]][best[1]])):
                        best = (t, j)
                swap_rows(t, best[0])
                swap_cols(t, best[1])
                continue
            bad = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if A[i][j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            add_row(t, bad, -1)
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            U[t] = [-x for x in U[t]]
        t += 1
    return A, U, V


def snf_diagonal(M):
    """The nonzero invariant factors of M (in divisibility order)."""
    if not M or not M[0]:
        return []
    H = hnf_basis(M, len(M[0]))
    if not H:
        return []
    S, _, _ = snf(H)
    return [S[i][i] for i in range(min(len(S), len(S[0]))) if S[i][i]]


def int_left_kernel(M, nrows=None):
    """Z-basis (HNF) of {x in Z^m : x M = 0}."""
    m = len(M) if M else (nrows or 0)
    if m == 0:
        return []
    if not M[0]:
        return identity(m)
    H, U = hnf(M, transform=True)
    ker = [U[i] for i in range(m) if not any(H[i])]
    return hnf_basis(ker, m)


def int_solve_left(A, b):
    """Integer x with x A = b, or None.  A is m x n, b of length n."""
    m = len(A)
    n = len(b)
    if m == 0:
        return None if any(b) else []
    H, U = hnf(A, transform=True)
    x = [0] * m
    v = list(b)
    r = 0
    for i in range(m):
        row = H[i]
        piv = next((j for j, t in enumerate(row) if t), None)
        if piv is None:
            break
        # earlier columns of v must already vanish
        for j in range(n):
            if j >= piv:
                break
            if v[j]:
                return None
        q, rem = divmod(v[piv], row[piv])
        if rem:
            return None
        if q:
            v = [a - q * t for a, t in zip(v, row)]
            x = [a + q * t for a, t in zip(x, U[i])]
        r += 1
    if any(v):
        return None
    return x


def common_denominator(vectors):
    d = 1
    for v in vectors:
        for a in v:
            d = lcm(d, Fraction(simplify(a)).denominator)
    return d


def integerize(vectors, d=None):
    if d is None:
        d = common_denominator(vectors)
    return [[int(Fraction(simplify(a)) * d) for a in v] for v in vectors], d


def integer_inverse(M):
    """Inverse of a unimodular integer matrix (raises if not unimodular)."""
    n = len(M)
    aug = [list(r) + e for r, e in zip(M, identity(n))]
    H, _ = hnf(aug)
    for i in range(n):
        if H[i][i] != 1:
            raise ValueError("matrix is not unimodular")
    return [row[n:] for row in H[:n]]


# lattices ---------------------------------------------------------------

class ZLattice:
    """A lattice in Q^m: (1/denominator) times the row span of an HNF basis."""

    __slots__ = ("dim", "basis", "denominator")

    def __init__(self, dim, basis, denominator=1, _canonical=False):
        self.dim = dim
        if _canonical:
            self.basis = basis
            self.denominator = denominator
            return
        B = hnf_basis(basis, dim)
        g = denominator
        for row in B:
            for a in row:
                if g == 1:
                    break
                g = gcd(g, a)
        if g > 1:
            B = [[a // g for a in row] for row in B]
            denominator //= g
        self.basis = B
        self.denominator = denominator

    @classmethod
    def from_vectors(cls, dim, vectors):
        vectors = [v for v in vectors if any(not is_zero(a) for a in v)]
        if not vectors:
            return cls(dim, [], 1)
        B, d = integerize(vectors)
        return cls(dim, B, d)

    @classmethod
    def standard(cls, dim):
        return cls(dim, identity(dim), 1, _canonical=True)

    @classmethod
    def zero(cls, dim):
        return cls(dim, [], 1, _canonical=True)

    @property
    def rank(self):
        return len(self.basis)

    def vectors(self):
        d = self.denominator
        if d == 1:
            return [list(r) for r in self.basis]
        return [[Fraction(a, d) for a in r] for r in self.basis]

    def __eq__(self, other):
        return (isinstance(other, ZLattice) and self.dim == other.dim
                and self.denominator == other.denominator and self.basis == other.basis)

    def __hash__(self):
        return hash((self.dim, self.denominator, tuple(map(tuple, self.basis))))

    def __repr__(self):
        return "ZLattice(dim=%d, rank=%d, den=%d)" % (self.dim, self.rank, self.denominator)

    def _scaled(self, D):
        # integer basis of D * self (D a multiple of the denominator)
        f = D // self.denominator
        return [[a * f for a in r] for r in self.basis]

    def coordinates(self, v):
        """Rational coordinates of v in the basis, or None if v is outside the Q-span."""
        v = [Fraction(simplify(a)) * self.denominator for a in v]
        coords = []
        for row in self.basis:
            piv = next(j for j, t in enumerate(row) if t)
            for j in range(piv):
                if v[j]:
                    return None
            q = v[piv] / row[piv]
            coords.append(q)
            if q:
                v = [a - q * t for a, t in zip(v, row)]
        if any(v):
            return None
        return coords

    def contains_vector(self, v):
        c = self.coordinates(v)
        return c is not None and all(x.denominator == 1 for x in c)

    __contains__ = contains_vector

    def contains(self, other):
        return all(self.contains_vector(v) for v in other.vectors())

    def __add__(self, other):
        D = lcm(self.denominator, other.denominator)
        return ZLattice(self.dim, self._scaled(D) + other._scaled(D), D)

    def intersection(self, other):
        D = lcm(self.denominator, other.denominator)
        A = self._scaled(D)
        B = other._scaled(D)
        if not A or not B:
            return ZLattice.zero(self.dim)
        stacked = A + [[-x for x in r] for r in B]
        K = int_left_kernel(stacked)
        vecs = [vecmat(k[:len(A)], A) for k in K]
        return ZLattice(self.dim, vecs, D)

    def scale(self, q):
        q = Fraction(q)
        if q == 0:
            return ZLattice.zero(self.dim)
        return ZLattice(self.dim, [[a * q.numerator for a in r] for r in self.basis], self.denominator * q.denominator)

    def same_span(self, other):
        return self.rank == other.rank and all(self.coordinates(v) is not None for v in other.vectors())

    def relative_matrix(self, sub):
        """Integer coordinates of the basis of sub in the basis of self."""
        rows = []
        for v in sub.vectors():
            c = self.coordinates(v)
            if c is None or any(x.denominator != 1 for x in c):
                raise PreconditionError("lattice containment violated", witness=v)
            rows.append([int(x) for x in c])
        return rows

    def quotient_invariants(self, sub):
        """Invariant factors > 1 of self / sub (requires sub inside self, same span)."""
        M = self.relative_matrix(sub)
        if sub.rank != self.rank:
            raise PreconditionError("quotient is infinite: ranks %d and %d" % (self.rank, sub.rank))
        if not M:
            return []
        return [x for x in snf_diagonal(M) if x > 1]

    def index(self, sub):
        out = 1
        for x in self.quotient_invariants(sub):
            out *= x
        return out

    def saturation(self):
        """Z^dim intersected with the Q-span."""
        if not self.basis:
            return ZLattice.zero(self.dim)
        K = int_left_kernel(transpose(self.basis))
        if not K:
            return ZLattice.standard(self.dim)
        return ZLattice(self.dim, int_left_kernel(transpose(K)), 1)


def lattice_preimage(A, L):
    """{x in Z^m : x A in L} for an integer or rational m x n matrix A."""
    m = len(A)
    D = lcm(common_denominator(A), L.denominator)
    Aint = [[int(Fraction(simplify(a)) * D) for a in r] for r in A]
    Lint = L._scaled(D)
    stacked = Aint + [[-x for x in r] for r in Lint]
    if not stacked or not stacked[0]:
        return ZLattice.standard(m)
    K = int_left_kernel(stacked)
    return ZLattice(m, [k[:m] for k in K], 1)


def dual_lattice(rows):
    """Given a full-rank set of rational row vectors spanning a lattice F in Q^n,
    return the lattice {y : F y in Z} (as rows)."""
    n = len(rows[0])
    F = ZLattice.from_vectors(n, rows)
    if F.rank != n:
        raise PreconditionError("functionals do not have full rank")
    Hinv = field_inverse([[Fraction(a, F.denominator) for a in r] for r in F.basis])
    return ZLattice.from_vectors(n, transpose(Hinv))


# field linear algebra --------------------------------------------------

def _f(x):
    if isinstance(x, int):
        return Fraction(x)
    return x


def rref(M):
    """Reduced row echelon form over Q or Q(zeta_n).  Returns (R, pivots)."""
    A = [[_f(x) for x in r] for r in M]
    m = len(A)
    n = len(A[0]) if A else 0
    pivots = []
    r = 0
    for c in range(n):
        if r == m:
            break
        p = next((i for i in range(r, m) if not is_zero(A[i][c])), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        inv = 1 / A[r][c]
        A[r] = [simplify(x * inv) for x in A[r]]
        for i in range(m):
            if i != r and not is_zero(A[i][c]):
                f = A[i][c]
                A[i] = [simplify(x - f * y) if not is_zero(y) else x for x, y in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
    return A, pivots


def field_rank(M):
    return len(rref(M)[1])


def nullspace(M, ncols=None):
    """Basis of {v : M v = 0}; one vector per free column, canonical."""
    n = len(M[0]) if M else ncols
    R, piv = rref(M) if M else ([], [])
    free = [j for j in range(n) if j not in piv]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for i, p in enumerate(piv):
            v[p] = simplify(-R[i][f])
        basis.append(v)
    return basis


def field_solve(M, b):
    """Return (rank, x) with M x = b, x = None if no solution."""
    m = len(M)
    n = len(M[0]) if M else 0
    aug = [list(r) + [b[i]] for i, r in enumerate(M)]
    R, piv = rref(aug)
    if n in piv:
        return len(piv) - 1, None
    x = [Fraction(0)] * n
    for i, p in enumerate(piv):
        x[p] = R[i][n]
    return len(piv), x


def field_det(M):
    A = [[_f(x) for x in r] for r in M]
    n = len(A)
    det = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if not is_zero(A[i][c])), None)
        if p is None:
            return Fraction(0)
        if p != c:
            A[c], A[p] = A[p], A[c]
            det = -det
        det = det * A[c][c]
        inv = 1 / A[c][c]
        for i in range(c + 1, n):
            if not is_zero(A[i][c]):
                f = A[i][c] * inv
                A[i] = [x - f * y for x, y in zip(A[i], A[c])]
    return simplify(det)


def field_inverse(M):
    n = len(M)
    aug = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(M)]
    R, piv = rref(aug)
    if piv[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in R]


def is_cyclotomic(x):
    return isinstance(x, Cyc)


def rational_preimage(A, L):
    """{y in Q^m : y A in L} for a rational m x n matrix A of full row rank m."""
    m = len(A)
    if m == 0:
        return ZLattice.zero(0)
    Aint, _ = integerize(A)
    _, piv = rref(Aint)
    if len(piv) < m:
        raise PreconditionError("matrix does not have full row rank")
    minor = [[Aint[i][j] for j in piv] for i in range(m)]
    D = L.denominator * abs(int(field_det(minor)))
    scaled = [[Fraction(a) / D for a in row] for row in A]
    Z = lattice_preimage(scaled, L)
    return Z.scale(Fraction(1, D))

