"""Exact arithmetic in the cyclotomic fields Q(zeta_n).

Elements are stored as coefficient tuples in the power basis
1, zeta, ..., zeta^(phi(n)-1), reduced modulo the n-th cyclotomic
polynomial.  Coefficients are Fractions.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd


def _polydivmod(num, den):
    # integer polynomials, lowest degree first, den monic
    num = list(num)
    q = [0] * max(len(num) - len(den) + 1, 1)
    while len(num) >= len(den) and any(num):
        shift = len(num) - len(den)
        c = num[-1]
        q[shift] = c
        for i, d in enumerate(den):
            num[shift + i] -= c * d
        while num and num[-1] == 0:
            num.pop()
    return q, num


@lru_cache(maxsize=None)
def cyclotomic_poly(n):
    """Coefficients of Phi_n, lowest degree first."""
    p = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            p, r = _polydivmod(p, cyclotomic_poly(d))
            assert not any(r)
    while p and p[-1] == 0:
        p.pop()
    return tuple(p)


@lru_cache(maxsize=None)
def _power_table(n):
    # zeta^k for 0 <= k < n as reduced coefficient tuples
    phi = cyclotomic_poly(n)
    deg = len(phi) - 1
    table = []
    for k in range(n):
        if k < deg:
            v = [0] * deg
            v[k] = 1
        else:
            poly = [0] * k + [1]
            _, r = _polydivmod(poly, phi)
            v = list(r) + [0] * (deg - len(r))
        table.append(tuple(v))
    return tuple(table), deg


def euler_phi(n):
    return len(cyclotomic_poly(n)) - 1


class Cyc:
    """An element of Q(zeta_n)."""

    __slots__ = ("n", "c", "_hash")

    def __init__(self, n, coeffs):
        self.n = n
        self.c = tuple(coeffs)
        self._hash = None

    @classmethod
    def zeta(cls, n, k=1):
        table, _ = _power_table(n)
        return cls(n, (Fraction(x) for x in table[k % n]))

    @classmethod
    def from_rational(cls, n, q):
        deg = euler_phi(n)
        return cls(n, [Fraction(q)] + [Fraction(0)] * (deg - 1))

    def _coerce(self, other):
        if isinstance(other, Cyc):
            if other.n != self.n:
                raise ValueError("cyclotomic conductor mismatch: %d vs %d" % (self.n, other.n))
            return other
        if isinstance(other, (int, Fraction)):
            return Cyc.from_rational(self.n, other)
        return NotImplemented

    def is_zero(self):
        return not any(self.c)

    def is_rational(self):
        return not any(self.c[1:])

    def to_rational(self):
        if not self.is_rational():
            raise ValueError("not a rational number: %r" % (self,))
        return self.c[0]

    def is_integral(self):
        # Z[zeta] is the ring of integers and the power basis is a Z-basis
        return all(x.denominator == 1 for x in self.c)

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Cyc(self.n, (a + b for a, b in zip(self.c, o.c)))

    __radd__ = __add__

    def __neg__(self):
        return Cyc(self.n, (-a for a in self.c))

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Cyc(self.n, (a - b for a, b in zip(self.c, o.c)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Cyc(self.n, (a * other for a in self.c))
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        table, deg = _power_table(self.n)
        out = [Fraction(0)] * deg
        for i, a in enumerate(self.c):
            if not a:
                continue
            for j, b in enumerate(o.c):
                if not b:
                    continue
                ab = a * b
                row = table[i + j] if i + j < self.n else table[(i + j) % self.n]
                for k, t in enumerate(row):
                    if t:
                        out[k] += ab * t
        return Cyc(self.n, out)

    __rmul__ = __mul__

    def mult_matrix(self):
        """Matrix of multiplication by self on the power basis (rows = images)."""
        deg = len(self.c)
        rows = []
        for i in range(deg):
            basis = [Fraction(0)] * deg
            basis[i] = Fraction(1)
            rows.append((Cyc(self.n, basis) * self).c)
        return rows

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in Q(zeta_%d)" % self.n)
        if self.is_rational():
            return Cyc.from_rational(self.n, 1 / self.c[0])
        # solve y * M = e_0 where M is the multiplication matrix
        m = self.mult_matrix()
        deg = len(m)
        # augmented system on columns: sum_i y_i m[i][k] = delta_k0
        aug = [[m[i][k] for i in range(deg)] + [Fraction(1 if k == 0 else 0)] for k in range(deg)]
        for col in range(deg):
            piv = next(r for r in range(col, deg) if aug[r][col])
            aug[col], aug[piv] = aug[piv], aug[col]
            p = aug[col][col]
            aug[col] = [x / p for x in aug[col]]
            for r in range(deg):
                if r != col and aug[r][col]:
                    f = aug[r][col]
                    aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
        return Cyc(self.n, (aug[i][deg] for i in range(deg)))

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return Cyc(self.n, (a / other for a in self.c))
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k):
        if k < 0:
            return self.inverse() ** (-k)
        out = Cyc.from_rational(self.n, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def galois(self, a):
        """Apply sigma_a : zeta -> zeta^a."""
        if gcd(a, self.n) != 1:
            raise ValueError("sigma_%d is not an automorphism of Q(zeta_%d)" % (a, self.n))
        table, deg = _power_table(self.n)
        out = [Fraction(0)] * deg
        for k, x in enumerate(self.c):
            if x:
                for j, t in enumerate(table[(a * k) % self.n]):
                    if t:
                        out[j] += x * t
        return Cyc(self.n, out)

    def conj(self):
        return self.galois(-1 % self.n if self.n > 1 else 1)

    def __eq__(self, other):
        if isinstance(other, Cyc):
            return self.n == other.n and self.c == other.c
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and self.c[0] == other
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.c[0]) if self.is_rational() else hash((self.n, self.c))
        return self._hash

    def __bool__(self):
        return not self.is_zero()

    def __repr__(self):
        terms = []
        for k, x in enumerate(self.c):
            if not x:
                continue
            if k == 0:
                terms.append(str(x))
            else:
                z = "z%d" % self.n if k == 1 else "z%d^%d" % (self.n, k)
                terms.append(z if x == 1 else "%s*%s" % (x, z))
        return " + ".join(terms) if terms else "0"


def scalar_galois(x, a):
    """sigma_a on a scalar that may be an int, a Fraction or a Cyc."""
    return x.galois(a) if isinstance(x, Cyc) else x


def simplify(x):
    """Collapse a rational Cyc to a Fraction."""
    if isinstance(x, Cyc) and x.is_rational():
        return x.c[0]
    return x


def is_zero(x):
    return x.is_zero() if isinstance(x, Cyc) else x == 0
