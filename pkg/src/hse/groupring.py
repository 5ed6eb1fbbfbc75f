"""Finite abelian groups, their group rings and characters."""

from __future__ import annotations

import itertools
from fractions import Fraction
from functools import cached_property
from math import gcd, lcm, prod

from .cyclotomic import Cyc, is_zero, scalar_galois, simplify


class StructuralError(ValueError):
    """Raised on mismatched groups, unstable rank data and similar misuse."""


class FiniteAbelianGroup:
    """G = Z/n_1 x ... x Z/n_k with n_1 | n_2 | ... | n_k.

    Elements are residue tuples, ordered mixed-radix lexicographically so
    that the identity has index 0.
    """

    def __init__(self, invariant_factors=()):
        inv = tuple(int(n) for n in invariant_factors)
        for n in inv:
            if n < 2:
                raise StructuralError("invariant factors must be >= 2, got %r" % (inv,))
        for a, b in zip(inv, inv[1:]):
            if b % a:
                raise StructuralError("invariant factors must divide each other: %r" % (inv,))
        self.invariant_factors = inv
        self.order = prod(inv)
        self.exponent = inv[-1] if inv else 1
        self.elements = tuple(itertools.product(*(range(n) for n in inv)))
        self._index = {g: i for i, g in enumerate(self.elements)}

    def __eq__(self, other):
        return isinstance(other, FiniteAbelianGroup) and self.invariant_factors == other.invariant_factors

    def __hash__(self):
        return hash(self.invariant_factors)

    def __repr__(self):
        if not self.invariant_factors:
            return "G(1)"
        return "G(" + " x ".join("Z/%d" % n for n in self.invariant_factors) + ")"

    def index(self, g):
        return self._index[tuple(g)]

    def mul(self, g, h):
        return tuple((a + b) % n for a, b, n in zip(g, h, self.invariant_factors))

    def inv(self, g):
        return tuple((-a) % n for a, n in zip(g, self.invariant_factors))

    def power(self, g, k):
        return tuple((a * k) % n for a, n in zip(g, self.invariant_factors))

    def identity(self):
        return tuple(0 for _ in self.invariant_factors)

    def generators(self):
        """The standard generators (one per invariant factor)."""
        out = []
        for i in range(len(self.invariant_factors)):
            g = [0] * len(self.invariant_factors)
            g[i] = 1
            out.append(tuple(g))
        return out

    def element_order(self, g):
        o = 1
        for a, n in zip(g, self.invariant_factors):
            o = lcm(o, n // gcd(a, n))
        return o

    @cached_property
    def mul_index(self):
        """mul_index[i][j] = index of g_i * g_j."""
        els = self.elements
        return tuple(tuple(self._index[self.mul(g, h)] for h in els) for g in els)

    @cached_property
    def inv_index(self):
        return tuple(self._index[self.inv(g)] for g in self.elements)

    def subgroup_elements(self, gens):
        """Elements of the subgroup generated by gens, in group order."""
        seen = {self.identity()}
        frontier = [self.identity()]
        gens = [tuple(g) for g in gens]
        for g in gens:
            if len(g) != len(self.invariant_factors):
                raise StructuralError("generator %r does not lie in %r" % (g, self))
        while frontier:
            new = []
            for x in frontier:
                for g in gens:
                    y = self.mul(x, g)
                    if y not in seen:
                        seen.add(y)
                        new.append(y)
            frontier = new
        return sorted(seen, key=self.index)

    def all_subgroups(self):
        """Every subgroup, as sorted element tuples (deduplicated)."""
        subs = set()
        els = self.elements
        for r in range(0, 3):
            for gens in itertools.combinations(els, r):
                subs.add(tuple(self.subgroup_elements(gens)))
        return sorted(subs, key=lambda s: (len(s), [self.index(g) for g in s]))

    # characters -----------------------------------------------------

    def character_value(self, c, g):
        """chi_c(g) as an exponent of zeta_e."""
        e = self.exponent
        return sum(ci * gi * (e // n) for ci, gi, n in zip(c, g, self.invariant_factors)) % e

    @cached_property
    def character_table(self):
        """table[c][g] = exponent k with chi_c(g) = zeta_e^k."""
        return tuple(tuple(self.character_value(c, g) for g in self.elements) for c in self.elements)

    def zeta_power(self, k):
        e = self.exponent
        k %= e
        if e <= 2:
            return 1 if k == 0 else -1
        return Cyc.zeta(e, k)

    @cached_property
    def character_values(self):
        return tuple(tuple(self.zeta_power(k) for k in row) for row in self.character_table)

    def galois_units(self):
        e = self.exponent
        return [a for a in range(1, max(e, 2)) if gcd(a, e) == 1] if e > 1 else [1]

    def character_power(self, c, a):
        """Index of chi_c^a (characters are indexed like elements)."""
        return self._index[self.power(c, a)]

    @cached_property
    def galois_orbits(self):
        seen = set()
        orbits = []
        for i, c in enumerate(self.elements):
            if i in seen:
                continue
            orb = sorted({self.character_power(c, a) for a in self.galois_units()})
            seen.update(orb)
            orbits.append(tuple(orb))
        return tuple(orbits)

    def character_order(self, c):
        return self.element_order(c)


class GroupRingElement:
    """An element of K[G] for K = Z, Q or Q(zeta_e), stored densely."""

    __slots__ = ("group", "coeffs")

    def __init__(self, group, coeffs):
        coeffs = tuple(coeffs)
        if len(coeffs) != group.order:
            raise StructuralError("coefficient vector has length %d, expected %d" % (len(coeffs), group.order))
        self.group = group
        self.coeffs = coeffs

    @classmethod
    def zero(cls, group):
        return cls(group, (0,) * group.order)

    @classmethod
    def one(cls, group):
        return cls.scalar(group, 1)

    @classmethod
    def scalar(cls, group, s):
        return cls(group, (s,) + (0,) * (group.order - 1))

    @classmethod
    def basis(cls, group, g):
        c = [0] * group.order
        c[group.index(g)] = 1
        return cls(group, c)

    @classmethod
    def from_terms(cls, group, terms):
        """terms: iterable of (element tuple, scalar)."""
        c = [0] * group.order
        for g, s in terms:
            c[group.index(g)] += s
        return cls(group, c)

    def _check(self, other):
        if not isinstance(other, GroupRingElement):
            return GroupRingElement.scalar(self.group, other)
        if other.group != self.group:
            raise StructuralError("group mismatch: %r vs %r" % (self.group, other.group))
        return other

    def __add__(self, other):
        o = self._check(other)
        return GroupRingElement(self.group, (a + b for a, b in zip(self.coeffs, o.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return GroupRingElement(self.group, (-a for a in self.coeffs))

    def __sub__(self, other):
        o = self._check(other)
        return GroupRingElement(self.group, (a - b for a, b in zip(self.coeffs, o.coeffs)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, GroupRingElement):
            return GroupRingElement(self.group, (a * other for a in self.coeffs))
        o = self._check(other)
        mi = self.group.mul_index
        out = [0] * self.group.order
        for i, a in enumerate(self.coeffs):
            if is_zero(a):
                continue
            row = mi[i]
            for j, b in enumerate(o.coeffs):
                if not is_zero(b):
                    out[row[j]] += a * b
        return GroupRingElement(self.group, out)

    def __rmul__(self, other):
        return GroupRingElement(self.group, (other * a for a in self.coeffs))

    def __truediv__(self, s):
        return GroupRingElement(self.group, (Fraction(a) / s if isinstance(a, int) else a / s for a in self.coeffs))

    def __pow__(self, k):
        out = GroupRingElement.one(self.group)
        for _ in range(k):
            out = out * self
        return out

    def involution(self):
        """x -> x#, inverting group elements."""
        inv = self.group.inv_index
        out = [0] * self.group.order
        for i, a in enumerate(self.coeffs):
            out[inv[i]] = a
        return GroupRingElement(self.group, out)

    def augmentation(self):
        return sum(self.coeffs, 0)

    def shift(self, g):
        """g * self."""
        i = self.group.index(g)
        row = self.group.mul_index[i]
        out = [0] * self.group.order
        for j, a in enumerate(self.coeffs):
            out[row[j]] = a
        return GroupRingElement(self.group, out)

    def is_zero(self):
        return all(is_zero(a) for a in self.coeffs)

    def is_integral(self):
        for a in self.coeffs:
            a = simplify(a)
            if isinstance(a, Cyc) or Fraction(a).denominator != 1:
                return False
        return True

    def simplified(self):
        out = []
        for a in self.coeffs:
            a = simplify(a)
            if isinstance(a, Fraction) and a.denominator == 1:
                a = int(a)
            out.append(a)
        return GroupRingElement(self.group, out)

    def int_vector(self):
        s = self.simplified()
        if not s.is_integral():
            raise ValueError("element is not integral: %r" % (self,))
        return [int(a) for a in s.coeffs]

    def rational_vector(self):
        return [Fraction(simplify(a)) for a in self.coeffs]

    def __eq__(self, other):
        if not isinstance(other, GroupRingElement):
            try:
                other = self._check(other)
            except Exception:
                return NotImplemented
        if other.group != self.group:
            return False
        return all(is_zero(a - b) for a, b in zip(self.coeffs, other.coeffs))

    def __hash__(self):
        return hash((self.group, tuple(simplify(a) for a in self.coeffs)))

    def __repr__(self):
        terms = []
        for g, a in zip(self.group.elements, self.coeffs):
            a = simplify(a)
            if is_zero(a):
                continue
            if not any(g):
                terms.append(str(a))
            else:
                label = "g" + "".join(str(x) for x in g)
                terms.append("%s*%s" % (a, label) if a != 1 else label)
        return " + ".join(terms) if terms else "0"


# characters and the Fourier transform --------------------------------

def character_eval(x, c_index):
    """chi(x) for the character with index c_index."""
    G = x.group
    vals = G.character_values[c_index]
    s = 0
    for a, v in zip(x.coeffs, vals):
        if not is_zero(a):
            s = s + a * v
    return simplify(s) if not isinstance(s, int) else s


def char_coords(x):
    """Vector (chi(x))_chi indexed like the group elements."""
    return [character_eval(x, i) for i in range(x.group.order)]


def from_char_coords(group, coords):
    """Inverse transform: x_g = |G|^-1 sum_chi chi(g^-1) x_chi."""
    n = group.order
    vals = group.character_values
    inv = group.inv_index
    out = []
    for gi in range(n):
        s = 0
        for ci in range(n):
            xc = coords[ci]
            if not is_zero(xc):
                s = s + vals[ci][inv[gi]] * xc
        s = simplify(s)
        if isinstance(s, int):
            s = Fraction(s)
        out.append(s / n if not isinstance(s, Cyc) else s / n)
    return GroupRingElement(group, out).simplified()


def is_galois_equivariant(group, coords):
    for a in group.galois_units():
        for ci in range(group.order):
            target = coords[group.character_power(group.elements[ci], a)]
            if not is_zero(scalar_galois(coords[ci], a) - target):
                return False
    return True


def _is_algebraic_integer(x):
    x = simplify(x)
    if isinstance(x, Cyc):
        return x.is_integral()
    return Fraction(x).denominator == 1


def integrality_test(group, coords):
    """Character-coordinate criterion for membership in Z[G].

    x lies in Z[G] iff every x_rho is integral, the family is Galois
    equivariant and sum_rho rho(gamma^-1) x_rho is divisible by |G| for
    every gamma.
    """
    if len(coords) != group.order:
        raise StructuralError("expected %d character coordinates" % group.order)
    if not all(_is_algebraic_integer(x) for x in coords):
        return False
    if not is_galois_equivariant(group, coords):
        return False
    vals = group.character_values
    inv = group.inv_index
    n = group.order
    for gi in range(n):
        s = 0
        for ci in range(n):
            s = s + vals[ci][inv[gi]] * coords[ci]
        s = simplify(s)
        if isinstance(s, Cyc):
            return False
        if Fraction(s) % n != 0:
            return False
    return True


def character_idempotent(group, c_index):
    """e_chi = |G|^-1 sum_g chi(g^-1) g, over Q(zeta_e)."""
    coords = [0] * group.order
    coords[c_index] = 1
    return from_char_coords(group, coords)


def idempotent_for(group, chars):
    """Sum of e_chi over a Galois-stable set of character indices (a rational element)."""
    chars = set(chars)
    coords = [1 if i in chars else 0 for i in range(group.order)]
    return from_char_coords(group, coords)


def check_rank_map(group, ranks):
    for orb in group.galois_orbits:
        if len({ranks[i] for i in orb}) != 1:
            raise StructuralError("rank map is not constant on the Galois orbit %r" % (orb,))


def minimal_denominator(x):
    d = 1
    for a in x.coeffs:
        d = lcm(d, Fraction(simplify(a)).denominator)
    return d


def idempotent_from_rank_classes(group, ranks, a):
    """Return (e_a, e_(a), N_a) for the rank map chi -> r_chi."""
    ranks = list(ranks)
    check_rank_map(group, ranks)
    ea = idempotent_for(group, [i for i, r in enumerate(ranks) if r == a])
    e_ge = idempotent_for(group, [i for i, r in enumerate(ranks) if r >= a])
    return ea, e_ge, minimal_denominator(e_ge)


def regular_matrix(x):
    """Integer (or rational) matrix R with vec(y) R = vec(y * x)."""
    G = x.group
    n = G.order
    mi = G.mul_index
    R = [[0] * n for _ in range(n)]
    for h in range(n):
        row = mi[h]
        for g, a in enumerate(x.coeffs):
            if not is_zero(a):
                R[h][row[g]] = a
    return R


def gr_det(matrix, group):
    """Determinant of a square matrix over a commutative group ring (Laplace expansion)."""
    n = len(matrix)
    if n == 0:
        return GroupRingElement.one(group)
    memo = {}

    def minor(cols, row):
        # determinant of rows row..n-1 with the given sorted column tuple
        if row == n:
            return GroupRingElement.one(group)
        key = (cols, row)
        if key in memo:
            return memo[key]
        total = GroupRingElement.zero(group)
        for k, c in enumerate(cols):
            entry = matrix[row][c]
            if entry.is_zero():
                continue
            sub = minor(cols[:k] + cols[k + 1:], row + 1)
            term = entry * sub
            total = total - term if k % 2 else total + term
        memo[key] = total
        return total

    return minor(tuple(range(n)), 0)
