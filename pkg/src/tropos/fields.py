"""Small exact fields for evaluating polynomials at characters.

Used by the rank oracles: a character rho: H -> K^* is a tuple of field
elements (one per coordinate of H, torsion coordinates being roots of unity).
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction
from typing import Sequence

from .laurent import LaurentPoly, is_prime


class RationalField:
    char = 0

    zero = Fraction(0)
    one = Fraction(1)

    def __call__(self, x):
        return Fraction(x)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def inv(self, a):
        return 1 / a

    def pow(self, a, k):
        return a ** k

    def random_unit(self, rng: random.Random, avoid_one=False):
        while True:
            x = Fraction(rng.choice([-1, 1]) * rng.randint(1, 40), rng.randint(1, 7))
            if not (avoid_one and x == 1):
                return x

    def __repr__(self):
        return "QQ"


class GF:
    """The finite field with ``p**k`` elements.

    Elements are tuples of ``k`` residues (coefficients of ``1, t, ..., t^{k-1}``)
    modulo a fixed monic irreducible polynomial.
    """

    def __init__(self, p: int, k: int = 1):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.p, self.k = p, k
        self.char = p
        self.order = p ** k
        self.modulus = self._irreducible() if k > 1 else (0, 1)
        self.zero = (0,) * k
        self.one = (1,) + (0,) * (k - 1)

    def _irreducible(self):
        p, k = self.p, self.k
        for tail in itertools.product(range(p), repeat=k):
            if tail[0] == 0:
                continue
            poly = tail + (1,)  # monic, low degree first
            if all(self._has_no_root_factor(poly, d) for d in range(1, k // 2 + 1)):
                return poly
        raise RuntimeError("no irreducible polynomial found")

    def _has_no_root_factor(self, poly, d):
        p = self.p
        for tail in itertools.product(range(p), repeat=d):
            div = tail + (1,)
            if self._poly_rem(poly, div) == (0,) * (len(div) - 1):
                return False
        return True

    def _poly_rem(self, a, b):
        p = self.p
        a = list(a)
        while len(a) >= len(b):
            c = a[-1] % p
            if c:
                s = len(a) - len(b)
                for i, x in enumerate(b):
                    a[s + i] = (a[s + i] - c * x) % p
            a.pop()
        out = tuple(x % p for x in a) + (0,) * (len(b) - 1 - len(a))
        return out[: len(b) - 1]

    def __call__(self, x):
        if isinstance(x, tuple):
            return x
        return ((int(x) % self.p),) + (0,) * (self.k - 1)

    def add(self, a, b):
        return tuple((x + y) % self.p for x, y in zip(a, b))

    def sub(self, a, b):
        return tuple((x - y) % self.p for x, y in zip(a, b))

    def mul(self, a, b):
        p, k = self.p, self.k
        if k == 1:
            return ((a[0] * b[0]) % p,)
        prod = [0] * (2 * k - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    prod[i + j] += x * y
        m = self.modulus
        for d in range(2 * k - 2, k - 1, -1):
            c = prod[d] % p
            if c:
                for i in range(k):
                    prod[d - k + i] -= c * m[i]
            prod[d] = 0
        return tuple(x % p for x in prod[:k])

    def pow(self, a, e):
        if e < 0:
            a, e = self.inv(a), -e
        out = self.one
        while e:
            if e & 1:
                out = self.mul(out, a)
            a = self.mul(a, a)
            e >>= 1
        return out

    def inv(self, a):
        if a == self.zero:
            raise ZeroDivisionError("inverse of zero")
        return self.pow(a, self.order - 2)

    def elements(self):
        return itertools.product(range(self.p), repeat=self.k)

    def random_unit(self, rng: random.Random, avoid_one=False):
        while True:
            x = tuple(rng.randrange(self.p) for _ in range(self.k))
            if x != self.zero and not (avoid_one and x == self.one):
                return x

    def root_of_unity(self, d: int, rng: random.Random):
        """A random element with ``x**d == 1`` (possibly 1 itself)."""
        x = self.random_unit(rng)
        g = _gcd(d, self.order - 1)
        return self.pow(x, (self.order - 1) // g)

    def __repr__(self):
        return f"GF({self.p}^{self.k})" if self.k > 1 else f"GF({self.p})"


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def evaluate(f: LaurentPoly, point: Sequence, K) -> object:
    """Value of ``f`` at the character ``x_i -> point[i]``."""
    total = K.zero
    for e, c in f.terms:
        term = K(c)
        for x, k in zip(point, e):
            if k:
                term = K.mul(term, K.pow(x, k))
        total = K.add(total, term)
    return total


def random_character(group, K, rng: random.Random, support=None):
    """Random point of Hom(H, K^*); free coordinates outside ``support`` are set to 1."""
    pt = []
    for i in range(group.rank):
        if support is None or i in support:
            pt.append(K.random_unit(rng, avoid_one=support is not None))
        else:
            pt.append(K.one)
    for d in group.torsion:
        if isinstance(K, RationalField):
            pt.append(K.one if d % 2 else rng.choice([K.one, K(-1)]))
        else:
            pt.append(K.root_of_unity(d, rng))
    return tuple(pt)


def matrix_rank(M: Sequence[Sequence], K) -> int:
    A = [list(r) for r in M]
    if not A or not A[0]:
        return 0
    rows, cols = len(A), len(A[0])
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if A[i][c] != K.zero), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = K.inv(A[r][c])
        for i in range(rows):
            if i != r and A[i][c] != K.zero:
                f = K.mul(A[i][c], inv)
                A[i] = [K.sub(x, K.mul(f, y)) for x, y in zip(A[i], A[r])]
        r += 1
        if r == rows:
            break
    return r


def evaluate_matrix(M, point, K):
    return [[evaluate(f, point, K) for f in row] for row in M]


def field_for(char: int, group=None, min_size: int = 64):
    """A field of characteristic ``char`` big enough for random sampling.

    For torsion groups in characteristic p the field should contain the
    relevant roots of unity; we grow the degree until ``order - 1`` is
    divisible by the prime-to-p part of every torsion order.
    """
    if char == 0:
        return RationalField()
    k = 1
    need = 1
    if group is not None:
        for d in group.torsion:
            while d % char == 0:
                d //= char
            need = need * d // _gcd(need, d)
    while char ** k < min_size or (char ** k - 1) % need:
        k += 1
        if k > 12:
            break
    return GF(char, k)
