"""Finitely generated abelian groups, characters and abelianization.

Group elements are plain integer tuples ``(free_1, ..., free_n, tors_1, ..., tors_m)``
with every torsion entry reduced into ``[0, d_i)``.  Characters are tuples of
:class:`fractions.Fraction` of length ``n``; they never see the torsion part.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

GroupElement = tuple[int, ...]
Character = tuple[Fraction, ...]
Word = tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class FGAbelianGroup:
    """``Z^rank + Z/d_1 + ... + Z/d_m`` with ``d_1 | d_2 | ... | d_m``."""

    rank: int
    torsion: tuple[int, ...] = ()
    labels: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if self.rank < 0:
            raise ValueError("rank must be non-negative")
        for i, d in enumerate(self.torsion):
            if d < 2:
                raise ValueError(f"torsion order {d} < 2")
            if i and d % self.torsion[i - 1]:
                raise ValueError(f"torsion orders {self.torsion} are not a divisibility chain")
        if not self.labels:
            object.__setattr__(self, "labels", default_labels(self.rank, len(self.torsion)))
        elif len(self.labels) != self.ngens:
            raise ValueError("one label per coordinate required")

    @classmethod
    def free(cls, n: int, labels: Sequence[str] = ()) -> "FGAbelianGroup":
        return cls(n, (), tuple(labels))

    @property
    def ngens(self) -> int:
        return self.rank + len(self.torsion)

    @property
    def is_free(self) -> bool:
        return not self.torsion

    def identity(self) -> GroupElement:
        return (0,) * self.ngens

    def element(self, free: Sequence[int], torsion: Sequence[int] = ()) -> GroupElement:
        if len(free) != self.rank or len(torsion) != len(self.torsion):
            raise ValueError("coordinate count does not match the group")
        return tuple(free) + tuple(t % d for t, d in zip(torsion, self.torsion))

    def normalize(self, h: Sequence[int]) -> GroupElement:
        if not self.torsion:
            return tuple(h)
        n = self.rank
        return tuple(h[:n]) + tuple(h[n + i] % d for i, d in enumerate(self.torsion))

    def split(self, h: GroupElement) -> tuple[GroupElement, GroupElement]:
        return h[: self.rank], h[self.rank:]

    def add(self, g: GroupElement, h: GroupElement) -> GroupElement:
        return self.normalize([a + b for a, b in zip(g, h)])

    def scale(self, k: int, h: GroupElement) -> GroupElement:
        return self.normalize([k * a for a in h])

    def __str__(self):
        parts = ["Z^%d" % self.rank] if self.rank else []
        parts += ["Z/%d" % d for d in self.torsion]
        return " + ".join(parts) or "0"


def default_labels(rank: int, ntors: int) -> tuple[str, ...]:
    if rank == 1:
        free = ("x",)
    else:
        free = tuple(f"x{i + 1}" for i in range(rank))
    if ntors == 1:
        tors = ("y",)
    else:
        tors = tuple(f"y{i + 1}" for i in range(ntors))
    return free + tors


def character(*coords) -> Character:
    return tuple(Fraction(c) for c in coords)


def pair(chi: Sequence, h: Sequence[int]) -> Fraction:
    """Evaluate a character on a group element (torsion coordinates ignored)."""
    if len(h) < len(chi):
        raise ValueError(f"character of length {len(chi)} cannot pair with element of length {len(h)}")
    return sum((Fraction(c) * u for c, u in zip(chi, h)), Fraction(0))


def sphere_normalize(chi: Sequence) -> tuple[int, ...]:
    """Primitive integer representative of the ray through a nonzero character."""
    fr = [Fraction(c) for c in chi]
    if not any(fr):
        raise ValueError("the zero character has no direction")
    den = 1
    for c in fr:
        den = den * c.denominator // gcd(den, c.denominator)
    ints = [int(c * den) for c in fr]
    g = 0
    for v in ints:
        g = gcd(g, v)
    return tuple(v // g for v in ints)


# ---------------------------------------------------------------------------
# Smith normal form


def _identity(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def smith_normal_form(M: Sequence[Sequence[int]]):
    """Return ``(U, D, V)`` with ``U*M*V == D``, ``U`` and ``V`` unimodular.

    ``D`` is diagonal with nonnegative entries forming a divisibility chain
    (nonzero entries first, zeros last).
    """
    A = [list(map(int, row)) for row in M]
    m = len(A)
    n = len(A[0]) if m else 0
    U = _identity(m)
    V = _identity(n)

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, k):
        if k:
            A[dst] = [a + k * b for a, b in zip(A[dst], A[src])]
            U[dst] = [a + k * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, k):
        if k:
            for row in A:
                row[dst] += k * row[src]
            for row in V:
                row[dst] += k * row[src]

    for t in range(min(m, n)):
        while True:
            best = None
            for i in range(t, m):
                for j in range(t, n):
                    if A[i][j] and (best is None or abs(A[i][j]) < abs(A[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                return U, A, V
            swap_rows(t, best[0])
            swap_cols(t, best[1])
            p = A[t][t]
            clean = True
            for i in range(t + 1, m):
                add_row(i, t, -(A[i][t] // p))
                clean &= A[i][t] == 0
            for j in range(t + 1, n):
                add_col(j, t, -(A[t][j] // p))
                clean &= A[t][j] == 0
            if not clean:
                continue
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % p),
                None,
            )
            if bad is not None:
                add_row(t, bad, 1)
                continue
            break
        if A[t][t] < 0:
            A[t] = [-a for a in A[t]]
            U[t] = [-a for a in U[t]]
    return U, A, V


def matmul(A, B):
    if not A:
        return []
    cols = len(B[0]) if B else 0
    return [[sum(a * B[k][j] for k, a in enumerate(row)) for j in range(cols)] for row in A]


def determinant(M) -> Fraction:
    """Exact determinant by rational Gaussian elimination."""
    A = [[Fraction(x) for x in row] for row in M]
    n = len(A)
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if A[r][c]), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            A[c], A[piv] = A[piv], A[c]
            det = -det
        det *= A[c][c]
        for r in range(c + 1, n):
            f = A[r][c] / A[c][c]
            if f:
                A[r] = [a - f * b for a, b in zip(A[r], A[c])]
    return det


def integer_kernel(M: Sequence[Sequence[int]], ncols: int | None = None) -> list[tuple[int, ...]]:
    """Basis of the integer kernel ``{k : M k = 0}`` (as columns of ``V``)."""
    n = ncols if ncols is not None else (len(M[0]) if M else 0)
    if not M:
        return [tuple(int(i == j) for i in range(n)) for j in range(n)]
    _, D, V = smith_normal_form(M)
    r = sum(1 for i in range(min(len(D), n)) if D[i][i])
    return [tuple(V[i][j] for i in range(n)) for j in range(r, n)]


def _column_hermite(G: list[list[int]], n: int) -> list[list[int]]:
    """Unimodular ``T`` putting ``G*T`` in column echelon form with positive pivots."""
    G = [row[:] for row in G]
    T = _identity(n)

    def add_col(dst, src, k):
        if k:
            for row in G:
                row[dst] += k * row[src]
            for row in T:
                row[dst] += k * row[src]

    def swap(i, j):
        for row in G:
            row[i], row[j] = row[j], row[i]
        for row in T:
            row[i], row[j] = row[j], row[i]

    c = 0
    for row in G:
        if c == n:
            break
        while True:
            nz = [j for j in range(c, n) if row[j]]
            if not nz:
                break
            j = min(nz, key=lambda j: abs(row[j]))
            swap(c, j)
            for k in range(c + 1, n):
                add_col(k, c, -(row[k] // row[c]))
            if all(row[k] == 0 for k in range(c + 1, n)):
                break
        if row[c] == 0:
            continue
        if row[c] < 0:
            for r in G:
                r[c] = -r[c]
            for r in T:
                r[c] = -r[c]
        for k in range(c):
            add_col(k, c, -(row[k] // row[c]))
        c += 1
    return T


# ---------------------------------------------------------------------------
# Presentations


@dataclass(frozen=True)
class Presentation:
    generators: tuple[str, ...]
    relators: tuple[Word, ...] = ()
    name: str = ""

    def __post_init__(self):
        g = len(self.generators)
        if len(set(self.generators)) != g:
            raise ValueError("duplicate generator names")
        for rel in self.relators:
            for idx, e in rel:
                if not 0 <= idx < g:
                    raise ValueError(f"generator index {idx} out of range")
                if e not in (1, -1):
                    raise ValueError("word letters carry exponent +1 or -1")

    def word_to_str(self, word: Word) -> str:
        if not word:
            return "1"
        return " ".join(self.generators[i] + ("" if e == 1 else "^-1") for i, e in word)

    def __str__(self):
        lines = ["gens: " + " ".join(self.generators)]
        lines += ["rel: " + self.word_to_str(r) for r in self.relators]
        return "\n".join(lines)


def free_reduce(word: Iterable[tuple[int, int]]) -> Word:
    out: list[tuple[int, int]] = []
    for letter in word:
        if out and out[-1][0] == letter[0] and out[-1][1] == -letter[1]:
            out.pop()
        else:
            out.append(letter)
    return tuple(out)


def invert(word: Word) -> Word:
    return tuple((i, -e) for i, e in reversed(word))


def power(word: Word, k: int) -> Word:
    base = word if k >= 0 else invert(word)
    return tuple(base * abs(k))


def commutator(a: Word, b: Word) -> Word:
    """``[a, b] = a b a^-1 b^-1``."""
    return a + b + invert(a) + invert(b)


_TOKEN = re.compile(r"\[\s*([^,\]\s]+)\s*,\s*([^,\]\s]+)\s*\](?:\^(-?\d+))?|([A-Za-z_][\w]*)(?:\^(-?\d+))?")


def parse_word(text: str, generators: Sequence[str]) -> Word:
    """Parse ``a b a^-1 b^-2`` or ``[a,b]^3`` into a word over ``generators``."""
    index = {g: i for i, g in enumerate(generators)}

    def letter(name):
        if name not in index:
            raise ValueError(f"unknown generator {name!r}")
        return ((index[name], 1),)

    text = text.replace("*", " ").strip()
    if text in ("", "1"):
        return ()
    word: list[tuple[int, int]] = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m:
            raise ValueError(f"cannot parse word at position {pos}: {text[pos:]!r}")
        if m.group(4):
            k = int(m.group(5) or 1)
            word += power(letter(m.group(4)), k)
        else:
            k = int(m.group(3) or 1)
            word += power(commutator(letter(m.group(1)), letter(m.group(2))), k)
        pos = m.end()
    return tuple(word)


def parse_presentation(text: str, name: str = "") -> Presentation:
    """Read the ``gens:`` / ``rel:`` text format (``#`` starts a comment)."""
    gens: list[str] | None = None
    rels: list[str] = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, rest = line.partition(":")
        key = key.strip().lower()
        if key in ("gens", "generators"):
            gens = rest.split()
        elif key in ("rel", "relator", "relation"):
            rels.append(rest)
        elif key == "name":
            name = name or rest.strip()
        else:
            raise ValueError(f"unrecognized line: {raw!r}")
    if gens is None:
        raise ValueError("presentation has no 'gens:' line")
    return Presentation(tuple(gens), tuple(parse_word(r, gens) for r in rels), name)


# ---------------------------------------------------------------------------
# Abelianization


@dataclass(frozen=True)
class Abelianization:
    group: FGAbelianGroup
    generator_images: tuple[GroupElement, ...]

    def word_image(self, word: Iterable[tuple[int, int]]) -> GroupElement:
        acc = [0] * self.group.ngens
        for idx, e in word:
            for k, v in enumerate(self.generator_images[idx]):
                acc[k] += e * v
        return self.group.normalize(acc)

    def __iter__(self):
        # allows ``H, ab = abelianize(P)``
        yield self.group
        yield self


def exponent_sum_matrix(P: Presentation) -> list[list[int]]:
    M = []
    for rel in P.relators:
        row = [0] * len(P.generators)
        for idx, e in rel:
            row[idx] += e
        M.append(row)
    return M


def abelianize(P: Presentation) -> Abelianization:
    """Abelianization ``H = Z^g / <relator exponent sums>`` in invariant-factor form.

    The free coordinates are put in column-Hermite form relative to the
    generator images, so a generator that already maps to a basis vector keeps
    a positive coordinate.
    """
    g = len(P.generators)
    M = exponent_sum_matrix(P)
    if M:
        _, D, V = smith_normal_form(M)
        diag = [D[i][i] if i < len(D) else 0 for i in range(g)]
    else:
        V = _identity(g)
        diag = [0] * g
    tors_idx = [i for i in range(g) if diag[i] >= 2]
    free_idx = [i for i in range(g) if diag[i] == 0]
    torsion = tuple(diag[i] for i in tors_idx)
    free_rows = [[V[j][i] for i in free_idx] for j in range(g)]
    n = len(free_idx)
    T = _column_hermite(free_rows, n) if n else []
    free_rows = matmul(free_rows, T) if n else [[] for _ in range(g)]
    H = FGAbelianGroup(n, torsion)
    images = tuple(
        H.normalize(list(free_rows[j]) + [V[j][i] for i in tors_idx]) for j in range(g)
    )
    return Abelianization(H, images)
