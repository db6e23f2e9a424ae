"""Fox calculus, jump ideals and the tropical upper bound for Sigma^1(G; Z)."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from math import comb
from typing import Iterable, Sequence

from .abelian import Abelianization, FGAbelianGroup, Presentation, Word, abelianize
from .laurent import (
    LaurentPoly,
    UndecidedTorsion,
    exact_divide,
    gcd_many,
    is_unit_over_Z,
    normalize,
    parse_poly,
)
from .polyhedra import UNKNOWN
from .sphere import SphericalSet
from .tropical import (
    Provenance,
    TropicalRegion,
    combine_provenance,
    parse_ring,
    prevariety,
    sphere_project,
    trop_hypersurface_Z,
)

DEFAULT_MINOR_CAP = 100_000


def minor_cap() -> int:
    return int(os.environ.get("TROPOS_MINOR_CAP", DEFAULT_MINOR_CAP))


class MinorCapExceeded(RuntimeError):
    def __init__(self, count, cap):
        super().__init__(f"{count} minors requested, cap is {cap} (set TROPOS_MINOR_CAP or --minor-cap)")
        self.count = count
        self.cap = cap


# ---------------------------------------------------------------------------
# Fox calculus


def fox_derivative(word: Word, j: int, ab: Abelianization) -> LaurentPoly:
    """Abelianized free derivative of ``word`` with respect to generator ``j``."""
    G = ab.group
    if not 0 <= j < len(ab.generator_images):
        raise ValueError(f"unknown generator index {j}")
    prefix = [0] * G.ngens
    terms: dict = {}
    for idx, e in word:
        if not 0 <= idx < len(ab.generator_images):
            raise ValueError(f"unknown generator index {idx}")
        img = ab.generator_images[idx]
        if e == 1:
            if idx == j:
                key = G.normalize(prefix)
                terms[key] = terms.get(key, 0) + 1
            prefix = [a + b for a, b in zip(prefix, img)]
        else:
            prefix = [a - b for a, b in zip(prefix, img)]
            if idx == j:
                key = G.normalize(prefix)
                terms[key] = terms.get(key, 0) - 1
    return LaurentPoly(G, terms)


def fox_matrix(P: Presentation, ab: Abelianization | None = None) -> list[list[LaurentPoly]]:
    """``g x r`` matrix: row ``i`` generator, column ``j`` relator."""
    ab = ab or abelianize(P)
    return [[fox_derivative(r, i, ab) for r in P.relators] for i in range(len(P.generators))]


def generator_units(ab: Abelianization) -> list[LaurentPoly]:
    return [LaurentPoly.monomial(ab.group, img) for img in ab.generator_images]


def fox_identity_holds(P: Presentation, ab: Abelianization | None = None) -> bool:
    """``sum_i (dr/da_i)(a_i - 1) == 0`` for every relator ``r``."""
    ab = ab or abelianize(P)
    F = fox_matrix(P, ab)
    xs = generator_units(ab)
    zero = LaurentPoly(ab.group)
    for j in range(len(P.relators)):
        total = zero
        for i, x in enumerate(xs):
            total = total + F[i][j] * (x - 1)
        if not total.is_zero():
            return False
    return True


# ---------------------------------------------------------------------------
# chain data


@dataclass(frozen=True)
class ChainData:
    """Free ZH chain complex ``C_top -> ... -> C_1 -> C_0``.

    ``boundaries[k]`` is the ``c_k x c_{k+1}`` matrix of ``C_{k+1} -> C_k``
    (columns are the basis of the source).
    """

    group: FGAbelianGroup
    ranks: tuple[int, ...]
    boundaries: tuple[tuple[tuple[LaurentPoly, ...], ...], ...]

    def __post_init__(self):
        if len(self.boundaries) != len(self.ranks) - 1:
            raise ValueError("need one boundary matrix between consecutive ranks")
        for k, M in enumerate(self.boundaries):
            rows, cols = self.ranks[k], self.ranks[k + 1]
            if len(M) != rows or any(len(r) != cols for r in M):
                raise ValueError(f"d{k} should be {rows} x {cols}")

    def rank(self, i: int) -> int:
        return self.ranks[i] if 0 <= i < len(self.ranks) else 0

    def boundary(self, k: int):
        """Matrix of ``C_{k+1} -> C_k``; zero matrices outside the stored range."""
        if 0 <= k < len(self.boundaries):
            return [list(r) for r in self.boundaries[k]]
        zero = LaurentPoly(self.group)
        return [[zero] * self.rank(k + 1) for _ in range(self.rank(k))]

    def composition_vanishes(self) -> bool:
        for k in range(1, len(self.boundaries)):
            A, B = self.boundary(k - 1), self.boundary(k)
            for i in range(len(A)):
                for j in range(len(B[0]) if B else 0):
                    s = LaurentPoly(self.group)
                    for t in range(len(B)):
                        s = s + A[i][t] * B[t][j]
                    if not s.is_zero():
                        return False
        return True


def presentation_complex(P: Presentation, ab: Abelianization | None = None) -> ChainData:
    ab = ab or abelianize(P)
    if not fox_identity_holds(P, ab):
        raise AssertionError("Fox identity failed; presentation data is inconsistent")
    F = fox_matrix(P, ab)
    d0 = (tuple(x - 1 for x in generator_units(ab)),)
    d1 = tuple(tuple(row) for row in F)
    return ChainData(ab.group, (1, len(P.generators), len(P.relators)), (d0, d1))


def parse_chain_data(text: str, transpose: bool = False) -> ChainData:
    """Read ``ranks: c0 c1 ...``, optional ``vars: ...`` and ``dK:`` blocks of ``;``-separated rows."""
    ranks = None
    names = None
    blocks: dict[int, list[list[str]]] = {}
    current = None
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        low = line.lower()
        if low.startswith("ranks:"):
            ranks = tuple(int(x) for x in line.split(":", 1)[1].split())
        elif low.startswith("vars:"):
            names = tuple(line.split(":", 1)[1].split())
        elif low.startswith("d") and low.rstrip(":")[1:].isdigit() and low.endswith(":"):
            current = int(low[1:-1])
            blocks[current] = []
        else:
            if current is None:
                raise ValueError(f"matrix row outside a dK: block: {raw!r}")
            blocks[current].append([s.strip() for s in line.split(";")])
    if ranks is None:
        raise ValueError("chain data needs a 'ranks:' line")
    from .laurent import variable_names

    if names is None:
        names = variable_names([s for rows in blocks.values() for r in rows for s in r])
    G = FGAbelianGroup(len(names), (), names) if names else FGAbelianGroup(1)
    mats = []
    for k in range(len(ranks) - 1):
        rows = blocks.get(k, [])
        M = [[parse_poly(s, G) for s in r] for r in rows]
        if transpose:
            M = [list(c) for c in zip(*M)] if M else []
        if not M:
            M = [[LaurentPoly(G)] * ranks[k + 1] for _ in range(ranks[k])]
        mats.append(tuple(tuple(r) for r in M))
    return ChainData(G, ranks, tuple(mats))


# ---------------------------------------------------------------------------
# minors


def _minors(M, k: int) -> list[LaurentPoly]:
    """All k x k minors by Laplace expansion (division free, memoized)."""
    rows = len(M)
    cols = len(M[0]) if rows else 0
    if k == 0:
        return []
    if k > rows or k > cols:
        return []
    memo: dict = {}

    def det(R: tuple, C: tuple):
        key = (R, C)
        if key in memo:
            return memo[key]
        if len(R) == 1:
            val = M[R[0]][C[0]]
        else:
            val = None
            r0 = R[0]
            for t, c in enumerate(C):
                a = M[r0][c]
                if a.is_zero():
                    continue
                sub = det(R[1:], C[:t] + C[t + 1:])
                if sub.is_zero():
                    continue
                term = a * sub
                if t % 2:
                    term = -term
                val = term if val is None else val + term
            if val is None:
                val = M[R[0]][C[0]] * 0
        memo[key] = val
        return val

    from itertools import combinations

    out = []
    for R in combinations(range(rows), k):
        for C in combinations(range(cols), k):
            out.append(det(R, C))
    return out


def _normalized_set(polys: Iterable[LaurentPoly]) -> list[LaurentPoly]:
    seen = {normalize(f) for f in polys if not f.is_zero()}
    return sorted(seen, key=lambda f: (len(f), f.terms))


def block_diagonal(A, B, group):
    zero = LaurentPoly(group)
    ra, ca = len(A), (len(A[0]) if A else 0)
    rb, cb = len(B), (len(B[0]) if B else 0)
    out = []
    for i in range(ra):
        out.append(list(A[i]) + [zero] * cb)
    for i in range(rb):
        out.append([zero] * ca + list(B[i]))
    return out


def _shape(M, default_cols):
    return len(M), (len(M[0]) if M else default_cols)


def minor_count(C: ChainData, i: int) -> int:
    A, B = C.boundary(i), C.boundary(i - 1)
    c = C.rank(i)
    (p, q), (s, t) = _shape(A, C.rank(i + 1)), _shape(B, C.rank(i))
    return sum(comb(p, k) * comb(q, k) * comb(s, c - k) * comb(t, c - k) for k in range(c + 1))


def jump_matrix(C: ChainData, i: int):
    """The matrix ``d_i (+) d_{i-1}``, read as the block diagonal ``diag(d_i, d_{i-1})``."""
    return block_diagonal(C.boundary(i), C.boundary(i - 1), C.group)


@dataclass(frozen=True)
class JumpIdeal:
    degree: int
    generators: tuple[LaurentPoly, ...]
    group: FGAbelianGroup
    principal_part: LaurentPoly | None = None
    residual: tuple[LaurentPoly, ...] = ()

    @property
    def is_zero(self) -> bool:
        return not self.generators

    @property
    def is_unit(self) -> bool:
        try:
            return any(is_unit_over_Z(f) for f in self.generators)
        except UndecidedTorsion:
            return False


def jump_ideal(C: ChainData, i: int, cap: int | None = None) -> JumpIdeal:
    """Generators of ``I_{c_i}(diag(d_i, d_{i-1}))``: all ``c_i``-minors, normalized."""
    cap = minor_cap() if cap is None else cap
    count = minor_count(C, i)
    if count > cap:
        raise MinorCapExceeded(count, cap)
    c = C.rank(i)
    G = C.group
    A, B = C.boundary(i), C.boundary(i - 1)
    one = LaurentPoly.const(G, 1)
    if c == 0:
        gens = [one]
    else:
        gens = []
        # minors of a block diagonal matrix factor into minors of the blocks
        for k in range(c + 1):
            ma = [one] if k == 0 else _normalized_set(_minors(A, k))
            mb = [one] if c - k == 0 else _normalized_set(_minors(B, c - k))
            gens.extend(x * y for x in ma for y in mb)
        gens = _normalized_set(gens)
    principal = None
    residual: tuple = ()
    if gens and G.is_free:
        principal = gcd_many(gens)
        residual = tuple(_normalized_set(exact_divide(f, principal) for f in gens))
    return JumpIdeal(i, tuple(gens), G, principal, residual)


def jump_ideal_generic(C: ChainData, i: int) -> list[LaurentPoly]:
    """Reference computation: every ``c_i``-minor of the explicit block matrix."""
    M = jump_matrix(C, i)
    c = C.rank(i)
    if c == 0:
        return [LaurentPoly.const(C.group, 1)]
    return _normalized_set(_minors(M, c))


# ---------------------------------------------------------------------------
# the bound


@dataclass
class IdealSphere:
    """S(Trop_Z) for one jump ideal together with how it was obtained."""

    degree: int
    sphere: SphericalSet
    provenance: Provenance
    method: str
    regions: list[TropicalRegion] = field(default_factory=list)


def ideal_sphere(J: JumpIdeal, n: int) -> IdealSphere:
    """S(Trop_Z(J)) using the principal part exactly and the residual by its prevariety."""
    if J.is_zero:
        return IdealSphere(J.degree, SphericalSet.full(n), Provenance.EXACT, "zero ideal")
    try:
        if J.principal_part is not None:
            g = J.principal_part
            parts = [trop_hypersurface_Z(g)]
            S = sphere_project(parts[0])
            prov = Provenance.EXACT
            method = f"principal part {g}"
            res = list(J.residual)
            if res and not any(is_unit_over_Z(f) for f in res):
                R = prevariety(res, "z")
                parts.append(R)
                SR = sphere_project(R)
                covered = SR.issubset(S)
                S = S | SR
                if SR.is_empty() is True:
                    method += "; residual prevariety has empty sphere image"
                elif covered is True:
                    # Trop(J) is Trop(g) union Trop(residual ideal), and the latter adds nothing here
                    method += "; residual prevariety lies inside the principal sphere"
                else:
                    prov = combine_provenance(prov, R.provenance)
                    method += "; residual prevariety"
            else:
                method += "; residual is the unit ideal"
            return IdealSphere(J.degree, S, prov, method, parts)
        R = prevariety(list(J.generators), "z")
        S = sphere_project(R)
        prov = R.provenance
        if S.is_empty() is True:
            prov = Provenance.EXACT
        return IdealSphere(J.degree, S, prov, "prevariety of all generators", [R])
    except UndecidedTorsion as exc:
        return IdealSphere(J.degree, SphericalSet.full(n), Provenance.UNKNOWN, f"undecided: {exc}")


@dataclass
class BoundResult:
    group: FGAbelianGroup
    trop_sphere: SphericalSet
    complement: SphericalSet
    provenance: Provenance
    parts: list[IdealSphere]
    ideals: list[JumpIdeal]

    @property
    def n(self):
        return self.group.rank


def chain_upper_bound(C: ChainData, degree: int = 1, cap: int | None = None) -> BoundResult:
    """``S(Trop_Z(J^{<=k}))`` and its complement, which contains ``Sigma^k``.

    The sphere image of ``J^{<=k}`` is the union of the images of ``J^0..J^k``.
    Provenance UPPER_BOUND means the tropical side may be too large (so the
    complement may be too small); UNKNOWN means a torsion unit question was
    undecided and the tropical side was replaced by the whole sphere.
    """
    n = C.group.rank
    if n == 0:
        raise ValueError("H has rank 0: the character sphere is empty")
    if not 0 <= degree < len(C.ranks):
        raise ValueError(f"degree {degree} is outside the chain complex (top degree {len(C.ranks) - 1})")
    ideals = [jump_ideal(C, i, cap) for i in range(degree + 1)]
    parts = [ideal_sphere(J, n) for J in ideals]
    S = SphericalSet.empty(n).union(*[p.sphere for p in parts])
    prov = combine_provenance(*[p.provenance for p in parts])
    return BoundResult(C.group, S, S.complement(), prov, parts, ideals)


def bnsr_upper_bound(P: Presentation, cap: int | None = None, degree: int = 1) -> BoundResult:
    """Tropical bound for ``Sigma^k(G; Z)`` from a presentation (``k <= 1``)."""
    if degree > 1:
        raise ValueError("a presentation only determines degrees <= 1; supply chain data for higher degrees")
    ab = abelianize(P)
    if ab.group.rank == 0:
        raise ValueError("H has rank 0: the character sphere is empty")
    return chain_upper_bound(presentation_complex(P, ab), degree, cap)


# ---------------------------------------------------------------------------
# fixtures and audits


@dataclass(frozen=True)
class BnsFixture:
    presentation_id: str
    sigma: SphericalSet
    citation: str
    convention: str = "Sigma^1(G;Z)"

    def to_json(self):
        return {
            "presentation": self.presentation_id,
            "citation": self.citation,
            "convention": self.convention,
            "sigma": self.sigma.to_json(),
        }

    @classmethod
    def from_json(cls, d):
        return cls(d["presentation"], SphericalSet.from_json(d["sigma"]), d.get("citation", ""),
                   d.get("convention", "Sigma^1(G;Z)"))


@dataclass(frozen=True)
class AuditReport:
    included: object
    strict: object
    provenance: Provenance

    def to_json(self):
        def tri(x):
            return "UNKNOWN" if x is UNKNOWN else x
        return {"included": tri(self.included), "strict": tri(self.strict), "provenance": str(self.provenance)}


def audit_inclusion(fixture: BnsFixture, complement: SphericalSet,
                    provenance: Provenance = Provenance.EXACT) -> AuditReport:
    """Check ``fixture.sigma`` against a bound complement.

    With an EXACT bound both answers are decided.  With a non-exact bound the
    computed complement may be too small, so a failed inclusion or an equality
    is reported as UNKNOWN.
    """
    if fixture.sigma.n != complement.n:
        raise ValueError("fixture and bound live on spheres of different dimension")
    inc = fixture.sigma.issubset(complement)
    if inc is UNKNOWN:
        return AuditReport(UNKNOWN, UNKNOWN, provenance)
    eq = fixture.sigma.equals(complement) if inc else False
    if provenance == Provenance.EXACT:
        strict = UNKNOWN if eq is UNKNOWN else (inc and not eq)
        return AuditReport(inc, strict, provenance)
    if not inc:
        return AuditReport(UNKNOWN, UNKNOWN, provenance)
    strict = True if eq is False else UNKNOWN
    return AuditReport(True, strict, provenance)


# ---------------------------------------------------------------------------
# Dwyer-Fried


def dwyer_fried_test(ann_generators: Sequence[LaurentPoly], ring="z"):
    """Finite generation over the ring, decided by ``Trop(Ann) subset {0}``.

    Returns True, False or UNKNOWN (an upper-bound region that is not inside {0}).
    """
    gens = list(ann_generators)
    if not gens:
        raise ValueError("need at least one annihilator generator")
    ring = parse_ring(ring) if isinstance(ring, str) else ring
    try:
        R = prevariety(gens, ring)
    except UndecidedTorsion:
        return UNKNOWN
    if R.subset_of_origin():
        return True
    if R.provenance == Provenance.EXACT:
        return False
    return UNKNOWN


def dwyer_fried_region(ann_generators: Sequence[LaurentPoly], ring="z") -> TropicalRegion:
    ring = parse_ring(ring) if isinstance(ring, str) else ring
    return prevariety(list(ann_generators), ring)


def homology_dim(C: ChainData, i: int, point, K) -> int:
    """``dim H_i`` of the complex specialized at the character ``point``."""
    from .fields import evaluate_matrix, matrix_rank

    A, B = C.boundary(i), C.boundary(i - 1)
    ra = matrix_rank(evaluate_matrix(A, point, K), K) if A and A[0] else 0
    rb = matrix_rank(evaluate_matrix(B, point, K), K) if B and B[0] else 0
    return C.rank(i) - ra - rb


def rank_deficient(C: ChainData, i: int, point, K) -> bool:
    """``rank d_i(rho) + rank d_{i-1}(rho) < c_i`` at the character ``point``."""
    return homology_dim(C, i, point, K) > 0


def relator_for_polynomial(f: LaurentPoly) -> Word:
    """A relator in ``a, b`` whose abelianized Fox column is ``(f (x2 - 1), -f (x1 - 1))``.

    Each term ``c x^u`` contributes ``(a^u1 b^u2 [b, a] b^-u2 a^-u1)^c``.
    """
    from .abelian import commutator, free_reduce, power

    if f.group.rank != 2 or not f.group.is_free:
        raise ValueError("need a polynomial in two variables")
    comm = commutator(((1, 1),), ((0, 1),))
    word: list = []
    for (u1, u2), c in f.terms:
        conj = power(((0, 1),), u1) + power(((1, 1),), u2)
        piece = conj + comm + power(((1, 1),), -u2) + power(((0, 1),), -u1)
        word += power(free_reduce(piece), c)
    return free_reduce(word)


def augmentation_type(polys: Sequence[LaurentPoly]) -> bool:
    """Sufficient test for ``sqrt(polys) = (x_1 - 1, ..., x_n - 1)`` in a free ``ZH``.

    Every generator must have augmentation zero, and each ``x_i - 1`` must have
    a power among the (normalized) generators.
    """
    polys = [normalize(f) for f in polys if not f.is_zero()]
    if not polys:
        return False
    G = polys[0].group
    if not G.is_free or any(sum(f.coefficients) != 0 for f in polys):
        return False
    for i in range(G.rank):
        base = LaurentPoly.monomial(G, [int(j == i) for j in range(G.rank)]) - 1
        powers = set()
        acc = base
        for _ in range(max(len(f.terms) for f in polys)):
            powers.add(normalize(acc))
            acc = acc * base
        if not powers & set(polys):
            return False
    return True
