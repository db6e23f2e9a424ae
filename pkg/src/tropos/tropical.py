"""Tropical hypersurfaces over valued fields and tropical regions over Z."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Callable, Sequence

from .abelian import smith_normal_form, integer_kernel, pair
from .laurent import (
    LaurentPoly,
    UndecidedTorsion,
    coefficient_valuation,
    Valuation,
    ZeroModP,
    field_view,
    is_prime,
    is_unit_over_Z,
    relevant_primes,
    term_values,
    torsion_coefficients,
)
from .polyhedra import EQ, GE, Constraint, Polyhedron
from .sphere import SphericalSet


class Provenance(str, Enum):
    EXACT = "EXACT"
    UPPER_BOUND = "UPPER_BOUND"
    UNKNOWN = "UNKNOWN"

    def __str__(self):
        return self.value


def combine_provenance(*tags: Provenance) -> Provenance:
    if Provenance.UNKNOWN in tags:
        return Provenance.UNKNOWN
    if Provenance.UPPER_BOUND in tags:
        return Provenance.UPPER_BOUND
    return Provenance.EXACT


@dataclass(frozen=True)
class TropicalCell:
    polyhedron: Polyhedron
    tie_set: tuple | None = None
    unit_witness: tuple | None = None

    def contains(self, w) -> bool:
        return self.polyhedron.contains(w)


@dataclass(frozen=True)
class TropicalRegion:
    n: int
    cells: tuple[TropicalCell, ...]
    provenance: Provenance = Provenance.EXACT
    source: str = ""
    diagnostics: tuple[str, ...] = ()
    oracle: Callable | None = field(default=None, compare=False, repr=False)

    def contains(self, w) -> bool:
        """Membership via the cell certificate."""
        return any(c.contains(w) for c in self.cells)

    def membership(self, w) -> bool:
        """Ground-truth membership, recomputed from the defining data when available."""
        return self.oracle(w) if self.oracle else self.contains(w)

    @property
    def polyhedra(self) -> list[Polyhedron]:
        return [c.polyhedron for c in self.cells]

    def is_empty(self) -> bool:
        return all(c.polyhedron.is_empty() for c in self.cells)

    def is_full(self) -> bool:
        return any(not c.polyhedron.constraints for c in self.cells)

    def subset_of_origin(self) -> bool:
        origin = Polyhedron.point((0,) * self.n)
        return all(c.polyhedron.issubset(origin) for c in self.cells)

    def maximal_cells(self) -> list[TropicalCell]:
        out = []
        for i, c in enumerate(self.cells):
            if not any(
                j != i and c.polyhedron.issubset(d.polyhedron)
                and not (d.polyhedron.issubset(c.polyhedron) and j > i)
                for j, d in enumerate(self.cells)
            ):
                out.append(c)
        return out

    def sphere(self) -> SphericalSet:
        return sphere_project(self)

    def with_provenance(self, prov: Provenance) -> "TropicalRegion":
        return TropicalRegion(self.n, self.cells, prov, self.source, self.diagnostics, self.oracle)


def full_region(n: int, source: str, diagnostics=(), provenance=Provenance.EXACT) -> TropicalRegion:
    return TropicalRegion(n, (TropicalCell(Polyhedron.whole(n)),), provenance, source,
                          tuple(diagnostics), lambda w: True)


def empty_region(n: int, source: str, provenance=Provenance.EXACT) -> TropicalRegion:
    return TropicalRegion(n, (), provenance, source, (), lambda w: False)


# ---------------------------------------------------------------------------
# evaluation


def trop_eval(f: LaurentPoly, v: Valuation, w) -> Fraction:
    """``min_u v(a_u) + u.w`` over the support (after any mod-p reduction)."""
    if f.is_zero():
        raise ValueError("tropical evaluation of the zero polynomial")
    return min(x for x, _, _ in term_values(f, v, w))


def _free_support_values(f: LaurentPoly, v: Valuation):
    """``[(free exponent, valuation)]`` for the field rule, refusing ambiguous torsion."""
    g, vv = field_view(f, v)
    if g.group.is_free:
        return [(e, coefficient_valuation(c, vv)) for e, c in g.terms]
    groups = torsion_coefficients(g)
    out = []
    for u, coeffs in groups.items():
        if len(coeffs) > 1:
            raise UndecidedTorsion(
                f"free part {u} of {f} carries several torsion terms; the field tropicalization "
                "depends on roots of unity"
            )
        (c,) = coeffs.values()
        out.append((u, coefficient_valuation(c, vv)))
    return out


def _tie_cells(n: int, data: list[tuple[tuple, int]]) -> list[TropicalCell]:
    """Cells where at least two of the affine functions ``val + u.w`` attain the minimum."""
    cells: dict[tuple, TropicalCell] = {}
    m = len(data)
    for i in range(m):
        ui, vi = data[i]
        for j in range(i + 1, m):
            uj, vj = data[j]
            cons = [Constraint.make([a - b for a, b in zip(ui, uj)], vj - vi, EQ)]
            for k in range(m):
                if k in (i, j):
                    continue
                uk, vk = data[k]
                cons.append(Constraint.make([a - b for a, b in zip(uk, ui)], vi - vk, GE))
            P = Polyhedron(n, cons)
            if P.is_empty():
                continue
            implicit = set(P.implicit_equalities())
            ties = {i, j}
            for k in range(m):
                if k in (i, j):
                    continue
                uk, vk = data[k]
                c = Constraint.make([a - b for a, b in zip(uk, ui)], vi - vk, GE)
                if c in implicit or c.is_trivial():
                    ties.add(k)
            key = tuple(sorted(ties))
            if key not in cells:
                cells[key] = TropicalCell(P, tie_set=tuple(data[t][0] for t in key))
    return [cells[k] for k in sorted(cells)]


def _tie_oracle(data):
    def oracle(w):
        vals = [val + pair(w, u) for u, val in data]
        m = min(vals)
        return sum(1 for x in vals if x == m) >= 2
    return oracle


def trop_hypersurface_field(f: LaurentPoly, v: Valuation) -> TropicalRegion:
    """Tropical hypersurface of ``f`` for the valuation ``v`` (exact)."""
    n = f.group.rank
    source = f"field:{v}"
    if f.is_zero():
        return full_region(n, source, ["zero polynomial: Trop = R^n"])
    try:
        data = _free_support_values(f, v)
    except ZeroModP:
        return full_region(n, source, [f"{f} vanishes mod {v.p}: zero ideal, Trop = R^n"])
    # the valuation of a nonzero coefficient is finite here
    data = [(u, int(val)) for u, val in data]
    return TropicalRegion(n, tuple(_tie_cells(n, data)), Provenance.EXACT, source, (), _tie_oracle(data))


def trop_hypersurface_Z(f: LaurentPoly) -> TropicalRegion:
    """``{w : in_w(f) is not a unit of ZH}`` as tie cells plus unit-failure cells."""
    n = f.group.rank
    if f.p:
        raise ValueError("the Z-tropicalization needs integer coefficients")
    if f.is_zero():
        return full_region(n, "Z", ["zero polynomial: Trop = R^n"])
    groups = torsion_coefficients(f)
    free_parts = sorted(groups)
    G = f.group
    nonunit = []
    for u in free_parts:
        coeff = LaurentPoly(G, {u + t: c for t, c in groups[u].items()})
        if not is_unit_over_Z(coeff):
            nonunit.append(u)
    data = [(u, 0) for u in free_parts]
    cells = _tie_cells(n, data)
    for u in nonunit:
        cons = [Constraint.make([a - b for a, b in zip(k, u)], 0, GE) for k in free_parts if k != u]
        cells.append(TropicalCell(Polyhedron(n, cons), unit_witness=u))
    bad = set(nonunit)

    def oracle(w):
        vals = [pair(w, u) for u in free_parts]
        m = min(vals)
        arg = [u for u, x in zip(free_parts, vals) if x == m]
        return len(arg) >= 2 or arg[0] in bad

    return TropicalRegion(n, tuple(cells), Provenance.EXACT, "Z", (), oracle)


def decomposition_families(f: LaurentPoly) -> list[tuple[str, Valuation]]:
    fams = [("Q,v0", Valuation.trivial())]
    for p in relevant_primes(f):
        fams.append((f"Q,v{p}", Valuation.padic(p)))
        fams.append((f"F{p}", Valuation.modp(p)))
    return fams


def trop_Z_decomposition(f: LaurentPoly) -> list[tuple[str, TropicalRegion]]:
    """The field families whose sphere images cover the Z-tropicalization of ``f``."""
    if f.is_zero():
        raise ValueError("decomposition of the zero polynomial")
    return [(label, trop_hypersurface_field(f, v)) for label, v in decomposition_families(f)]


# ---------------------------------------------------------------------------
# rings and prevarieties


def parse_ring(text: str):
    """``z`` -> ``"z"``; ``q`` -> trivial valuation; ``fp:p`` -> mod-p valuation; or a valuation spec."""
    t = text.strip().lower()
    if t in ("z", "zz", "int"):
        return "z"
    if t in ("q", "qq", "c", "field"):
        return Valuation.trivial()
    if t.startswith("fp:") or t.startswith("f:"):
        p = int(t.split(":", 1)[1])
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        return Valuation.modp(p)
    return Valuation.parse(t)


def hypersurface(f: LaurentPoly, ring) -> TropicalRegion:
    if ring == "z":
        return trop_hypersurface_Z(f)
    return trop_hypersurface_field(f, ring)


def _drop_contained(cells: list[TropicalCell]) -> list[TropicalCell]:
    cells = list({c.polyhedron: c for c in cells}.values())
    cells.sort(key=lambda c: -c.polyhedron.dimension())
    kept: list[TropicalCell] = []
    for c in cells:
        if not any(c.polyhedron.issubset(k.polyhedron) for k in kept):
            kept.append(c)
    return kept


def intersect_regions(regions: Sequence[TropicalRegion], source: str,
                      provenance: Provenance) -> TropicalRegion:
    n = regions[0].n
    # only the point set matters, so maximal cells suffice; small regions first keeps products short
    pieces = sorted((R.maximal_cells() for R in regions), key=len)
    cells = [TropicalCell(Polyhedron.whole(n))]
    for piece in pieces:
        nxt = []
        for a in cells:
            for b in piece:
                P = a.polyhedron.intersect(b.polyhedron)
                if not P.is_empty():
                    nxt.append(TropicalCell(P, a.tie_set or b.tie_set, a.unit_witness or b.unit_witness))
        cells = _drop_contained(nxt)
        if not cells:
            break
    oracles = [R.membership for R in regions]
    diags = tuple(d for R in regions for d in R.diagnostics)
    return TropicalRegion(n, tuple(cells), provenance, source, diags,
                          lambda w: all(o(w) for o in oracles))


def prevariety(generators: Sequence[LaurentPoly], ring="z") -> TropicalRegion:
    """Intersection of the hypersurfaces of the generators.

    Always contains the tropicalization of the ideal.  A single generator is
    the principal case and is tagged EXACT; otherwise the tag is UPPER_BOUND.
    """
    gens = list(generators)
    if not gens:
        raise ValueError("prevariety of an empty generator list")
    if isinstance(ring, str) and ring != "z":
        ring = parse_ring(ring)
    regions = [hypersurface(g, ring) for g in gens]
    prov = Provenance.EXACT if len(gens) == 1 else Provenance.UPPER_BOUND
    tag = "Z" if ring == "z" else f"field:{ring}"
    if len(regions) == 1:
        return regions[0]
    return intersect_regions(regions, f"prevariety:{tag}", prov)


def sphere_project(R: TropicalRegion) -> SphericalSet:
    return SphericalSet.from_polyhedra(R.n, R.polyhedra)


def sphere_union(regions: Sequence[TropicalRegion]) -> SphericalSet:
    n = regions[0].n
    return SphericalSet.from_polyhedra(n, [P for R in regions for P in R.polyhedra])


# ---------------------------------------------------------------------------
# functoriality


def _inverse(M):
    n = len(M)
    A = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(M)]
    for c in range(n):
        piv = next(r for r in range(c, n) if A[r][c])
        A[c], A[piv] = A[piv], A[c]
        pv = A[c][c]
        A[c] = [x / pv for x in A[c]]
        for r in range(n):
            if r != c and A[r][c]:
                f = A[r][c]
                A[r] = [x - f * y for x, y in zip(A[r], A[c])]
    return [row[n:] for row in A]


def check_surjective(psi: Sequence[Sequence[int]]) -> None:
    """``psi`` is an ``n' x n`` integer matrix for ``Z^n -> Z^n'``; raise unless onto."""
    m = len(psi)
    if m == 0:
        return
    _, D, _ = smith_normal_form(psi)
    diag = [D[i][i] for i in range(min(m, len(psi[0])))]
    if len(diag) < m or any(d != 1 for d in diag):
        raise ValueError("psi is not surjective")


def pullback_constraints(psi, cons: Sequence[Constraint]) -> list[Constraint]:
    """Constraints on w in R^n describing ``psi^T(P)`` for ``P`` given by ``cons`` in R^n'."""
    M = [list(map(int, r)) for r in psi]
    m, n = len(M), len(M[0])
    MMt = [[sum(M[i][k] * M[j][k] for k in range(n)) for j in range(m)] for i in range(m)]
    inv = _inverse(MMt)
    L = [[sum(inv[i][k] * M[k][j] for k in range(m)) for j in range(n)] for i in range(m)]
    out = []
    for c in cons:
        a = [sum(Fraction(c.a[i]) * L[i][j] for i in range(m)) for j in range(n)]
        out.append(Constraint.make(a, c.b, c.kind))
    for k in integer_kernel(M, n):
        out.append(Constraint.make(k, 0, EQ))
    return out


def pullback(psi: Sequence[Sequence[int]], R):
    """Image of a region (or sphere set) over H' under ``psi^*: Hom(H';R) -> Hom(H;R)``."""
    check_surjective(psi)
    n = len(psi[0])
    if isinstance(R, TropicalRegion):
        cells = tuple(
            TropicalCell(Polyhedron(n, pullback_constraints(psi, c.polyhedron.constraints)),
                         c.tie_set, c.unit_witness)
            for c in R.cells
        )
        return TropicalRegion(n, cells, R.provenance, f"pullback({R.source})", R.diagnostics)
    if isinstance(R, SphericalSet):
        image = ("cone", tuple(pullback_constraints(psi, [])))

        def walk(e):
            tag = e[0]
            if tag == "true":
                return image
            if tag == "false":
                return e
            if tag == "cone":
                return ("cone", tuple(pullback_constraints(psi, e[1])))
            if tag == "not":
                return ("and", (image, ("not", walk(e[1]))))
            return (tag, tuple(walk(k) for k in e[1]))

        return SphericalSet(n, walk(R.expr))
    raise TypeError("pullback expects a TropicalRegion or SphericalSet")
