"""Exact rational polyhedra and boolean combinations of linear constraints.

A constraint ``(a, b, kind)`` reads ``a.w == b``, ``a.w >= b`` or ``a.w > b``.
Everything is decided by Fourier-Motzkin elimination over the integers, which
is plenty for the handful of variables and constraints that tropical cells use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

EQ, GE, GT = "eq", "ge", "gt"


class _Unknown:
    """Third truth value for questions a bounded search could not settle."""

    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __bool__(self):
        raise TypeError("UNKNOWN has no truth value; compare with `is UNKNOWN`")

    def __repr__(self):
        return "UNKNOWN"

    __str__ = __repr__


UNKNOWN = _Unknown()


def _to_ints(vals):
    if all(isinstance(v, int) for v in vals):
        return list(vals)
    fr = [Fraction(v) for v in vals]
    den = 1
    for v in fr:
        den = den * v.denominator // gcd(den, v.denominator)
    return [int(v * den) for v in fr]


@dataclass(frozen=True, order=True)
class Constraint:
    a: tuple[int, ...]
    b: int
    kind: str = GE

    @classmethod
    def make(cls, a: Sequence, b=0, kind: str = GE) -> "Constraint":
        """Scale to coprime integers; equalities get a canonical sign."""
        if kind not in (EQ, GE, GT):
            raise ValueError(f"unknown constraint kind {kind!r}")
        ints = _to_ints(list(a) + [b])
        g = 0
        for v in ints:
            g = gcd(g, v)
        if g > 1:
            ints = [v // g for v in ints]
        if kind == EQ:
            lead = next((v for v in ints if v), 0)
            if lead < 0:
                ints = [-v for v in ints]
        return cls(tuple(ints[:-1]), ints[-1], kind)

    def value(self, w):
        return sum(x * y for x, y in zip(self.a, w))

    def holds(self, w) -> bool:
        v = self.value(w)
        if self.kind == EQ:
            return v == self.b
        return v >= self.b if self.kind == GE else v > self.b

    def is_trivial(self) -> bool:
        return not any(self.a)

    def trivially_true(self) -> bool:
        if self.kind == EQ:
            return self.b == 0
        return 0 >= self.b if self.kind == GE else 0 > self.b

    def negations(self) -> list["Constraint"]:
        """Constraints whose union is the complement of this one."""
        neg = tuple(-x for x in self.a)
        if self.kind == GE:
            return [Constraint(neg, -self.b, GT)]
        if self.kind == GT:
            return [Constraint(neg, -self.b, GE)]
        return [Constraint(self.a, self.b, GT), Constraint(neg, -self.b, GT)]

    def relaxed(self) -> "Constraint":
        return Constraint(self.a, self.b, GE) if self.kind == GT else self

    def __str__(self):
        terms = " + ".join(f"{c}*w{i + 1}" for i, c in enumerate(self.a) if c) or "0"
        op = {EQ: "==", GE: ">=", GT: ">"}[self.kind]
        return f"{terms} {op} {self.b}"


# ---------------------------------------------------------------------------
# Fourier-Motzkin


def _substitute_equalities(cons, keep=None):
    """Use equalities to eliminate variables; returns (remaining, ok).

    ``keep`` (a set of variable indices) restricts which variables may be
    eliminated; equalities only involving kept variables stay in the output.
    """
    cons = list(cons)
    while True:
        eq = None
        for c in cons:
            if c.kind == EQ and not c.is_trivial():
                ks = [i for i, x in enumerate(c.a) if x and (keep is None or i not in keep)]
                if ks:
                    eq, k = c, ks[0]
                    break
        if eq is None:
            break
        ak = eq.a[k]
        s = 1 if ak > 0 else -1
        out = []
        for c in cons:
            if c is eq:
                continue
            ck = c.a[k]
            if ck == 0:
                out.append(c)
                continue
            a = [s * (ak * x - ck * y) for x, y in zip(c.a, eq.a)]
            b = s * (ak * c.b - ck * eq.b)
            out.append(Constraint.make(a, b, c.kind))
        cons = out
    out = []
    for c in dict.fromkeys(cons):
        if c.is_trivial():
            if not c.trivially_true():
                return [], False
            continue
        out.append(c)
    return out, True


def _eliminate(cons, k):
    """Project out variable ``k`` from inequality constraints; None if infeasible."""
    lower = [c for c in cons if c.a[k] > 0]
    upper = [c for c in cons if c.a[k] < 0]
    new = {c for c in cons if c.a[k] == 0}
    for lo in lower:
        for up in upper:
            p, q = lo.a[k], -up.a[k]
            a = [q * x + p * y for x, y in zip(lo.a, up.a)]
            b = q * lo.b + p * up.b
            kind = GT if GT in (lo.kind, up.kind) else GE
            c = Constraint.make(a, b, kind)
            if c.is_trivial():
                if not c.trivially_true():
                    return None
                continue
            new.add(c)
    return _prune(new)


def _prune(cons: Iterable[Constraint]) -> list[Constraint]:
    """Drop inequalities implied by a parallel one with a tighter bound."""
    best: dict[tuple, Constraint] = {}
    eqs = []
    for c in cons:
        if c.kind == EQ:
            eqs.append(c)
            continue
        cur = best.get(c.a)
        if cur is None or c.b > cur.b or (c.b == cur.b and c.kind == GT):
            best[c.a] = c
    return sorted(set(eqs)) + sorted(best.values())


def feasible(n: int, cons: Iterable[Constraint]) -> bool:
    cons, ok = _substitute_equalities(cons)
    if not ok:
        return False
    cons = _prune(cons)
    for k in range(n):
        if not cons:
            return True
        cons = _eliminate(cons, k)
        if cons is None:
            return False
    return all(c.trivially_true() for c in cons)


def project(n: int, cons: Iterable[Constraint], drop: Sequence[int]) -> list[Constraint] | None:
    """Constraints on the remaining variables describing the projection.

    Returns ``None`` for an empty projection.  Variable indices are kept (the
    dropped coordinates simply have zero coefficients afterwards).
    """
    keep = set(range(n)) - set(drop)
    cons, ok = _substitute_equalities(cons, keep)
    if not ok:
        return None
    # any equality still mentioning a dropped variable also mentions... none: by construction
    for k in drop:
        eqs = [c for c in cons if c.kind == EQ and c.a[k]]
        if eqs:
            raise AssertionError("unexpected equality on a dropped variable")
        cons = _eliminate(cons, k)
        if cons is None:
            return None
    return cons


def nonzero_feasible(n: int, cons: Sequence[Constraint]) -> bool:
    """Whether a homogeneous system has a solution other than the origin."""
    cons = list(cons)
    if any(c.kind == GT for c in cons):
        return feasible(n, cons)
    for i in range(n):
        for s in (1, -1):
            e = [0] * n
            e[i] = s
            if feasible(n, cons + [Constraint(tuple(e), 0, GT)]):
                return True
    return False


def rank(rows: Sequence[Sequence]) -> int:
    """Exact rank of a rational matrix."""
    A = [[Fraction(x) for x in r] for r in rows]
    r = 0
    ncols = len(A[0]) if A else 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(A)) if A[i][c]), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        for i in range(len(A)):
            if i != r and A[i][c]:
                f = A[i][c] / A[r][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        r += 1
    return r


class Polyhedron:
    """Intersection of finitely many rational (half-)spaces in Q^n."""

    __slots__ = ("n", "constraints", "_empty", "_implicit")

    def __init__(self, n: int, constraints: Iterable[Constraint] = ()):
        self.n = n
        cons = []
        for c in constraints:
            if len(c.a) != n:
                raise ValueError("constraint dimension mismatch")
            if not (c.is_trivial() and c.trivially_true()):
                cons.append(c)
        self.constraints = tuple(sorted(set(cons)))
        self._empty = None
        self._implicit = None

    @classmethod
    def whole(cls, n: int) -> "Polyhedron":
        return cls(n)

    @classmethod
    def point(cls, w: Sequence) -> "Polyhedron":
        n = len(w)
        return cls(n, [Constraint.make([int(i == j) for j in range(n)], w[i], EQ) for i in range(n)])

    def intersect(self, other: "Polyhedron | Iterable[Constraint]") -> "Polyhedron":
        extra = other.constraints if isinstance(other, Polyhedron) else tuple(other)
        return Polyhedron(self.n, self.constraints + tuple(extra))

    def is_empty(self) -> bool:
        if self._empty is None:
            self._empty = not feasible(self.n, self.constraints)
        return self._empty

    def contains(self, w) -> bool:
        return all(c.holds(w) for c in self.constraints)

    def implicit_equalities(self) -> tuple[Constraint, ...]:
        """Inequalities that hold with equality on all of the (nonempty) polyhedron."""
        if self._implicit is None:
            out = []
            if not self.is_empty():
                for c in self.constraints:
                    if c.kind == GE:
                        strict = Constraint(c.a, c.b, GT)
                        if not feasible(self.n, self.constraints + (strict,)):
                            out.append(c)
            self._implicit = tuple(out)
        return self._implicit

    def equality_normals(self) -> list[tuple[int, ...]]:
        rows = [c.a for c in self.constraints if c.kind == EQ]
        return rows + [c.a for c in self.implicit_equalities()]

    def dimension(self) -> int:
        if self.is_empty():
            return -1
        rows = self.equality_normals()
        return self.n - (rank(rows) if rows else 0)

    def issubset(self, other: "Polyhedron") -> bool:
        if self.is_empty():
            return True
        for c in other.constraints:
            for neg in c.negations():
                if feasible(self.n, self.constraints + (neg,)):
                    return False
        return True

    def is_cone(self) -> bool:
        return all(c.b == 0 for c in self.constraints)

    def closure(self) -> "Polyhedron":
        return Polyhedron(self.n, [c.relaxed() for c in self.constraints])

    def cone_over(self) -> tuple[Constraint, ...] | None:
        """Homogeneous constraints for ``{t*w : t > 0, w in P}``; ``None`` if that is ``{0}`` or empty.

        Homogenize with a scale ``mu > 0`` and project ``mu`` away.
        """
        n = self.n
        lifted = [Constraint.make(tuple(c.a) + (-c.b,), 0, c.kind) for c in self.constraints]
        mu = [0] * n + [1]
        lifted.append(Constraint(tuple(mu), 0, GT))
        proj = project(n + 1, lifted, [n])
        if proj is None:
            return None
        cons = [Constraint.make(c.a[:n], 0, c.kind) for c in proj]
        cons = [c for c in cons if not c.is_trivial()]
        if not nonzero_feasible(n, cons):
            return None
        return remove_redundant(n, cons)

    def __eq__(self, other):
        return isinstance(other, Polyhedron) and self.n == other.n and self.constraints == other.constraints

    def __hash__(self):
        return hash((self.n, self.constraints))

    def __repr__(self):
        return "Polyhedron(%d, [%s])" % (self.n, "; ".join(map(str, self.constraints)))

    def vertices_2d(self, box) -> list[tuple[Fraction, Fraction]]:
        """Vertices of the closure clipped to ``[-box, box]^2``, counter-clockwise."""
        if self.n != 2:
            raise ValueError("vertices_2d needs n == 2")
        square = [
            Constraint.make((1, 0), -box), Constraint.make((-1, 0), -box),
            Constraint.make((0, 1), -box), Constraint.make((0, -1), -box),
        ]
        P = Polyhedron(2, [c.relaxed() for c in self.constraints] + square)
        lines = P.constraints
        pts = set()
        for i in range(len(lines)):
            for j in range(i + 1, len(lines)):
                (a1, b1), (a2, b2) = lines[i].a, lines[j].a
                det = a1 * b2 - a2 * b1
                if det == 0:
                    continue
                c1, c2 = lines[i].b, lines[j].b
                pt = (Fraction(c1 * b2 - c2 * b1, det), Fraction(a1 * c2 - a2 * c1, det))
                if P.contains(pt):
                    pts.add(pt)
        pts = sorted(pts)
        if len(pts) <= 2:
            return pts
        cx = sum(p[0] for p in pts) / len(pts)
        cy = sum(p[1] for p in pts) / len(pts)
        return sorted(pts, key=lambda p: math.atan2(p[1] - cy, p[0] - cx))


def remove_redundant(n: int, cons: Sequence[Constraint]) -> tuple[Constraint, ...]:
    """Drop inequalities implied by the others (equalities are kept)."""
    cons = list(dict.fromkeys(cons))
    i = 0
    while i < len(cons):
        c = cons[i]
        if c.kind != EQ:
            others = cons[:i] + cons[i + 1:]
            if all(not feasible(n, others + [neg]) for neg in c.negations()):
                cons = others
                continue
        i += 1
    return tuple(sorted(cons))


# ---------------------------------------------------------------------------
# satisfiability of and/or combinations of constraints
#
# Formulas: ("atom", Constraint) | ("and", [f...]) | ("or", [f...])
#           | ("notconj", (Constraint, ...))  -- negation of a conjunction
#           | ("true",) | ("false",)


class Budget:
    def __init__(self, limit: int):
        self.left = limit

    def spend(self):
        self.left -= 1
        if self.left < 0:
            raise _OutOfBudget


class _OutOfBudget(Exception):
    pass


def satisfiable(n: int, formula, nonzero: bool = False, limit: int = 200_000):
    """Decide whether some point (nonzero, if asked) satisfies ``formula``.

    Returns True, False, or UNKNOWN if the search exceeds ``limit`` feasibility checks.
    """
    budget = Budget(limit)

    def ok(cons):
        budget.spend()
        return nonzero_feasible(n, cons) if nonzero else feasible(n, cons)

    def search(cons, pending):
        pending = list(pending)
        while pending:
            f = pending.pop()
            tag = f[0]
            if tag == "true":
                continue
            if tag == "false":
                return False
            if tag == "atom":
                cons = cons + [f[1]]
                if not ok(cons):
                    return False
            elif tag == "and":
                pending.extend(f[1])
            else:
                # defer branching until all conjunctive material is in place
                if any(g[0] in ("atom", "and", "true", "false") for g in pending):
                    pending.insert(0, f)
                    continue
                if tag == "notconj":
                    if not ok(cons + list(f[1])):
                        continue
                    branches = [("atom", neg) for c in f[1] for neg in c.negations()]
                else:
                    branches = f[1]
                for g in branches:
                    if search(cons, pending + [g]):
                        return True
                return False
        return ok(cons)

    try:
        return search([], [formula])
    except _OutOfBudget:
        return UNKNOWN


def union_issubset(n: int, A: Sequence[Polyhedron], B: Sequence[Polyhedron], limit: int = 200_000):
    """Is the union of ``A`` contained in the union of ``B``?  True / False / UNKNOWN."""
    for P in A:
        parts = [("atom", c) for c in P.constraints]
        parts += [("notconj", tuple(Q.constraints)) if Q.constraints else ("false",) for Q in B]
        r = satisfiable(n, ("and", parts), limit=limit)
        if r is UNKNOWN:
            return UNKNOWN
        if r:
            return False
    return True


def unions_equal(n: int, A: Sequence[Polyhedron], B: Sequence[Polyhedron], limit: int = 200_000):
    a = union_issubset(n, A, B, limit)
    if a is False:
        return False
    b = union_issubset(n, B, A, limit)
    if b is False:
        return False
    return UNKNOWN if UNKNOWN in (a, b) else True
