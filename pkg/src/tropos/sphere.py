"""Subsets of the character sphere S(H) = (Hom(H, R) - 0) / R_{>0}.

A :class:`SphericalSet` is a boolean expression whose leaves are convex cones
written as homogeneous constraints (each leaf means "the nonzero points of the
cone").  Emptiness, inclusion and equality reduce to exact satisfiability
checks, so they are decided in every dimension.  On the circle (``n == 2``) and
on ``S^0`` there is also a canonical form made of points and arcs.
"""

from __future__ import annotations

from functools import cmp_to_key
from math import gcd
from typing import Iterable, Sequence

from .abelian import integer_kernel, sphere_normalize
from .polyhedra import EQ, GT, UNKNOWN, Constraint, Polyhedron, satisfiable

TRUE = ("true",)
FALSE = ("false",)


def _primitive(v):
    g = 0
    for x in v:
        g = gcd(g, x)
    return tuple(x // g for x in v) if g > 1 else tuple(v)


def _canonical_normal(v):
    v = _primitive(v)
    lead = next((x for x in v if x), 0)
    return tuple(-x for x in v) if lead < 0 else v


def ray_constraints(d: Sequence) -> tuple[Constraint, ...]:
    """Homogeneous constraints cutting out the open ray through ``d``."""
    d = sphere_normalize(d)
    eqs = [Constraint.make(k, 0, EQ) for k in integer_kernel([list(d)])]
    return tuple(eqs) + (Constraint.make(d, 0, GT),)


# ---------------------------------------------------------------------------
# circle helpers (n == 2)


def perp(d):
    return (-d[1], d[0])


def cross(a, b):
    return a[0] * b[1] - a[1] * b[0]


def _half(d):
    return 0 if d[1] > 0 or (d[1] == 0 and d[0] > 0) else 1


def angle_cmp(a, b) -> int:
    """Compare directions by polar angle in [0, 2pi), exactly."""
    ha, hb = _half(a), _half(b)
    if ha != hb:
        return -1 if ha < hb else 1
    c = cross(a, b)
    return -1 if c > 0 else (1 if c < 0 else 0)


def sort_by_angle(dirs: Iterable) -> list:
    return sorted(set(dirs), key=cmp_to_key(angle_cmp))


def arc_sample(d1, d2):
    """A direction strictly inside the counter-clockwise open arc from d1 to d2."""
    if d1 == d2:
        return (-d1[0], -d1[1])
    c = cross(d1, d2)
    if c > 0:
        return _primitive((d1[0] + d2[0], d1[1] + d2[1]))
    if c == 0:
        return perp(d1)
    return _primitive((-(d1[0] + d2[0]), -(d1[1] + d2[1])))


def open_arc_cones(d1, d2):
    """Expression for the open counter-clockwise arc from d1 to d2 (d1 == d2 is the circle minus d1)."""
    d1, d2 = sphere_normalize(d1), sphere_normalize(d2)
    if d1 == d2:
        return ("and", (("not", ("cone", ray_constraints(d1))),))
    c = cross(d1, d2)
    left_of_d1 = Constraint.make(perp(d1), 0, GT)  # cross(d1, x) > 0
    right_of_d2 = Constraint.make((d2[1], -d2[0]), 0, GT)  # cross(x, d2) > 0
    if c > 0:
        return ("cone", (left_of_d1, right_of_d2))
    if c == 0:
        return ("cone", (left_of_d1,))
    return ("or", (("cone", (left_of_d1,)), ("cone", (right_of_d2,))))


# ---------------------------------------------------------------------------


def _nnf(e, neg=False):
    tag = e[0]
    if tag == "true":
        return FALSE if neg else TRUE
    if tag == "false":
        return TRUE if neg else FALSE
    if tag == "cone":
        if neg:
            return ("notconj", tuple(e[1]))
        return ("and", [("atom", c) for c in e[1]])
    if tag == "not":
        return _nnf(e[1], not neg)
    kids = [_nnf(k, neg) for k in e[1]]
    if (tag == "or") != neg:
        return ("or", kids)
    return ("and", kids)


def _holds(e, d) -> bool:
    tag = e[0]
    if tag == "true":
        return True
    if tag == "false":
        return False
    if tag == "cone":
        return all(c.holds(d) for c in e[1])
    if tag == "not":
        return not _holds(e[1], d)
    if tag == "or":
        return any(_holds(k, d) for k in e[1])
    return all(_holds(k, d) for k in e[1])


def _atoms(e):
    tag = e[0]
    if tag == "cone":
        yield from e[1]
    elif tag == "not":
        yield from _atoms(e[1])
    elif tag in ("or", "and"):
        for k in e[1]:
            yield from _atoms(k)


class SphericalSet:
    """A subset of the unit sphere in Hom(H, R) = R^n."""

    __slots__ = ("n", "expr", "_canon")

    def __init__(self, n: int, expr=FALSE):
        if n < 1:
            raise ValueError("the character sphere needs rank >= 1")
        self.n = n
        self.expr = expr
        self._canon = None

    # constructors
    @classmethod
    def empty(cls, n):
        return cls(n, FALSE)

    @classmethod
    def full(cls, n):
        return cls(n, TRUE)

    @classmethod
    def from_cones(cls, n, cones: Iterable[Sequence[Constraint]]) -> "SphericalSet":
        kids = tuple(("cone", tuple(c)) for c in cones)
        if not kids:
            return cls.empty(n)
        return cls(n, kids[0] if len(kids) == 1 else ("or", kids))

    @classmethod
    def from_polyhedra(cls, n, polys: Iterable[Polyhedron]) -> "SphericalSet":
        cones = []
        for P in polys:
            c = P.cone_over()
            if c is not None:
                cones.append(c)
        return cls.from_cones(n, list(dict.fromkeys(cones)))

    @classmethod
    def points(cls, dirs: Sequence[Sequence]) -> "SphericalSet":
        dirs = [tuple(d) for d in dirs]
        if not dirs:
            raise ValueError("need at least one direction (or use empty(n))")
        return cls.from_cones(len(dirs[0]), [ray_constraints(d) for d in dirs])

    @classmethod
    def arc(cls, d1, d2, closed_start=True, closed_end=True) -> "SphericalSet":
        """Counter-clockwise arc on the circle from d1 to d2."""
        parts = [open_arc_cones(d1, d2)]
        if closed_start:
            parts.append(("cone", ray_constraints(d1)))
        if closed_end:
            parts.append(("cone", ray_constraints(d2)))
        return cls(2, ("or", tuple(parts)))

    # set algebra
    def _same(self, other):
        if not isinstance(other, SphericalSet):
            raise TypeError("expected a SphericalSet")
        if other.n != self.n:
            raise ValueError(f"dimension mismatch: {self.n} vs {other.n}")

    def union(self, *others) -> "SphericalSet":
        kids = [self.expr]
        for o in others:
            self._same(o)
            kids.append(o.expr)
        kids = [k for k in kids if k != FALSE]
        if any(k == TRUE for k in kids):
            return SphericalSet.full(self.n)
        if not kids:
            return SphericalSet.empty(self.n)
        return SphericalSet(self.n, kids[0] if len(kids) == 1 else ("or", tuple(kids)))

    def intersection(self, *others) -> "SphericalSet":
        kids = [self.expr]
        for o in others:
            self._same(o)
            kids.append(o.expr)
        kids = [k for k in kids if k != TRUE]
        if any(k == FALSE for k in kids):
            return SphericalSet.empty(self.n)
        if not kids:
            return SphericalSet.full(self.n)
        return SphericalSet(self.n, kids[0] if len(kids) == 1 else ("and", tuple(kids)))

    def complement(self) -> "SphericalSet":
        e = self.expr
        if e == TRUE:
            return SphericalSet.empty(self.n)
        if e == FALSE:
            return SphericalSet.full(self.n)
        return SphericalSet(self.n, e[1] if e[0] == "not" else ("not", e))

    def difference(self, other) -> "SphericalSet":
        return self.intersection(other.complement())

    __or__ = union
    __and__ = intersection
    __invert__ = complement
    __sub__ = difference

    # queries
    def contains(self, d) -> bool:
        if len(d) != self.n:
            raise ValueError("direction has the wrong dimension")
        if not any(d):
            raise ValueError("the zero vector is not a direction")
        return _holds(self.expr, d)

    __contains__ = contains

    def is_empty(self, limit: int = 200_000):
        """True / False, or UNKNOWN if the exact search ran out of budget."""
        if self.expr == FALSE:
            return True
        if self.expr == TRUE:
            return False
        r = satisfiable(self.n, _nnf(self.expr), nonzero=True, limit=limit)
        return r if r is UNKNOWN else not r

    def issubset(self, other, limit: int = 200_000):
        self._same(other)
        return self.difference(other).is_empty(limit)

    def equals(self, other, limit: int = 200_000):
        self._same(other)
        if self.n <= 2:
            return self.canonical() == other.canonical()
        a = self.issubset(other, limit)
        if a is False:
            return False
        b = other.issubset(self, limit)
        if b is False:
            return False
        if a is UNKNOWN or b is UNKNOWN:
            return UNKNOWN
        return True

    def planes(self) -> list[tuple[int, ...]]:
        """Primitive normals of every hyperplane bounding a leaf cone."""
        out = {_canonical_normal(c.a) for c in _atoms(self.expr) if any(c.a)}
        return sorted(out)

    # canonical forms on S^0 and S^1
    def critical_directions(self) -> list[tuple[int, int]]:
        if self.n != 2:
            raise ValueError("critical directions are defined on the circle")
        dirs = set()
        for a in self.planes():
            p = _primitive(perp(a))
            dirs.add(p)
            dirs.add((-p[0], -p[1]))
        return sort_by_angle(dirs)

    def canonical(self):
        """Structural normal form (n <= 2 only).

        ``n == 1``: ``(contains(+1), contains(-1))``.
        ``n == 2``: ``True``/``False`` for the full/empty circle, else a tuple of
        ``(direction, point_in, next_arc_in)`` sorted by angle with no redundant points.
        """
        if self._canon is not None:
            return self._canon
        if self.n == 1:
            self._canon = (self.contains((1,)), self.contains((-1,)))
            return self._canon
        if self.n != 2:
            raise ValueError("canonical form exists only for n <= 2")
        dirs = self.critical_directions()
        if not dirs:
            self._canon = self.contains((1, 0))
            return self._canon
        k = len(dirs)
        entries = []
        for i, d in enumerate(dirs):
            nxt = dirs[(i + 1) % k]
            entries.append([d, self.contains(d), self.contains(arc_sample(d, nxt))])
        changed = True
        while changed and entries:
            changed = False
            for i, (d, pin, ain) in enumerate(entries):
                prev_arc = entries[i - 1][2]
                if pin == ain == prev_arc:
                    del entries[i]
                    changed = True
                    break
        if not entries:
            self._canon = self.contains((1, 0))
        else:
            self._canon = tuple((tuple(d), p, a) for d, p, a in entries)
        return self._canon

    def components_2d(self):
        """Isolated points and maximal arcs of a circle set.

        Returns ``(full, points, arcs)`` where arcs are
        ``(start, end, start_closed, end_closed)`` going counter-clockwise.
        """
        c = self.canonical()
        if c is True or c is False:
            return c, [], []
        points, arcs = [], []
        k = len(c)
        # start arcs right after a point whose previous arc is out (or at any entry if all arcs in)
        if all(a for _, _, a in c):
            # circle minus some points
            for i, (d, _, _) in enumerate(c):
                nxt = c[(i + 1) % k][0]
                arcs.append((d, nxt, False, False))
            return False, points, arcs
        s0 = next(i for i in range(k) if not c[i - 1][2])
        cur = None
        for i in range(k):
            d, pin, ain = c[(s0 + i) % k]
            if cur is None:
                if ain:
                    cur = (d, pin)
                elif pin:
                    points.append(d)
            elif ain:
                # an excluded point splits two included arcs
                arcs.append((cur[0], d, cur[1], False))
                cur = (d, False)
            else:
                arcs.append((cur[0], d, cur[1], pin))
                cur = None
        return False, sorted(points, key=cmp_to_key(angle_cmp)), arcs

    def __repr__(self):
        if self.n <= 2:
            return f"SphericalSet(n={self.n}, {self.describe()})"
        return f"SphericalSet(n={self.n}, {self.expr!r})"

    def describe(self) -> str:
        if self.n == 1:
            pos, neg = self.canonical()
            pts = [s for s, f in (("+1", pos), ("-1", neg)) if f]
            return "{" + ", ".join(pts) + "}"
        if self.n == 2:
            full, pts, arcs = self.components_2d()
            if full:
                return "S^1"
            items = [str(p) for p in pts]
            for s, e, sc, ec in arcs:
                items.append(f"{'[' if sc else '('}{s}..{e}{']' if ec else ')'}")
            return "{" + ", ".join(items) + "}"
        return f"<set in S^{self.n - 1}>"

    # serialization
    def to_json(self) -> dict:
        out = {"n": self.n, "expr": _expr_to_json(self.expr)}
        if self.n == 1:
            pos, neg = self.canonical()
            out["points"] = [[1]] * pos + [[-1]] * neg
        elif self.n == 2:
            full, pts, arcs = self.components_2d()
            out["full"] = full
            out["points"] = [list(p) for p in pts]
            out["arcs"] = [
                {"from": list(s), "to": list(e), "from_closed": sc, "to_closed": ec}
                for s, e, sc, ec in arcs
            ]
        return out

    @classmethod
    def from_json(cls, data: dict) -> "SphericalSet":
        n = int(data["n"])
        if "expr" in data:
            return cls(n, _expr_from_json(data["expr"]))
        if n == 1:
            return cls.from_cones(1, [ray_constraints(tuple(p)) for p in data.get("points", [])])
        if n != 2:
            raise ValueError("sets with n > 2 must carry an expression")
        if data.get("full"):
            return cls.full(2)
        s = cls.empty(2)
        pts = [tuple(p) for p in data.get("points", [])]
        if pts:
            s = s | cls.points(pts)
        for a in data.get("arcs", []):
            s = s | cls.arc(tuple(a["from"]), tuple(a["to"]), a["from_closed"], a["to_closed"])
        return s


def _expr_to_json(e):
    tag = e[0]
    if tag in ("true", "false"):
        return {"op": tag}
    if tag == "cone":
        return {"op": "cone", "constraints": [[list(c.a), c.kind] for c in e[1]]}
    if tag == "not":
        return {"op": "not", "arg": _expr_to_json(e[1])}
    return {"op": tag, "args": [_expr_to_json(k) for k in e[1]]}


def _expr_from_json(d):
    op = d["op"]
    if op in ("true", "false"):
        return (op,)
    if op == "cone":
        return ("cone", tuple(Constraint.make(a, 0, k) for a, k in d["constraints"]))
    if op == "not":
        return ("not", _expr_from_json(d["arg"]))
    if op in ("or", "and"):
        return (op, tuple(_expr_from_json(k) for k in d["args"]))
    raise ValueError(f"unknown set operator {op!r}")
