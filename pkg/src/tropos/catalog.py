"""Closed forms for weighted right-angled Artin groups and orbifold surface groups."""

from __future__ import annotations

import json
import os
import random
from dataclasses import dataclass
from fractions import Fraction
from math import lcm, prod

from .abelian import Presentation, commutator, power
from .sphere import SphericalSet

DEFAULT_VERTEX_CAP = 16


def vertex_cap() -> int:
    return int(os.environ.get("TROPOS_VERTEX_CAP", DEFAULT_VERTEX_CAP))


# ---------------------------------------------------------------------------
# weighted graphs


@dataclass(frozen=True)
class WeightedGraph:
    vertices: tuple[str, ...]
    weights: tuple[tuple[frozenset, int], ...]

    def __init__(self, vertices, edges=()):
        """``edges`` is an iterable of ``(u, v)`` or ``(u, v, weight)``."""
        vs = tuple(str(v) for v in vertices)
        if len(set(vs)) != len(vs):
            raise ValueError("duplicate vertex names")
        w: dict[frozenset, int] = {}
        for e in edges:
            u, v, *rest = e
            u, v = str(u), str(v)
            weight = int(rest[0]) if rest else 1
            if u == v:
                raise ValueError(f"loop at {u}")
            if u not in vs or v not in vs:
                raise ValueError(f"edge {u}-{v} uses an unknown vertex")
            if weight < 1:
                raise ValueError(f"edge {u}-{v} has weight {weight} < 1")
            key = frozenset((u, v))
            if key in w:
                raise ValueError(f"repeated edge {u}-{v}")
            w[key] = weight
        ordered = sorted(w.items(), key=lambda kv: sorted(vs.index(x) for x in kv[0]))
        object.__setattr__(self, "vertices", vs)
        object.__setattr__(self, "weights", tuple(ordered))

    @property
    def edges(self) -> list[tuple[str, str, int]]:
        out = []
        for key, wt in self.weights:
            u, v = sorted(key, key=self.vertices.index)
            out.append((u, v, wt))
        return out

    def weight(self, u, v) -> int | None:
        return dict(self.weights).get(frozenset((u, v)))

    def adjacency(self) -> list[int]:
        """Neighbour bitmasks indexed by vertex position."""
        idx = {v: i for i, v in enumerate(self.vertices)}
        adj = [0] * len(self.vertices)
        for u, v, _ in self.edges:
            adj[idx[u]] |= 1 << idx[v]
            adj[idx[v]] |= 1 << idx[u]
        return adj

    def delete_edges(self, pred) -> "WeightedGraph":
        return WeightedGraph(self.vertices, [e for e in self.edges if not pred(*e)])

    def is_complete(self) -> bool:
        n = len(self.vertices)
        return len(self.weights) == n * (n - 1) // 2

    def is_connected(self) -> bool:
        return _connected(self.adjacency(), (1 << len(self.vertices)) - 1)

    def disjoint_union(self, other: "WeightedGraph") -> "WeightedGraph":
        return WeightedGraph(self.vertices + other.vertices, self.edges + other.edges)

    def join(self, other: "WeightedGraph", weight: int = 1) -> "WeightedGraph":
        extra = [(u, v, weight) for u in self.vertices for v in other.vertices]
        return WeightedGraph(self.vertices + other.vertices, self.edges + other.edges + extra)

    def to_json(self) -> dict:
        return {"vertices": list(self.vertices),
                "edges": [{"u": u, "v": v, "weight": w} for u, v, w in self.edges]}

    @classmethod
    def from_json(cls, data) -> "WeightedGraph":
        if isinstance(data, str):
            data = json.loads(data)
        edges = []
        for e in data.get("edges", []):
            if isinstance(e, dict):
                edges.append((e["u"], e["v"], e.get("weight", 1)))
            else:
                edges.append(tuple(e))
        return cls(data["vertices"], edges)

    @classmethod
    def complete(cls, n: int, weights: dict | None = None) -> "WeightedGraph":
        vs = [str(i + 1) for i in range(n)]
        weights = {frozenset(map(str, k)): w for k, w in (weights or {}).items()}
        return cls(vs, [(u, v, weights.get(frozenset((u, v)), 1))
                        for i, u in enumerate(vs) for v in vs[i + 1:]])


def _connected(adj: list[int], mask: int) -> bool:
    """Is the subgraph induced on ``mask`` connected?  (The empty graph counts as connected.)"""
    if mask == 0:
        return True
    start = mask & -mask
    seen = start
    frontier = start
    while frontier:
        low = frontier & -frontier
        frontier ^= low
        i = low.bit_length() - 1
        new = adj[i] & mask & ~seen
        seen |= new
        frontier |= new
    return seen == mask


def _check_cap(G: WeightedGraph, cap: int | None):
    cap = vertex_cap() if cap is None else cap
    if len(G.vertices) > cap:
        raise ValueError(f"{len(G.vertices)} vertices exceed the cap of {cap} (set TROPOS_VERTEX_CAP or --vertex-cap)")


def wraag_presentation(G: WeightedGraph) -> Presentation:
    """One generator per vertex and one relator ``[a_u, a_v]^weight`` per edge."""
    idx = {v: i for i, v in enumerate(G.vertices)}
    rels = []
    for u, v, w in G.edges:
        rels.append(power(commutator(((idx[u], 1),), ((idx[v], 1),)), w))
    return Presentation(G.vertices, tuple(rels), name="wraag")


def maximally_disconnected_subsets(G: WeightedGraph, cap: int | None = None) -> list[frozenset]:
    """Vertex sets inducing a disconnected subgraph not contained in a larger such set."""
    _check_cap(G, cap)
    n = len(G.vertices)
    adj = G.adjacency()
    full = (1 << n) - 1
    # singletons and the empty set are connected, so only |W| >= 2 matter
    disconnected = [m for m in range(1, full + 1) if m & (m - 1) and not _connected(adj, m)]
    disconnected.sort(key=lambda m: -bin(m).count("1"))
    maximal: list[int] = []
    for m in disconnected:
        if not any(m & M == m for M in maximal):
            maximal.append(m)
    out = [frozenset(G.vertices[i] for i in range(n) if m >> i & 1) for m in maximal]
    return sorted(out, key=lambda W: (len(W), sorted(G.vertices.index(v) for v in W)))


@dataclass(frozen=True)
class WraagJumpLoci:
    components: tuple[frozenset, ...]
    full_torus: bool
    characteristic: int
    graph_used: WeightedGraph

    def predicts(self, support) -> bool:
        """Is a character whose non-trivial coordinates are exactly ``support`` in V^1?"""
        S = set(support)
        return not S or any(S <= W for W in self.components)

    def describe(self) -> str:
        if self.full_torus:
            return "full torus"
        if not self.components:
            return "{1}"
        return " u ".join("T{" + ",".join(sorted(W, key=self.graph_used.vertices.index)) + "}"
                          for W in self.components)


def jump_loci_wraag(G: WeightedGraph, p: int = 0, derived_charp: bool = True,
                    cap: int | None = None) -> WraagJumpLoci:
    """Components of V^1 as coordinate subtori ``T_W``.

    In characteristic ``p > 0`` every edge whose weight is divisible by ``p``
    is removed first, since its relator then has a vanishing Fox column.  With
    ``derived_charp=False`` this step is refused.
    """
    if p < 0:
        raise ValueError("characteristic must be 0 or a prime")
    if p:
        from .laurent import is_prime

        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        if not derived_charp:
            raise ValueError("positive characteristic needs the derived edge-deletion rule (--derived-charp)")
        G = G.delete_edges(lambda u, v, w: w % p == 0)
    comps = maximally_disconnected_subsets(G, cap)
    full = len(G.vertices) > 1 and not G.is_connected()
    return WraagJumpLoci(tuple(comps), full, p, G)


def wraag_oracle_check(G: WeightedGraph, p: int = 0, samples: int = 2, seed: int = 0) -> list[str]:
    """Compare ``jump_loci_wraag`` with rank deficiency at random characters.

    For each vertex subset ``S`` a random character with support exactly ``S``
    is tested.  Returns a list of disagreement messages (empty on success).
    """
    from .alexander import presentation_complex, rank_deficient
    from .abelian import abelianize
    from .fields import field_for, random_character

    P = wraag_presentation(G)
    ab = abelianize(P)
    C = presentation_complex(P, ab)
    K = field_for(p, ab.group, min_size=256)
    rng = random.Random(seed)
    loci = jump_loci_wraag(G, p)
    n = len(G.vertices)
    bad = []
    for m in range(1 << n):
        S = {i for i in range(n) if m >> i & 1}
        expected = loci.predicts(G.vertices[i] for i in S)
        for _ in range(samples if S else 1):
            pt = random_character(ab.group, K, rng, support=S)
            got = rank_deficient(C, 1, pt, K)
            if got != expected:
                bad.append(f"support {sorted(G.vertices[i] for i in S)}: oracle {got}, predicted {expected}")
    return bad


def kahler_classify(G: WeightedGraph) -> dict:
    """The graph-side Kähler criterion for weighted right-angled Artin groups."""
    n = len(G.vertices)
    if not G.is_complete():
        return {"kahler": False, "reason": "graph is not complete"}
    if n % 2:
        return {"kahler": False, "reason": f"odd number of vertices ({n})"}
    heavy = [frozenset((u, v)) for u, v, w in G.edges if w >= 2]
    for i, e in enumerate(heavy):
        for f in heavy[i + 1:]:
            if e & f:
                a, b = (sorted(x, key=G.vertices.index) for x in (e, f))
                return {"kahler": False,
                        "reason": f"edges {a[0]}-{a[1]} and {b[0]}-{b[1]} of weight >= 2 are adjacent"}
    return {"kahler": True, "reason": "complete on an even number of vertices; heavy edges form a matching"}


# ---------------------------------------------------------------------------
# orbifold surface groups


@dataclass(frozen=True)
class OrbifoldData:
    genus: int
    mu: tuple[int, ...] = ()

    def __post_init__(self):
        if self.genus < 1:
            raise ValueError("genus must be at least 1")
        object.__setattr__(self, "mu", tuple(int(m) for m in self.mu))
        if any(m < 2 for m in self.mu):
            raise ValueError("multiplicities must be at least 2")

    @property
    def s(self) -> int:
        return len(self.mu)


def orbifold_euler(d: OrbifoldData) -> Fraction:
    return 2 - 2 * d.genus - sum((1 - Fraction(1, m) for m in d.mu), Fraction(0))


def theta(mu) -> int:
    mu = tuple(mu)
    return prod(mu) // lcm(*mu) if mu else 1


def orbifold_presentation(d: OrbifoldData) -> Presentation:
    g = d.genus
    names = [f"{c}{i}" for i in range(1, g + 1) for c in "xy"] + [f"z{j}" for j in range(1, d.s + 1)]
    long = []
    for i in range(g):
        long += commutator(((2 * i, 1),), ((2 * i + 1, 1),))
    long += [(2 * g + j, 1) for j in range(d.s)]
    rels = [tuple(long)] + [((2 * g + j, 1),) * m for j, m in enumerate(d.mu)]
    return Presentation(tuple(names), tuple(rels), name=f"orbifold g={g} mu={d.mu}")


def _divides_some(p: int, mu) -> bool:
    # 0 divides no nonzero integer
    return p > 0 and any(m % p == 0 for m in mu)


def orbifold_report(d: OrbifoldData, p: int = 0) -> dict:
    """Case selection for V^1, its tropicalization and Sigma^1 over Z."""
    g, mu = d.genus, d.mu
    chi = orbifold_euler(d)
    th = theta(mu)
    dim = 2 * g
    full = SphericalSet.full(dim)
    if chi == 0:
        return {"case": "euclidean", "chi": chi, "theta": th, "V1": "{1}", "trop": "{0}",
                "sigma": "S^1", "sigma_set": full}
    if g > 1 or _divides_some(p, mu):
        case, v1, trop = "full", "Hom(H;k*)", f"R^{dim}"
    elif th > 1:
        case, v1, trop = "off-identity", "Hom(H;k*)' u {1}", f"R^{dim}"
    else:
        case, v1, trop = "trivial", "{1}", "{0}"
    return {"case": case, "chi": chi, "theta": th, "V1": v1, "trop": trop,
            "sigma": "empty", "sigma_set": SphericalSet.empty(dim)}

