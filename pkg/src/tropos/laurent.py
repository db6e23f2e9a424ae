"""Laurent polynomials over ZH and F_p H, coefficient valuations and gcd."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Iterable, Mapping, Sequence

from .abelian import FGAbelianGroup, GroupElement, pair

INF = math.inf


class UndecidedTorsion(Exception):
    """Raised when a unit question in ZH cannot be settled because H has torsion."""


class ZeroModP(ValueError):
    """Raised when a polynomial vanishes identically after reduction mod p."""


# ---------------------------------------------------------------------------
# number theory helpers


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    k = 3
    while k * k <= p:
        if p % k == 0:
            return False
        k += 2
    return True


def prime_factors(n: int) -> list[int]:
    n = abs(n)
    out = []
    k = 2
    while k * k <= n:
        if n % k == 0:
            out.append(k)
            while n % k == 0:
                n //= k
        k += 1
    if n > 1:
        out.append(n)
    return out


def padic_order(c: int, p: int):
    if c == 0:
        return INF
    k = 0
    while c % p == 0:
        c //= p
        k += 1
    return k


# ---------------------------------------------------------------------------
# valuations


@dataclass(frozen=True)
class Valuation:
    """One of the three valuations on Z: ``trivial``, ``padic`` (v_p) or ``modp``."""

    kind: str = "trivial"
    p: int = 0

    def __post_init__(self):
        if self.kind not in ("trivial", "padic", "modp"):
            raise ValueError(f"unknown valuation kind {self.kind!r}")
        if self.kind == "trivial":
            if self.p:
                raise ValueError("the trivial valuation takes no prime")
        elif not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")

    @classmethod
    def trivial(cls):
        return cls("trivial")

    @classmethod
    def padic(cls, p):
        return cls("padic", p)

    @classmethod
    def modp(cls, p):
        return cls("modp", p)

    @classmethod
    def parse(cls, text: str) -> "Valuation":
        kind, _, p = text.strip().lower().partition(":")
        kind = {"v0": "trivial", "triv": "trivial", "p-adic": "padic", "mod": "modp"}.get(kind, kind)
        return cls(kind, int(p)) if p else cls(kind)

    def __str__(self):
        return self.kind if self.kind == "trivial" else f"{self.kind}:{self.p}"


def coefficient_valuation(c: int, v: Valuation):
    """Valuation of an integer coefficient; ``math.inf`` for zero."""
    if v.kind == "trivial":
        return INF if c == 0 else 0
    if v.kind == "padic":
        return padic_order(c, v.p)
    return INF if c % v.p == 0 else 0


# ---------------------------------------------------------------------------
# polynomials


class LaurentPoly:
    """Element of ZH (``p == 0``) or F_p H with terms stored in canonical order."""

    __slots__ = ("group", "p", "_terms", "_hash")

    def __init__(self, group: FGAbelianGroup, terms: Mapping | Iterable = (), p: int = 0):
        if p and not is_prime(p):
            raise ValueError(f"{p} is not prime")
        acc: dict[GroupElement, int] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        k = group.ngens
        for e, c in items:
            if len(e) != k:
                raise ValueError(f"exponent {e} does not fit {group}")
            e = group.normalize(e)
            acc[e] = acc.get(e, 0) + int(c)
        if p:
            acc = {e: c % p for e, c in acc.items()}
        self.group = group
        self.p = p
        self._terms = tuple(sorted((e, c) for e, c in acc.items() if c))
        self._hash = None

    # construction helpers
    @classmethod
    def const(cls, group, c: int, p: int = 0):
        return cls(group, {group.identity(): c}, p)

    @classmethod
    def monomial(cls, group, exponent: Sequence[int], c: int = 1, p: int = 0):
        return cls(group, {tuple(exponent): c}, p)

    @classmethod
    def gens(cls, group, p: int = 0) -> list["LaurentPoly"]:
        out = []
        for i in range(group.ngens):
            e = [0] * group.ngens
            e[i] = 1
            out.append(cls.monomial(group, e, 1, p))
        return out

    def _new(self, terms):
        return LaurentPoly(self.group, terms, self.p)

    # structure
    @property
    def terms(self) -> tuple[tuple[GroupElement, int], ...]:
        return self._terms

    def as_dict(self) -> dict[GroupElement, int]:
        return dict(self._terms)

    @property
    def support(self) -> tuple[GroupElement, ...]:
        return tuple(e for e, _ in self._terms)

    @property
    def coefficients(self) -> tuple[int, ...]:
        return tuple(c for _, c in self._terms)

    @property
    def n(self) -> int:
        return self.group.rank

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def __len__(self):
        return len(self._terms)

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def leading_term(self) -> tuple[GroupElement, int]:
        if not self._terms:
            raise ValueError("zero polynomial has no leading term")
        return self._terms[-1]

    def coefficient(self, e) -> int:
        return dict(self._terms).get(tuple(e), 0)

    # ring structure
    def _check(self, other):
        if not isinstance(other, LaurentPoly):
            raise TypeError(f"cannot combine LaurentPoly with {type(other).__name__}")
        if other.group != self.group or other.p != self.p:
            raise ValueError("polynomials live in different rings")

    def _coerce(self, other):
        if isinstance(other, int):
            return LaurentPoly.const(self.group, other, self.p)
        self._check(other)
        return other

    def __add__(self, other):
        other = self._coerce(other)
        d = dict(self._terms)
        for e, c in other._terms:
            d[e] = d.get(e, 0) + c
        return self._new(d)

    __radd__ = __add__

    def __neg__(self):
        return self._new({e: -c for e, c in self._terms})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, int):
            return self._new({e: c * other for e, c in self._terms})
        self._check(other)
        d: dict = {}
        G = self.group
        for e1, c1 in self._terms:
            for e2, c2 in other._terms:
                e = G.normalize([a + b for a, b in zip(e1, e2)])
                d[e] = d.get(e, 0) + c1 * c2
        return self._new(d)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            if not self.is_monomial():
                raise ValueError("only monomials can be inverted")
            (e, c), = self._terms
            if c not in (1, -1) and not (self.p and c % self.p):
                raise ValueError("only unit monomials can be inverted")
            inv_c = c if not self.p else pow(c, -1, self.p)
            return LaurentPoly.monomial(self.group, [-a for a in e], inv_c, self.p) ** (-k)
        out = LaurentPoly.const(self.group, 1, self.p)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def shift(self, e: Sequence[int]) -> "LaurentPoly":
        """Multiply by the monomial ``x^e``."""
        G = self.group
        return self._new({G.normalize([a + b for a, b in zip(u, e)]): c for u, c in self._terms})

    def __eq__(self, other):
        if isinstance(other, int):
            return self == LaurentPoly.const(self.group, other, self.p)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.group == other.group and self.p == other.p and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.group, self.p, self._terms))
        return self._hash

    def sort_key(self):
        return (len(self._terms), self._terms)

    def __repr__(self):
        return f"LaurentPoly({self})"

    def __str__(self):
        return format_poly(self)


def format_poly(f: LaurentPoly) -> str:
    if f.is_zero():
        return "0"
    labels = f.group.labels
    parts = []
    for e, c in reversed(f.terms):
        mono = "*".join(
            labels[i] if k == 1 else f"{labels[i]}^{k}" for i, k in enumerate(e) if k
        )
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if not mono:
            body = str(a)
        elif a == 1:
            body = mono
        else:
            body = f"{a}*{mono}"
        parts.append((sign, body))
    first_sign, first = parts[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


# ---------------------------------------------------------------------------
# parsing

_TOKENS = re.compile(r"\s*(?:(\d+)|([A-Za-z_]\w*)|(\*\*|[-+*^()]))")


def _tokenize(text):
    pos, out = 0, []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKENS.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"unexpected character at position {pos}: {text[pos:]!r}")
        num, name, op = m.groups()
        start = m.start(m.lastindex)
        if num is not None:
            out.append(("num", int(num), start))
        elif name is not None:
            out.append(("name", name, start))
        else:
            out.append(("op", "^" if op == "**" else op, start))
        pos = m.end()
    out.append(("end", None, len(text)))
    return out


def variable_names(texts: Iterable[str]) -> tuple[str, ...]:
    """Variable names implied by a collection of polynomial strings."""
    names = set()
    for t in texts:
        names.update(v for kind, v, _ in _tokenize(t) if kind == "name")
    if names and all(re.fullmatch(r"x\d+", v) for v in names):
        top = max(int(v[1:]) for v in names)
        return tuple(f"x{i}" for i in range(1, top + 1))
    return tuple(sorted(names))


def parse_poly(text: str, group: FGAbelianGroup | None = None, p: int = 0) -> LaurentPoly:
    """Parse ``x1 + x2 - 2``, ``x^-1*y^2 + 3`` and similar into canonical form.

    Without ``group`` the variables define a free abelian group: names of the
    form ``x1..xk`` fill ``x1..x_max``; a lone ``x`` gives rank one; any other
    names are taken in sorted order.
    """
    if group is None:
        names = variable_names([text])
        group = FGAbelianGroup.free(len(names), names)
    index = {name: i for i, name in enumerate(group.labels)}
    toks = _tokenize(text)
    pos = 0

    def peek():
        return toks[pos]

    def take():
        nonlocal pos
        tok = toks[pos]
        pos += 1
        return tok

    def fail(msg):
        raise ValueError(f"{msg} at position {peek()[2]} in {text!r}")

    def expect(op):
        kind, v, _ = peek()
        if kind != "op" or v != op:
            fail(f"expected {op!r}")
        take()

    def signed_int():
        sign = 1
        while peek()[0] == "op" and peek()[1] in "+-":
            if take()[1] == "-":
                sign = -sign
        kind, v, _ = peek()
        if kind == "op" and v == "(":
            take()
            k = signed_int()
            expect(")")
            return sign * k
        if kind != "num":
            fail("expected an integer exponent")
        take()
        return sign * v

    def atom():
        kind, v, _ = peek()
        if kind == "num":
            take()
            return LaurentPoly.const(group, v, p)
        if kind == "name":
            if v not in index:
                fail(f"unknown variable {v!r}")
            take()
            e = [0] * group.ngens
            e[index[v]] = 1
            return LaurentPoly.monomial(group, e, 1, p)
        if kind == "op" and v == "(":
            take()
            r = expr()
            expect(")")
            return r
        fail("expected a number, variable or '('")

    def factor():
        base = atom()
        if peek()[0] == "op" and peek()[1] == "^":
            take()
            k = signed_int()
            try:
                base = base ** k
            except ValueError as exc:
                fail(str(exc))
        return base

    def term():
        r = factor()
        while True:
            kind, v, _ = peek()
            if kind == "op" and v == "*":
                take()
                r = r * factor()
            elif kind in ("num", "name") or (kind == "op" and v == "("):
                r = r * factor()
            else:
                return r

    def expr():
        sign = 1
        if peek()[0] == "op" and peek()[1] in "+-":
            sign = -1 if take()[1] == "-" else 1
        r = term() * sign
        while peek()[0] == "op" and peek()[1] in "+-":
            s = take()[1]
            t = term()
            r = r + t if s == "+" else r - t
        return r

    result = expr()
    if peek()[0] != "end":
        fail("unexpected token")
    return result


def parse_polys(texts: Sequence[str], p: int = 0) -> list[LaurentPoly]:
    """Parse several polynomials into one common free abelian group."""
    names = variable_names(texts)
    group = FGAbelianGroup(len(names), (), names)
    return [parse_poly(t, group, p) for t in texts]


# ---------------------------------------------------------------------------
# degrees and initial forms


def _require_nonzero(f):
    if f.is_zero():
        raise ValueError("operation undefined for the zero polynomial")


def chi_degree(f: LaurentPoly, chi) -> Fraction:
    _require_nonzero(f)
    return min(pair(chi, e) for e in f.support)


def initial_form_ring(f: LaurentPoly, chi) -> LaurentPoly:
    _require_nonzero(f)
    vals = [(pair(chi, e), e, c) for e, c in f.terms]
    m = min(v for v, _, _ in vals)
    return f._new({e: c for v, e, c in vals if v == m})


def reduce_mod_p(f: LaurentPoly, p: int) -> LaurentPoly:
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if f.p and f.p != p:
        raise ValueError(f"cannot reduce an F_{f.p} polynomial mod {p}")
    return LaurentPoly(f.group, f.terms, p)


def field_view(f: LaurentPoly, v: Valuation) -> tuple[LaurentPoly, Valuation]:
    """Return the polynomial and valuation actually used for a field tropicalization.

    ``modp`` reduces the coefficients and then uses the trivial valuation on F_p.
    """
    if v.kind == "modp":
        g = reduce_mod_p(f, v.p)
        if g.is_zero():
            raise ZeroModP(f"polynomial vanishes mod {v.p}")
        return g, Valuation.trivial()
    if f.p and v.kind == "padic":
        raise ValueError(f"p-adic valuation is not defined on F_{f.p} coefficients")
    return f, v


def term_values(f: LaurentPoly, v: Valuation, w) -> list[tuple]:
    """``(v(a_u) + u.w, u, a_u)`` for every term (after any mod-p reduction)."""
    g, vv = field_view(f, v)
    return [(coefficient_valuation(c, vv) + pair(w, e), e, c) for e, c in g.terms]


def initial_form_field(f: LaurentPoly, w, v: Valuation) -> LaurentPoly:
    _require_nonzero(f)
    g, _ = field_view(f, v)
    vals = term_values(f, v, w)
    m = min(x for x, _, _ in vals)
    return g._new({e: c for x, e, c in vals if x == m})


# ---------------------------------------------------------------------------
# units


def _higman_trivial_units(torsion: Sequence[int]) -> bool:
    """ZT has only the units +-t exactly when the exponent of T divides 4 or 6."""
    e = torsion[-1] if torsion else 1
    return 4 % e == 0 or 6 % e == 0


def torsion_coefficients(f: LaurentPoly) -> dict[GroupElement, dict[GroupElement, int]]:
    """Group the terms of ``f`` by free part: free part -> {torsion part: coefficient}."""
    n = f.group.rank
    out: dict = {}
    for e, c in f.terms:
        out.setdefault(e[:n], {})[e[n:]] = c
    return out


def is_unit_over_Z(f: LaurentPoly) -> bool:
    """Whether ``f`` is a unit of ZH.

    For torsion-free H the units are the signed monomials.  With torsion T the
    ring ZH is a Laurent ring over ZT, which is reduced with no nontrivial
    idempotents, so a unit has a single free part whose ZT-coefficient is a unit
    of ZT.  That last question is decided when possible and otherwise raises
    :class:`UndecidedTorsion`.
    """
    if f.p:
        raise ValueError("unit test is for integer coefficients")
    if f.is_monomial() and abs(f.terms[0][1]) == 1:
        return True
    if f.group.is_free or f.is_zero():
        return False
    groups = torsion_coefficients(f)
    if len(groups) > 1:
        return False
    (coeffs,) = groups.values()
    if abs(sum(coeffs.values())) != 1:
        return False
    if _higman_trivial_units(f.group.torsion):
        return False
    raise UndecidedTorsion(f"cannot decide whether {f} is a unit of Z[{f.group}]")


# ---------------------------------------------------------------------------
# content, normalization, gcd


def content_primitive(f: LaurentPoly) -> tuple[int, LaurentPoly]:
    if f.is_zero():
        return 0, f
    c = reduce(math.gcd, f.coefficients)
    return c, f._new({e: a // c for e, a in f.terms})


def min_free_exponent(f: LaurentPoly) -> tuple[int, ...]:
    n = f.group.rank
    return tuple(min(e[i] for e in f.support) for i in range(n))


def normalize(f: LaurentPoly) -> LaurentPoly:
    """Canonical associate: free support touching zero from above, positive lead."""
    if f.is_zero():
        return f
    lo = min_free_exponent(f)
    g = f.shift([-a for a in lo] + [0] * len(f.group.torsion))
    if not f.p and g.leading_term()[1] < 0:
        g = -g
    elif f.p:
        inv = pow(g.leading_term()[1], -1, f.p)
        g = g * inv
    return g


# Ordinary polynomials are dicts {exponent tuple: int} with nonnegative exponents.


def _p_mul(A, B):
    out: dict = {}
    for e1, c1 in A.items():
        for e2, c2 in B.items():
            e = tuple(a + b for a, b in zip(e1, e2))
            out[e] = out.get(e, 0) + c1 * c2
    return {e: c for e, c in out.items() if c}


def _p_sub(A, B):
    out = dict(A)
    for e, c in B.items():
        out[e] = out.get(e, 0) - c
    return {e: c for e, c in out.items() if c}


def _lead(A, order):
    e = max(A, key=lambda u: tuple(u[i] for i in order))
    return e, A[e]


def _p_divide(A, B, order):
    """Exact division ``A / B`` or ``None`` when ``B`` does not divide ``A``."""
    if not B:
        raise ZeroDivisionError
    Q: dict = {}
    R = dict(A)
    eb, cb = _lead(B, order)
    while R:
        er, cr = _lead(R, order)
        if cr % cb:
            return None
        d = tuple(a - b for a, b in zip(er, eb))
        if any(x < 0 for x in d):
            return None
        q = {d: cr // cb}
        Q[d] = Q.get(d, 0) + cr // cb
        R = _p_sub(R, _p_mul(q, B))
    return Q


def _deg(A, v):
    return max(e[v] for e in A)


def _coeffs_in(A, v):
    out: dict = {}
    for e, c in A.items():
        k = e[v]
        e2 = e[:v] + (0,) + e[v + 1:]
        out.setdefault(k, {})[e2] = c
    return out


def _content_in(A, v, rest):
    return reduce(lambda a, b: _p_gcd(a, b, rest), _coeffs_in(A, v).values())


def _p_gcd(A, B, vars_):
    if not A:
        return _normalize_int_sign(B)
    if not B:
        return _normalize_int_sign(A)
    active = [v for v in vars_ if any(e[v] for e in A) or any(e[v] for e in B)]
    if not active:
        (ca,), (cb,) = A.values(), B.values()
        return {next(iter(A)): math.gcd(ca, cb)}
    v = min(active, key=lambda u: (max(_deg(A, u), _deg(B, u)), u))
    rest = [u for u in active if u != v]
    order = [v] + rest
    ca = _content_in(A, v, rest)
    cb = _content_in(B, v, rest)
    c = _p_gcd(ca, cb, rest)
    A = _p_divide(A, ca, order)
    B = _p_divide(B, cb, order)
    if _deg(A, v) < _deg(B, v):
        A, B = B, A
    while B:
        if _deg(B, v) == 0:
            B = None
            break
        R = _prem(A, B, v)
        A = B
        if not R:
            B = R
            break
        B = _p_divide(R, _content_in(R, v, rest), order)
    if B is None:
        g = c
    else:
        g = _p_mul(_p_divide(A, _content_in(A, v, rest), order), c)
    return _normalize_int_sign(g)


def _prem(A, B, v):
    db = _deg(B, v)
    lb = _coeffs_in(B, v)[db]
    R = A
    while R and _deg(R, v) >= db:
        dr = _deg(R, v)
        lr = _coeffs_in(R, v)[dr]
        shift = tuple(dr - db if i == v else 0 for i in range(len(next(iter(R)))))
        R = _p_sub(_p_mul(lb, R), _p_mul(_p_mul(lr, {shift: 1}), B))
    return R


def _normalize_int_sign(A):
    if not A:
        return A
    e = max(A)
    return {u: -c for u, c in A.items()} if A[e] < 0 else dict(A)


def _to_poly(f: LaurentPoly):
    lo = min_free_exponent(f)
    return lo, {tuple(a - b for a, b in zip(e, lo)): c for e, c in f.terms}


def gcd(f: LaurentPoly, g: LaurentPoly) -> LaurentPoly:
    """Greatest common divisor in Z[x1^+-1, ..., xn^+-1], normalized."""
    if f.p or g.p:
        raise ValueError("gcd is implemented over Z coefficients")
    if not f.group.is_free:
        raise ValueError("gcd over a group with torsion is unsupported")
    if f.group != g.group:
        raise ValueError("polynomials live in different rings")
    if f.is_zero() and g.is_zero():
        raise ValueError("gcd(0, 0) is undefined")
    if f.is_zero():
        return normalize(g)
    if g.is_zero():
        return normalize(f)
    n = f.group.rank
    _, A = _to_poly(f)
    _, B = _to_poly(g)
    G = _p_gcd(A, B, list(range(n)))
    return normalize(LaurentPoly(f.group, G))


def gcd_many(polys: Iterable[LaurentPoly]) -> LaurentPoly:
    polys = [f for f in polys if not f.is_zero()]
    if not polys:
        raise ValueError("gcd of zero polynomials is undefined")
    return reduce(gcd, polys[1:], normalize(polys[0]))


def exact_divide(f: LaurentPoly, g: LaurentPoly) -> LaurentPoly:
    """``f / g`` in ZH (torsion-free), raising ``ValueError`` if not exact."""
    if g.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    if f.is_zero():
        return f
    if not f.group.is_free:
        raise ValueError("division over a group with torsion is unsupported")
    lf, A = _to_poly(f)
    lg, B = _to_poly(g)
    Q = _p_divide(A, B, list(range(f.group.rank)))
    if Q is None:
        raise ValueError(f"{g} does not divide {f}")
    return LaurentPoly(f.group, Q, f.p).shift([a - b for a, b in zip(lf, lg)])


def divides(g: LaurentPoly, f: LaurentPoly) -> bool:
    try:
        exact_divide(f, g)
    except ValueError:
        return False
    return True


def relevant_primes(f: LaurentPoly) -> list[int]:
    """Primes dividing at least one coefficient."""
    if f.is_zero():
        raise ValueError("relevant primes of the zero polynomial are undefined")
    out = set()
    for c in f.coefficients:
        out.update(prime_factors(c))
    return sorted(out)


def change_group(f: LaurentPoly, group: FGAbelianGroup, image) -> LaurentPoly:
    """Push ``f`` forward along a homomorphism given on exponent vectors."""
    return LaurentPoly(group, {image(e): c for e, c in f.terms}, f.p)
