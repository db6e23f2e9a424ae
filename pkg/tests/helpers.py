"""Shared generators for randomized tests."""

import random

from hypothesis import strategies as st

from tropos.abelian import FGAbelianGroup
from tropos.laurent import LaurentPoly

SEED = 20240601


def random_poly(rng: random.Random, n: int, max_terms=6, coeff=20, exp=2) -> LaurentPoly:
    G = FGAbelianGroup.free(n)
    while True:
        k = rng.randint(1, max_terms)
        terms = {}
        for _ in range(k):
            e = tuple(rng.randint(-exp, exp) for _ in range(n))
            terms[e] = rng.choice([c for c in range(-coeff, coeff + 1) if c])
        f = LaurentPoly(G, terms)
        if not f.is_zero():
            return f


@st.composite
def polys(draw, n=None, max_terms=5, coeff=9, exp=2, nonzero=True):
    n = draw(st.integers(1, 3)) if n is None else n
    G = FGAbelianGroup.free(n)
    items = draw(st.lists(
        st.tuples(st.tuples(*[st.integers(-exp, exp)] * n), st.integers(-coeff, coeff)),
        min_size=1 if nonzero else 0, max_size=max_terms,
    ))
    f = LaurentPoly(G, dict(items))
    if nonzero and f.is_zero():
        f = LaurentPoly.const(G, 1)
    return f


@st.composite
def poly_pairs(draw, max_terms=4, coeff=6):
    n = draw(st.integers(1, 3))
    return draw(polys(n, max_terms, coeff)), draw(polys(n, max_terms, coeff))


def rationals(lo=-6, hi=6, den=4):
    return st.fractions(min_value=lo, max_value=hi, max_denominator=den)
