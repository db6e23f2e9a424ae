import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from helpers import SEED
from tropos.abelian import Presentation, abelianize, free_reduce, parse_presentation
from tropos.alexander import (
    BnsFixture,
    MinorCapExceeded,
    audit_inclusion,
    augmentation_type,
    bnsr_upper_bound,
    chain_upper_bound,
    dwyer_fried_test,
    fox_derivative,
    fox_identity_holds,
    fox_matrix,
    homology_dim,
    jump_ideal,
    jump_ideal_generic,
    parse_chain_data,
    presentation_complex,
    relator_for_polynomial,
)
from tropos.fields import GF, RationalField, evaluate
from tropos.laurent import LaurentPoly, normalize, parse_poly, parse_polys
from tropos.worked_examples import TWO_ARCS, BS12, presentations
from tropos.polyhedra import UNKNOWN
from tropos.sphere import SphericalSet
from tropos.tropical import Provenance

words = st.lists(st.tuples(st.integers(0, 2), st.sampled_from([1, -1])), max_size=7)


def _presentation(gens, rels):
    names = ("a", "b", "c")[:gens]
    return Presentation(names, tuple(free_reduce([(g % gens, e) for g, e in r]) for r in rels))


@given(st.integers(1, 3), st.lists(words, min_size=1, max_size=3))
def test_fox_fundamental_identity(g, rels):
    assert fox_identity_holds(_presentation(g, rels))


def test_bs12_boundaries():
    P = parse_presentation(BS12)
    C = presentation_complex(P)
    x = LaurentPoly.gens(C.group)[0]
    assert [f for (f,) in C.boundary(1)] == [LaurentPoly(C.group), x - 2]
    assert C.boundary(0) == [[x - 1, LaurentPoly(C.group)]]
    assert C.composition_vanishes()


def test_bs12_bound_is_single_point():
    B = bnsr_upper_bound(parse_presentation(BS12))
    assert B.provenance == Provenance.EXACT
    assert B.complement.equals(SphericalSet.points([(-1,)]))
    J = B.ideals[1]
    x = LaurentPoly.gens(B.group)[0]
    assert J.principal_part == normalize((x - 1) * (x - 2))


def test_free_group_jump_ideal_is_zero():
    P = Presentation(("a", "b"), ())
    C = presentation_complex(P)
    J = jump_ideal(C, 1)
    assert J.is_zero
    B = bnsr_upper_bound(P)
    assert B.complement.is_empty() is True and B.provenance == Provenance.EXACT


def test_free_abelian_rank_two():
    B = bnsr_upper_bound(parse_presentation("gens: a b\nrel: [a,b]\n"))
    assert B.complement.equals(SphericalSet.full(2)) is True
    assert B.provenance == Provenance.EXACT


def test_relator_realizes_polynomial():
    f = parse_poly("x1 + x2 - 2")
    P = Presentation(("a", "b"), (relator_for_polynomial(f),))
    H, ab = abelianize(P)
    col = [row[0] for row in fox_matrix(P, ab)]
    fH = LaurentPoly(H, f.terms)
    x1, x2 = LaurentPoly.gens(H)
    assert col == [fH * (x2 - 1), -(fH * (x1 - 1))]
    J = jump_ideal(presentation_complex(P, ab), 1)
    assert J.principal_part == normalize(fH)
    assert augmentation_type(J.residual)


def test_fox_derivative_of_commutator():
    P = parse_presentation("gens: a b\nrel: [a,b]\n")
    H, ab = abelianize(P)
    x1, x2 = LaurentPoly.gens(H)
    r = P.relators[0]
    assert fox_derivative(r, 0, ab) == LaurentPoly.const(H, 1) - x2
    assert fox_derivative(r, 1, ab) == x1 - 1


def test_brown_example_strict_inclusion():
    P = parse_presentation(TWO_ARCS)
    B = bnsr_upper_bound(P)
    assert B.provenance == Provenance.EXACT
    x1 = LaurentPoly.gens(B.group)[0]
    assert B.ideals[1].principal_part == normalize(x1 - 1)
    from tropos.worked_examples import fixtures

    fx = {f.presentation_id: f for f in fixtures()}["two-arcs"]
    rep = audit_inclusion(fx, B.complement, B.provenance)
    assert rep.included is True and rep.strict is True


def _random_point(rng, n):
    special = [Fraction(1), Fraction(-1), Fraction(2), Fraction(1, 2), Fraction(3)]
    return tuple(rng.choice(special) if rng.random() < 0.6 else Fraction(rng.randint(-9, 9) or 1, rng.randint(1, 4))
                 for _ in range(n))


def test_minor_vanishing_matches_rank_deficiency():
    rng = random.Random(SEED)
    K = RationalField()
    checked = 0
    for _ in range(30):
        g, r = rng.randint(1, 3), rng.randint(1, 2)
        rels = [[(rng.randrange(g), rng.choice([1, -1])) for _ in range(rng.randint(2, 6))] for _ in range(r)]
        P = _presentation(g, rels)
        H, ab = abelianize(P)
        if not H.is_free or H.rank == 0:
            continue
        C = presentation_complex(P, ab)
        for i in (0, 1):
            gens = jump_ideal(C, i).generators
            for _ in range(100):
                pt = _random_point(rng, H.rank)
                vanish = all(evaluate(f, pt, K) == 0 for f in gens)
                assert vanish == (homology_dim(C, i, pt, K) > 0), (P, i, pt)
                checked += 1
    assert checked > 1000


@pytest.mark.parametrize("name", ["bs12", "two-arcs", "poly-relator", "orbifold-1-23"])
def test_block_minors_match_generic(name):
    P = presentations()[name]
    C = presentation_complex(P)
    for i in (0, 1, 2):
        assert set(jump_ideal(C, i).generators) == set(jump_ideal_generic(C, i))


def test_minor_cap():
    C = presentation_complex(parse_presentation(TWO_ARCS))
    with pytest.raises(MinorCapExceeded):
        jump_ideal(C, 1, cap=1)


def test_minor_cap_from_environment(monkeypatch):
    monkeypatch.setenv("TROPOS_MINOR_CAP", "1")
    with pytest.raises(MinorCapExceeded):
        bnsr_upper_bound(parse_presentation(BS12))


def test_rank_zero_and_degree_errors():
    with pytest.raises(ValueError):
        bnsr_upper_bound(parse_presentation("gens: a\nrel: a^3\n"))
    with pytest.raises(ValueError):
        bnsr_upper_bound(parse_presentation(BS12), degree=2)


TORUS = """
ranks: 1 2 1
vars: x y
d0:
x - 1 ; y - 1
d1:
1 - y
x - 1
"""


def test_chain_data_torus():
    C = parse_chain_data(TORUS)
    assert C.ranks == (1, 2, 1) and C.composition_vanishes()
    for k in (0, 1, 2):
        B = chain_upper_bound(C, k)
        assert B.provenance == Provenance.EXACT
        assert B.complement.equals(SphericalSet.full(2)) is True


def test_chain_data_transpose_and_errors():
    T = parse_chain_data("ranks: 1 2\nvars: x y\nd0:\nx - 1\ny - 1\n", transpose=True)
    assert T.boundary(0) == parse_chain_data("ranks: 1 2\nvars: x y\nd0:\nx - 1 ; y - 1\n").boundary(0)
    with pytest.raises(ValueError):
        parse_chain_data("vars: x\n")
    with pytest.raises(ValueError):
        parse_chain_data("ranks: 1 2\nvars: x\nd0:\nx - 1\n")


def test_audit_cases():
    S = SphericalSet.points([(-1,)])
    empty = BnsFixture("e", SphericalSet.empty(1), "empty")
    rep = audit_inclusion(empty, S)
    assert rep.included is True and rep.strict is True
    rep = audit_inclusion(BnsFixture("s", S, "same"), S)
    assert rep.included is True and rep.strict is False
    big = BnsFixture("b", SphericalSet.full(1), "full")
    assert audit_inclusion(big, S).included is False
    # with an upper-bound complement a failed inclusion is not conclusive
    rep = audit_inclusion(big, S, Provenance.UPPER_BOUND)
    assert rep.included is UNKNOWN
    rep = audit_inclusion(empty, S, Provenance.UPPER_BOUND)
    assert rep.included is True and rep.strict is True
    assert rep.to_json() == {"included": True, "strict": True, "provenance": "UPPER_BOUND"}


def test_fixture_round_trip():
    fx = BnsFixture("bs12", SphericalSet.points([(-1,)]), "reference")
    back = BnsFixture.from_json(fx.to_json())
    assert (back.presentation_id, back.citation, back.convention) == ("bs12", "reference", fx.convention)
    assert back.sigma.equals(fx.sigma) is True


def test_dwyer_fried_examples():
    assert dwyer_fried_test([parse_poly("x - 1")]) is True
    assert dwyer_fried_test([parse_poly("x - 2")]) is False
    assert dwyer_fried_test([parse_poly("x - 2")], "q") is True
    assert dwyer_fried_test([parse_poly("x - 2")], "padic:2") is False
    assert dwyer_fried_test(parse_polys(["x1 - 1", "x2 - 1"])) is True
    assert dwyer_fried_test([parse_poly("x1 + x2 - 2")]) is False
    with pytest.raises(ValueError):
        dwyer_fried_test([])


def test_homology_over_finite_field():
    C = presentation_complex(parse_presentation(BS12))
    K = GF(3)
    # 2 is a root of x - 2 in GF(3) and 1 a root of x - 1, so H_1 jumps at both
    assert homology_dim(C, 1, (K(2),), K) == 1
    assert homology_dim(C, 1, (K(1),), K) == 1
    K5 = GF(5)
    assert homology_dim(C, 1, (K5(3),), K5) == 0


def test_augmentation_type():
    x1, x2 = parse_polys(["x1", "x2"])
    assert augmentation_type([x1 - 1, x2 - 1])
    assert augmentation_type([(x1 - 1) ** 2, (x2 - 1) * (x1 - 1), x2 - 1])
    assert not augmentation_type([x1 - 1])
    assert not augmentation_type([x1 - 2, x2 - 1])
