from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tropos.abelian import (
    FGAbelianGroup,
    Presentation,
    abelianize,
    commutator,
    determinant,
    free_reduce,
    integer_kernel,
    matmul,
    pair,
    parse_presentation,
    parse_word,
    power,
    smith_normal_form,
    sphere_normalize,
)


def _snf_ok(M):
    U, D, V = smith_normal_form(M)
    assert matmul(matmul(U, M), V) == D
    assert abs(determinant(U)) == 1 and abs(determinant(V)) == 1
    diag = [D[i][i] for i in range(min(len(D), len(D[0])))]
    for i in range(len(D)):
        for j in range(len(D[0])):
            if i != j:
                assert D[i][j] == 0
    assert all(d >= 0 for d in diag)
    for a, b in zip(diag, diag[1:]):
        assert (b == 0) or (a != 0 and b % a == 0)
    return diag


def test_snf_identity():
    assert _snf_ok([[1, 0], [0, 1]]) == [1, 1]


def test_snf_2468():
    assert _snf_ok([[2, 4], [6, 8]]) == [2, 4]


def test_snf_zero():
    U, D, V = smith_normal_form([[0]])
    assert D == [[0]]


@given(st.lists(st.lists(st.integers(-9, 9), min_size=3, max_size=3), min_size=1, max_size=4))
def test_snf_round_trip(M):
    _snf_ok(M)


@given(st.lists(st.lists(st.integers(-5, 5), min_size=4, max_size=4), min_size=1, max_size=3))
def test_integer_kernel(M):
    K = integer_kernel(M, 4)
    for k in K:
        assert all(sum(a * b for a, b in zip(row, k)) == 0 for row in M)
    rank = sum(1 for d in _snf_ok(M) if d)
    assert len(K) == 4 - rank


def test_bs12_abelianization():
    P = parse_presentation("gens: a b\nrel: a b a^-1 b^-2\n")
    H, ab = abelianize(P)
    assert H.rank == 1 and H.torsion == ()
    assert ab.generator_images == ((1,), (0,))


@pytest.mark.parametrize("m", [1, 2, 3, 5])
def test_commutator_power_is_free_rank_two(m):
    P = parse_presentation(f"gens: a b\nrel: [a,b]^{m}\n")
    H, ab = abelianize(P)
    assert H == FGAbelianGroup(2, ())
    assert ab.generator_images == ((1, 0), (0, 1))


def test_cyclic_torsion():
    H, ab = abelianize(parse_presentation("gens: a\nrel: a^3\n"))
    assert H.rank == 0 and H.torsion == (3,)


def test_free_group_no_relators():
    H, _ = abelianize(Presentation(("a", "b"), ()))
    assert H == FGAbelianGroup.free(2)


def test_mixed_torsion_invariant_factors():
    H, _ = abelianize(parse_presentation("gens: a b c\nrel: a^2\nrel: b^6\n"))
    assert (H.rank, H.torsion) == (1, (2, 6))


@given(st.lists(st.lists(st.tuples(st.integers(0, 2), st.sampled_from([1, -1])), max_size=8),
                min_size=1, max_size=3))
def test_relators_map_to_identity(rels):
    P = Presentation(("a", "b", "c"), tuple(free_reduce(r) for r in rels))
    H, ab = abelianize(P)
    for r in P.relators:
        assert ab.word_image(r) == H.identity()


def test_pair_examples():
    assert pair((1, 0), (2, 5)) == 2
    assert pair((Fraction(1, 2), Fraction(1, 3)), (2, 3)) == 2
    # torsion coordinates are ignored
    assert pair((3, 1), (0, 0, 4)) == 0


def test_sphere_normalize_examples():
    assert sphere_normalize((Fraction(2, 3), Fraction(4, 3))) == (1, 2)
    assert sphere_normalize((-1, -1)) == (-1, -1)
    assert sphere_normalize((0, 5)) == (0, 1)
    with pytest.raises(ValueError):
        sphere_normalize((0, 0))


@given(st.lists(st.fractions(-5, 5, max_denominator=6), min_size=1, max_size=3),
       st.fractions(min_value=Fraction(1, 7), max_value=9, max_denominator=7))
def test_sphere_normalize_scale_invariant(chi, r):
    if not any(chi):
        chi = chi[:-1] + [Fraction(1)]
    assert sphere_normalize([r * c for c in chi]) == sphere_normalize(chi)


def test_parse_word_sugar():
    gens = ("a", "b")
    w = parse_word("[a,b]^2", gens)
    assert w == power(commutator(((0, 1),), ((1, 1),)), 2)
    assert parse_word("a^-1 b", gens) == ((0, -1), (1, 1))
    with pytest.raises(ValueError):
        parse_word("c", gens)


def test_presentation_file_format():
    P = parse_presentation("# comment\nname: test\ngens: x y\nrel: x y x^-1 y^-1\n")
    assert P.generators == ("x", "y") and len(P.relators) == 1
