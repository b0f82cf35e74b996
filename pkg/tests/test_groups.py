import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from oracles import (bs_affine, bs_ball_bruteforce, bs_naive_normal_form, bs_word_letters, matinv, matmul)
from sigma_hecke.errors import InvariantViolation, ParseError
from sigma_hecke.groups import (BaumslagSolitar, Character, IntegerLine, Triangular, ball, cayley_ball,
                                char_eval, character_basis, connectivity_probe, parse_character,
                                parse_group, random_element, tau, unipotent_conjugation_check,
                                word_lengths)

BS23 = BaumslagSolitar(2, 3)
PARAMS = [(2, 3), (3, 2), (1, 2), (2, 1), (-2, 3), (2, -3), (1, 1), (1, -1), (2, 2), (4, 6)]
words = st.lists(st.sampled_from("aAtT"), max_size=14)


def parse_letters(G, letters):
    return G.parse_element("".join(letters)) if letters else G.identity()


def test_parse_group():
    assert parse_group("BS(2,3)") == BS23
    assert parse_group(" tri(3; 2,5) ") == Triangular(3, (2, 5))
    assert parse_group("Z") == IntegerLine()
    for bad in ("BS(0,3)", "BS(2)", "TRI(1;2)", "TRI(2;4)", "SL(2)"):
        with pytest.raises(ParseError):
            parse_group(bad)


def test_relator():
    assert BS23.parse_element("t a^2 t^-1") == BS23.a_power(3)
    assert BS23.parse_element("t a^4 T") == BS23.a_power(6)
    assert BS23.parse_element("T a^3 t") == BS23.a_power(2)


@pytest.mark.parametrize("m,n", PARAMS)
@given(w=words)
def test_normal_form_matches_rewriting_oracle(m, n, w):
    G = BaumslagSolitar(m, n)
    g = parse_letters(G, w)
    assert g == bs_naive_normal_form(m, n, w)
    assert G.is_normal(g)


@pytest.mark.parametrize("m,n", PARAMS)
@given(u=words, v=words, w=words)
def test_group_axioms(m, n, u, v, w):
    G = BaumslagSolitar(m, n)
    a, b, c = (parse_letters(G, x) for x in (u, v, w))
    assert G.multiply(G.multiply(a, b), c) == G.multiply(a, G.multiply(b, c))
    assert G.multiply(a, G.inverse(a)) == G.identity() == G.multiply(G.inverse(a), a)
    # the product agrees with normalizing the concatenated word
    assert G.multiply(a, b) == bs_naive_normal_form(m, n, list(u) + list(v))
    # a homomorphic image: the affine representation
    assert bs_affine(m, n, bs_word_letters(G.multiply(a, b))) == bs_affine(m, n, list(u) + list(v))


def test_canonical_form_uniqueness_under_insertions():
    rng = random.Random(21)
    inserts = ["tT", "Tt", "aA", "Aa", "taaTAAA", "AAAtaaT", "TaaatAA", "aaTAAAt"]
    for _ in range(500):
        m, n = rng.choice([(2, 3), (3, 2), (1, 2)])
        G = BaumslagSolitar(m, n)
        w = [rng.choice("aAtT") for _ in range(rng.randint(0, 10))]
        u = list(w)
        for _ in range(rng.randint(1, 3)):
            pos = rng.randint(0, len(u))
            rel = rng.choice(inserts[:4]) if (m, n) != (2, 3) else rng.choice(inserts)
            u[pos:pos] = list(rel)
        assert parse_letters(G, w) == parse_letters(G, u)


def test_ball_examples():
    assert ball(BS23, 0) == {BS23.identity()}
    assert ball(BS23, 1) == {(0,), (1,), (-1,), (0, 1, 0), (0, -1, 0)}
    # regression constant, confirmed by brute-force enumeration of words
    assert len(ball(BS23, 3)) == 53 == len(bs_ball_bruteforce(2, 3, 3))
    assert set(word_lengths(BS23, 4)) == bs_ball_bruteforce(2, 3, 4)


@pytest.mark.parametrize("G", [BS23, BaumslagSolitar(1, 2), IntegerLine(), Triangular(2, (2,)), Triangular(3, (2,))],
                         ids=str)
def test_ball_monotone_and_symmetric(G):
    R = 3 if not isinstance(G, Triangular) else 2
    for r in range(R):
        assert ball(G, r) <= ball(G, r + 1)
    assert all(G.inverse(g) in ball(G, R) for g in ball(G, R))


def test_word_lengths_are_geodesic():
    lengths = word_lengths(BS23, 4)
    for g, d in lengths.items():
        if d:
            assert any(lengths.get(BS23.multiply(g, s)) == d - 1 for _, s in BS23.generators())


def test_char_eval_examples():
    assert char_eval(tau(BS23), BS23.parse_element("t a t a^-5")) == 2
    T = Triangular(2, (2,))
    chi = character_basis(2, (2,))[0]
    assert char_eval(chi, T.diagonal([2, Fraction(1, 2)])) == -2


@given(u=words, v=words, k=st.integers(-50, 50))
def test_tau_additive_and_vanishes_on_a(u, v, k):
    chi = tau(BS23, Fraction(3, 2))
    a, b = parse_letters(BS23, u), parse_letters(BS23, v)
    assert chi(BS23.multiply(a, b)) == chi(a) + chi(b)
    assert chi(BS23.a_power(k)) == 0
    assert chi(BS23.identity()) == 0


def test_tri_invariants_and_closure():
    rng = random.Random(2)
    for n, P in [(2, (2,)), (3, (2, 5)), (4, (3,))]:
        G = Triangular(n, P)
        for _ in range(50):
            g = random_element(G, rng, rng.randint(0, 6))
            h = random_element(G, rng, rng.randint(0, 6))
            G.validate(G.multiply(g, h))
            G.validate(G.inverse(g))
            assert [list(r) for r in G.inverse(g)] == matinv(g)
            assert [list(r) for r in G.multiply(g, h)] == matmul(g, h)
            for chi in character_basis(n, P):
                assert chi(G.multiply(g, h)) == chi(g) + chi(h)


def test_tri_invariant_violations():
    G = Triangular(2, (2,))
    for bad in ([[1, 0], [1, 1]], [[3, 0], [0, Fraction(1, 3)]], [[2, 0], [0, 2]],
                [[1, Fraction(1, 3)], [0, 1]], [[1, 0, 0], [0, 1, 0]]):
        with pytest.raises(InvariantViolation):
            G.matrix(bad)


def test_tri_serialization():
    G = Triangular(2, (2,))
    g = G.matrix([[2, Fraction(3, 4)], [0, Fraction(1, 2)]])
    assert G.to_json(g) == [["2/1", "3/4"], ["0/1", "1/2"]]
    assert G.parse_element(G.token(g)) == g


def test_unipotent_conjugation():
    assert unipotent_conjugation_check(2, (2,), 2, 1, 2, 1) == 4
    assert unipotent_conjugation_check(2, (2,), 2, 1, 2, 0) == 4
    assert unipotent_conjugation_check(3, (3,), 3, 1, 3, Fraction(1, 3)) == 9
    G = Triangular(3, (3,))
    A = G.diag_pair(1, 3, 3)
    conj = G.product(A, G.elementary(1, 3, Fraction(1, 3)), G.inverse(A))
    assert conj[0][2] == 3


def test_character_basis_sizes():
    for n, P in [(2, (2,)), (3, (2, 5)), (4, (2, 3, 5)), (5, (2, 3)), (2, (7,)), (3, (3,))]:
        assert len(character_basis(n, P)) == (n - 1) * len(P)
    assert len(character_basis(2, (2,))) == 1
    assert len(character_basis(3, (2, 5))) == 4


def test_basis_vanishes_on_unipotents():
    rng = random.Random(4)
    G = Triangular(4, (2, 3))
    basis = character_basis(4, (2, 3))
    for _ in range(50):
        g = G.identity()
        for _ in range(rng.randint(1, 6)):
            i = rng.randint(1, 3)
            j = rng.randint(i + 1, 4)
            g = G.multiply(g, G.elementary(i, j, Fraction(rng.randint(-20, 20), rng.choice([1, 2, 3, 4, 9]))))
        assert all(chi(g) == 0 for chi in basis)


def test_parse_character():
    G = Triangular(3, (2, 5))
    chi = parse_character(G, "1, 0, -1/2, 0")
    assert chi.coeffs == (1, 0, Fraction(-1, 2), 0)
    with pytest.raises(ValueError):
        parse_character(G, "1,2")
    assert Character(BS23, (2,)).to_json()["coefficients"] == {"tau": "2/1"}


def test_cayley_ball_structure():
    cb = cayley_ball(BS23, 6)
    lines, skipped = cb.line_counts()
    assert lines and all((lc.up, lc.down) == (3, 2) for lc in lines)
    interior = [v for v in cb.lengths if cb.is_interior(v)]
    assert all(cb.degree(v) == 4 for v in interior)
    deep = [v for v, d in cb.lengths.items() if d <= 2]
    assert all(cb.relator_closes(v) for v in deep)
    assert cb.relator_path() == ["t", "a", "a", "T", "A", "A", "A"]


def test_a_lines_are_lambda_cosets():
    cb = cayley_ball(BS23, 4)
    for line in cb.a_lines():
        assert len({g[:-1] for g in line}) == 1


def test_connectivity_probe():
    B21 = BaumslagSolitar(2, 1)
    rep = connectivity_probe(B21, tau(B21), 0, 4, 7)
    assert rep.connected and rep.count == 1
    rep = connectivity_probe(BS23, tau(BS23), 0, 4, 4)
    assert rep.count > 1
    assert connectivity_probe(BS23, tau(BS23), None, 3, 3).count == 1
    assert connectivity_probe(IntegerLine(), Character(IntegerLine(), (1,)), 0, 3, 3).count == 1
    with pytest.raises(ValueError):
        connectivity_probe(BS23, tau(BS23), 0, 3, 2)


def test_integer_line():
    Z = IntegerLine()
    assert Z.parse_element("a^-3") == -3 and Z.parse_element("7") == 7
    assert len(ball(Z, 3)) == 7
