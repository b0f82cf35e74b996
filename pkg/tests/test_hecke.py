import random
from fractions import Fraction

import pytest

from oracles import bs_naive_normal_form
from sigma_hecke.errors import (CharacterNotLambdaVanishing, ContractViolation, ExceedsCap, InCore,
                                InvariantViolation, UndefinedAtBase)
from sigma_hecke.groups import (BaumslagSolitar, Character, Triangular, random_element,
                                tau, word_lengths)
from sigma_hecke.hecke import (PartialPermutation, check_lambda_vanishing, commensuration_indices,
                               core_escape, coset_ball, coset_canonical, density_check, hecke_pair,
                               induced_char, lambda_sample, random_core_element,
                               schlichting_truncation, transversal_witness)

BS23 = BaumslagSolitar(2, 3)
H23 = hecke_pair(BS23)
T2 = Triangular(2, (2,))
HT2 = hecke_pair(T2)


def el(text):
    return BS23.parse_element(text)


def test_coset_canonical_bs():
    assert coset_canonical(H23, el("t a^5")) == coset_canonical(H23, el("t a^7")) == el("t")
    assert coset_canonical(H23, el("a^3")) == BS23.identity()


@pytest.mark.parametrize("G", [BS23, BaumslagSolitar(-2, 3), T2, Triangular(3, (2, 5)), Triangular(4, (3,))],
                         ids=str)
def test_coset_canonical_idempotent_and_lambda_invariant(G):
    pair = hecke_pair(G)
    rng = random.Random(1)
    for _ in range(500 if isinstance(G, BaumslagSolitar) else 150):
        g = random_element(G, rng, rng.randint(0, 7))
        lam = lambda_sample(pair, rng, rng.randint(0, 6))
        c = coset_canonical(pair, g)
        assert coset_canonical(pair, c) == c
        assert coset_canonical(pair, G.multiply(g, lam)) == c
        assert pair.same_coset(g, c)


@pytest.mark.parametrize("G", [T2, Triangular(3, (2, 5))], ids=str)
def test_tri_canonical_matches_membership_oracle(G):
    pair = hecke_pair(G)
    rng = random.Random(2)
    for _ in range(300):
        g = random_element(G, rng, rng.randint(0, 4))
        h = random_element(G, rng, rng.randint(0, 4))
        same = pair.in_lambda(G.multiply(G.inverse(g), h))
        assert (coset_canonical(pair, g) == coset_canonical(pair, h)) == same


def test_tri_canonical_right_elementary():
    g = T2.matrix([[Fraction(1, 2), 7], [0, 2]])
    assert coset_canonical(HT2, g) == coset_canonical(HT2, T2.multiply(g, T2.elementary(1, 2, 1)))


def test_coset_ball():
    assert coset_ball(H23, 0).cosets == (BS23.identity(),)
    b1 = coset_ball(H23, 1)
    assert set(b1.cosets) == {BS23.identity(), el("t"), el("T")}
    # membership oracle: a-letters collapse, so cosets of ball(1) are 3
    assert len({bs_naive_normal_form(2, 3, w)[:-1] for w in ["", "a", "A", "t", "T"]}) == 3
    sizes = [len(coset_ball(H23, r)) for r in range(5)]
    assert sizes == sorted(sizes)
    assert b1.to_json() == {"radius": 1, "cosets": ["e", "t", "t^-1"]}


@pytest.mark.parametrize("m,n", [(2, 3), (3, 2), (1, 2), (2, 1), (-2, 3), (4, -6), (1, 1)])
def test_commensuration_at_t(m, n):
    G = BaumslagSolitar(m, n)
    assert commensuration_indices(hecke_pair(G), G.generator("t")) == (abs(m), abs(n))


def test_commensuration_orbit_oracle():
    # orbit of g*Lambda under a^j for |j| <= 60, counted directly
    for text in ("t", "t^2", "t a t^-1", "t^-1 a t^2"):
        g = el(text)
        for h, idx in ((BS23.inverse(g), 0), (g, 1)):
            orbit = {coset_canonical(H23, BS23.multiply(BS23.a_power(j), h)) for j in range(-60, 61)}
            assert commensuration_indices(H23, g)[idx] == len(orbit)
    assert commensuration_indices(H23, el("t^2")) == (4, 9)  # regression constant
    assert commensuration_indices(H23, el("a^5")) == (1, 1)


def test_commensuration_never_exceeds_cap():
    for m, n in [(2, 3), (1, 2), (3, 2)]:
        G = BaumslagSolitar(m, n)
        pair = hecke_pair(G)
        for g in word_lengths(G, 2):
            commensuration_indices(pair, g, cap=10 * (abs(m) + abs(n)))
    for G in (T2, Triangular(3, (2,))):
        pair = hecke_pair(G)
        for g in word_lengths(G, 2):
            commensuration_indices(pair, g, cap=1000)


def test_commensuration_cap():
    with pytest.raises(ExceedsCap) as info:
        commensuration_indices(H23, el("t^3"), cap=5)
    assert info.value.cap == 5 and info.value.explored > 5


def test_tri_index_at_diagonal():
    assert commensuration_indices(HT2, T2.generator("D(1,2)"), cap=100) == (1, 4)


def test_transversal_examples():
    w = transversal_witness(H23, [el("t")], samples=200, seed=3)
    assert set(w.F) == {el("t"), el("t a")} and w.ok
    for j in range(-20, 21):
        x = BS23.multiply(el("t"), BS23.a_power(j))
        f = w.factor(H23, x)
        assert f is not None and H23.in_lambda(BS23.multiply(x, BS23.inverse(f)))
    assert transversal_witness(H23, [BS23.identity()]).F == (BS23.identity(),)
    w = transversal_witness(H23, [el("a"), el("a^-2")])
    assert all(H23.in_lambda(f) for f in w.F) and w.ok


def test_transversal_ball_and_tri():
    assert transversal_witness(H23, word_lengths(BS23, 2), samples=200, seed=1).ok
    w = transversal_witness(HT2, [s for _, s in T2.generators()], samples=100, seed=2)
    assert w.ok and w.checked == 100


def test_truncation_examples():
    b1 = coset_ball(H23, 1)
    s = schlichting_truncation(H23, el("a"), b1)
    assert s(BS23.identity()) == BS23.identity()
    assert not s.defined_at(el("t"))  # a*t*Lambda is a new coset outside the ball
    s.check()
    assert s.to_json()["provenance"] == "a"


def test_truncation_composition():
    rng = random.Random(5)
    ball = coset_ball(H23, 3)
    for _ in range(100):
        g = random_element(BS23, rng, rng.randint(0, 4))
        h = random_element(BS23, rng, rng.randint(0, 4))
        sg, sh = schlichting_truncation(H23, g, ball), schlichting_truncation(H23, h, ball)
        comp = sg.compose(sh)
        comp.check()
        assert comp.agrees_with(schlichting_truncation(H23, BS23.multiply(g, h), ball))


def test_partial_permutation_injectivity_check():
    ball = coset_ball(H23, 1)
    bad = PartialPermutation(H23, ball, {BS23.identity(): el("t"), el("t"): el("t")}, el("t"))
    with pytest.raises(InvariantViolation):
        bad.check()


def test_induced_char():
    ball = coset_ball(H23, 2)
    chi = tau(BS23)
    s = schlichting_truncation(H23, el("t"), ball)
    assert induced_char(H23, chi, s) == 1
    assert chi(el("t")) == chi(el("t a")) == 1
    with pytest.raises(UndefinedAtBase):
        induced_char(H23, chi, schlichting_truncation(H23, el("t^3"), ball))


def test_induced_char_additive_and_locally_constant():
    rng = random.Random(7)
    ball = coset_ball(H23, 3)
    chi = tau(BS23, 2)
    seen = {}
    done = 0
    while done < 100:
        g = random_element(BS23, rng, rng.randint(0, 3))
        h = random_element(BS23, rng, rng.randint(0, 3))
        sg, sh = schlichting_truncation(H23, g, ball), schlichting_truncation(H23, h, ball)
        comp = sg.compose(sh)
        if BS23.identity() not in comp.mapping or BS23.identity() not in sg.mapping:
            continue
        val = induced_char(H23, chi, comp)
        assert val == chi(g) + chi(h) == induced_char(H23, chi, sg) + chi(h)
        base_image = comp(BS23.identity())
        assert seen.setdefault(base_image, val) == val
        done += 1


def test_character_must_vanish_on_lambda(monkeypatch):
    chi = tau(BS23)
    check_lambda_vanishing(H23, chi)
    # a fake basis that sees the a-exponent
    monkeypatch.setattr(BaumslagSolitar, "basis_values", lambda self, g: (Fraction(sum(g[0::2])),))
    with pytest.raises(CharacterNotLambdaVanishing):
        induced_char(H23, Character(BS23, (1,)), schlichting_truncation(H23, el("t"), coset_ball(H23, 1)))


def test_density_check():
    rng = random.Random(9)
    ball = coset_ball(H23, 2)
    chi = tau(BS23)
    checked = 0
    for _ in range(200):
        h = random_element(BS23, rng, rng.randint(0, 5))
        s = schlichting_truncation(H23, h, ball)
        if BS23.identity() not in s.mapping or induced_char(H23, chi, s) < 0:
            continue
        w = density_check(H23, chi, s)
        assert w.ok and chi(w.g) >= 0 and H23.in_lambda(w.lam)
        checked += 1
    assert checked > 20


def test_core_escape_examples():
    e = core_escape(2, (2,), [[1, 1], [0, 1]])
    assert e.B == T2.diagonal([Fraction(1, 2), 2])
    assert e.conjugate == T2.matrix([[1, Fraction(1, 4)], [0, 1]])
    assert (e.prime, e.valuation, e.case) == (2, -2, "off-diagonal")
    e = core_escape(3, (2,), [[1, 0, 0], [0, -1, 0], [0, 0, -1]])
    G3 = Triangular(3, (2,))
    assert e.B == G3.elementary(1, 2, Fraction(1, 4))
    assert e.conjugate[0][1] == Fraction(-1, 2) and e.valuation == -1
    with pytest.raises(InCore):
        core_escape(3, (2,), [[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    with pytest.raises(InCore):
        core_escape(2, (3,), [[-1, 0], [0, -1]])
    with pytest.raises(ContractViolation):
        core_escape(2, (2,), [[2, 0], [0, Fraction(1, 2)]])


def test_core_escape_odd_prime_diagonal():
    e = core_escape(2, (3,), [[1, 5], [0, 1]])
    assert e.valuation < 0
    e = core_escape(3, (3, 5), [[-1, 0, 0], [0, 1, 0], [0, 0, -1]])
    assert e.B[0][1] == Fraction(1, 3) and e.valuation == -1


def test_core_escape_random():
    rng = random.Random(13)
    for n in (2, 3):
        for P in ((2,), (2, 3)):
            for _ in range(50):
                e = core_escape(n, P, random_core_element(n, rng))
                assert e.valuation < 0
                Triangular(n, P).validate(e.conjugate)
