"""Canonical word arithmetic, checked against brute force and growth series."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from morselab.errors import ParseError, PreconditionError
from morselab.graphs import build_c4, build_cycle, build_gamma_d, build_p4
from morselab.words import (
    EPSILON,
    RAAG,
    RACG,
    Presentation,
    cyclically_reduce,
    enumerate_products,
    geodesic_power_check,
    is_loxodromic,
    max_join_subword_length,
    special_subgroup_member,
)

from .oracles import brute_canonical, elements_up_to, growth_sphere_sizes

C4 = Presentation(build_c4(), RACG)
P4 = Presentation(build_p4(), RAAG)
GAMMA2 = Presentation(build_gamma_d(2), RACG)


def w(p, text):
    return p.reduce(p.parse_word(text))


# -- parsing / formatting ------------------------------------------------------


def test_parse_simple():
    assert C4.parse_word("a1 b1 a1") == bytes([0, 2, 0])


def test_parse_exponent_raag():
    word = P4.parse_word("a b^-1")
    assert word == bytes([0, 3])


def test_parse_exponent_racg_normalized():
    assert C4.parse_word("a1^-1") == C4.parse_word("a1")


def test_parse_unknown_generator():
    with pytest.raises(ParseError):
        C4.parse_word("zz")


def test_parse_bad_exponent():
    with pytest.raises(ParseError):
        P4.parse_word("a^2")


def test_format_empty():
    assert C4.format_word(EPSILON) == "ε"


def test_format_roundtrip():
    word = w(P4, "a b^-1 c d^-1")
    assert P4.reduce(P4.parse_word(P4.format_word(word))) == word


# -- reduction ------------------------------------------------------------------


def test_involution_cancels():
    assert w(C4, "a1 a1") == EPSILON


def test_commuting_sandwich_cancels():
    # a1 and b1 commute in C4, so a1 b1 a1 = b1
    assert w(C4, "a1 b1 a1") == w(C4, "b1")


def test_noncommuting_does_not_cancel():
    assert len(w(C4, "a1 a2 a1")) == 3


def test_raag_inverse_cancels():
    assert w(P4, "a b b^-1") == w(P4, "a")
    assert w(P4, "a b a^-1") == w(P4, "b")  # a, b adjacent, hence commute
    assert w(P4, "a d a^-1") != w(P4, "d")  # a, d not adjacent


def test_raag_same_sign_blocks():
    assert w(P4, "a a") == bytes([0, 0])


def test_reduce_idempotent_samples():
    rng = random.Random(3)
    for p in (C4, P4, GAMMA2):
        letters = p.letters()
        for _ in range(80):
            raw = bytes(rng.choice(letters) for _ in range(rng.randint(0, 12)))
            once = p.reduce(raw)
            assert p.reduce(once) == once


def test_reduce_matches_bruteforce():
    rng = random.Random(5)
    for p in (C4, P4, GAMMA2):
        letters = p.letters()
        for _ in range(120):
            raw = bytes(rng.choice(letters) for _ in range(rng.randint(0, 8)))
            assert p.reduce(raw) == brute_canonical(p, raw)


def test_reduce_rejects_bad_codes():
    from morselab.errors import ValidationError

    with pytest.raises(ValidationError):
        C4.reduce(bytes([99]))
    with pytest.raises(ValidationError):
        C4.reduce(bytes([1]))  # odd codes never appear for RACGs


# -- group axioms (property-based) ---------------------------------------------


def racg_words(p, max_len=10):
    return st.lists(
        st.sampled_from(p.letters()), min_size=0, max_size=max_len
    ).map(lambda ls: p.reduce(bytes(ls)))


@given(racg_words(GAMMA2), racg_words(GAMMA2), racg_words(GAMMA2))
@settings(max_examples=150, deadline=None)
def test_associativity_gamma2(u, v, x):
    p = GAMMA2
    assert p.multiply(p.multiply(u, v), x) == p.multiply(u, p.multiply(v, x))


@given(racg_words(P4), racg_words(P4))
@settings(max_examples=150, deadline=None)
def test_inverse_and_length_p4(u, v):
    p = P4
    assert p.multiply(u, p.inverse(u)) == EPSILON
    assert p.inverse(p.inverse(u)) == u
    uv = p.multiply(u, v)
    assert len(uv) <= len(u) + len(v)
    assert (len(u) + len(v) - len(uv)) % 2 == 0


@given(racg_words(GAMMA2))
@settings(max_examples=100, deadline=None)
def test_racg_self_inverse_letters(u):
    assert GAMMA2.inverse(u) == GAMMA2.reduce(u[::-1])


def test_support_is_spelling_invariant():
    rng = random.Random(9)
    for _ in range(60):
        raw = bytes(rng.choice(P4.letters()) for _ in range(rng.randint(1, 8)))
        word = P4.reduce(raw)
        for other in (P4.multiply(word, EPSILON), P4.reduce(word)):
            assert P4.support(other) == P4.support(word)


# -- canonical length equals BFS distance (growth-series cross-check) -----------


@pytest.mark.parametrize(
    "p,kind,depth",
    [(C4, RACG, 5), (P4, RAAG, 4), (GAMMA2, RACG, 4)],
)
def test_ball_census_matches_growth_series(p, kind, depth):
    table = elements_up_to(p, depth)
    by_len = [0] * (depth + 1)
    for word, dist in table.items():
        assert len(word) == dist
        by_len[len(word)] += 1
    assert by_len == growth_sphere_sizes(p.graph, kind, depth)


# -- special subgroup membership -------------------------------------------------


def test_special_membership():
    g = GAMMA2.graph
    s1 = frozenset({g.index("a2"), g.index("b2")})
    assert special_subgroup_member(GAMMA2, w(GAMMA2, "a2 b2 a2"), s1)
    assert not special_subgroup_member(GAMMA2, w(GAMMA2, "a2 b1"), s1)
    assert special_subgroup_member(GAMMA2, EPSILON, frozenset())


# -- cyclic reduction and loxodromy ----------------------------------------------


def test_cyclic_reduction_roundtrip():
    rng = random.Random(21)
    for p in (P4, GAMMA2):
        for _ in range(100):
            raw = bytes(rng.choice(p.letters()) for _ in range(rng.randint(0, 10)))
            u = p.reduce(raw)
            conj, core = cyclically_reduce(p, u)
            assert p.multiply(p.multiply(conj, core), p.inverse(conj)) == u
            # core is cyclically reduced: no single-letter conjugation shortens
            for code in p.letters():
                x = bytes([code])
                conjugated = p.multiply(p.multiply(x, core), p.inverse(x))
                assert len(conjugated) >= len(core)


def test_cyclic_core_of_conjugate():
    u = w(P4, "a d a^-1")
    conj, core = cyclically_reduce(P4, u)
    assert core == w(P4, "d")
    assert conj == w(P4, "a")


def test_loxodromic_examples():
    assert is_loxodromic(P4, w(P4, "a d"))
    assert is_loxodromic(P4, w(P4, "a d a d"))
    assert not is_loxodromic(P4, w(P4, "b"))
    assert not is_loxodromic(P4, w(P4, "a d a^-1"))  # conjugate of a letter
    assert not is_loxodromic(P4, w(P4, "a c"))  # support inside st(b)


def test_loxodromic_rejects_identity():
    with pytest.raises(PreconditionError):
        is_loxodromic(P4, EPSILON)


def test_loxodromic_rejects_racg():
    with pytest.raises(PreconditionError):
        is_loxodromic(C4, w(C4, "a1"))


def test_loxodromic_rejects_join_graph():
    join_p = Presentation(build_c4(), RAAG)  # C4 = join of two pairs
    with pytest.raises(PreconditionError):
        is_loxodromic(join_p, bytes([0]))


def test_loxodromic_matches_bruteforce_on_small_ball():
    from .oracles import brute_join_extendable

    table = elements_up_to(P4, 4)
    for u in table:
        if not u:
            continue
        _, core = cyclically_reduce(P4, u)
        if not core:
            continue
        expected = not brute_join_extendable(P4.graph, P4.support(core))
        assert is_loxodromic(P4, u) == expected, P4.format_word(u)


# -- join subwords -----------------------------------------------------------------


def test_join_subword_lengths():
    assert max_join_subword_length(P4, EPSILON) == 0
    assert max_join_subword_length(P4, w(P4, "a")) == 1
    assert max_join_subword_length(P4, w(P4, "a d a d a d")) == 1
    # (a d a)^2 reduces to a word with an a a block, support {a} extends
    sq = P4.multiply(w(P4, "a d a"), w(P4, "a d a"))
    assert max_join_subword_length(P4, sq) == 2


def test_join_subwords_stay_bounded_under_powers():
    gens = [w(P4, "a d a"), w(P4, "d a d")]
    for u in gens + [P4.multiply(gens[0], gens[1])]:
        power = EPSILON
        values = []
        for _ in range(6):
            power = P4.multiply(power, u)
            values.append(max_join_subword_length(P4, power))
        assert max(values) <= 2
        assert values[-1] == values[-2]  # plateau, not growth


def test_join_subword_racg_rejected():
    with pytest.raises(PreconditionError):
        max_join_subword_length(C4, EPSILON)


# -- periodic geodesics ----------------------------------------------------------


def test_geodesic_power_check():
    assert geodesic_power_check(GAMMA2, w(GAMMA2, "a2 b2"))
    assert geodesic_power_check(P4, w(P4, "a d"))
    # a0, a1 commute, so (a0 a1)^2 = ε
    assert not geodesic_power_check(GAMMA2, w(GAMMA2, "a0 a1"))
    # (a d d a^-1)^k = a d^2k a^-1 grows linearly but slower than 4k
    assert not geodesic_power_check(P4, w(P4, "a d d a^-1"))


# -- product enumeration -----------------------------------------------------------


def test_enumerate_products_free_pair():
    gens = [w(GAMMA2, "a1 b1 a1"), w(GAMMA2, "b1 a1 b1")]
    table = enumerate_products(GAMMA2, gens, 3)
    assert w(GAMMA2, "a1 b1 a1") in table
    # factor sequences multiply back to the key
    for word, seq in table.items():
        acc = EPSILON
        for tag in seq:
            g = gens[tag] if tag >= 0 else GAMMA2.inverse(gens[~tag])
            acc = GAMMA2.multiply(acc, g)
        assert acc == word
