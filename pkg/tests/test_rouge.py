from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from phrasefusion.rouge import EmptyReferenceSet, RougeScore, normalize_text, rouge2, rouge_su4, su4_units


def t(s):
    return s.split()


# (candidate, references, ROUGE-2 (P, R), ROUGE-SU4 (P, R)); worked out by hand
CASES = [
    ("the cat sat", ["the cat ran"], (F(1, 2), F(1, 2)), (F(1, 2), F(1, 2))),
    ("a b c", ["a c b"], (0, 0), (F(5, 6), F(5, 6))),
    ("a b c d", ["a b c d"], (1, 1), (1, 1)),
    ("a b a b a b", ["a b c"], (F(1, 5), F(1, 2)), (F(1, 7), F(1, 2))),
    ("a b c", ["a b", "b c d"], (F(1, 2), F(2, 3)), (F(1, 2), F(2, 3))),
    ("", ["a b"], (0, 0), (0, 0)),
    ("a", ["a b"], (0, 0), (1, F(1, 3))),
    ("a b", ["a x1 x2 x3 x4 x5 b"], (0, 0), (F(2, 3), F(2, 27))),
    ("a a", ["a a a"], (1, F(1, 2)), (1, F(1, 2))),
    ("a b", ["a b", "b a"], (F(1, 2), F(1, 2)), (F(5, 6), F(5, 6))),
]


def expected(p, r):
    p, r = F(p), F(r)
    f = 2 * p * r / (p + r) if p + r else F(0)
    return float(p), float(r), float(f)


@pytest.mark.parametrize("cand,refs,r2,su4", CASES)
def test_hand_table(cand, refs, r2, su4):
    for fn, want in ((rouge2, r2), (rouge_su4, su4)):
        got = fn(t(cand), [t(r) for r in refs])
        assert got == pytest.approx(expected(*want), abs=1e-12)


def test_skip_distance_five_is_counted():
    got = rouge_su4(t("a b"), [t("a x1 x2 x3 x4 b")])
    assert got == pytest.approx(expected(1, F(1, 7)), abs=1e-12)


def test_su4_unit_count():
    # 7 unigrams + 20 pairs within five positions
    assert sum(su4_units(list("abcdefg")).values()) == 27


def test_strings_are_normalized():
    assert rouge2("The cat, sat!", ["the cat sat"]) == RougeScore(1.0, 1.0, 1.0)
    assert normalize_text("It's 5 A.M.") == ["it", "s", "5", "a", "m"]


def test_empty_reference_set():
    with pytest.raises(EmptyReferenceSet):
        rouge2(t("a b"), [])
    with pytest.raises(EmptyReferenceSet):
        rouge_su4("a b", [])


words = st.lists(st.sampled_from("a b c d e f".split()), min_size=2, max_size=12)


@given(words)
def test_identity_is_exactly_one(tokens):
    assert rouge2(tokens, [tokens]) == (1.0, 1.0, 1.0)
    assert rouge_su4(tokens, [tokens]) == (1.0, 1.0, 1.0)


@given(words, st.lists(words, min_size=1, max_size=3))
def test_bounded_and_duplicate_refs_invariant(cand, refs):
    for fn in (rouge2, rouge_su4):
        s = fn(cand, refs)
        assert all(0.0 <= v <= 1.0 for v in s)
        assert fn(cand, refs * 2) == pytest.approx(s, abs=1e-12)


@given(words, st.lists(words, min_size=1, max_size=3), st.permutations("abcdef"))
def test_relabeling_invariant(cand, refs, perm):
    m = dict(zip("abcdef", perm))
    for fn in (rouge2, rouge_su4):
        a = fn(cand, refs)
        b = fn([m[w] for w in cand], [[m[w] for w in r] for r in refs])
        assert a == b


@given(words, words, words)
def test_appending_reference_text_never_lowers_overlap(cand, ref, extra):
    # recall numerators grow with reference content; precision cannot drop
    for fn in (rouge2, rouge_su4):
        assert fn(cand, [ref + extra]).precision >= fn(cand, [ref]).precision - 1e-15
