import os

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phrasefusion.treebank import (DocumentParseError, DuplicateDocId, EmptyLabel, MissingMetadata,
                                   NoTokens, TreeParseError, UnbalancedParens, detokenize,
                                   is_punct, lemmatize, load_document, load_topic, parse_tree,
                                   read_mentions, to_bracketed, word_length)
from conftest import AMISH, ARMED_MAN, write_doc


def test_single_clause():
    t = parse_tree("(ROOT (S (NP (DT The) (NN man)) (VP (VBD left)) (. .)))")
    assert t.tokens() == ["The", "man", "left", "."]
    assert t.tags() == ["DT", "NN", "VBD", "."]
    s = t.children[0]
    assert [c.label for c in s.children] == ["NP", "VP", "."]
    assert s.children[0].span == (0, 2)
    assert s.children[1].span == (2, 3)


def test_preterminal_is_leaf():
    leaf = parse_tree("(ROOT (S (NP (NNP Roberts)) (VP (VBD died))))").children[0].children[0].children[0]
    assert leaf.is_leaf and leaf.token == "Roberts" and leaf.pos == "NNP" and leaf.span == (0, 1)


@pytest.mark.parametrize("text,exc", [
    ("(ROOT (S (NP (DT The)))", UnbalancedParens),
    ("(ROOT (S (NP (DT The))))))", UnbalancedParens),
    ("(ROOT ( (DT The)))", EmptyLabel),
    ("(ROOT (S))", NoTokens),
    ("", TreeParseError),
])
def test_malformed(text, exc):
    with pytest.raises(exc):
        parse_tree(text)


def test_parse_error_reports_position():
    with pytest.raises(TreeParseError) as info:
        parse_tree("(ROOT (S (NP (DT The)))")
    assert info.value.position is not None


def test_armed_man_roundtrip():
    with open(ARMED_MAN, encoding="utf-8") as fh:
        text = fh.read()
    t = parse_tree(text)
    assert parse_tree(to_bracketed(t)).structure() == t.structure()
    assert word_length(t.tokens()) == 23


_labels = st.sampled_from(["NP", "VP", "S", "PP", "SBAR", "ADJP"])
_words = st.text(alphabet="abcdefghij", min_size=1, max_size=6)


def _trees(depth):
    leaf = st.tuples(st.sampled_from(["NN", "VB", "DT", "JJ"]), _words).map(lambda p: f"({p[0]} {p[1]})")
    if depth == 0:
        return leaf
    sub = _trees(depth - 1)
    node = st.tuples(_labels, st.lists(st.one_of(leaf, sub), min_size=1, max_size=3)).map(
        lambda p: f"({p[0]} {' '.join(p[1])})")
    return st.one_of(leaf, node)


@settings(max_examples=200, deadline=None)
@given(_trees(3))
def test_bracketed_roundtrip_property(text):
    t = parse_tree(f"(ROOT {text})")
    again = parse_tree(to_bracketed(t))
    assert again.structure() == t.structure()
    assert again.tokens() == t.tokens()


@settings(max_examples=200, deadline=None)
@given(_trees(3))
def test_spans_partition_tokens(text):
    t = parse_tree(f"(ROOT {text})")
    leaves = list(t.leaves())
    assert [leaf.span for leaf in leaves] == [(i, i + 1) for i in range(len(leaves))]


def test_punct_and_length():
    assert is_punct(",") and is_punct("``") and is_punct("-LRB-")
    assert word_length(["The", "man", ",", "left", "."]) == 3
    assert not is_punct("10:45")


def test_detokenize():
    assert detokenize(["He", "said", ",", "``", "no", "''", "."]) == 'He said, "no".'
    assert detokenize(["-LRB-", "a", "-RRB-"]) == "(a)"
    assert detokenize(["Roberts", "'s", "wife", "did", "n't", "go", "."]) == "Roberts's wife didn't go."
    assert detokenize(["at", "10:45", "a.m.", "."]) == "at 10:45 a.m."
    assert detokenize(["was", "tormented", "by", '"', "dreams", '"', "."]) == 'was tormented by "dreams".'


@pytest.mark.parametrize("token,pos,lemma", [
    ("girls", "NNS", "girl"), ("walked", "VBD", "walk"), ("Police", "NNS", "police"),
    ("died", "VBD", "die"), ("killing", "VBG", "kill"), ("described", "VBN", "describe"),
    ("occurred", "VBD", "occur"), ("shot", "VBD", "shoot"), ("was", "VBD", "be"),
    ("children", "NNS", "child"), ("is", "VBZ", "be"), ("said", "VBD", "say"),
])
def test_lemmatize(token, pos, lemma):
    assert lemmatize(token, pos) == lemma


def test_base_forms_untouched():
    assert lemmatize("offer", "VB") == "offer"
    assert lemmatize("need", "VBP") == "need"


def test_load_document_paragraphs(tmp_path):
    write_doc(tmp_path, "a.trees", "d1", "2006-10-02T18:00:00Z",
              [["(ROOT (S (NP (NN A)) (VP (VBD b))))", "(ROOT (S (NP (NN C)) (VP (VBD d))))"],
               ["(ROOT (S (NP (NN E)) (VP (VBD f))))"]])
    doc = load_document(os.path.join(tmp_path, "a.trees"))
    assert doc.doc_id == "d1"
    assert [s.paragraph_idx for s in doc.sentences] == [0, 0, 1]
    assert [s.sent_idx for s in doc.sentences] == [0, 1, 2]


def test_missing_timestamp(tmp_path):
    path = tmp_path / "a.trees"
    path.write_text("#id d1\n(ROOT (S (NP (NN A)) (VP (VBD b))))\n")
    with pytest.raises(MissingMetadata):
        load_document(path)


def test_bad_line_reports_doc_and_line(tmp_path):
    write_doc(tmp_path, "a.trees", "d1", "2006-10-02T18:00:00Z", [["(ROOT (S (NP (NN A))"]])
    with pytest.raises(DocumentParseError) as info:
        load_document(tmp_path / "a.trees")
    assert info.value.doc_id == "d1" and info.value.lineno == 3


def test_duplicate_doc_id(tmp_path):
    for name in ("a.trees", "b.trees"):
        write_doc(tmp_path, name, "same", "2006-10-02T18:00:00Z", [["(ROOT (S (NP (NN A)) (VP (VBD b))))"]])
    with pytest.raises(DuplicateDocId):
        load_topic(tmp_path)


def test_amish_corpus(amish_topic):
    assert [d.doc_id for d in amish_topic.documents] == [f"amish-0{k}" for k in range(1, 6)]
    assert sum(len(d.sentences) for d in amish_topic.documents) == 16
    assert len(amish_topic.coref_clusters) == 5
    assert amish_topic.sentence("amish-02", 1).text == "Roberts killed himself as police stormed the building."


def test_read_mentions_with_text():
    ne = read_mentions(os.path.join(AMISH, "ne.txt"), with_text=True)
    assert any(m.text == "Charles Carl Roberts IV" for m in ne)
