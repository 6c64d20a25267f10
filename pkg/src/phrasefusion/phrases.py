"""Noun- and verb-phrase candidates from constituency trees.

Level-1 phrases are the NP/VP children of a clause node ``S``; level-2 phrases
are the parallel sub-VPs (sub-NPs) of a level-1 VP (NP), extracted only when
there are at least two of them and the parent is not headed by a modal,
link or auxiliary verb.  A clause in subject position (``SBAR``/``S`` before
the first VP, with no NP subject) is emitted as an NP.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Iterable, Optional

from .treebank import Sentence, TreeNode, detokenize, is_punct, lemmatize, word_length

__all__ = ["Phrase", "KindMismatch", "NoSNodeWarning", "extract_phrases",
           "extract_topic_phrases", "same_path", "format_phrase", "dump_phrases"]

NP, VP = "NP", "VP"

PRONOUN_TAGS = frozenset({"PRP", "PRP$", "WP", "WDT"})
LINK_AUX_LEMMAS = frozenset({"be", "seem", "appear", "become", "have", "do"})
_CLAUSE_ROOTS = frozenset({"ROOT", "TOP", ""})


class KindMismatch(ValueError):
    pass


class NoSNodeWarning(UserWarning):
    pass


@dataclass(frozen=True)
class Phrase:
    phrase_id: str
    kind: str
    doc_id: str
    sent_idx: int
    span: tuple
    level: int
    parent_s: str
    tokens: tuple
    tags: tuple
    path: tuple
    is_pronoun: bool = False
    salience: float = 0.0
    sent_length: int = 0

    @property
    def length(self) -> int:
        return word_length(self.tokens)

    @property
    def text(self) -> str:
        return detokenize(self.tokens)

    @property
    def sid(self) -> str:
        return f"{self.doc_id}:{self.sent_idx}"

    @property
    def source(self) -> tuple:
        return (self.doc_id, self.sent_idx)

    def __str__(self):
        return format_phrase(self)


def _base(node: TreeNode) -> str:
    return "" if node.label in ("", "-") else node.base_label


def _subject_clause(children) -> Optional[int]:
    labels = [_base(c) for c in children]
    if VP not in labels:
        return None
    first_vp = labels.index(VP)
    if NP in labels[:first_vp]:
        return None
    for i in range(first_vp - 1, -1, -1):
        if children[i].is_leaf and is_punct(children[i].token):
            continue
        return i if labels[i] in ("SBAR", "S") else None
    return None


def _clauses(node, path=()):
    """Yield ``(path, S node, subject-clause index)`` for every sentence-level clause."""
    label = _base(node)
    if label in _CLAUSE_ROOTS:
        for i, child in enumerate(node.children):
            if _base(child) in _CLAUSE_ROOTS | {"S"}:
                yield from _clauses(child, path + (i,))
    elif label == "S" and not node.is_leaf:
        subj = _subject_clause(node.children)
        yield path, node, subj
        for i, child in enumerate(node.children):
            if i != subj and _base(child) == "S":
                yield from _clauses(child, path + (i,))


def _aux_headed(node: TreeNode) -> bool:
    for child in node.children:
        if _base(child) == VP:
            return False
        if child.is_leaf:
            if child.pos == "MD":
                return True
            if child.pos and child.pos.startswith("VB") and lemmatize(child.token, child.pos) in LINK_AUX_LEMMAS:
                return True
    return False


def _parallel_children(node: TreeNode, kind: str):
    kids = [(i, c) for i, c in enumerate(node.children) if _base(c) == kind]
    if len(kids) < 2:
        return []
    if kind == VP and _aux_headed(node):
        return []
    return kids


def extract_phrases(sentence: Sentence) -> list:
    """Candidate NPs and VPs of one sentence, in tree order.

    A tree without any sentence-level ``S`` node yields ``[]`` and a
    :class:`NoSNodeWarning`.
    """
    tree = sentence.tree
    clauses = list(_clauses(tree))
    if not clauses:
        warnings.warn(f"{sentence.sid}: no S node, sentence skipped", NoSNodeWarning, stacklevel=2)
        return []

    found = {}

    def emit(node, kind, level, path, parent_s):
        tokens = tuple(node.tokens())
        if (kind, node.span) not in found and word_length(tokens) > 0:
            found[kind, node.span] = (node, level, path, parent_s)

    for s_path, s_node, subj in clauses:
        parent_s = f"{sentence.doc_id}:{sentence.sent_idx}:S{'.'.join(map(str, s_path))}"
        for i, child in enumerate(s_node.children):
            label = _base(child)
            if i == subj:
                emit(child, NP, 1, s_path + (i,), parent_s)
            elif label in (NP, VP) and not child.is_leaf:
                emit(child, label, 1, s_path + (i,), parent_s)
                for j, sub in _parallel_children(child, label):
                    emit(sub, label, 2, s_path + (i, j), parent_s)
            elif label in (NP, VP):
                # bare pre-terminal labelled NP/VP
                emit(child, label, 1, s_path + (i,), parent_s)

    out = []
    counters = {NP: 0, VP: 0}
    for kind, span in sorted(found, key=lambda k: (k[1][0], -k[1][1], k[0])):
        node, level, path, parent_s = found[kind, span]
        tokens, tags = tuple(node.tokens()), tuple(node.tags())
        pron = kind == NP and all(t in PRONOUN_TAGS for tok, t in zip(tokens, tags) if not is_punct(tok))
        pid = f"{sentence.doc_id}:{sentence.sent_idx}:{kind}{counters[kind]}"
        counters[kind] += 1
        out.append(Phrase(pid, kind, sentence.doc_id, sentence.sent_idx, span, level,
                          parent_s, tokens, tags, path, pron, 0.0, sentence.length))
    return out


def extract_topic_phrases(topic) -> list:
    phrases = []
    for sentence in topic.sentences():
        phrases.extend(extract_phrases(sentence))
    return phrases


def same_path(a: Phrase, b: Phrase) -> bool:
    """True when ``a`` and ``b`` lie on one ancestor-descendant chain of the same tree."""
    if a.kind != b.kind:
        raise KindMismatch(f"{a.phrase_id} is {a.kind}, {b.phrase_id} is {b.kind}")
    if a.source != b.source:
        return False
    n = min(len(a.path), len(b.path))
    return a.path[:n] == b.path[:n]


def format_phrase(p: Phrase) -> str:
    return f"{p.phrase_id}\t{p.kind}\t{p.level}\t{p.doc_id}:{p.sent_idx}:{p.span[0]}-{p.span[1]}\t{p.text}"


def dump_phrases(phrases: Iterable[Phrase]) -> str:
    return "".join(format_phrase(p) + "\n" for p in phrases)
