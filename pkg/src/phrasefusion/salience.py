"""Concept weighting and phrase salience.

Concepts are lemmatized unigrams and bigrams (stopwords removed) plus named
entities.  Every occurrence of a concept contributes the weight of the
paragraph it sits in, so early paragraphs count more; a phrase scores the sum
of the weights of its distinct concepts.
"""

from __future__ import annotations

import math
import re
from collections import defaultdict
from dataclasses import dataclass, field, replace
from functools import lru_cache
from importlib import resources
from typing import NamedTuple, Optional, Sequence

from .treebank import is_punct, lemmatize

__all__ = ["SalienceConfig", "Concept", "ConceptTable", "ConceptExtractor", "EmptyTopic",
           "paragraph_weight", "load_stopwords", "extract_concepts", "concept_occurrences",
           "fallback_entities", "build_concept_table", "phrase_salience", "score_phrases",
           "read_concept_table"]

UNIGRAM, BIGRAM, NE = "unigram", "bigram", "ne"


class EmptyTopic(ValueError):
    pass


@dataclass(frozen=True)
class SalienceConfig:
    B: float = 6.0
    rho: float = 0.5
    stopword_path: Optional[str] = None
    use_ne: bool = True

    def __post_init__(self):
        if not self.B > 1:
            raise ValueError(f"B must exceed 1, got {self.B}")
        if not 0 < self.rho < 1:
            raise ValueError(f"rho must lie in (0, 1), got {self.rho}")


class Concept(NamedTuple):
    kind: str
    key: str


def paragraph_weight(p: int, cfg) -> float:
    """Weight of a concept occurrence in paragraph ``p`` (0-based).

    ``rho**p * B`` while ``p < -log(B)/log(rho)``, otherwise 1.
    """
    if p < 0:
        raise ValueError("paragraph index must be non-negative")
    if p < -(math.log(cfg.B) / math.log(cfg.rho)):
        return cfg.rho ** p * cfg.B
    return 1.0


@lru_cache(maxsize=8)
def load_stopwords(path: Optional[str] = None) -> frozenset:
    if path is None:
        text = resources.files("phrasefusion").joinpath("data/stopwords.txt").read_text("utf-8")
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    return frozenset(w.strip().lower() for w in text.splitlines() if w.strip())


def concept_occurrences(tokens: Sequence[str], tags: Sequence[Optional[str]],
                        ne_spans=(), stopwords=None) -> list:
    """All concept occurrences in a token sequence, repeats included.

    ``ne_spans`` holds ``(start, end, surface)`` triples relative to ``tokens``;
    a span counts when it intersects ``[0, len(tokens))``.
    """
    stop = load_stopwords() if stopwords is None else stopwords
    lemmas = []
    for tok, tag in zip(tokens, tags):
        if is_punct(tok):
            lemmas.append(None)
            continue
        lem = lemmatize(tok, tag)
        lemmas.append(None if tok.lower() in stop or lem in stop else lem)
    out = [Concept(UNIGRAM, lem) for lem in lemmas if lem]
    out += [Concept(BIGRAM, f"{a}_{b}") for a, b in zip(lemmas, lemmas[1:]) if a and b]
    n = len(tokens)
    for start, end, surface in ne_spans:
        if start < n and end > 0:
            key = " ".join(surface.lower().split())
            if key:
                out.append(Concept(NE, key))
    return out


def extract_concepts(tokens, tags, ne_spans=(), stopwords=None) -> set:
    return set(concept_occurrences(tokens, tags, ne_spans, stopwords))


_CAP_RE = re.compile(r"^[A-Z]")


def fallback_entities(tokens: Sequence[str]) -> list:
    """Maximal runs of capitalized tokens, ignoring the sentence-initial token."""
    spans = []
    i = 1
    while i < len(tokens):
        if _CAP_RE.match(tokens[i]):
            j = i
            while j < len(tokens) and _CAP_RE.match(tokens[j]):
                j += 1
            spans.append((i, j, " ".join(tokens[i:j])))
            i = j
        else:
            i += 1
    return spans


class ConceptExtractor:
    """Concept extraction bound to one topic's stopwords and entity spans."""

    def __init__(self, topic, stopwords=None, use_ne=True):
        self.stopwords = load_stopwords() if stopwords is None else stopwords
        self.use_ne = use_ne
        self.entities = defaultdict(list)
        if not use_ne:
            return
        if topic.ne_annotations is not None:
            for m in topic.ne_annotations:
                surface = m.text or ""
                self.entities[m.doc_id, m.sent_idx].append((m.start, m.end, surface))
        else:
            for s in topic.sentences():
                self.entities[s.doc_id, s.sent_idx] = fallback_entities(s.tokens)

    def span_entities(self, doc_id, sent_idx, start=0, end=None):
        """Entity spans of a sentence, shifted to be relative to ``start``."""
        limit = math.inf if end is None else end
        return [(s - start, e - start, surface)
                for s, e, surface in self.entities.get((doc_id, sent_idx), ())
                if s < limit and e > start]

    def sentence_occurrences(self, sentence) -> list:
        ents = self.span_entities(sentence.doc_id, sentence.sent_idx)
        return concept_occurrences(sentence.tokens, sentence.tags, ents, self.stopwords)

    def concepts(self, phrase) -> set:
        start, end = phrase.span
        ents = self.span_entities(phrase.doc_id, phrase.sent_idx, start, end)
        return extract_concepts(phrase.tokens, phrase.tags, ents, self.stopwords)


@dataclass(frozen=True)
class ConceptTable:
    weights: dict
    extractor: Optional[ConceptExtractor] = field(default=None, compare=False, repr=False)

    def __getitem__(self, concept):
        return self.weights[concept]

    def get(self, concept, default=0.0):
        return self.weights.get(concept, default)

    def __contains__(self, concept):
        return concept in self.weights

    def __len__(self):
        return len(self.weights)

    def concepts(self, phrase) -> set:
        if self.extractor is None:
            raise ValueError("concept table has no extractor attached")
        return self.extractor.concepts(phrase)

    def dump(self) -> str:
        rows = sorted(self.weights.items(), key=lambda kv: (-kv[1], kv[0].kind, kv[0].key))
        return "".join(f"{c.kind}\t{c.key}\t{w!r}\n" for c, w in rows)


def read_concept_table(text: str) -> ConceptTable:
    weights = {}
    for line in text.splitlines():
        if line.strip():
            kind, key, w = line.split("\t")
            weights[Concept(kind, key)] = float(w)
    return ConceptTable(weights)


def build_concept_table(topic, cfg: SalienceConfig = SalienceConfig()) -> ConceptTable:
    if not topic.documents or not any(d.sentences for d in topic.documents):
        raise EmptyTopic(f"topic {topic.topic_id!r} has no sentences")
    extractor = ConceptExtractor(topic, load_stopwords(cfg.stopword_path), cfg.use_ne)
    contributions = defaultdict(list)
    for doc in topic.documents:
        for sentence in doc.sentences:
            w = paragraph_weight(sentence.paragraph_idx, cfg)
            for c in extractor.sentence_occurrences(sentence):
                contributions[c].append(w)
    # fsum keeps weights independent of document order
    weights = {c: math.fsum(ws) for c, ws in contributions.items()}
    return ConceptTable({c: w for c, w in weights.items() if w > 0}, extractor)


def phrase_salience(phrase, table: ConceptTable) -> float:
    return math.fsum(table.get(c) for c in table.concepts(phrase))


def score_phrases(phrases, table: ConceptTable) -> list:
    return [replace(p, salience=phrase_salience(p, table)) for p in phrases]
