"""ROUGE-2 and ROUGE-SU4 with clipped counts and micro-averaged references.

For references ``r_1..r_n`` and candidate ``c`` with unit counts ``cnt``::

    overlap_k = sum_u min(cnt_c(u), cnt_rk(u))
    recall    = sum_k overlap_k / sum_k |r_k|
    precision = sum_k overlap_k / (n * |c|)
    f1        = 2PR / (P + R)

The jackknife used by the TAC harness is not applied.
"""

from __future__ import annotations

import re
from collections import Counter
from typing import NamedTuple, Sequence

from .treebank import lemmatize

__all__ = ["RougeScore", "EmptyReferenceSet", "normalize_text", "bigrams", "su4_units",
           "rouge2", "rouge_su4", "rouge_n", "FORMULA"]

FORMULA = ("recall = sum_ref overlap / sum_ref ref_units; "
           "precision = sum_ref overlap / (n_refs * cand_units); f1 = 2PR/(P+R)")

_WORD_RE = re.compile(r"[a-z0-9]+")


class EmptyReferenceSet(ValueError):
    pass


class RougeScore(NamedTuple):
    precision: float
    recall: float
    f1: float

    @classmethod
    def from_pr(cls, p: float, r: float) -> "RougeScore":
        return cls(p, r, 2 * p * r / (p + r) if p + r > 0 else 0.0)


def normalize_text(text: str, stem: bool = True) -> list:
    """Lowercase alphanumeric tokens, optionally reduced with the lemmatizer."""
    words = _WORD_RE.findall(text.lower())
    return [lemmatize(w) for w in words] if stem else words


def bigrams(tokens: Sequence[str]) -> Counter:
    return Counter(zip(tokens, tokens[1:]))


def su4_units(tokens: Sequence[str], max_skip: int = 4) -> Counter:
    """Unigrams plus ordered pairs at most ``max_skip`` words apart."""
    units = Counter((t,) for t in tokens)
    n = len(tokens)
    for i in range(n):
        for j in range(i + 1, min(n, i + max_skip + 2)):
            units[tokens[i], tokens[j]] += 1
    return units


def _score(cand: Counter, refs: list) -> RougeScore:
    if not refs:
        raise EmptyReferenceSet("no reference summaries")
    overlap = sum(sum((cand & r).values()) for r in refs)
    ref_total = sum(sum(r.values()) for r in refs)
    cand_total = sum(cand.values()) * len(refs)
    recall = overlap / ref_total if ref_total else 0.0
    precision = overlap / cand_total if cand_total else 0.0
    return RougeScore.from_pr(precision, recall)


def _tokens(x):
    return normalize_text(x) if isinstance(x, str) else list(x)


def rouge_n(candidate, references, unit_fn) -> RougeScore:
    refs = [unit_fn(_tokens(r)) for r in references]
    return _score(unit_fn(_tokens(candidate)), refs)


def rouge2(candidate, references) -> RougeScore:
    """ROUGE-2; strings are normalised, token sequences are used as given."""
    return rouge_n(candidate, list(references), bigrams)


def rouge_su4(candidate, references) -> RougeScore:
    return rouge_n(candidate, list(references), su4_units)
