"""Turn an ILP solution into ordered, readable summary sentences.

Each selected NP becomes the subject of one sentence, followed by the VPs it
was paired with.  VPs are ordered by the timestamp of their document and then
by their position in the source; sentences are ordered by the earliest
timestamp among their VPs.
"""

from __future__ import annotations

import re
import warnings
from dataclasses import dataclass, field
from datetime import datetime
from typing import Optional

from .ilp import EXTRACTIVE, GenerationConfig, IlpProblem, IlpSolution
from .treebank import detokenize, is_punct, word_length

__all__ = ["SummarySentence", "Summary", "EmptySolution", "NEW", "COMPRESSED", "ORIGINAL",
           "assemble", "classify_sentence", "type_distribution", "format_provenance",
           "parse_provenance", "render_sentence"]

NEW, COMPRESSED, ORIGINAL = "new", "compressed", "original"
KIND_LETTER = {NEW: "N", COMPRESSED: "C", ORIGINAL: "O"}
LETTER_KIND = {v: k for k, v in KIND_LETTER.items()}
_FINAL = (".", "!", "?")


class EmptySolution(UserWarning):
    pass


@dataclass(frozen=True)
class SummarySentence:
    np: str
    vps: tuple
    text: str
    pseudo_timestamp: Optional[datetime]
    kind: str = ""
    tokens: tuple = field(default=(), compare=False)

    @property
    def word_count(self) -> int:
        return word_length(self.tokens)


@dataclass(frozen=True)
class Summary:
    sentences: tuple
    word_count: int

    @property
    def text(self) -> str:
        return "".join(s.text + "\n" for s in self.sentences)

    def __len__(self):
        return len(self.sentences)


def _index(phrases) -> dict:
    return phrases if isinstance(phrases, dict) else {p.phrase_id: p for p in phrases}


def _timestamp(topic, doc_id):
    return topic.document(doc_id).timestamp


def _finish(tokens):
    """Capitalise the first word and close the sentence."""
    tokens = list(tokens)
    if tokens:
        tokens[0] = tokens[0][:1].upper() + tokens[0][1:]
    if tokens and not any(tokens[-1].endswith(p) for p in _FINAL):
        tokens.append(".")
    return tuple(tokens)


def render_sentence(np_phrase, vp_phrases, conjunction: Optional[str] = "and") -> tuple:
    """Tokens of ``NP VP1, VP2, ..., <conjunction> VPn.``

    With ``conjunction=None`` the VPs are joined by commas only.
    """
    tokens = list(np_phrase.tokens)
    for k, vp in enumerate(vp_phrases):
        if k:
            tokens.append(",")
            if conjunction and k == len(vp_phrases) - 1:
                tokens.append(conjunction)
        body = list(vp.tokens)
        # strip a trailing full stop inside non-final VPs
        while k < len(vp_phrases) - 1 and body and body[-1] in _FINAL:
            body.pop()
        tokens.extend(body)
    return _finish(tokens)


def classify_sentence(sentence: SummarySentence, phrases) -> str:
    """``new`` / ``compressed`` / ``original`` from the provenance of its phrases.

    Original means every non-punctuation token of the clause-level NPs and
    VPs of the clauses involved is covered by a selected phrase.
    """
    index = _index(phrases)
    used = [index[sentence.np]] + [index[v] for v in sentence.vps]
    if len({p.source for p in used}) >= 2:
        return NEW
    clauses = {p.parent_s for p in used}
    covered = set()
    for p in used:
        covered.update(range(*p.span))
    for p in index.values():
        if p.parent_s in clauses and p.level == 1 and p.source == used[0].source:
            for offset, tok in enumerate(p.tokens):
                if not is_punct(tok) and p.span[0] + offset not in covered:
                    return COMPRESSED
    return ORIGINAL


def _vp_order(topic, vp):
    return (_timestamp(topic, vp.doc_id), vp.doc_id, vp.sent_idx, vp.span[0])


def _extractive_tokens(topic, np_phrase, vps):
    sent = topic.sentence(np_phrase.doc_id, np_phrase.sent_idx)
    end = max(v.span[1] for v in vps)
    return _finish(sent.tokens[np_phrase.span[0]:end])


def assemble(solution: IlpSolution, problem: IlpProblem, phrases, topic,
             cfg: GenerationConfig = GenerationConfig(), use_then: bool = False) -> Summary:
    """Build the summary for an optimal (or incumbent) solution.

    Conjunctions are inserted only while the running word count stays within
    ``cfg.L``; otherwise VPs are joined by commas.  ``use_then`` swaps "and"
    for "then" when the VPs come from documents with strictly increasing
    timestamps.
    """
    index = _index(phrases)
    chosen = [name for name in solution.selected("a")]
    if not chosen:
        warnings.warn("no NP selected; summary is empty", EmptySolution, stacklevel=2)
        return Summary((), 0)
    groups = {}
    for name, v in solution.assignment.items():
        if v and name.startswith("g"):
            i, j = map(int, name[1:].split("_"))
            groups.setdefault(i, []).append(j)

    drafts = []
    for name in chosen:
        i = int(name[1:])
        np_phrase = index[problem.np_ids[i]]
        vps = sorted((index[problem.vp_ids[j]] for j in groups.get(i, ())), key=lambda v: _vp_order(topic, v))
        if not vps:
            continue
        pseudo = min(_timestamp(topic, v.doc_id) for v in vps)
        drafts.append((pseudo, np_phrase.doc_id, np_phrase.sent_idx, np_phrase.span[0], np_phrase, vps))
    drafts.sort(key=lambda d: d[:4])

    budget = sum(d[4].length + sum(v.length for v in d[5]) for d in drafts)
    sentences = []
    for pseudo, _, _, _, np_phrase, vps in drafts:
        if cfg.mode == EXTRACTIVE:
            tokens = _extractive_tokens(topic, np_phrase, vps)
        else:
            conj = None
            if len(vps) > 1 and budget + 1 <= cfg.L:
                stamps = [_timestamp(topic, v.doc_id) for v in vps]
                rising = all(a < b for a, b in zip(stamps, stamps[1:]))
                conj = "then" if use_then and rising else "and"
                budget += 1
            tokens = render_sentence(np_phrase, vps, conj)
        draft = SummarySentence(np_phrase.phrase_id, tuple(v.phrase_id for v in vps),
                                detokenize(tokens), pseudo, "", tokens)
        sentences.append(SummarySentence(draft.np, draft.vps, draft.text, pseudo,
                                         classify_sentence(draft, index), tokens))
    return Summary(tuple(sentences), sum(s.word_count for s in sentences))


def type_distribution(summary) -> dict:
    sentences = summary.sentences if isinstance(summary, Summary) else list(summary)
    counts = {NEW: 0, COMPRESSED: 0, ORIGINAL: 0}
    for s in sentences:
        counts[s.kind] += 1
    total = sum(counts.values())
    return {k: (v / total if total else 0.0) for k, v in counts.items()}


def format_provenance(summary: Summary, phrases) -> str:
    """One line per sentence: ``[n:K] {phrase (doc:sent)} ...``."""
    index = _index(phrases)
    lines = []
    for n, s in enumerate(summary.sentences, 1):
        parts = [f"[{n}:{KIND_LETTER[s.kind]}]"]
        for pid in (s.np,) + s.vps:
            p = index[pid]
            parts.append(f"{{{p.text} ({p.sid})}}")
        lines.append(" ".join(parts))
    return "".join(line + "\n" for line in lines)


_LINE_RE = re.compile(r"\[(\d+):([NCO])\]((?:\s*\{.*?\s\([^()\s]+\)\})+)\s*$")
_ITEM_RE = re.compile(r"\{(.*?)\s\(([^()\s]+)\)\}")


def parse_provenance(text: str) -> list:
    """Inverse of :func:`format_provenance`: ``[(n, kind, [(phrase, sid), ...]), ...]``."""
    out = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        m = _LINE_RE.match(line.strip())
        if not m:
            raise ValueError(f"line {lineno}: not a provenance line: {line!r}")
        items = [(a, b) for a, b in _ITEM_RE.findall(m.group(3))]
        out.append((int(m.group(1)), LETTER_KIND[m.group(2)], items))
    return out
