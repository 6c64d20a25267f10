"""Bracketed constituency trees, documents and topics.

Trees are read from Penn-Treebank style bracketed strings, e.g.::

    (S (NP (DT An) (JJ armed) (NN man)) (VP (VBD walked)))

A pre-terminal such as ``(NN man)`` becomes a single leaf node carrying both
the tag (``label`` and ``pos``) and the word (``token``).
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass, field
from datetime import datetime, timezone
from functools import lru_cache
from importlib import resources
from typing import Iterator, Optional, Sequence

__all__ = [
    "TreeParseError", "UnbalancedParens", "EmptyLabel", "NoTokens",
    "TopicLoadError", "MissingMetadata", "DuplicateDocId", "DocumentParseError",
    "TreeNode", "Sentence", "Document", "Topic", "Mention",
    "parse_tree", "to_bracketed", "is_punct", "word_length", "detokenize",
    "load_document", "load_topic", "read_mentions", "lemmatize",
]


class TreeParseError(ValueError):
    """Malformed bracketed tree."""

    def __init__(self, message, position=None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class UnbalancedParens(TreeParseError):
    pass


class EmptyLabel(TreeParseError):
    pass


class NoTokens(TreeParseError):
    pass


class TopicLoadError(Exception):
    pass


class MissingMetadata(TopicLoadError):
    pass


class DuplicateDocId(TopicLoadError):
    pass


class DocumentParseError(TopicLoadError):
    """A tree inside a document file failed to parse."""

    def __init__(self, doc_id, lineno, cause):
        super().__init__(f"{doc_id}, line {lineno}: {cause}")
        self.doc_id = doc_id
        self.lineno = lineno
        self.cause = cause


@dataclass(frozen=True, eq=False)
class TreeNode:
    label: str
    children: tuple = ()
    token: Optional[str] = None
    pos: Optional[str] = None
    span: tuple = (0, 0)

    @property
    def is_leaf(self) -> bool:
        return not self.children

    @property
    def base_label(self) -> str:
        """Label with function tags and indices stripped (``NP-SBJ-1`` -> ``NP``)."""
        if self.label.startswith("-"):
            return self.label
        return re.split(r"[-=]", self.label, maxsplit=1)[0]

    def leaves(self) -> Iterator["TreeNode"]:
        if self.is_leaf:
            yield self
        else:
            for child in self.children:
                yield from child.leaves()

    def tokens(self) -> list:
        return [leaf.token for leaf in self.leaves()]

    def tags(self) -> list:
        return [leaf.pos for leaf in self.leaves()]

    def walk(self, path=()):
        """Pre-order traversal yielding ``(path, node)``; path is a tuple of child indices."""
        yield path, self
        for i, child in enumerate(self.children):
            yield from child.walk(path + (i,))

    def structure(self):
        """Hashable structural summary, used for round-trip comparisons."""
        return (self.label, self.token, self.span,
                tuple(c.structure() for c in self.children))

    def __str__(self):
        return to_bracketed(self)


_TOKEN_RE = re.compile(r"\(|\)|[^\s()]+")


def parse_tree(text: str) -> TreeNode:
    """Parse one bracketed tree.

    Raises:
        UnbalancedParens: missing or surplus parentheses, or trailing material.
        EmptyLabel: an opening parenthesis not followed by a label.
        NoTokens: a node (or the whole tree) without any word.
        TreeParseError: other malformed input, e.g. a word mixed with subtrees.
    """
    toks = [(m.group(), m.start()) for m in _TOKEN_RE.finditer(text)]
    if not toks:
        raise NoTokens("empty tree text")
    counter = [0]

    def node(i):
        # toks[i] is "("
        if i + 1 >= len(toks):
            raise UnbalancedParens("unclosed parenthesis", toks[i][1])
        label, lpos = toks[i + 1]
        if label in ("(", ")"):
            raise EmptyLabel("missing label after '('", lpos)
        i += 2
        children = []
        words = []
        while True:
            if i >= len(toks):
                raise UnbalancedParens("unclosed parenthesis", toks[-1][1] + len(toks[-1][0]))
            tok, pos = toks[i]
            if tok == ")":
                i += 1
                break
            if tok == "(":
                child, i = node(i)
                children.append(child)
            else:
                words.append((tok, pos))
                i += 1
        if words and children:
            raise TreeParseError(f"word {words[0][0]!r} mixed with subtrees", words[0][1])
        if len(words) > 1:
            raise TreeParseError(f"pre-terminal {label!r} holds several words", words[1][1])
        if words:
            start = counter[0]
            counter[0] += 1
            return TreeNode(label, (), words[0][0], label, (start, start + 1)), i
        if not children:
            raise NoTokens(f"node {label!r} has no words", lpos)
        return TreeNode(label, tuple(children), None, None,
                        (children[0].span[0], children[-1].span[1])), i

    if toks[0][0] != "(":
        raise TreeParseError(f"expected '(' but found {toks[0][0]!r}", toks[0][1])
    root, end = node(0)
    if end != len(toks):
        raise UnbalancedParens("unexpected material after tree", toks[end][1])
    return root


def to_bracketed(tree: TreeNode) -> str:
    if tree.is_leaf:
        return f"({tree.label} {tree.token})"
    return "(" + tree.label + " " + " ".join(to_bracketed(c) for c in tree.children) + ")"


_WORDCHAR_RE = re.compile(r"\w")


def is_punct(token: str) -> bool:
    """True for tokens made only of punctuation (``,``, ``''``) and PTB bracket tokens."""
    return token in _BRACKETS or _WORDCHAR_RE.search(token) is None


def word_length(tokens: Sequence[str]) -> int:
    return sum(1 for t in tokens if not is_punct(t))


_BRACKETS = {"-LRB-": "(", "-RRB-": ")", "-LSB-": "[", "-RSB-": "]",
             "-LCB-": "{", "-RCB-": "}", "``": '"', "''": '"'}
_ATTACH_LEFT = {",", ".", ";", ":", "?", "!", "%", ")", "]", "}", "n't"}
_ATTACH_RIGHT = {"(", "[", "{", "$"}


def detokenize(tokens: Sequence[str]) -> str:
    """Space-join tokens, attaching punctuation and clitics to their neighbours."""
    out = []
    glue = False
    quote_open = False
    for raw in tokens:
        tok = _BRACKETS.get(raw, raw)
        left = tok in _ATTACH_LEFT or (tok.startswith("'") and len(tok) > 1)
        if tok == '"':
            left = quote_open
            quote_open = not quote_open
        if tok == "." and out and out[-1].endswith("."):
            # abbreviation already carries the full stop ("a.m." + ".")
            continue
        if out and not left and not glue:
            out.append(" ")
        out.append(tok)
        glue = tok in _ATTACH_RIGHT or (tok == '"' and quote_open)
    return "".join(out)


@dataclass(frozen=True)
class Sentence:
    doc_id: str
    sent_idx: int
    paragraph_idx: int
    tree: TreeNode
    tokens: tuple = field(init=False)
    tags: tuple = field(init=False)
    length: int = field(init=False)

    def __post_init__(self):
        toks = tuple(self.tree.tokens())
        object.__setattr__(self, "tokens", toks)
        object.__setattr__(self, "tags", tuple(self.tree.tags()))
        object.__setattr__(self, "length", word_length(toks))

    @property
    def sid(self) -> str:
        return f"{self.doc_id}:{self.sent_idx}"

    @property
    def text(self) -> str:
        return detokenize(self.tokens)


@dataclass(frozen=True)
class Document:
    doc_id: str
    timestamp: datetime
    sentences: tuple

    def __post_init__(self):
        for i, s in enumerate(self.sentences):
            if s.sent_idx != i:
                raise ValueError(f"{self.doc_id}: sentence index {s.sent_idx} at position {i}")
            if i and s.paragraph_idx < self.sentences[i - 1].paragraph_idx:
                raise ValueError(f"{self.doc_id}: paragraph index decreases at sentence {i}")


@dataclass(frozen=True)
class Mention:
    """A half-open token span ``[start, end)`` in sentence ``sent_idx`` of ``doc_id``."""

    doc_id: str
    sent_idx: int
    start: int
    end: int
    text: Optional[str] = None

    @property
    def key(self):
        return (self.doc_id, self.sent_idx, self.start, self.end)

    def __str__(self):
        return f"{self.doc_id}:{self.sent_idx}:{self.start}-{self.end}"


@dataclass(frozen=True)
class Topic:
    topic_id: str
    documents: tuple
    coref_clusters: Optional[tuple] = None
    ne_annotations: Optional[tuple] = None

    def __post_init__(self):
        seen = set()
        for doc in self.documents:
            if doc.doc_id in seen:
                raise DuplicateDocId(f"duplicate doc_id {doc.doc_id!r} in topic {self.topic_id!r}")
            seen.add(doc.doc_id)

    def document(self, doc_id: str) -> Document:
        for doc in self.documents:
            if doc.doc_id == doc_id:
                return doc
        raise KeyError(doc_id)

    def sentence(self, doc_id: str, sent_idx: int) -> Sentence:
        return self.document(doc_id).sentences[sent_idx]

    def sentences(self) -> Iterator[Sentence]:
        for doc in self.documents:
            yield from doc.sentences


def _parse_timestamp(value: str) -> datetime:
    value = value.strip()
    if value.endswith(("Z", "z")):
        value = value[:-1] + "+00:00"
    ts = datetime.fromisoformat(value)
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


def load_document(path) -> Document:
    """Read one document file.

    Line 1 is ``#id <doc_id>``, line 2 ``#timestamp <ISO-8601>``, followed by one
    tree per line; blank lines separate paragraphs.
    """
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    header = {}
    body_start = 0
    for lineno, line in enumerate(lines[:2], start=1):
        m = re.match(r"#(id|timestamp)\s+(\S.*)$", line.strip())
        if m:
            header[m.group(1)] = m.group(2).strip()
            body_start = lineno
    doc_id = header.get("id")
    if doc_id is None:
        raise MissingMetadata(f"{path}: missing '#id' header")
    if "timestamp" not in header:
        raise MissingMetadata(f"{path}: document {doc_id!r} has no '#timestamp' header")
    try:
        ts = _parse_timestamp(header["timestamp"])
    except ValueError as exc:
        raise MissingMetadata(f"{path}: bad timestamp for {doc_id!r}: {exc}") from None

    sentences = []
    paragraph = 0
    pending_break = False
    for lineno, line in enumerate(lines[body_start:], start=body_start + 1):
        if not line.strip():
            pending_break = bool(sentences)
            continue
        if pending_break:
            paragraph += 1
            pending_break = False
        try:
            tree = parse_tree(line)
        except TreeParseError as exc:
            raise DocumentParseError(doc_id, lineno, exc) from exc
        sentences.append(Sentence(doc_id, len(sentences), paragraph, tree))
    return Document(doc_id, ts, tuple(sentences))


_SPAN_RE = re.compile(r"^(?P<doc>[^\s:]+):(?P<sent>\d+):(?P<start>\d+)-(?P<end>\d+)$")


def _parse_span(text, where):
    m = _SPAN_RE.match(text)
    if not m:
        raise TopicLoadError(f"{where}: malformed mention {text!r}")
    start, end = int(m.group("start")), int(m.group("end"))
    if end <= start:
        raise TopicLoadError(f"{where}: empty span {text!r}")
    return m.group("doc"), int(m.group("sent")), start, end


def read_mentions(path, with_text=False):
    """Read a coreference file (``with_text=False``) or a named-entity file.

    Coreference: one cluster per line, space separated ``doc:sent:start-end`` spans.
    Named entities: one mention per line, span followed by the surface string.
    """
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            where = f"{path}, line {lineno}"
            if with_text:
                span, _, surface = line.partition(" ")
                out.append(Mention(*_parse_span(span, where), text=surface.strip() or None))
            else:
                out.append(tuple(Mention(*_parse_span(s, where)) for s in line.split()))
    return tuple(out)


DOC_SUFFIX = ".trees"
COREF_FILE = "coref.txt"
NE_FILE = "ne.txt"


def load_topic(path, topic_id=None, coref_path=None, ne_path=None) -> Topic:
    """Load every ``*.trees`` document in ``path`` (sorted by file name) plus the
    optional ``coref.txt`` and ``ne.txt`` annotation files.

    ``coref_path`` / ``ne_path`` point at annotation files elsewhere; they must
    exist when given.
    """
    path = os.fspath(path)
    names = sorted(n for n in os.listdir(path) if n.endswith(DOC_SUFFIX))
    docs = [load_document(os.path.join(path, n)) for n in names]
    coref = ne = None
    coref_path = coref_path or os.path.join(path, COREF_FILE)
    ne_path = ne_path or os.path.join(path, NE_FILE)
    if os.path.exists(coref_path):
        coref = read_mentions(coref_path)
    if os.path.exists(ne_path):
        ne = read_mentions(ne_path, with_text=True)
        ne = tuple(_fill_surface(m, docs) for m in ne)
    topic_id = topic_id or os.path.basename(os.path.normpath(path))
    return Topic(topic_id, tuple(docs), coref, ne)


def _fill_surface(mention, docs):
    if mention.text is not None:
        return mention
    for doc in docs:
        if doc.doc_id == mention.doc_id:
            toks = doc.sentences[mention.sent_idx].tokens[mention.start:mention.end]
            return Mention(*mention.key, text=" ".join(toks))
    return mention


# --------------------------------------------------------------------------
# lemmatization

@lru_cache(maxsize=None)
def _exceptions():
    table = {}
    text = resources.files("phrasefusion").joinpath("data/lemma_exceptions.tsv").read_text("utf-8")
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        form, lemma, cls = line.split("\t")
        table[(form, cls)] = lemma
    return table


_VOWELS = set("aeiou")
# stems that regain a silent "e" after -ed/-ing removal
_E_ENDINGS = ("at", "iz", "ag", "ib", "id", "ud", "uc", "ir", "ur", "ar", "yz", "ys",
              "rg", "dg", "rv", "lv", "nc", "rc", "ns", "ps", "ok", "ak", "ik", "ov", "av", "iv", "is", "us", "as")
_NO_UNDOUBLE = set("lsz")


def _classify(pos):
    if pos is None:
        return None
    if pos in ("NNS", "NNPS"):
        return "noun"
    if pos in ("VBD", "VBG", "VBN", "VBZ"):
        return "verb"
    if pos in ("VB", "VBP", "MD"):
        return "base"
    return "other"


def _strip_plural(w):
    if len(w) <= 3 or w.endswith(("ss", "us", "is")):
        return w
    if w.endswith("ies") and len(w) > 4:
        return w[:-3] + "y"
    if w.endswith(("ches", "shes", "sses", "xes", "zes")):
        return w[:-2]
    if w.endswith("s"):
        return w[:-1]
    return w


def _repair_stem(stem):
    if len(stem) >= 4 and stem[-1] == stem[-2] and stem[-1] not in _VOWELS | _NO_UNDOUBLE:
        return stem[:-1]
    if stem.endswith(_E_ENDINGS) or stem[-1:] in ("v", "c", "u"):
        return stem + "e"
    if (len(stem) == 3 and stem[0] not in _VOWELS and stem[1] in _VOWELS
            and stem[2] not in _VOWELS | set("wxy")):
        return stem + "e"
    return stem


def _strip_verb(w):
    if w.endswith("ied") and len(w) > 4:
        return w[:-3] + "y"
    if w.endswith("ied"):
        return w[:-1]
    if w.endswith("ed") and len(w) > 4:
        return _repair_stem(w[:-2])
    if w.endswith("ing") and len(w) > 5:
        return _repair_stem(w[:-3])
    if w.endswith("ies") and len(w) > 4:
        return w[:-3] + "y"
    if w.endswith(("ches", "shes", "sses", "xes", "zes", "oes")):
        return w[:-2]
    if w.endswith("s") and not w.endswith(("ss", "us", "is")) and len(w) > 3:
        return w[:-1]
    return w


def lemmatize(token: str, pos: Optional[str] = None) -> str:
    """Rule-based lemma of ``token`` given its Penn tag.

    ``pos=None`` applies verb rules and then plural rules, for untagged text.
    """
    w = token.lower()
    cls = _classify(pos)
    table = _exceptions()
    for c in {"base": ("verb",), None: ("verb", "noun")}.get(cls, (cls,)):
        if (w, c) in table:
            return table[(w, c)]
    if not w.isalpha():
        return w
    if cls == "noun":
        return _strip_plural(w)
    if cls == "verb":
        return _strip_verb(w)
    if cls is None:
        stripped = _strip_verb(w) if w.endswith(("ed", "ing")) else w
        return _strip_plural(stripped) if stripped == w else stripped
    return w
