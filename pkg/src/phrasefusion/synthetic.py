"""Random instances for solver checks and randomized pipeline tests."""

from __future__ import annotations

import numpy as np

from .compat import SimilarityMatrix
from .ilp import MODES, GenerationConfig, NoCandidates, build_problem
from .phrases import Phrase
from .treebank import Document, Topic

__all__ = ["random_phrases", "random_phrase_problem", "perturbed_topic", "random_run_config"]

_PATHS = ((0,), (0, 0), (0, 1), (1,), (1, 0))


def random_phrases(rng, n_np, n_vp, n_sent=2):
    """Scored phrases with random salience, length, position and pronoun flag."""
    out = {"NP": [], "VP": []}
    for kind, count in (("NP", n_np), ("VP", n_vp)):
        for k in range(count):
            sent = int(rng.integers(n_sent))
            length = int(rng.integers(1, 6))
            path = _PATHS[int(rng.integers(len(_PATHS)))]
            out[kind].append(Phrase(
                phrase_id=f"d:{sent}:{kind}{k}", kind=kind, doc_id="d", sent_idx=sent,
                span=(k, k + length), level=len(path), parent_s=f"d:{sent}:S",
                tokens=tuple(f"w{k}_{t}" for t in range(length)), tags=("NN",) * length,
                path=path, is_pronoun=kind == "NP" and rng.random() < 0.15,
                salience=float(rng.integers(0, 41)) / 4, sent_length=int(rng.integers(0, 16))))
    return out["NP"], out["VP"]


def _sim(rng, n):
    r = np.eye(n)
    levels = np.array([0.0, 0.0, 0.25, 0.5, 1.0])
    for a in range(n):
        for b in range(a + 1, n):
            r[a, b] = r[b, a] = levels[int(rng.integers(len(levels)))]
    return r


def random_phrase_problem(rng, max_vars: int = 18, mode: str = "abstractive", attempts: int = 1000):
    """An ILP shaped like real pipeline output with at most ``max_vars`` variables."""
    for _ in range(attempts):
        n_np = int(rng.integers(1, 4))
        n_vp = int(rng.integers(1, 4))
        nps, vps = random_phrases(rng, n_np, n_vp)
        gamma_tilde = (rng.random((n_np, n_vp)) < 0.6).astype(np.int8)
        sims = SimilarityMatrix(_sim(rng, n_np), _sim(rng, n_vp))
        cfg = GenerationConfig(L=int(rng.integers(3, 21)), K=int(rng.integers(1, 4)),
                               M=int(rng.integers(0, 13)), mode=mode)
        try:
            problem = build_problem(nps, vps, gamma_tilde, sims, cfg, gamma=gamma_tilde)
        except NoCandidates:
            continue
        if problem.n <= max_vars:
            return problem
    raise RuntimeError(f"no instance with at most {max_vars} variables after {attempts} attempts")


def perturbed_topic(rng, topic: Topic, min_docs: int = 1) -> Topic:
    """Random sub-topic: a subset of documents, each cut to a random prefix.

    Annotations pointing at dropped sentences are removed.
    """
    docs = list(topic.documents)
    keep = sorted(rng.choice(len(docs), size=int(rng.integers(min_docs, len(docs) + 1)), replace=False))
    new_docs = []
    for k in keep:
        d = docs[k]
        n = int(rng.integers(1, len(d.sentences) + 1))
        new_docs.append(Document(d.doc_id, d.timestamp, d.sentences[:n]))
    kept = {(d.doc_id, s.sent_idx) for d in new_docs for s in d.sentences}
    coref = ne = None
    if topic.coref_clusters is not None:
        coref = tuple(c for c in (tuple(m for m in cl if (m.doc_id, m.sent_idx) in kept)
                                  for cl in topic.coref_clusters) if c)
    if topic.ne_annotations is not None:
        ne = tuple(m for m in topic.ne_annotations if (m.doc_id, m.sent_idx) in kept)
    return Topic(topic.topic_id, tuple(new_docs), coref, ne)


def random_run_config(rng):
    """Random generation settings drawn from the ranges the tests sweep."""
    return GenerationConfig(L=int(rng.choice([50, 100, 250])), K=int(rng.choice([1, 3, 10])),
                            M=int(rng.integers(0, 8)), mode=str(rng.choice(MODES)))
