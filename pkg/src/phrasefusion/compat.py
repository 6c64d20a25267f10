"""NP/VP compatibility and phrase similarity.

``gamma[i, j]`` marks an NP and a VP governed by the same clause node.  The
expanded matrix ``gamma_tilde`` also admits an NP that can replace a
coreferent NP, and a VP that is a near-duplicate (Jaccard above threshold) of
a VP already compatible with the NP.  The expansion is a single step.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

__all__ = ["CorefCluster", "CompatibilityMatrix", "SimilarityMatrix", "DanglingMention",
           "jaccard", "build_clusters", "np_alternatives", "vp_alternatives",
           "build_gamma", "expand_gamma", "build_similarity", "build_compatibility",
           "dump_matrix", "read_matrix"]

DEFAULT_THRESHOLD = 0.75


class DanglingMention(UserWarning):
    pass


@dataclass(frozen=True)
class CorefCluster:
    cluster_id: int
    mentions: frozenset


@dataclass(frozen=True, eq=False)
class CompatibilityMatrix:
    np_ids: tuple
    vp_ids: tuple
    gamma: np.ndarray
    gamma_tilde: np.ndarray
    alt_np: dict
    alt_vp: dict


@dataclass(frozen=True, eq=False)
class SimilarityMatrix:
    r_np: np.ndarray
    r_vp: np.ndarray
    jaccard_threshold: float = DEFAULT_THRESHOLD


def jaccard(a, b) -> float:
    a, b = set(a), set(b)
    union = len(a | b)
    return len(a & b) / union if union else 0.0


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def _entity_index(topic):
    from .salience import fallback_entities

    index = {}
    if topic.ne_annotations is not None:
        for m in topic.ne_annotations:
            index.setdefault((m.doc_id, m.sent_idx), []).append((m.start, m.end, (m.text or "").lower()))
    else:
        for s in topic.sentences():
            index[s.doc_id, s.sent_idx] = [(a, b, t.lower()) for a, b, t in fallback_entities(s.tokens)]
    return index


def _merge(groups, keys):
    """Union groups (lists of items) that share any key; returns merged groups in first-seen order."""
    uf = _UnionFind(len(groups))
    owner = {}
    for gi, ks in enumerate(keys):
        for k in sorted(ks):
            if k in owner:
                uf.union(owner[k], gi)
            else:
                owner[k] = gi
    merged = {}
    for gi, group in enumerate(groups):
        merged.setdefault(uf.find(gi), []).extend(group)
    return [merged[r] for r in sorted(merged)]


def build_clusters(topic, phrases) -> list:
    """Coreference clusters over extracted NPs.

    Annotated clusters are merged when they share a named-entity surface
    string (case-insensitive); mentions that are not extracted NPs are dropped
    with a :class:`DanglingMention` warning.  Without annotations, NPs whose
    span is exactly a named entity are grouped by entity string.
    """
    entities = _entity_index(topic)
    nps = [p for p in phrases if p.kind == "NP"]
    by_span = {(p.doc_id, p.sent_idx, p.span[0], p.span[1]): p.phrase_id for p in nps}

    if topic.coref_clusters is not None:
        groups = [list(c) for c in topic.coref_clusters]
        keys = []
        for group in groups:
            ks = set()
            for m in group:
                for s, e, surface in entities.get((m.doc_id, m.sent_idx), ()):
                    if m.start <= s and e <= m.end and surface:
                        ks.add(surface)
            keys.append(ks)
        merged = _merge(groups, keys)
        clusters = []
        for group in merged:
            ids = set()
            for m in group:
                pid = by_span.get(m.key)
                if pid is None:
                    warnings.warn(f"mention {m} matches no extracted NP; dropped", DanglingMention, stacklevel=2)
                else:
                    ids.add(pid)
            if ids:
                clusters.append(ids)
    else:
        groups, keys = [], []
        for p in nps:
            ks = {surface for s, e, surface in entities.get((p.doc_id, p.sent_idx), ())
                  if (s, e) == p.span and surface}
            if ks:
                groups.append([p.phrase_id])
                keys.append(ks)
        clusters = [set(g) for g in _merge(groups, keys)]

    order = {p.phrase_id: i for i, p in enumerate(nps)}
    clusters.sort(key=lambda ids: min(order[i] for i in ids))
    return [CorefCluster(k, frozenset(ids)) for k, ids in enumerate(clusters)]


def np_alternatives(clusters) -> dict:
    alt = {}
    for c in clusters:
        for pid in c.mentions:
            alt.setdefault(pid, set()).update(c.mentions - {pid})
    return {k: frozenset(v) for k, v in alt.items()}


def vp_alternatives(phrases, table, threshold=DEFAULT_THRESHOLD) -> dict:
    """VPs whose concept sets have Jaccard index strictly above ``threshold``."""
    if not 0 < threshold <= 1:
        raise ValueError(f"threshold must lie in (0, 1], got {threshold}")
    vps = [p for p in phrases if p.kind == "VP"]
    concepts = [table.concepts(p) for p in vps]
    alt = {}
    for a in range(len(vps)):
        for b in range(a + 1, len(vps)):
            if jaccard(concepts[a], concepts[b]) > threshold:
                alt.setdefault(vps[a].phrase_id, set()).add(vps[b].phrase_id)
                alt.setdefault(vps[b].phrase_id, set()).add(vps[a].phrase_id)
    return {k: frozenset(v) for k, v in alt.items()}


def build_gamma(nps, vps) -> np.ndarray:
    gamma = np.zeros((len(nps), len(vps)), dtype=np.int8)
    for i, n in enumerate(nps):
        for j, v in enumerate(vps):
            if n.parent_s == v.parent_s:
                gamma[i, j] = 1
    return gamma


def _alt_matrix(alt, n):
    """``m[x, y] = 1`` iff ``y in alt[x]`` (index-based alternative sets)."""
    m = np.zeros((n, n), dtype=np.int64)
    for x, ys in alt.items():
        for y in ys:
            m[x, y] = 1
    return m


def expand_gamma(gamma, alt_np, alt_vp) -> np.ndarray:
    """One-step expansion of ``gamma``.

    ``alt_np[i]`` / ``alt_vp[j]`` are index sets of the alternatives of NP ``i``
    and VP ``j``.
    """
    gamma = np.asarray(gamma, dtype=np.int64)
    n_np, n_vp = gamma.shape
    # case 1: N_p in alt(N_i) and gamma[i, q]   -> (A^T gamma)[p, q]
    by_np = _alt_matrix(alt_np, n_np).T @ gamma
    # case 2: V_q in alt(V_j) and gamma[p, j]   -> (gamma A)[p, q]
    by_vp = gamma @ _alt_matrix(alt_vp, n_vp)
    return ((gamma + by_np + by_vp) > 0).astype(np.int8)


def build_similarity(nps, vps, clusters, table, threshold=DEFAULT_THRESHOLD) -> SimilarityMatrix:
    cluster_of = {}
    for c in clusters:
        for pid in c.mentions:
            cluster_of.setdefault(pid, set()).add(c.cluster_id)

    def matrix(items, coref):
        concepts = [table.concepts(p) for p in items]
        r = np.eye(len(items))
        for a in range(len(items)):
            for b in range(a + 1, len(items)):
                if coref and cluster_of.get(items[a].phrase_id, set()) & cluster_of.get(items[b].phrase_id, set()):
                    v = 1.0
                else:
                    v = jaccard(concepts[a], concepts[b])
                r[a, b] = r[b, a] = v
        return r

    return SimilarityMatrix(matrix(nps, True), matrix(vps, False), threshold)


def build_compatibility(topic, phrases, table, threshold=DEFAULT_THRESHOLD):
    """Clusters, compatibility matrix and similarities for one topic's phrases."""
    nps = [p for p in phrases if p.kind == "NP"]
    vps = [p for p in phrases if p.kind == "VP"]
    clusters = build_clusters(topic, phrases)
    alt_np = np_alternatives(clusters)
    alt_vp = vp_alternatives(phrases, table, threshold)
    np_index = {p.phrase_id: i for i, p in enumerate(nps)}
    vp_index = {p.phrase_id: i for i, p in enumerate(vps)}
    gamma = build_gamma(nps, vps)
    gamma_tilde = expand_gamma(
        gamma,
        {np_index[k]: {np_index[x] for x in v} for k, v in alt_np.items()},
        {vp_index[k]: {vp_index[x] for x in v} for k, v in alt_vp.items()},
    )
    compat = CompatibilityMatrix(tuple(np_index), tuple(vp_index), gamma, gamma_tilde, alt_np, alt_vp)
    sims = build_similarity(nps, vps, clusters, table, threshold)
    return compat, sims, clusters


def dump_matrix(m) -> str:
    """Sparse ``i\\tj\\tvalue`` rows for the nonzero entries of ``m``."""
    m = np.asarray(m)
    rows = []
    for i, j in zip(*np.nonzero(m)):
        v = m[i, j]
        rows.append(f"{i}\t{j}\t{int(v) if float(v).is_integer() else repr(float(v))}\n")
    return "".join(rows)


def read_matrix(text, shape, dtype=float) -> np.ndarray:
    m = np.zeros(shape, dtype=dtype)
    for line in text.splitlines():
        if line.strip():
            i, j, v = line.split("\t")
            m[int(i), int(j)] = float(v)
    return m
