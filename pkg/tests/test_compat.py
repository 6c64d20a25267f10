import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from phrasefusion.compat import (DanglingMention, build_clusters, build_gamma, build_similarity,
                                 dump_matrix, expand_gamma, jaccard, np_alternatives, read_matrix,
                                 vp_alternatives)
from phrasefusion.phrases import extract_topic_phrases
from phrasefusion.synthetic import random_phrases


def test_expansion_hand_fixture():
    # NP0/VP0, NP1/VP1, NP2/VP2 share clauses; NP0~NP2 corefer; VP1~VP2 near-duplicates
    gamma = np.eye(3, dtype=np.int8)
    alt_np = {0: {2}, 2: {0}}
    alt_vp = {1: {2}, 2: {1}}
    expected = np.array([[1, 0, 1],   # (0,2): NP-alternative case
                         [0, 1, 1],   # (1,2): VP-alternative case; (1,0) stays 0
                         [1, 1, 1]])  # (2,0): NP case, (2,1): VP case, (2,2): base case
    assert np.array_equal(expand_gamma(gamma, alt_np, alt_vp), expected)


def test_expansion_is_single_step():
    gamma = np.array([[1, 0], [0, 0]])
    once = expand_gamma(gamma, {0: {1}, 1: {0}}, {0: {1}, 1: {0}})
    assert np.array_equal(once, [[1, 1], [1, 0]])
    # a second application would add (1, 1); the construction stops after one step
    assert expand_gamma(once, {0: {1}, 1: {0}}, {0: {1}, 1: {0}})[1, 1] == 1


def _equivalence(draw_labels):
    alt = {}
    for i, a in enumerate(draw_labels):
        others = {j for j, b in enumerate(draw_labels) if b == a and j != i}
        if others:
            alt[i] = others
    return alt


@st.composite
def gamma_fixtures(draw):
    n = draw(st.integers(1, 6))
    m = draw(st.integers(1, 6))
    gamma = draw(hnp.arrays(np.int8, (n, m), elements=st.integers(0, 1)))
    np_labels = draw(st.lists(st.integers(0, 2), min_size=n, max_size=n))
    vp_labels = draw(st.lists(st.integers(0, 2), min_size=m, max_size=m))
    return gamma, np_labels, vp_labels


@settings(max_examples=1000, deadline=None)
@given(gamma_fixtures())
def test_expansion_superset_and_idempotent_for_clusters(data):
    gamma, np_labels, vp_labels = data
    alt_np = _equivalence(np_labels)
    gt = expand_gamma(gamma, alt_np, {})
    assert np.all(gt >= gamma)
    assert np.array_equal(expand_gamma(gt, alt_np, {}), gt)
    full = expand_gamma(gamma, alt_np, _equivalence(vp_labels))
    assert np.all(full >= gt)


def test_jaccard():
    assert jaccard({1, 2}, {2, 3}) == 1 / 3
    assert jaccard(set(), set()) == 0.0
    assert jaccard({"a"}, {"a"}) == 1.0


class _Table:
    def __init__(self, concepts):
        self._c = concepts

    def concepts(self, p):
        return self._c[p.phrase_id]


def test_vp_alternative_threshold_is_strict():
    rng = np.random.default_rng(0)
    _, vps = random_phrases(rng, 0, 3)
    ids = [v.phrase_id for v in vps]
    table = _Table({ids[0]: {1, 2, 3, 4}, ids[1]: {1, 2, 3}, ids[2]: {1, 2, 3, 4, 5}})
    # J(0,1) = 0.75 exactly, J(0,2) = 0.8, J(1,2) = 0.6
    alt = vp_alternatives(vps, table, 0.75)
    assert alt == {ids[0]: frozenset({ids[2]}), ids[2]: frozenset({ids[0]})}


def test_amish_clusters(amish_topic):
    phrases = extract_topic_phrases(amish_topic)
    with pytest.warns(DanglingMention):
        clusters = build_clusters(amish_topic, phrases)
    roberts = {"amish-02:0:NP0", "amish-02:1:NP0", "amish-04:0:NP0", "amish-04:1:NP0",
               "amish-05:0:NP0", "amish-05:1:NP0"}
    assert any(set(c.mentions) == roberts for c in clusters)
    assert any(set(c.mentions) == {"amish-01:0:NP0", "amish-03:0:NP0"} for c in clusters)
    alt = np_alternatives(clusters)
    assert "amish-02:1:NP0" in alt["amish-02:0:NP0"]


def test_dangling_count(amish_topic):
    phrases = extract_topic_phrases(amish_topic)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        build_clusters(amish_topic, phrases)
    assert sum(issubclass(w.category, DanglingMention) for w in caught) == 3


def test_fallback_clusters_without_annotations(amish_topic):
    from phrasefusion.treebank import Topic
    bare = Topic("t", amish_topic.documents)
    clusters = build_clusters(bare, extract_topic_phrases(bare))
    # only amish-02's "Charles Carl Roberts IV" is a capitalised run that is not sentence-initial
    assert [set(c.mentions) for c in clusters] == [{"amish-02:0:NP0"}]


def test_amish_matrices(amish_scored):
    phrases, table, compat, sims, clusters = amish_scored
    nps = [p for p in phrases if p.kind == "NP"]
    vps = [p for p in phrases if p.kind == "VP"]
    assert compat.gamma.shape == (len(nps), len(vps))
    assert np.all(compat.gamma_tilde >= compat.gamma)
    assert np.array_equal(compat.gamma, build_gamma(nps, vps))
    for r in (sims.r_np, sims.r_vp):
        assert np.array_equal(r, r.T)
        assert np.all(np.diag(r) == 1.0)
        assert r.min() >= 0 and r.max() <= 1
    i = compat.np_ids.index("amish-02:0:NP0")
    j = compat.np_ids.index("amish-04:1:NP0")
    assert sims.r_np[i, j] == 1.0


def test_gamma_tilde_lets_coreferent_np_take_vp(amish_scored):
    compat = amish_scored[2]
    i = compat.np_ids.index("amish-02:0:NP0")   # Charles Carl Roberts IV
    j = compat.vp_ids.index("amish-02:1:VP0")   # killed himself ...
    k = compat.vp_ids.index("amish-04:1:VP0")   # left what they described ...
    assert compat.gamma[i, j] == 0 and compat.gamma_tilde[i, j] == 1
    assert compat.gamma_tilde[i, k] == 1


def test_similarity_pronoun_cluster():
    rng = np.random.default_rng(1)
    nps, vps = random_phrases(rng, 2, 1)
    table = _Table({nps[0].phrase_id: {1}, nps[1].phrase_id: {2}, vps[0].phrase_id: {3}})
    from phrasefusion.compat import CorefCluster
    cl = [CorefCluster(0, frozenset({nps[0].phrase_id, nps[1].phrase_id}))]
    sims = build_similarity(nps, vps, cl, table)
    assert sims.r_np[0, 1] == 1.0
    assert build_similarity(nps, vps, [], table).r_np[0, 1] == 0.0


def test_matrix_dump_roundtrip(amish_scored):
    sims = amish_scored[3]
    assert np.array_equal(read_matrix(dump_matrix(sims.r_vp), sims.r_vp.shape), sims.r_vp)
