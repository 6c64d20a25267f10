"""
Which NPs may take which VPs
============================

Two phrases from the same clause are compatible. An NP may also borrow a
VP from a coreferent NP, and a VP may stand in for a near-duplicate one.
"""

import warnings
from importlib import resources

import numpy as np

from phrasefusion.compat import build_compatibility, expand_gamma
from phrasefusion.phrases import extract_topic_phrases
from phrasefusion.salience import build_concept_table, score_phrases
from phrasefusion.treebank import load_topic

# toy case: NP0 and NP2 corefer, VP1 and VP2 say the same thing
gamma = np.eye(3, dtype=np.int8)
print(expand_gamma(gamma, {0: {2}, 2: {0}}, {1: {2}, 2: {1}}))

topic = load_topic(str(resources.files("phrasefusion") / "data" / "amish"))
table = build_concept_table(topic)
phrases = score_phrases(extract_topic_phrases(topic), table)
with warnings.catch_warnings():
    warnings.simplefilter("ignore")  # a few annotated mentions match no NP
    compat, sims, clusters = build_compatibility(topic, phrases, table)
print("pairs allowed by clause:", int(compat.gamma.sum()), " after expansion:", int(compat.gamma_tilde.sum()))
print("largest coreference cluster:", sorted(max(clusters, key=lambda c: len(c.mentions)).mentions))
