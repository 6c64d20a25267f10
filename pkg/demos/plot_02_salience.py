"""
Concept weights and phrase salience
===================================

Concepts are unigrams, bigrams and named entities. An occurrence early in
a document counts more, decaying geometrically until it hits a floor of 1.
"""

from importlib import resources

from phrasefusion.phrases import extract_topic_phrases
from phrasefusion.salience import SalienceConfig, build_concept_table, paragraph_weight, score_phrases
from phrasefusion.treebank import load_topic

cfg = SalienceConfig(B=6.0, rho=0.5)
print("paragraph weights:", [paragraph_weight(p, cfg) for p in range(6)])

topic = load_topic(str(resources.files("phrasefusion") / "data" / "amish"))
table = build_concept_table(topic, cfg)
phrases = score_phrases(extract_topic_phrases(topic), table)

# the highest scoring phrases are the ones a summary will want to keep
for p in sorted(phrases, key=lambda p: -p.salience)[:6]:
    print(f"{p.salience:6.1f}  {p.kind}  {p.text}")
