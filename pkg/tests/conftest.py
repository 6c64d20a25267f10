import os
import warnings
from importlib import resources

import pytest

from phrasefusion.compat import build_compatibility
from phrasefusion.phrases import extract_topic_phrases
from phrasefusion.salience import build_concept_table, score_phrases
from phrasefusion.treebank import load_topic

DATA = resources.files("phrasefusion") / "data"
AMISH = str(DATA / "amish")
ARMED_MAN = str(DATA / "armed_man.tree")


@pytest.fixture(scope="session")
def amish_topic():
    return load_topic(AMISH)


@pytest.fixture(scope="session")
def amish_scored(amish_topic):
    """Scored phrases, concept table and compatibility for the bundled topic."""
    table = build_concept_table(amish_topic)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        phrases = score_phrases(extract_topic_phrases(amish_topic), table)
        compat, sims, clusters = build_compatibility(amish_topic, phrases, table)
    return phrases, table, compat, sims, clusters


@pytest.fixture(scope="session")
def phrase_index(amish_scored):
    return {p.phrase_id: p for p in amish_scored[0]}


def write_doc(directory, name, doc_id, timestamp, paragraphs):
    """Write a ``.trees`` file; ``paragraphs`` is a list of lists of bracketed trees."""
    lines = [f"#id {doc_id}", f"#timestamp {timestamp}"]
    for k, para in enumerate(paragraphs):
        if k:
            lines.append("")
        lines.extend(para)
    path = os.path.join(directory, name)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    return path
