"""
Reading parse trees and extracting phrases
==========================================

A sentence arrives as a bracketed constituency tree. The extractor walks
its clauses and keeps the subject NP and the VPs under each clause.
"""

from importlib import resources

from phrasefusion.phrases import extract_phrases
from phrasefusion.treebank import Sentence, parse_tree, to_bracketed

text = (resources.files("phrasefusion") / "data" / "armed_man.tree").read_text()
tree = parse_tree(text)
print(to_bracketed(tree)[:80], "...")

# level 1 sits directly under the clause, level 2 one coordination deeper
for p in extract_phrases(Sentence("demo", 0, 0, tree)):
    print(f"{p.kind} level {p.level}: {p.text}")

# a pronoun subject is kept but flagged; it may not open a summary sentence
he = extract_phrases(Sentence("demo", 1, 0, parse_tree("(ROOT (S (NP (PRP He)) (VP (VBD left)) (. .)))")))
print([(p.text, p.is_pronoun) for p in he])
