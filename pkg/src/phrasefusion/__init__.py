"""Phrase-based abstractive multi-document summarization.

NPs and VPs are extracted from parsed news documents, scored by the weighted
concepts they carry, and recombined into new sentences by an exact 0-1
integer program.
"""

from .compat import build_compatibility, expand_gamma
from .generate import Summary, SummarySentence, assemble, classify_sentence, type_distribution
from .ilp import GenerationConfig, IlpProblem, IlpSolution, build_problem, validate_solution
from .phrases import Phrase, extract_phrases, extract_topic_phrases
from .pipeline import RunConfig, run_topic, summarize_topic
from .rouge import RougeScore, rouge2, rouge_su4
from .salience import SalienceConfig, build_concept_table, paragraph_weight, score_phrases
from .solver import solve_brute, solve_ilp, solve_lp
from .treebank import Topic, load_topic, parse_tree

__version__ = "0.1.0"

__all__ = [
    "GenerationConfig", "IlpProblem", "IlpSolution", "Phrase", "RougeScore", "RunConfig",
    "SalienceConfig", "Summary", "SummarySentence", "Topic", "assemble", "build_compatibility",
    "build_concept_table", "build_problem", "classify_sentence", "expand_gamma", "extract_phrases",
    "extract_topic_phrases", "load_topic", "paragraph_weight", "parse_tree", "rouge2", "rouge_su4", "run_topic",
    "score_phrases", "solve_brute", "solve_ilp", "solve_lp", "summarize_topic", "type_distribution",
    "validate_solution",
]
