"""
Summaries in the three modes
============================

The abstractive mode may pair an NP with VPs from other sentences. The
compressive mode keeps phrases within their clause, and the extractive
mode copies clauses as written. Each sentence is tagged new, compressed
or original.
"""

import warnings
from importlib import resources

from phrasefusion.generate import format_provenance, type_distribution
from phrasefusion.ilp import GenerationConfig
from phrasefusion.pipeline import RunConfig, run_topic

amish = str(resources.files("phrasefusion") / "data" / "amish")

for mode in ("abstractive", "compressive", "extractive"):
    cfg = RunConfig(generation=GenerationConfig(L=40, K=3, M=5, mode=mode))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        result = run_topic(amish, cfg)
    print(f"--- {mode}: {result.summary.word_count} words")
    print(format_provenance(result.summary, result.phrases))
    print({k: round(v, 2) for k, v in type_distribution(result.summary).items()})
