"""End-to-end run over one or more topics, and run configuration."""

from __future__ import annotations

import dataclasses
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

from .compat import DEFAULT_THRESHOLD, build_compatibility
from .generate import Summary, assemble, format_provenance
from .ilp import GenerationConfig, build_problem, serialize_problem
from .phrases import dump_phrases, extract_topic_phrases
from .salience import SalienceConfig, build_concept_table, load_stopwords, score_phrases
from .solver import LimitExceeded, solve_ilp, write_solution
from .treebank import DOC_SUFFIX, Topic, load_topic

__all__ = ["RunConfig", "ConfigError", "TopicResult", "read_config", "summarize_topic",
           "run_topic", "write_artifacts", "find_topics", "summarize_all"]


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    salience: SalienceConfig = SalienceConfig()
    generation: GenerationConfig = GenerationConfig()
    jaccard_threshold: float = DEFAULT_THRESHOLD
    topic_dir: Optional[str] = None
    out_dir: Optional[str] = None
    coref: Optional[str] = None
    ne: Optional[str] = None
    node_limit: Optional[int] = None
    time_limit: Optional[float] = None
    seed: int = 0
    workers: int = 1
    use_then: bool = False

    def __post_init__(self):
        if not 0 < self.jaccard_threshold <= 1:
            raise ConfigError(f"jaccard_threshold must lie in (0, 1], got {self.jaccard_threshold}")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")

    def check_paths(self):
        """Every path named in the config must exist before a run starts."""
        for name in ("topic_dir", "coref", "ne"):
            value = getattr(self, name)
            if value is not None and not os.path.exists(value):
                raise ConfigError(f"{name}: no such path {value!r}")
        sw = self.salience.stopword_path
        if sw is not None and not os.path.exists(sw):
            raise ConfigError(f"stopwords: no such file {sw!r}")


# flat key -> (section, field, parser)
_KEYS = {
    "B": ("salience", "B", float),
    "rho": ("salience", "rho", float),
    "stopwords": ("salience", "stopword_path", str),
    "use_ne": ("salience", "use_ne", None),
    "L": ("generation", "L", int),
    "K": ("generation", "K", int),
    "M": ("generation", "M", int),
    "mode": ("generation", "mode", str),
    "jaccard_threshold": (None, "jaccard_threshold", float),
    "topic_dir": (None, "topic_dir", str),
    "out_dir": (None, "out_dir", str),
    "coref": (None, "coref", str),
    "ne": (None, "ne", str),
    "node_limit": (None, "node_limit", int),
    "time_limit": (None, "time_limit", float),
    "seed": (None, "seed", int),
    "workers": (None, "workers", int),
    "use_then": (None, "use_then", None),
}


def _bool(text):
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def build_config(values: dict, base: RunConfig = RunConfig()) -> RunConfig:
    """Apply ``key -> value`` overrides (already typed or strings) to ``base``."""
    sections = {"salience": {}, "generation": {}, None: {}}
    for key, value in values.items():
        section, name, parse = _KEYS[key]
        if isinstance(value, str):
            value = (parse or _bool)(value)
        sections[section][name] = value
    try:
        sal = dataclasses.replace(base.salience, **sections["salience"])
        gen = dataclasses.replace(base.generation, **sections["generation"])
        return dataclasses.replace(base, salience=sal, generation=gen, **sections[None])
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def read_config(path, base: RunConfig = RunConfig()) -> RunConfig:
    """Parse a flat ``key = value`` file; ``#`` starts a comment."""
    values = {}
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config: {exc.strerror}") from None
    with fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            key, value = key.strip().replace("-", "_"), value.strip()
            if not sep or not key:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            if key not in _KEYS:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            try:
                values[key] = (_KEYS[key][2] or _bool)(value)
            except ValueError as exc:
                raise ConfigError(f"{path}:{lineno}: {exc}") from None
    try:
        return build_config(values, base)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from None


@dataclass
class TopicResult:
    topic: Topic
    phrases: list
    table: object
    compat: object
    sims: object
    problem: object
    solution: object
    stats: object
    summary: Summary
    notes: list = field(default_factory=list)


def summarize_topic(topic: Topic, cfg: RunConfig = RunConfig()) -> TopicResult:
    """Run extraction, scoring, compatibility, the ILP and assembly on one topic.

    A node or time limit is reported as a note and the incumbent is used.
    """
    notes = []
    table = build_concept_table(topic, cfg.salience)
    phrases = score_phrases(extract_topic_phrases(topic), table)
    compat, sims, _ = build_compatibility(topic, phrases, table, cfg.jaccard_threshold)
    nps = [p for p in phrases if p.kind == "NP"]
    vps = [p for p in phrases if p.kind == "VP"]
    tokens = {(s.doc_id, s.sent_idx): s.tokens for s in topic.sentences()}
    problem = build_problem(nps, vps, compat.gamma_tilde, sims, cfg.generation,
                            gamma=compat.gamma, sentence_tokens=tokens)
    try:
        solution, stats = solve_ilp(problem, cfg.node_limit, cfg.time_limit)
    except LimitExceeded as exc:
        notes.append(f"{topic.topic_id}: {exc}; using incumbent")
        warnings.warn(notes[-1], RuntimeWarning, stacklevel=2)
        solution, stats = exc.solution, exc.stats
    if solution is None or solution.status == "infeasible":
        summary = Summary((), 0)
    else:
        summary = assemble(solution, problem, phrases, topic, cfg.generation, cfg.use_then)
    return TopicResult(topic, phrases, table, compat, sims, problem, solution, stats, summary, notes)


def run_topic(path, cfg: RunConfig = RunConfig()) -> TopicResult:
    return summarize_topic(load_topic(path, coref_path=cfg.coref, ne_path=cfg.ne), cfg)


def write_artifacts(result: TopicResult, out_dir) -> str:
    """Write summary, provenance, problem, solution, stats, phrases and concepts.

    Returns the topic's output directory.
    """
    target = os.path.join(out_dir, result.topic.topic_id)
    os.makedirs(target, exist_ok=True)
    files = {
        "summary.txt": result.summary.text,
        "provenance.txt": format_provenance(result.summary, result.phrases),
        "problem.lp": serialize_problem(result.problem),
        "phrases.tsv": dump_phrases(result.phrases),
        "concepts.tsv": result.table.dump(),
    }
    if result.solution is not None:
        files["solution.tsv"] = write_solution(result.solution, result.stats)
    if result.stats is not None:
        s = result.stats
        files["stats.tsv"] = "".join(f"{k}\t{getattr(s, k)!r}\n" for k in
                                     ("nodes_explored", "lp_iterations", "best_bound",
                                      "incumbent_value", "wall_time"))
    for name, text in files.items():
        with open(os.path.join(target, name), "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    return target


def find_topics(topic_dir) -> list:
    """``topic_dir`` itself when it holds documents, else its topic subdirectories."""
    entries = os.listdir(topic_dir)
    if any(n.endswith(DOC_SUFFIX) for n in entries):
        return [topic_dir]
    out = []
    for n in sorted(entries):
        sub = os.path.join(topic_dir, n)
        if os.path.isdir(sub) and any(m.endswith(DOC_SUFFIX) for m in os.listdir(sub)):
            out.append(sub)
    return out


def summarize_all(cfg: RunConfig) -> list:
    """Summarise every topic under ``cfg.topic_dir`` with a bounded worker pool."""
    cfg.check_paths()
    if cfg.topic_dir is None:
        raise ConfigError("topic_dir is required")
    load_stopwords(cfg.salience.stopword_path)
    topics = find_topics(cfg.topic_dir)
    if not topics:
        raise ConfigError(f"no topics under {cfg.topic_dir!r}")
    if cfg.workers == 1 or len(topics) == 1:
        return [run_topic(t, cfg) for t in topics]
    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        return list(pool.map(lambda t: run_topic(t, cfg), topics))
