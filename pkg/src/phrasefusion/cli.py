"""Command line: ``phrasefusion {summarize,eval,solver-check,dump-phrases,dump-concepts}``."""

from __future__ import annotations

import argparse
import os
import sys
import warnings

import numpy as np

from .ilp import IndexMismatch, NoCandidates, serialize_problem
from .phrases import dump_phrases, extract_topic_phrases
from .pipeline import ConfigError, RunConfig, build_config, read_config, summarize_all, write_artifacts
from .rouge import FORMULA, EmptyReferenceSet, normalize_text, rouge2, rouge_su4
from .salience import EmptyTopic, build_concept_table, score_phrases
from .solver import NumericalBreakdown, TooLarge, solve_brute, solve_ilp
from .synthetic import random_phrase_problem
from .treebank import TopicLoadError, TreeParseError, load_topic

DECLARED = (ConfigError, TopicLoadError, TreeParseError, NoCandidates, IndexMismatch, EmptyTopic,
            NumericalBreakdown, TooLarge, OSError)

# flag dest -> config key
_FLAG_KEYS = {"B": "B", "rho": "rho", "jaccard_threshold": "jaccard_threshold", "L": "L", "K": "K",
              "M": "M", "mode": "mode", "topic_dir": "topic_dir", "out_dir": "out_dir",
              "seed": "seed", "workers": "workers", "stopwords": "stopwords", "coref": "coref",
              "ne": "ne", "node_limit": "node_limit", "time_limit": "time_limit"}


def _add_run_flags(p):
    p.add_argument("--config", help="flat 'key = value' file; flags override it")
    p.add_argument("--B", type=float)
    p.add_argument("--rho", type=float)
    p.add_argument("--jaccard-threshold", dest="jaccard_threshold", type=float)
    p.add_argument("--L", type=int)
    p.add_argument("--K", type=int)
    p.add_argument("--M", type=int)
    p.add_argument("--mode", choices=("abstractive", "compressive", "extractive"))
    p.add_argument("--topic-dir", dest="topic_dir")
    p.add_argument("--out-dir", dest="out_dir")
    p.add_argument("--stopwords")
    p.add_argument("--coref")
    p.add_argument("--ne")
    p.add_argument("--node-limit", dest="node_limit", type=int)
    p.add_argument("--time-limit", dest="time_limit", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--then", dest="use_then", action="store_true", default=None,
                   help="use 'then' instead of 'and' for VPs in time order")


def config_from_args(args) -> RunConfig:
    cfg = read_config(args.config) if getattr(args, "config", None) else RunConfig()
    values = {key: getattr(args, dest) for dest, key in _FLAG_KEYS.items()
              if getattr(args, dest, None) is not None}
    if getattr(args, "use_then", None):
        values["use_then"] = True
    return build_config(values, cfg)


def cmd_summarize(args) -> int:
    cfg = config_from_args(args)
    if cfg.topic_dir is None or cfg.out_dir is None:
        raise ConfigError("summarize needs --topic-dir and --out-dir")
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        results = summarize_all(cfg)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    for r in results:
        target = write_artifacts(r, cfg.out_dir)
        print(f"{r.topic.topic_id}\t{len(r.summary)} sentences\t{r.summary.word_count} words\t{target}")
    return 0


def _read(path) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _candidate_path(cand_dir, topic):
    for p in (os.path.join(cand_dir, topic, "summary.txt"), os.path.join(cand_dir, f"{topic}.txt")):
        if os.path.exists(p):
            return p
    return None


def _fmt(x) -> str:
    return repr(float(x))


def eval_report(cand_dir, ref_dir, err=sys.stderr) -> str:
    """TSV with ROUGE-2 / ROUGE-SU4 rows per topic and their macro average."""
    refs = {}
    for name in sorted(os.listdir(ref_dir)):
        parts = name.split(".")
        if len(parts) >= 3 and parts[-1] == "txt":
            refs.setdefault(".".join(parts[:-2]), []).append(os.path.join(ref_dir, name))
    topics = set(refs)
    for name in os.listdir(cand_dir):
        if os.path.isdir(os.path.join(cand_dir, name)) or name.endswith(".txt"):
            topics.add(name[:-4] if name.endswith(".txt") else name)
    lines = [f"# {FORMULA}", "topic\tmetric\tP\tR\tF1"]
    scored = {"ROUGE-2": [], "ROUGE-SU4": []}
    for topic in sorted(topics):
        path = _candidate_path(cand_dir, topic)
        cand = normalize_text(_read(path)) if path else []
        ref_tokens = [normalize_text(_read(p)) for p in refs.get(topic, [])]
        for metric, fn in (("ROUGE-2", rouge2), ("ROUGE-SU4", rouge_su4)):
            try:
                s = fn(cand, ref_tokens)
            except EmptyReferenceSet:
                print(f"warning: {topic}: no reference summaries", file=err)
                break
            scored[metric].append(s)
            lines.append(f"{topic}\t{metric}\t{_fmt(s.precision)}\t{_fmt(s.recall)}\t{_fmt(s.f1)}")
    for metric, scores in scored.items():
        if scores:
            p = sum(s.precision for s in scores) / len(scores)
            r = sum(s.recall for s in scores) / len(scores)
            f = sum(s.f1 for s in scores) / len(scores)
            lines.append(f"AVERAGE\t{metric}\t{_fmt(p)}\t{_fmt(r)}\t{_fmt(f)}")
    return "\n".join(lines) + "\n"


def cmd_eval(args) -> int:
    for p in (args.candidates, args.references):
        if not os.path.isdir(p):
            raise ConfigError(f"no such directory {p!r}")
    report = eval_report(args.candidates, args.references)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(report)
    else:
        sys.stdout.write(report)
    return 0


def solver_check_report(count, size, seed):
    """Compare branch-and-bound with enumeration; returns ``(ok, report)``."""
    if size > 25:
        raise TooLarge(f"size {size} exceeds the brute-force cap of 25")
    rng = np.random.default_rng(seed)
    lines = ["instance\tvariables\tstatus\tbranch_and_bound\tbrute_force"]
    for k in range(count):
        problem = random_phrase_problem(rng, size)
        ilp, _ = solve_ilp(problem)
        brute = solve_brute(problem)
        same = ilp.status == brute.status and (ilp.status != "optimal"
                                               or abs(ilp.objective_value - brute.objective_value) <= 1e-9)
        lines.append(f"{k}\t{problem.n}\t{ilp.status}\t{ilp.objective_value!r}\t{brute.objective_value!r}")
        if not same:
            lines.append(f"FAIL at instance {k}; counterexample follows")
            lines.append(serialize_problem(problem))
            return False, "\n".join(lines) + "\n"
    lines.append(f"PASS {count}/{count}")
    return True, "\n".join(lines) + "\n"


def cmd_solver_check(args) -> int:
    ok, report = solver_check_report(args.count, args.size, args.seed)
    sys.stdout.write(report)
    return 0 if ok else 1


def _topic_arg(args):
    cfg = config_from_args(args)
    if cfg.topic_dir is None:
        raise ConfigError("--topic-dir is required")
    cfg.check_paths()
    return cfg, load_topic(cfg.topic_dir, coref_path=cfg.coref, ne_path=cfg.ne)


def cmd_dump_phrases(args) -> int:
    cfg, topic = _topic_arg(args)
    table = build_concept_table(topic, cfg.salience)
    phrases = score_phrases(extract_topic_phrases(topic), table)
    for p, line in zip(phrases, dump_phrases(phrases).splitlines()):
        print(f"{line}\t{p.salience!r}")
    return 0


def cmd_dump_concepts(args) -> int:
    cfg, topic = _topic_arg(args)
    sys.stdout.write(build_concept_table(topic, cfg.salience).dump())
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="phrasefusion", description="Phrase-based abstractive multi-document summarization")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("summarize", help="summarize every topic under --topic-dir")
    _add_run_flags(p)
    p.set_defaults(func=cmd_summarize)

    p = sub.add_parser("eval", help="ROUGE-2 / ROUGE-SU4 against reference summaries")
    p.add_argument("--candidates", required=True, help="summarize output dir or <topic>.txt files")
    p.add_argument("--references", required=True, help="directory of <topic>.<writer>.txt files")
    p.add_argument("--out")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("solver-check", help="compare the ILP solver with exhaustive enumeration")
    p.add_argument("--count", type=int, default=200)
    p.add_argument("--size", type=int, default=18)
    p.add_argument("--seed", type=int, default=42)
    p.set_defaults(func=cmd_solver_check)

    for name, fn in (("dump-phrases", cmd_dump_phrases), ("dump-concepts", cmd_dump_concepts)):
        p = sub.add_parser(name)
        _add_run_flags(p)
        p.set_defaults(func=fn)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DECLARED as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
