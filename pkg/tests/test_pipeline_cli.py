import os
import warnings

import pytest

from phrasefusion.cli import eval_report, main, solver_check_report
from phrasefusion.generate import parse_provenance
from phrasefusion.ilp import parse_problem
from phrasefusion.pipeline import ConfigError, RunConfig, build_config, read_config, run_topic
from phrasefusion.solver import TooLarge, read_solution

from conftest import AMISH, write_doc

ARTIFACTS = ("summary.txt", "provenance.txt", "problem.lp", "solution.tsv", "phrases.tsv", "concepts.tsv")


def _run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_config_file_and_flag_override(tmp_path, capsys):
    cfg_file = tmp_path / "run.cfg"
    cfg_file.write_text("# settings\nL = 40\nK = 3\nmode = compressive\nrho = 0.25  # decay\n")
    cfg = read_config(cfg_file)
    assert (cfg.generation.L, cfg.generation.K, cfg.generation.mode) == (40, 3, "compressive")
    assert cfg.salience.rho == 0.25
    out = tmp_path / "out"
    code, stdout, _ = _run(capsys, "summarize", "--config", str(cfg_file), "--L", "30",
                           "--topic-dir", AMISH, "--out-dir", str(out))
    assert code == 0
    assert int(stdout.split("\t")[2].split()[0]) <= 30


@pytest.mark.parametrize("text,line", [("L = 40\nbogus = 1\n", 2), ("L = forty\n", 1), ("\n\nK\n", 3)])
def test_config_errors_name_the_line(tmp_path, text, line):
    p = tmp_path / "bad.cfg"
    p.write_text(text)
    with pytest.raises(ConfigError, match=f"bad.cfg:{line}:"):
        read_config(p)


def test_config_value_validation():
    with pytest.raises(ConfigError):
        build_config({"mode": "fancy"})
    with pytest.raises(ConfigError):
        build_config({"jaccard_threshold": 1.5})


def test_missing_stopwords_exit(tmp_path, capsys):
    missing = str(tmp_path / "nope.txt")
    code, _, err = _run(capsys, "summarize", "--topic-dir", AMISH, "--out-dir", str(tmp_path / "o"),
                        "--stopwords", missing)
    assert code != 0 and missing in err


def test_missing_topic_dir_exit(tmp_path, capsys):
    code, _, err = _run(capsys, "summarize", "--topic-dir", str(tmp_path / "x"), "--out-dir", str(tmp_path))
    assert code == 2 and "topic_dir" in err


def test_no_candidates_is_reported(tmp_path, capsys):
    topic = tmp_path / "tiny"
    topic.mkdir()
    write_doc(topic, "d.trees", "d", "2020-01-01T00:00:00Z",
              [["(ROOT (S (NP (PRP He)) (VP (VBD left)) (. .)))"]])
    code, _, err = _run(capsys, "summarize", "--topic-dir", str(topic), "--out-dir", str(tmp_path / "o"))
    assert code == 2 and "error" in err


def test_summarize_writes_parseable_artifacts(tmp_path, capsys):
    out = tmp_path / "out"
    code, stdout, _ = _run(capsys, "summarize", "--topic-dir", AMISH, "--out-dir", str(out), "--M", "5")
    assert code == 0 and stdout.startswith("amish\t")
    d = out / "amish"
    for name in ARTIFACTS + ("stats.tsv",):
        assert (d / name).exists()
    problem = parse_problem((d / "problem.lp").read_text())
    sol, stats = read_solution((d / "solution.tsv").read_text())
    assert sol.status == "optimal"
    assert problem.evaluate(sol.assignment) == pytest.approx(sol.objective_value, abs=1e-9)
    prov = parse_provenance((d / "provenance.txt").read_text())
    assert len(prov) == len((d / "summary.txt").read_text().splitlines())


def test_summarize_is_deterministic(tmp_path, capsys):
    dirs = []
    for k in range(2):
        out = tmp_path / f"run{k}"
        assert _run(capsys, "summarize", "--topic-dir", AMISH, "--out-dir", str(out))[0] == 0
        dirs.append(out / "amish")
    for name in ARTIFACTS:
        assert (dirs[0] / name).read_bytes() == (dirs[1] / name).read_bytes(), name
    lines = (dirs[0] / "summary.txt").read_text().splitlines()
    assert 1 <= len(lines) <= 10
    assert len(parse_provenance((dirs[0] / "provenance.txt").read_text())) == len(lines)
    sol, _ = read_solution((dirs[0] / "solution.tsv").read_text())
    assert sol.status == "optimal"


def test_workers_give_same_output(tmp_path, capsys):
    root = tmp_path / "topics"
    root.mkdir()
    for name in ("t1", "t2"):
        os.symlink(AMISH, root / name)
    for workers in ("1", "2"):
        assert _run(capsys, "summarize", "--topic-dir", str(root), "--out-dir", str(tmp_path / workers),
                    "--workers", workers, "--L", "40")[0] == 0
    for name in ("t1", "t2"):
        assert ((tmp_path / "1" / name / "summary.txt").read_bytes()
                == (tmp_path / "2" / name / "summary.txt").read_bytes())


def test_node_limit_falls_back_to_incumbent():
    with pytest.warns(RuntimeWarning, match="incumbent"):
        r = run_topic(AMISH, RunConfig(node_limit=1))
    assert r.solution.status == "limit"
    assert r.summary.word_count <= 100


def _write(path, text):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def test_eval_identity_empty_and_multireference(tmp_path):
    cand, refs = tmp_path / "cand", tmp_path / "refs"
    _write(cand / "t1" / "summary.txt", "The gunman shot ten girls.\n")
    _write(refs / "t1.A.txt", "The gunman shot ten girls.")
    _write(cand / "t2.txt", "")
    _write(refs / "t2.A.txt", "Police found notes.")
    _write(cand / "t3.txt", "a b c")
    _write(refs / "t3.A.txt", "a b")
    _write(refs / "t3.B.txt", "b c d")
    rows = {}
    for line in eval_report(str(cand), str(refs)).splitlines()[2:]:
        topic, metric, p, r, f = line.split("\t")
        rows[topic, metric] = (float(p), float(r), float(f))
    assert rows["t1", "ROUGE-2"] == (1.0, 1.0, 1.0)
    assert rows["t1", "ROUGE-SU4"] == (1.0, 1.0, 1.0)
    assert rows["t2", "ROUGE-2"] == (0.0, 0.0, 0.0)
    assert rows["t3", "ROUGE-2"] == pytest.approx((1 / 2, 2 / 3, 4 / 7), abs=1e-12)
    assert rows["AVERAGE", "ROUGE-2"][1] == pytest.approx((1 + 0 + 2 / 3) / 3, abs=1e-12)


def test_eval_cli_writes_file(tmp_path, capsys):
    _write(tmp_path / "c" / "t.txt", "x y z")
    _write(tmp_path / "r" / "t.A.txt", "x y")
    out = tmp_path / "report.tsv"
    code, _, _ = _run(capsys, "eval", "--candidates", str(tmp_path / "c"), "--references",
                      str(tmp_path / "r"), "--out", str(out))
    assert code == 0 and out.read_text().startswith("# recall")
    assert _run(capsys, "eval", "--candidates", str(tmp_path / "none"), "--references", str(tmp_path))[0] == 2


def test_solver_check_defaults_pass(capsys):
    code, out, _ = _run(capsys, "solver-check")
    assert code == 0 and out.rstrip().endswith("PASS 200/200")


def test_solver_check_cli(capsys):
    code, first, _ = _run(capsys, "solver-check", "--count", "15", "--size", "12", "--seed", "3")
    assert code == 0 and first.rstrip().endswith("PASS 15/15")
    assert _run(capsys, "solver-check", "--count", "15", "--size", "12", "--seed", "3")[1] == first
    code, _, err = _run(capsys, "solver-check", "--size", "30")
    assert code == 2 and "30" in err
    with pytest.raises(TooLarge):
        solver_check_report(1, 26, 0)


def test_dump_commands(capsys):
    code, out, _ = _run(capsys, "dump-phrases", "--topic-dir", AMISH)
    assert code == 0 and "amish-02:0:NP0" in out
    code, out, _ = _run(capsys, "dump-concepts", "--topic-dir", AMISH)
    assert code == 0 and out.strip()


def test_extractive_run_is_verbatim(amish_topic):
    from phrasefusion.treebank import detokenize
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        r = run_topic(AMISH, build_config({"mode": "extractive", "M": 0}))
    sources = {(s.doc_id, s.sent_idx): detokenize(s.tokens) for s in amish_topic.sentences()}
    index = {p.phrase_id: p for p in r.phrases}
    assert r.summary.sentences
    for s in r.summary.sentences:
        np_phrase = index[s.np]
        src = sources[np_phrase.doc_id, np_phrase.sent_idx]
        assert s.text[1:].rstrip(".") in src
