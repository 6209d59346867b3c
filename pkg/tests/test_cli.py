import json
import sys
from pathlib import Path

import pytest

from golden import BATCH_SIZE, FIXTURES, write_mock_setup
from yearshift.cli import main
from yearshift.conllu import read_treebank


def run_golden_evaluate(tmp_path, out_name="run", extra=()):
    command, treebank = write_mock_setup(tmp_path)
    out = tmp_path / out_name
    code = main(["evaluate", "--treebank", str(treebank), "--parser-cmd", command,
                 "--out", str(out), "--eval-count", str(BATCH_SIZE), *extra])
    return code, out


# -------------------------------------------------------------- evaluate

def test_evaluate_exit_zero_and_writes_reports(tmp_path):
    code, out = run_golden_evaluate(tmp_path)
    assert code == 0
    for name in ("manifest.json", "report.json", "report.txt", "clusters.txt",
                 "summary.csv", "groups.csv"):
        assert (out / name).exists(), name
    assert list((out / "figures").glob("*.png"))


def test_evaluate_nonexistent_treebank_names_path(tmp_path, capsys):
    code = main(["evaluate", "--treebank", "no/such/file.conllu",
                 "--parser-cmd", "true", "--out", str(tmp_path / "o")])
    assert code == 2
    assert "no/such/file.conllu" in capsys.readouterr().err


def test_evaluate_counts_missegmented_originals(tmp_path):
    code, out = run_golden_evaluate(tmp_path)
    assert code == 0
    doc = json.loads((out / "report.json").read_text(encoding="utf-8"))
    summary = doc["splits"]["mini"]["summary"]
    assert summary["original"]["wrong_segmentation"] == 2
    assert summary["original"]["considered"] == 4


def test_evaluate_byte_identical_reports(tmp_path):
    _, out1 = run_golden_evaluate(tmp_path, "run1")
    _, out2 = run_golden_evaluate(tmp_path, "run2")
    assert (out1 / "report.json").read_bytes() == (out2 / "report.json").read_bytes()
    assert (out1 / "report.txt").read_bytes() == (out2 / "report.txt").read_bytes()


def test_evaluate_with_workers_matches_serial(tmp_path):
    _, serial = run_golden_evaluate(tmp_path, "serial")
    _, parallel = run_golden_evaluate(tmp_path, "parallel", extra=("--workers", "4"))
    assert (serial / "report.json").read_bytes() == (parallel / "report.json").read_bytes()


def test_evaluate_all_batches_failing_is_runtime_error(tmp_path, capsys):
    crash = tmp_path / "crash.py"
    crash.write_text("import sys; sys.exit(3)\n", encoding="utf-8")
    code = main(["evaluate", "--treebank", str(FIXTURES / "mini.conllu"),
                 "--parser-cmd", f"{sys.executable} {crash}",
                 "--out", str(tmp_path / "o"), "--eval-count", "2"])
    assert code == 1
    assert "every parser invocation failed" in capsys.readouterr().err


def test_report_replays_from_cache(tmp_path):
    _, out = run_golden_evaluate(tmp_path)
    redo = tmp_path / "redo"
    code = main(["report", "--run", str(out), "--out", str(redo)])
    assert code == 0
    assert (redo / "report.json").read_bytes() == (out / "report.json").read_bytes()


def test_report_without_manifest(tmp_path, capsys):
    code = main(["report", "--run", str(tmp_path)])
    assert code == 2
    assert "manifest" in capsys.readouterr().err


# --------------------------------------------------------------- augment

def test_augment_numeral_counts_and_manifest(tmp_path):
    out = tmp_path / "aug.conllu"
    code = main(["augment", "--treebank", str(FIXTURES / "mini.conllu"),
                 "--mode", "numeral", "--out", str(out)])
    assert code == 0
    tb = read_treebank(out)
    assert len(tb) == 10 + 6 * 20
    manifest = json.loads(Path(str(out) + ".manifest.json").read_text(encoding="utf-8"))
    assert len(manifest["numbers"]) == 20
    assert not set(manifest["numbers"]) & set(manifest["excluded_eval_numbers"])


def test_augment_token_keeps_size(tmp_path):
    out = tmp_path / "sub.conllu"
    code = main(["augment", "--treebank", str(FIXTURES / "mini.conllu"),
                 "--mode", "token", "--out", str(out)])
    assert code == 0
    tb = read_treebank(out)
    assert len(tb) == 10
    assert "NNNN" in {t.form for s in tb.sentences for t in s.tokens}


def test_augment_deterministic_files(tmp_path):
    paths = []
    for name in ("a.conllu", "b.conllu"):
        out = tmp_path / name
        assert main(["augment", "--treebank", str(FIXTURES / "mini.conllu"),
                     "--out", str(out)]) == 0
        paths.append(out)
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_augment_collision_requires_force(tmp_path, capsys):
    out = tmp_path / "aug.conllu"
    assert main(["augment", "--treebank", str(FIXTURES / "mini.conllu"),
                 "--out", str(out)]) == 0
    assert main(["augment", "--treebank", str(FIXTURES / "mini.conllu"),
                 "--out", str(out)]) == 2
    assert "--force" in capsys.readouterr().err
    assert main(["augment", "--treebank", str(FIXTURES / "mini.conllu"),
                 "--out", str(out), "--force"]) == 0


# ---------------------------------------------------------------- kernel

def test_kernel_identical_sentences(tmp_path, capsys):
    fixture = str(FIXTURES / "mini.conllu")
    assert main(["kernel", fixture, fixture]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert any(l.startswith("NCPTK") and "1.0" in l for l in lines)


def test_kernel_disjoint_bracketed_trees(capsys):
    assert main(["kernel", "(a (B x))", "(c (D y))"]) == 0
    out = capsys.readouterr().out
    assert "NCPTK  = 0.0" in out


def test_kernel_oracle_agrees(capsys):
    assert main(["kernel", "(root (INTJ Hej))", "(root (INTJ Hoj))", "--oracle"]) == 0
    out = capsys.readouterr().out
    values = {line.split("=")[0].strip(): float(line.split("=")[1])
              for line in out.strip().splitlines()}
    assert values["K"] == pytest.approx(values["oracle"], abs=1e-12)


def test_kernel_bad_input_is_config_error(capsys):
    assert main(["kernel", "not-a-file", "(a (B x))"]) == 2
    assert "not-a-file" in capsys.readouterr().err


# ---------------------------------------------------------------- config

def test_config_file_overridden_by_flags(tmp_path):
    config = tmp_path / "ys.cfg"
    config.write_text("eval_count = 3\nlo = 1200\n# comment\nhi = 1300\n", encoding="utf-8")
    out1 = tmp_path / "c1.conllu"
    assert main(["augment", "--treebank", str(FIXTURES / "mini.conllu"), "--config",
                 str(config), "--out", str(out1), "--mode", "numeral"]) == 0
    manifest = json.loads(Path(str(out1) + ".manifest.json").read_text(encoding="utf-8"))
    assert manifest["sampling"]["eval_count"] == 3
    assert all(1200 <= n < 1300 for n in manifest["numbers"])

    out2 = tmp_path / "c2.conllu"
    assert main(["augment", "--treebank", str(FIXTURES / "mini.conllu"), "--config",
                 str(config), "--lo", "1400", "--hi", "1500", "--out", str(out2)]) == 0
    manifest = json.loads(Path(str(out2) + ".manifest.json").read_text(encoding="utf-8"))
    assert all(1400 <= n < 1500 for n in manifest["numbers"])


def test_unknown_config_key_rejected(tmp_path, capsys):
    config = tmp_path / "bad.cfg"
    config.write_text("surprise = 1\n", encoding="utf-8")
    assert main(["augment", "--treebank", str(FIXTURES / "mini.conllu"), "--config",
                 str(config), "--out", str(tmp_path / "x.conllu")]) == 2
    assert "surprise" in capsys.readouterr().err


def test_report_json_validates_against_schema(tmp_path):
    import jsonschema

    from yearshift.report import load_schema

    _, out = run_golden_evaluate(tmp_path)
    doc = json.loads((out / "report.json").read_text(encoding="utf-8"))
    jsonschema.validate(doc, load_schema())
