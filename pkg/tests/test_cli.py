import json
import subprocess
import sys

import pytest

from lmo_ortho.cli import main
from lmo_ortho.corpus import load_jsonl, write_jsonl
from lmo_ortho.synthetic import synthetic_corpus


@pytest.fixture
def corpus_dir(tmp_path):
    write_jsonl(synthetic_corpus(40, seed=1), tmp_path / "corpus.jsonl")
    assert main(["split", "--in", str(tmp_path / "corpus.jsonl"), "--out-dir", str(tmp_path / "split")]) == 0
    return tmp_path


def test_version(capsys):
    with pytest.raises(SystemExit) as info:
        main(["--version"])
    assert info.value.code == 0
    assert "model format 1" in capsys.readouterr().out


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as info:
        main(["train", "--model", "perceptron", "--train", "x", "--out", "y"])
    assert info.value.code == 1


def test_ingest(tmp_path, dump_bytes, capsys):
    dump = tmp_path / "dump.xml"
    dump.write_bytes(dump_bytes)
    out = tmp_path / "out"
    assert main(["ingest", "--dump", str(dump), "--out", str(out), "--review"]) == 0
    assert len(load_jsonl(out / "corpus.jsonl")) == 2
    assert len(load_jsonl(out / "untagged.jsonl")) == 2
    assert "removed.duplicate: 1" in (out / "filter_report.txt").read_text()
    assert (out / "review.tsv").exists()
    assert not [p for p in out.iterdir() if p.name.startswith(".ingest")]


def test_ingest_bad_dump_leaves_no_output(tmp_path, dump_bytes, capsys):
    dump = tmp_path / "dump.xml"
    dump.write_bytes(dump_bytes[:-40])
    out = tmp_path / "out"
    assert main(["ingest", "--dump", str(dump), "--out", str(out)]) == 2
    assert list(out.iterdir()) == []
    assert "byte offset" in capsys.readouterr().err


def test_ingest_bad_config(tmp_path, dump_bytes):
    dump = tmp_path / "dump.xml"
    dump.write_bytes(dump_bytes)
    cfg = tmp_path / "bad.toml"
    cfg.write_text("[filter]\nmin_words = -1\n")
    assert main(["ingest", "--dump", str(dump), "--config", str(cfg), "--out", str(tmp_path / "o")]) == 1


def test_ingest_config_from_env(tmp_path, dump_bytes, monkeypatch):
    dump = tmp_path / "dump.xml"
    dump.write_bytes(dump_bytes)
    cfg = tmp_path / "c.toml"
    cfg.write_text("[tags]\nSL = ['GrafMIL']\n[filter]\nmin_words = 2\n")
    monkeypatch.setenv("LMO_ORTHO_CONFIG", str(cfg))
    assert main(["ingest", "--dump", str(dump), "--out", str(tmp_path / "o")]) == 0
    tags = {s.tag.value for s in load_jsonl(tmp_path / "o" / "corpus.jsonl")}
    assert tags == {"SL"}


def test_missing_dump(tmp_path):
    assert main(["ingest", "--dump", str(tmp_path / "nope.xml"), "--out", str(tmp_path / "o")]) == 2


def test_split_outputs(corpus_dir, capsys):
    sizes = [len(load_jsonl(corpus_dir / "split" / f"{n}.jsonl")) for n in ("train", "valid", "test")]
    assert sizes == [96, 12, 12]


def test_split_bad_ratios(corpus_dir):
    assert main(["split", "--in", str(corpus_dir / "corpus.jsonl"), "--out-dir", str(corpus_dir / "s2"),
                 "--ratios", "0.5,0.5,0.5"]) == 1


def test_split_malformed_corpus(tmp_path):
    bad = tmp_path / "bad.jsonl"
    bad.write_text('{"text": "x", "tag": "NOPE"}\n')
    assert main(["split", "--in", str(bad), "--out-dir", str(tmp_path / "s")]) == 2


@pytest.mark.parametrize("model", ["logreg", "svm", "nb", "rf"])
def test_train_evaluate_classify(corpus_dir, model, capsys, monkeypatch):
    split = corpus_dir / "split"
    path = corpus_dir / f"{model}.model"
    extra = ["--n-trees", "10"] if model == "rf" else []
    assert main(["train", "--model", model, "--features", "char", "--train", str(split / "train.jsonl"),
                 "--valid", str(split / "valid.jsonl"), "--out", str(path), *extra]) == 0
    assert "validation accuracy" in capsys.readouterr().out

    js = corpus_dir / f"{model}.json"
    csv = corpus_dir / f"{model}.csv"
    assert main(["evaluate", "--model", str(path), "--test", str(split / "test.jsonl"),
                 "--json", str(js), "--confusion", str(csv)]) == 0
    assert "overall" in capsys.readouterr().out
    doc = json.loads(js.read_text())
    assert doc["metrics"]["n_total"] == 12
    assert csv.read_text().startswith("gold\\predicted,")

    lines = corpus_dir / "lines.txt"
    lines.write_text("Trooeu lach.\n\nsomething\n", encoding="utf-8")
    assert main(["classify", "--model", str(path), "--input", str(lines), "--jsonl"]) == 0
    out = capsys.readouterr()
    assert len(out.out.splitlines()) == 3
    assert "mean confidence" in out.err


def test_classify_min_confidence(corpus_dir, capsys):
    split = corpus_dir / "split"
    path = corpus_dir / "nb.model"
    main(["train", "--model", "nb", "--train", str(split / "train.jsonl"), "--out", str(path)])
    capsys.readouterr()
    lines = corpus_dir / "lines.txt"
    lines.write_text("\n", encoding="utf-8")
    assert main(["classify", "--model", str(path), "--input", str(lines), "--min-confidence", "0.99"]) == 0
    assert capsys.readouterr().out.startswith("UNKNOWN\t")
    assert main(["classify", "--model", str(path), "--input", str(lines), "--min-confidence", "2"]) == 1


def test_bad_model_file(tmp_path, corpus_dir):
    bad = tmp_path / "bad.model"
    bad.write_bytes(b"lmo-ortho-model 7 2 00\n{}")
    assert main(["evaluate", "--model", str(bad), "--test", str(corpus_dir / "split" / "test.jsonl")]) == 2


def test_training_failure_exit_code(tmp_path):
    one = tmp_path / "one.jsonl"
    write_jsonl([s for s in synthetic_corpus(5) if s.tag.value == "LOCC"], one)
    assert main(["train", "--model", "logreg", "--train", str(one), "--out", str(tmp_path / "m")]) == 3


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "lmo_ortho", "--help"], capture_output=True, text=True)
    assert out.returncode == 0
    for cmd in ("ingest", "split", "train", "evaluate", "classify"):
        assert cmd in out.stdout


def test_classify_stdin(corpus_dir, capsys, monkeypatch):
    import io

    path = corpus_dir / "nb.model"
    main(["train", "--model", "nb", "--train", str(corpus_dir / "split" / "train.jsonl"), "--out", str(path)])
    capsys.readouterr()
    monkeypatch.setattr(sys, "stdin", io.StringIO("Trooeu lach chun.\n"))
    assert main(["classify", "--model", str(path), "--echo"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert len(out) == 1 and out[0].endswith("\tTrooeu lach chun.")


def test_missing_dump_message_names_path(tmp_path, capsys):
    missing = tmp_path / "nope.xml"
    main(["ingest", "--dump", str(missing), "--out", str(tmp_path / "o")])
    assert str(missing) in capsys.readouterr().err
