import json
import subprocess
import sys

import pytest

from coocnet.cli import EXIT_DATA, EXIT_IO, EXIT_OK, EXIT_USAGE, main
from coocnet.pipeline import toy_corpus_path


def run(*argv):
    return main([str(a) for a in argv])


def test_unknown_flag_is_usage_error(capsys):
    assert run("metrics", "--bogus") == EXIT_USAGE
    assert "usage:" in capsys.readouterr().err


def test_no_command_is_usage_error(capsys):
    assert run() == EXIT_USAGE


def test_help_and_version(capsys):
    assert run("--help") == EXIT_OK
    assert run("--version") == EXIT_OK
    assert "coocnet" in capsys.readouterr().out


def test_missing_checkpoint_is_io_error(tmp_path, capsys):
    missing = tmp_path / "absent.ckpt"
    assert run("metrics", "--in", missing, "--out", tmp_path / "m.json") == EXIT_IO
    assert str(missing) in capsys.readouterr().err


def test_corrupt_checkpoint_is_data_error(tmp_path, capsys):
    bad = tmp_path / "g.ckpt"
    bad.write_text("{not a graph", encoding="utf-8")
    assert run("metrics", "--in", bad, "--out", tmp_path / "m.json") == EXIT_DATA
    assert "data error" in capsys.readouterr().err


def test_strict_ingest_of_malformed_corpus(tmp_path):
    src = tmp_path / "c.jsonl"
    src.write_text("{oops\n", encoding="utf-8")
    assert run("ingest", src, "--strict", "--out", tmp_path / "c.ckpt") == EXIT_DATA
    assert run("ingest", src, "--out", tmp_path / "c.ckpt") == EXIT_OK


@pytest.mark.parametrize("body", [
    "[graph]\ntau = 0\n",
    "[graph]\nthreshold = 2\n",
    "[nonsense]\n",
    "not = [valid toml",
])
def test_bad_config_is_usage_error(tmp_path, capsys, body):
    cfg = tmp_path / "c.toml"
    cfg.write_text(body, encoding="utf-8")
    assert run("report", "--config", cfg, "--out", tmp_path / "r") == EXIT_USAGE
    assert "configuration error" in capsys.readouterr().err


def test_communities_on_edgeless_graph(tmp_path):
    corpus = tmp_path / "c.jsonl"
    corpus.write_text(json.dumps({"id": "1", "channel": "a", "caption": "تنها"}) + "\n",
                      encoding="utf-8")
    d = tmp_path
    assert run("ingest", corpus, "--out", d / "c.ckpt") == EXIT_OK
    assert run("normalize", "--in", d / "c.ckpt", "--out", d / "d.ckpt") == EXIT_OK
    assert run("cooc", "--in", d / "d.ckpt", "--out", d / "m.csv") == EXIT_OK
    assert run("graph", "--in", d / "m.csv", "--out", d / "g.ckpt") == EXIT_OK
    assert run("communities", "--in", d / "g.ckpt", "--out", d / "p.csv") == EXIT_DATA


def test_export_requires_an_output(tmp_path, capsys):
    assert run("export", "--graph", tmp_path / "g.ckpt") == EXIT_USAGE


def _files(d):
    return {p.name: p.read_bytes() for p in sorted(d.iterdir()) if p.is_file()}


@pytest.fixture(scope="module")
def single_shot(tmp_path_factory):
    out = tmp_path_factory.mktemp("single")
    assert run("report", "--out", out) == EXIT_OK
    return out


def test_report_is_deterministic(single_shot, tmp_path):
    assert run("report", "--out", tmp_path) == EXIT_OK
    assert _files(tmp_path) == _files(single_shot)


def test_report_contents(single_shot):
    rep = json.loads((single_shot / "report.json").read_text(encoding="utf-8"))
    assert rep["corpus"]["posts"] == 50
    assert rep["network"]["nodes"] > 0 and rep["communities"]["count"] >= 1
    for name, meta in rep["files"].items():
        assert (single_shot / name).stat().st_size == meta["bytes"]
    md = (single_shot / "report.md").read_text(encoding="utf-8")
    assert "| Rank | Word | Closeness Centrality |" in md


def test_parallel_does_not_change_output(single_shot, tmp_path):
    assert run("report", "--parallel", 3, "--out", tmp_path) == EXIT_OK
    assert _files(tmp_path) == _files(single_shot)


def test_staged_equals_single_shot(single_shot, tmp_path):
    d = tmp_path
    steps = [
        ("ingest", toy_corpus_path(), "--out", d / "corpus.ckpt"),
        ("normalize", "--in", d / "corpus.ckpt", "--out", d / "docs.ckpt"),
        ("cooc", "--in", d / "docs.ckpt", "--out", d / "matrix.csv"),
        ("graph", "--in", d / "matrix.csv", "--out", d / "graph.ckpt",
         "--edges", d / "edges.csv", "--nodes", d / "nodes.csv"),
        ("metrics", "--in", d / "graph.ckpt", "--out", d / "metrics.json", "--csv-dir", d),
        ("communities", "--in", d / "graph.ckpt", "--out", d / "partition.csv"),
        ("export", "--graph", d / "graph.ckpt", "--partition", d / "partition.csv",
         "--metrics", d / "metrics.json", "--graphml", d / "graph.graphml",
         "--gexf", d / "graph.gexf"),
    ]
    for metric in ("closeness", "betweenness"):
        for ext in ("md", "csv"):
            steps.append(("keywords", "--in", d / "metrics.json", "--metric", metric,
                          "--out", d / f"keywords_{metric}.{ext}"))
    for step in steps:
        assert run(*step) == EXIT_OK, step
    staged, single = _files(d), _files(single_shot)
    assert set(single) - set(staged) == {"report.json", "report.md"}
    for name, data in staged.items():
        assert data == single[name], name


def test_console_script_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "coocnet.cli", "keywords", "--in",
                           tmp_path / "none.json", "--out", tmp_path / "k.md"],
                          capture_output=True, text=True)
    assert proc.returncode == EXIT_IO
