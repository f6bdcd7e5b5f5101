import xml.etree.ElementTree as ET

import networkx as nx
import numpy as np
import pytest

from conftest import graph
from coocnet.community import Partition, louvain, modularity
from coocnet.export import (GEXF_NS, GRAPHML_NS, export_gexf, export_graphml, read_gexf,
                            read_graphml, write_report)
from coocnet.metrics import compute_metrics


@pytest.fixture
def labelled():
    return graph(4, [(0, 1, 2), (1, 2, 1), (0, 2, 5), (2, 3, 1)], ["ایران", "آمریکا", "جنگ", "نفت"])


def test_graphml_triangle_structure(tmp_path, triangle):
    p = Partition(np.array([0, 0, 1]), 0.0)
    path = tmp_path / "t.graphml"
    export_graphml(triangle, p, compute_metrics(triangle).vectors(), path)
    root = ET.parse(path).getroot()
    ns = {"g": GRAPHML_NS}
    keys = {k.get("attr.name"): k for k in root.findall("g:key", ns)}
    assert keys["community"].get("attr.type") == "int" and keys["weight"].get("for") == "edge"
    assert {"label", "closeness", "betweenness"} <= set(keys)
    nodes = root.findall("g:graph/g:node", ns)
    edges = root.findall("g:graph/g:edge", ns)
    assert len(nodes) == 3 and len(edges) == 3
    assert [n.get("id") for n in nodes] == ["n0", "n1", "n2"]
    assert [(e.get("source"), e.get("target")) for e in edges] == [
        ("n0", "n1"), ("n0", "n2"), ("n1", "n2")]


def test_empty_graph_exports(tmp_path):
    g = graph(0, [])
    export_graphml(g, None, None, tmp_path / "e.graphml")
    export_gexf(g, None, None, tmp_path / "e.gexf")
    assert read_graphml(tmp_path / "e.graphml").graph.n == 0
    assert read_gexf(tmp_path / "e.gexf").graph.n == 0
    assert nx.read_graphml(tmp_path / "e.graphml").number_of_nodes() == 0


def test_byte_identical_reexport(tmp_path, labelled):
    p = louvain(labelled)
    vec = compute_metrics(labelled).vectors()
    for fn, ext in ((export_graphml, "graphml"), (export_gexf, "gexf")):
        fn(labelled, p, vec, tmp_path / f"a.{ext}")
        fn(labelled, p, vec, tmp_path / f"b.{ext}")
        assert (tmp_path / f"a.{ext}").read_bytes() == (tmp_path / f"b.{ext}").read_bytes()


def _edge_set(g):
    return {(frozenset((g.labels[i], g.labels[j])), float(w)) for i, j, w in g.edges()}


def test_roundtrip_own_parsers(tmp_path, labelled):
    p = louvain(labelled)
    r = compute_metrics(labelled)
    export_graphml(labelled, p, r.vectors(), tmp_path / "g.graphml")
    export_gexf(labelled, p, r.vectors(), tmp_path / "g.gexf")
    for parsed in (read_graphml(tmp_path / "g.graphml"), read_gexf(tmp_path / "g.gexf")):
        assert parsed.graph == labelled
        assert parsed.node_attrs["community"] == p.assignment.tolist()
        assert parsed.node_attrs["betweenness"] == r.betweenness.values.tolist()


def test_networkx_reparse(tmp_path, labelled):
    p = louvain(labelled)
    r = compute_metrics(labelled)
    export_graphml(labelled, p, r.vectors(), tmp_path / "g.graphml")
    export_gexf(labelled, p, r.vectors(), tmp_path / "g.gexf")
    G = nx.read_graphml(tmp_path / "g.graphml")
    assert {G.nodes[n]["label"] for n in G} == set(labelled.labels)
    got = {(frozenset((G.nodes[u]["label"], G.nodes[v]["label"])), d["weight"])
           for u, v, d in G.edges(data=True)}
    assert got == _edge_set(labelled)
    assert G.nodes["n2"]["closeness"] == r.closeness.values[2]
    H = nx.read_gexf(tmp_path / "g.gexf")
    assert H.number_of_nodes() == 4 and H.number_of_edges() == 4
    labels = {n: H.nodes[n]["label"] for n in H}
    got = {(frozenset((labels[u], labels[v])), d["weight"]) for u, v, d in H.edges(data=True)}
    assert got == _edge_set(labelled)
    assert H.nodes["0"]["community"] == int(p.assignment[0])


def test_gexf_declares_v12(tmp_path, triangle):
    export_gexf(triangle, None, None, tmp_path / "t.gexf")
    root = ET.parse(tmp_path / "t.gexf").getroot()
    assert root.tag == f"{{{GEXF_NS}}}gexf" and root.get("version") == "1.2"


def _minimal_report(metrics="skipped"):
    return {
        "corpus": {"channels": {"c": {"post_count": 1, "word_count": 2,
                                      "avg_words_per_post": 2.0}},
                   "posts": 1, "duplicates": 0, "nonempty_documents": 1},
        "network": {"vocabulary_size": 2, "matrix_pairs": 1, "nodes": 2, "edges": 1},
        "metrics": metrics, "keywords": "skipped", "communities": "skipped", "files": {},
    }


def test_report_skipped_sections(tmp_path):
    jpath, mpath = write_report(_minimal_report(), tmp_path)
    md = mpath.read_text(encoding="utf-8")
    assert md.count("skipped") == 3
    text = jpath.read_text(encoding="utf-8")
    assert text.startswith('{\n  "communities": "skipped"')  # sorted keys, 2-space indent


def test_report_nan_becomes_null(tmp_path):
    stats = compute_metrics(graph(0, [])).stats.to_json()
    jpath, _ = write_report(_minimal_report(stats), tmp_path)
    assert '"avg_degree_m_over_n": null' in jpath.read_text(encoding="utf-8")


def test_report_numbers_recomputable_from_emitted_files(tmp_path):
    import hashlib
    import json

    from coocnet.corpus import corpus_stats, load_corpus
    from coocnet.metrics import diameter
    from coocnet.pipeline import PipelineConfig, run_report

    out = tmp_path / "r"
    rep = run_report(PipelineConfig(), out)
    on_disk = json.loads((out / "report.json").read_text(encoding="utf-8"))
    assert set(on_disk) == {"config", "config_hash", "corpus", "network", "metrics",
                            "communities", "keywords", "files"}

    parsed = read_graphml(out / "graph.graphml")
    g, attrs = parsed.graph, parsed.node_attrs
    m = compute_metrics(g)
    assert on_disk["metrics"] == json.loads(json.dumps(m.stats.to_json()))
    assert on_disk["metrics"]["diameter"] == diameter(g) == rep["metrics"]["diameter"]
    assert on_disk["network"]["nodes"] == g.n and on_disk["network"]["edges"] == g.m

    comm = on_disk["communities"]
    q = modularity(g, attrs["community"])
    assert comm["modularity"] == q and comm["count"] == max(attrs["community"]) + 1
    sizes = np.bincount(attrs["community"]).tolist()
    assert [c["size"] for c in comm["communities"]] == sizes

    for metric, rows in on_disk["keywords"].items():
        by_word = dict(zip(g.labels, attrs[metric]))
        assert all(by_word[r["word"]] == r["value"] for r in rows)

    corpus = load_corpus(out / "corpus.ckpt", strict=True)
    assert on_disk["corpus"]["channels"] == corpus_stats(corpus)
    assert on_disk["corpus"]["posts"] == len(corpus)

    for name, meta in on_disk["files"].items():
        data = (out / name).read_bytes()
        assert meta == {"bytes": len(data), "sha256": hashlib.sha256(data).hexdigest()}
