"""Graph exports for external viewers and the end-to-end analysis report."""

from __future__ import annotations

import json
import math
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .community import Partition
from .graph import CoGraph, _from_upper
from .metrics import CentralityVector

GRAPHML_NS = "http://graphml.graphdrawing.org/xmlns"
# GEXF 1.2 kept the "draft" namespace when the format was finalised
GEXF_NS = "http://www.gexf.net/1.2draft"
GEXF_VIZ_NS = "http://www.gexf.net/1.2draft/viz"
_XSI_NS = "http://www.w3.org/2001/XMLSchema-instance"


def _fmt(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    value = float(value)
    if value.is_integer() and abs(value) < 2 ** 53:
        return str(int(value))
    return repr(value)


def _write_xml(root: ET.Element, path) -> None:
    ET.indent(root, space="  ")
    data = ET.tostring(root, encoding="utf-8", xml_declaration=True)
    with open(path, "wb") as fh:
        fh.write(data.replace(b"<?xml version='1.0' encoding='utf-8'?>",
                              b'<?xml version="1.0" encoding="UTF-8"?>'))
        fh.write(b"\n")


def _vectors(centralities) -> list[tuple[str, CentralityVector]]:
    if centralities is None:
        return []
    if isinstance(centralities, Mapping):
        return sorted(centralities.items())
    names = [cv.kind if cv.normalized else f"{cv.kind}_raw" for cv in centralities]
    return list(zip(names, centralities))


def export_graphml(g: CoGraph, partition: Partition | None = None,
                   centralities=None, path="graph.graphml") -> None:
    """GraphML with ``label``, optional ``community`` and one key per centrality."""
    vecs = _vectors(centralities)
    ET.register_namespace("", GRAPHML_NS)
    root = ET.Element("graphml", {"xmlns": GRAPHML_NS})
    keys = [("label", "node", "label", "string")]
    if partition is not None:
        keys.append(("community", "node", "community", "int"))
    keys += [(name, "node", name, "double") for name, _ in vecs]
    keys.append(("weight", "edge", "weight", "double"))
    for kid, kfor, name, ktype in keys:
        ET.SubElement(root, "key", {"id": kid, "for": kfor, "attr.name": name,
                                    "attr.type": ktype})
    graph = ET.SubElement(root, "graph", {"id": "G", "edgedefault": "undirected"})
    for i in range(g.n):
        node = ET.SubElement(graph, "node", {"id": f"n{i}"})
        ET.SubElement(node, "data", {"key": "label"}).text = g.labels[i]
        if partition is not None:
            ET.SubElement(node, "data", {"key": "community"}).text = str(
                int(partition.assignment[i]))
        for name, cv in vecs:
            ET.SubElement(node, "data", {"key": name}).text = repr(float(cv.values[i]))
    for e, (i, j, w) in enumerate(g.edges()):
        edge = ET.SubElement(graph, "edge", {"id": f"e{e}", "source": f"n{i}",
                                             "target": f"n{j}"})
        ET.SubElement(edge, "data", {"key": "weight"}).text = _fmt(w)
    _write_xml(root, path)


def export_gexf(g: CoGraph, partition: Partition | None = None,
                centralities=None, path="graph.gexf") -> None:
    """Same content as :func:`export_graphml` in GEXF 1.2."""
    vecs = _vectors(centralities)
    root = ET.Element("gexf", {
        "xmlns": GEXF_NS, "xmlns:viz": GEXF_VIZ_NS, "xmlns:xsi": _XSI_NS,
        "xsi:schemaLocation": f"{GEXF_NS} {GEXF_NS}/gexf.xsd", "version": "1.2"})
    meta = ET.SubElement(root, "meta")
    ET.SubElement(meta, "creator").text = "coocnet"
    graph = ET.SubElement(root, "graph", {"mode": "static", "defaultedgetype": "undirected"})
    attrs = ET.SubElement(graph, "attributes", {"class": "node", "mode": "static"})
    columns = []
    if partition is not None:
        columns.append(("community", "integer"))
    columns += [(name, "double") for name, _ in vecs]
    for idx, (title, kind) in enumerate(columns):
        ET.SubElement(attrs, "attribute", {"id": str(idx), "title": title, "type": kind})
    nodes = ET.SubElement(graph, "nodes")
    for i in range(g.n):
        node = ET.SubElement(nodes, "node", {"id": str(i), "label": g.labels[i]})
        if columns:
            values = ET.SubElement(node, "attvalues")
            col = 0
            if partition is not None:
                ET.SubElement(values, "attvalue", {"for": "0",
                                                   "value": str(int(partition.assignment[i]))})
                col = 1
            for k, (_, cv) in enumerate(vecs):
                ET.SubElement(values, "attvalue", {"for": str(col + k),
                                                   "value": repr(float(cv.values[i]))})
    edges = ET.SubElement(graph, "edges")
    for e, (i, j, w) in enumerate(g.edges()):
        ET.SubElement(edges, "edge", {"id": str(e), "source": str(i), "target": str(j),
                                      "weight": _fmt(w)})
    _write_xml(root, path)


@dataclass
class ParsedGraph:
    graph: CoGraph
    node_attrs: dict[str, list] = field(default_factory=dict)


def _parsed(n, labels, edge_rows, attrs) -> ParsedGraph:
    rows = np.array([min(a, b) for a, b, _ in edge_rows], np.int64)
    cols = np.array([max(a, b) for a, b, _ in edge_rows], np.int64)
    w = np.array([x for _, _, x in edge_rows], np.float64)
    if w.size and np.all(w == np.round(w)):
        w = w.astype(np.int64)
    return ParsedGraph(_from_upper(n, rows, cols, w, labels), attrs)


_GRAPHML_TYPES = {"int": int, "long": int, "double": float, "float": float, "string": str,
                  "boolean": lambda s: s.lower() == "true"}


def read_graphml(path) -> ParsedGraph:
    """Parse a GraphML file written by :func:`export_graphml`."""
    ns = {"g": GRAPHML_NS}
    root = ET.parse(path).getroot()
    keys = {k.get("id"): (k.get("attr.name"), _GRAPHML_TYPES[k.get("attr.type", "string")])
            for k in root.findall("g:key", ns)}
    graph = root.find("g:graph", ns)
    index, labels = {}, []
    attrs: dict[str, list] = {}
    nodes = graph.findall("g:node", ns)
    for i, node in enumerate(nodes):
        index[node.get("id")] = i
        labels.append(node.get("id"))
        for d in node.findall("g:data", ns):
            name, cast = keys[d.get("key")]
            if name == "label":
                labels[i] = d.text or ""
            else:
                attrs.setdefault(name, [None] * len(nodes))[i] = cast(d.text)
    edge_rows = []
    for edge in graph.findall("g:edge", ns):
        w = 1.0
        for d in edge.findall("g:data", ns):
            if keys[d.get("key")][0] == "weight":
                w = float(d.text)
        edge_rows.append((index[edge.get("source")], index[edge.get("target")], w))
    return _parsed(len(nodes), labels, edge_rows, attrs)


def read_gexf(path) -> ParsedGraph:
    ns = {"x": GEXF_NS}
    root = ET.parse(path).getroot()
    graph = root.find("x:graph", ns)
    titles = {}
    for block in graph.findall("x:attributes", ns):
        if block.get("class") == "node":
            for a in block.findall("x:attribute", ns):
                cast = int if a.get("type") in ("integer", "long") else float
                titles[a.get("id")] = (a.get("title"), cast)
    nodes = graph.find("x:nodes", ns).findall("x:node", ns)
    index, labels, attrs = {}, [], {}
    for i, node in enumerate(nodes):
        index[node.get("id")] = i
        labels.append(node.get("label"))
        for av in node.iter(f"{{{GEXF_NS}}}attvalue"):
            title, cast = titles[av.get("for")]
            attrs.setdefault(title, [None] * len(nodes))[i] = cast(av.get("value"))
    edge_rows = [(index[e.get("source")], index[e.get("target")], float(e.get("weight", 1)))
                 for e in graph.find("x:edges", ns).findall("x:edge", ns)]
    return _parsed(len(nodes), labels, edge_rows, attrs)


# -- report ------------------------------------------------------------------

def _clean(obj):
    """Replace NaN with None and numpy scalars with Python numbers."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, np.generic):
        obj = obj.item()
    if isinstance(obj, float) and math.isnan(obj):
        return None
    return obj


def _num(x, digits=4) -> str:
    if x is None:
        return "n/a"
    if isinstance(x, int):
        return str(x)
    return f"{x:.{digits}f}"


def report_markdown(report: dict) -> str:
    lines = ["# Co-occurrence network analysis", ""]
    lines += ["## Corpus", "", "| Channel | Posts | Words | Avg words/post |", "|---|---:|---:|---:|"]
    for ch, s in report["corpus"]["channels"].items():
        lines.append(f"| {ch} | {s['post_count']} | {s['word_count']} | "
                     f"{s['avg_words_per_post']:.2f} |")
    lines += ["", f"Posts retained: {report['corpus']['posts']}; duplicates collapsed: "
              f"{report['corpus']['duplicates']}; documents with kept tokens: "
              f"{report['corpus']['nonempty_documents']}.", ""]

    lines += ["## Network", ""]
    net = report["network"]
    lines += [f"- vocabulary size: {net['vocabulary_size']}",
              f"- co-occurrence pairs: {net['matrix_pairs']}",
              f"- graph nodes: {net['nodes']}, edges: {net['edges']}", ""]

    metrics = report.get("metrics")
    lines += ["## Graph statistics", ""]
    if metrics == "skipped" or metrics is None:
        lines += ["skipped", ""]
    else:
        st = metrics
        rows = [
            ("Nodes", st["n"]), ("Edges", st["m"]), ("Connected components", st["components"]),
            ("Largest component size", st["largest_component_size"]),
            ("Diameter (largest component)", st["diameter"]),
            ("Average degree 2m/n", st["avg_degree_2m_over_n"]),
            ("Average degree m/n", st["avg_degree_m_over_n"]),
            ("Average path length (largest component)", st["avg_path_length"]),
            ("Power-law exponent (log-log LS)", st["powerlaw_exponent"]),
            ("Power-law fit r²", st["powerlaw_r2"]),
        ]
        comm = report.get("communities")
        if isinstance(comm, dict):
            rows.insert(8, ("Modularity (Louvain)", comm["modularity"]))
        lines += ["| Statistic | Value |", "|---|---:|"]
        lines += [f"| {name} | {_num(v)} |" for name, v in rows]
        lines += ["", "### Degree distribution", "", "| Degree | Count |", "|---:|---:|"]
        lines += [f"| {k} | {c} |" for k, c in st["degree_histogram"].items()]
        lines.append("")

    lines += ["## Keywords", ""]
    kw = report.get("keywords")
    if kw == "skipped" or not kw:
        lines += ["skipped", ""]
    else:
        for metric, table in kw.items():
            title = {"closeness": "Closeness Centrality",
                     "betweenness": "Betweenness Centrality"}.get(metric, metric)
            lines += [f"### {title}", "", f"| Rank | Word | {title} |", "|---:|---|---:|"]
            lines += [f"| {r['rank']} | {r['word']} | {r['value']:.4f} |" for r in table]
            lines.append("")

    lines += ["## Communities", ""]
    comm = report.get("communities")
    if comm == "skipped" or comm is None:
        lines += ["skipped", ""]
    else:
        lines += [f"Louvain modularity {comm['modularity']:.4f} over {comm['count']} "
                  f"communities (seed {comm['seed']}, resolution {comm['resolution']}).", ""]
        lines += ["| Community | Size | Top words |", "|---:|---:|---|"]
        shown = sorted(comm["communities"], key=lambda c: (-c["size"], c["id"]))[:20]
        for c in shown:
            lines.append(f"| {c['id']} | {c['size']} | {'، '.join(c['top_keywords'])} |")
        lines.append("")

    lines += ["## Files", "", "| File | Bytes | SHA-256 |", "|---|---:|---|"]
    for name, info in report["files"].items():
        lines.append(f"| {name} | {info['bytes']} | `{info['sha256'][:16]}` |")
    return "\n".join(lines) + "\n"


def write_report(report: dict, out_dir, stem: str = "report") -> tuple[Path, Path]:
    """Write ``<stem>.json`` (sorted keys, 2-space indent) and ``<stem>.md``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    report = _clean(report)
    jpath, mpath = out_dir / f"{stem}.json", out_dir / f"{stem}.md"
    with open(jpath, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(report, fh, ensure_ascii=False, indent=2, sort_keys=True)
        fh.write("\n")
    with open(mpath, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(report_markdown(report))
    return jpath, mpath
