"""Pipeline configuration and the stage functions shared by every entry point.

Each stage writes a plain checkpoint file. ``run_report`` calls the very
same writers, so a staged run and a single-shot run emit identical bytes.
"""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Mapping

from .community import Partition, community_keywords, louvain, write_partition_csv
from .cooc import MODES, CoocMatrix, Vocabulary, build_cooc, build_vocab, matrix_to_csv
from .corpus import Corpus, corpus_stats, load_corpus, write_corpus
from .exceptions import ConfigurationError
from .export import export_gexf, export_graphml, write_report
from .graph import CoGraph, from_matrix, write_edge_list, write_graph, write_node_list
from .keywords import METRIC_TITLES, KeywordTable, top_keywords
from .metrics import (CentralityVector, MetricsReport, closeness, compute_metrics,
                      write_centrality_csv, write_metrics_json)
from .normalize import NormalizerConfig, load_config_file
from .tokenize import TokenDoc, TokenizerConfig, build_token_docs, write_token_docs

log = logging.getLogger("coocnet")

SECTIONS = ("input", "normalize", "tokenize", "cooc", "graph", "metrics", "community",
            "keywords", "export")

# artifact names inside a report directory
CORPUS_CKPT = "corpus.ckpt"
DOCS_CKPT = "docs.ckpt"
MATRIX_CSV = "matrix.csv"
GRAPH_CKPT = "graph.ckpt"
EDGES_CSV = "edges.csv"
NODES_CSV = "nodes.csv"
METRICS_JSON = "metrics.json"
PARTITION_CSV = "partition.csv"
GRAPHML = "graph.graphml"
GEXF = "graph.gexf"


def toy_corpus_path() -> Path:
    return Path(str(resources.files("coocnet") / "data" / "toy_corpus.jsonl"))


def _section(data: Mapping, name: str) -> dict:
    value = data.get(name, {})
    if not isinstance(value, Mapping):
        raise ConfigurationError(f"[{name}] must be a table")
    return dict(value)


def _check_keys(name: str, table: Mapping, allowed: set) -> None:
    unknown = set(table) - allowed
    if unknown:
        raise ConfigurationError(f"unknown key(s) in [{name}]: {', '.join(sorted(unknown))}")


def _int(name: str, value, low: int) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < low:
        raise ConfigurationError(f"{name} must be an integer >= {low}, got {value!r}")
    return value


@dataclass(frozen=True)
class PipelineConfig:
    """Every knob of a full analysis; built from one TOML file plus flags."""

    input_path: Path | None = None
    input_format: str = "jsonl"
    strict: bool = False
    normalizer: NormalizerConfig = field(default_factory=NormalizerConfig)
    tokenizer: TokenizerConfig = field(default_factory=TokenizerConfig)
    mode: str = "doc_binary"
    min_df: int = 1
    tau: int = 1
    drop_isolated: bool = True
    metrics_enabled: bool = True
    k_min: int = 1
    parallel: int = 1
    community_enabled: bool = True
    seed: int = 42
    resolution: float = 1.0
    weighted: bool = True
    community_top_k: int = 5
    keywords_enabled: bool = True
    keyword_metrics: tuple[str, ...] = ("closeness", "betweenness")
    top_k: int = 10
    graphml: bool = True
    gexf: bool = True

    def __post_init__(self):
        if self.input_format not in ("jsonl", "csv"):
            raise ConfigurationError(f"input format must be jsonl or csv, got {self.input_format!r}")
        if self.mode not in MODES:
            raise ConfigurationError(f"cooc mode must be one of {', '.join(MODES)}")
        _int("min_df", self.min_df, 1)
        _int("tau", self.tau, 1)
        _int("k_min", self.k_min, 1)
        _int("parallel", self.parallel, 1)
        _int("seed", self.seed, 0)
        _int("top_k", self.top_k, 1)
        _int("community top_k", self.community_top_k, 1)
        if not isinstance(self.resolution, (int, float)) or self.resolution <= 0:
            raise ConfigurationError("resolution must be a positive number")
        bad = [m for m in self.keyword_metrics if m not in METRIC_TITLES]
        if bad:
            raise ConfigurationError(f"unknown keyword metric(s): {', '.join(bad)}")

    @classmethod
    def from_mapping(cls, data: Mapping, base_dir: str | Path = ".") -> "PipelineConfig":
        base_dir = Path(base_dir)
        _check_keys("top level", data, set(SECTIONS))
        inp = _section(data, "input")
        _check_keys("input", inp, {"path", "format", "strict"})
        tok = _section(data, "tokenize")
        _check_keys("tokenize", tok, {"stopwords", "stoplist", "tag_mode", "annotations",
                                      "keep_numeric"})
        norm = _section(data, "normalize")
        _check_keys("normalize", norm, {"steps", "charset_extra", "unify_table", "affix_table"})
        cooc = _section(data, "cooc")
        _check_keys("cooc", cooc, {"mode", "min_df"})
        graph = _section(data, "graph")
        _check_keys("graph", graph, {"tau", "drop_isolated"})
        met = _section(data, "metrics")
        _check_keys("metrics", met, {"enabled", "k_min", "parallel"})
        com = _section(data, "community")
        _check_keys("community", com, {"enabled", "seed", "resolution", "weighted", "top_k"})
        kw = _section(data, "keywords")
        _check_keys("keywords", kw, {"enabled", "top_k", "metrics"})
        exp = _section(data, "export")
        _check_keys("export", exp, {"graphml", "gexf"})
        try:
            normalizer = NormalizerConfig.from_mapping(norm, base_dir)
            tokenizer = TokenizerConfig.from_mapping(tok, base_dir)
        except (ValueError, OSError) as exc:
            raise ConfigurationError(str(exc)) from None
        metrics = kw.get("metrics", cls.keyword_metrics)
        if isinstance(metrics, str):
            metrics = (metrics,)
        return cls(
            input_path=(base_dir / inp["path"]) if inp.get("path") else None,
            input_format=inp.get("format", "jsonl"),
            strict=bool(inp.get("strict", False)),
            normalizer=normalizer, tokenizer=tokenizer,
            mode=cooc.get("mode", "doc_binary"), min_df=cooc.get("min_df", 1),
            tau=graph.get("tau", 1), drop_isolated=bool(graph.get("drop_isolated", True)),
            metrics_enabled=bool(met.get("enabled", True)), k_min=met.get("k_min", 1),
            parallel=met.get("parallel", 1),
            community_enabled=bool(com.get("enabled", True)), seed=com.get("seed", 42),
            resolution=com.get("resolution", 1.0), weighted=bool(com.get("weighted", True)),
            community_top_k=com.get("top_k", 5),
            keywords_enabled=bool(kw.get("enabled", True)), keyword_metrics=tuple(metrics),
            top_k=kw.get("top_k", 10),
            graphml=bool(exp.get("graphml", True)), gexf=bool(exp.get("gexf", True)),
        )

    @classmethod
    def load(cls, path: str | Path | None) -> "PipelineConfig":
        if path is None:
            return cls()
        path = Path(path)
        try:
            data = load_config_file(path)  # OSError propagates as an I/O failure
        except ValueError as exc:  # TOML/JSON syntax
            raise ConfigurationError(f"{path}: {exc}") from None
        return cls.from_mapping(data, path.parent)

    def override(self, **changes) -> "PipelineConfig":
        """Copy with the non-None ``changes`` applied (command-line flags)."""
        return replace(self, **{k: v for k, v in changes.items() if v is not None})

    def config_hash(self) -> str:
        blob = json.dumps(self.echo(), sort_keys=True, ensure_ascii=False)
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]

    def echo(self) -> dict:
        return {
            "input": {"path": self.input_path.name if self.input_path else None,
                      "format": self.input_format, "strict": self.strict},
            "normalize": self.normalizer.echo(),
            "tokenize": self.tokenizer.echo(),
            "cooc": {"mode": self.mode, "min_df": self.min_df},
            "graph": {"tau": self.tau, "drop_isolated": self.drop_isolated},
            "metrics": {"enabled": self.metrics_enabled, "k_min": self.k_min},
            "community": {"enabled": self.community_enabled, "seed": self.seed,
                          "resolution": self.resolution, "weighted": self.weighted,
                          "top_k": self.community_top_k},
            "keywords": {"enabled": self.keywords_enabled,
                         "metrics": list(self.keyword_metrics), "top_k": self.top_k},
            "export": {"graphml": self.graphml, "gexf": self.gexf},
        }


# -- stages ------------------------------------------------------------------

def stage_ingest(cfg: PipelineConfig, path=None) -> Corpus:
    path = path or cfg.input_path or toy_corpus_path()
    corpus = load_corpus(path, cfg.input_format, cfg.strict)
    log.info("ingested %d posts (%d duplicates, %d skipped)", len(corpus),
             corpus.duplicates, corpus.skipped)
    return corpus


def stage_tokenize(corpus: Corpus, cfg: PipelineConfig) -> list[TokenDoc]:
    return build_token_docs(corpus, cfg.normalizer, cfg.tokenizer)


def stage_cooc(docs, cfg: PipelineConfig) -> tuple[CoocMatrix, Vocabulary]:
    vocab = build_vocab(docs, cfg.min_df)
    matrix = build_cooc(docs, vocab, cfg.mode, ignore_unknown=cfg.min_df > 1)
    log.info("vocabulary %d words, %d co-occurring pairs", len(vocab), matrix.nnz)
    return matrix, vocab


def stage_graph(matrix: CoocMatrix, vocab: Vocabulary, cfg: PipelineConfig) -> CoGraph:
    g = from_matrix(matrix, vocab, cfg.tau, cfg.drop_isolated)
    log.info("graph with %d nodes and %d edges", g.n, g.m)
    return g


def stage_metrics(g: CoGraph, cfg: PipelineConfig) -> MetricsReport:
    return compute_metrics(g, cfg.k_min, cfg.parallel)


def stage_communities(g: CoGraph, cfg: PipelineConfig) -> Partition:
    return louvain(g, seed=cfg.seed, resolution=cfg.resolution, weighted=cfg.weighted)


def keyword_table(vectors: Mapping[str, CentralityVector], labels, metric: str,
                  top_k: int, provenance: str = "") -> KeywordTable:
    if metric not in vectors:
        raise ConfigurationError(f"metric {metric!r} not available")
    if not labels:
        return KeywordTable((), metric, provenance=provenance)
    return top_keywords(vectors[metric], labels, min(top_k, len(labels)),
                        provenance=provenance)


def write_centrality_csvs(vectors: Mapping[str, CentralityVector], labels, out_dir) -> list[str]:
    """``centrality_<name>.csv`` for the normalized closeness and betweenness vectors."""
    names = []
    for name in ("closeness", "betweenness"):
        fname = f"centrality_{name}.csv"
        write_centrality_csv(vectors[name], list(labels), Path(out_dir) / fname)
        names.append(fname)
    return names


def write_keyword_table(table: KeywordTable, path) -> None:
    text = table.to_csv() if str(path).endswith(".csv") else table.to_markdown()
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def export_files(g: CoGraph, partition: Partition | None, vectors, graphml=None,
                 gexf=None) -> None:
    if graphml:
        export_graphml(g, partition, vectors, graphml)
    if gexf:
        export_gexf(g, partition, vectors, gexf)


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def run_report(cfg: PipelineConfig, out_dir) -> dict:
    """Run every stage, write all checkpoints and the report into ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    emitted: list[str] = []

    def dest(name: str) -> Path:
        emitted.append(name)
        return out / name

    corpus = stage_ingest(cfg)
    write_corpus(corpus, dest(CORPUS_CKPT))
    docs = stage_tokenize(corpus, cfg)
    write_token_docs(docs, dest(DOCS_CKPT))
    matrix, vocab = stage_cooc(docs, cfg)
    matrix_to_csv(matrix, vocab, dest(MATRIX_CSV))
    emitted.append(MATRIX_CSV + ".vocab")
    g = stage_graph(matrix, vocab, cfg)
    write_graph(g, dest(GRAPH_CKPT))
    write_edge_list(g, dest(EDGES_CSV))
    write_node_list(g, dest(NODES_CSV))

    report: dict = {
        "config": cfg.echo(),
        "config_hash": cfg.config_hash(),
        "corpus": {"channels": corpus_stats(corpus), "posts": len(corpus),
                   "duplicates": corpus.duplicates, "skipped": corpus.skipped,
                   "nonempty_documents": sum(1 for d in docs if d.kept_tokens)},
        "network": {"vocabulary_size": len(vocab), "matrix_pairs": matrix.nnz,
                    "nodes": g.n, "edges": g.m},
    }

    vectors: dict[str, CentralityVector] = {}
    if cfg.metrics_enabled:
        metrics = stage_metrics(g, cfg)
        write_metrics_json(metrics, g.labels, dest(METRICS_JSON))
        vectors = metrics.vectors()
        emitted.extend(write_centrality_csvs(vectors, g.labels, out))
        report["metrics"] = metrics.stats.to_json()
    else:
        report["metrics"] = "skipped"

    partition = None
    if cfg.community_enabled and g.m > 0:
        partition = stage_communities(g, cfg)
        write_partition_csv(g, partition, dest(PARTITION_CSV))
        ranker = vectors.get("closeness") or closeness(g)
        tops = community_keywords(g, partition, ranker, cfg.community_top_k)
        sizes = partition.sizes().tolist()
        report["communities"] = {
            "modularity": partition.modularity, "levels": list(partition.levels),
            "count": partition.count, "seed": cfg.seed, "resolution": cfg.resolution,
            "communities": [{"id": c, "size": sizes[c], "top_keywords": tops[c]}
                            for c in range(partition.count)],
        }
    else:
        report["communities"] = "skipped"

    if cfg.keywords_enabled and vectors:
        report["keywords"] = {}
        for metric in cfg.keyword_metrics:
            table = keyword_table(vectors, g.labels, metric, cfg.top_k, cfg.config_hash())
            write_keyword_table(table, dest(f"keywords_{metric}.md"))
            write_keyword_table(table, dest(f"keywords_{metric}.csv"))
            report["keywords"][metric] = [
                {"rank": r.rank, "word": r.word, "value": r.value} for r in table.rows]
    else:
        report["keywords"] = "skipped"

    export_files(g, partition, vectors,
                 dest(GRAPHML) if cfg.graphml else None, dest(GEXF) if cfg.gexf else None)

    report["files"] = {name: {"bytes": (out / name).stat().st_size,
                              "sha256": _sha256(out / name)} for name in sorted(emitted)}
    write_report(report, out)
    return report
