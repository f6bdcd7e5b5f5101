"""``coocnet`` command-line driver.

Exit codes: 0 success, 1 usage or configuration error, 2 data error,
3 I/O error.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from . import __version__
from .community import Partition, modularity, read_partition_csv, write_partition_csv
from .cooc import MODES, matrix_to_csv, read_matrix_csv
from .corpus import load_corpus, write_corpus
from .exceptions import ConfigurationError, DataError
from .graph import read_graph, write_edge_list, write_graph, write_node_list
from .keywords import METRIC_TITLES
from .metrics import read_metrics_json, write_metrics_json
from .pipeline import (PipelineConfig, export_files, keyword_table, run_report, stage_communities,
                       stage_cooc, stage_graph, stage_ingest, stage_metrics, stage_tokenize,
                       write_centrality_csvs, write_keyword_table)
from .tokenize import read_token_docs, write_token_docs

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_IO = 0, 1, 2, 3

log = logging.getLogger("coocnet")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def _build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="coocnet", description="Word co-occurrence network analysis.")
    p.add_argument("--version", action="version", version=f"coocnet {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def cmd(name, help_):
        s = sub.add_parser(name, help=help_)
        s.add_argument("--config", type=Path, help="pipeline TOML/JSON config")
        return s

    s = cmd("ingest", "load a JSONL/CSV corpus into a checkpoint")
    s.add_argument("path", type=Path)
    s.add_argument("--format", choices=("jsonl", "csv"))
    s.add_argument("--strict", action="store_true", default=None)
    s.add_argument("--out", type=Path, required=True)

    s = cmd("normalize", "normalize and tokenize a corpus checkpoint")
    s.add_argument("--in", dest="inp", type=Path, required=True)
    s.add_argument("--out", type=Path, required=True)

    s = cmd("cooc", "build the co-occurrence matrix")
    s.add_argument("--in", dest="inp", type=Path, required=True)
    s.add_argument("--mode", choices=MODES)
    s.add_argument("--min-df", type=_positive)
    s.add_argument("--out", type=Path, required=True)

    s = cmd("graph", "threshold a matrix into a graph checkpoint")
    s.add_argument("--in", dest="inp", type=Path, required=True)
    s.add_argument("--tau", type=_positive)
    s.add_argument("--drop-isolated", action=argparse.BooleanOptionalAction, default=None)
    s.add_argument("--edges", type=Path, help="also write a word_i,word_j,weight edge list")
    s.add_argument("--nodes", type=Path, help="also write an id,word,degree node list")
    s.add_argument("--out", type=Path, required=True)

    s = cmd("metrics", "centralities and graph statistics")
    s.add_argument("--in", dest="inp", type=Path, required=True)
    s.add_argument("--k-min", type=_positive)
    s.add_argument("--parallel", type=_positive, metavar="W")
    s.add_argument("--csv-dir", type=Path, help="also write centrality_<name>.csv files here")
    s.add_argument("--out", type=Path, required=True)

    s = cmd("communities", "Louvain partition")
    s.add_argument("--in", dest="inp", type=Path, required=True)
    s.add_argument("--seed", type=int)
    s.add_argument("--resolution", type=float)
    s.add_argument("--unweighted", action="store_true")
    s.add_argument("--out", type=Path, required=True)

    s = cmd("keywords", "top-k keyword table from a metrics file")
    s.add_argument("--in", dest="inp", type=Path, required=True, help="metrics.json")
    s.add_argument("--metric", choices=sorted(METRIC_TITLES), default="closeness")
    s.add_argument("--top", type=_positive)
    s.add_argument("--out", type=Path, required=True, help=".md or .csv")

    s = cmd("export", "GraphML/GEXF export")
    s.add_argument("--graph", type=Path, required=True)
    s.add_argument("--partition", type=Path)
    s.add_argument("--metrics", type=Path)
    s.add_argument("--graphml", type=Path)
    s.add_argument("--gexf", type=Path)

    s = cmd("report", "run every stage and write a report directory")
    s.add_argument("--input", type=Path, help="corpus file (overrides [input] path)")
    s.add_argument("--format", choices=("jsonl", "csv"))
    s.add_argument("--seed", type=int)
    s.add_argument("--parallel", type=_positive, metavar="W")
    s.add_argument("--out", type=Path, required=True)
    return p


def _config(args) -> PipelineConfig:
    cfg = PipelineConfig.load(args.config)
    try:
        return cfg.override(
            input_path=getattr(args, "input", None),
            input_format=getattr(args, "format", None),
            strict=getattr(args, "strict", None),
            mode=getattr(args, "mode", None),
            min_df=getattr(args, "min_df", None),
            tau=getattr(args, "tau", None),
            drop_isolated=getattr(args, "drop_isolated", None),
            k_min=getattr(args, "k_min", None),
            parallel=getattr(args, "parallel", None),
            seed=getattr(args, "seed", None),
            resolution=getattr(args, "resolution", None),
            weighted=False if getattr(args, "unweighted", False) else None,
            top_k=getattr(args, "top", None),
        )
    except TypeError as exc:
        raise ConfigurationError(str(exc)) from None


def _parent(path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)


def _run(args) -> None:
    cfg = _config(args)
    c = args.command
    if c == "ingest":
        _parent(args.out)
        write_corpus(stage_ingest(cfg, args.path), args.out)
    elif c == "normalize":
        corpus = load_corpus(args.inp, "jsonl", strict=True)
        _parent(args.out)
        write_token_docs(stage_tokenize(corpus, cfg), args.out)
    elif c == "cooc":
        matrix, vocab = stage_cooc(read_token_docs(args.inp), cfg)
        _parent(args.out)
        matrix_to_csv(matrix, vocab, args.out)
    elif c == "graph":
        matrix, vocab = read_matrix_csv(args.inp)
        g = stage_graph(matrix, vocab, cfg)
        _parent(args.out)
        write_graph(g, args.out)
        if args.edges:
            write_edge_list(g, args.edges)
        if args.nodes:
            write_node_list(g, args.nodes)
    elif c == "metrics":
        g = read_graph(args.inp)
        _parent(args.out)
        report = stage_metrics(g, cfg)
        write_metrics_json(report, g.labels, args.out)
        if args.csv_dir:
            args.csv_dir.mkdir(parents=True, exist_ok=True)
            write_centrality_csvs(report.vectors(), g.labels, args.csv_dir)
    elif c == "communities":
        g = read_graph(args.inp)
        if g.m == 0:
            raise DataError(f"{args.inp}: graph has no edges to partition")
        p = stage_communities(g, cfg)
        log.info("modularity %.6f over %d communities", p.modularity, p.count)
        _parent(args.out)
        write_partition_csv(g, p, args.out)
    elif c == "keywords":
        labels, vectors, _ = read_metrics_json(args.inp)
        _parent(args.out)
        table = keyword_table(vectors, labels, args.metric, cfg.top_k, cfg.config_hash())
        write_keyword_table(table, args.out)
    elif c == "export":
        if not (args.graphml or args.gexf):
            raise UsageError("export: give --graphml and/or --gexf")
        g = read_graph(args.graph)
        partition = None
        if args.partition:
            a = read_partition_csv(args.partition, g)
            partition = Partition(a, modularity(g, a, cfg.resolution, cfg.weighted))
        vectors = {}
        if args.metrics:
            labels, vectors, _ = read_metrics_json(args.metrics)
            if list(labels) != list(g.labels):
                raise DataError(f"{args.metrics}: node list does not match {args.graph}")
        for path in (args.graphml, args.gexf):
            if path:
                _parent(path)
        export_files(g, partition, vectors, args.graphml, args.gexf)
    elif c == "report":
        run_report(cfg, args.out)


def _setup_logging() -> None:
    level = os.environ.get("COOCNET_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


def main(argv=None) -> int:
    _setup_logging()
    try:
        args = _build_parser().parse_args(argv)
        _run(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    except ConfigurationError as exc:
        print(f"coocnet: configuration error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"coocnet: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        where = f" ({exc.filename})" if getattr(exc, "filename", None) else ""
        print(f"coocnet: I/O error: {exc}{where}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, RuntimeError) as exc:
        print(f"coocnet: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
