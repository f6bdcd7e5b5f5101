"""Keyword tables ranked by a single centrality."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Sequence

from sklearn.base import BaseEstimator, clone
from sklearn.utils.validation import check_is_fitted

from .cooc import Vocabulary, build_cooc, build_vocab
from .graph import from_matrix
from .metrics import CentralityVector, betweenness, closeness
from .tokenize import DocumentTokenizer

METRIC_TITLES = {
    "closeness": "Closeness Centrality",
    "betweenness": "Betweenness Centrality",
}


@dataclass(frozen=True)
class KeywordRow:
    rank: int
    word: str
    metric: str
    value: float


@dataclass(frozen=True)
class KeywordTable:
    rows: tuple[KeywordRow, ...]
    metric: str
    channel: str = ""
    provenance: str = ""

    def words(self) -> list[str]:
        return [r.word for r in self.rows]

    def head(self, k: int) -> "KeywordTable":
        return KeywordTable(self.rows[:k], self.metric, self.channel, self.provenance)

    def to_markdown(self, title: str | None = None) -> str:
        heading = METRIC_TITLES.get(self.metric, self.metric)
        lines = []
        if title:
            lines += [f"### {title}", ""]
        lines += [f"| Rank | Word | {heading} |", "|---:|---|---:|"]
        lines += [f"| {r.rank} | {r.word} | {r.value:.4f} |" for r in self.rows]
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(("rank", "word", "metric", "value"))
        for r in self.rows:
            writer.writerow((r.rank, r.word, r.metric, f"{r.value:.4f}"))
        return buf.getvalue()


def _labels(vocab) -> Sequence[str]:
    return vocab.words if isinstance(vocab, Vocabulary) else vocab


def top_keywords(cv: CentralityVector, vocab: Vocabulary | Sequence[str], k: int,
                 channel: str = "", provenance: str = "") -> KeywordTable:
    """Top ``k`` words by value, ties broken by ascending word."""
    if k < 1:
        raise ValueError("k must be >= 1")
    labels = _labels(vocab)
    if len(labels) != cv.values.size:
        raise ValueError("vocabulary size does not match the centrality vector")
    vals = cv.values.tolist()
    order = sorted(range(len(vals)), key=lambda i: (-vals[i], labels[i]))[:k]
    rows = tuple(KeywordRow(r, labels[i], cv.kind, vals[i]) for r, i in enumerate(order, 1))
    return KeywordTable(rows, cv.kind, channel, provenance)


class KeywordExtractor(BaseEstimator):
    """Unsupervised keywords from raw captions via a co-occurrence graph.

    Parameters
    ----------
    tokenizer : DocumentTokenizer or None, default=None
    mode : str, default="doc_binary"
        Co-occurrence weighting.
    min_df : int, default=1
    tau : int, default=1
        Minimum edge weight.
    metric : {"closeness", "betweenness"}, default="closeness"
    top_k : int, default=10
    workers : int, default=1
    """

    def __init__(self, tokenizer=None, mode="doc_binary", min_df=1, tau=1,
                 metric="closeness", top_k=10, workers=1):
        self.tokenizer = tokenizer
        self.mode = mode
        self.min_df = min_df
        self.tau = tau
        self.metric = metric
        self.top_k = top_k
        self.workers = workers

    def fit(self, X, y=None):
        if self.metric not in METRIC_TITLES:
            raise ValueError(f"metric must be one of {sorted(METRIC_TITLES)}")
        tok = self.tokenizer if self.tokenizer is not None else DocumentTokenizer()
        self.tokenizer_ = clone(tok).fit(X)
        docs = self.tokenizer_.transform(X)
        self.vocabulary_ = build_vocab(docs, self.min_df)
        matrix = build_cooc(docs, self.vocabulary_, self.mode, ignore_unknown=True)
        self.graph_ = from_matrix(matrix, self.vocabulary_, self.tau, drop_isolated=True)
        if self.metric == "closeness":
            self.centrality_ = closeness(self.graph_, workers=self.workers)
        else:
            self.centrality_ = betweenness(self.graph_, workers=self.workers)
        k = max(1, min(int(self.top_k), self.graph_.n)) if self.graph_.n else 1
        self.keywords_ = (top_keywords(self.centrality_, self.graph_.labels, k)
                          if self.graph_.n else KeywordTable((), self.metric))
        return self

    def get_keywords(self) -> list[str]:
        check_is_fitted(self, "keywords_")
        return self.keywords_.words()
