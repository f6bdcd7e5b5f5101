"""Persian word co-occurrence networks.

Normalize captions, build document-level co-occurrence graphs, rank words
by closeness or betweenness, and find Louvain communities.
"""

from . import _kernels  # noqa: F401  (sets the numba threading layer first)
from .community import LouvainCommunities, Partition, louvain, modularity
from .cooc import CoocMatrix, CooccurrenceVectorizer, Vocabulary, build_cooc, build_vocab
from .corpus import Corpus, RawPost, corpus_stats, load_corpus
from .exceptions import CoocnetError, ConfigurationError, DataError
from .export import export_gexf, export_graphml, write_report
from .graph import CoGraph, check_graph, connected_components, from_matrix
from .keywords import KeywordExtractor, KeywordTable, top_keywords
from .metrics import (CentralityVector, GraphStats, betweenness, closeness, compute_metrics,
                      degree_histogram, graph_stats, powerlaw_fit)
from .normalize import NormalizerConfig, PersianNormalizer, normalize_text
from .tokenize import DocumentTokenizer, TokenDoc, TokenizerConfig

__version__ = "0.1.0"

__all__ = [
    "CentralityVector", "CoGraph", "CoocMatrix", "CooccurrenceVectorizer", "CoocnetError",
    "ConfigurationError", "Corpus", "DataError", "DocumentTokenizer", "GraphStats",
    "KeywordExtractor", "KeywordTable", "LouvainCommunities", "NormalizerConfig", "Partition",
    "PersianNormalizer", "RawPost", "TokenDoc", "TokenizerConfig", "Vocabulary",
    "betweenness", "build_cooc", "build_vocab", "check_graph", "closeness", "compute_metrics",
    "connected_components", "corpus_stats", "degree_histogram", "export_gexf",
    "export_graphml", "from_matrix", "graph_stats", "load_corpus", "louvain", "modularity",
    "normalize_text", "powerlaw_fit", "top_keywords", "write_report",
]
