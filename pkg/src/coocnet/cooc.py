"""Vocabulary and document-level co-occurrence matrix."""

from __future__ import annotations

import csv
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np
import scipy.sparse as sp
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .exceptions import DataError
from .tokenize import TokenDoc

MODES = ("doc_binary", "pair_min", "pair_product")
CSV_HEADER = ("word_i", "word_j", "weight")
_SHARD = 512


class Vocabulary:
    """Bijection between words and dense ids ``0..V-1``."""

    def __init__(self, words: Iterable[str] = ()):
        self._words: list[str] = []
        self._ids: dict[str, int] = {}
        for w in words:
            self.add(w)

    def add(self, word: str) -> int:
        idx = self._ids.get(word)
        if idx is None:
            idx = self._ids[word] = len(self._words)
            self._words.append(word)
        return idx

    @property
    def words(self) -> tuple[str, ...]:
        return tuple(self._words)

    def id(self, word: str) -> int:
        return self._ids[word]

    def get(self, word: str, default=None):
        return self._ids.get(word, default)

    def word(self, idx: int) -> str:
        return self._words[idx]

    def __contains__(self, word) -> bool:
        return word in self._ids

    def __len__(self) -> int:
        return len(self._words)

    def __iter__(self) -> Iterator[str]:
        return iter(self._words)

    def __eq__(self, other) -> bool:
        return isinstance(other, Vocabulary) and self._words == other._words

    def __repr__(self) -> str:
        return f"Vocabulary(V={len(self)})"


def _kept(doc) -> Sequence[str]:
    return doc.kept_tokens if isinstance(doc, TokenDoc) else doc


def build_vocab(docs: Iterable[TokenDoc | Sequence[str]], min_df: int = 1) -> Vocabulary:
    """Distinct kept tokens in first-occurrence order.

    Words found in fewer than ``min_df`` documents are left out; the
    remaining ids stay dense and keep first-occurrence order.
    """
    if min_df < 1:
        raise ValueError("min_df must be >= 1")
    order: dict[str, int] = {}
    df: Counter = Counter()
    for doc in docs:
        seen = set()
        for tok in _kept(doc):
            if tok not in seen:
                seen.add(tok)
                order.setdefault(tok, len(order))
        df.update(seen)
    return Vocabulary(w for w in order if df[w] >= min_df)


@dataclass(frozen=True, eq=False)
class CoocMatrix:
    """Upper-triangle sparse co-occurrence weights.

    Entries are stored once per unordered pair with ``rows < cols``, sorted
    by ``(row, col)``. Weights are integers in every mode.
    """

    size: int
    rows: np.ndarray
    cols: np.ndarray
    weights: np.ndarray
    mode: str = "doc_binary"

    @classmethod
    def from_dict(cls, size: int, entries: dict, mode: str = "doc_binary") -> "CoocMatrix":
        items = []
        for (i, j), w in entries.items():
            if i == j:
                raise DataError("co-occurrence matrix cannot have diagonal entries")
            items.append((min(i, j), max(i, j), w))
        items.sort()
        arr = np.array(items, dtype=np.int64).reshape(-1, 3)
        return cls(size, arr[:, 0].copy(), arr[:, 1].copy(), arr[:, 2].copy(), mode)

    @property
    def nnz(self) -> int:
        return int(self.rows.size)

    def get(self, i: int, j: int) -> int:
        if i == j:
            return 0
        i, j = min(i, j), max(i, j)
        key = i * self.size + j
        keys = self.rows * self.size + self.cols
        pos = np.searchsorted(keys, key)
        if pos < keys.size and keys[pos] == key:
            return int(self.weights[pos])
        return 0

    def items(self) -> Iterator[tuple[int, int, int]]:
        for i, j, w in zip(self.rows.tolist(), self.cols.tolist(), self.weights.tolist()):
            yield i, j, w

    def to_dict(self) -> dict[tuple[int, int], int]:
        return {(i, j): w for i, j, w in self.items()}

    def to_sparse(self) -> sp.csr_matrix:
        """Full symmetric ``V x V`` matrix."""
        r = np.concatenate([self.rows, self.cols])
        c = np.concatenate([self.cols, self.rows])
        w = np.concatenate([self.weights, self.weights])
        return sp.csr_matrix((w, (r, c)), shape=(self.size, self.size))

    def __eq__(self, other) -> bool:
        if not isinstance(other, CoocMatrix):
            return NotImplemented
        return (self.size == other.size and np.array_equal(self.rows, other.rows)
                and np.array_equal(self.cols, other.cols)
                and np.array_equal(self.weights, other.weights))


def _doc_pairs(ids: np.ndarray, counts: np.ndarray, size: int, mode: str):
    a, b = np.triu_indices(ids.size, k=1)
    keys = ids[a] * size + ids[b]
    if mode == "doc_binary":
        w = np.ones(keys.size, dtype=np.int64)
    elif mode == "pair_min":
        w = np.minimum(counts[a], counts[b])
    else:
        w = counts[a] * counts[b]
    return keys, w


def _aggregate(keys: np.ndarray, weights: np.ndarray):
    if keys.size == 0:
        return keys, weights
    uniq, inv = np.unique(keys, return_inverse=True)
    return uniq, np.bincount(inv, weights=weights, minlength=uniq.size).astype(np.int64)


def _shard_partial(docs, vocab: Vocabulary, mode: str, ignore_unknown: bool):
    size = len(vocab)
    key_parts, w_parts = [], []
    for doc in docs:
        tf: Counter = Counter()
        for tok in _kept(doc):
            idx = vocab.get(tok)
            if idx is None:
                if ignore_unknown:
                    continue
                raise DataError(f"token {tok!r} is missing from the vocabulary")
            tf[idx] += 1
        if len(tf) < 2:
            continue
        ids = np.array(sorted(tf), dtype=np.int64)
        counts = np.array([tf[i] for i in ids.tolist()], dtype=np.int64)
        k, w = _doc_pairs(ids, counts, size, mode)
        key_parts.append(k)
        w_parts.append(w)
    if not key_parts:
        return np.empty(0, np.int64), np.empty(0, np.int64)
    return _aggregate(np.concatenate(key_parts), np.concatenate(w_parts))


def merge_partials(parts: Iterable[tuple[np.ndarray, np.ndarray]]):
    """Sum partial ``(keys, weights)`` maps; order of ``parts`` is irrelevant."""
    parts = list(parts)
    if not parts:
        return np.empty(0, np.int64), np.empty(0, np.int64)
    return _aggregate(np.concatenate([k for k, _ in parts]),
                      np.concatenate([w for _, w in parts]))


def build_cooc(docs: Sequence[TokenDoc | Sequence[str]], vocab: Vocabulary,
               mode: str = "doc_binary", ignore_unknown: bool = False) -> CoocMatrix:
    """Accumulate per-document pair weights.

    For every document and unordered pair of distinct words in it, the pair
    gains 1 (``doc_binary``), ``min(tf_i, tf_j)`` (``pair_min``) or
    ``tf_i * tf_j`` (``pair_product``), ``tf`` being the in-document count.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    docs = list(docs)
    parts = [_shard_partial(docs[s:s + _SHARD], vocab, mode, ignore_unknown)
             for s in range(0, len(docs), _SHARD)]
    keys, weights = merge_partials(parts)
    size = len(vocab)
    if size:
        rows, cols = np.divmod(keys, size)
    else:
        rows = cols = np.empty(0, np.int64)
    return CoocMatrix(size, rows.astype(np.int64), cols.astype(np.int64),
                      weights.astype(np.int64), mode)


# -- serialization -----------------------------------------------------------

def vocab_path_for(csv_path: str | Path) -> Path:
    """Sidecar file holding the full vocabulary next to a matrix CSV."""
    p = Path(csv_path)
    return p.with_name(p.name + ".vocab")


def write_vocab(vocab: Vocabulary, path: str | Path, mode: str | None = None) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        if mode:
            fh.write(f"# mode={mode}\n")
        for w in vocab:
            fh.write(w + "\n")


def read_vocab(path: str | Path) -> tuple[Vocabulary, str | None]:
    mode = None
    words = []
    with open(path, encoding="utf-8", newline="") as fh:
        for line in fh.read().split("\n"):
            if line.startswith("# mode="):
                mode = line[len("# mode="):].strip()
            elif line:
                words.append(line)
    return Vocabulary(words), mode


def matrix_to_csv(m: CoocMatrix, vocab: Vocabulary, path: str | Path,
                  write_sidecar: bool = True) -> None:
    """Write ``word_i,word_j,weight`` rows sorted by ``(i, j)``.

    A ``<path>.vocab`` sidecar keeps words without any pair so the graph
    stage can rebuild the exact vocabulary.
    """
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        words = vocab.words
        for i, j, w in m.items():
            writer.writerow((words[i], words[j], w))
    if write_sidecar:
        write_vocab(vocab, vocab_path_for(path), m.mode)


def read_matrix_csv(path: str | Path, vocab: Vocabulary | None = None,
                    mode: str | None = None) -> tuple[CoocMatrix, Vocabulary]:
    """Read a matrix CSV; uses the ``.vocab`` sidecar when present."""
    path = Path(path)
    side_mode = None
    if vocab is None and vocab_path_for(path).exists():
        vocab, side_mode = read_vocab(vocab_path_for(path))
    grow = vocab is None
    vocab = Vocabulary() if vocab is None else vocab
    entries: dict[tuple[int, int], int] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise DataError(f"{path}: missing header")
        if tuple(h.strip() for h in header) != CSV_HEADER:
            raise DataError(f"{path}: header must be {','.join(CSV_HEADER)}", 1)
        for row in reader:
            line = reader.line_num
            if len(row) != 3:
                raise DataError(f"{path}: expected 3 fields", line)
            a, b, w = row
            try:
                weight = int(w)
            except ValueError:
                raise DataError(f"{path}: weight {w!r} is not an integer", line) from None
            if grow:
                i, j = vocab.add(a), vocab.add(b)
            else:
                if a not in vocab or b not in vocab:
                    raise DataError(f"{path}: word not in vocabulary", line)
                i, j = vocab.id(a), vocab.id(b)
            if i == j:
                raise DataError(f"{path}: self pair for {a!r}", line)
            key = (min(i, j), max(i, j))
            if key in entries:
                raise DataError(f"{path}: duplicate pair {a!r},{b!r}", line)
            if weight < 1:
                raise DataError(f"{path}: weights must be >= 1", line)
            entries[key] = weight
    m = CoocMatrix.from_dict(len(vocab), entries, mode or side_mode or "doc_binary")
    return m, vocab


class CooccurrenceVectorizer(TransformerMixin, BaseEstimator):
    """Map token lists to a symmetric word co-occurrence adjacency matrix.

    ``fit`` learns the vocabulary; ``transform`` returns the ``V x V`` sparse
    matrix of the given documents over that vocabulary, dropping entries
    below ``min_weight``. Unknown tokens are ignored at transform time.

    Parameters
    ----------
    mode : {"doc_binary", "pair_min", "pair_product"}, default="doc_binary"
    min_df : int, default=1
        Minimum number of documents a word must appear in.
    min_weight : int, default=1
        Edge weight threshold applied to the transformed matrix.
    """

    def __init__(self, mode="doc_binary", min_df=1, min_weight=1):
        self.mode = mode
        self.min_df = min_df
        self.min_weight = min_weight

    def fit(self, X, y=None):
        docs = _check_token_lists(X)
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if int(self.min_weight) < 1:
            raise ValueError("min_weight must be >= 1")
        self.vocabulary_ = build_vocab(docs, min_df=int(self.min_df))
        self.n_features_in_ = len(self.vocabulary_)
        return self

    def cooccurrence(self, X) -> CoocMatrix:
        check_is_fitted(self, "vocabulary_")
        return build_cooc(_check_token_lists(X), self.vocabulary_, self.mode,
                          ignore_unknown=True)

    def transform(self, X):
        m = self.cooccurrence(X)
        keep = m.weights >= self.min_weight
        m = CoocMatrix(m.size, m.rows[keep], m.cols[keep], m.weights[keep], m.mode)
        return m.to_sparse()

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "vocabulary_")
        return np.asarray(self.vocabulary_.words, dtype=object)


def _check_token_lists(X) -> list:
    if isinstance(X, str):
        raise TypeError("expected an iterable of token lists, got a string")
    docs = list(X)
    for d in docs:
        if isinstance(d, str):
            raise TypeError("each document must be a sequence of tokens, not a string")
    return docs
