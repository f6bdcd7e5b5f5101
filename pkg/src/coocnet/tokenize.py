"""Sentence splitting, tokenization and token filtering.

Character normalization would erase sentence-final marks, so documents are
split into sentences right after link/ID/hashtag removal and every sentence
is then normalized on its own.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from sklearn.base import BaseEstimator, TransformerMixin, clone
from sklearn.utils.validation import check_is_fitted

from .corpus import Corpus, RawPost
from .exceptions import ConfigurationError, DataError
from .normalize import (NormalizerConfig, PersianNormalizer, _data_path, normalize_text,
                        strip_links_ids_hashtags)

NOUN, ADJ, OTHER = "NOUN", "ADJ", "OTHER"
KEPT_TAGS = frozenset({NOUN, ADJ})

# common tagger outputs folded into the three classes used here
_TAG_ALIASES = {
    "NOUN": NOUN, "N": NOUN, "NE": NOUN, "PROPN": NOUN, "NN": NOUN, "NNS": NOUN, "NNP": NOUN,
    "ADJ": ADJ, "AJ": ADJ, "AJE": ADJ, "JJ": ADJ,
}

_SENTENCE_RE = re.compile(r"[.!?؟؛\n]")
_NUMERIC_RE = re.compile(r"[0-9]+")


def split_sentences(text: str) -> list[str]:
    """Split on ``. ! ? ؟ ؛`` and newlines, dropping empty segments."""
    return [s.strip() for s in _SENTENCE_RE.split(text) if s.strip()]


def tokenize(sentence: str) -> list[str]:
    # ZWNJ is not whitespace, so half-spaced words stay one token
    return sentence.split()


def remove_stopwords(tokens: Sequence[str], stoplist: Iterable[str]) -> list[str]:
    stop = stoplist if isinstance(stoplist, (set, frozenset)) else set(stoplist)
    return [t for t in tokens if t not in stop]


def is_numeric_token(token: str) -> bool:
    return _NUMERIC_RE.fullmatch(token) is not None


def read_stoplist(path: str | Path) -> frozenset[str]:
    with open(path, encoding="utf-8") as fh:
        return frozenset(w for w in (line.strip() for line in fh)
                         if w and not w.startswith("#"))


@lru_cache(maxsize=None)
def default_stoplist() -> frozenset[str]:
    return read_stoplist(_data_path("stopwords_fa.txt"))


class TagAnnotation(Mapping):
    """Token to coarse tag lookup; unknown tokens are ``OTHER``."""

    def __init__(self, tags: Mapping[str, str] | None = None):
        self._tags = {tok: _canonical_tag(tag) for tok, tag in (tags or {}).items()}

    @classmethod
    def read(cls, path: str | Path) -> "TagAnnotation":
        """Read a ``token<TAB>TAG`` file produced by any external tagger."""
        tags = {}
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.rstrip("\n").rstrip("\r")
                if not line or line.startswith("#"):
                    continue
                parts = line.split("\t")
                if len(parts) != 2 or not parts[0]:
                    raise DataError(f"{path}: expected token<TAB>TAG", lineno)
                tags[parts[0]] = parts[1]
        return cls(tags)

    def __getitem__(self, token: str) -> str:
        return self._tags.get(token, OTHER)

    def __contains__(self, token) -> bool:
        return token in self._tags

    def __iter__(self):
        return iter(self._tags)

    def __len__(self) -> int:
        return len(self._tags)


def _canonical_tag(tag: str) -> str:
    return _TAG_ALIASES.get(tag.strip().upper(), OTHER)


def tag_filter(tokens: Sequence[str], annotation: Mapping[str, str] | None,
               mode: str = "passthrough") -> list[str]:
    """Keep NOUN/ADJ tokens (``annotated``) or everything (``passthrough``)."""
    if mode == "passthrough":
        return list(tokens)
    if mode != "annotated":
        raise ConfigurationError(f"unknown tag mode {mode!r}")
    if annotation is None:
        raise ConfigurationError("annotated tag mode requires an annotation source")
    return [t for t in tokens if annotation.get(t, OTHER) in KEPT_TAGS]


@dataclass(frozen=True)
class TokenizerConfig:
    stopwords: bool = True
    stoplist: frozenset[str] | None = None
    tag_mode: str = "passthrough"
    annotation: TagAnnotation | None = None
    keep_numeric: bool = False

    def __post_init__(self):
        if self.tag_mode not in ("passthrough", "annotated"):
            raise ConfigurationError(f"unknown tag mode {self.tag_mode!r}")
        if self.tag_mode == "annotated" and self.annotation is None:
            raise ConfigurationError("annotated tag mode requires an annotation file")

    @property
    def effective_stoplist(self) -> frozenset[str]:
        if not self.stopwords:
            return frozenset()
        return default_stoplist() if self.stoplist is None else self.stoplist

    @classmethod
    def from_mapping(cls, cfg: Mapping, base_dir: str | Path = ".") -> "TokenizerConfig":
        base_dir = Path(base_dir)
        stoplist = annotation = None
        if cfg.get("stoplist"):
            stoplist = read_stoplist(base_dir / cfg["stoplist"])
        mode = cfg.get("tag_mode", "passthrough")
        if cfg.get("annotations"):
            ann_path = base_dir / cfg["annotations"]
            if not ann_path.exists():
                raise ConfigurationError(f"annotation file not found: {ann_path}")
            annotation = TagAnnotation.read(ann_path)
        return cls(stopwords=bool(cfg.get("stopwords", True)), stoplist=stoplist,
                   tag_mode=mode, annotation=annotation,
                   keep_numeric=bool(cfg.get("keep_numeric", False)))

    def echo(self) -> dict:
        return {"stopwords": self.stopwords,
                "stoplist": "custom" if self.stoplist is not None else "default",
                "tag_mode": self.tag_mode, "keep_numeric": self.keep_numeric}


@dataclass(frozen=True)
class TokenDoc:
    post_id: str
    tokens: tuple[str, ...]
    kept_tokens: tuple[str, ...] = field(default=())

    def to_dict(self) -> dict:
        return {"post_id": self.post_id, "tokens": list(self.tokens),
                "kept_tokens": list(self.kept_tokens)}


def caption_tokens(caption: str, norm: NormalizerConfig | None = None) -> list[str]:
    """Normalize ``caption`` sentence by sentence and tokenize it."""
    norm = norm or NormalizerConfig()
    if "links_ids_hashtags" in norm.steps:
        caption = strip_links_ids_hashtags(caption)
    tokens: list[str] = []
    for sentence in split_sentences(caption):
        tokens.extend(tokenize(normalize_text(sentence, norm)))
    return tokens


def filter_tokens(tokens: Sequence[str], cfg: TokenizerConfig | None = None) -> list[str]:
    cfg = cfg or TokenizerConfig()
    kept = remove_stopwords(tokens, cfg.effective_stoplist)
    kept = tag_filter(kept, cfg.annotation, cfg.tag_mode)
    if not cfg.keep_numeric:
        kept = [t for t in kept if not is_numeric_token(t)]
    return kept


def token_doc(post: RawPost, norm: NormalizerConfig | None = None,
              cfg: TokenizerConfig | None = None) -> TokenDoc:
    tokens = caption_tokens(post.caption, norm)
    return TokenDoc(post.id, tuple(tokens), tuple(filter_tokens(tokens, cfg)))


def build_token_docs(corpus: Corpus | Iterable[RawPost], norm: NormalizerConfig | None = None,
                     cfg: TokenizerConfig | None = None) -> list[TokenDoc]:
    """One :class:`TokenDoc` per post, in corpus order."""
    return [token_doc(p, norm, cfg) for p in corpus]


def write_token_docs(docs: Iterable[TokenDoc], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for doc in docs:
            fh.write(json.dumps(doc.to_dict(), ensure_ascii=False))
            fh.write("\n")


def read_token_docs(path: str | Path) -> list[TokenDoc]:
    docs = []
    with open(path, encoding="utf-8", newline="") as fh:
        for lineno, line in enumerate(fh.read().split("\n"), start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                doc = TokenDoc(obj["post_id"], tuple(obj["tokens"]), tuple(obj["kept_tokens"]))
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise DataError(f"{path}: bad token document ({exc})", lineno) from None
            docs.append(doc)
    return docs


class DocumentTokenizer(TransformerMixin, BaseEstimator):
    """Turn raw captions into filtered token lists.

    Parameters
    ----------
    normalizer : PersianNormalizer or None, default=None
        Character-level cleaner; ``None`` uses the default normalizer.
    stopwords : bool, default=True
        Remove stoplist members.
    stoplist : str or None, default=None
        Path to a one-token-per-line stoplist; ``None`` uses the bundled list.
    tag_mode : {"passthrough", "annotated"}, default="passthrough"
    annotations : str or None, default=None
        ``token<TAB>TAG`` file, required when ``tag_mode="annotated"``.
    keep_numeric : bool, default=False
        Keep tokens made only of ASCII digits.
    """

    def __init__(self, normalizer=None, stopwords=True, stoplist=None,
                 tag_mode="passthrough", annotations=None, keep_numeric=False):
        self.normalizer = normalizer
        self.stopwords = stopwords
        self.stoplist = stoplist
        self.tag_mode = tag_mode
        self.annotations = annotations
        self.keep_numeric = keep_numeric

    def fit(self, X=None, y=None):
        normalizer = self.normalizer if self.normalizer is not None else PersianNormalizer()
        self.normalizer_ = clone(normalizer).fit()
        annotation = None
        if self.annotations is not None:
            annotation = (self.annotations if isinstance(self.annotations, Mapping)
                          else TagAnnotation.read(self.annotations))
        self.config_ = TokenizerConfig(
            stopwords=self.stopwords,
            stoplist=read_stoplist(self.stoplist) if self.stoplist else None,
            tag_mode=self.tag_mode, annotation=annotation, keep_numeric=self.keep_numeric)
        return self

    def transform(self, X):
        check_is_fitted(self, "config_")
        if isinstance(X, str):
            raise TypeError("expected an iterable of strings, got a single string")
        norm = self.normalizer_.config_
        out = []
        for x in X:
            caption = x.caption if isinstance(x, RawPost) else x
            out.append(filter_tokens(caption_tokens(caption, norm), self.config_))
        return out
