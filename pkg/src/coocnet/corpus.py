"""Loading already-crawled post records into an in-memory corpus."""

from __future__ import annotations

import csv
import io
import json
import logging
from collections import OrderedDict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

from .exceptions import DataError

logger = logging.getLogger(__name__)

FIELDS = ("id", "channel", "timestamp", "caption")


class CorpusFormatError(DataError):
    """A record in a corpus file is malformed."""


@dataclass(frozen=True)
class RawPost:
    id: str
    channel: str
    timestamp: str | None
    caption: str

    def to_dict(self) -> dict:
        return {"id": self.id, "channel": self.channel,
                "timestamp": self.timestamp, "caption": self.caption}


@dataclass(frozen=True)
class ChannelStats:
    post_count: int
    word_count: int

    @property
    def avg_words_per_post(self) -> float:
        return self.word_count / self.post_count if self.post_count else 0.0

    def to_dict(self) -> dict:
        return {"post_count": self.post_count, "word_count": self.word_count,
                "avg_words_per_post": self.avg_words_per_post}


@dataclass(frozen=True)
class Corpus:
    """Ordered, deduplicated posts plus per-channel counts.

    ``duplicates`` counts records collapsed into an earlier occurrence of the
    same id while loading; ``skipped`` counts malformed records dropped in
    lenient mode.
    """

    posts: tuple[RawPost, ...]
    source_meta: dict[str, ChannelStats] = field(default_factory=dict)
    duplicates: int = 0
    skipped: int = 0

    @classmethod
    def from_posts(cls, posts: Iterable[RawPost], duplicates: int = 0,
                   skipped: int = 0) -> "Corpus":
        posts = tuple(posts)
        ids = [p.id for p in posts]
        if len(set(ids)) != len(ids):
            raise DataError("corpus contains duplicate post ids")
        return cls(posts=posts, source_meta=corpus_stats_from_posts(posts),
                   duplicates=duplicates, skipped=skipped)

    def __len__(self) -> int:
        return len(self.posts)

    def __iter__(self) -> Iterator[RawPost]:
        return iter(self.posts)

    def __eq__(self, other: object) -> bool:
        # load bookkeeping is not content
        if not isinstance(other, Corpus):
            return NotImplemented
        return self.posts == other.posts


def _word_count(caption: str) -> int:
    return len(caption.split())


def corpus_stats_from_posts(posts: Iterable[RawPost]) -> dict[str, ChannelStats]:
    counts: dict[str, list[int]] = OrderedDict()
    for post in posts:
        c = counts.setdefault(post.channel, [0, 0])
        c[0] += 1
        c[1] += _word_count(post.caption)
    return {ch: ChannelStats(pc, wc) for ch, (pc, wc) in counts.items()}


def corpus_stats(corpus: Corpus) -> dict[str, dict]:
    """Per-channel post count, whitespace word count and words per post."""
    return {ch: s.to_dict() for ch, s in corpus_stats_from_posts(corpus.posts).items()}


def _coerce_record(obj: object, line: int) -> RawPost:
    if not isinstance(obj, dict):
        raise CorpusFormatError("record is not an object", line)
    missing = [k for k in ("id", "channel", "caption") if k not in obj]
    if missing:
        raise CorpusFormatError(f"missing field(s) {', '.join(missing)}", line)
    extra = sorted(set(obj) - set(FIELDS))
    if extra:
        raise CorpusFormatError(f"unexpected field(s) {', '.join(extra)}", line)
    pid, channel, ts, caption = obj["id"], obj["channel"], obj.get("timestamp"), obj["caption"]
    if not isinstance(pid, str) or not pid:
        raise CorpusFormatError("id must be a non-empty string", line)
    if not isinstance(channel, str):
        raise CorpusFormatError("channel must be a string", line)
    if ts is not None and not isinstance(ts, str):
        raise CorpusFormatError("timestamp must be a string or null", line)
    if caption is None:
        caption = ""
    if not isinstance(caption, str):
        raise CorpusFormatError("caption must be a string", line)
    try:
        caption.encode("utf-8")
    except UnicodeEncodeError:
        raise CorpusFormatError("caption is not valid UTF-8 text", line) from None
    return RawPost(pid, channel, ts, caption)


def _iter_jsonl(text: str) -> Iterator[tuple[int, object]]:
    # split on \n only: captions may carry raw U+2028/U+2029
    for lineno, raw in enumerate(text.split("\n"), start=1):
        raw = raw.rstrip("\r")
        if not raw.strip():
            continue
        try:
            yield lineno, json.loads(raw)
        except json.JSONDecodeError as exc:
            yield lineno, CorpusFormatError(f"invalid JSON ({exc.msg})", lineno)


def _iter_csv(text: str) -> Iterator[tuple[int, object]]:
    reader = csv.DictReader(io.StringIO(text, newline=""))
    if reader.fieldnames is None:
        return
    header = [h.strip() for h in reader.fieldnames]
    if not {"id", "channel", "caption"} <= set(header):
        raise CorpusFormatError("CSV header must contain id, channel, caption", 1)
    reader.fieldnames = header
    for row in reader:
        if None in row:
            yield reader.line_num, CorpusFormatError(
                "row has more fields than the header", reader.line_num)
            continue
        rec = dict(row)
        if rec.get("timestamp") == "":
            rec["timestamp"] = None
        yield reader.line_num, rec


def load_corpus(path: str | Path, format: str = "jsonl", strict: bool = False) -> Corpus:
    """Read posts from a JSONL or CSV file.

    File order is preserved. Later records reusing an id are dropped with a
    warning (an error under ``strict``). Malformed records abort the load in
    strict mode and are skipped with a warning otherwise.
    """
    if format not in ("jsonl", "csv"):
        raise ValueError(f"unknown corpus format {format!r}")
    data = Path(path).read_bytes()
    try:
        text = data.decode("utf-8-sig")
    except UnicodeDecodeError as exc:
        raise CorpusFormatError(f"file is not valid UTF-8 (byte {exc.start})") from None

    records = _iter_jsonl(text) if format == "jsonl" else _iter_csv(text)
    posts: list[RawPost] = []
    seen: set[str] = set()
    duplicates = skipped = 0
    for lineno, obj in records:
        try:
            if isinstance(obj, CorpusFormatError):
                raise obj
            post = _coerce_record(obj, lineno)
        except CorpusFormatError as exc:
            if strict:
                raise
            logger.warning("skipping malformed record: %s", exc)
            skipped += 1
            continue
        if post.id in seen:
            if strict:
                raise CorpusFormatError(f"duplicate id {post.id!r}", lineno)
            duplicates += 1
            continue
        seen.add(post.id)
        posts.append(post)
    if duplicates:
        logger.warning("%d duplicate record(s) collapsed to first occurrence", duplicates)
    return Corpus.from_posts(posts, duplicates=duplicates, skipped=skipped)


def write_corpus(corpus: Corpus | Iterable[RawPost], path: str | Path) -> None:
    """Write posts as JSONL in the same layout ``load_corpus`` reads."""
    posts = corpus.posts if isinstance(corpus, Corpus) else corpus
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for post in posts:
            fh.write(json.dumps(post.to_dict(), ensure_ascii=False))
            fh.write("\n")
