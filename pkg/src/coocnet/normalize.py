"""Character-level cleaning of Persian captions.

Each step is a pure ``str -> str`` function and is idempotent. The steps are
composed in a fixed order by :func:`normalize_text`; :class:`PersianNormalizer`
wraps the composition as a scikit-learn transformer.
"""

from __future__ import annotations

import json
import re
import unicodedata
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping

from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .corpus import RawPost

ZWNJ = "‌"

# Order is fixed. Link/ID/hashtag removal must precede punctuation removal:
# '#', '@', ':' and '/' are punctuation and would otherwise orphan the tag text.
STEP_ORDER = (
    "links_ids_hashtags",
    "emoji_punct",
    "digits_fa_to_en",
    "digit_letter_spacing",
    "persian_charset_only",
    "hazm_normalize",
)
# stopword removal and the tag filter are token-level and live in coocnet.tokenize
TOKEN_STEPS = ("stopwords", "tag_filter")

_EMOJI_RANGES = (
    (0x1F000, 0x1FAFF),  # mahjong .. symbols & pictographs ext-A, incl. flags
    (0x2600, 0x27BF),    # misc symbols, dingbats
    (0x2300, 0x23FF),    # misc technical (watch, hourglass, ...)
    (0x2B00, 0x2BFF),    # arrows & shapes (star, squares)
    (0x3030, 0x3030),
    (0x303D, 0x303D),
    (0x3297, 0x3297),
    (0x3299, 0x3299),
)
# joiners and modifiers vanish with their base instead of leaving a gap
_EMOJI_MODIFIERS = (
    (0x200D, 0x200D),    # ZWJ
    (0xFE00, 0xFE0F),    # variation selectors
    (0x20E3, 0x20E3),    # combining keycap
    (0x1F3FB, 0x1F3FF),  # skin tones
    (0xE0020, 0xE007F),  # tag sequences
)

_PERSIAN_DIGITS = "۰۱۲۳۴۵۶۷۸۹"
_ARABIC_INDIC_DIGITS = "٠١٢٣٤٥٦٧٨٩"
_DIGIT_TABLE = str.maketrans(
    {**{c: str(i) for i, c in enumerate(_PERSIAN_DIGITS)},
     **{c: str(i) for i, c in enumerate(_ARABIC_INDIC_DIGITS)}}
)

_DIACRITICS = {cp: None for cp in range(0x064B, 0x0653)}
_DIACRITICS[0x0640] = None  # tatweel

_URL_RE = re.compile(r"(?:[A-Za-z][A-Za-z0-9+.\-]*://|www\.)\S+", re.IGNORECASE)
_EMAIL_RE = re.compile(r"[\w.+\-]+@[\w\-]+(?:\.[\w\-]+)+")
_MENTION_RE = re.compile(r"@[\w.]+")
_HASHTAG_RE = re.compile(r"#[\w‌]+")

_WS_RE = re.compile(r"\s+")
_ZWNJ_RUN_RE = re.compile("‌{2,}")
_ZWNJ_EDGE_RE = re.compile(r"(?:^|(?<=\s))‌+|‌+(?=\s|$)")
_SPACE_RUN_RE = re.compile(" {2,}")


def _in_ranges(cp: int, ranges) -> bool:
    return any(lo <= cp <= hi for lo, hi in ranges)


@lru_cache(maxsize=None)
def _emoji_punct_action(ch: str) -> str | None:
    """Return the replacement for ``ch``, or None to keep it."""
    cp = ord(ch)
    if _in_ranges(cp, _EMOJI_MODIFIERS):
        return ""
    if _in_ranges(cp, _EMOJI_RANGES) or unicodedata.category(ch).startswith("P"):
        return " "
    return None


def strip_emoji_punct(text: str) -> str:
    """Replace emoji and Unicode punctuation with a space each."""
    out = []
    for ch in text:
        rep = _emoji_punct_action(ch)
        out.append(ch if rep is None else rep)
    return "".join(out)


def strip_links_ids_hashtags(text: str) -> str:
    """Remove URLs, e-mail addresses, @-mentions and whole #-hashtags."""
    # iterate to a fixed point: a removal can splice a new match together
    while True:
        new = _URL_RE.sub("", text)
        new = _EMAIL_RE.sub("", new)
        new = _MENTION_RE.sub("", new)
        new = _HASHTAG_RE.sub("", new)
        if new == text:
            return new
        text = new


def digits_fa_to_en(text: str) -> str:
    """Map Persian and Arabic-Indic digits to ASCII ``0-9``."""
    return text.translate(_DIGIT_TABLE)


def _is_digit(ch: str) -> bool:
    return unicodedata.category(ch) == "Nd"


def _is_letter(ch: str) -> bool:
    return unicodedata.category(ch).startswith("L")


def space_digit_letter_boundaries(text: str) -> str:
    """Insert one space wherever a digit touches a letter.

    Combining marks are looked through, so a diacritic between a digit and
    a letter does not hide the boundary once later steps delete the mark.
    """
    if len(text) < 2:
        return text
    out = []
    base = ""  # last non-mark character
    for ch in text:
        if unicodedata.category(ch).startswith("M"):
            out.append(ch)
            continue
        if base and ((_is_digit(base) and _is_letter(ch)) or (_is_letter(base) and _is_digit(ch))):
            out.append(" ")
        out.append(ch)
        base = ch
    return "".join(out)


def _is_presentation_form(cp: int) -> bool:
    return 0xFB50 <= cp <= 0xFDFF or 0xFE70 <= cp <= 0xFEFF


def _unfold_presentation_forms(text: str) -> str:
    if not any(_is_presentation_form(ord(c)) for c in text):
        return text
    return "".join(unicodedata.normalize("NFKC", c) if _is_presentation_form(ord(c)) else c
                   for c in text)


@lru_cache(maxsize=None)
def _is_persian_letter(ch: str) -> bool:
    cp = ord(ch)
    return 0x0600 <= cp <= 0x06FF and cp != 0x0640 and unicodedata.category(ch).startswith("L")


def restrict_charset(text: str, extra: Iterable[str] = ()) -> str:
    """Keep Persian letters, ASCII digits, space, ZWNJ and ``extra``.

    Combining marks are deleted in place so diacritised words stay whole;
    any other dropped character becomes a space. Space runs are collapsed
    and the result is trimmed.
    """
    extra = frozenset(extra)
    text = _unfold_presentation_forms(text)
    out = []
    for ch in text:
        if ch in extra or ch == " " or ch == ZWNJ or "0" <= ch <= "9" or _is_persian_letter(ch):
            out.append(ch)
        elif unicodedata.category(ch).startswith("M"):
            continue
        else:
            out.append(" ")
    return _SPACE_RUN_RE.sub(" ", "".join(out)).strip(" ")


# -- Hazm-style normalization ------------------------------------------------

def read_unify_table(path: str | Path) -> dict[str, str]:
    """Read a ``from<TAB>to`` mapping table (single-character keys)."""
    table: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n").rstrip("\r")
            if not line or line.startswith("#"):
                continue
            try:
                src, dst = line.split("\t")
            except ValueError:
                raise ValueError(f"{path}:{lineno}: expected two tab-separated columns") from None
            if len(src) != 1:
                raise ValueError(f"{path}:{lineno}: source must be a single character")
            table[src] = dst
    _check_unify_table(table)
    return table


def _check_unify_table(table: Mapping[str, str]) -> None:
    for src, dst in table.items():
        bad = [c for c in dst if c in table]
        if bad:
            raise ValueError(f"mapping {src!r} -> {dst!r} produces mapped character {bad[0]!r}; "
                             "tables must not chain")


@dataclass(frozen=True)
class AffixRules:
    prefixes: tuple[str, ...]
    suffixes: tuple[str, ...]
    heh_suffixes: tuple[str, ...]

    @classmethod
    def read(cls, path: str | Path) -> "AffixRules":
        kinds: dict[str, list[str]] = {"prefix": [], "suffix": [], "heh_suffix": []}
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.rstrip("\n").rstrip("\r")
                if not line or line.startswith("#"):
                    continue
                try:
                    kind, affix = line.split("\t")
                except ValueError:
                    raise ValueError(f"{path}:{lineno}: expected kind<TAB>affix") from None
                if kind not in kinds:
                    raise ValueError(f"{path}:{lineno}: unknown affix kind {kind!r}")
                if not affix or any(c.isspace() for c in affix):
                    raise ValueError(f"{path}:{lineno}: affix must be non-empty without spaces")
                kinds[kind].append(affix)
        return cls(tuple(kinds["prefix"]), tuple(kinds["suffix"]), tuple(kinds["heh_suffix"]))

    def compile(self) -> list[tuple[re.Pattern, str]]:
        def alt(words):
            # longest first so "های" wins over "ها"
            return "|".join(re.escape(w) for w in sorted(words, key=len, reverse=True))

        rules = []
        if self.prefixes:
            rules.append((re.compile(rf"(?<!\S)({alt(self.prefixes)}) (?=\S)"), r"\1" + ZWNJ))
        if self.suffixes:
            rules.append((re.compile(rf"(?<=\S\S) ({alt(self.suffixes)})(?!\S)"), ZWNJ + r"\1"))
        if self.heh_suffixes:
            rules.append((re.compile(rf"(?<=\Sه) ({alt(self.heh_suffixes)})(?!\S)"),
                          ZWNJ + r"\1"))
        return rules


def _data_path(name: str) -> Path:
    return Path(str(resources.files("coocnet") / "data" / name))


@lru_cache(maxsize=None)
def default_unify_table() -> dict[str, str]:
    return read_unify_table(_data_path("unify.tsv"))


@lru_cache(maxsize=None)
def default_affix_rules() -> AffixRules:
    return AffixRules.read(_data_path("affixes.tsv"))


def _clean_whitespace(text: str) -> str:
    # ZWNJ first: dropping an edge ZWNJ can expose a space to trim
    text = _ZWNJ_RUN_RE.sub(ZWNJ, text)
    text = _ZWNJ_EDGE_RE.sub("", text)
    return _WS_RE.sub(" ", text).strip()


def hazm_normalize(text: str, table: Mapping[str, str] | None = None,
                   affixes: AffixRules | None = None) -> str:
    """Unify letter variants, drop diacritics, and fix half-spaces.

    Arabic yeh/kaf and hamza variants are mapped through ``table``, harakat
    and tatweel are removed, whitespace is collapsed, and a space between a
    stem and a listed prefix or suffix becomes a ZWNJ.
    """
    table = default_unify_table() if table is None else table
    affixes = default_affix_rules() if affixes is None else affixes
    text = _unfold_presentation_forms(text)
    text = text.translate(str.maketrans(dict(table)))
    text = text.translate(_DIACRITICS)
    text = _clean_whitespace(text)
    # a join can expose a new stem for another rule; every pass removes spaces
    rules = _compiled_affixes(affixes)
    while True:
        new = text
        for pattern, repl in rules:
            new = pattern.sub(repl, new)
        if new == text:
            return new
        text = new


@lru_cache(maxsize=32)
def _compiled_affixes(affixes: AffixRules):
    return affixes.compile()


# -- composition -------------------------------------------------------------

@dataclass(frozen=True)
class NormalizerConfig:
    """Which character-level steps run, and the tables they use."""

    steps: frozenset = frozenset(STEP_ORDER)
    charset_extra: frozenset = frozenset()
    unify_table: Mapping[str, str] | None = None
    affixes: AffixRules | None = None

    def __post_init__(self):
        unknown = set(self.steps) - set(STEP_ORDER)
        if unknown:
            raise ValueError(f"unknown normalization step(s): {', '.join(sorted(unknown))}")

    @classmethod
    def from_mapping(cls, cfg: Mapping, base_dir: str | Path = ".") -> "NormalizerConfig":
        """Build from a parsed TOML/JSON ``[normalize]`` table.

        ``steps`` maps step name to a boolean (missing steps stay enabled);
        ``unify_table`` and ``affix_table`` are paths relative to ``base_dir``.
        """
        base_dir = Path(base_dir)
        flags = dict(cfg.get("steps", {}))
        unknown = set(flags) - set(STEP_ORDER)
        if unknown:
            raise ValueError(f"unknown normalization step(s): {', '.join(sorted(unknown))}")
        steps = frozenset(s for s in STEP_ORDER if flags.get(s, True))
        table = affixes = None
        if cfg.get("unify_table"):
            table = read_unify_table(base_dir / cfg["unify_table"])
        if cfg.get("affix_table"):
            affixes = AffixRules.read(base_dir / cfg["affix_table"])
        return cls(steps=steps, charset_extra=frozenset(cfg.get("charset_extra", "")),
                   unify_table=table, affixes=affixes)

    @classmethod
    def load(cls, path: str | Path) -> "NormalizerConfig":
        path = Path(path)
        data = load_config_file(path)
        return cls.from_mapping(data.get("normalize", data), base_dir=path.parent)

    def echo(self) -> dict:
        return {"steps": [s for s in STEP_ORDER if s in self.steps],
                "charset_extra": "".join(sorted(self.charset_extra)),
                "unify_table": "custom" if self.unify_table is not None else "default",
                "affix_table": "custom" if self.affixes is not None else "default"}


def load_config_file(path: str | Path) -> dict:
    """Parse a ``.toml`` or ``.json`` configuration file."""
    path = Path(path)
    if path.suffix.lower() == ".json":
        return json.loads(path.read_text(encoding="utf-8"))
    try:
        import tomllib
    except ModuleNotFoundError:  # Python < 3.11
        import tomli as tomllib
    with open(path, "rb") as fh:
        return tomllib.load(fh)


def normalize_text(text: str, config: NormalizerConfig | None = None) -> str:
    config = config or NormalizerConfig()
    steps = config.steps
    if "links_ids_hashtags" in steps:
        text = strip_links_ids_hashtags(text)
    if "emoji_punct" in steps:
        text = strip_emoji_punct(text)
    if "digits_fa_to_en" in steps:
        text = digits_fa_to_en(text)
    if "digit_letter_spacing" in steps:
        text = space_digit_letter_boundaries(text)
    if "persian_charset_only" in steps:
        text = restrict_charset(text, config.charset_extra)
    if "hazm_normalize" in steps:
        text = hazm_normalize(text, config.unify_table, config.affixes)
    else:
        text = _WS_RE.sub(" ", text).strip()
    return text


@dataclass(frozen=True)
class CleanText:
    text: str
    provenance: str = field(default="")


def normalize_post(post: RawPost, config: NormalizerConfig | None = None) -> CleanText:
    return CleanText(normalize_text(post.caption, config), post.id)


class PersianNormalizer(TransformerMixin, BaseEstimator):
    """Clean raw Persian captions.

    Parameters
    ----------
    steps : sequence of str or None, default=None
        Enabled character-level steps; ``None`` enables all of
        ``STEP_ORDER``. Steps always run in ``STEP_ORDER``.
    charset_extra : str, default=""
        Extra characters kept by the charset restriction.
    unify_table : str or None, default=None
        Path to a ``from<TAB>to`` letter unification table.
    affix_table : str or None, default=None
        Path to a ``kind<TAB>affix`` half-space rule table.
    """

    def __init__(self, steps=None, charset_extra="", unify_table=None, affix_table=None):
        self.steps = steps
        self.charset_extra = charset_extra
        self.unify_table = unify_table
        self.affix_table = affix_table

    def fit(self, X=None, y=None):
        steps = frozenset(STEP_ORDER if self.steps is None else self.steps)
        self.config_ = NormalizerConfig(
            steps=steps,
            charset_extra=frozenset(self.charset_extra or ""),
            unify_table=read_unify_table(self.unify_table) if self.unify_table else None,
            affixes=AffixRules.read(self.affix_table) if self.affix_table else None,
        )
        return self

    def transform(self, X):
        check_is_fitted(self, "config_")
        return [normalize_text(_as_text(x), self.config_) for x in _as_sequence(X)]


def _as_sequence(X):
    if isinstance(X, str):
        raise TypeError("expected an iterable of strings, got a single string")
    return list(X)


def _as_text(x) -> str:
    if isinstance(x, RawPost):
        return x.caption
    if not isinstance(x, str):
        raise TypeError(f"expected str, got {type(x).__name__}")
    return x
