import pytest
from hypothesis import given, strategies as st

from coocnet.corpus import Corpus, RawPost
from coocnet.exceptions import ConfigurationError, DataError
from coocnet.tokenize import (DocumentTokenizer, TagAnnotation, TokenizerConfig,
                              build_token_docs, caption_tokens, default_stoplist,
                              read_token_docs, remove_stopwords, split_sentences, tag_filter,
                              tokenize, write_token_docs)

Z = "‌"


def test_split_sentences():
    assert split_sentences("الف. ب؟ ج") == ["الف", "ب", "ج"]
    assert split_sentences("") == []
    assert split_sentences("یک خط\nدو خط") == ["یک خط", "دو خط"]
    assert split_sentences("اول؛ دوم! سوم?") == ["اول", "دوم", "سوم"]


def test_tokenize():
    assert tokenize("قیمت بنزین") == ["قیمت", "بنزین"]
    assert tokenize(f"می{Z}روم") == [f"می{Z}روم"]
    assert tokenize("  ") == []


def test_remove_stopwords():
    assert remove_stopwords(["از", "تهران"], {"از"}) == ["تهران"]
    assert remove_stopwords([], {"از"}) == []
    assert remove_stopwords(["از", "به", "از"], {"از", "به"}) == []


def test_tag_filter():
    ann = TagAnnotation({"قیمت": "NOUN", "افزایش": "NOUN", "یافت": "OTHER"})
    assert tag_filter(["قیمت", "افزایش", "یافت"], ann, "annotated") == ["قیمت", "افزایش"]
    assert tag_filter(["x", "y"], None, "passthrough") == ["x", "y"]
    assert tag_filter(["ناشناخته"], ann, "annotated") == []


def test_tag_filter_errors():
    with pytest.raises(ConfigurationError):
        tag_filter(["x"], None, "annotated")
    with pytest.raises(ConfigurationError):
        tag_filter(["x"], None, "viterbi")
    with pytest.raises(ConfigurationError):
        TokenizerConfig(tag_mode="annotated")


def test_annotation_file(tmp_path):
    p = tmp_path / "tags.tsv"
    p.write_text("قیمت\tN\nبزرگ\tADJ\nرفت\tV\n", encoding="utf-8")
    ann = TagAnnotation.read(p)
    assert ann["قیمت"] == "NOUN" and ann["بزرگ"] == "ADJ" and ann["رفت"] == "OTHER"
    assert ann["هرچیز"] == "OTHER"
    bad = tmp_path / "bad.tsv"
    bad.write_text("only-one-column\n", encoding="utf-8")
    with pytest.raises(DataError):
        TagAnnotation.read(bad)


def test_missing_annotation_file_is_config_error(tmp_path):
    with pytest.raises(ConfigurationError):
        TokenizerConfig.from_mapping({"tag_mode": "annotated", "annotations": "none.tsv"},
                                     tmp_path)


def test_caption_tokens_splits_before_punctuation_is_lost():
    # the full stop separates sentences even though normalization removes it
    assert caption_tokens("قیمت بنزین. افزایش یافت") == ["قیمت", "بنزین", "افزایش", "یافت"]
    # a dot inside a URL is not a sentence boundary
    assert caption_tokens("خبر https://a.b/c فوری") == ["خبر", "فوری"]


def test_build_token_docs():
    corpus = Corpus.from_posts([
        RawPost("1", "c", None, "قیمت بنزین ۳۰۰۰ تومان شد"),
        RawPost("2", "c", None, ""),
        RawPost("3", "c", None, "کتاب ها در تهران"),
    ])
    docs = build_token_docs(corpus)
    assert [d.post_id for d in docs] == ["1", "2", "3"]
    assert docs[0].tokens == ("قیمت", "بنزین", "3000", "تومان", "شد")
    # numbers and stopwords dropped from kept tokens
    assert docs[0].kept_tokens == ("قیمت", "بنزین", "تومان")
    assert docs[1].kept_tokens == ()
    assert docs[2].kept_tokens == (f"کتاب{Z}ها", "تهران")
    keep = build_token_docs(corpus, cfg=TokenizerConfig(keep_numeric=True))
    assert "3000" in keep[0].kept_tokens


def test_default_stoplist_is_persian_only():
    stop = default_stoplist()
    assert "از" in stop and "و" in stop
    assert not any("ي" in w or "ك" in w for w in stop)


def test_token_docs_roundtrip(tmp_path):
    corpus = Corpus.from_posts([RawPost(str(i), "c", None, f"خبر {i} ایران") for i in range(5)])
    docs = build_token_docs(corpus)
    p = tmp_path / "docs.jsonl"
    write_token_docs(docs, p)
    assert read_token_docs(p) == docs
    first = p.read_bytes()
    write_token_docs(build_token_docs(corpus), p)
    assert p.read_bytes() == first


def test_read_token_docs_bad_line(tmp_path):
    p = tmp_path / "d.jsonl"
    p.write_text('{"post_id": "1", "tokens": [], "kept_tokens": []}\n{"x": 1}\n')
    with pytest.raises(DataError, match="line 2"):
        read_token_docs(p)


_captions = st.text(alphabet=st.sampled_from(list("ابتکیمهاز ۱۲3.؟\n#@") + [Z]), max_size=60)


@given(st.lists(_captions, max_size=8))
def test_token_doc_invariants(captions):
    corpus = Corpus.from_posts(RawPost(str(i), "c", None, c) for i, c in enumerate(captions))
    docs = build_token_docs(corpus)
    assert len(docs) == len(corpus)
    for d in docs:
        remaining = list(d.tokens)
        for t in d.kept_tokens:
            assert t and not any(ch.isspace() for ch in t)
            remaining.remove(t)  # multiset inclusion


@given(st.lists(st.sampled_from(["الف", "ب", "ج"]), max_size=10))
def test_passthrough_identity(tokens):
    assert tag_filter(tokens, None, "passthrough") == tokens


def test_document_tokenizer_estimator(tmp_path):
    tags = tmp_path / "t.tsv"
    tags.write_text("ایران\tNOUN\nبزرگ\tADJ\n", encoding="utf-8")
    est = DocumentTokenizer(tag_mode="annotated", annotations=str(tags))
    out = est.fit(None).transform(["ایران بزرگ رفت"])
    assert out == [["ایران", "بزرگ"]]
    assert est.get_params()["tag_mode"] == "annotated"
    with pytest.raises(TypeError):
        est.transform("a single string")
