"""Deterministic synthetic Persian news captions for tests and benchmarks.

Captions mix topic words drawn from a Zipf-like distribution with the
noise real channel captions carry: emojis, hashtags, links, mentions,
Persian digits, Arabic letter variants and ZWNJ-joined affixes.
"""

from __future__ import annotations

import numpy as np

from .corpus import Corpus, RawPost

TOPICS = {
    "politics": ("ایران", "آمریکا", "دولت", "مجلس", "انتخابات", "وزیر", "رئیس", "جمهور",
                 "سیاست", "دیپلماسی", "تحریم", "مذاکره", "توافق", "سفیر", "پارلمان",
                 "نماینده", "حزب", "رهبر", "کاخ", "سفارت"),
    "economy": ("اقتصاد", "بازار", "دلار", "قیمت", "تورم", "بانک", "بورس", "نفت", "صادرات",
                "واردات", "بودجه", "سرمایه", "تولید", "کارگر", "شرکت", "مالیات", "ارز",
                "طلا", "خودرو", "مسکن"),
    "conflict": ("جنگ", "حمله", "نیرو", "نظامی", "موشک", "پایگاه", "عراق", "سوریه",
                 "سپاه", "ارتش", "امنیت", "تنش", "درگیری", "کشته", "زخمی", "مرز",
                 "عملیات", "پهپاد", "هواپیما", "سقوط"),
    "society": ("مردم", "شهر", "تهران", "مدرسه", "دانشگاه", "دانشجو", "زن", "کودک",
                "خانواده", "پلیس", "دادگاه", "زندان", "اعتراض", "تجمع", "آزادی",
                "حقوق", "کارمند", "بیمارستان", "پزشک", "بیمار"),
    "culture": ("فیلم", "سینما", "کتاب", "موسیقی", "هنرمند", "جشنواره", "تئاتر", "نمایش",
                "شاعر", "نویسنده", "فرهنگ", "تاریخ", "موزه", "عکس", "بازیگر",
                "کارگردان", "جایزه", "ورزش", "فوتبال", "تیم"),
}

# glue words; most are in the bundled stoplist
FUNCTION_WORDS = ("و", "در", "به", "از", "که", "این", "با", "را", "برای", "است", "آن",
                  "شد", "بود", "هم", "یک", "تا", "بر", "کرد", "گفت", "خود")

CHANNELS = ("bbcpersian", "farsnews", "khabarfouri")

_EMOJIS = ("🔴", "📌", "👇", "🎥", "✅", "⚠️", "🇮🇷", "👍🏽")
_LETTERS = "ابپتجچخدرزسشصطعغفقکگلمنوهی"


def _tail_words(count: int, rng: np.random.Generator) -> list[str]:
    """Made-up rare words (3 to 6 letters) for the long tail of the vocabulary."""
    out, seen = [], set()
    letters = np.array(list(_LETTERS))
    while len(out) < count:
        w = "".join(rng.choice(letters, size=int(rng.integers(3, 7))))
        if w not in seen:
            seen.add(w)
            out.append(w)
    return out


def _to_persian_digits(s: str) -> str:
    return s.translate(str.maketrans("0123456789", "۰۱۲۳۴۵۶۷۸۹"))


def _arabic_variants(word: str) -> str:
    return word.replace("ی", "ي").replace("ک", "ك")


def synthetic_posts(n_posts: int = 50, seed: int = 0, words_per_post: int = 30,
                    tail_size: int = 400, noise: float = 0.3,
                    channels=CHANNELS) -> list[RawPost]:
    """Generate ``n_posts`` captions; identical arguments give identical posts."""
    rng = np.random.default_rng(seed)
    topic_names = sorted(TOPICS)
    tail = _tail_words(tail_size, rng)
    tail_p = 1.0 / (np.arange(1, tail_size + 1) + 20.0) ** 1.1  # flattened head
    tail_p /= tail_p.sum()
    posts = []
    for idx in range(n_posts):
        channel = channels[idx % len(channels)]
        main, second = rng.choice(len(topic_names), size=2, replace=False)
        pools = (TOPICS[topic_names[main]], TOPICS[topic_names[second]])
        length = max(4, int(rng.poisson(words_per_post)))
        words = []
        for _ in range(length):
            r = rng.random()
            if r < 0.25:
                words.append(FUNCTION_WORDS[int(rng.integers(len(FUNCTION_WORDS)))])
            elif r < 0.65:
                pool = pools[0]
                words.append(pool[min(int(rng.zipf(1.6)) - 1, len(pool) - 1)])
            elif r < 0.8:
                pool = pools[1]
                words.append(pool[min(int(rng.zipf(1.6)) - 1, len(pool) - 1)])
            else:
                words.append(tail[int(rng.choice(tail_size, p=tail_p))])
        for pos in range(len(words)):
            u = rng.random()
            if u < noise * 0.1:
                words[pos] = _arabic_variants(words[pos])
            elif u < noise * 0.15:
                words[pos] = words[pos] + "‌ها"
            elif u < noise * 0.2:
                words[pos] = words[pos] + "."
        if rng.random() < noise:
            words.insert(int(rng.integers(len(words) + 1)),
                         _EMOJIS[int(rng.integers(len(_EMOJIS)))])
        if rng.random() < noise:
            words.append("#" + pools[0][0] + "_" + pools[0][1])
        if rng.random() < noise * 0.5:
            words.append(f"https://example.org/news/{idx}")
        if rng.random() < noise * 0.5:
            words.insert(0, "@" + channel)
        if rng.random() < noise:
            words.insert(int(rng.integers(len(words) + 1)),
                         _to_persian_digits(str(int(rng.integers(1, 1400)))))
        day = 1 + idx % 28
        posts.append(RawPost(id=f"{channel}-{idx:05d}", channel=channel,
                             timestamp=f"2019-{10 + (idx // 28) % 3:02d}-{day:02d}T12:00:00Z",
                             caption=" ".join(words)))
    return posts


def synthetic_corpus(n_posts: int = 50, seed: int = 0, **kwargs) -> Corpus:
    return Corpus.from_posts(synthetic_posts(n_posts, seed, **kwargs))

