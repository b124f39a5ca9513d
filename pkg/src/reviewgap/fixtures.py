"""Deterministic synthetic review corpus in the raw export format.

Generation procedure (fully determined by the seed):

1. Character pools come from the shipped charset tables: traditional-only,
   simplified-only and shared-Chinese code points.
2. 20 hotels carry a script flavor: hotels 1-12 write pure Chinese
   (traditional on the tw side, simplified on the cn side), hotels 13-17 mix
   in one English word per review, hotels 18-20 append one emoji.
3. Every (hotel, sentiment class, length bin) bucket gets 1-2 tw and 1-2 cn
   records over five short bins (0-4) and five long bins (5, 6, 7, 9, 12),
   so each (length group, character-set subset) report cell is populated.
   Review text is composed to an exact per-record target length.
4. tw scores stay within 1-9 so a +1-biased mock prediction is always a
   valid in-range answer; cn scores use the full 1-10 scale.
5. The remainder up to the requested line count is filler: other-nationality
   records, all-empty records, one out-of-range score, one missing venue id
   and two malformed lines.
6. All lines are shuffled by the same generator and emitted as JSON.
"""

from __future__ import annotations

import json
from pathlib import Path

from reviewgap.charsets import CharCategory, default_tables
from reviewgap.prng import SplitMix64, derive_seed

DEFAULT_SEED = 20240801
DEFAULT_LINES = 2000

_FLAVORS = {**{h: "pure" for h in range(1, 13)},
            **{h: "eng" for h in range(13, 18)},
            **{h: "emoji" for h in range(18, 21)}}
_SHORT_BINS = (0, 1, 2, 3, 4)
_LONG_BINS = (5, 6, 7, 9, 12)
_ENG_WORDS = ("wifi", "ok", "nice", "good", "staff")
_EMOJI = ("\U0001F44D", "\U0001F600", "\U0001F389", "✨")
_SCORE_RANGES = {"negative": (1, 3), "neutral": (4, 7), "positive": (8, 10)}
_PUNCT = ("，", "。")  # fullwidth comma, ideographic full stop


def _pools():
    tables = default_tables()
    lk = tables.lookup
    import numpy as np

    def chars(cat):
        return [chr(cp) for cp in np.nonzero(lk == int(cat))[0]]

    return (
        chars(CharCategory.TRADITIONAL),
        chars(CharCategory.SIMPLIFIED),
        chars(CharCategory.SHARED_CHINESE),
    )


def _chinese_run(rng: SplitMix64, primary: list, shared: list, length: int) -> str:
    """Chinese text of exactly ``length`` scalars, starting with a primary char."""
    if length <= 0:
        return ""
    chars = [rng.choice(primary)]
    for _ in range(length - 1):
        pool = primary if rng.randbelow(100) < 70 else shared
        chars.append(rng.choice(pool))
    if length >= 8 and rng.randbelow(100) < 60:
        pos = 1 + rng.randbelow(length - 1)
        chars[pos] = rng.choice(_PUNCT)
    return "".join(chars)


def _review_text(
    rng: SplitMix64, primary, shared, total_len: int, flavor: str
) -> tuple[str | None, str, str | None]:
    word = rng.choice(_ENG_WORDS) if flavor == "eng" else ""
    emoji = rng.choice(_EMOJI) if flavor == "emoji" else ""
    budget = total_len - len(word) - len(emoji)

    title_len = 0
    neg_len = 0
    if budget >= 12 and rng.randbelow(100) < 50:
        title_len = 3 + rng.randbelow(4)
    if budget - title_len >= 14 and rng.randbelow(100) < 40:
        neg_len = 4 + rng.randbelow(5)
    pos_len = budget - title_len - neg_len

    title = _chinese_run(rng, primary, shared, title_len) or None
    positive = _chinese_run(rng, primary, shared, pos_len)
    if word:
        cut = rng.randbelow(len(positive) + 1)
        positive = positive[:cut] + word + positive[cut:]
    positive += emoji
    negative = _chinese_run(rng, primary, shared, neg_len) or None
    return title, positive, negative


def _raw_line(hotel: str, nationality: str, score: float, title, positive, negative, when: str) -> str:
    return json.dumps(
        {
            "hotel__booking_id": hotel,
            "user": "---",
            "user_nationality": nationality,
            "score": score,
            "review_title": title,
            "positive_review": positive,
            "negative_review": negative,
            "review_time": when,
        },
        ensure_ascii=False,
        separators=(",", ":"),
    )


def _when(rng: SplitMix64) -> str:
    month = 1 + rng.randbelow(12)
    day = 1 + rng.randbelow(28)
    hour = rng.randbelow(24)
    return f"2023-{month:02d}-{day:02d} {hour:02d}:00:00+00:00"


def generate_fixture_lines(n_lines: int = DEFAULT_LINES, seed: int = DEFAULT_SEED) -> list[str]:
    trad, simp, shared = _pools()
    lines: list[str] = []

    for hotel_no in sorted(_FLAVORS):
        flavor = _FLAVORS[hotel_no]
        hotel = f"h{hotel_no:04d}"
        for sentiment, (lo, hi) in _SCORE_RANGES.items():
            for bin_index in _SHORT_BINS + _LONG_BINS:
                rng = SplitMix64(derive_seed(seed, hotel, sentiment, bin_index))
                min_len = max(bin_index * 10 + 1, 6 if flavor != "pure" else 1)
                for side, primary in (("tw", trad), ("cn", simp)):
                    side_hi = min(hi, 9) if side == "tw" else hi
                    for _ in range(1 + rng.randbelow(2)):
                        total = min_len + rng.randbelow(bin_index * 10 + 10 - min_len + 1)
                        title, positive, negative = _review_text(
                            rng, primary, shared, total, flavor
                        )
                        score = float(lo + rng.randbelow(side_hi - lo + 1))
                        lines.append(
                            _raw_line(hotel, side, score, title, positive, negative, _when(rng))
                        )

    rng = SplitMix64(derive_seed(seed, "filler"))
    fill = n_lines - len(lines) - 4
    if fill < 0:
        raise ValueError(f"n_lines too small; need at least {len(lines) + 4}")
    for i in range(fill):
        kind = rng.randbelow(100)
        hotel = f"h{1 + rng.randbelow(20):04d}"
        if kind < 70:  # other nationality, real text
            nat = rng.choice(["jp", "us", "kr", "th", "hk"])
            primary = trad if rng.randbelow(2) else simp
            total = 5 + rng.randbelow(60)
            title, positive, negative = _review_text(rng, primary, shared, total, "pure")
            score = float(1 + rng.randbelow(10))
            lines.append(_raw_line(hotel, nat, score, title, positive, negative, _when(rng)))
        else:  # empty review, dropped by the non-empty filter
            side = rng.choice(["tw", "cn"])
            score = float(1 + rng.randbelow(10))
            lines.append(_raw_line(hotel, side, score, None, None, None, _when(rng)))

    lines.append(_raw_line("h0001", "tw", 11.0, None, "不存在的分數", None, "2023-01-01 00:00:00+00:00"))
    lines.append(
        json.dumps(
            {
                "hotel__booking_id": None,
                "user_nationality": "cn",
                "score": 5.0,
                "review_title": None,
                "positive_review": "没有旅馆编号",
                "negative_review": None,
                "review_time": "2023-01-01 00:00:00+00:00",
            },
            ensure_ascii=False,
            separators=(",", ":"),
        )
    )
    lines.append('{"hotel__booking_id": "h0002", "user_nationality": "tw",')
    lines.append("[1, 2, 3]")

    SplitMix64(derive_seed(seed, "shuffle")).shuffle(lines)
    return lines


def write_fixture(path: str | Path, n_lines: int = DEFAULT_LINES, seed: int = DEFAULT_SEED) -> None:
    Path(path).write_text("\n".join(generate_fixture_lines(n_lines, seed)) + "\n", encoding="utf-8")
