"""Deterministic tw/cn review pairing under the three alignment criteria.

Both members of a pair share a bucket key (same hotel, same 3-class
sentiment, same width-10 length bin). Within a bucket each side is sorted by
(score, length, record_id) and zipped, which attains the per-bucket maximum
of min(|tw|, |cn|) pairs while keeping score distance small.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass

from reviewgap.records import ReviewRecord
from reviewgap.textstats import DEFAULT_BIN_WIDTH, DEFAULT_MAX_LEN, length_bin, review_length

NEGATIVE = "negative"
NEUTRAL = "neutral"
POSITIVE = "positive"
CLASS_ORDER = {NEGATIVE: 0, NEUTRAL: 1, POSITIVE: 2}

DEFAULT_NEG_MAX = 3
DEFAULT_NEU_MAX = 7

_HALF_UP_EPS = 1e-9


def round_score(score: float) -> int:
    """Round half-up with 1e-9 tolerance (raw scores arrive as e.g. "10.0")."""
    return int(math.floor(score + 0.5 + _HALF_UP_EPS))


def sentiment_class(
    score: float, neg_max: int = DEFAULT_NEG_MAX, neu_max: int = DEFAULT_NEU_MAX
) -> str:
    """3-class sentiment of a 1-10 score: 1-3 negative, 4-7 neutral, 8-10 positive."""
    if not (1.0 <= score <= 10.0):
        raise ValueError(f"score out of range [1, 10]: {score}")
    s = round_score(score)
    if s <= neg_max:
        return NEGATIVE
    if s <= neu_max:
        return NEUTRAL
    return POSITIVE


@dataclass(frozen=True)
class BucketKey:
    hotel_id: str
    sentiment: str
    bin_index: int

    def sort_key(self):
        return (self.hotel_id, CLASS_ORDER[self.sentiment], self.bin_index)

    def to_dict(self) -> dict:
        return {"hotel_id": self.hotel_id, "sentiment": self.sentiment, "bin_index": self.bin_index}


@dataclass
class ReviewPair:
    pair_id: str
    key: BucketKey
    tw: ReviewRecord
    cn: ReviewRecord

    def to_dict(self) -> dict:
        return {
            "pair_id": self.pair_id,
            "key": self.key.to_dict(),
            "tw": self.tw.to_dict(),
            "cn": self.cn.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ReviewPair":
        return cls(
            pair_id=d["pair_id"],
            key=BucketKey(
                d["key"]["hotel_id"], d["key"]["sentiment"], int(d["key"]["bin_index"])
            ),
            tw=ReviewRecord.from_dict(d["tw"]),
            cn=ReviewRecord.from_dict(d["cn"]),
        )


def bucket_key(
    record: ReviewRecord,
    bin_width: int = DEFAULT_BIN_WIDTH,
    neg_max: int = DEFAULT_NEG_MAX,
    neu_max: int = DEFAULT_NEU_MAX,
) -> BucketKey:
    return BucketKey(
        hotel_id=record.hotel_id,
        sentiment=sentiment_class(record.score, neg_max, neu_max),
        bin_index=length_bin(review_length(record), bin_width),
    )


def eligible(records, max_len: int = DEFAULT_MAX_LEN) -> tuple[list[ReviewRecord], int]:
    """Drop empty and over-length records before pairing; returns excluded count."""
    records = list(records)
    kept = [r for r in records if 1 <= review_length(r) <= max_len]
    return kept, len(records) - len(kept)


def pair_id_for(seed: int, tw_id: str, cn_id: str) -> str:
    digest = hashlib.sha256(f"{seed}|{tw_id}|{cn_id}".encode("utf-8")).hexdigest()
    return digest[:16]


def build_pairs(
    tw_records: list[ReviewRecord],
    cn_records: list[ReviewRecord],
    seed: int = 0,
    bin_width: int = DEFAULT_BIN_WIDTH,
    neg_max: int = DEFAULT_NEG_MAX,
    neu_max: int = DEFAULT_NEU_MAX,
) -> list[ReviewPair]:
    """Pair same-bucket tw/cn records; emits min(|tw|, |cn|) pairs per bucket.

    The seed only salts pair ids; ordering is fully determined by the input.
    """
    buckets: dict[BucketKey, tuple[list[ReviewRecord], list[ReviewRecord]]] = {}
    for side_idx, side_records in ((0, tw_records), (1, cn_records)):
        for r in side_records:
            key = bucket_key(r, bin_width, neg_max, neu_max)
            buckets.setdefault(key, ([], []))[side_idx].append(r)

    def member_key(r: ReviewRecord):
        return (r.score, review_length(r), r.record_id)

    pairs: list[ReviewPair] = []
    for key in sorted(buckets, key=BucketKey.sort_key):
        tw_side, cn_side = buckets[key]
        tw_side = sorted(tw_side, key=member_key)
        cn_side = sorted(cn_side, key=member_key)
        for tw, cn in zip(tw_side, cn_side):
            pairs.append(
                ReviewPair(
                    pair_id=pair_id_for(seed, tw.record_id, cn.record_id),
                    key=key,
                    tw=tw,
                    cn=cn,
                )
            )
    return pairs
