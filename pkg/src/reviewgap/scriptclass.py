"""Script profiling: reduce per-character categories to distribution buckets.

A text's profile is the set of character categories present, reduced to one
bucket label ("Only Traditional", "Simplified + English", ...). Neutral
categories (punctuation, digits, whitespace) never create mixed buckets, and
characters shared by both Chinese scripts never distinguish varieties on
their own.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from reviewgap._kernels import present_masks
from reviewgap.charsets import CharCategory, CharSetTables, codepoints, default_tables
from reviewgap.records import ReviewRecord

NEUTRAL = frozenset({CharCategory.PUNCTUATION, CharCategory.NUMBER, CharCategory.WHITESPACE})

_EXTRA_LABELS = {
    CharCategory.ENGLISH: "English",
    CharCategory.EMOJI: "Emoji",
    CharCategory.SYMBOL: "Symbol",
    CharCategory.BOPOMOFO: "Bopomofo",
    CharCategory.UNKNOWN: "Unknown",
}

BUCKET_EMPTY = "Empty"
BUCKET_UNDETERMINED = "Chinese (undetermined)"
BUCKET_OTHER = "Other mixed"

# distribution-report row order; "only"/"+" rows mirror the taxonomy table
BUCKET_ORDER = (
    ["Only Traditional", "Only Simplified", "Only English", "Only Emoji", "Only Symbol",
     "Only Bopomofo", "Only JP/KR", "Only Punctuation", "Only Unknown"]
    + [f"Traditional + {x}" for x in ("English", "Emoji", "Symbol", "Bopomofo", "JP/KR", "Unknown")]
    + [f"Simplified + {x}" for x in ("English", "Emoji", "Symbol", "Bopomofo", "JP/KR", "Unknown")]
    + [BUCKET_UNDETERMINED, BUCKET_OTHER, BUCKET_EMPTY]
)

SUBSET_ALL = "all"
SUBSET_CHINESE = "chinese"
SUBSET_CHINESE_ENGLISH = "chinese+english"
SUBSETS = (SUBSET_ALL, SUBSET_CHINESE, SUBSET_CHINESE_ENGLISH)


@dataclass(frozen=True)
class ScriptProfile:
    present: frozenset[CharCategory]
    bucket: str


def reduce_bucket(present: frozenset[CharCategory] | set[CharCategory]) -> str:
    """Deterministic reduction of a category set to a bucket label."""
    if not present:
        return BUCKET_EMPTY
    non_neutral = set(present) - NEUTRAL
    if not non_neutral:
        if CharCategory.PUNCTUATION in present:
            return "Only Punctuation"
        return BUCKET_OTHER  # digits/whitespace only: no taxonomy row

    extras = {_EXTRA_LABELS[c] for c in non_neutral if c in _EXTRA_LABELS}
    if non_neutral & {CharCategory.JAPANESE, CharCategory.KOREAN}:
        extras.add("JP/KR")

    trad = CharCategory.TRADITIONAL in non_neutral
    simp = CharCategory.SIMPLIFIED in non_neutral
    if trad and simp:
        return BUCKET_OTHER
    if trad or simp:
        family = "Traditional" if trad else "Simplified"
        if not extras:
            return f"Only {family}"
        if len(extras) == 1:
            return f"{family} + {next(iter(extras))}"
        return BUCKET_OTHER
    if CharCategory.SHARED_CHINESE in non_neutral:
        return BUCKET_UNDETERMINED if not extras else BUCKET_OTHER

    if len(extras) == 1:
        return f"Only {next(iter(extras))}"
    return BUCKET_OTHER


def _mask_to_present(mask: int) -> frozenset[CharCategory]:
    return frozenset(c for c in CharCategory if mask & (1 << int(c)))


def profile_text(text: str, tables: CharSetTables | None = None) -> ScriptProfile:
    tables = tables or default_tables()
    cps = codepoints(text)
    offsets = np.array([0, cps.size], dtype=np.int64)
    mask = int(present_masks(cps, offsets, tables.lookup)[0])
    present = _mask_to_present(mask)
    return ScriptProfile(present=present, bucket=reduce_bucket(present))


def record_text(record: ReviewRecord) -> str:
    return "".join(p for p in (record.title, record.positive, record.negative) if p)


def profile_records(
    records: list[ReviewRecord], tables: CharSetTables | None = None
) -> dict[str, ScriptProfile]:
    """Batch profile keyed by record_id (one kernel call over the corpus)."""
    tables = tables or default_tables()
    texts = [record_text(r) for r in records]
    offsets = np.zeros(len(texts) + 1, dtype=np.int64)
    for i, t in enumerate(texts):
        offsets[i + 1] = offsets[i] + len(t)
    flat = codepoints("".join(texts))
    masks = present_masks(flat, offsets, tables.lookup)
    out: dict[str, ScriptProfile] = {}
    for r, mask in zip(records, masks):
        present = _mask_to_present(int(mask))
        out[r.record_id] = ScriptProfile(present=present, bucket=reduce_bucket(present))
    return out


def bucket_distribution(records, profiles: dict[str, ScriptProfile]) -> dict[str, dict[str, int]]:
    """Bucket counts per variety, for the distribution report."""
    dist: dict[str, dict[str, int]] = {}
    for r in records:
        bucket = profiles[r.record_id].bucket
        dist.setdefault(r.variety, {})
        dist[r.variety][bucket] = dist[r.variety].get(bucket, 0) + 1
    return dist


# pair-level character-set constraints: under "chinese" both sides must use
# only their primary script; under "chinese+english" both sides must mix in
# English letters on top of their primary script (disjoint from "chinese").
_SUBSET_BUCKETS = {
    SUBSET_CHINESE: ("Only Traditional", "Only Simplified"),
    SUBSET_CHINESE_ENGLISH: ("Traditional + English", "Simplified + English"),
}


def pair_in_subset(pair, subset: str, buckets: dict[str, str]) -> bool:
    """buckets maps record_id -> bucket label for both pair members."""
    if subset == SUBSET_ALL:
        return True
    tw_want, cn_want = _SUBSET_BUCKETS[subset]
    return buckets[pair.tw.record_id] == tw_want and buckets[pair.cn.record_id] == cn_want


def subset_filter(pairs, subset: str, buckets: dict[str, str]) -> list:
    return [p for p in pairs if pair_in_subset(p, subset, buckets)]
