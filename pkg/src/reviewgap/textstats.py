"""Text length accounting: scalar counts, width-10 bins, short/long groups."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from reviewgap.records import ReviewRecord

SHORT = "short"
LONG = "long"
OVERALL = "overall"

DEFAULT_BIN_WIDTH = 10
DEFAULT_MAX_LEN = 500
DEFAULT_SHORT_MAX = 49


@dataclass(frozen=True)
class LengthInfo:
    char_count: int
    bin_index: int
    group: str


def review_length(record: ReviewRecord) -> int:
    """Unicode scalar count over title+positive+negative; separators excluded."""
    return sum(len(p) for p in (record.title, record.positive, record.negative) if p is not None)


def length_bin(char_count: int, bin_width: int = DEFAULT_BIN_WIDTH) -> int:
    """Bin of width ``bin_width``: counts 1..10 -> 0, 11..20 -> 1, ..."""
    if char_count < 1:
        raise ValueError(f"char_count must be >= 1, got {char_count}")
    return (char_count - 1) // bin_width


def length_group(char_count: int, short_max: int = DEFAULT_SHORT_MAX) -> str:
    """Short for 1..short_max scalars, long above."""
    if char_count < 1:
        raise ValueError(f"char_count must be >= 1, got {char_count}")
    return SHORT if char_count <= short_max else LONG


def length_info(
    record: ReviewRecord,
    bin_width: int = DEFAULT_BIN_WIDTH,
    short_max: int = DEFAULT_SHORT_MAX,
) -> LengthInfo:
    n = review_length(record)
    return LengthInfo(n, length_bin(n, bin_width), length_group(n, short_max))


def length_histogram(records, bin_width: int = DEFAULT_BIN_WIDTH) -> dict[str, Counter]:
    """Per-variety histogram of length bins (records with no text are skipped)."""
    hist: dict[str, Counter] = {}
    for r in records:
        n = review_length(r)
        if n < 1:
            continue
        hist.setdefault(r.variety, Counter())[length_bin(n, bin_width)] += 1
    return hist
