"""Contextually aligned review pairing and LLM rating-gap benchmarking.

The package builds matched review pairs across two Chinese script varieties
(tw/cn) from raw review records, drives rating predictions through
chat-completion endpoints (or deterministic mocks), and reports per-variety
accuracy/MSE gaps with paired significance tests.
"""

__version__ = "0.1.0"

from reviewgap.records import ReviewRecord, parse_records, filter_nonempty, filter_varieties
from reviewgap.pairing import ReviewPair, BucketKey, sentiment_class, build_pairs
from reviewgap.textstats import review_length, length_bin, length_group

__all__ = [
    "ReviewRecord",
    "ReviewPair",
    "BucketKey",
    "parse_records",
    "filter_nonempty",
    "filter_varieties",
    "sentiment_class",
    "build_pairs",
    "review_length",
    "length_bin",
    "length_group",
]
