"""Prompt rendering for the three input settings plus the sentiment pilot.

Templates live as versioned text assets under ``data/templates`` and are
filled by slot replacement (``[title]``, ``[text]``, ...), never by format
strings, so review text containing braces round-trips untouched. Shuffled
rendering permutes the non-empty elements with a SplitMix64 stream seeded
per (global seed, pair, side), making every rendering byte-reproducible.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path

from reviewgap.prng import SplitMix64, derive_seed
from reviewgap.records import ReviewRecord

STRUCTURED = "structured"
PLAIN = "plain"
SHUFFLED = "shuffled"
VARIANTS = (STRUCTURED, PLAIN, SHUFFLED)


def templates_dir() -> Path:
    return Path(resources.files("reviewgap") / "data" / "templates")


@lru_cache(maxsize=None)
def _load(name: str) -> str:
    return (templates_dir() / name).read_text(encoding="utf-8")


def template_version() -> str:
    h = hashlib.sha256()
    d = templates_dir()
    for name in sorted(p.name for p in d.glob("*.txt")):
        h.update(name.encode("utf-8"))
        h.update((d / name).read_bytes())
    return h.hexdigest()[:12]


@dataclass(frozen=True)
class PromptInstance:
    user_text: str
    system_text: str | None
    variant: str
    seed: int
    review_ref: str


def _system(include_system: bool) -> str | None:
    return _load("system.txt") if include_system else None


def render_structured(record: ReviewRecord, include_system: bool = True) -> PromptInstance:
    """Labeled-slot rendering; absent parts become empty strings after labels."""
    text = (
        _load("structured.txt")
        .replace("[title]", record.title or "")
        .replace("[positive_review]", record.positive or "")
        .replace("[negative_review]", record.negative or "")
    )
    return PromptInstance(text, _system(include_system), STRUCTURED, 0, record.record_id)


def _plain_text(parts: tuple[str, ...]) -> str:
    return _load("plain.txt").replace("[text]", "\n".join(parts))


def render_plain(record: ReviewRecord, include_system: bool = True) -> PromptInstance:
    """Single-paragraph rendering: title, positive, negative; empty parts skipped."""
    return PromptInstance(
        _plain_text(record.text_parts()), _system(include_system), PLAIN, 0, record.record_id
    )


def render_shuffled(
    record: ReviewRecord, seed: int, include_system: bool = True
) -> PromptInstance:
    """Plain rendering with the non-empty elements in seeded random order."""
    parts = list(record.text_parts())
    SplitMix64(seed).shuffle(parts)
    return PromptInstance(
        _plain_text(tuple(parts)), _system(include_system), SHUFFLED, seed, record.record_id
    )


def shuffle_seed(global_seed: int, pair_id: str, side: str) -> int:
    """Per-(pair, side) shuffle seed; stable across runs and machines."""
    return derive_seed(global_seed, pair_id, side)


def render(
    record: ReviewRecord,
    variant: str,
    seed: int = 0,
    include_system: bool = True,
) -> PromptInstance:
    if variant == STRUCTURED:
        return render_structured(record, include_system)
    if variant == PLAIN:
        return render_plain(record, include_system)
    if variant == SHUFFLED:
        return render_shuffled(record, seed, include_system)
    raise ValueError(f"unknown variant: {variant!r}")


def render_sentiment(text: str) -> PromptInstance:
    """Sentiment-classification prompt used by the length sweep (no system role)."""
    return PromptInstance(
        _load("sentiment.txt").replace("[text]", text), None, "sentiment", 0, ""
    )
