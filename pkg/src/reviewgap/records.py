"""Reading, normalizing and filtering raw review records.

Input is UTF-8 line-delimited JSON. Source key names default to the raw
export layout (``hotel__booking_id``, ``user_nationality``, ...) and can be
remapped through a field-map file, so real exports and synthetic fixtures go
through one reader.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

TW = "tw"
CN = "cn"
OTHER = "other"

DEFAULT_FIELD_MAP = {
    "record_id": "record_id",
    "hotel_id": "hotel__booking_id",
    "nationality": "user_nationality",
    "score": "score",
    "title": "review_title",
    "positive": "positive_review",
    "negative": "negative_review",
    "review_time": "review_time",
}

REASON_BAD_SCORE = "bad_score"
REASON_MISSING_VENUE = "missing_venue"


@dataclass
class ReviewRecord:
    """One normalized review: venue, variety, 1-10 score and three text parts."""

    record_id: str
    hotel_id: str
    variety: str
    score: float
    title: str | None = None
    positive: str | None = None
    negative: str | None = None
    review_time: str | None = None
    translated: bool = False

    def text_parts(self) -> tuple[str, ...]:
        """Present, non-whitespace text parts in title/positive/negative order."""
        return tuple(
            p for p in (self.title, self.positive, self.negative) if p is not None and p.strip()
        )

    def has_text(self) -> bool:
        return bool(self.text_parts())

    def to_dict(self) -> dict:
        d = {
            "record_id": self.record_id,
            "hotel_id": self.hotel_id,
            "variety": self.variety,
            "score": self.score,
            "title": self.title,
            "positive": self.positive,
            "negative": self.negative,
            "review_time": self.review_time,
        }
        if self.translated:
            d["translated"] = True
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ReviewRecord":
        return cls(
            record_id=str(d["record_id"]),
            hotel_id=str(d["hotel_id"]),
            variety=d.get("variety", OTHER),
            score=float(d["score"]),
            title=d.get("title"),
            positive=d.get("positive"),
            negative=d.get("negative"),
            review_time=d.get("review_time"),
            translated=bool(d.get("translated", False)),
        )


@dataclass
class ParseReport:
    """Per-ingest accounting; parsed + skipped + rejected covers every line."""

    parsed: int = 0
    skipped: int = 0
    rejected: list[dict] = field(default_factory=list)

    @property
    def total(self) -> int:
        return self.parsed + self.skipped + len(self.rejected)


def _clean_text(value) -> str | None:
    if value is None:
        return None
    return str(value)


def variety_from_nationality(value, tw_code: str = "tw", cn_code: str = "cn") -> str:
    if value is None:
        return OTHER
    v = str(value).strip().lower()
    if v == tw_code.lower():
        return TW
    if v == cn_code.lower():
        return CN
    return OTHER


def parse_records(
    lines: Iterable[str],
    field_map: dict | None = None,
    tw_code: str = "tw",
    cn_code: str = "cn",
) -> tuple[list[ReviewRecord], ParseReport]:
    """Parse line-delimited JSON records, normalizing fields.

    Malformed lines are skipped and counted; records with a non-numeric or
    out-of-range score, or without a venue id, are rejected with a reason.
    """
    fmap = dict(DEFAULT_FIELD_MAP)
    if field_map:
        fmap.update(field_map)

    records: list[ReviewRecord] = []
    report = ParseReport()
    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            report.skipped += 1
            continue
        try:
            raw = json.loads(line)
        except json.JSONDecodeError:
            report.skipped += 1
            continue
        if not isinstance(raw, dict):
            report.skipped += 1
            continue

        try:
            score = float(raw[fmap["score"]])
        except (KeyError, TypeError, ValueError):
            report.rejected.append({"line": line_no, "reason": REASON_BAD_SCORE})
            continue
        if not (1.0 <= score <= 10.0):
            report.rejected.append({"line": line_no, "reason": REASON_BAD_SCORE})
            continue

        hotel = raw.get(fmap["hotel_id"])
        if hotel is None or str(hotel).strip() == "":
            report.rejected.append({"line": line_no, "reason": REASON_MISSING_VENUE})
            continue

        rid = raw.get(fmap["record_id"])
        if rid is None:
            rid = f"r{line_no:08d}"
        records.append(
            ReviewRecord(
                record_id=str(rid),
                hotel_id=str(hotel),
                variety=variety_from_nationality(raw.get(fmap["nationality"]), tw_code, cn_code),
                score=score,
                title=_clean_text(raw.get(fmap["title"])),
                positive=_clean_text(raw.get(fmap["positive"])),
                negative=_clean_text(raw.get(fmap["negative"])),
                review_time=_clean_text(raw.get(fmap["review_time"])),
            )
        )
        report.parsed += 1
    return records, report


def filter_nonempty(records: Iterable[ReviewRecord]) -> list[ReviewRecord]:
    """Keep records with at least one non-whitespace text part, in order."""
    return [r for r in records if r.has_text()]


def filter_varieties(
    records: Iterable[ReviewRecord],
) -> tuple[list[ReviewRecord], list[ReviewRecord], int]:
    """Partition into (tw, cn) lists; returns the count of excluded records."""
    tw: list[ReviewRecord] = []
    cn: list[ReviewRecord] = []
    excluded = 0
    for r in records:
        if r.variety == TW:
            tw.append(r)
        elif r.variety == CN:
            cn.append(r)
        else:
            excluded += 1
    return tw, cn, excluded


def dump_json_line(obj: dict) -> str:
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"))


def write_records(path: str | Path, records: Iterable[ReviewRecord]) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for r in records:
            f.write(dump_json_line(r.to_dict()) + "\n")


def read_records(path: str | Path) -> list[ReviewRecord]:
    out = []
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            if line.strip():
                out.append(ReviewRecord.from_dict(json.loads(line)))
    return out


def iter_json_lines(path: str | Path) -> Iterator[dict]:
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            if line.strip():
                yield json.loads(line)


def load_field_map(path: str | Path) -> dict:
    """Field-map file: JSON object mapping canonical names to source keys."""
    with open(path, "r", encoding="utf-8") as f:
        data = json.load(f)
    unknown = set(data) - set(DEFAULT_FIELD_MAP)
    if unknown:
        raise ValueError(f"unknown field-map keys: {sorted(unknown)}")
    return data
