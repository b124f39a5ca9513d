"""Strict parsing of raw completions and pair-completeness accounting.

The task demands a bare number, so parsing is whitespace-trimmed exact
integer matching: "7" is a score, "7/10" and "The score is 7" are extra
text, "11" is out of range. Lenient extraction would silently change the
measured accuracy.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path

from reviewgap.llm import EvalResult
from reviewgap.pairing import ReviewPair
from reviewgap.textstats import LONG, SHORT, length_group, review_length

REASON_NON_NUMERIC = "non_numeric"
REASON_OUT_OF_RANGE = "out_of_range"
REASON_EXTRA_TEXT = "extra_text"
REASON_EMPTY = "empty"
REASON_TRANSPORT = "transport"

_INT_RE = re.compile(r"[+-]?[0-9]+")
_ASCII_DIGITS = set("0123456789")


@dataclass
class PredictionOutcome:
    pair_id: str
    side: str
    review_ref: str
    model: str
    variant: str
    parsed_score: int | None = None
    invalid_reason: str | None = None

    @property
    def valid(self) -> bool:
        return self.parsed_score is not None

    def to_dict(self) -> dict:
        return {
            "pair_id": self.pair_id,
            "side": self.side,
            "review_ref": self.review_ref,
            "model": self.model,
            "variant": self.variant,
            "parsed_score": self.parsed_score,
            "invalid_reason": self.invalid_reason,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PredictionOutcome":
        return cls(
            d["pair_id"], d["side"], d["review_ref"], d["model"], d["variant"],
            d.get("parsed_score"), d.get("invalid_reason"),
        )


def parse_prediction(raw_text: str | None) -> tuple[int | None, str | None]:
    """(score, None) for a bare integer 1-10, else (None, invalid reason)."""
    if raw_text is None:
        return None, REASON_TRANSPORT
    s = raw_text.strip()
    if not s:
        return None, REASON_EMPTY
    if _INT_RE.fullmatch(s):
        value = int(s)
        if 1 <= value <= 10:
            return value, None
        return None, REASON_OUT_OF_RANGE
    if any(c in _ASCII_DIGITS for c in s):
        return None, REASON_EXTRA_TEXT
    return None, REASON_NON_NUMERIC


def outcomes_from_results(results: list[EvalResult], model: str) -> list[PredictionOutcome]:
    out = []
    for r in results:
        if r.transport_error is not None:
            score, reason = None, REASON_TRANSPORT
        else:
            score, reason = parse_prediction(r.raw_text)
        out.append(
            PredictionOutcome(r.pair_id, r.side, r.record_id, model, r.variant, score, reason)
        )
    return out


def complete_pair_ids(outcomes: list[PredictionOutcome]) -> set[str]:
    """Pair ids where both sides carry a valid parsed score."""
    sides: dict[str, set[str]] = {}
    for o in outcomes:
        if o.valid:
            sides.setdefault(o.pair_id, set()).add(o.side)
    return {pid for pid, s in sides.items() if {"tw", "cn"} <= s}


@dataclass
class ValidationRow:
    model: str
    variant: str
    length_group: str  # all / short / long
    issued: int
    valid: int
    invalid: int
    invalid_by_reason: dict

    def to_dict(self) -> dict:
        d = {
            "model": self.model,
            "variant": self.variant,
            "length_group": self.length_group,
            "issued": self.issued,
            "valid": self.valid,
            "invalid": self.invalid,
        }
        d.update({f"invalid_{k}": v for k, v in sorted(self.invalid_by_reason.items())})
        return d


def validation_summary(
    outcomes: list[PredictionOutcome],
    pairs: list[ReviewPair],
    short_max: int = 49,
) -> list[ValidationRow]:
    """Valid/invalid request counts per length group (valid + invalid = issued)."""
    side_group = {}
    for p in pairs:
        side_group[(p.pair_id, "tw")] = length_group(review_length(p.tw), short_max)
        side_group[(p.pair_id, "cn")] = length_group(review_length(p.cn), short_max)

    rows: dict[str, ValidationRow] = {}
    model = outcomes[0].model if outcomes else ""
    variant = outcomes[0].variant if outcomes else ""
    for g in ("all", SHORT, LONG):
        rows[g] = ValidationRow(model, variant, g, 0, 0, 0, {})
    for o in outcomes:
        groups = ["all"]
        g = side_group.get((o.pair_id, o.side))
        if g:
            groups.append(g)
        for gname in groups:
            row = rows[gname]
            row.issued += 1
            if o.valid:
                row.valid += 1
            else:
                row.invalid += 1
                row.invalid_by_reason[o.invalid_reason] = (
                    row.invalid_by_reason.get(o.invalid_reason, 0) + 1
                )
    return [rows["all"], rows[SHORT], rows[LONG]]


def write_outcomes(path: str | Path, outcomes: list[PredictionOutcome]) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for o in outcomes:
            f.write(json.dumps(o.to_dict(), ensure_ascii=False, separators=(",", ":")) + "\n")


def read_outcomes(path: str | Path) -> list[PredictionOutcome]:
    out = []
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            if line.strip():
                out.append(PredictionOutcome.from_dict(json.loads(line)))
    return out
