"""Translation round-trip machinery for the cross-script comparison.

A translator is anything with ``translate(text, direction) -> str``; the
round-trip experiment replaces each pair's source-side review with its
translation and reuses the standard evaluation on (original, translated)
units. Shipped translators: an HTTP client, an identity mock and a
fixed-glyph-map mock.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import requests

from reviewgap.pairing import ReviewPair
from reviewgap.records import ReviewRecord

TW_TO_CN = "tw_to_cn"
CN_TO_TW = "cn_to_tw"
DIRECTIONS = (TW_TO_CN, CN_TO_TW)


class TranslationError(RuntimeError):
    pass


class IdentityTranslator:
    name = "mock:identity"

    def translate(self, text: str, direction: str) -> str:
        return text


class CharMapTranslator:
    """Glyph-for-glyph mapping over a fixed table; unmapped characters pass through."""

    name = "mock:charmap"

    def __init__(self, map_path: Path | None = None):
        path = map_path or Path(resources.files("reviewgap") / "data" / "charmap_tw_cn.txt")
        self.tw_to_cn: dict[str, str] = {}
        self.cn_to_tw: dict[str, str] = {}
        for raw in path.read_text(encoding="utf-8").splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            t_hex, s_hex = line.split()
            t, s = chr(int(t_hex, 16)), chr(int(s_hex, 16))
            self.tw_to_cn[t] = s
            self.cn_to_tw[s] = t

    def translate(self, text: str, direction: str) -> str:
        table = self.tw_to_cn if direction == TW_TO_CN else self.cn_to_tw
        return "".join(table.get(c, c) for c in text)


class HttpTranslator:
    """POSTs {"text", "direction"} and expects {"text"} back."""

    def __init__(self, url: str, timeout: float = 30.0, max_retries: int = 3):
        self.url = url
        self.name = url
        self.timeout = timeout
        self.max_retries = max_retries

    def translate(self, text: str, direction: str) -> str:
        last = "no attempt"
        for _ in range(self.max_retries + 1):
            try:
                resp = requests.post(
                    self.url, json={"text": text, "direction": direction}, timeout=self.timeout
                )
            except requests.RequestException as exc:
                last = str(exc)
                continue
            if resp.status_code // 100 != 2:
                last = f"http {resp.status_code}"
                continue
            try:
                return str(resp.json()["text"])
            except (ValueError, KeyError, TypeError) as exc:
                raise TranslationError(f"bad translator response: {exc}") from exc
        raise TranslationError(last)


class CachedTranslator:
    """Wraps a translator with a (text hash, direction)-keyed JSONL cache."""

    def __init__(self, inner, cache_path: str | Path):
        self.inner = inner
        self.name = inner.name
        self.cache_path = Path(cache_path)
        self._cache: dict[tuple[str, str], str] = {}
        if self.cache_path.exists():
            with open(self.cache_path, "r", encoding="utf-8") as f:
                for line in f:
                    if line.strip():
                        d = json.loads(line)
                        self._cache[(d["key"], d["direction"])] = d["text"]

    @staticmethod
    def _key(text: str) -> str:
        return hashlib.sha256(text.encode("utf-8")).hexdigest()

    def translate(self, text: str, direction: str) -> str:
        key = (self._key(text), direction)
        if key in self._cache:
            return self._cache[key]
        out = self.inner.translate(text, direction)
        self._cache[key] = out
        with open(self.cache_path, "a", encoding="utf-8") as f:
            f.write(
                json.dumps(
                    {"key": key[0], "direction": direction, "text": out},
                    ensure_ascii=False, separators=(",", ":"),
                )
                + "\n"
            )
        return out


def parse_translator_spec(spec: str, cache_path: str | Path | None = None):
    if spec == "mock:identity":
        inner = IdentityTranslator()
    elif spec == "mock:charmap":
        inner = CharMapTranslator()
    elif spec.startswith(("http://", "https://")):
        inner = HttpTranslator(spec)
    else:
        raise ValueError(f"translator must be a URL, mock:identity or mock:charmap: {spec!r}")
    return CachedTranslator(inner, cache_path) if cache_path else inner


def translate_record(record: ReviewRecord, direction: str, translator) -> ReviewRecord:
    """Translate the three parts independently; absent parts stay absent."""

    def part(text):
        return None if text is None else translator.translate(text, direction)

    return ReviewRecord(
        record_id=f"{record.record_id}:mt",
        hotel_id=record.hotel_id,
        variety=record.variety,
        score=record.score,
        title=part(record.title),
        positive=part(record.positive),
        negative=part(record.negative),
        review_time=record.review_time,
        translated=True,
    )


def translate_corpus(
    records: list[ReviewRecord], direction: str, translator
) -> tuple[list[ReviewRecord], list[str]]:
    """Translated copies plus the ids of records whose translation failed."""
    out: list[ReviewRecord] = []
    dropped: list[str] = []
    for r in records:
        try:
            out.append(translate_record(r, direction, translator))
        except TranslationError:
            dropped.append(r.record_id)
    return out, dropped


def mt_pairs(
    pairs: list[ReviewPair], direction: str, translator
) -> tuple[list[ReviewPair], list[str]]:
    """(original, translated) units in standard pair shape, keyed by pair id.

    For tw_to_cn the tw member is the original and the cn slot holds its
    translation; cn_to_tw is symmetric. Pairs whose translation fails are
    dropped (completeness semantics) and their ids returned.
    """
    if direction not in DIRECTIONS:
        raise ValueError(f"unknown direction: {direction!r}")
    out: list[ReviewPair] = []
    dropped: list[str] = []
    for pair in pairs:
        source = pair.tw if direction == TW_TO_CN else pair.cn
        try:
            translated = translate_record(source, direction, translator)
        except TranslationError:
            dropped.append(pair.pair_id)
            continue
        tw, cn = (source, translated) if direction == TW_TO_CN else (translated, source)
        out.append(ReviewPair(pair_id=pair.pair_id, key=pair.key, tw=tw, cn=cn))
    return out, dropped
