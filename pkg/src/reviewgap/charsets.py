"""Character-set tables used by the script classifier.

Tables ship as plain-text data files (one hex code point or ``LO..HI`` range
per line, ``#`` comments). Precedence from highest to lowest:

    bopomofo > emoji > japanese/korean > chinese > english > number
    > punctuation > symbol > whitespace > unknown

Characters present in both Chinese files classify as shared Chinese; the
files are versioned by content hash, recorded in run manifests.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from enum import IntEnum
from importlib import resources
from pathlib import Path

import numpy as np

MAX_CODEPOINT = 0x110000


class CharCategory(IntEnum):
    TRADITIONAL = 0
    SIMPLIFIED = 1
    SHARED_CHINESE = 2
    ENGLISH = 3
    EMOJI = 4
    BOPOMOFO = 5
    JAPANESE = 6
    KOREAN = 7
    SYMBOL = 8
    PUNCTUATION = 9
    NUMBER = 10
    WHITESPACE = 11
    UNKNOWN = 12


# applied low precedence first so later files overwrite earlier ones
_LOAD_ORDER = [
    ("whitespace.txt", CharCategory.WHITESPACE),
    ("symbol.txt", CharCategory.SYMBOL),
    ("punctuation.txt", CharCategory.PUNCTUATION),
    ("number.txt", CharCategory.NUMBER),
    ("english.txt", CharCategory.ENGLISH),
    # chinese handled separately (two files + shared intersection)
    ("japanese.txt", CharCategory.JAPANESE),
    ("korean.txt", CharCategory.KOREAN),
    ("emoji.txt", CharCategory.EMOJI),
    ("bopomofo.txt", CharCategory.BOPOMOFO),
]

_CHINESE_FILES = ("chinese_traditional.txt", "chinese_simplified.txt")


@dataclass
class CharSetTables:
    lookup: np.ndarray  # uint8[MAX_CODEPOINT], values are CharCategory
    version: str

    def category(self, ch: str) -> CharCategory:
        return CharCategory(int(self.lookup[ord(ch)]))


def data_dir() -> Path:
    return Path(resources.files("reviewgap") / "data" / "charsets")


def parse_table_file(path: Path) -> list[tuple[int, int]]:
    """Parse one data file into inclusive (lo, hi) code point ranges."""
    ranges: list[tuple[int, int]] = []
    for raw in path.read_text(encoding="utf-8").splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ".." in line:
            lo_s, hi_s = line.split("..", 1)
            lo, hi = int(lo_s, 16), int(hi_s, 16)
        else:
            lo = hi = int(line, 16)
        if not (0 <= lo <= hi < MAX_CODEPOINT):
            raise ValueError(f"{path.name}: bad range {line!r}")
        ranges.append((lo, hi))
    return ranges


def _apply(lookup: np.ndarray, ranges: list[tuple[int, int]], cat: CharCategory) -> None:
    for lo, hi in ranges:
        lookup[lo : hi + 1] = int(cat)


def tables_version(dirpath: Path) -> str:
    h = hashlib.sha256()
    for name in sorted(p.name for p in dirpath.glob("*.txt")):
        h.update(name.encode("utf-8"))
        h.update((dirpath / name).read_bytes())
    return h.hexdigest()[:12]


def load_tables(dirpath: Path | None = None) -> CharSetTables:
    dirpath = Path(dirpath) if dirpath else data_dir()
    lookup = np.full(MAX_CODEPOINT, int(CharCategory.UNKNOWN), dtype=np.uint8)
    for name, cat in _LOAD_ORDER[:5]:
        _apply(lookup, parse_table_file(dirpath / name), cat)

    trad = set()
    for lo, hi in parse_table_file(dirpath / "chinese_traditional.txt"):
        trad.update(range(lo, hi + 1))
    simp = set()
    for lo, hi in parse_table_file(dirpath / "chinese_simplified.txt"):
        simp.update(range(lo, hi + 1))
    shared = trad & simp
    lookup[sorted(trad - shared)] = int(CharCategory.TRADITIONAL)
    lookup[sorted(simp - shared)] = int(CharCategory.SIMPLIFIED)
    lookup[sorted(shared)] = int(CharCategory.SHARED_CHINESE)

    for name, cat in _LOAD_ORDER[5:]:
        _apply(lookup, parse_table_file(dirpath / name), cat)
    return CharSetTables(lookup=lookup, version=tables_version(dirpath))


_DEFAULT: CharSetTables | None = None


def default_tables() -> CharSetTables:
    """Shipped tables, loaded once per process."""
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = load_tables()
    return _DEFAULT


def classify_char(ch: str, tables: CharSetTables | None = None) -> CharCategory:
    """Category of a single Unicode scalar; total over all code points."""
    if len(ch) != 1:
        raise ValueError("classify_char expects a single character")
    return (tables or default_tables()).category(ch)


def codepoints(text: str) -> np.ndarray:
    """Text as a uint32 codepoint array (fast path for the kernels)."""
    if not text:
        return np.empty(0, dtype=np.uint32)
    return np.frombuffer(text.encode("utf-32-le"), dtype=np.uint32)
