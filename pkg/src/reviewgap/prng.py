"""Portable 64-bit SplitMix generator for seeded shuffles and sampling.

Element orderings must be reproducible byte-for-byte across machines and
Python versions, so nothing here depends on ``random`` internals.
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def fnv1a64(data: bytes) -> int:
    """FNV-1a hash of ``data``, reduced to 64 bits."""
    h = 0xCBF29CE484222325
    for b in data:
        h ^= b
        h = (h * 0x100000001B3) & _MASK64
    return h


def derive_seed(*parts: object) -> int:
    """Mix arbitrary parts (ints, strings) into one 64-bit seed."""
    key = "\x1f".join(str(p) for p in parts)
    return fnv1a64(key.encode("utf-8"))


class SplitMix64:
    """SplitMix64 stream; small state, full 64-bit output per step."""

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + _GOLDEN) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def randbelow(self, n: int) -> int:
        """Uniform integer in [0, n) by rejection (no modulo bias)."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = _MASK64 - (_MASK64 + 1) % n
        while True:
            v = self.next_u64()
            if v <= limit:
                return v % n

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle."""
        for i in range(len(items) - 1, 0, -1):
            j = self.randbelow(i + 1)
            items[i], items[j] = items[j], items[i]

    def choice(self, items):
        return items[self.randbelow(len(items))]

    def sample(self, items: list, k: int) -> list:
        """First k items of a seeded shuffle (k may exceed len)."""
        pool = list(items)
        self.shuffle(pool)
        return pool[: min(k, len(pool))]
