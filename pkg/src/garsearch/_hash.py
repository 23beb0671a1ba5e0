"""Deterministic integer primitives shared across the package.

Both functions are pinned to exact bit-level behaviour: store checksums,
token bucketing, and mock image pixels all depend on them being identical
across platforms and Python versions.
"""

FNV64_OFFSET = 0xCBF29CE484222325
FNV64_PRIME = 0x100000001B3
MASK64 = 0xFFFFFFFFFFFFFFFF


def fnv1a64(data: bytes, h: int = FNV64_OFFSET) -> int:
    """64-bit FNV-1a hash of raw bytes."""
    for byte in data:
        h ^= byte
        h = (h * FNV64_PRIME) & MASK64
    return h


class Xorshift64Star:
    """xorshift64* generator; a zero seed is remapped to the FNV offset basis."""

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        self._state = (seed & MASK64) or FNV64_OFFSET

    def next_u64(self) -> int:
        s = self._state
        s ^= s >> 12
        s = (s ^ (s << 25)) & MASK64
        s ^= s >> 27
        self._state = s
        return (s * 0x2545F4914F6CDD1D) & MASK64

    def bytes(self, n: int) -> bytes:
        out = bytearray()
        while len(out) < n:
            out += self.next_u64().to_bytes(8, "little")
        return bytes(out[:n])
