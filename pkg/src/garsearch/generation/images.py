"""Minimal PNG writer/reader for deterministic mock images.

The writer produces a valid 8-bit RGB PNG from raw pixel bytes and embeds
arbitrary UTF-8 text as iTXt chunks; the mock pipeline uses an iTXt chunk
keyed "prompt" to carry image provenance across the wire, where only bytes
survive. zlib level is pinned so identical pixels give identical files.
"""

from __future__ import annotations

import struct
import zlib
from typing import Mapping

from .._hash import MASK64, Xorshift64Star, fnv1a64

PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"
PROVENANCE_KEY = "prompt"
MOCK_IMAGE_SIZE = 64
_ZLIB_LEVEL = 6


def _chunk(ctype: bytes, payload: bytes) -> bytes:
    crc = zlib.crc32(ctype + payload) & 0xFFFFFFFF
    return struct.pack(">I", len(payload)) + ctype + payload + struct.pack(">I", crc)


def write_rgb_png(width: int, height: int, pixels: bytes,
                  texts: Mapping[str, str] | None = None) -> bytes:
    """Encode raw RGB bytes (row-major, 3 bytes per pixel) as a PNG."""
    if len(pixels) != width * height * 3:
        raise ValueError(f"expected {width * height * 3} pixel bytes, got {len(pixels)}")
    ihdr = struct.pack(">IIBBBBB", width, height, 8, 2, 0, 0, 0)
    parts = [PNG_SIGNATURE, _chunk(b"IHDR", ihdr)]
    for key, value in (texts or {}).items():
        payload = (
            key.encode("latin-1")
            + b"\x00"          # keyword terminator
            + b"\x00\x00"      # compression flag + method (uncompressed)
            + b"\x00"          # empty language tag
            + b"\x00"          # empty translated keyword
            + value.encode("utf-8")
        )
        parts.append(_chunk(b"iTXt", payload))
    stride = width * 3
    raw = b"".join(b"\x00" + pixels[y * stride: (y + 1) * stride] for y in range(height))
    parts.append(_chunk(b"IDAT", zlib.compress(raw, _ZLIB_LEVEL)))
    parts.append(_chunk(b"IEND", b""))
    return b"".join(parts)


def iter_chunks(data: bytes):
    if data[:8] != PNG_SIGNATURE:
        raise ValueError("not a PNG: bad signature")
    off = 8
    while off + 8 <= len(data):
        (length,) = struct.unpack_from(">I", data, off)
        ctype = data[off + 4: off + 8]
        payload = data[off + 8: off + 8 + length]
        yield ctype, payload
        off += 12 + length
        if ctype == b"IEND":
            break


def read_png_texts(data: bytes) -> dict[str, str]:
    """Extract iTXt (and tEXt) entries from a PNG as a dict."""
    out: dict[str, str] = {}
    for ctype, payload in iter_chunks(data):
        if ctype == b"iTXt":
            key, _, rest = payload.partition(b"\x00")
            # skip compression flag/method, language tag, translated keyword
            rest = rest[2:]
            _, _, rest = rest.partition(b"\x00")
            _, _, text = rest.partition(b"\x00")
            out[key.decode("latin-1")] = text.decode("utf-8")
        elif ctype == b"tEXt":
            key, _, text = payload.partition(b"\x00")
            out[key.decode("latin-1")] = text.decode("latin-1")
    return out


def provenance_of(png_bytes: bytes) -> str:
    return read_png_texts(png_bytes).get(PROVENANCE_KEY, "")


def mock_image_stream_seed(prompt: str, seed: int) -> int:
    return fnv1a64(prompt.encode("utf-8")) ^ (seed & MASK64)


def render_mock_images(prompt: str, n: int, seed: int,
                       size: int = MOCK_IMAGE_SIZE) -> list[bytes]:
    """n deterministic PNGs whose pixels come from one xorshift64* stream
    seeded by FNV-1a(prompt) XOR seed; each carries the prompt as iTXt."""
    rng = Xorshift64Star(mock_image_stream_seed(prompt, seed))
    out = []
    for _ in range(n):
        pixels = rng.bytes(size * size * 3)
        out.append(write_rgb_png(size, size, pixels, {PROVENANCE_KEY: prompt}))
    return out
