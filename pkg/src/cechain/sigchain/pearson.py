"""Keyed Pearson hash with multi-byte output."""

from __future__ import annotations

from .. import bits as _bits

# Affine byte permutation; 167 is odd so the map is a bijection mod 256.
PERMUTATION = bytes((167 * i + 13) % 256 for i in range(256))


def _absorb(data: bytes, h: int = 0) -> int:
    for b in data:
        h = PERMUTATION[h ^ b]
    return h


def pearson_hash(data: bytes, key: bytes = b"", width: int = 8) -> str:
    """Hash ``data`` under ``key`` to a ``width``-bit string.

    Output byte ``j`` is the Pearson walk over ``bytes([j]) + key + data``;
    the bytes are concatenated and the ``width`` high-order bits kept.
    """
    if not 1 <= width <= 64:
        raise ValueError(f"width must be in 1..64, got {width}")
    nbytes = (width + 7) // 8
    out = bytes(_absorb(bytes([j]) + bytes(key) + bytes(data)) for j in range(nbytes))
    return _bits.from_bytes(out, width)
