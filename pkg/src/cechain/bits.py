"""Bit-string helpers.

Bit-strings are plain ``str`` objects over the alphabet ``"01"`` with the most
significant bit first. They are hashable, compare by value and print readably,
which is all the protocol layer needs. Vectorised paths (channel simulation,
batch coding) use ``numpy.uint8`` arrays instead and convert at the edges.
"""

from __future__ import annotations

import numpy as np


def is_bits(s: object) -> bool:
    return isinstance(s, str) and all(c in "01" for c in s)


def from_int(value: int, width: int) -> str:
    if value < 0 or value >= 1 << width:
        raise ValueError(f"{value} does not fit in {width} bits")
    return format(value, f"0{width}b") if width else ""


def to_int(bits: str) -> int:
    return int(bits, 2) if bits else 0


def from_bytes(data: bytes, width: int | None = None) -> str:
    bits = "".join(format(b, "08b") for b in data)
    if width is not None:
        bits = bits[:width]
    return bits


def to_bytes(bits: str) -> bytes:
    """Pack big-endian; a ragged tail is right-padded with zeros."""
    pad = (-len(bits)) % 8
    padded = bits + "0" * pad
    return bytes(int(padded[i:i + 8], 2) for i in range(0, len(padded), 8))


def xor(a: str, b: str) -> str:
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} vs {len(b)}")
    return "".join("1" if x != y else "0" for x, y in zip(a, b))


def flip(bits: str, pos: int) -> str:
    return bits[:pos] + ("1" if bits[pos] == "0" else "0") + bits[pos + 1:]


def to_hex(bits: str) -> str:
    """Lowercase hex of the right-aligned integer value (width kept separately)."""
    ndigits = max(1, (len(bits) + 3) // 4)
    return format(to_int(bits), f"0{ndigits}x")


def from_hex(hex_str: str, width: int) -> str:
    return from_int(int(hex_str, 16), width)


def to_array(bits: str) -> np.ndarray:
    return np.frombuffer(bits.encode("ascii"), dtype=np.uint8) - ord("0")


def from_array(arr) -> str:
    return "".join("1" if b else "0" for b in np.asarray(arr).ravel())


def random_bits(rng: np.random.Generator, width: int) -> str:
    return from_array(rng.integers(0, 2, size=width))
