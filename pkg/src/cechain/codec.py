"""Per-slice channel coding: identity or shortened extended Hamming (SECDED).

Codewords are systematic: ``data(k) || hamming parity(r) || overall parity``.
Data bit ``j`` is assigned the ``j``-th smallest syndrome value that is not a
power of two (3, 5, 6, 7, 9, ...); parity bit ``i`` owns syndrome ``2**i``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import bits as _bits

SIGNATURE_BITS = 160
PREAMBLE_BUDGET_BITS = 260
SLICE_WIDTHS = {13: 13, 14: 12, 15: 11}


class Status(str, enum.Enum):
    CLEAN = "clean"
    CORRECTED = "corrected"
    DETECTED = "detected_uncorrectable"


_STATUS_CODES = (Status.CLEAN, Status.CORRECTED, Status.DETECTED)


def _parity_count(k: int) -> int:
    r = 2
    while (1 << r) - r - 1 < k:
        r += 1
    return r


@dataclass(frozen=True)
class CodecSpec:
    kind: str
    k: int

    def __post_init__(self):
        if self.kind not in ("identity", "hamming_secded"):
            raise ValueError(f"unknown codec kind {self.kind!r}")
        if self.k < 1:
            raise ValueError("data width must be positive")

    @property
    def r(self) -> int:
        return _parity_count(self.k) if self.kind == "hamming_secded" else 0

    @property
    def n(self) -> int:
        return self.k + self.r + 1 if self.kind == "hamming_secded" else self.k

    @classmethod
    def for_frames(cls, kind: str, n_frames: int) -> "CodecSpec":
        if n_frames not in SLICE_WIDTHS:
            raise ValueError(f"unsupported frame count {n_frames}")
        return cls(kind, SLICE_WIDTHS[n_frames])

    @classmethod
    def from_config(cls, cfg: dict | None, n_frames: int) -> "CodecSpec":
        kind = (cfg or {}).get("kind", "identity")
        return cls.for_frames(kind, n_frames)

    def coded_bits(self, n_frames: int) -> int:
        return n_frames * self.n

    def within_budget(self, n_frames: int) -> bool:
        return self.coded_bits(n_frames) <= PREAMBLE_BUDGET_BITS

    def rate(self, n_frames: int) -> float:
        return SIGNATURE_BITS / self.coded_bits(n_frames)

    @cached_property
    def _tables(self):
        r = self.r
        data_syndromes = [s for s in range(3, 1 << r) if s & (s - 1)][: self.k]
        syndromes = np.array(data_syndromes + [1 << i for i in range(r)], dtype=np.int64)
        # columns of H as bit vectors, rows = parity checks
        h = ((syndromes[None, :] >> np.arange(r)[:, None]) & 1).astype(np.uint8)
        position = np.full(1 << r, -1, dtype=np.int64)
        position[syndromes] = np.arange(self.k + r)
        return h, position, (1 << np.arange(r)).astype(np.int64)

    # -- batch interface, arrays of shape (..., k) / (..., n) -------------

    def encode_array(self, data: np.ndarray) -> np.ndarray:
        data = np.asarray(data, dtype=np.uint8)
        if data.shape[-1] != self.k:
            raise ValueError(f"expected {self.k} data bits, got {data.shape[-1]}")
        if self.kind == "identity":
            return data.copy()
        h, _, _ = self._tables
        parity = (data.astype(np.int64) @ h[:, : self.k].T.astype(np.int64)) & 1
        body = np.concatenate([data, parity.astype(np.uint8)], axis=-1)
        overall = body.sum(axis=-1, keepdims=True, dtype=np.int64) & 1
        return np.concatenate([body, overall.astype(np.uint8)], axis=-1)

    def decode_array(self, words: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Returns ``(data, status)``; status is 0 clean, 1 corrected, 2 detected."""
        words = np.asarray(words, dtype=np.uint8)
        if words.shape[-1] != self.n:
            raise ValueError(f"expected {self.n} code bits, got {words.shape[-1]}")
        if self.kind == "identity":
            return words.copy(), np.zeros(words.shape[:-1], dtype=np.int8)
        lead = words.shape[:-1]
        words = words.reshape(-1, self.n)
        h, position, weights = self._tables
        body = words[..., :-1].astype(np.int64)
        syn_bits = (body @ h.T.astype(np.int64)) & 1
        syndrome = syn_bits @ weights
        overall = words.sum(axis=-1, dtype=np.int64) & 1
        pos = position[syndrome]

        status = np.zeros(len(words), dtype=np.int8)
        single = overall == 1
        fixable = single & ((syndrome == 0) | (pos >= 0))
        status[fixable] = 1
        status[(single & ~fixable) | (~single & (syndrome != 0))] = 2

        data = words[..., : self.k].copy()
        flip_data = fixable & (syndrome != 0) & (pos < self.k)
        rows = np.nonzero(flip_data)[0]
        data[rows, pos[rows]] ^= 1
        return data.reshape(lead + (self.k,)), status.reshape(lead)

    # -- scalar interface on bit-strings ------------------------------------

    def encode(self, data: str) -> str:
        if len(data) != self.k:
            raise ValueError(f"expected {self.k} data bits, got {len(data)}")
        return _bits.from_array(self.encode_array(_bits.to_array(data)))

    def decode(self, word: str) -> tuple[str, Status]:
        if len(word) != self.n:
            raise ValueError(f"expected {self.n} code bits, got {len(word)}")
        data, status = self.decode_array(_bits.to_array(word))
        return _bits.from_array(data), _STATUS_CODES[int(status)]


def encode_slice(data: str, spec: CodecSpec) -> str:
    return spec.encode(data)


def decode_slice(word: str, spec: CodecSpec) -> tuple[str, Status]:
    return spec.decode(word)
