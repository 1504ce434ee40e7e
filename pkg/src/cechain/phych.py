"""Bit-flip channel for preamble-embedded bits and BER/SR sweeps.

The preamble is modelled as a binary symmetric channel whose crossover
probability follows BPSK under AWGN or flat Rayleigh fading at a given SNR.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc

from .codec import SIGNATURE_BITS, SLICE_WIDTHS, CodecSpec

CAPACITY_BITS = 20


@dataclass(frozen=True)
class ChannelModel:
    kind: str = "awgn"
    snr_db: float = 10.0
    capacity_bits_per_preamble: int = CAPACITY_BITS

    def __post_init__(self):
        if self.kind not in ("awgn", "rayleigh"):
            raise ValueError(f"unknown channel kind {self.kind!r}")
        if math.isnan(self.snr_db):
            raise ValueError("snr_db must be a number")
        if self.capacity_bits_per_preamble != CAPACITY_BITS:
            raise ValueError("preamble capacity is fixed at 20 bits")


def flip_probability(model: ChannelModel) -> float:
    if model.snr_db == math.inf:
        return 0.0
    if model.snr_db == -math.inf:
        return 1.0 if model.kind == "awgn" else 0.5
    gamma = 10.0 ** (model.snr_db / 10.0)
    if model.kind == "awgn":
        # Q(sqrt(gamma))
        return float(0.5 * erfc(math.sqrt(gamma) / math.sqrt(2.0)))
    return 0.5 * (1.0 - math.sqrt(gamma / (2.0 + gamma)))


def flip_bits(bits: np.ndarray, p: float, rng: np.random.Generator) -> np.ndarray:
    bits = np.asarray(bits, dtype=np.uint8)
    if p <= 0.0:
        return bits.copy()
    if p >= 1.0:
        return bits ^ 1
    return bits ^ (rng.random(bits.shape) < p).astype(np.uint8)


def transmit_bits(bits, model: ChannelModel, rng_seed: int) -> np.ndarray:
    """Send ``bits`` through ``model``; each bit flips independently."""
    return flip_bits(bits, flip_probability(model), np.random.default_rng(rng_seed))


def empirical_ber(model: ChannelModel, n_bits: int, rng_seed: int) -> float:
    rng = np.random.default_rng(rng_seed)
    sent = rng.integers(0, 2, size=n_bits, dtype=np.uint8)
    return float((flip_bits(sent, flip_probability(model), rng) != sent).mean())


@dataclass(frozen=True)
class SweepRow:
    snr_db: float
    coded: bool
    ber: float
    sr: float
    trials: int


class SweepResult(list):
    """Rows of a BER/SR sweep, ordered by (snr_db, coded)."""

    header = ("snr_db", "coded", "ber", "sr", "trials")

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.header)
        for r in self:
            w.writerow([f"{r.snr_db:.6g}", str(r.coded).lower(), f"{r.ber:.6g}", f"{r.sr:.6g}", r.trials])
        return buf.getvalue()

    def to_json(self) -> list[dict]:
        return [{"snr_db": r.snr_db, "coded": r.coded, "ber": r.ber, "sr": r.sr, "trials": r.trials}
                for r in self]

    def row(self, snr_db: float, coded: bool) -> SweepRow:
        for r in self:
            if r.snr_db == snr_db and r.coded == coded:
                return r
        raise KeyError((snr_db, coded))


def _simulate(n_frames: int, codec: CodecSpec, p: float, trials: int,
              rng: np.random.Generator) -> tuple[float, float]:
    """Send ``trials`` random signatures; return (BER over 160 bits, SR)."""
    k = SLICE_WIDTHS[n_frames]
    sig = rng.integers(0, 2, size=(trials, SIGNATURE_BITS), dtype=np.uint8)
    padded = np.zeros((trials, n_frames * k), dtype=np.uint8)
    padded[:, :SIGNATURE_BITS] = sig
    data = padded.reshape(trials, n_frames, k)
    received = flip_bits(codec.encode_array(data), p, rng)
    decoded, status = codec.decode_array(received)
    decoded = decoded.reshape(trials, n_frames * k)
    errors = decoded[:, :SIGNATURE_BITS] != sig
    # every bit right, padding included, and no codeword flagged as unrecoverable
    ok = ~(decoded != padded).any(axis=1) & ~(status == 2).any(axis=1)
    return float(errors.mean()), float(ok.mean())


def ber_sr_sweep(snrs, n_frames: int | None = None, codec_kind: str = "identity",
                 signatures: int = 10_000, rng_seed: int = 0, kind: str = "awgn") -> SweepResult:
    """Monte Carlo BER and signature success rate at each SNR.

    With ``n_frames`` unset, every SNR point is averaged over N in {13, 14, 15}.
    Each (SNR, N) pair draws from its own seeded stream so points can be run
    in any order or in parallel without changing results.
    """
    if signatures < 1:
        raise ValueError("signatures must be >= 1")
    frames = [n_frames] if n_frames is not None else sorted(SLICE_WIDTHS)
    coded = codec_kind != "identity"
    out = SweepResult()
    for i, snr in enumerate(snrs):
        p = flip_probability(ChannelModel(kind, float(snr)))
        bers, srs = [], []
        for n in frames:
            rng = np.random.default_rng([rng_seed, i, n, int(coded)])
            ber, sr = _simulate(n, CodecSpec.for_frames(codec_kind, n), p, signatures, rng)
            bers.append(ber)
            srs.append(sr)
        out.append(SweepRow(float(snr), coded, float(np.mean(bers)), float(np.mean(srs)), signatures))
    return out


def analytic_sr(p: float, n_frames: int, codec_kind: str = "identity") -> float:
    """Success rate if decoding succeeds exactly when no codeword sees more errors than it fixes."""
    spec = CodecSpec.for_frames(codec_kind, n_frames)
    if codec_kind == "identity":
        return (1.0 - p) ** (n_frames * spec.n)
    n = spec.n
    per_word = (1.0 - p) ** n + n * p * (1.0 - p) ** (n - 1)
    return per_word ** n_frames
