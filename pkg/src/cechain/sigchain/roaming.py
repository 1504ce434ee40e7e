"""Roaming check and brute-force odds for guessing slices."""

from __future__ import annotations

import hashlib
import hmac

import numpy as np

from .chain import ChainError, Slice, SliceSet, slice_signature

ROAMING_FRAMES = 13


def roaming_slices(pmk: bytes, m: str, n_frames: int = ROAMING_FRAMES) -> SliceSet:
    """HMAC-SHA1 over the message under the PMK, sliced like a signature."""
    from .. import bits as _bits
    tag = hmac.new(pmk, _bits.to_bytes(m), hashlib.sha1).digest()
    return slice_signature(_bits.from_bytes(tag), n_frames)


def roaming_verify(offered, local: SliceSet) -> bool:
    """Accept the target AP iff both offered ``(index, bits)`` pairs match locally."""
    offered = [(s.index, s.bits) if isinstance(s, Slice) else tuple(s) for s in offered]
    if len(offered) != 2:
        raise ChainError("roaming offers exactly two slices")
    (i, a), (j, b) = offered
    if i == j:
        raise ChainError("roaming slice indices must be distinct")
    for idx in (i, j):
        if not 1 <= idx <= local.n_frames:
            raise ChainError(f"slice index {idx} out of range")
    return local[i].bits == a and local[j].bits == b


def guess_success_probability(num_slices: int, width: int, limit: int) -> float:
    """Chance that at least one of ``num_slices`` slices is guessed within ``limit`` tries."""
    if limit < 1 or width < 1:
        raise ValueError("limit and width must be >= 1")
    per_slice = min(1.0, limit * 2.0 ** -width)
    # 1 - (1 - q)^n without cancellation for tiny q
    return float(-np.expm1(num_slices * np.log1p(-per_slice))) if per_slice < 1 else 1.0


def monte_carlo_guess(num_slices: int, width: int, limit: int, trials: int,
                      seed: int = 0, chunk: int = 1_000_000) -> tuple[int, int]:
    """Simulate an attacker trying ``limit`` distinct values per slice.

    Returns ``(successes, trials)``; a trial succeeds if any slice is hit.
    """
    rng = np.random.default_rng(seed)
    space = 1 << width
    hits = 0
    done = 0
    while done < trials:
        n = min(chunk, trials - done)
        secret = rng.integers(0, space, size=(n, num_slices))
        start = rng.integers(0, space, size=(n, num_slices))
        # guesses start, start+1, ..., start+limit-1 (mod space) are distinct
        offset = (secret - start) % space
        hits += int(np.any(offset < limit, axis=1).sum())
        done += n
    return hits, trials
