"""Slicing a signature across CE frame preambles and verifying the chain.

AP side::

    m = build_message(ap, t)
    chain = slice_and_embed(sign(m, keys), n_frames, ctx, keys, codec)
    chain = apply_channel_switch(chain, after_index, keys)   # optional, repeatable

Station side::

    reassemble_and_verify(chain, keys.public_key, ctx, keys, m, codec)

where ``ctx`` on the station holds the channel the last frame was received on,
that frame's sequence number and the switch log the station tracked.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .. import bits as _bits
from ..codec import SLICE_WIDTHS, CodecSpec
from .pearson import pearson_hash
from .scheme import DEFAULT_SCHEME, SIGNATURE_BITS, KeyMaterial, SignatureScheme

MAC_BITS = 48
TIME_BITS = 64
DEFAULT_LIMIT = 3


class ChainError(ValueError):
    """A chain operation was called outside its contract."""


@dataclass(frozen=True)
class ApIdentity:
    mac: int
    location: tuple[float, float, float] = (0.0, 0.0, 0.0)
    key_handle: str = ""

    def __post_init__(self):
        if not 0 <= self.mac < 1 << MAC_BITS:
            raise ValueError("mac must be a 48-bit integer")
        if not all(math.isfinite(v) for v in self.location):
            raise ValueError("location must be finite")

    @classmethod
    def from_str(cls, mac: str, **kw) -> "ApIdentity":
        return cls(int(mac.replace(":", "").replace("-", ""), 16), **kw)


def build_message(ap: ApIdentity, t: int) -> str:
    """112-bit ``mac || utc_seconds``, big-endian, mac first."""
    if not 0 <= t < 1 << TIME_BITS:
        raise ValueError("timestamp must fit in 64 unsigned bits")
    return _bits.from_int(ap.mac, MAC_BITS) + _bits.from_int(t, TIME_BITS)


@dataclass(frozen=True)
class Slice:
    index: int
    bits: str
    is_last: bool = False
    masked: bool = False

    def __post_init__(self):
        if self.masked and not self.is_last:
            raise ChainError("only the last slice may be masked")

    @property
    def width(self) -> int:
        return len(self.bits)

    def to_json(self) -> dict:
        return {"index": self.index, "width": self.width,
                "bits_hex": _bits.to_hex(self.bits), "is_last": self.is_last}

    @classmethod
    def from_json(cls, obj: dict) -> "Slice":
        return cls(obj["index"], _bits.from_hex(obj["bits_hex"], obj["width"]),
                   bool(obj["is_last"]), bool(obj.get("masked", obj["is_last"])))


@dataclass(frozen=True)
class SliceSet:
    n_frames: int
    width: int
    slices: tuple[Slice, ...]
    pad_bits: int = 0

    def __post_init__(self):
        if len(self.slices) != self.n_frames:
            raise ChainError(f"expected {self.n_frames} slices, got {len(self.slices)}")

    def __iter__(self):
        return iter(self.slices)

    def __getitem__(self, index: int) -> Slice:
        """1-based lookup by slice index."""
        for s in self.slices:
            if s.index == index:
                return s
        raise KeyError(index)

    def replace_slice(self, new: Slice) -> "SliceSet":
        return replace(self, slices=tuple(new if s.index == new.index else s for s in self.slices))

    def to_json(self) -> dict:
        return {"n_frames": self.n_frames, "width": self.width, "pad_bits": self.pad_bits,
                "slices": [s.to_json() for s in self.slices]}


@dataclass(frozen=True)
class SwitchRecord:
    after_index: int
    new_channel: int
    valid: bool = True


@dataclass(frozen=True)
class ChainContext:
    channel: int
    last_seq: int
    attempts_left: int = DEFAULT_LIMIT
    switch_log: tuple[SwitchRecord, ...] = ()

    def __post_init__(self):
        if not 0 <= self.attempts_left <= DEFAULT_LIMIT:
            raise ValueError("attempts_left must be within [0, 3]")
        idx = [r.after_index for r in self.switch_log]
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise ValueError("switch_log indices must be strictly increasing")

    @property
    def limit_ok(self) -> bool:
        return self.attempts_left > 0

    def with_switch(self, after_index: int, new_channel: int, valid: bool = True) -> "ChainContext":
        rec = SwitchRecord(after_index, new_channel, valid)
        return replace(self, channel=new_channel, switch_log=self.switch_log + (rec,))


# -- slicing ---------------------------------------------------------------

def slice_signature(bits: str, n_frames: int) -> SliceSet:
    if n_frames not in SLICE_WIDTHS:
        raise ChainError(f"unsupported frame count {n_frames}; expected one of {sorted(SLICE_WIDTHS)}")
    width = SLICE_WIDTHS[n_frames]
    total = n_frames * width
    if len(bits) > total:
        raise ChainError(f"{len(bits)} bits do not fit {n_frames} x {width}")
    pad = total - len(bits)
    padded = bits + "0" * pad
    slices = tuple(
        Slice(i + 1, padded[i * width:(i + 1) * width], is_last=i + 1 == n_frames)
        for i in range(n_frames)
    )
    return SliceSet(n_frames, width, slices, pad)


def reassemble(chain: SliceSet) -> str:
    """Concatenate slices in index order and strip the tail padding.

    Raises :class:`ChainError` on missing or duplicate indices and if any
    pad bit is non-zero.
    """
    ordered = _ordered(chain)
    joined = "".join(s.bits for s in ordered)
    if chain.pad_bits:
        if "1" in joined[-chain.pad_bits:]:
            raise ChainError("non-zero padding")
        joined = joined[:-chain.pad_bits]
    return joined


def _ordered(chain: SliceSet) -> list[Slice]:
    seen = sorted(s.index for s in chain.slices)
    if len(set(seen)) != len(seen):
        raise ChainError("duplicate slice index")
    if seen != list(range(1, chain.n_frames + 1)):
        raise ChainError("missing slice index")
    return sorted(chain.slices, key=lambda s: s.index)


def encode_chain(chain: SliceSet, codec: CodecSpec) -> SliceSet:
    if codec.k != chain.width:
        raise ChainError(f"codec expects {codec.k}-bit slices, chain has {chain.width}")
    slices = tuple(replace(s, bits=codec.encode(s.bits)) for s in chain.slices)
    return replace(chain, width=codec.n, slices=slices)


def decode_chain(chain: SliceSet, codec: CodecSpec) -> tuple[SliceSet, list[str]]:
    out, statuses = [], []
    for s in chain.slices:
        data, status = codec.decode(s.bits)
        out.append(replace(s, bits=data))
        statuses.append(status.value)
    return replace(chain, width=codec.k, slices=tuple(out)), statuses


# -- masking and channel-switch tracking -------------------------------------

def channel_seq_mask(channel: int, seq: int, ptk: bytes, width: int) -> str:
    return pearson_hash(bytes([channel & 0xFF]) + (seq & 0xFFFF).to_bytes(2, "big"), ptk, width)


def mask_last_slice(s: Slice, ctx: ChainContext, key: KeyMaterial) -> Slice:
    """XOR the last slice with the keyed hash of (channel, sequence number).

    Applying it to an already-masked slice removes the mask, so the station
    uses the same call to unmask.
    """
    if not s.is_last:
        raise ChainError("only the last slice is masked")
    mask = channel_seq_mask(ctx.channel, ctx.last_seq, key.ptk, s.width)
    return replace(s, bits=_bits.xor(s.bits, mask), masked=not s.masked)


def switch_xor_transform(remaining) -> Slice:
    """``P'_{n+1} = P_{n+1} ^ P_{n+2} ^ ... ^ P_N`` carried at index n+1."""
    remaining = sorted(remaining, key=lambda s: s.index)
    if len(remaining) < 2:
        raise ChainError("XOR transform needs at least two remaining slices; use last_frame_switch")
    acc = remaining[0].bits
    for s in remaining[1:]:
        acc = _bits.xor(acc, s.bits)
    return Slice(remaining[0].index, acc)


def last_frame_switch(p_last: Slice, key: KeyMaterial) -> Slice:
    if not p_last.is_last:
        raise ChainError("last_frame_switch applies to the last slice only")
    return replace(p_last, bits=_bits.xor(p_last.bits, pearson_hash(b"", key.ptk, p_last.width)))


def apply_channel_switch(chain: SliceSet, after_index: int, key: KeyMaterial) -> SliceSet:
    """AP side: rewrite the slices still to be sent after a switch following ``after_index``."""
    if not 1 <= after_index < chain.n_frames:
        raise ChainError(f"switch position must be in 1..{chain.n_frames - 1}")
    if after_index == chain.n_frames - 1:
        return chain.replace_slice(last_frame_switch(chain[chain.n_frames], key))
    remaining = [chain[i] for i in range(after_index + 1, chain.n_frames + 1)]
    return chain.replace_slice(switch_xor_transform(remaining))


def recover_channel_switch(chain: SliceSet, after_index: int, key: KeyMaterial) -> SliceSet:
    """Station side inverse of :func:`apply_channel_switch`."""
    if not 1 <= after_index < chain.n_frames:
        raise ChainError(f"switch position must be in 1..{chain.n_frames - 1}")
    if after_index == chain.n_frames - 1:
        return chain.replace_slice(last_frame_switch(chain[chain.n_frames], key))
    # P'_{n+1} ^ P_{n+2} ^ ... ^ P_N == P_{n+1}
    carried = [chain[i] for i in range(after_index + 1, chain.n_frames + 1)]
    return chain.replace_slice(switch_xor_transform(carried))


# -- end to end --------------------------------------------------------------

@dataclass(frozen=True)
class Verification:
    ok: bool
    reason: str | None = None
    statuses: tuple[str, ...] = field(default=(), compare=False)

    def __bool__(self):
        return self.ok


SUCCESS = Verification(True)


def generate_signature(m: str, key: KeyMaterial, scheme: SignatureScheme = DEFAULT_SCHEME) -> str:
    from .scheme import sign
    return sign(m, key, scheme)


def slice_and_embed(signature: str, n_frames: int, ctx: ChainContext, key: KeyMaterial,
                    codec: CodecSpec | None = None) -> SliceSet:
    """Slice, mask the last slice with (channel, seq), then encode each slice.

    ``ctx`` is the AP's context at EAPOL3 time: the operating channel and the
    sequence number of that frame. The mask goes on the data bits so a
    mismatched mask can never be absorbed by error correction.
    """
    chain = slice_signature(signature, n_frames)
    chain = chain.replace_slice(mask_last_slice(chain[n_frames], ctx, key))
    if codec is not None:
        chain = encode_chain(chain, codec)
    return chain


def reassemble_and_verify(chain: SliceSet, public_key: bytes, ctx: ChainContext,
                          key: KeyMaterial, m: str, codec: CodecSpec | None = None,
                          claimed_channel: int | None = None, claimed_seq: int | None = None,
                          scheme: SignatureScheme = DEFAULT_SCHEME) -> Verification:
    """Run the station's checks in order and report the first that fails.

    ``ctx.channel`` and ``ctx.last_seq`` are what the station itself observed;
    ``claimed_*`` are the values carried in the frames, if known. Switches in
    ``ctx.switch_log`` flagged valid are undone latest-first before unmasking.
    """
    try:
        _ordered(chain)
    except ChainError:
        return Verification(False, "structure")
    if claimed_channel is not None and claimed_channel != ctx.channel:
        return Verification(False, "channel")
    if claimed_seq is not None and claimed_seq != ctx.last_seq:
        return Verification(False, "sequence")

    for rec in sorted(ctx.switch_log, key=lambda r: r.after_index, reverse=True):
        if rec.valid:
            try:
                chain = recover_channel_switch(chain, rec.after_index, key)
            except ChainError:
                return Verification(False, "structure")
    statuses: tuple[str, ...] = ()
    if codec is not None:
        if chain.width != codec.n:
            return Verification(False, "structure")
        chain, st = decode_chain(chain, codec)
        statuses = tuple(st)
        if "detected_uncorrectable" in st:
            return Verification(False, "decode", statuses)
    last = chain[chain.n_frames]
    if not last.is_last:
        return Verification(False, "structure")
    chain = chain.replace_slice(mask_last_slice(replace(last, masked=True), ctx, key))
    joined = "".join(s.bits for s in _ordered(chain))
    if len(joined) - chain.pad_bits != SIGNATURE_BITS:
        return Verification(False, "structure", statuses)
    if not scheme.verify(m, joined[:SIGNATURE_BITS], public_key):
        return Verification(False, "signature", statuses)
    if "1" in joined[SIGNATURE_BITS:]:
        return Verification(False, "padding", statuses)
    return Verification(True, None, statuses)
