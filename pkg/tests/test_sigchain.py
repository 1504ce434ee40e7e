import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cechain import bits
from cechain.codec import CodecSpec
from cechain.sigchain import (
    ApIdentity,
    ChainContext,
    ChainError,
    KeyMaterial,
    MissingKeyError,
    Slice,
    SliceSet,
    apply_channel_switch,
    build_message,
    channel_seq_mask,
    last_frame_switch,
    mask_last_slice,
    pearson_hash,
    reassemble,
    reassemble_and_verify,
    sign,
    slice_and_embed,
    slice_signature,
    switch_xor_transform,
    verify_sig,
)

bitstrings = st.integers(0, 2**160 - 1).map(lambda v: bits.from_int(v, 160))


# -- message -----------------------------------------------------------------

def test_message_zero():
    assert build_message(ApIdentity(0), 0) == "0" * 112


def test_message_layout_mac_first():
    assert build_message(ApIdentity(2**48 - 1), 0) == "1" * 48 + "0" * 64


def test_message_matches_concatenation_oracle():
    expected = "".join(format(int(h, 16), "04b") for h in "AABBCCDDEEFF" + format(1_700_000_000, "016x"))
    assert build_message(ApIdentity.from_str("AA:BB:CC:DD:EE:FF"), 1_700_000_000) == expected


def test_message_rejects_oversized_time():
    with pytest.raises(ValueError):
        build_message(ApIdentity(1), 2**64)


# -- signature ---------------------------------------------------------------

def test_sign_is_deterministic_and_160_bits(message, keys):
    s = sign(message, keys)
    assert s == sign(message, keys)
    assert len(s) == 160


def test_verify_accepts_own_signature(message, keys, signature):
    assert verify_sig(message, signature, keys.public_key)


def test_every_single_bit_message_flip_is_rejected(message, keys, signature):
    for pos in range(112):
        assert not verify_sig(bits.flip(message, pos), signature, keys.public_key)


def test_other_key_rejects(message, signature):
    other = KeyMaterial.generate(b"someone else")
    assert not verify_sig(message, signature, other.public_key)


def test_sign_without_private_key(message, keys):
    with pytest.raises(MissingKeyError):
        sign(message, keys.public_only())


def test_verify_rejects_malformed_length(message, keys, signature):
    with pytest.raises(ValueError):
        verify_sig(message, signature[:-1], keys.public_key)


def test_private_key_not_in_repr_or_report(keys):
    assert keys.private_key.hex() not in repr(keys)
    assert "private_key" not in keys.to_report()


# -- pearson -----------------------------------------------------------------

def test_pearson_empty():
    # pi(0 ^ 0) = 13
    assert pearson_hash(b"", b"", 8) == "00001101"


def test_pearson_one_byte():
    # pi(13 ^ 1) = pi(12) = (167*12 + 13) % 256 = 225
    assert pearson_hash(b"\x01", b"", 8) == format(0xE1, "08b")


@given(st.binary(max_size=8), st.binary(max_size=8), st.integers(1, 64))
def test_pearson_width_contract(data, key, w):
    assert len(pearson_hash(data, key, w)) == w


def test_pearson_truncates_high_order_bits():
    assert pearson_hash(b"abc", b"k", 16)[:13] == pearson_hash(b"abc", b"k", 13)


@pytest.mark.parametrize("w", [0, 65])
def test_pearson_width_range(w):
    with pytest.raises(ValueError):
        pearson_hash(b"", b"", w)


# -- slicing -----------------------------------------------------------------

@pytest.mark.parametrize("n, width, pad", [(13, 13, 9), (14, 12, 8), (15, 11, 5)])
def test_slice_shape(n, width, pad):
    chain = slice_signature("1" * 160, n)
    assert (chain.n_frames, chain.width, chain.pad_bits) == (n, width, pad)
    assert [s.index for s in chain] == list(range(1, n + 1))
    assert [s.is_last for s in chain] == [False] * (n - 1) + [True]


@settings(max_examples=50)
@given(bitstrings, st.sampled_from([13, 14, 15]))
def test_slice_round_trip(x, n):
    assert reassemble(slice_signature(x, n)) == x


def test_slice_unsupported_n():
    with pytest.raises(ChainError):
        slice_signature("0" * 160, 12)


def test_reassemble_rejects_nonzero_padding():
    chain = slice_signature("0" * 160, 15)
    last = chain[15]
    chain = chain.replace_slice(Slice(15, last.bits[:-1] + "1", True))
    with pytest.raises(ChainError):
        reassemble(chain)


def test_masked_non_last_slice_is_rejected():
    with pytest.raises(ChainError):
        Slice(1, "0101", is_last=False, masked=True)


def test_slice_json_round_trip():
    s = Slice(13, "0001101000101", True, True)
    assert Slice.from_json(s.to_json()) == s


def test_slice_json_shape():
    s = Slice(1, bits.from_int(0x1A2B, 13), False)
    assert s.to_json() == {"index": 1, "width": 13, "bits_hex": "1a2b", "is_last": False}


# -- masking -----------------------------------------------------------------

def test_mask_is_involution(keys, ctx):
    s = Slice(13, "1011001110001", is_last=True)
    once = mask_last_slice(s, ctx, keys)
    assert once.masked and once.bits != s.bits
    assert mask_last_slice(once, ctx, keys) == s


def test_mask_rejects_non_last(keys, ctx):
    with pytest.raises(ChainError):
        mask_last_slice(Slice(1, "0" * 13), ctx, keys)


@pytest.mark.parametrize("codec_kind", [None, "hamming_secded"])
@pytest.mark.parametrize("n", [13, 14, 15])
def test_honest_chain_verifies(n, codec_kind, keys, message, signature, ctx):
    codec = CodecSpec.for_frames(codec_kind, n) if codec_kind else None
    chain = slice_and_embed(signature, n, ctx, keys, codec)
    assert reassemble_and_verify(chain, keys.public_key, ctx, keys.public_only(), message, codec)


@pytest.mark.parametrize("codec_kind", [None, "hamming_secded"])
def test_verifier_channel_and_seq_perturbations(codec_kind, keys, message, signature, ctx):
    # Verification fails exactly when the station-side mask differs; a 13-bit
    # mask can collide, so equality of masks is the oracle, not the inputs.
    codec = CodecSpec.for_frames(codec_kind, 13) if codec_kind else None
    chain = slice_and_embed(signature, 13, ctx, keys, codec)
    true_mask = channel_seq_mask(ctx.channel, ctx.last_seq, keys.ptk, 13)
    failures = 0
    for channel in range(1, 15):
        for dseq in range(-5, 6):
            if channel == ctx.channel and dseq == 0:
                continue
            seen = ChainContext(channel, ctx.last_seq + dseq)
            ok = bool(reassemble_and_verify(chain, keys.public_key, seen, keys, message, codec))
            assert ok == (channel_seq_mask(channel, seen.last_seq, keys.ptk, 13) == true_mask)
            failures += not ok
    assert failures >= 150  # of 153 perturbations


def test_claimed_channel_mismatch_reports_channel(keys, message, signature, ctx):
    chain = slice_and_embed(signature, 13, ctx, keys)
    res = reassemble_and_verify(chain, keys.public_key, ctx, keys, message, claimed_channel=11)
    assert res.reason == "channel"
    res = reassemble_and_verify(chain, keys.public_key, ctx, keys, message, claimed_seq=99)
    assert res.reason == "sequence"


@pytest.mark.parametrize("n", [13, 14, 15])
def test_single_slice_replacement_fails_signature(n, keys, message, signature, ctx):
    rng = np.random.default_rng(n)
    chain = slice_and_embed(signature, n, ctx, keys)
    for idx in range(1, n + 1):
        orig = chain[idx]
        junk = bits.random_bits(rng, orig.width)
        if junk[0] == orig.bits[0]:
            junk = bits.flip(junk, 0)  # the first bit of every slice carries signature data
        bad = chain.replace_slice(Slice(idx, junk, orig.is_last, orig.masked))
        res = reassemble_and_verify(bad, keys.public_key, ctx, keys, message)
        assert res.reason == "signature", idx


def test_structural_damage_fails(keys, message, signature, ctx):
    chain = slice_and_embed(signature, 13, ctx, keys)
    dup = SliceSet(13, chain.width, chain.slices[:-1] + (chain.slices[0],), chain.pad_bits)
    assert reassemble_and_verify(dup, keys.public_key, ctx, keys, message).reason == "structure"
    swapped = list(chain.slices)
    swapped[2], swapped[3] = Slice(3, swapped[3].bits), Slice(4, swapped[2].bits)
    reordered = SliceSet(13, chain.width, tuple(swapped), chain.pad_bits)
    assert not reassemble_and_verify(reordered, keys.public_key, ctx, keys, message)


def test_wrong_message_fails(keys, message, signature, ctx):
    chain = slice_and_embed(signature, 13, ctx, keys)
    stale = build_message(ApIdentity.from_str("AA:BB:CC:DD:EE:FF"), 1_699_999_999)
    assert reassemble_and_verify(chain, keys.public_key, ctx, keys, stale).reason == "signature"


# -- channel switch tracking -------------------------------------------------

def test_xor_transform_two_elements():
    a, b = Slice(12, "1100110011001"), Slice(13, "1010101010101", True)
    assert switch_xor_transform([a, b]).bits == bits.xor(a.bits, b.bits)


def test_xor_transform_recovers_first():
    chain = slice_signature(bits.from_int(2**159 + 12345, 160), 13)
    rem = [chain[i] for i in range(5, 14)]
    carried = switch_xor_transform(rem)
    back = switch_xor_transform([carried] + rem[1:])
    assert back.bits == chain[5].bits


def test_xor_transform_needs_two():
    with pytest.raises(ChainError):
        switch_xor_transform([Slice(13, "0" * 13, True)])


def test_last_frame_switch_involution(keys):
    s = Slice(15, "10110011100", True, True)
    assert last_frame_switch(last_frame_switch(s, keys), keys) == s
    with pytest.raises(ChainError):
        last_frame_switch(Slice(3, "0" * 11), keys)


@pytest.mark.parametrize("codec_kind", [None, "hamming_secded"])
@pytest.mark.parametrize("n", [13, 14, 15])
def test_switch_recovery_every_position(n, codec_kind, keys, message, signature, ctx):
    codec = CodecSpec.for_frames(codec_kind, n) if codec_kind else None
    chain = slice_and_embed(signature, n, ctx, keys, codec)
    for after in range(1, n):
        sent = apply_channel_switch(chain, after, keys)
        assert sent != chain
        tracked = ctx.with_switch(after, ctx.channel)
        assert reassemble_and_verify(sent, keys.public_key, tracked, keys, message, codec), after
        # a station that missed the switch cannot verify
        assert not reassemble_and_verify(sent, keys.public_key, ctx, keys, message, codec)


def test_two_switches_recover(keys, message, signature, ctx):
    chain = slice_and_embed(signature, 14, ctx, keys)
    sent = apply_channel_switch(apply_channel_switch(chain, 3, keys), 9, keys)
    tracked = ctx.with_switch(3, 1).with_switch(9, ctx.channel)
    assert reassemble_and_verify(sent, keys.public_key, tracked, keys, message)


def test_forged_xor_slice_fails(keys, message, signature, ctx):
    chain = slice_and_embed(signature, 13, ctx, keys)
    sent = apply_channel_switch(chain, 4, keys)
    forged = sent.replace_slice(Slice(5, bits.flip(sent[5].bits, 0)))
    tracked = ctx.with_switch(4, ctx.channel)
    assert not reassemble_and_verify(forged, keys.public_key, tracked, keys, message)


def test_last_frame_switch_wrong_ptk_fails(keys, message, signature, ctx):
    chain = slice_and_embed(signature, 13, ctx, keys)
    sent = apply_channel_switch(chain, 12, keys)
    tracked = ctx.with_switch(12, ctx.channel)

    def effective_mask(ptk):
        return bits.xor(channel_seq_mask(ctx.channel, ctx.last_seq, ptk, 13), pearson_hash(b"", ptk, 13))

    rng = np.random.default_rng(7)
    failures = 0
    for _ in range(100):
        wrong = KeyMaterial(keys.public_key, b"", rng.bytes(16), keys.pmk)
        ok = bool(reassemble_and_verify(sent, keys.public_key, tracked, wrong, message))
        assert ok == (effective_mask(wrong.ptk) == effective_mask(keys.ptk))
        failures += not ok
    assert failures >= 95


def test_context_invariants():
    with pytest.raises(ValueError):
        ChainContext(1, 1, attempts_left=4)
    with pytest.raises(ValueError):
        ChainContext(1, 1).with_switch(5, 2).with_switch(5, 3)
