# Walk a signature through slicing, masking, a channel switch and verification.
from cechain import bits
from cechain.codec import CodecSpec
from cechain.sigchain import (
    ApIdentity, ChainContext, KeyMaterial, apply_channel_switch, build_message,
    generate_signature, reassemble_and_verify, slice_and_embed,
)

key = KeyMaterial.generate(b"demo-ap")
ap = ApIdentity.from_str("02:00:5E:10:00:01")
m = build_message(ap, 1_700_000_000)
sig = generate_signature(m, key)
print("message  ", bits.to_hex(m))
print("signature", bits.to_hex(sig))

ctx = ChainContext(channel=6, last_seq=4101)
codec = CodecSpec.for_frames("hamming_secded", 13)
chain = slice_and_embed(sig, 13, ctx, key, codec)
for s in chain:
    print(f"  frame {s.index:2d}  {s.bits}{'  (masked)' if s.masked else ''}")

print("honest:", reassemble_and_verify(chain, key.public_key, ctx, key, m, codec))

# AP hops to channel 11 after frame 5, so EAPOL3 goes out (and is masked) on 11;
# the station follows the CSA
moved = apply_channel_switch(slice_and_embed(sig, 13, ChainContext(11, 4101), key, codec), 5, key)
tracked = ctx.with_switch(5, 11)
print("switch tracked:", reassemble_and_verify(moved, key.public_key, tracked, key, m, codec).ok)
print("switch missed: ", reassemble_and_verify(moved, key.public_key, ctx, key, m, codec).reason)

# wrong sequence number in the station's context breaks the last-slice mask
print("stale seq:     ", reassemble_and_verify(chain, key.public_key, ChainContext(6, 4100), key, m, codec).reason)
