"""Signature chaining through CE frame preambles."""

from .chain import (
    DEFAULT_LIMIT,
    ApIdentity,
    ChainContext,
    ChainError,
    Slice,
    SliceSet,
    SwitchRecord,
    Verification,
    apply_channel_switch,
    build_message,
    channel_seq_mask,
    decode_chain,
    encode_chain,
    generate_signature,
    last_frame_switch,
    mask_last_slice,
    reassemble,
    reassemble_and_verify,
    recover_channel_switch,
    slice_and_embed,
    slice_signature,
    switch_xor_transform,
)
from .pearson import pearson_hash
from .roaming import guess_success_probability, monte_carlo_guess, roaming_slices, roaming_verify
from .scheme import (
    DEFAULT_SCHEME,
    SIGNATURE_BITS,
    KeyMaterial,
    MissingKeyError,
    SchnorrScheme,
    SignatureScheme,
    sign,
    verify_sig,
)
